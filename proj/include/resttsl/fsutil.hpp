#pragma once

#include <filesystem>
#include <string>

namespace resttsl::fsutil {

/// Writes through a sibling temp file and renames into place, creating parent
/// directories as needed. Readers never observe a partially written file.
void write_text_atomic(const std::filesystem::path& path, const std::string& content);

/// Reads a whole file; throws IoError when it cannot be opened.
std::string read_text(const std::filesystem::path& path);

} // namespace resttsl::fsutil
