#include <fstream>
#include <sstream>

#include "resttsl/errors.hpp"
#include "resttsl/fsutil.hpp"

namespace resttsl::fsutil {

void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path parent = path.parent_path();
    if (!parent.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(parent, ec);
    }
    std::filesystem::path temp = path;
    temp += ".tmp";
    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        if (!out) fail(ErrorCode::IoError, "cannot write " + temp.string());
        out << content;
        if (!out.good()) fail(ErrorCode::IoError, "short write to " + temp.string());
    }
    std::error_code ec;
    std::filesystem::rename(temp, path, ec);
    if (ec) fail(ErrorCode::IoError, "cannot replace " + path.string() + ": " + ec.message());
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

} // namespace resttsl::fsutil
