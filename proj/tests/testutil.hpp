#pragma once

#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>

#include "resttsl/fsutil.hpp"

namespace testutil {

inline std::filesystem::path source_root() {
    return std::filesystem::path(RESTTSL_SOURCE_DIR);
}

inline std::filesystem::path fixture(const std::string& relative) {
    return source_root() / "fixtures" / relative;
}

inline std::filesystem::path templates_dir() { return source_root() / "templates"; }

inline std::string read_file(const std::filesystem::path& path) {
    return resttsl::fsutil::read_text(path);
}

/// Unique scratch directory removed on destruction.
struct TempDir {
    std::filesystem::path path;

    TempDir() {
        static std::mt19937_64 rng{std::random_device{}()};
        std::filesystem::path base = std::filesystem::temp_directory_path();
        for (int i = 0; i < 64; ++i) {
            std::filesystem::path candidate =
                base / ("resttsl-test-" + std::to_string(rng()));
            std::error_code ec;
            if (std::filesystem::create_directory(candidate, ec)) {
                path = candidate;
                return;
            }
        }
        throw std::runtime_error("cannot create temp dir");
    }

    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
};

} // namespace testutil
