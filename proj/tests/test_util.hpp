#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <string>

namespace testutil {

// Writes `content` to a fresh file under the system temp directory and
// removes it when the guard dies.
class TempFile {
public:
    explicit TempFile(const std::string& content, const std::string& suffix = ".csv") {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("sensweep_test_" + std::to_string(counter.fetch_add(1)) + suffix);
        std::ofstream out(path_);
        out << content;
    }
    ~TempFile() {
        std::error_code ec;
        std::filesystem::remove(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace testutil
