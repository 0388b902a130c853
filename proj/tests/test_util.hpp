#pragma once

#include "codedmm/linalg.hpp"
#include "codedmm/rng.hpp"

#include <array>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <string>

namespace codedmm::test {

/// Naive triple-loop A^T B, the reference for every product kernel.
inline DenseMatrix naive_gram(const DenseMatrix& a, const DenseMatrix& b) {
    DenseMatrix out = DenseMatrix::Zero(a.cols(), b.cols());
    for (long long i = 0; i < a.cols(); ++i) {
        for (long long j = 0; j < b.cols(); ++j) {
            double acc = 0.0;
            for (long long k = 0; k < a.rows(); ++k) acc += a(k, i) * b(k, j);
            out(i, j) = acc;
        }
    }
    return out;
}

struct CommandResult {
    int exit_code = -1;
    std::string output;
};

/// Runs a shell command capturing stdout (stderr folded in).
inline CommandResult run_command(const std::string& command) {
    CommandResult result;
    std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen((command + " 2>&1").c_str(), "r"), pclose);
    if (!pipe) return result;
    std::array<char, 4096> buf{};
    std::size_t got = 0;
    while ((got = fread(buf.data(), 1, buf.size(), pipe.get())) > 0) {
        result.output.append(buf.data(), got);
    }
    const int status = pclose(pipe.release());
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

/// Fresh scratch directory under the system temp root.
inline std::filesystem::path scratch_dir(const std::string& tag) {
    static std::uint64_t counter = 0;
    const auto dir = std::filesystem::temp_directory_path() /
                     ("codedmm_" + tag + "_" + std::to_string(::getpid()) + "_" +
                      std::to_string(counter++));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::string data;
    FILE* f = fopen(path.c_str(), "rb");
    if (!f) return data;
    std::array<char, 4096> buf{};
    std::size_t got = 0;
    while ((got = fread(buf.data(), 1, buf.size(), f)) > 0) data.append(buf.data(), got);
    fclose(f);
    return data;
}

} // namespace codedmm::test
