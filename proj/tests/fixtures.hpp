#pragma once

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "hazemix/image_io.hpp"
#include "synthetic.hpp"

namespace hazemix::fixture {

namespace fs = std::filesystem;

/// Fresh empty directory under the build tree's scratch area.
inline fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::path(HAZEMIX_TEST_TMP) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

/// Writes `pairs` synthetic "<id>_hazy.png" / "<id>_GT.png" pairs into `dir`.
inline void write_source_dataset(const fs::path& dir, int pairs, std::uint64_t seed, int size = 24) {
    Rng rng(seed);
    for (int i = 0; i < pairs; ++i) {
        const auto inst = strict_instance(size, size, rng);
        const std::string id = "scene" + std::to_string(i);
        save_image(inst.hazy, dir / (id + "_hazy.png"));
        save_image(inst.clean, dir / (id + "_GT.png"));
    }
}

/// Writes `count` hazy target images with varied haze into `dir`.
inline void write_target_dataset(const fs::path& dir, int count, std::uint64_t seed, int size = 24) {
    Rng rng(seed);
    for (int i = 0; i < count; ++i) {
        const auto clean = random_rgb(size, size, rng);
        const Rgb a{230, 230, 230};
        const double t = 0.2 + 0.6 * i / std::max(1, count - 1);
        const auto hazy = synthesize_hazy(clean, SyntheticHazeParams::uniform(a, size, size, t));
        save_image(hazy, dir / ("target" + std::to_string(i) + ".png"));
    }
}

inline std::string read_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Relative path -> file contents for every regular file under `root`.
inline std::map<std::string, std::string> tree_contents(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = read_bytes(e.path());
    }
    return out;
}

struct CliResult {
    int exit_code = -1;
    std::string output;
};

/// Runs the CLI with `args` through the shell, capturing stdout.
inline CliResult run_cli(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + (env.empty() ? "" : " ") + "\"" + HAZEMIX_CLI_PATH + "\" " + args + " 2>/dev/null";
    CliResult r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.output.append(buf.data(), n);
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

}  // namespace hazemix::fixture
