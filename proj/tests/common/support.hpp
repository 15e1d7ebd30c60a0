#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "incred/system.hpp"

namespace testing {

inline std::string fixture_path(const std::string& name) {
    return std::string(INCRED_FIXTURE_DIR) + "/" + name + ".json";
}

inline incred::SystemDef fixture(const std::string& name) {
    return incred::load_system(fixture_path(name));
}

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

/// A fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch(const std::string& tag) {
    auto dir = std::filesystem::temp_directory_path() / ("incred_test_" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

/// Runs the CLI with stdout and stderr discarded; returns its exit status.
inline int run_cli(const std::string& args) {
    const std::string cmd = std::string("\"") + INCRED_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
    const int raw = std::system(cmd.c_str());
    if (raw == -1) return -1;
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

inline const std::vector<std::string>& example_fixtures() {
    static const std::vector<std::string> names{"example1", "example2", "example3",
                                                "example4", "example5", "example6"};
    return names;
}

}  // namespace testing
