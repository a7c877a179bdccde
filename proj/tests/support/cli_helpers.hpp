#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>
#include <sys/wait.h>

namespace cubeamalg::testing {

struct CliResult {
    int exit_code;
    std::string out;
};

inline CliResult run_cli_command(const std::string& cli_path, const std::string& args) {
    std::string cmd = cli_path + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) throw std::runtime_error("popen failed");
    std::string out;
    char buffer[4096];
    while (std::size_t got = fread(buffer, 1, sizeof(buffer), pipe)) out.append(buffer, got);
    int status = pclose(pipe);
    return {WEXITSTATUS(status), out};
}

}  // namespace cubeamalg::testing
