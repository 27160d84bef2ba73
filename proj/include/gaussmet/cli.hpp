#pragma once

#include <string>
#include <vector>

namespace gaussmet::cli {

enum ExitCode : int {
    kOk = 0,
    kInternal = 1,
    kUsage = 2,
    kInvalidInput = 3,
    kVerificationFailed = 4,
};

int run(int argc, char** argv);
int run(const std::vector<std::string>& args);

}  // namespace gaussmet::cli
