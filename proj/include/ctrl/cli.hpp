#pragma once

#include <string>
#include <vector>

namespace ctrl::cli {

inline constexpr const char* kToolName = "ctrldom";
inline constexpr const char* kToolVersion = "0.1.0";

// Exit codes: 0 exact/definite result, 1 error, 2 approximate result.
int run(const std::vector<std::string>& args);
int run(int argc, char** argv);

}  // namespace ctrl::cli
