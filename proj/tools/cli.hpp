#pragma once

#include <ostream>

namespace chasym::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kInput = 2;
inline constexpr int kNumerical = 3;
inline constexpr int kDegenerate = 4;

// Entry point of the chasym command; JSON (or text) goes to out, diagnostics to err.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace chasym::cli
