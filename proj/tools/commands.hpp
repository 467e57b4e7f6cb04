#pragma once

// The three subcommands behind the treeshift binary. Split from main so the
// argument structs stay testable without going through CLI11.

#include <cstdint>
#include <string>
#include <vector>

namespace treeshift::cli {

// Exit codes shared by all subcommands: 0 = verdicts match the expectation,
// 1 = mismatch or failed replay, 2 = parse or precondition error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitMismatch = 1;
inline constexpr int kExitError = 2;

struct ConstructArgs {
  std::string spec;
  std::int64_t depth = 3;
  std::int64_t width = 8;
  std::string out;  // empty = stdout
};

struct VerifyArgs {
  std::string property;  // consistency | hyponormal | square-trivial |
                         // adjoint-quantity | phi-unbounded | admissible
  std::string spec;
  std::string vertex;    // empty = whole probe window (or the tree base)
  std::int64_t depth = 6;
  std::int64_t width = 64;
  std::string threshold = "1000000";
  std::string format = "text";  // text | json
  std::string out;
  std::string expect = "pass";  // pass | fail
};

struct ReportArgs {
  std::vector<std::string> files;
};

int run_construct(const ConstructArgs& args);
int run_verify(const VerifyArgs& args);
int run_report(const ReportArgs& args);

}  // namespace treeshift::cli
