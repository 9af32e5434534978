#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace inplay::cli {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr unsigned long long kDefaultSeed = 20190901ULL;

enum ExitCode : int { ok = 0, usage = 1, data = 2, numerical = 3 };

// args excludes the program name. Failures print one line of the form
// `inplay: error=<kind> exit=<code> reason="..."` to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

// 64-bit FNV-1a, used for manifest hashes.
unsigned long long fnv1a(const std::string& bytes);

} // namespace inplay::cli
