#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

namespace trapfactor::cli {

// Parsed command line. String fields hold raw user input; run() validates and
// reports usage errors on exit code 2.
struct Config {
    enum class Command { factor, scan, coverage, bench };
    Command command = Command::factor;

    std::string n;
    std::string format;  // json|csv|text; per-command default when empty
    unsigned workers = 1;
    std::uint64_t seed = 1;

    // factor / bench
    std::string method = "auto";  // fermat|lehman|multitrap|auto
    std::string max_steps = "1000000";
    std::string methods = "fermat,lehman,multitrap";

    // scan
    unsigned order = 1;
    std::string s = "1";          // "h" or "h/t"
    std::string k_range = "0..64";
    std::string parity = "auto";  // auto|none
    std::string residue;          // "M:rho", optional

    // coverage
    std::string cov_order = "1";  // 1|2|3|circle
    unsigned samples = 30;
    std::string n_lo = "100000000";
    std::string n_hi = "10000000000";
    std::string budget = "16";
};

// Exit codes: 0 = factor found / scan / coverage / bench completed,
// 1 = no factor found, 2 = usage or operational error.
int run(const Config& cfg, std::ostream& out, std::ostream& err);

// Parses argv (CLI11) and dispatches to run().
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace trapfactor::cli
