#ifndef NILRING_CLI_HPP
#define NILRING_CLI_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace nilring {

// Flat run configuration shared by all subcommands.  The thread count is
// deliberately not part of the canonical form: results never depend on it.
struct RunConfig {
    std::string subcommand;

    int d = 2;
    int r = 2;
    long N = 4;
    long P = 8;
    long Q = 2;
    long R = 32;
    long box = 2;
    long qmax = 6;
    double delta = 0.0;  // 0 = default (10 d)^-4
    double eps = 0.1;
    std::uint64_t seed = 0;
    std::uint64_t samples = 1'000'000;
    std::uint64_t work_budget = 100'000'000;
    std::string strategy = "auto";       // auto | direct | mim
    std::string weight = "indicator";    // indicator | smooth
    std::string variant = "D";           // D | Dt
    std::string kernel = "odd";          // odd | zero
    double kernel_scale = 1.0;
    std::string op = "mul";              // group subcommand operation
    std::string a_text, b_text;          // group operands (comma lists)
    std::string lambda_text = "2";
    std::string n_text, m_text;          // tuples
    std::string g_text = "0,0,0";
    std::string frac_text = "0/1";
    std::string theta_text;
    std::string scales_text = "0:6";
    std::string f_text = "delta";
    std::string h_text;                  // optional residue target for gauss
    std::string output = "json";         // json | csv
    std::string out_path;                // empty = stdout only

    double effective_delta() const;
    void validate() const;  // throws ConfigError
};

// Canonical flat key-value text; parse is its exact inverse.
std::string serialize_config(const RunConfig& cfg);
RunConfig parse_config_text(const std::string& text);
std::string config_hash(const RunConfig& cfg);  // fnv1a-64 of the canonical form

// Full CLI entry point; returns the process exit code.
// 0 ok, 2 config error, 3 budget exceeded, 4 numeric precondition failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nilring

#endif
