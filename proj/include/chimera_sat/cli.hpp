#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chimera_sat/chimera.hpp"
#include "chimera_sat/gadgets.hpp"
#include "chimera_sat/problem.hpp"
#include "chimera_sat/solver.hpp"
#include "chimera_sat/turbo.hpp"

namespace chimera_sat {

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitUsage = 2, kExitCapacity = 3 };

class UsageError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

/// Validated settings for one command. Built from defaults, then the
/// key=value config file, then command-line flags.
struct RunConfig {
    std::string command;
    std::filesystem::path input;
    std::filesystem::path outdir = ".";
    std::filesystem::path metadata;
    GadgetParams params;
    /// 0 x 0 means the smallest graph that fits the linear layout.
    int graph_rows = 0;
    int graph_cols = 0;
    Layout layout = Layout::Linear;
    /// solve/turbo: "abstract" or "embedded".
    DecodeTarget target = DecodeTarget::Abstract;
    /// solve/turbo: "exact" or "sa".
    bool exact = false;
    bool chain_moves = true;
    uint64_t seed = 0;
    int restarts = 32;
    int sweeps = 10000;
    bool timing = false;
    // turbo
    int turbo_k = 8;
    double turbo_p = 0.05;
    int trials = 200;
    std::vector<int> permutation;
    // stats
    std::string family = "maxsat";
    std::vector<int> sizes{8, 12, 16, 20, 24};
    double density = 1.0;
    int width = 3;
};

/// Keys accepted in config files (flag names without the leading dashes).
const std::vector<std::string>& config_keys();

/// Parses "key = value" lines; '#' starts a comment. Unknown keys and
/// duplicate keys throw UsageError.
std::map<std::string, std::string> parse_config_text(std::string_view text);

/// Applies string settings (already merged by precedence) to a RunConfig.
RunConfig make_run_config(const std::string& command, const std::map<std::string, std::string>& settings);

/// Graph size "MxN".
std::pair<int, int> parse_graph_size(std::string_view text);

/// Writes through a temporary file in the same directory, then renames.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

int cmd_compile(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_verify(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_solve(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_turbo(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_stats(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Full command-line entry point; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Random max-k-SAT instance: `clauses` OR clauses over k distinct
/// variables with random signs.
Problem random_max_ksat(int n, int clauses, int k, uint64_t seed);

/// Decoding problem of a noiseless all-(+1) K-bit turbo word; the clause
/// structure does not depend on the received values.
Problem turbo_family_problem(int K, uint64_t seed);

struct ScalingRow {
    int size = 0;
    QubitBudget budget;
};

struct ScalingTable {
    std::vector<ScalingRow> rows;
    double slope = 0;
};

/// Exact linear-layout qubit counts for the "maxsat" or "turbo" family.
ScalingTable scaling_table(const std::string& family, const std::vector<int>& sizes, double density, int width,
                           uint64_t seed, const GadgetParams& params);
std::string write_scaling_table(const ScalingTable& table, const std::string& family);

}  // namespace chimera_sat
