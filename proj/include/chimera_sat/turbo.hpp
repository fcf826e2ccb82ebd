#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chimera_sat/chimera.hpp"
#include "chimera_sat/gadgets.hpp"
#include "chimera_sat/problem.hpp"
#include "chimera_sat/solver.hpp"

namespace chimera_sat {

class TurboError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

/// Spins (+1/-1) of a message or codeword.
using Word = std::vector<int>;

/// K message bits followed by K nested parity checks: check i covers bits
/// 1..i for odd i and p(1)..p(i) for even i.
struct TurboCode {
    int K = 0;
    /// p(1..K), 1-based.
    std::vector<int> permutation;

    static TurboCode with_permutation(std::vector<int> permutation);
    static TurboCode identity(int K);
    /// Uniform shuffle from `seed`.
    static TurboCode random(int K, uint64_t seed);

    /// Variables (1-based, sorted) of parity check i, 1 <= i <= K.
    std::vector<int> check_support(int i) const;
};

struct Channel {
    double p = 0.1;

    Channel() = default;
    /// Requires 0 < p < 1/2.
    explicit Channel(double flip_probability);
    /// f = -(1/2) log((1-p)/p), negative.
    double f() const;
};

Word encode(const TurboCode& code, const Word& message);

/// Each entry negated independently with probability p; deterministic in seed.
Word transmit(const Word& word, const Channel& channel, uint64_t seed);

/// H(rho) = f sum_i rho_i s_i + f sum_i rho_{K+i} prod_{j in check i} s_j.
double decoding_energy(const TurboCode& code, const Word& received, const Channel& channel, const Word& message);

/// Weighted XOR clauses with problem_energy(x) = alpha * H(rho) + beta.
struct DecodingProblem {
    Problem problem;
    double alpha = 1;
    double beta = 0;
};

DecodingProblem build_decoding_problem(const TurboCode& code, const Word& received, const Channel& channel);

inline constexpr int kMaxOracleLength = 20;

/// Exhaustive MAP decode; ties go to the lexicographically smallest message
/// (-1 before +1, bit 1 first).
Word map_decode_oracle(const TurboCode& code, const Word& received, const Channel& channel);

enum class DecodeTarget { Abstract, Embedded };

struct TurboSolverConfig {
    DecodeTarget target = DecodeTarget::Abstract;
    /// Exact enumeration instead of annealing.
    bool exact = false;
    CompileOptions compile;
    AnnealOptions anneal;
    Layout layout = Layout::Linear;
    /// Let the annealer flip whole chains as well as single qubits.
    bool chain_moves = true;
    /// Chimera size; 0 means the minimal linear graph.
    int graph_rows = 0;
    int graph_cols = 0;
};

struct TurboDecode {
    Word message;
    double energy = 0;
    bool oracle_available = false;
    Word oracle;
    /// The decoded message attains the MAP energy.
    bool agrees = false;
    int broken_chains = 0;
    int physical_qubits = 0;
};

TurboDecode decode_via_annealing(const TurboCode& code, const Word& received, const Channel& channel,
                                 const TurboSolverConfig& config);

struct TurboTrial {
    uint64_t seed = 0;
    Word message;
    Word received;
    Word decoded;
    Word oracle;
    bool oracle_available = false;
    int bit_errors = 0;
    int broken_chains = 0;
    bool agrees = false;
};

/// Random message and channel noise drawn from `seed`, then decoded.
TurboTrial run_turbo_trial(const TurboCode& code, const Channel& channel, uint64_t seed,
                           const TurboSolverConfig& config);

std::string word_string(const Word& word);
/// One line per trial.
std::string write_trial_log(const std::vector<TurboTrial>& trials);

}  // namespace chimera_sat
