#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chimera_sat/chimera.hpp"
#include "chimera_sat/ising.hpp"

namespace chimera_sat {

class SolverError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

/// Spins (+1/-1) in model.vertices() order.
using SpinVector = std::vector<int8_t>;

struct SolveResult {
    std::string method;
    std::vector<Vertex> order;
    SpinVector best;
    double best_energy = 0;
    /// Exact solver: every ground state (up to the argmin cap), sorted.
    std::vector<SpinVector> argmins;
    /// True when argmins were cut off at the cap.
    bool truncated = false;
    /// Annealer: final energy of each restart, in restart order.
    std::vector<double> restart_energies;
    double seconds = 0;

    SpinAssignment assignment() const;
    SpinAssignment assignment(const SpinVector& spins) const;
};

struct ExactOptions {
    /// Cap on spins that must be enumerated; spins coupled only to
    /// enumerated ones are minimized in closed form.
    int max_enumerated = kDefaultSpinCap;
    size_t max_argmins = size_t{1} << 16;
    /// Energies within this of the minimum count as ground states.
    double tie_tolerance = 1e-9;
};

SolveResult solve_exact(const IsingModel& model, const ExactOptions& options = {});

struct Schedule {
    double t_start = 0;
    double t_end = 0;
    int sweeps = 10000;

    /// Geometric from 2 * max|J| (or max|h| without couplings) down to
    /// 0.01 * g over `sweeps` sweeps.
    static Schedule geometric_default(const IsingModel& model, double g, int sweeps = 10000);
    double temperature(int sweep) const;
};

struct AnnealOptions {
    /// Default schedule when t_start is 0.
    Schedule schedule;
    /// Energy unit used for the default final temperature.
    double g = 0.2;
    int restarts = 32;
    uint64_t seed = 0;
    /// Vertex groups that may also flip as a unit (embedding chains). Each
    /// sweep visits every spin, then every group of two or more vertices.
    std::vector<std::vector<Vertex>> clusters;
};

/// Physical qubit groups of an embedding, for AnnealOptions::clusters.
std::vector<std::vector<Vertex>> chain_clusters(const Embedding& embedding);

/// Metropolis annealing (single spins plus optional clusters) with
/// independent restarts, each seeded from (seed, restart index). Each restart
/// ends with a greedy descent and a polish that tries flipping one spin, or
/// two coupled spins, and relaxing the rest. Result is the lowest energy,
/// ties broken lexicographically.
SolveResult solve_sa(const IsingModel& model, const AnnealOptions& options = {});

struct DecodeResult {
    /// Abstract spins from majority vote over each chain (ties give -1).
    SpinAssignment abstract;
    /// Chains whose qubits disagree.
    std::vector<Vertex> broken;
};

DecodeResult decode(const SpinAssignment& physical, const Embedding& embedding);

/// Logical variables as a 0/1 vector (index 0 = variable 1) from abstract spins.
std::vector<bool> logical_assignment(const SpinAssignment& abstract, int num_variables);

/// "+-+-..." in order.
std::string spin_string(const SpinVector& spins);

struct SolveReport {
    const SolveResult* result = nullptr;
    const DecodeResult* decoded = nullptr;
    int num_variables = 0;
    /// Energy of the decoded logical assignment under the source problem.
    double problem_energy = 0;
    bool has_problem_energy = false;
    bool include_timing = false;
};

std::string write_solve_report(const SolveReport& report);

}  // namespace chimera_sat
