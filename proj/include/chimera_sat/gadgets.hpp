#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "chimera_sat/ising.hpp"
#include "chimera_sat/problem.hpp"

namespace chimera_sat {

class GadgetError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

/// Energy scales shared by the clause gadgets.
struct GadgetParams {
    /// Ancilla coupling scale J^a (also the logical-logical coupling J).
    double ja = 1.0;
    /// Penalty of a violated clause of unit weight.
    double g = 0.2;
    /// Common ancilla field shift for parity and symmetric gadgets.
    double q0 = 0.3;
    /// Chain strength multiplier used when embedding.
    double jinf_factor = 2.0;
    /// Required ratio for the "much smaller than J^a" conditions:
    /// g <= ja / ratio_min and q0 <= ja / ratio_min.
    double ratio_min = 3.0;

    /// Defaults with penalty g and q0 scaled along with it.
    static GadgetParams with_penalty(double g);
    /// ja, g and q0 multiplied by `factor`.
    GadgetParams scaled(double factor) const;
};

enum class GadgetKind { Native, Or, Parity, Symmetric, And, Parity3 };

std::string_view to_string(GadgetKind kind);

/// Where a gadget lives in the vertex namespace: its logical vertices (one
/// per literal, in literal order) and the clause index that owns its
/// ancillae A(clause, ancilla_base + j), j = 1..m.
struct GadgetSite {
    std::vector<Vertex> logical;
    int clause_index = 0;
    int ancilla_base = 0;

    /// L1..Lk, clause 0.
    static GadgetSite standard(int k);
};

/// One clause's penalty sub-Hamiltonian.
///
/// All gadgets are symmetric in the gauged-true count m (number of i with
/// c(i) s_i = +1 for the requested gauges), so the target spectrum is stored
/// by count: ideal_by_count[m] is 0 or the penalty.
struct Gadget {
    GadgetKind kind = GadgetKind::Or;
    IsingModel model;
    std::vector<Vertex> logical;
    std::vector<Vertex> ancillae;
    /// Gauges requested by the caller, c(i) in {-1,+1}.
    std::vector<int> gauges;
    /// Gauges wired into the model. Differs from `gauges` in one position
    /// when a parity gadget realizes the opposite parity by a gauge flip.
    std::vector<int> realized_gauges;
    std::vector<double> ideal_by_count;
    double penalty = 0;
    GadgetParams params;
    /// AND gadgets: whether the single-ancilla form was achieved.
    bool single_ancilla = false;
    std::string note;

    int width() const { return static_cast<int>(logical.size()); }
    /// Target energy for a logical mask (bit i set iff logical[i] = +1).
    double ideal(uint64_t logical_mask) const;
    /// Ideal spectrum over all 2^k logical masks.
    std::vector<double> ideal_spectrum() const;
};

enum class Parity { Odd, Even };

/// Fields h c(i) with h = -J^a, logical couplings J^a c(i) c(j), every
/// logical coupled to every ancilla with J^a c(i), ancilla fields
/// -J^a (2j - k) + q_j with q_1 = g/2. Penalizes the all-false assignment.
Gadget build_or_gadget(const std::vector<int>& gauges, const GadgetParams& params,
                       const GadgetSite& site = {});

/// Same wiring with h = q0 - J^a and q_j = q0 +- g/2 alternating with the
/// parity of k - j. Satisfied iff the gauged-true count has `desired` parity.
Gadget build_parity_gadget(const std::vector<int>& gauges, Parity desired, const GadgetParams& params,
                           const GadgetSite& site = {});

/// Penalizes gauged-true count m iff penalized[m]; q_j = q0 + f_{j-1} - f_j.
Gadget build_symmetric_gadget(const std::vector<int>& gauges, const std::vector<bool>& penalized,
                              const GadgetParams& params, const GadgetSite& site = {});

struct AndSearchOptions {
    /// Candidate |h| values as multiples of ja.
    std::vector<double> magnitudes{1.0, 0.5, 0.25};
    /// Candidate uniform logical-logical couplings as multiples of |h|.
    std::vector<double> couplings{0.0, 0.25, -0.25};
    /// Minimum realized gap, as a fraction of g, before rescaling to g.
    double gap_fraction = 0.5;
};

/// Single-ancilla AND when a candidate from the parameter grid reproduces
/// the AND spectrum; otherwise the k-ancilla symmetric gadget, with
/// `single_ancilla` false and the reason in `note`.
Gadget build_and_gadget(const std::vector<int>& gauges, const GadgetParams& params, const GadgetSite& site = {},
                        const AndSearchOptions& search = {});

/// Three logicals with couplings J c(i)c(j) and fields h c(i), one ancilla
/// coupled with 2J c(i) and field 2h. No rescaling or offset normalization.
IsingModel raw_parity3_model(const std::vector<int>& gauges, double coupling, double field,
                             const GadgetSite& site = {});

/// Single-ancilla 3-bit parity check with h = g, J = ja/2, J_a = ja, h_a = 2h,
/// rescaled so the gap between the two levels is exactly g.
Gadget build_parity3_gadget(const std::vector<int>& gauges, Parity desired, const GadgetParams& params,
                            const GadgetSite& site = {});

/// One OR gadget per violating row (masks over literal values), each with
/// gauges making that row its all-false assignment.
std::vector<Gadget> build_table_gadget(const std::vector<uint64_t>& violating, const std::vector<int>& gauges,
                                       const GadgetParams& params, const GadgetSite& site = {});

/// Zero-ancilla gadget for a one-literal condition (field) or a two-literal
/// parity (single coupler).
Gadget build_native_gadget(const std::vector<int>& gauges, const std::vector<bool>& penalized,
                           const GadgetParams& params, const GadgetSite& site = {});

struct ValidationReport {
    /// False when the gadget exceeded the spin cap and was not enumerated.
    bool checked = false;
    /// Reduced spectrum minus its minimum equals the ideal spectrum.
    bool exact_match = false;
    /// Satisfied level sits at exactly 0 without removing the minimum.
    bool normalized = false;
    double max_deviation = 0;
    /// Smallest energy cost of moving any ancilla off its optimum, over all
    /// logical assignments.
    double ancilla_gap = 0;
    /// Distance between the two spectrum levels actually realized.
    double realized_gap = 0;
    /// ja / g and ja / q0 (q0 only for parity and symmetric gadgets).
    double ja_over_g = 0;
    double ja_over_q0 = 0;
    std::vector<std::string> warnings;
};

ValidationReport validate_gadget(const Gadget& gadget, const SpectrumOptions& options = {});

/// Chooses and builds the gadget(s) for one clause.
std::vector<Gadget> build_clause_gadgets(const Clause& clause, const GadgetParams& params, const GadgetSite& site,
                                         const AndSearchOptions& search = {});

enum class WeightScaling {
    /// Every energy scale of a clause's gadget multiplied by its weight.
    WholeGadget,
    /// Only g (and q0 where it must stay above g/2) scaled; margins shrink
    /// for heavy clauses and are reported as warnings instead of errors.
    PenaltyOnly,
};

struct CompileOptions {
    GadgetParams params;
    WeightScaling weight_scaling = WeightScaling::WholeGadget;
    /// Gadgets with at most this many total spins are enumerated at compile time.
    int verify_cap = kDefaultSpinCap;
    AndSearchOptions and_search;
};

struct ClauseProvenance {
    int clause_index = 0;
    ClauseKind kind = ClauseKind::Or;
    std::vector<Vertex> logical;
    std::vector<int> gauges;
    std::vector<Vertex> ancillae;
    std::vector<GadgetKind> gadget_kinds;
    double penalty = 0;
    bool verified = false;
    bool and_single_ancilla = false;
    std::vector<std::string> warnings;
};

/// Abstract model whose minimum over ancillae, as a function of the logical
/// spins, is energy_scale * problem_energy + constant.
struct CompiledProblem {
    IsingModel model;
    int num_variables = 0;
    double energy_scale = 1;
    double constant = 0;
    std::vector<ClauseProvenance> clauses;
    GadgetParams params;

    std::vector<Vertex> logical() const;
    size_t num_ancillae() const;
};

CompiledProblem compile_problem(const Problem& problem, const CompileOptions& options = {});

/// Logical spins (+1 = true) for a variable mask.
SpinAssignment logical_spins(uint64_t variable_mask, int num_variables);

}  // namespace chimera_sat
