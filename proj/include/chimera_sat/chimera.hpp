#pragma once

#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "chimera_sat/gadgets.hpp"
#include "chimera_sat/ising.hpp"

namespace chimera_sat {

class EmbeddingError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

/// The requested layout does not fit; reports the smallest graph that would.
class CapacityError : public std::runtime_error {
   public:
    CapacityError(const std::string& what, int required_rows, int required_cols)
        : std::runtime_error(what), required_rows_(required_rows), required_cols_(required_cols) {}
    int required_rows() const { return required_rows_; }
    int required_cols() const { return required_cols_; }

   private:
    int required_rows_;
    int required_cols_;
};

struct ChimeraCoord {
    int row = 0;
    int col = 0;
    /// 0 = horizontal (couples along a row), 1 = vertical (along a column).
    int shore = 0;
    int unit = 0;
};

/// M x N grid of K_{4,4} cells. Qubit index ((row*N + col)*2 + shore)*4 + unit.
class ChimeraGraph {
   public:
    static constexpr int kCellSize = 4;

    ChimeraGraph() = default;
    ChimeraGraph(int rows, int cols);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int num_vertices() const { return rows_ * cols_ * 2 * kCellSize; }
    int index(int row, int col, int shore, int unit) const;
    int index(const ChimeraCoord& c) const { return index(c.row, c.col, c.shore, c.unit); }
    ChimeraCoord coord(int q) const;
    bool contains(int q) const { return q >= 0 && q < num_vertices(); }
    bool has_edge(int a, int b) const;
    std::vector<int> neighbors(int q) const;
    /// All edges (a < b) in ascending order.
    std::vector<std::pair<int, int>> edges() const;
    size_t num_edges() const;

    friend bool operator==(const ChimeraGraph&, const ChimeraGraph&) = default;

   private:
    int rows_ = 0;
    int cols_ = 0;
};

ChimeraGraph build_chimera(int rows, int cols);

/// Chains of physical qubits, one per abstract vertex.
struct Embedding {
    ChimeraGraph graph;
    /// Sorted qubit indices per abstract vertex.
    std::map<Vertex, std::vector<int>> chains;
    std::string layout = "linear";
    /// Cell rows (and columns) used by the complete-graph block.
    int block_size = 0;
    /// Ancilla rows consumed.
    int ancilla_rows = 0;
    /// Column strips used; 1 for the linear layout.
    int strips = 1;

    const std::vector<int>& chain(Vertex v) const;
    size_t num_qubits() const;
    /// Abstract vertex owning each qubit.
    std::map<int, Vertex> owners() const;
};

/// Complete graph on logicals L1..Ln in the bottom-left t x t cells,
/// t = ceil(n/4). Variable i = 4b + u (0-based) runs along row b over
/// columns 0..b and up column b over rows b..t-1.
Embedding embed_complete_graph(int n, const ChimeraGraph& graph);

/// The ancillae of one gadget (or clause) and the logicals it couples to.
struct AncillaGroup {
    int clause_index = 0;
    std::vector<Vertex> ancillae;
    std::vector<Vertex> logical;
};

std::vector<AncillaGroup> ancilla_groups(const CompiledProblem& compiled);

/// Extends every logical chain upward and lays ancilla chains across the
/// block, four per cell row, in group order.
Embedding extend_chains_with_ancilla_rows(const Embedding& base, std::span<const AncillaGroup> groups);

enum class Layout { Linear, Serpentine };

std::string_view to_string(Layout layout);
Layout parse_layout(std::string_view text);

/// Linear layout: complete-graph block plus ancilla rows in one column strip.
Embedding linear_layout(const CompiledProblem& compiled, const ChimeraGraph& graph);

/// Ancilla rows folded into column strips of width t joined by triangular
/// corner blocks. Identical to the linear layout when one strip suffices.
Embedding serpentine_layout(const CompiledProblem& compiled, const ChimeraGraph& graph);

Embedding embed_problem(const CompiledProblem& compiled, const ChimeraGraph& graph, Layout layout);

/// Smallest linear-layout graph for the problem: t columns, t + rows rows.
ChimeraGraph minimal_linear_graph(const CompiledProblem& compiled);

struct AuditReport {
    bool ok = true;
    std::vector<std::string> problems;
};

/// Chain disjointness, chain connectivity, qubits in range, and at least one
/// edge between the chains of every nonzero coupling of `model`.
AuditReport audit_embedding(const Embedding& embedding, const IsingModel& model);

/// Abstract model mapped onto Chimera qubits.
struct PhysicalModel {
    ChimeraGraph graph;
    /// Over Vertex::physical qubits.
    IsingModel model;
    Embedding embedding;
    /// |J^inf| per abstract vertex.
    std::map<Vertex, double> chain_strength;
    /// Physical edge carrying each abstract coupling.
    std::map<VertexPair, std::pair<int, int>> placement;
    /// Physical energy of a chain-intact state minus its abstract energy.
    double constant = 0;
};

/// Fields split evenly over each chain, each coupling on the lowest-index
/// edge between the two chains, chain edges at -|J^inf_v| with
/// |J^inf_v| = jinf_factor * (|h_v| + sum of incident |J|).
PhysicalModel realize(const IsingModel& model, const Embedding& embedding, const GadgetParams& params);

/// Physical assignment with every chain set to its abstract spin.
SpinAssignment expand_assignment(const PhysicalModel& physical, const SpinAssignment& abstract);

struct FidelityReport {
    bool checked = false;
    uint64_t states = 0;
    double max_deviation = 0;
};

/// Compares physical and abstract energies over all chain-intact states.
/// Throws CapError above `max_spins` abstract vertices.
FidelityReport check_realization(const IsingModel& abstract, const PhysicalModel& physical, int max_spins = 20);

struct QubitBudget {
    int logical = 0;
    int ancillae = 0;
    int clauses = 0;
    double mean_width = 0;
    /// Clause density c / n.
    double density = 0;
    double mean_ancillae_per_clause = 0;
    int max_width = 0;
    int block_size = 0;
    int ancilla_rows = 0;
    int block_qubits = 0;
    int physical = 0;
    /// Unnormalized reference curves: n<k>c, n^2<k>r, n^2 r<N_anc>, n^(k+1).
    double ref_linear = 0;
    double ref_quadratic = 0;
    double ref_ancilla = 0;
    double ref_worst = 0;
};

/// Exact count for the embedding produced on `graph`, or on the minimal
/// linear graph when `graph` is null.
QubitBudget count_physical_qubits(const CompiledProblem& compiled, Layout layout, const ChimeraGraph* graph = nullptr);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

/// JSON document with chains, strengths, clause ancillae and gauges.
std::string write_metadata(const PhysicalModel& physical, const CompiledProblem& compiled);

struct EmbeddingMetadata {
    ChimeraGraph graph;
    Embedding embedding;
    std::map<Vertex, double> chain_strength;
    int num_variables = 0;
    double constant = 0;
    double energy_scale = 1;
};

EmbeddingMetadata parse_metadata(std::string_view text);

}  // namespace chimera_sat
