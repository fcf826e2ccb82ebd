#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace chimera_sat {

class IsingError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

class CapError : public std::length_error {
   public:
    using std::length_error::length_error;
};

/// Vertex namespace shared by abstract and physical models. Logical
/// variables are ("L", i), ancillae are ("A", clause, j) and Chimera qubits
/// are plain linear indices. Ancillae of different clauses never collide.
struct Vertex {
    enum class Kind : uint8_t { Logical = 0, Ancilla = 1, Physical = 2 };

    Kind kind = Kind::Logical;
    int index = 0;
    int sub = 0;

    static constexpr Vertex logical(int variable) { return {Kind::Logical, variable, 0}; }
    static constexpr Vertex ancilla(int clause, int j) { return {Kind::Ancilla, clause, j}; }
    static constexpr Vertex physical(int qubit) { return {Kind::Physical, qubit, 0}; }

    bool is_logical() const { return kind == Kind::Logical; }
    bool is_ancilla() const { return kind == Kind::Ancilla; }
    bool is_physical() const { return kind == Kind::Physical; }

    /// "L3", "A2.1" or "17".
    std::string str() const;
    static std::optional<Vertex> parse(std::string_view token);

    friend auto operator<=>(const Vertex&, const Vertex&) = default;
};

using VertexPair = std::pair<Vertex, Vertex>;

/// Two-body Ising Hamiltonian
///   E(s) = offset + sum_v h_v s_v + sum_{u<v} J_uv s_u s_v.
/// Every vertex appears in fields() (absent entries are zero). Couplings are
/// keyed by ordered pairs (first < second); explicit zero couplings are kept.
class IsingModel {
   public:
    void add_vertex(Vertex v);
    void add_field(Vertex v, double value);
    void add_coupling(Vertex a, Vertex b, double value);
    void add_offset(double value) { offset_ += value; }
    void set_offset(double value) { offset_ = value; }
    /// Multiplies every field, coupling and the offset.
    void scale(double factor);

    double field(Vertex v) const;
    double coupling(Vertex a, Vertex b) const;
    double offset() const { return offset_; }
    bool contains(Vertex v) const { return fields_.count(v) != 0; }
    size_t size() const { return fields_.size(); }

    const std::map<Vertex, double>& fields() const { return fields_; }
    const std::map<VertexPair, double>& couplings() const { return couplings_; }
    std::vector<Vertex> vertices() const;

    /// Largest |h| or |J| in the model.
    double max_magnitude() const;

    friend bool operator==(const IsingModel&, const IsingModel&) = default;

   private:
    std::map<Vertex, double> fields_;
    std::map<VertexPair, double> couplings_;
    double offset_ = 0;
};

VertexPair ordered_pair(Vertex a, Vertex b);

/// Spin values (+1/-1) keyed by vertex.
using SpinAssignment = std::map<Vertex, int>;

double energy(const IsingModel& model, const SpinAssignment& spins);

/// Entrywise sum. Logical and physical vertices are shared; an ancilla may
/// belong to only one of the inputs.
IsingModel superimpose(std::span<const IsingModel> models);

/// Flips the sign convention of the given vertices so that
/// energy(result, flip(s)) == energy(model, s).
IsingModel gauge_transform(const IsingModel& model, const std::set<Vertex>& flips);

/// Contiguous array form used by the enumerators and annealer. Vertices are
/// indexed in the order given at construction.
class DenseModel {
   public:
    struct Neighbor {
        int index;
        double coupling;
    };

    explicit DenseModel(const IsingModel& model);
    DenseModel(const IsingModel& model, std::vector<Vertex> order);

    int size() const { return static_cast<int>(order_.size()); }
    const std::vector<Vertex>& order() const { return order_; }
    int index_of(Vertex v) const;
    double field(int i) const { return h_[i]; }
    double offset() const { return offset_; }
    std::span<const Neighbor> neighbors(int i) const {
        return {adjacency_.data() + start_[i], adjacency_.data() + start_[i + 1]};
    }
    /// Spins are +1/-1.
    double energy(std::span<const int8_t> spins) const;
    /// h_i + sum_j J_ij s_j.
    double local_field(int i, std::span<const int8_t> spins) const;

   private:
    void build(const IsingModel& model);

    std::vector<Vertex> order_;
    std::map<Vertex, int> index_;
    std::vector<double> h_;
    std::vector<size_t> start_;
    std::vector<Neighbor> adjacency_;
    double offset_ = 0;
};

inline constexpr int kDefaultSpinCap = 26;

struct SpectrumOptions {
    /// Cap on spins that must be enumerated: the requested logical vertices
    /// plus any remaining vertex coupled to another remaining vertex.
    /// Remaining vertices coupled only to enumerated ones are minimized in
    /// closed form.
    int max_enumerated = kDefaultSpinCap;
    /// Energies closer than this are treated as equal when breaking ties.
    double tie_tolerance = 1e-9;
};

/// Minimum energy over the non-logical vertices for each logical assignment.
/// Entry a corresponds to logical[i] = +1 iff bit i of a is set.
struct Spectrum {
    std::vector<Vertex> logical;
    /// Non-logical vertices in ascending order.
    std::vector<Vertex> others;
    std::vector<double> energy;
    /// Argmin completion per entry, packed `words` 64-bit words per entry;
    /// bit j is set iff others[j] = +1. Ties resolve to the lexicographically
    /// smallest completion (reading others in order, -1 before +1).
    std::vector<uint64_t> completion_bits;
    size_t words = 0;
    /// Distance from each entry's minimum to the next distinct energy level
    /// reachable by changing the completion; +inf when there is none.
    std::vector<double> excitation;

    size_t size() const { return energy.size(); }
    /// Spin (+1/-1) of others[j] in the argmin completion of `entry`.
    int completion_spin(size_t entry, size_t j) const;
    /// Completion of `entry` as a 0/1 string over `others`, 1 = +1.
    std::string completion_string(size_t entry) const;
    /// Completion restricted to the given vertices, as a 0/1 string.
    std::string completion_string(size_t entry, std::span<const Vertex> subset) const;
};

Spectrum reduced_spectrum(const IsingModel& model, std::span<const Vertex> logical, const SpectrumOptions& options = {});

/// Text form: "offset <v>", then "h <i> <v>" and "J <i> <j> <v>" lines in
/// ascending vertex order. Values use the shortest exact decimal form.
std::string write_ising_text(const IsingModel& model);
IsingModel parse_ising_text(std::string_view text);

}  // namespace chimera_sat
