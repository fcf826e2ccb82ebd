#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace chimera_sat {

/// Absolute tolerance for comparing clause weights and problem energies.
inline constexpr double kWeightTolerance = 1e-9;

/// Default cap on the number of variables enumerated by brute force.
inline constexpr int kDefaultEnumerationCap = 26;

/// Widest clause representable (assignments are packed into 64-bit masks).
inline constexpr int kMaxClauseWidth = 63;

class ProblemError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

class ParseError : public std::runtime_error {
   public:
    ParseError(int line, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
    int line() const { return line_; }

   private:
    int line_;
};

/// A possibly negated reference to a 1-based variable. The gauge c(i) of the
/// literal is -1 when negated.
struct Literal {
    int variable = 1;
    bool negated = false;

    int gauge() const { return negated ? -1 : +1; }
    int dimacs() const { return negated ? -variable : variable; }
    static Literal from_dimacs(int value) { return Literal{value < 0 ? -value : value, value < 0}; }

    friend bool operator==(const Literal&, const Literal&) = default;
};

enum class ClauseKind { Or, Xor, And, Symmetric, Table };

std::string_view to_string(ClauseKind kind);

/// One weighted clause. Assignments passed to the evaluation methods are
/// k-bit masks over the clause's variables in literal order (bit i is the
/// value of literal i's variable, 1 = true); the clause itself applies the
/// literal negations.
class Clause {
   public:
    static Clause make_or(std::vector<Literal> literals, double weight = 1.0);
    /// Asserts that the XOR of the literals is true (odd number of true literals).
    static Clause make_xor(std::vector<Literal> literals, double weight = 1.0);
    static Clause make_and(std::vector<Literal> literals, double weight = 1.0);
    /// `penalized[m]` says whether assignments with m true literals are
    /// violating; the profile value f_m is weight/2 when set and 0 otherwise.
    static Clause make_symmetric(std::vector<Literal> literals, double weight, std::vector<bool> penalized);
    /// `violating` holds masks over the literal values (bit i = literal i true).
    static Clause make_table(std::vector<Literal> literals, double weight, std::vector<uint64_t> violating);

    ClauseKind kind() const { return kind_; }
    const std::vector<Literal>& literals() const { return literals_; }
    int width() const { return static_cast<int>(literals_.size()); }
    double weight() const { return weight_; }
    const std::vector<bool>& penalized_counts() const { return penalized_; }
    /// Profile values f_0..f_k, each 0 or weight/2.
    std::vector<double> profile() const;
    const std::vector<uint64_t>& violating_set() const { return violating_; }
    std::vector<int> gauges() const;

    /// Mask of true literals for a mask over the clause's variables.
    uint64_t literal_values(uint64_t variable_values) const;
    bool violated_by(uint64_t variable_values) const;

    /// Same clause with every literal's variable replaced.
    Clause with_literals(std::vector<Literal> literals) const;

    friend bool operator==(const Clause&, const Clause&) = default;

   private:
    Clause(ClauseKind kind, std::vector<Literal> literals, double weight);

    ClauseKind kind_;
    std::vector<Literal> literals_;
    double weight_;
    std::vector<bool> penalized_;
    std::vector<uint64_t> violating_;
};

/// Spectrum of one clause: entry a is the penalty for the variable mask a.
std::vector<double> clause_spectrum(const Clause& clause);

/// OR, AND and XOR clauses re-expressed as the equivalent SYMMETRIC clause.
Clause as_symmetric(const Clause& clause);

class Problem {
   public:
    Problem() = default;
    explicit Problem(int num_variables, std::vector<Clause> clauses = {});

    int num_variables() const { return num_variables_; }
    const std::vector<Clause>& clauses() const { return clauses_; }
    void add_clause(Clause clause);

    friend bool operator==(const Problem&, const Problem&) = default;

   private:
    void check(const Clause& clause) const;

    int num_variables_ = 0;
    std::vector<Clause> clauses_;
};

/// Assignment over variables 1..n, index 0 holds variable 1.
using Assignment = std::vector<bool>;

uint64_t to_mask(const Assignment& assignment);
Assignment from_mask(uint64_t mask, int num_variables);
/// Bits of `mask` gathered at the clause's variable positions.
uint64_t clause_local_mask(const Clause& clause, uint64_t variable_mask);

double problem_energy(const Problem& problem, const Assignment& assignment);
double problem_energy(const Problem& problem, uint64_t variable_mask);

struct Optimum {
    double energy = 0;
    /// Variable masks (bit i = variable i+1) achieving the minimum, ascending.
    std::vector<uint64_t> argmins;
};

Optimum brute_force_optimum(const Problem& problem, int max_variables = kDefaultEnumerationCap);

Problem parse_wcnf(std::istream& in);
Problem parse_wcnf(std::string_view text);
std::string serialize_wcnf(const Problem& problem);

}  // namespace chimera_sat
