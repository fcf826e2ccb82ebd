#include "chimera_sat/problem.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <limits>
#include <set>
#include <sstream>

#include "chimera_sat/text.hpp"

namespace chimera_sat {

std::string_view to_string(ClauseKind kind) {
    switch (kind) {
        case ClauseKind::Or:
            return "or";
        case ClauseKind::Xor:
            return "xor";
        case ClauseKind::And:
            return "and";
        case ClauseKind::Symmetric:
            return "symmetric";
        case ClauseKind::Table:
            return "table";
    }
    return "?";
}

Clause::Clause(ClauseKind kind, std::vector<Literal> literals, double weight)
    : kind_(kind), literals_(std::move(literals)), weight_(weight) {
    if (literals_.empty()) {
        throw ProblemError("clause has no literals");
    }
    if (static_cast<int>(literals_.size()) > kMaxClauseWidth) {
        throw ProblemError("clause wider than " + std::to_string(kMaxClauseWidth) + " literals");
    }
    if (!(weight_ > 0) || !std::isfinite(weight_)) {
        throw ProblemError("clause weight must be positive and finite");
    }
    std::set<int> seen;
    for (const auto& lit : literals_) {
        if (lit.variable < 1) {
            throw ProblemError("variable index must be >= 1");
        }
        if (!seen.insert(lit.variable).second) {
            throw ProblemError("variable " + std::to_string(lit.variable) + " appears twice in one clause");
        }
    }
}

Clause Clause::make_or(std::vector<Literal> literals, double weight) {
    return Clause(ClauseKind::Or, std::move(literals), weight);
}

Clause Clause::make_xor(std::vector<Literal> literals, double weight) {
    return Clause(ClauseKind::Xor, std::move(literals), weight);
}

Clause Clause::make_and(std::vector<Literal> literals, double weight) {
    return Clause(ClauseKind::And, std::move(literals), weight);
}

Clause Clause::make_symmetric(std::vector<Literal> literals, double weight, std::vector<bool> penalized) {
    Clause c(ClauseKind::Symmetric, std::move(literals), weight);
    if (penalized.size() != c.literals_.size() + 1) {
        throw ProblemError("symmetric profile must have k+1 entries");
    }
    bool any = std::find(penalized.begin(), penalized.end(), true) != penalized.end();
    bool all = std::find(penalized.begin(), penalized.end(), false) == penalized.end();
    if (!any || all) {
        throw ProblemError("symmetric profile is constant");
    }
    c.penalized_ = std::move(penalized);
    return c;
}

Clause Clause::make_table(std::vector<Literal> literals, double weight, std::vector<uint64_t> violating) {
    Clause c(ClauseKind::Table, std::move(literals), weight);
    const int k = c.width();
    if (k > kDefaultEnumerationCap) {
        throw ProblemError("table clause wider than " + std::to_string(kDefaultEnumerationCap) + " literals");
    }
    std::sort(violating.begin(), violating.end());
    violating.erase(std::unique(violating.begin(), violating.end()), violating.end());
    const uint64_t total = uint64_t{1} << k;
    for (uint64_t v : violating) {
        if (v >= total) {
            throw ProblemError("table entry has more than k bits");
        }
    }
    if (violating.empty() || violating.size() >= total) {
        throw ProblemError("table violating set must be a nonempty proper subset");
    }
    c.violating_ = std::move(violating);
    return c;
}

std::vector<double> Clause::profile() const {
    std::vector<double> f;
    f.reserve(penalized_.size());
    for (bool p : penalized_) {
        f.push_back(p ? weight_ / 2 : 0.0);
    }
    return f;
}

std::vector<int> Clause::gauges() const {
    std::vector<int> out;
    out.reserve(literals_.size());
    for (const auto& lit : literals_) {
        out.push_back(lit.gauge());
    }
    return out;
}

uint64_t Clause::literal_values(uint64_t variable_values) const {
    uint64_t negations = 0;
    for (size_t i = 0; i < literals_.size(); ++i) {
        if (literals_[i].negated) {
            negations |= uint64_t{1} << i;
        }
    }
    return variable_values ^ negations;
}

bool Clause::violated_by(uint64_t variable_values) const {
    const uint64_t lits = literal_values(variable_values);
    const int k = width();
    const uint64_t all = k == 64 ? ~uint64_t{0} : (uint64_t{1} << k) - 1;
    const int trues = std::popcount(lits & all);
    switch (kind_) {
        case ClauseKind::Or:
            return trues == 0;
        case ClauseKind::Xor:
            return trues % 2 == 0;
        case ClauseKind::And:
            return trues != k;
        case ClauseKind::Symmetric:
            return penalized_[trues];
        case ClauseKind::Table:
            return std::binary_search(violating_.begin(), violating_.end(), lits & all);
    }
    return false;
}

Clause Clause::with_literals(std::vector<Literal> literals) const {
    Clause c = *this;
    if (literals.size() != literals_.size()) {
        throw ProblemError("literal count mismatch");
    }
    Clause checked(kind_, std::move(literals), weight_);
    c.literals_ = checked.literals_;
    return c;
}

std::vector<double> clause_spectrum(const Clause& clause) {
    const int k = clause.width();
    if (k > kDefaultEnumerationCap) {
        throw ProblemError("clause too wide to tabulate");
    }
    std::vector<double> out(size_t{1} << k, 0.0);
    for (uint64_t a = 0; a < out.size(); ++a) {
        if (clause.violated_by(a)) {
            out[a] = clause.weight();
        }
    }
    return out;
}

Clause as_symmetric(const Clause& clause) {
    const int k = clause.width();
    std::vector<bool> penalized(k + 1, false);
    switch (clause.kind()) {
        case ClauseKind::Or:
            penalized[0] = true;
            break;
        case ClauseKind::And:
            for (int m = 0; m < k; ++m) penalized[m] = true;
            break;
        case ClauseKind::Xor:
            for (int m = 0; m <= k; m += 2) penalized[m] = true;
            break;
        case ClauseKind::Symmetric:
            return clause;
        case ClauseKind::Table:
            throw ProblemError("table clauses have no symmetric form in general");
    }
    return Clause::make_symmetric(clause.literals(), clause.weight(), std::move(penalized));
}

Problem::Problem(int num_variables, std::vector<Clause> clauses) : num_variables_(num_variables) {
    if (num_variables < 0) {
        throw ProblemError("negative variable count");
    }
    for (auto& c : clauses) {
        add_clause(std::move(c));
    }
}

void Problem::check(const Clause& clause) const {
    for (const auto& lit : clause.literals()) {
        if (lit.variable > num_variables_) {
            throw ProblemError("variable " + std::to_string(lit.variable) + " exceeds variable count " +
                               std::to_string(num_variables_));
        }
    }
}

void Problem::add_clause(Clause clause) {
    check(clause);
    clauses_.push_back(std::move(clause));
}

uint64_t to_mask(const Assignment& assignment) {
    if (assignment.size() > 64) {
        throw ProblemError("assignment longer than 64 bits");
    }
    uint64_t mask = 0;
    for (size_t i = 0; i < assignment.size(); ++i) {
        if (assignment[i]) mask |= uint64_t{1} << i;
    }
    return mask;
}

Assignment from_mask(uint64_t mask, int num_variables) {
    Assignment a(num_variables);
    for (int i = 0; i < num_variables; ++i) {
        a[i] = (mask >> i) & 1;
    }
    return a;
}

uint64_t clause_local_mask(const Clause& clause, uint64_t variable_mask) {
    uint64_t local = 0;
    const auto& lits = clause.literals();
    for (size_t i = 0; i < lits.size(); ++i) {
        if ((variable_mask >> (lits[i].variable - 1)) & 1) {
            local |= uint64_t{1} << i;
        }
    }
    return local;
}

double problem_energy(const Problem& problem, uint64_t variable_mask) {
    double total = 0;
    for (const auto& clause : problem.clauses()) {
        if (clause.violated_by(clause_local_mask(clause, variable_mask))) {
            total += clause.weight();
        }
    }
    return total;
}

double problem_energy(const Problem& problem, const Assignment& assignment) {
    if (static_cast<int>(assignment.size()) != problem.num_variables()) {
        throw ProblemError("assignment length " + std::to_string(assignment.size()) +
                           " does not match variable count " + std::to_string(problem.num_variables()));
    }
    double total = 0;
    for (const auto& clause : problem.clauses()) {
        uint64_t local = 0;
        const auto& lits = clause.literals();
        for (size_t i = 0; i < lits.size(); ++i) {
            if (assignment[lits[i].variable - 1]) local |= uint64_t{1} << i;
        }
        if (clause.violated_by(local)) total += clause.weight();
    }
    return total;
}

Optimum brute_force_optimum(const Problem& problem, int max_variables) {
    const int n = problem.num_variables();
    if (n > max_variables || n > 62) {
        throw ProblemError("brute force over " + std::to_string(n) + " variables exceeds cap " +
                           std::to_string(max_variables));
    }
    Optimum best;
    best.energy = std::numeric_limits<double>::infinity();
    const uint64_t total = uint64_t{1} << n;
    for (uint64_t a = 0; a < total; ++a) {
        const double e = problem_energy(problem, a);
        if (e < best.energy - kWeightTolerance) {
            best.energy = e;
            best.argmins.clear();
            best.argmins.push_back(a);
        } else if (e <= best.energy + kWeightTolerance) {
            best.argmins.push_back(a);
        }
    }
    return best;
}

namespace {

class WcnfParser {
   public:
    explicit WcnfParser(std::istream& in) : in_(in) {}

    Problem run() {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_no_;
            auto tokens = split_whitespace(line);
            if (tokens.empty()) continue;
            const auto head = tokens.front();
            if (head == "c" || head.front() == 'c' || head == "%") continue;
            if (head == "p") {
                parse_header(tokens);
                continue;
            }
            if (!have_header_) fail("clause before header");
            parse_clause(tokens);
        }
        if (!have_header_) fail("missing header");
        if (static_cast<int>(problem_.clauses().size()) != declared_clauses_) {
            fail("header declares " + std::to_string(declared_clauses_) + " clauses, found " +
                 std::to_string(problem_.clauses().size()));
        }
        return std::move(problem_);
    }

   private:
    [[noreturn]] void fail(const std::string& message) const { throw ParseError(line_no_, message); }

    long long integer(std::string_view tok, const char* what) const {
        auto v = parse_integer(tok);
        if (!v) fail(std::string("expected integer ") + what + ", got '" + std::string(tok) + "'");
        return *v;
    }

    double weight(std::string_view tok) const {
        auto v = parse_real(tok);
        if (!v || !std::isfinite(*v)) fail("expected weight, got '" + std::string(tok) + "'");
        if (*v == 0) fail("zero-weight clause");
        if (*v < 0) fail("negative weight");
        return *v;
    }

    void parse_header(const std::vector<std::string_view>& t) {
        if (have_header_) fail("duplicate header");
        if (t.size() < 4) fail("malformed header");
        if (t[1] == "cnf") {
            if (t.size() != 4) fail("malformed header");
            weighted_ = false;
        } else if (t[1] == "wcnf") {
            if (t.size() != 4 && t.size() != 5) fail("malformed header");
            weighted_ = true;
            if (t.size() == 5) {
                auto top = parse_real(t[4]);
                if (!top) fail("malformed header: bad top weight");
            }
        } else {
            fail("malformed header: unknown format '" + std::string(t[1]) + "'");
        }
        auto nv = parse_integer(t[2]);
        auto nc = parse_integer(t[3]);
        if (!nv || !nc || *nv < 0 || *nc < 0 || *nv > (1 << 30)) fail("malformed header");
        problem_ = Problem(static_cast<int>(*nv));
        declared_clauses_ = static_cast<int>(*nc);
        have_header_ = true;
    }

    // Reads "<lits...> 0" from tokens[from..].
    std::vector<Literal> literals(const std::vector<std::string_view>& t, size_t from) const {
        if (from >= t.size() || t.back() != "0") fail("clause not terminated by 0");
        std::vector<Literal> lits;
        std::set<int> seen;
        for (size_t i = from; i + 1 < t.size(); ++i) {
            long long v = integer(t[i], "literal");
            if (v == 0) fail("literal 0 before end of clause");
            long long var = v < 0 ? -v : v;
            if (var > problem_.num_variables()) {
                fail("variable index " + std::to_string(var) + " out of range");
            }
            if (!seen.insert(static_cast<int>(var)).second) {
                fail("duplicate variable " + std::to_string(var) + " in clause");
            }
            lits.push_back(Literal::from_dimacs(static_cast<int>(v)));
        }
        if (lits.empty()) fail("empty clause");
        return lits;
    }

    size_t find_colon(const std::vector<std::string_view>& t) const {
        for (size_t i = 0; i < t.size(); ++i) {
            if (t[i] == ":") return i;
        }
        fail("expected ':' separating profile from literals");
    }

    void add(Clause clause) {
        try {
            problem_.add_clause(std::move(clause));
        } catch (const ProblemError& e) {
            fail(e.what());
        }
    }

    void parse_clause(std::vector<std::string_view> t) {
        const auto head = t.front();
        if (head.front() == 'x') {
            if (head.size() > 1) {
                t.front() = head.substr(1);
                t.insert(t.begin(), "x");
            }
            size_t at = 1;
            double w = 1.0;
            if (weighted_) {
                if (t.size() < 2) fail("missing weight");
                w = weight(t[at++]);
            }
            add(Clause::make_xor(literals(t, at), w));
            return;
        }
        if (head == "a") {
            if (t.size() < 2) fail("missing weight");
            double w = weight(t[1]);
            add(Clause::make_and(literals(t, 2), w));
            return;
        }
        if (head == "s") {
            if (t.size() < 2) fail("missing weight");
            double w = weight(t[1]);
            size_t colon = find_colon(t);
            auto lits = literals(t, colon + 1);
            std::vector<bool> penalized;
            for (size_t i = 2; i < colon; ++i) {
                if (t[i] == "0") {
                    penalized.push_back(false);
                } else if (t[i] == "1") {
                    penalized.push_back(true);
                } else {
                    fail("profile flags must be 0 or 1");
                }
            }
            if (penalized.size() != lits.size() + 1) fail("symmetric profile must have k+1 flags");
            try {
                add(Clause::make_symmetric(std::move(lits), w, std::move(penalized)));
            } catch (const ProblemError& e) {
                fail(e.what());
            }
            return;
        }
        if (head == "t") {
            if (t.size() < 2) fail("missing weight");
            double w = weight(t[1]);
            size_t colon = find_colon(t);
            auto lits = literals(t, colon + 1);
            std::vector<uint64_t> rows;
            for (size_t i = 2; i < colon; ++i) {
                if (t[i].size() != lits.size()) fail("table row length must equal clause width");
                uint64_t mask = 0;
                for (size_t b = 0; b < t[i].size(); ++b) {
                    if (t[i][b] == '1') {
                        mask |= uint64_t{1} << b;
                    } else if (t[i][b] != '0') {
                        fail("table rows must be 0/1 strings");
                    }
                }
                rows.push_back(mask);
            }
            try {
                add(Clause::make_table(std::move(lits), w, std::move(rows)));
            } catch (const ProblemError& e) {
                fail(e.what());
            }
            return;
        }
        size_t at = 0;
        double w = 1.0;
        if (weighted_) {
            w = weight(t[at++]);
        }
        add(Clause::make_or(literals(t, at), w));
    }

    std::istream& in_;
    int line_no_ = 0;
    bool have_header_ = false;
    bool weighted_ = false;
    int declared_clauses_ = 0;
    Problem problem_;
};

void write_literals(std::ostream& out, const Clause& clause) {
    for (const auto& lit : clause.literals()) {
        out << ' ' << lit.dimacs();
    }
    out << " 0\n";
}

}  // namespace

Problem parse_wcnf(std::istream& in) { return WcnfParser(in).run(); }

Problem parse_wcnf(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_wcnf(in);
}

std::string serialize_wcnf(const Problem& problem) {
    std::ostringstream out;
    double top = 1;
    for (const auto& c : problem.clauses()) top += c.weight();
    out << "p wcnf " << problem.num_variables() << ' ' << problem.clauses().size() << ' ' << format_real(top)
        << '\n';
    for (const auto& c : problem.clauses()) {
        const std::string w = format_real(c.weight());
        switch (c.kind()) {
            case ClauseKind::Or:
                out << w;
                break;
            case ClauseKind::Xor:
                out << "x " << w;
                break;
            case ClauseKind::And:
                out << "a " << w;
                break;
            case ClauseKind::Symmetric:
                out << "s " << w;
                for (bool p : c.penalized_counts()) out << ' ' << (p ? '1' : '0');
                out << " :";
                break;
            case ClauseKind::Table:
                out << "t " << w;
                for (uint64_t row : c.violating_set()) {
                    out << ' ';
                    for (int b = 0; b < c.width(); ++b) out << (((row >> b) & 1) ? '1' : '0');
                }
                out << " :";
                break;
        }
        write_literals(out, c);
    }
    return out.str();
}

}  // namespace chimera_sat
