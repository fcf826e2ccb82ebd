// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only if
// every criterion passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "chimera_sat/chimera.hpp"
#include "chimera_sat/cli.hpp"
#include "chimera_sat/gadgets.hpp"
#include "chimera_sat/solver.hpp"
#include "chimera_sat/text.hpp"
#include "chimera_sat/turbo.hpp"
#include "oracles.hpp"

using namespace chimera_sat;
namespace fs = std::filesystem;

namespace {

constexpr double kTol = 1e-9;

struct Outcome {
    bool pass = true;
    std::string detail;
    // Deterministic text written to disk for the repeatability check.
    std::string output;
};

class Timer {
   public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

   private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << id << " " << name << ": " << detail << std::endl;
    failures += !pass;
}

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(3);
    s << v;
    return s.str();
}

std::vector<Vertex> logicals(int k) {
    std::vector<Vertex> v;
    for (int i = 1; i <= k; ++i) v.push_back(Vertex::logical(i));
    return v;
}

std::vector<Literal> gauged_literals(const std::vector<int>& gauges) {
    std::vector<Literal> l;
    for (size_t i = 0; i < gauges.size(); ++i) l.push_back({static_cast<int>(i) + 1, gauges[i] < 0});
    return l;
}

// Worst deviation between the min-over-ancilla table and `ideal`, both with
// their minimum removed.
double deviation(const IsingModel& model, int k, const std::vector<double>& ideal) {
    const auto table = oracle::reduced_table(model, logicals(k));
    const double lo = *std::min_element(table.begin(), table.end());
    const double ilo = *std::min_element(ideal.begin(), ideal.end());
    double dev = 0;
    for (size_t a = 0; a < table.size(); ++a) dev = std::max(dev, std::fabs((table[a] - lo) - (ideal[a] - ilo)));
    return dev;
}

std::vector<double> clause_ideal(const Clause& c, double g) {
    std::vector<double> out;
    for (uint64_t a = 0; a < (uint64_t{1} << c.width()); ++a) out.push_back(oracle::violated(c, oracle::literal_bits(c, a)) ? g : 0);
    return out;
}

IsingModel clause_model(const Clause& c, const GadgetParams& params) {
    std::vector<IsingModel> parts;
    for (auto& g : build_clause_gadgets(c, params, GadgetSite::standard(c.width()))) parts.push_back(g.model);
    return superimpose(parts);
}

// ---------------------------------------------------------------------------

void criterion1() {
    Timer t;
    const Gadget g = build_or_gadget({1, 1, 1, 1}, GadgetParams{});
    const Spectrum s = reduced_spectrum(g.model, g.logical);
    // Argmin ancilla pattern by number of true inputs.
    const char* staircase[] = {"1111", "0111", "0011", "0001", "0000"};
    bool ok = s.size() == 16;
    double dev = 0;
    std::string bad;
    for (uint64_t a = 0; ok && a < 16; ++a) {
        dev = std::max(dev, std::fabs(s.energy[a] - (a == 0 ? g.params.g : 0.0)));
        const std::string got = s.completion_string(a, g.ancillae);
        const std::string want = staircase[std::popcount(a)];
        if (got != want && bad.empty()) bad = "row " + std::to_string(a) + " ancillae " + got + " want " + want;
    }
    ok = ok && dev <= kTol && bad.empty() && t.seconds() < 1.0;
    report(1, "four-input OR gadget staircase", ok,
           "max deviation " + fmt(dev) + (bad.empty() ? "" : ", " + bad) + ", " + fmt(t.seconds()) + " s");
}

// ---------------------------------------------------------------------------

void criterion2() {
    Timer t;
    std::mt19937_64 rng(2024);
    const GadgetParams params;
    const double g = params.g;
    auto gauges_for = [&](int k) {
        std::vector<int> c(k);
        for (auto& x : c) x = (rng() & 1) ? 1 : -1;
        return c;
    };
    double worst = 0;
    size_t checked = 0;
    std::string where;
    auto check = [&](const std::string& label, const IsingModel& m, int k, const std::vector<double>& ideal) {
        const double d = deviation(m, k, ideal);
        ++checked;
        if (d > worst) {
            worst = d;
            where = label + " k=" + std::to_string(k);
        }
    };
    auto parity_ideal = [&](const std::vector<int>& gauges, Parity p) {
        std::vector<double> out;
        const int k = static_cast<int>(gauges.size());
        for (uint64_t a = 0; a < (uint64_t{1} << k); ++a) {
            int m = 0;
            for (int i = 0; i < k; ++i) m += (((a >> i) & 1) ? 1 : -1) * gauges[i] == 1;
            const bool odd = m % 2 == 1;
            out.push_back(odd == (p == Parity::Odd) ? 0 : g);
        }
        return out;
    };
    for (int k = 1; k <= 6; ++k) {
        for (int rep = 0; rep < 20; ++rep) {
            const auto c = gauges_for(k);
            const auto lits = gauged_literals(c);
            const Clause orc = Clause::make_or(lits);
            check("OR", clause_model(orc, params), k, clause_ideal(orc, g));
            const Clause xorc = Clause::make_xor(lits);
            check("XOR", clause_model(xorc, params), k, clause_ideal(xorc, g));
            for (Parity p : {Parity::Odd, Parity::Even}) {
                check("parity", build_parity_gadget(c, p, params).model, k, parity_ideal(c, p));
                if (k == 3) check("parity3", build_parity3_gadget(c, p, params).model, k, parity_ideal(c, p));
            }
            const Clause andc = Clause::make_and(lits);
            check("AND", clause_model(andc, params), k, clause_ideal(andc, g));
        }
        for (int profile = 0; profile < 50; ++profile) {
            std::vector<bool> pen(k + 1);
            do {
                for (auto&& b : pen) b = (rng() & 1) != 0;
            } while (std::all_of(pen.begin(), pen.end(), [&](bool b) { return b == pen[0]; }));
            std::vector<uint64_t> rows;
            while (rows.empty() || rows.size() == (uint64_t{1} << k)) {
                rows.clear();
                for (uint64_t r = 0; r < (uint64_t{1} << k); ++r) {
                    if (rng() & 1) rows.push_back(r);
                }
            }
            for (int rep = 0; rep < 20; ++rep) {
                const auto lits = gauged_literals(gauges_for(k));
                const Clause sym = Clause::make_symmetric(lits, 1.0, pen);
                check("SYMMETRIC", clause_model(sym, params), k, clause_ideal(sym, g));
                const Clause tab = Clause::make_table(lits, 1.0, rows);
                check("TABLE", clause_model(tab, params), k, clause_ideal(tab, g));
            }
        }
    }
    const double secs = t.seconds();
    report(2, "gadget faithfulness sweep", worst <= kTol && secs < 120,
           std::to_string(checked) + " gadgets, max deviation " + fmt(worst) + (where.empty() ? "" : " (" + where + ")") +
               ", " + fmt(secs) + " s");
}

// ---------------------------------------------------------------------------

std::vector<Problem> criterion3_instances() {
    std::mt19937_64 rng(3);
    std::vector<Problem> out;
    for (int i = 0; i < 200; ++i) {
        const int n = 1 + static_cast<int>(rng() % 10);
        const int c = 1 + static_cast<int>(rng() % 8);
        out.push_back(oracle::random_problem(rng, n, c, 4, 0.5, 2.0));
    }
    return out;
}

Outcome criterion3(const std::vector<Problem>& instances) {
    Outcome o;
    std::ostringstream file;
    double worst = 0;
    int argmin_mismatch = 0;
    for (size_t i = 0; i < instances.size(); ++i) {
        const Problem& p = instances[i];
        const CompiledProblem cp = compile_problem(p);
        const auto logical = cp.logical();
        const Spectrum s = reduced_spectrum(cp.model, logical);
        const Optimum opt = brute_force_optimum(p);
        const double lo = *std::min_element(s.energy.begin(), s.energy.end());
        std::vector<uint64_t> argmins;
        for (uint64_t a = 0; a < s.size(); ++a) {
            worst = std::max(worst, std::fabs(s.energy[a] - (cp.energy_scale * oracle::problem_energy(p, a) + cp.constant)));
            if (s.energy[a] <= lo + kTol) argmins.push_back(a);
        }
        argmin_mismatch += argmins != opt.argmins;
        file << "instance " << i << "\n" << serialize_wcnf(p) << write_ising_text(cp.model);
        file << "constant " << format_real(cp.constant) << "\nspectrum";
        for (double e : s.energy) file << ' ' << format_real(e);
        file << "\nargmins";
        for (uint64_t a : argmins) file << ' ' << a;
        file << "\n";
    }
    o.pass = worst <= kTol && argmin_mismatch == 0;
    o.detail = std::to_string(instances.size()) + " instances, max deviation " + fmt(worst) + ", argmin mismatches " +
               std::to_string(argmin_mismatch);
    o.output = file.str();
    return o;
}

// ---------------------------------------------------------------------------

void criterion4(const std::vector<Problem>& instances) {
    const ChimeraGraph graph(12, 12);
    std::mt19937_64 rng(4);
    int fitted = 0, audited = 0, fidelity_checked = 0;
    double worst = 0;
    std::string failure;
    for (size_t i = 0; i < instances.size(); ++i) {
        const CompiledProblem cp = compile_problem(instances[i]);
        Embedding e;
        try {
            e = linear_layout(cp, graph);
        } catch (const CapacityError&) {
            continue;
        }
        ++fitted;
        const AuditReport audit = audit_embedding(e, cp.model);
        if (!audit.ok) {
            if (failure.empty()) failure = "audit failed on instance " + std::to_string(i) + ": " + audit.problems.front();
            continue;
        }
        ++audited;
        const PhysicalModel pm = realize(cp.model, e, cp.params);
        const auto vs = cp.model.vertices();
        if (vs.size() <= 20) {
            const FidelityReport f = check_realization(cp.model, pm, 20);
            worst = std::max(worst, f.max_deviation);
            ++fidelity_checked;
        }
        // Independent spot check on random chain-intact states.
        for (int rep = 0; rep < 32; ++rep) {
            SpinAssignment a;
            for (const auto& v : vs) a[v] = (rng() & 1) ? 1 : -1;
            const SpinAssignment phys = expand_assignment(pm, a);
            worst = std::max(worst, std::fabs(oracle::energy(pm.model, phys) - oracle::energy(cp.model, a) - pm.constant));
        }
    }
    report(4, "embedding validity and realization fidelity", failure.empty() && fitted > 0 && worst <= kTol,
           std::to_string(fitted) + " fit 12x12, " + std::to_string(audited) + " audited, " +
               std::to_string(fidelity_checked) + " fully enumerated, max deviation " + fmt(worst) +
               (failure.empty() ? "" : ", " + failure));
}

// ---------------------------------------------------------------------------

Outcome criterion5() {
    Outcome o;
    std::mt19937_64 rng(5);
    std::ostringstream file;
    int tested = 0, recovered = 0, broken = 0;
    while (tested < 50) {
        const int n = 1 + static_cast<int>(rng() % 4);
        const int c = 1 + static_cast<int>(rng() % 3);
        const Problem p = oracle::random_problem(rng, n, c, 3, 0.5, 2.0);
        const CompiledProblem cp = compile_problem(p);
        const Embedding e = linear_layout(cp, minimal_linear_graph(cp));
        if (e.num_qubits() > 24) continue;
        ++tested;
        const PhysicalModel pm = realize(cp.model, e, cp.params);
        const SolveResult r = solve_exact(pm.model);
        const DecodeResult d = decode(r.assignment(), e);
        const Optimum opt = brute_force_optimum(p);
        const uint64_t mask = to_mask(logical_assignment(d.abstract, n));
        broken += !d.broken.empty();
        const bool hit = d.broken.empty() && std::find(opt.argmins.begin(), opt.argmins.end(), mask) != opt.argmins.end();
        recovered += hit;
        SolveReport rep;
        rep.result = &r;
        rep.decoded = &d;
        rep.num_variables = n;
        rep.problem_energy = problem_energy(p, mask);
        rep.has_problem_energy = true;
        file << "instance " << tested << " qubits " << e.num_qubits() << "\n"
             << serialize_wcnf(p) << write_solve_report(rep);
    }
    o.pass = recovered == tested;
    o.detail = std::to_string(recovered) + "/" + std::to_string(tested) + " recovered, " + std::to_string(broken) +
               " with broken chains";
    o.output = file.str();
    return o;
}

// ---------------------------------------------------------------------------

void criterion6() {
    Timer t;
    const GadgetParams params;
    const ScalingTable maxsat = scaling_table("maxsat", {8, 12, 16, 20, 24}, 1.0, 3, 0, params);
    const ScalingTable turbo = scaling_table("turbo", {4, 6, 8, 10, 12}, 1.0, 3, 0, params);
    const bool ok = std::fabs(maxsat.slope - 2) <= 0.3 && std::fabs(turbo.slope - 3) <= 0.3 && t.seconds() < 60;
    report(6, "qubit scaling exponents", ok,
           "max-3-SAT slope " + fmt(maxsat.slope) + " (2 +- 0.3), turbo slope " + fmt(turbo.slope) + " (3 +- 0.3), " +
               fmt(t.seconds()) + " s");
}

// ---------------------------------------------------------------------------

Outcome criterion7() {
    Outcome o;
    Timer t;
    const TurboCode code = TurboCode::random(8, 7);
    const Channel channel(0.05);
    TurboSolverConfig exact;
    exact.exact = true;
    TurboSolverConfig embedded;
    embedded.target = DecodeTarget::Embedded;
    std::vector<TurboTrial> exact_trials, sa_trials;
    int exact_agree = 0, sa_agree = 0;
    for (uint64_t seed = 0; seed < 200; ++seed) {
        exact_trials.push_back(run_turbo_trial(code, channel, seed, exact));
        exact_agree += exact_trials.back().oracle_available && exact_trials.back().agrees;
        sa_trials.push_back(run_turbo_trial(code, channel, seed, embedded));
        sa_agree += sa_trials.back().oracle_available && sa_trials.back().agrees;
    }
    const double secs = t.seconds();
    o.pass = exact_agree == 200 && sa_agree >= 160 && secs < 600;
    o.detail = "abstract exact " + std::to_string(exact_agree) + "/200, embedded SA " + std::to_string(sa_agree) +
               "/200 (need 160), " + fmt(secs) + " s";
    o.output = write_trial_log(exact_trials) + write_trial_log(sa_trials);
    return o;
}

// ---------------------------------------------------------------------------

void write_outputs(const fs::path& dir, const Outcome& c3, const Outcome& c5, const Outcome& c7) {
    fs::create_directories(dir);
    write_file_atomic(dir / "criterion3.txt", c3.output);
    write_file_atomic(dir / "criterion5.txt", c5.output);
    write_file_atomic(dir / "criterion7.txt", c7.output);
}

}  // namespace

int main() {
    const fs::path dir = fs::temp_directory_path() / "chimera_sat_acceptance";
    fs::remove_all(dir);

    criterion1();
    criterion2();

    Timer t3;
    const auto instances = criterion3_instances();
    const Outcome c3 = criterion3(instances);
    const double s3 = t3.seconds();
    report(3, "compiler spectrum oracle", c3.pass && s3 < 300, c3.detail + ", " + fmt(s3) + " s");

    criterion4(instances);

    const Outcome c5 = criterion5();
    report(5, "end-to-end ground-state recovery", c5.pass, c5.detail);

    criterion6();

    const Outcome c7 = criterion7();
    report(7, "turbo decoding", c7.pass, c7.detail);

    write_outputs(dir / "run1", c3, c5, c7);
    write_outputs(dir / "run2", criterion3(criterion3_instances()), criterion5(), criterion7());
    int differing = 0;
    for (const char* f : {"criterion3.txt", "criterion5.txt", "criterion7.txt"}) {
        differing += read_file(dir / "run1" / f) != read_file(dir / "run2" / f);
    }
    report(8, "determinism", differing == 0,
           std::to_string(3 - differing) + "/3 output files bit-identical across reruns");
    fs::remove_all(dir);
    return failures == 0 ? 0 : 1;
}
