#include "chimera_sat/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>
#include <tuple>

#include "chimera_sat/parallel.hpp"
#include "chimera_sat/text.hpp"
#include "enumerate.hpp"

namespace chimera_sat {

SpinAssignment SolveResult::assignment() const { return assignment(best); }

SpinAssignment SolveResult::assignment(const SpinVector& spins) const {
    SpinAssignment out;
    for (size_t i = 0; i < order.size(); ++i) out[order[i]] = spins[i];
    return out;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

double energy_tolerance(const IsingModel& model, double tie) { return tie * std::max(1.0, model.max_magnitude()); }

}  // namespace

SolveResult solve_exact(const IsingModel& model, const ExactOptions& options) {
    const auto start = Clock::now();
    SolveResult result;
    result.method = "exact";
    result.order = model.vertices();
    const int n = static_cast<int>(result.order.size());
    if (n == 0) {
        result.best_energy = model.offset();
        result.argmins.push_back({});
        result.seconds = seconds_since(start);
        return result;
    }

    const DenseModel prelim(model, result.order);
    std::vector<int> all(n);
    for (int i = 0; i < n; ++i) all[i] = i;
    const auto free_idx = detail::greedy_independent_set(prelim, all);
    std::vector<bool> is_free(n, false);
    for (int i : free_idx) is_free[i] = true;
    std::vector<Vertex> split_order;
    std::vector<int> position;  // split index -> index in result.order
    for (int i = 0; i < n; ++i) {
        if (!is_free[i]) {
            split_order.push_back(result.order[i]);
            position.push_back(i);
        }
    }
    const int n_enum = static_cast<int>(split_order.size());
    if (n_enum > options.max_enumerated) {
        throw CapError("exact solve needs " + std::to_string(n_enum) + " enumerated spins, cap is " +
                       std::to_string(options.max_enumerated));
    }
    for (int i = 0; i < n; ++i) {
        if (is_free[i]) {
            split_order.push_back(result.order[i]);
            position.push_back(i);
        }
    }
    const DenseModel dense(model, split_order);
    const uint64_t total = uint64_t{1} << n_enum;
    const size_t min_chunk = 1 << 12;

    auto chunks_for = [&](size_t count) {
        const size_t workers = std::max<size_t>(1, std::min(worker_count(), count / min_chunk));
        return workers;
    };
    const size_t nchunks = chunks_for(total);
    const size_t chunk = (total + nchunks - 1) / nchunks;

    // Pass 1: minimum.
    std::vector<double> chunk_min(nchunks, std::numeric_limits<double>::infinity());
    parallel_chunks(
        nchunks,
        [&](size_t cb, size_t ce) {
            for (size_t c = cb; c < ce; ++c) {
                const uint64_t begin = c * chunk, end = std::min<uint64_t>(total, begin + chunk);
                detail::SplitEnumerator en(dense, n_enum);
                en.reset(detail::gray(begin));
                double best = en.reduced_energy();
                for (uint64_t i = begin + 1; i < end; ++i) {
                    en.flip(detail::gray_flip_bit(i));
                    best = std::min(best, en.reduced_energy());
                }
                chunk_min[c] = best;
            }
        },
        1);
    const double lowest = *std::min_element(chunk_min.begin(), chunk_min.end());
    const double tol = energy_tolerance(model, options.tie_tolerance);

    // Pass 2: every state within tolerance of the minimum.
    std::vector<std::vector<SpinVector>> found(nchunks);
    std::vector<char> cut(nchunks, 0);
    parallel_chunks(
        nchunks,
        [&](size_t cb, size_t ce) {
            for (size_t c = cb; c < ce; ++c) {
                const uint64_t begin = c * chunk, end = std::min<uint64_t>(total, begin + chunk);
                detail::SplitEnumerator en(dense, n_enum);
                en.reset(detail::gray(begin));
                auto& out = found[c];
                for (uint64_t i = begin; i < end; ++i) {
                    if (i > begin) en.flip(detail::gray_flip_bit(i));
                    if (en.reduced_energy() > lowest + tol) continue;
                    SpinVector spins(n);
                    const uint64_t st = en.state();
                    for (int j = 0; j < n_enum; ++j) spins[position[j]] = ((st >> j) & 1) ? 1 : -1;
                    std::vector<int> zero;
                    const auto ff = en.free_fields();
                    for (int j = 0; j < en.num_free(); ++j) {
                        const double f = ff[j];
                        if (std::fabs(f) <= tol) {
                            zero.push_back(position[n_enum + j]);
                            spins[position[n_enum + j]] = -1;
                        } else {
                            spins[position[n_enum + j]] = f > 0 ? -1 : 1;
                        }
                    }
                    const uint64_t combos = zero.size() >= 63 ? ~uint64_t{0} : uint64_t{1} << zero.size();
                    for (uint64_t z = 0; z < combos; ++z) {
                        if (out.size() >= options.max_argmins) {
                            cut[c] = 1;
                            break;
                        }
                        for (size_t b = 0; b < zero.size(); ++b) spins[zero[b]] = ((z >> b) & 1) ? 1 : -1;
                        out.push_back(spins);
                    }
                }
            }
        },
        1);
    for (size_t c = 0; c < nchunks; ++c) {
        result.truncated = result.truncated || cut[c];
        for (auto& s : found[c]) result.argmins.push_back(std::move(s));
    }
    std::sort(result.argmins.begin(), result.argmins.end());
    if (result.argmins.size() > options.max_argmins) {
        result.argmins.resize(options.max_argmins);
        result.truncated = true;
    }
    result.best = result.argmins.front();
    result.best_energy = energy(model, result.assignment());
    result.seconds = seconds_since(start);
    return result;
}

Schedule Schedule::geometric_default(const IsingModel& model, double g, int sweeps) {
    double max_j = 0;
    for (const auto& [pair, j] : model.couplings()) max_j = std::max(max_j, std::fabs(j));
    if (max_j == 0) {
        for (const auto& [v, h] : model.fields()) max_j = std::max(max_j, std::fabs(h));
    }
    if (max_j == 0) max_j = 1;
    Schedule s;
    s.t_start = 2 * max_j;
    s.t_end = 0.01 * g;
    if (s.t_end > s.t_start) s.t_end = s.t_start;
    s.sweeps = sweeps;
    return s;
}

double Schedule::temperature(int sweep) const {
    if (sweeps <= 1) return t_end;
    const double frac = static_cast<double>(sweep) / (sweeps - 1);
    return t_start * std::pow(t_end / t_start, frac);
}

namespace {

struct RestartOutcome {
    SpinVector spins;
    double energy = 0;
};

// Flat adjacency plus cluster lists for the annealing inner loop.
struct AnnealModel {
    int n = 0;
    std::vector<double> field;
    std::vector<int> start;
    std::vector<int> nbr;
    std::vector<double> coupling;
    struct Cluster {
        std::vector<int> members;
        /// Couplings with both ends inside the cluster: (i, j, J).
        std::vector<std::tuple<int, int, double>> internal;
    };
    std::vector<Cluster> clusters;

    AnnealModel(const DenseModel& dense, const std::vector<std::vector<Vertex>>& groups) : n(dense.size()) {
        start.push_back(0);
        for (int i = 0; i < n; ++i) {
            field.push_back(dense.field(i));
            for (const auto& nb : dense.neighbors(i)) {
                nbr.push_back(nb.index);
                coupling.push_back(nb.coupling);
            }
            start.push_back(static_cast<int>(nbr.size()));
        }
        std::vector<int> owner(n, -1);
        for (const auto& g : groups) {
            if (g.size() < 2) continue;
            Cluster c;
            for (const auto& v : g) {
                const int i = dense.index_of(v);
                if (owner[i] != -1) throw SolverError("annealing clusters overlap at " + v.str());
                owner[i] = static_cast<int>(clusters.size());
                c.members.push_back(i);
            }
            clusters.push_back(std::move(c));
        }
        for (auto& c : clusters) {
            for (int i : c.members) {
                for (int k = start[i]; k < start[i + 1]; ++k) {
                    if (nbr[k] > i && owner[nbr[k]] == owner[i]) c.internal.emplace_back(i, nbr[k], coupling[k]);
                }
            }
        }
    }
};

// Uniform double in [0, 1) from the top 53 bits.
inline double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Proposals costing more than this many kT are rejected without a draw.
constexpr double kRejectBeyond = 40.0;

RestartOutcome anneal_once(const DenseModel& dense, const AnnealModel& m, const Schedule& schedule, uint64_t seed,
                           int restart) {
    std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32), static_cast<uint32_t>(restart)};
    std::mt19937_64 rng(seq);
    const int n = m.n;
    SpinVector s(n);
    for (int i = 0; i < n; ++i) s[i] = (rng() & 1) ? 1 : -1;
    std::vector<double> local(m.field);
    for (int i = 0; i < n; ++i) {
        for (int k = m.start[i]; k < m.start[i + 1]; ++k) local[i] += m.coupling[k] * s[m.nbr[k]];
    }

    auto flip = [&](int i) {
        const double old = s[i];
        s[i] = static_cast<int8_t>(-s[i]);
        for (int k = m.start[i]; k < m.start[i + 1]; ++k) local[m.nbr[k]] -= 2.0 * m.coupling[k] * old;
    };
    auto accept = [&](double delta, double beta) {
        if (delta <= 0) return true;
        const double x = beta * delta;
        if (x > kRejectBeyond) return false;
        return unit_draw(rng) < std::exp(-x);
    };

    for (int sweep = 0; sweep < schedule.sweeps; ++sweep) {
        const double beta = 1.0 / schedule.temperature(sweep);
        for (int i = 0; i < n; ++i) {
            if (accept(-2.0 * s[i] * local[i], beta)) flip(i);
        }
        for (const auto& c : m.clusters) {
            double delta = 0;
            for (int i : c.members) delta -= 2.0 * s[i] * local[i];
            for (const auto& [i, j, J] : c.internal) delta += 4.0 * J * s[i] * s[j];
            if (accept(delta, beta)) {
                for (int i : c.members) flip(i);
            }
        }
    }
    // Greedy descent to the nearest single-flip local minimum. `held` is
    // never flipped; its energy change is tracked in `gain`.
    auto descend = [&](int held, int held2 = -1) {
        double gain = 0;
        for (bool improved = true; improved;) {
            improved = false;
            for (int i = 0; i < n; ++i) {
                const double delta = -2.0 * s[i] * local[i];
                if (i != held && i != held2 && delta < -1e-12) {
                    gain += delta;
                    flip(i);
                    improved = true;
                }
            }
        }
        return gain;
    };
    descend(-1);
    // Polish: flip one spin, hold it while the rest relax, keep the result
    // if the total energy drops. Escapes minima whose exit needs one spin
    // plus the spins it drags along.
    for (bool improved = true; improved;) {
        improved = false;
        for (int i = 0; i < n; ++i) {
            const SpinVector saved = s;
            const std::vector<double> saved_local = local;
            double delta = -2.0 * s[i] * local[i];
            flip(i);
            delta += descend(i);
            if (delta < -1e-12) {
                descend(-1);
                improved = true;
            } else {
                s = saved;
                local = saved_local;
            }
        }
        if (improved) continue;
        for (int i = 0; i < n && !improved; ++i) {
            for (int k = m.start[i]; k < m.start[i + 1]; ++k) {
                const int j = m.nbr[k];
                if (j < i) continue;
                const SpinVector saved = s;
                const std::vector<double> saved_local = local;
                double delta = -2.0 * s[i] * local[i];
                flip(i);
                delta += -2.0 * s[j] * local[j];
                flip(j);
                delta += descend(i, j);
                if (delta < -1e-12) {
                    descend(-1);
                    improved = true;
                    break;
                }
                s = saved;
                local = saved_local;
            }
        }
    }
    return {s, dense.energy(s)};
}

}  // namespace

std::vector<std::vector<Vertex>> chain_clusters(const Embedding& embedding) {
    std::vector<std::vector<Vertex>> out;
    for (const auto& [v, chain] : embedding.chains) {
        std::vector<Vertex> group;
        for (int q : chain) group.push_back(Vertex::physical(q));
        out.push_back(std::move(group));
    }
    return out;
}

SolveResult solve_sa(const IsingModel& model, const AnnealOptions& options) {
    const auto start = Clock::now();
    Schedule schedule = options.schedule;
    if (schedule.t_start <= 0) schedule = Schedule::geometric_default(model, options.g, options.schedule.sweeps);
    if (!(schedule.t_start > 0) || !(schedule.t_end > 0) || schedule.t_end > schedule.t_start || schedule.sweeps < 1) {
        throw SolverError("annealing schedule needs positive, non-increasing temperatures and at least one sweep");
    }
    if (options.restarts < 1) throw SolverError("need at least one restart");

    SolveResult result;
    result.method = "sa";
    result.order = model.vertices();
    const DenseModel dense(model, result.order);
    const AnnealModel flat(dense, options.clusters);
    std::vector<RestartOutcome> outcomes(options.restarts);
    parallel_chunks(static_cast<size_t>(options.restarts), [&](size_t b, size_t e) {
        for (size_t r = b; r < e; ++r) {
            outcomes[r] = anneal_once(dense, flat, schedule, options.seed, static_cast<int>(r));
        }
    });
    const double tol = energy_tolerance(model, 1e-9);
    size_t best = 0;
    for (size_t r = 0; r < outcomes.size(); ++r) {
        result.restart_energies.push_back(outcomes[r].energy);
        if (r == 0) continue;
        const double d = outcomes[r].energy - outcomes[best].energy;
        if (d < -tol || (std::fabs(d) <= tol && outcomes[r].spins < outcomes[best].spins)) best = r;
    }
    result.best = outcomes[best].spins;
    result.best_energy = energy(model, result.assignment());
    result.argmins.push_back(result.best);
    result.seconds = seconds_since(start);
    return result;
}

DecodeResult decode(const SpinAssignment& physical, const Embedding& embedding) {
    DecodeResult out;
    for (const auto& [v, chain] : embedding.chains) {
        int up = 0, down = 0;
        for (int q : chain) {
            auto it = physical.find(Vertex::physical(q));
            if (it == physical.end()) throw SolverError("physical result lacks qubit " + std::to_string(q));
            (it->second > 0 ? up : down) += 1;
        }
        out.abstract[v] = up > down ? 1 : -1;
        if (up > 0 && down > 0) out.broken.push_back(v);
    }
    return out;
}

std::vector<bool> logical_assignment(const SpinAssignment& abstract, int num_variables) {
    std::vector<bool> out(num_variables, false);
    for (int i = 1; i <= num_variables; ++i) {
        auto it = abstract.find(Vertex::logical(i));
        if (it == abstract.end()) throw SolverError("no spin for logical variable " + std::to_string(i));
        out[i - 1] = it->second > 0;
    }
    return out;
}

std::string spin_string(const SpinVector& spins) {
    std::string s;
    for (auto v : spins) s.push_back(v > 0 ? '+' : '-');
    return s;
}

std::string write_solve_report(const SolveReport& report) {
    const SolveResult& r = *report.result;
    std::ostringstream out;
    out << "method " << r.method << "\n";
    out << "energy " << format_real(r.best_energy) << "\n";
    out << "order";
    for (const auto& v : r.order) out << ' ' << v.str();
    out << "\n";
    out << "spins " << spin_string(r.best) << "\n";
    if (r.method == "exact") {
        out << "ground_states " << r.argmins.size() << (r.truncated ? " truncated" : "") << "\n";
    }
    for (size_t i = 0; i < r.restart_energies.size(); ++i) {
        out << "restart " << i << ' ' << format_real(r.restart_energies[i]) << "\n";
    }
    if (report.decoded) {
        const auto& d = *report.decoded;
        out << "broken_chains " << d.broken.size();
        for (const auto& v : d.broken) out << ' ' << v.str();
        out << "\n";
    }
    if (report.num_variables > 0) {
        const SpinAssignment spins = report.decoded ? report.decoded->abstract : r.assignment();
        const auto bits = logical_assignment(spins, report.num_variables);
        out << "variables ";
        for (bool b : bits) out << (b ? '1' : '0');
        out << "\n";
    }
    if (report.has_problem_energy) out << "problem_energy " << format_real(report.problem_energy) << "\n";
    if (report.include_timing) out << "seconds " << format_real(r.seconds) << "\n";
    return out.str();
}

}  // namespace chimera_sat
