#include "chimera_sat/turbo.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace chimera_sat {

TurboCode TurboCode::with_permutation(std::vector<int> permutation) {
    const int K = static_cast<int>(permutation.size());
    std::vector<bool> seen(K + 1, false);
    for (int v : permutation) {
        if (v < 1 || v > K || seen[v]) throw TurboError("permutation must be a bijection on 1..K");
        seen[v] = true;
    }
    TurboCode c;
    c.K = K;
    c.permutation = std::move(permutation);
    return c;
}

TurboCode TurboCode::identity(int K) {
    std::vector<int> p(K);
    std::iota(p.begin(), p.end(), 1);
    return with_permutation(std::move(p));
}

TurboCode TurboCode::random(int K, uint64_t seed) {
    std::vector<int> p(K);
    std::iota(p.begin(), p.end(), 1);
    std::mt19937_64 rng(seed);
    // Fisher-Yates with an explicit draw so the result does not depend on the
    // standard library's shuffle.
    for (int i = K - 1; i > 0; --i) {
        const int j = static_cast<int>(rng() % static_cast<uint64_t>(i + 1));
        std::swap(p[i], p[j]);
    }
    return with_permutation(std::move(p));
}

std::vector<int> TurboCode::check_support(int i) const {
    if (i < 1 || i > K) throw TurboError("check index out of range");
    std::vector<int> s;
    for (int j = 1; j <= i; ++j) s.push_back(i % 2 == 1 ? j : permutation[j - 1]);
    std::sort(s.begin(), s.end());
    return s;
}

Channel::Channel(double flip_probability) : p(flip_probability) {
    if (!(p > 0 && p < 0.5)) throw TurboError("channel flip probability must lie in (0, 1/2)");
}

double Channel::f() const { return -0.5 * std::log((1 - p) / p); }

namespace {

void check_word(const Word& w, size_t length, const char* what) {
    if (w.size() != length) {
        throw TurboError(std::string(what) + " has length " + std::to_string(w.size()) + ", expected " +
                         std::to_string(length));
    }
    for (int v : w) {
        if (v != 1 && v != -1) throw TurboError(std::string(what) + " entries must be +1 or -1");
    }
}

}  // namespace

Word encode(const TurboCode& code, const Word& message) {
    check_word(message, code.K, "message");
    Word out = message;
    for (int i = 1; i <= code.K; ++i) {
        int prod = 1;
        for (int v : code.check_support(i)) prod *= message[v - 1];
        out.push_back(prod);
    }
    return out;
}

Word transmit(const Word& word, const Channel& channel, uint64_t seed) {
    std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32), 0x7472u};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    Word out = word;
    for (auto& v : out) {
        if (uniform(rng) < channel.p) v = -v;
    }
    return out;
}

double decoding_energy(const TurboCode& code, const Word& received, const Channel& channel, const Word& message) {
    check_word(received, 2 * static_cast<size_t>(code.K), "received word");
    check_word(message, code.K, "message");
    const double f = channel.f();
    double e = 0;
    for (int i = 1; i <= code.K; ++i) {
        e += f * received[i - 1] * message[i - 1];
        int prod = 1;
        for (int v : code.check_support(i)) prod *= message[v - 1];
        e += f * received[code.K + i - 1] * prod;
    }
    return e;
}

DecodingProblem build_decoding_problem(const TurboCode& code, const Word& received, const Channel& channel) {
    check_word(received, 2 * static_cast<size_t>(code.K), "received word");
    const double f = channel.f();
    const double w = 2 * std::fabs(f);
    DecodingProblem out{Problem(code.K), 1.0, 2.0 * code.K * std::fabs(f)};
    // A term f rho prod(s) is lowest when prod(s) = rho (f < 0). The XOR
    // clause asks for an odd number of true literals; prod(s) = +1 iff the
    // number of true bits has the parity of |S|.
    auto add_term = [&](const std::vector<int>& support, int rho) {
        std::vector<Literal> lits;
        for (int v : support) lits.push_back(Literal{v, false});
        const bool even = support.size() % 2 == 0;
        if (even != (rho < 0)) lits[0].negated = true;
        out.problem.add_clause(Clause::make_xor(std::move(lits), w));
    };
    for (int i = 1; i <= code.K; ++i) add_term({i}, received[i - 1]);
    for (int i = 1; i <= code.K; ++i) add_term(code.check_support(i), received[code.K + i - 1]);
    return out;
}

Word map_decode_oracle(const TurboCode& code, const Word& received, const Channel& channel) {
    const int K = code.K;
    if (K > kMaxOracleLength) throw CapError("MAP oracle limited to K <= " + std::to_string(kMaxOracleLength));
    check_word(received, 2 * static_cast<size_t>(K), "received word");
    const double f = channel.f();
    // mask bit j set iff s_{j+1} = -1
    std::vector<uint32_t> support(K);
    for (int i = 1; i <= K; ++i) {
        for (int v : code.check_support(i)) support[i - 1] |= uint32_t{1} << (v - 1);
    }
    const double tol = 1e-9 * std::max(1.0, std::fabs(f) * 2 * K);
    double best = std::numeric_limits<double>::infinity();
    uint64_t best_key = ~uint64_t{0};
    uint32_t best_mask = 0;
    for (uint32_t mask = 0; mask < (uint32_t{1} << K); ++mask) {
        double e = 0;
        for (int i = 0; i < K; ++i) {
            const int s = ((mask >> i) & 1) ? -1 : 1;
            e += f * received[i] * s;
            const int prod = (std::popcount(mask & support[i]) & 1) ? -1 : 1;
            e += f * received[K + i] * prod;
        }
        // Lexicographic key: bit 1 most significant, -1 sorts first.
        uint64_t key = 0;
        for (int i = 0; i < K; ++i) {
            if (!((mask >> i) & 1)) key |= uint64_t{1} << (K - 1 - i);
        }
        if (e < best - tol || (std::fabs(e - best) <= tol && key < best_key)) {
            best = std::min(best, e);
            best_key = key;
            best_mask = mask;
        }
    }
    Word out(K);
    for (int i = 0; i < K; ++i) out[i] = ((best_mask >> i) & 1) ? -1 : 1;
    return out;
}

TurboDecode decode_via_annealing(const TurboCode& code, const Word& received, const Channel& channel,
                                 const TurboSolverConfig& config) {
    const DecodingProblem dp = build_decoding_problem(code, received, channel);
    const CompiledProblem compiled = compile_problem(dp.problem, config.compile);
    AnnealOptions anneal = config.anneal;
    anneal.g = compiled.energy_scale;
    TurboDecode out;
    SpinAssignment abstract;
    if (config.target == DecodeTarget::Abstract) {
        const SolveResult r = config.exact ? solve_exact(compiled.model) : solve_sa(compiled.model, anneal);
        abstract = r.assignment();
        out.physical_qubits = 0;
    } else {
        const ChimeraGraph graph = config.graph_rows > 0 && config.graph_cols > 0
                                       ? ChimeraGraph(config.graph_rows, config.graph_cols)
                                       : minimal_linear_graph(compiled);
        const Embedding embedding = embed_problem(compiled, graph, config.layout);
        const PhysicalModel physical = realize(compiled.model, embedding, compiled.params);
        if (config.chain_moves) anneal.clusters = chain_clusters(embedding);
        const SolveResult r = config.exact ? solve_exact(physical.model) : solve_sa(physical.model, anneal);
        const DecodeResult d = decode(r.assignment(), embedding);
        abstract = d.abstract;
        out.broken_chains = static_cast<int>(d.broken.size());
        out.physical_qubits = static_cast<int>(embedding.num_qubits());
    }
    out.message.resize(code.K);
    for (int i = 1; i <= code.K; ++i) out.message[i - 1] = abstract.at(Vertex::logical(i));
    out.energy = decoding_energy(code, received, channel, out.message);
    if (code.K <= kMaxOracleLength) {
        out.oracle_available = true;
        out.oracle = map_decode_oracle(code, received, channel);
        const double map_energy = decoding_energy(code, received, channel, out.oracle);
        out.agrees = std::fabs(out.energy - map_energy) <= 1e-9 * std::max(1.0, std::fabs(map_energy));
    }
    return out;
}

TurboTrial run_turbo_trial(const TurboCode& code, const Channel& channel, uint64_t seed,
                           const TurboSolverConfig& config) {
    TurboTrial t;
    t.seed = seed;
    std::mt19937_64 rng(seed);
    t.message.resize(code.K);
    for (auto& v : t.message) v = (rng() & 1) ? 1 : -1;
    t.received = transmit(encode(code, t.message), channel, seed);
    TurboSolverConfig cfg = config;
    cfg.anneal.seed = seed;
    const TurboDecode d = decode_via_annealing(code, t.received, channel, cfg);
    t.decoded = d.message;
    t.oracle = d.oracle;
    t.oracle_available = d.oracle_available;
    t.agrees = d.agrees;
    t.broken_chains = d.broken_chains;
    for (int i = 0; i < code.K; ++i) t.bit_errors += t.decoded[i] != t.message[i];
    return t;
}

std::string word_string(const Word& word) {
    std::string s;
    for (int v : word) s.push_back(v > 0 ? '+' : '-');
    return s;
}

std::string write_trial_log(const std::vector<TurboTrial>& trials) {
    std::ostringstream out;
    out << "# seed message received decoded oracle bit_errors broken_chains agrees\n";
    for (const auto& t : trials) {
        out << t.seed << ' ' << word_string(t.message) << ' ' << word_string(t.received) << ' '
            << word_string(t.decoded) << ' ' << (t.oracle_available ? word_string(t.oracle) : "-") << ' '
            << t.bit_errors << ' ' << t.broken_chains << ' ' << (t.oracle_available ? (t.agrees ? "1" : "0") : "-")
            << "\n";
    }
    return out.str();
}

}  // namespace chimera_sat
