#include "chimera_sat/ising.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>

#include "chimera_sat/parallel.hpp"
#include "chimera_sat/text.hpp"
#include "enumerate.hpp"

namespace chimera_sat {

std::string Vertex::str() const {
    switch (kind) {
        case Kind::Logical:
            return "L" + std::to_string(index);
        case Kind::Ancilla:
            return "A" + std::to_string(index) + "." + std::to_string(sub);
        case Kind::Physical:
            return std::to_string(index);
    }
    return "?";
}

std::optional<Vertex> Vertex::parse(std::string_view token) {
    if (token.empty()) return std::nullopt;
    auto nonneg = [](std::string_view t) -> std::optional<int> {
        if (t.empty() || t.front() == '-' || t.front() == '+') return std::nullopt;
        auto v = parse_integer(t);
        if (!v || *v > std::numeric_limits<int>::max()) return std::nullopt;
        return static_cast<int>(*v);
    };
    if (token.front() == 'L') {
        auto i = nonneg(token.substr(1));
        if (!i) return std::nullopt;
        return Vertex::logical(*i);
    }
    if (token.front() == 'A') {
        auto dot = token.find('.');
        if (dot == std::string_view::npos) return std::nullopt;
        auto c = nonneg(token.substr(1, dot - 1));
        auto j = nonneg(token.substr(dot + 1));
        if (!c || !j) return std::nullopt;
        return Vertex::ancilla(*c, *j);
    }
    auto q = nonneg(token);
    if (!q) return std::nullopt;
    return Vertex::physical(*q);
}

VertexPair ordered_pair(Vertex a, Vertex b) {
    if (a == b) {
        throw IsingError("self-coupling on vertex " + a.str());
    }
    return a < b ? VertexPair{a, b} : VertexPair{b, a};
}

void IsingModel::add_vertex(Vertex v) { fields_.try_emplace(v, 0.0); }

void IsingModel::add_field(Vertex v, double value) { fields_[v] += value; }

void IsingModel::add_coupling(Vertex a, Vertex b, double value) {
    auto key = ordered_pair(a, b);
    add_vertex(a);
    add_vertex(b);
    couplings_[key] += value;
}

void IsingModel::scale(double factor) {
    for (auto& [v, h] : fields_) h *= factor;
    for (auto& [e, j] : couplings_) j *= factor;
    offset_ *= factor;
}

double IsingModel::field(Vertex v) const {
    auto it = fields_.find(v);
    return it == fields_.end() ? 0.0 : it->second;
}

double IsingModel::coupling(Vertex a, Vertex b) const {
    if (a == b) return 0.0;
    auto it = couplings_.find(ordered_pair(a, b));
    return it == couplings_.end() ? 0.0 : it->second;
}

std::vector<Vertex> IsingModel::vertices() const {
    std::vector<Vertex> out;
    out.reserve(fields_.size());
    for (const auto& [v, h] : fields_) out.push_back(v);
    return out;
}

double IsingModel::max_magnitude() const {
    double m = 0;
    for (const auto& [v, h] : fields_) m = std::max(m, std::fabs(h));
    for (const auto& [e, j] : couplings_) m = std::max(m, std::fabs(j));
    return m;
}

double energy(const IsingModel& model, const SpinAssignment& spins) {
    auto spin = [&](Vertex v) {
        auto it = spins.find(v);
        if (it == spins.end()) {
            throw IsingError("no spin value for vertex " + v.str());
        }
        if (it->second != 1 && it->second != -1) {
            throw IsingError("spin value for " + v.str() + " is not +1/-1");
        }
        return it->second;
    };
    double e = model.offset();
    for (const auto& [v, h] : model.fields()) e += h * spin(v);
    for (const auto& [pair, j] : model.couplings()) e += j * spin(pair.first) * spin(pair.second);
    return e;
}

IsingModel superimpose(std::span<const IsingModel> models) {
    IsingModel out;
    std::set<Vertex> ancillae;
    for (const auto& m : models) {
        for (const auto& [v, h] : m.fields()) {
            if (v.is_ancilla() && !ancillae.insert(v).second) {
                throw IsingError("ancilla " + v.str() + " appears in more than one superimposed model");
            }
            out.add_vertex(v);
            out.add_field(v, h);
        }
        for (const auto& [pair, j] : m.couplings()) {
            out.add_coupling(pair.first, pair.second, j);
        }
        out.add_offset(m.offset());
    }
    return out;
}

IsingModel gauge_transform(const IsingModel& model, const std::set<Vertex>& flips) {
    for (const auto& v : flips) {
        if (!model.contains(v)) {
            throw IsingError("gauge flip on vertex " + v.str() + " outside the model");
        }
    }
    IsingModel out;
    for (const auto& [v, h] : model.fields()) {
        out.add_vertex(v);
        out.add_field(v, flips.count(v) ? -h : h);
    }
    for (const auto& [pair, j] : model.couplings()) {
        const bool flipped = (flips.count(pair.first) != 0) != (flips.count(pair.second) != 0);
        out.add_coupling(pair.first, pair.second, flipped ? -j : j);
    }
    out.set_offset(model.offset());
    return out;
}

DenseModel::DenseModel(const IsingModel& model) : order_(model.vertices()) { build(model); }

DenseModel::DenseModel(const IsingModel& model, std::vector<Vertex> order) : order_(std::move(order)) {
    if (order_.size() != model.size()) {
        throw IsingError("dense order must list every vertex exactly once");
    }
    build(model);
}

void DenseModel::build(const IsingModel& model) {
    for (size_t i = 0; i < order_.size(); ++i) {
        if (!model.contains(order_[i]) || !index_.emplace(order_[i], static_cast<int>(i)).second) {
            throw IsingError("dense order must list every vertex exactly once");
        }
    }
    const size_t n = order_.size();
    h_.resize(n);
    for (size_t i = 0; i < n; ++i) h_[i] = model.field(order_[i]);
    offset_ = model.offset();
    std::vector<std::vector<Neighbor>> adj(n);
    for (const auto& [pair, j] : model.couplings()) {
        if (j == 0) continue;
        const int a = index_.at(pair.first);
        const int b = index_.at(pair.second);
        adj[a].push_back({b, j});
        adj[b].push_back({a, j});
    }
    start_.assign(n + 1, 0);
    for (size_t i = 0; i < n; ++i) start_[i + 1] = start_[i] + adj[i].size();
    adjacency_.reserve(start_[n]);
    for (auto& list : adj) {
        std::sort(list.begin(), list.end(), [](const Neighbor& x, const Neighbor& y) { return x.index < y.index; });
        adjacency_.insert(adjacency_.end(), list.begin(), list.end());
    }
}

int DenseModel::index_of(Vertex v) const {
    auto it = index_.find(v);
    if (it == index_.end()) throw IsingError("vertex " + v.str() + " not in model");
    return it->second;
}

double DenseModel::energy(std::span<const int8_t> spins) const {
    double e = offset_;
    for (int i = 0; i < size(); ++i) {
        double pair = 0;
        for (const auto& nb : neighbors(i)) {
            if (nb.index > i) pair += nb.coupling * spins[nb.index];
        }
        e += spins[i] * (h_[i] + pair);
    }
    return e;
}

double DenseModel::local_field(int i, std::span<const int8_t> spins) const {
    double f = h_[i];
    for (const auto& nb : neighbors(i)) f += nb.coupling * spins[nb.index];
    return f;
}

namespace detail {

std::vector<int> greedy_independent_set(const DenseModel& dense, const std::vector<int>& candidates) {
    std::vector<char> is_candidate(dense.size(), 0);
    for (int c : candidates) is_candidate[c] = 1;
    auto degree = [&](int v) {
        int d = 0;
        for (const auto& nb : dense.neighbors(v)) d += is_candidate[nb.index];
        return d;
    };
    std::vector<int> order = candidates;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return degree(a) < degree(b); });
    std::vector<char> blocked(dense.size(), 0);
    std::vector<int> chosen;
    for (int v : order) {
        if (blocked[v]) continue;
        chosen.push_back(v);
        for (const auto& nb : dense.neighbors(v)) blocked[nb.index] = 1;
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

}  // namespace detail

int Spectrum::completion_spin(size_t entry, size_t j) const {
    return ((completion_bits[entry * words + j / 64] >> (j % 64)) & 1) ? 1 : -1;
}

std::string Spectrum::completion_string(size_t entry) const {
    std::string s;
    for (size_t j = 0; j < others.size(); ++j) s.push_back(completion_spin(entry, j) > 0 ? '1' : '0');
    return s;
}

std::string Spectrum::completion_string(size_t entry, std::span<const Vertex> subset) const {
    std::string s;
    for (const auto& v : subset) {
        auto it = std::lower_bound(others.begin(), others.end(), v);
        if (it == others.end() || *it != v) throw IsingError("vertex " + v.str() + " is not a completion vertex");
        s.push_back(completion_spin(entry, static_cast<size_t>(it - others.begin())) > 0 ? '1' : '0');
    }
    return s;
}

namespace {

// True when completion a precedes b lexicographically (first differing
// position holds -1 in a).
bool completion_less(const uint64_t* a, const uint64_t* b, size_t words) {
    for (size_t w = 0; w < words; ++w) {
        const uint64_t d = a[w] ^ b[w];
        if (d) {
            const int j = std::countr_zero(d);
            return ((a[w] >> j) & 1) == 0;
        }
    }
    return false;
}

}  // namespace

Spectrum reduced_spectrum(const IsingModel& model, std::span<const Vertex> logical, const SpectrumOptions& options) {
    Spectrum out;
    out.logical.assign(logical.begin(), logical.end());
    std::set<Vertex> logical_set;
    for (const auto& v : logical) {
        if (!model.contains(v)) throw IsingError("logical vertex " + v.str() + " not in model");
        if (!logical_set.insert(v).second) throw IsingError("logical vertex " + v.str() + " listed twice");
    }
    for (const auto& [v, h] : model.fields()) {
        if (!logical_set.count(v)) out.others.push_back(v);
    }
    const int num_logical = static_cast<int>(logical.size());

    // Split the remaining vertices into an enumerated part and an
    // independent part minimized in closed form.
    std::vector<Vertex> prelim(out.logical);
    prelim.insert(prelim.end(), out.others.begin(), out.others.end());
    DenseModel prelim_dense(model, prelim);
    std::vector<int> other_idx(out.others.size());
    std::iota(other_idx.begin(), other_idx.end(), num_logical);
    auto free_idx = detail::greedy_independent_set(prelim_dense, other_idx);
    std::vector<char> is_free(prelim.size(), 0);
    for (int f : free_idx) is_free[f] = 1;
    std::vector<int> enum_others;
    for (int i : other_idx) {
        if (!is_free[i]) enum_others.push_back(i);
    }
    const int num_enum = num_logical + static_cast<int>(enum_others.size());
    if (num_enum > options.max_enumerated || num_enum > 62) {
        throw CapError("reduced spectrum needs " + std::to_string(num_enum) + " enumerated spins, cap is " +
                       std::to_string(options.max_enumerated));
    }

    std::vector<Vertex> order(out.logical);
    std::vector<size_t> position;  // position in `others` for order[num_logical + i]
    for (int i : enum_others) {
        order.push_back(prelim[i]);
        position.push_back(static_cast<size_t>(i - num_logical));
    }
    for (int i : free_idx) {
        order.push_back(prelim[i]);
        position.push_back(static_cast<size_t>(i - num_logical));
    }
    DenseModel dense(model, order);

    const int num_inner = num_enum - num_logical;
    const size_t entries = size_t{1} << num_logical;
    const uint64_t inner_states = uint64_t{1} << num_inner;
    const double tol = options.tie_tolerance;
    out.words = (out.others.size() + 63) / 64;
    out.energy.assign(entries, std::numeric_limits<double>::infinity());
    out.excitation.assign(entries, std::numeric_limits<double>::infinity());
    out.completion_bits.assign(entries * out.words, 0);

    parallel_chunks(
        entries,
        [&](size_t begin, size_t end) {
            detail::SplitEnumerator en(dense, num_enum);
            std::vector<uint64_t> candidate(out.words, 0);
            const uint64_t logical_mask = (uint64_t{1} << num_logical) - 1;
            auto visit = [&] {
                const double v = en.reduced_energy();
                const size_t entry = static_cast<size_t>(en.state() & logical_mask);
                double& best = out.energy[entry];
                double& second = out.excitation[entry];  // holds the second level until the end
                if (v > best + tol) {
                    second = std::min(second, v);
                    return;
                }
                std::fill(candidate.begin(), candidate.end(), 0);
                for (int i = 0; i < num_inner; ++i) {
                    if ((en.state() >> (num_logical + i)) & 1) {
                        const size_t p = position[i];
                        candidate[p / 64] |= uint64_t{1} << (p % 64);
                    }
                }
                double min_free = std::numeric_limits<double>::infinity();
                const auto fields = en.free_fields();
                for (size_t j = 0; j < fields.size(); ++j) {
                    const double f = fields[j];
                    if (f < -tol) {
                        const size_t p = position[num_inner + j];
                        candidate[p / 64] |= uint64_t{1} << (p % 64);
                    }
                    if (std::fabs(f) > tol) min_free = std::min(min_free, std::fabs(f));
                }
                uint64_t* current = out.completion_bits.data() + entry * out.words;
                if (v < best - tol) {
                    if (std::isfinite(best)) second = std::min(second, best);
                    best = v;
                    std::copy(candidate.begin(), candidate.end(), current);
                } else {
                    best = std::min(best, v);
                    if (completion_less(candidate.data(), current, out.words)) {
                        std::copy(candidate.begin(), candidate.end(), current);
                    }
                }
                const double excited = v + 2 * min_free;
                if (excited > best + tol) second = std::min(second, excited);
            };
            for (size_t i = begin; i < end; ++i) {
                if (i == begin) {
                    en.reset(detail::gray(i));
                } else {
                    en.flip(detail::gray_flip_bit(i));
                }
                visit();
                for (uint64_t j = 1; j < inner_states; ++j) {
                    en.flip(num_logical + detail::gray_flip_bit(j));
                    visit();
                }
            }
        },
        std::max<size_t>(1, 4096 >> std::min(num_inner, 12)));

    for (size_t a = 0; a < entries; ++a) {
        out.excitation[a] = out.excitation[a] - out.energy[a];
    }
    return out;
}

std::string write_ising_text(const IsingModel& model) {
    std::ostringstream out;
    out << "offset " << format_real(model.offset()) << '\n';
    for (const auto& [v, h] : model.fields()) {
        out << "h " << v.str() << ' ' << format_real(h) << '\n';
    }
    for (const auto& [pair, j] : model.couplings()) {
        out << "J " << pair.first.str() << ' ' << pair.second.str() << ' ' << format_real(j) << '\n';
    }
    return out.str();
}

IsingModel parse_ising_text(std::string_view text) {
    IsingModel model;
    std::set<Vertex> seen_fields;
    std::set<VertexPair> seen_couplings;
    bool seen_offset = false;
    int line_no = 0;
    size_t pos = 0;
    auto fail = [&](const std::string& msg) -> IsingError {
        return IsingError("ising text line " + std::to_string(line_no) + ": " + msg);
    };
    while (pos < text.size()) {
        size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        auto t = split_whitespace(line);
        if (t.empty() || t.front().front() == '#') continue;
        auto vertex = [&](std::string_view tok) {
            auto v = Vertex::parse(tok);
            if (!v) throw fail("bad vertex '" + std::string(tok) + "'");
            return *v;
        };
        auto value = [&](std::string_view tok) {
            auto v = parse_real(tok);
            if (!v) throw fail("bad value '" + std::string(tok) + "'");
            return *v;
        };
        if (t[0] == "offset" && t.size() == 2) {
            if (seen_offset) throw fail("duplicate offset");
            seen_offset = true;
            model.set_offset(value(t[1]));
        } else if (t[0] == "h" && t.size() == 3) {
            Vertex v = vertex(t[1]);
            if (!seen_fields.insert(v).second) throw fail("duplicate field for " + v.str());
            model.add_vertex(v);
            model.add_field(v, value(t[2]));
        } else if (t[0] == "J" && t.size() == 4) {
            Vertex a = vertex(t[1]);
            Vertex b = vertex(t[2]);
            if (a == b) throw fail("self-coupling");
            if (!seen_couplings.insert(ordered_pair(a, b)).second) throw fail("duplicate coupling");
            model.add_coupling(a, b, value(t[3]));
        } else {
            throw fail("unrecognized line");
        }
    }
    return model;
}

}  // namespace chimera_sat
