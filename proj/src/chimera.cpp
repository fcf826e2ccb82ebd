#include "chimera_sat/chimera.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <set>

#include <json.hpp>

#include "chimera_sat/text.hpp"

namespace chimera_sat {

ChimeraGraph::ChimeraGraph(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows < 1 || cols < 1) throw EmbeddingError("Chimera graph needs at least one row and one column");
}

ChimeraGraph build_chimera(int rows, int cols) { return ChimeraGraph(rows, cols); }

int ChimeraGraph::index(int row, int col, int shore, int unit) const {
    return ((row * cols_ + col) * 2 + shore) * kCellSize + unit;
}

ChimeraCoord ChimeraGraph::coord(int q) const {
    ChimeraCoord c;
    c.unit = q % kCellSize;
    q /= kCellSize;
    c.shore = q % 2;
    q /= 2;
    c.col = q % cols_;
    c.row = q / cols_;
    return c;
}

bool ChimeraGraph::has_edge(int a, int b) const {
    if (!contains(a) || !contains(b) || a == b) return false;
    const ChimeraCoord x = coord(a), y = coord(b);
    if (x.row == y.row && x.col == y.col) return x.shore != y.shore;
    if (x.shore != y.shore || x.unit != y.unit) return false;
    if (x.shore == 0) return x.row == y.row && std::abs(x.col - y.col) == 1;
    return x.col == y.col && std::abs(x.row - y.row) == 1;
}

std::vector<int> ChimeraGraph::neighbors(int q) const {
    std::vector<int> out;
    const ChimeraCoord c = coord(q);
    for (int u = 0; u < kCellSize; ++u) out.push_back(index(c.row, c.col, 1 - c.shore, u));
    if (c.shore == 0) {
        if (c.col > 0) out.push_back(index(c.row, c.col - 1, 0, c.unit));
        if (c.col + 1 < cols_) out.push_back(index(c.row, c.col + 1, 0, c.unit));
    } else {
        if (c.row > 0) out.push_back(index(c.row - 1, c.col, 1, c.unit));
        if (c.row + 1 < rows_) out.push_back(index(c.row + 1, c.col, 1, c.unit));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::pair<int, int>> ChimeraGraph::edges() const {
    std::vector<std::pair<int, int>> out;
    for (int q = 0; q < num_vertices(); ++q) {
        for (int p : neighbors(q)) {
            if (q < p) out.emplace_back(q, p);
        }
    }
    return out;
}

size_t ChimeraGraph::num_edges() const {
    const size_t cells = static_cast<size_t>(rows_) * cols_;
    return cells * 16 + static_cast<size_t>(rows_) * (cols_ - 1) * 4 + static_cast<size_t>(cols_) * (rows_ - 1) * 4;
}

const std::vector<int>& Embedding::chain(Vertex v) const {
    auto it = chains.find(v);
    if (it == chains.end()) throw EmbeddingError("no chain for " + v.str());
    return it->second;
}

size_t Embedding::num_qubits() const {
    size_t n = 0;
    for (const auto& [v, c] : chains) n += c.size();
    return n;
}

std::map<int, Vertex> Embedding::owners() const {
    std::map<int, Vertex> out;
    for (const auto& [v, c] : chains) {
        for (int q : c) out.emplace(q, v);
    }
    return out;
}

namespace {

int ceil_div(int a, int b) { return (a + b - 1) / b; }

using ChainSets = std::map<Vertex, std::set<int>>;

Embedding finish(const ChimeraGraph& graph, const ChainSets& sets, std::string layout, int t, int rows, int strips) {
    Embedding e;
    e.graph = graph;
    e.layout = std::move(layout);
    e.block_size = t;
    e.ancilla_rows = rows;
    e.strips = strips;
    for (const auto& [v, s] : sets) e.chains[v] = std::vector<int>(s.begin(), s.end());
    return e;
}

int logical_count(const Embedding& e) {
    int n = 0;
    for (const auto& [v, c] : e.chains) {
        if (v.is_logical()) n = std::max(n, v.index);
    }
    return n;
}

// Slot rows (strip, row) available to ancillae when the layout uses
// `strips` column strips. Strip 0 runs up from the complete-graph block,
// odd strips run down, even strips up; inner strips leave t rows at each
// turn for the corner blocks.
std::vector<std::pair<int, int>> slot_rows(int rows, int t, int strips) {
    std::vector<std::pair<int, int>> out;
    for (int s = 0; s < strips; ++s) {
        const bool last = s == strips - 1;
        if (s % 2 == 0) {
            const int hi = last ? rows - 1 : rows - t - 1;
            for (int r = t; r <= hi; ++r) out.emplace_back(s, r);
        } else {
            const int lo = last ? 0 : t;
            for (int r = rows - t - 1; r >= lo; --r) out.emplace_back(s, r);
        }
    }
    return out;
}

struct AncillaSlot {
    Vertex vertex;
    int strip;
    int row;
    int unit;
};

// Lays the logical chains through `strips` strips and places the ancillae.
// `sets` already holds the complete-graph block.
void route(const ChimeraGraph& g, int n, int t, int strips, const std::vector<Vertex>& ancillae, ChainSets& sets) {
    const int M = g.rows();
    auto slots = slot_rows(M, t, strips);
    const int needed = ceil_div(static_cast<int>(ancillae.size()), 4);
    slots.resize(needed);

    std::vector<AncillaSlot> placed;
    for (size_t a = 0; a < ancillae.size(); ++a) {
        const auto [s, r] = slots[a / 4];
        placed.push_back({ancillae[a], s, r, static_cast<int>(a % 4)});
    }
    // Farthest row reached in the last strip.
    const int last_row = slots.empty() ? t - 1 : slots.back().second;

    for (int i = 0; i < n; ++i) {
        const int b = i / 4, u = i % 4;
        auto& chain = sets[Vertex::logical(i + 1)];
        for (int s = 0; s < strips; ++s) {
            const bool last = s == strips - 1;
            const bool down = s % 2 == 1;
            const int col = s * t + b;
            int from, to;
            if (!down) {
                from = s == 0 ? t : b;
                to = last ? last_row : M - t + b;
            } else {
                from = M - t + b;
                to = last ? last_row : b;
            }
            for (int r = std::min(from, to); r <= std::max(from, to); ++r) chain.insert(g.index(r, col, 1, u));
            if (!last) {
                const int hr = down ? b : M - t + b;
                for (int c = col; c <= (s + 1) * t + b; ++c) chain.insert(g.index(hr, c, 0, u));
            }
        }
    }
    for (const auto& p : placed) {
        auto& chain = sets[p.vertex];
        for (int c = p.strip * t; c < (p.strip + 1) * t; ++c) chain.insert(g.index(p.row, c, 0, p.unit));
    }
}

std::vector<Vertex> flatten(std::span<const AncillaGroup> groups) {
    std::vector<Vertex> out;
    std::set<Vertex> seen;
    for (const auto& grp : groups) {
        for (const auto& a : grp.ancillae) {
            if (!seen.insert(a).second) throw EmbeddingError("ancilla " + a.str() + " listed twice");
            out.push_back(a);
        }
    }
    return out;
}

ChainSets to_sets(const Embedding& e) {
    ChainSets sets;
    for (const auto& [v, c] : e.chains) sets[v] = std::set<int>(c.begin(), c.end());
    return sets;
}

[[noreturn]] void capacity_error(const ChimeraGraph& g, int t, int rows) {
    throw CapacityError("layout needs a " + std::to_string(t) + "-cell complete-graph block and " +
                            std::to_string(rows) + " ancilla rows; " + std::to_string(g.rows()) + "x" +
                            std::to_string(g.cols()) + " graph is too small (linear layout needs " +
                            std::to_string(t + rows) + "x" + std::to_string(t) + ")",
                        t + rows, t);
}

Embedding layout(const CompiledProblem& compiled, const ChimeraGraph& graph, bool allow_strips) {
    const int n = compiled.num_variables;
    const auto groups = ancilla_groups(compiled);
    Embedding base = embed_complete_graph(n, graph);
    const auto ancillae = flatten(groups);
    if (ancillae.empty()) {
        base.layout = allow_strips ? "serpentine" : "linear";
        return base;
    }
    const int t = base.block_size;
    const int rows = ceil_div(static_cast<int>(ancillae.size()), 4);
    if (t + rows <= graph.rows() || !allow_strips) {
        Embedding e = extend_chains_with_ancilla_rows(base, groups);
        e.layout = allow_strips ? "serpentine" : "linear";
        return e;
    }
    const int per_inner = graph.rows() - 2 * t;
    const int max_strips = graph.cols() / t;
    int strips = 0;
    if (per_inner > 0) {
        // capacity(S) = (S - 1) * per_inner + (M - t)
        strips = 1 + ceil_div(rows - (graph.rows() - t), per_inner);
    }
    if (strips < 2 || strips > max_strips) capacity_error(graph, t, rows);
    ChainSets sets = to_sets(base);
    route(graph, n, t, strips, ancillae, sets);
    return finish(graph, sets, "serpentine", t, rows, strips);
}

}  // namespace

Embedding embed_complete_graph(int n, const ChimeraGraph& graph) {
    if (n < 0) throw EmbeddingError("negative variable count");
    const int t = ceil_div(n, 4);
    if (t > graph.rows() || t > graph.cols()) {
        throw CapacityError("complete graph on " + std::to_string(n) + " variables needs " + std::to_string(t) + "x" +
                                std::to_string(t) + " cells",
                            t, t);
    }
    ChainSets sets;
    if (n == 1) {
        sets[Vertex::logical(1)].insert(graph.index(0, 0, 1, 0));
    } else {
        for (int i = 0; i < n; ++i) {
            const int b = i / 4, u = i % 4;
            auto& chain = sets[Vertex::logical(i + 1)];
            for (int c = 0; c <= b; ++c) chain.insert(graph.index(b, c, 0, u));
            for (int r = b; r < t; ++r) chain.insert(graph.index(r, b, 1, u));
        }
    }
    return finish(graph, sets, "linear", t, 0, 1);
}

std::vector<AncillaGroup> ancilla_groups(const CompiledProblem& compiled) {
    std::vector<AncillaGroup> out;
    for (const auto& c : compiled.clauses) {
        if (c.ancillae.empty()) continue;
        out.push_back({c.clause_index, c.ancillae, c.logical});
    }
    return out;
}

Embedding extend_chains_with_ancilla_rows(const Embedding& base, std::span<const AncillaGroup> groups) {
    const int n = logical_count(base);
    for (const auto& grp : groups) {
        for (const auto& v : grp.logical) {
            if (!base.chains.count(v)) throw EmbeddingError("gadget logical " + v.str() + " is not embedded");
        }
    }
    const auto ancillae = flatten(groups);
    if (ancillae.empty()) return base;
    const int t = base.block_size;
    const int rows = ceil_div(static_cast<int>(ancillae.size()), 4);
    if (t + rows > base.graph.rows()) capacity_error(base.graph, t, rows);
    ChainSets sets = to_sets(base);
    route(base.graph, n, t, 1, ancillae, sets);
    return finish(base.graph, sets, base.layout, t, rows, 1);
}

std::string_view to_string(Layout layout) { return layout == Layout::Linear ? "linear" : "serpentine"; }

Layout parse_layout(std::string_view text) {
    if (text == "linear") return Layout::Linear;
    if (text == "serpentine") return Layout::Serpentine;
    throw EmbeddingError("unknown layout '" + std::string(text) + "' (expected linear or serpentine)");
}

Embedding linear_layout(const CompiledProblem& compiled, const ChimeraGraph& graph) {
    return layout(compiled, graph, false);
}

Embedding serpentine_layout(const CompiledProblem& compiled, const ChimeraGraph& graph) {
    return layout(compiled, graph, true);
}

Embedding embed_problem(const CompiledProblem& compiled, const ChimeraGraph& graph, Layout l) {
    return l == Layout::Linear ? linear_layout(compiled, graph) : serpentine_layout(compiled, graph);
}

ChimeraGraph minimal_linear_graph(const CompiledProblem& compiled) {
    const int t = std::max(1, ceil_div(compiled.num_variables, 4));
    const int rows = ceil_div(static_cast<int>(compiled.num_ancillae()), 4);
    return ChimeraGraph(t + rows, t);
}

AuditReport audit_embedding(const Embedding& embedding, const IsingModel& model) {
    AuditReport r;
    auto fail = [&](std::string msg) {
        r.ok = false;
        r.problems.push_back(std::move(msg));
    };
    const ChimeraGraph& g = embedding.graph;
    std::map<int, Vertex> owner;
    for (const auto& [v, chain] : embedding.chains) {
        if (chain.empty()) {
            fail("chain of " + v.str() + " is empty");
            continue;
        }
        for (int q : chain) {
            if (!g.contains(q)) {
                fail("chain of " + v.str() + " uses qubit " + std::to_string(q) + " outside the graph");
                continue;
            }
            auto [it, fresh] = owner.emplace(q, v);
            if (!fresh) fail("qubit " + std::to_string(q) + " shared by " + it->second.str() + " and " + v.str());
        }
        // connectivity by BFS inside the chain
        std::set<int> members(chain.begin(), chain.end());
        std::set<int> seen{chain.front()};
        std::queue<int> todo;
        todo.push(chain.front());
        while (!todo.empty()) {
            const int q = todo.front();
            todo.pop();
            if (!g.contains(q)) continue;
            for (int p : g.neighbors(q)) {
                if (members.count(p) && seen.insert(p).second) todo.push(p);
            }
        }
        if (seen.size() != members.size()) fail("chain of " + v.str() + " is disconnected");
    }
    for (const auto& v : model.vertices()) {
        if (!embedding.chains.count(v)) fail("no chain for " + v.str());
    }
    for (const auto& [pair, j] : model.couplings()) {
        if (j == 0) continue;
        auto a = embedding.chains.find(pair.first);
        auto b = embedding.chains.find(pair.second);
        if (a == embedding.chains.end() || b == embedding.chains.end()) continue;
        bool found = false;
        std::set<int> other(b->second.begin(), b->second.end());
        for (int q : a->second) {
            if (!g.contains(q)) continue;
            for (int p : g.neighbors(q)) {
                if (other.count(p)) {
                    found = true;
                    break;
                }
            }
            if (found) break;
        }
        if (!found) fail("no edge between chains of " + pair.first.str() + " and " + pair.second.str());
    }
    return r;
}

PhysicalModel realize(const IsingModel& model, const Embedding& embedding, const GadgetParams& params) {
    const ChimeraGraph& g = embedding.graph;
    PhysicalModel out;
    out.graph = g;
    out.embedding = embedding;
    std::vector<int> owner_of(g.num_vertices(), -1);
    const auto vertices = model.vertices();
    std::map<Vertex, int> vid;
    for (size_t i = 0; i < vertices.size(); ++i) {
        const Vertex v = vertices[i];
        vid[v] = static_cast<int>(i);
        auto it = embedding.chains.find(v);
        if (it == embedding.chains.end() || it->second.empty()) throw EmbeddingError("no chain for " + v.str());
        for (int q : it->second) {
            if (!g.contains(q)) throw EmbeddingError("qubit " + std::to_string(q) + " outside the graph");
            if (owner_of[q] != -1) throw EmbeddingError("qubit " + std::to_string(q) + " is in two chains");
            owner_of[q] = static_cast<int>(i);
        }
    }

    IsingModel& phys = out.model;
    std::vector<double> magnitude(vertices.size(), 0.0);
    for (size_t i = 0; i < vertices.size(); ++i) {
        const auto& chain = embedding.chains.at(vertices[i]);
        const double h = model.field(vertices[i]);
        magnitude[i] += std::fabs(h);
        for (int q : chain) {
            phys.add_vertex(Vertex::physical(q));
            phys.add_field(Vertex::physical(q), h / static_cast<double>(chain.size()));
        }
    }

    std::set<std::pair<int, int>> used;
    for (const auto& [pair, j] : model.couplings()) {
        const auto& ca = embedding.chains.at(pair.first);
        const int target = vid.at(pair.second);
        std::pair<int, int> best{-1, -1};
        for (int q : ca) {
            for (int p : g.neighbors(q)) {
                if (owner_of[p] != target) continue;
                std::pair<int, int> e{std::min(p, q), std::max(p, q)};
                if (best.first < 0 || e < best) best = e;
            }
        }
        if (best.first < 0) {
            if (j == 0) continue;
            throw EmbeddingError("no physical edge for coupling " + pair.first.str() + "-" + pair.second.str());
        }
        phys.add_coupling(Vertex::physical(best.first), Vertex::physical(best.second), j);
        out.placement[pair] = best;
        used.insert(best);
        magnitude[vid.at(pair.first)] += std::fabs(j);
        magnitude[target] += std::fabs(j);
    }

    // Crossings between ancilla chains and logical chains without an
    // abstract coupling stay in the model as explicit zeros.
    for (size_t i = 0; i < vertices.size(); ++i) {
        if (!vertices[i].is_ancilla()) continue;
        for (int q : embedding.chains.at(vertices[i])) {
            for (int p : g.neighbors(q)) {
                if (owner_of[p] < 0 || !vertices[owner_of[p]].is_logical()) continue;
                std::pair<int, int> e{std::min(p, q), std::max(p, q)};
                if (!used.count(e)) phys.add_coupling(Vertex::physical(e.first), Vertex::physical(e.second), 0.0);
            }
        }
    }

    double fallback = model.max_magnitude();
    if (!(fallback > 0)) fallback = 1.0;
    double offset = model.offset();
    for (size_t i = 0; i < vertices.size(); ++i) {
        const auto& chain = embedding.chains.at(vertices[i]);
        const double strength = params.jinf_factor * (magnitude[i] > 0 ? magnitude[i] : fallback);
        out.chain_strength[vertices[i]] = strength;
        for (int q : chain) {
            for (int p : g.neighbors(q)) {
                if (p > q && owner_of[p] == static_cast<int>(i)) {
                    phys.add_coupling(Vertex::physical(q), Vertex::physical(p), -strength);
                    offset += strength;
                }
            }
        }
    }
    phys.set_offset(offset);
    out.constant = 0;
    return out;
}

SpinAssignment expand_assignment(const PhysicalModel& physical, const SpinAssignment& abstract) {
    SpinAssignment out;
    for (const auto& [v, chain] : physical.embedding.chains) {
        auto it = abstract.find(v);
        if (it == abstract.end()) throw EmbeddingError("abstract assignment lacks " + v.str());
        for (int q : chain) out[Vertex::physical(q)] = it->second;
    }
    return out;
}

FidelityReport check_realization(const IsingModel& abstract, const PhysicalModel& physical, int max_spins) {
    const auto vertices = abstract.vertices();
    if (static_cast<int>(vertices.size()) > max_spins) {
        throw CapError("realization check over " + std::to_string(vertices.size()) + " abstract spins exceeds cap " +
                       std::to_string(max_spins));
    }
    FidelityReport r;
    r.checked = true;
    const DenseModel a(abstract, vertices);
    const DenseModel p(physical.model);
    std::vector<std::vector<int>> chain_idx(vertices.size());
    for (size_t i = 0; i < vertices.size(); ++i) {
        for (int q : physical.embedding.chain(vertices[i])) chain_idx[i].push_back(p.index_of(Vertex::physical(q)));
    }
    std::vector<int8_t> sa(a.size(), -1), sp(p.size(), -1);
    double ea = a.energy(sa), ep = p.energy(sp);
    const uint64_t total = uint64_t{1} << vertices.size();
    for (uint64_t step = 0; step < total; ++step) {
        if (step > 0) {
            const int i = std::countr_zero(step);
            ea -= 2.0 * sa[i] * a.local_field(i, sa);
            sa[i] = static_cast<int8_t>(-sa[i]);
            for (int q : chain_idx[i]) {
                ep -= 2.0 * sp[q] * p.local_field(q, sp);
                sp[q] = static_cast<int8_t>(-sp[q]);
            }
            if (step % 4096 == 0) {
                ea = a.energy(sa);
                ep = p.energy(sp);
            }
        }
        r.max_deviation = std::max(r.max_deviation, std::fabs(ep - ea - physical.constant));
        ++r.states;
    }
    return r;
}

QubitBudget count_physical_qubits(const CompiledProblem& compiled, Layout l, const ChimeraGraph* graph) {
    QubitBudget b;
    b.logical = compiled.num_variables;
    b.ancillae = static_cast<int>(compiled.num_ancillae());
    b.clauses = static_cast<int>(compiled.clauses.size());
    double width_sum = 0;
    for (const auto& c : compiled.clauses) {
        width_sum += static_cast<double>(c.logical.size());
        b.max_width = std::max(b.max_width, static_cast<int>(c.logical.size()));
    }
    b.mean_width = b.clauses ? width_sum / b.clauses : 0;
    b.density = b.logical ? static_cast<double>(b.clauses) / b.logical : 0;
    b.mean_ancillae_per_clause = b.clauses ? static_cast<double>(b.ancillae) / b.clauses : 0;
    const ChimeraGraph g = graph ? *graph : minimal_linear_graph(compiled);
    const Embedding e = embed_problem(compiled, g, l);
    b.block_size = e.block_size;
    b.ancilla_rows = e.ancilla_rows;
    b.physical = static_cast<int>(e.num_qubits());
    for (const auto& [v, c] : e.chains) {
        if (!v.is_logical()) continue;
        for (int q : c) {
            if (e.graph.coord(q).row < e.block_size && e.graph.coord(q).col < e.block_size) ++b.block_qubits;
        }
    }
    const double n = b.logical;
    b.ref_linear = n * b.mean_width * b.clauses;
    b.ref_quadratic = n * n * b.mean_width * b.density;
    b.ref_ancilla = n * n * b.density * b.mean_ancillae_per_clause;
    b.ref_worst = std::pow(n, b.max_width + 1);
    return b;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("slope needs at least two points");
    double mx = 0, my = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(x.size());
    double sxy = 0, sxx = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

std::string write_metadata(const PhysicalModel& physical, const CompiledProblem& compiled) {
    using nlohmann::ordered_json;
    ordered_json doc;
    const Embedding& e = physical.embedding;
    doc["graph"] = {{"rows", physical.graph.rows()}, {"cols", physical.graph.cols()}};
    doc["layout"] = e.layout;
    doc["block_size"] = e.block_size;
    doc["ancilla_rows"] = e.ancilla_rows;
    doc["strips"] = e.strips;
    doc["num_variables"] = compiled.num_variables;
    doc["energy_scale"] = compiled.energy_scale;
    doc["constant"] = compiled.constant + physical.constant;
    doc["offset"] = physical.model.offset();
    doc["params"] = {{"Ja", compiled.params.ja},
                     {"g", compiled.params.g},
                     {"q0", compiled.params.q0},
                     {"jinf_factor", compiled.params.jinf_factor}};
    ordered_json chains = ordered_json::array();
    for (const auto& [v, c] : e.chains) {
        auto s = physical.chain_strength.find(v);
        chains.push_back({{"vertex", v.str()},
                          {"qubits", c},
                          {"strength", s == physical.chain_strength.end() ? 0.0 : s->second}});
    }
    doc["chains"] = std::move(chains);
    ordered_json clauses = ordered_json::array();
    for (const auto& c : compiled.clauses) {
        ordered_json item;
        item["index"] = c.clause_index;
        item["kind"] = std::string(to_string(c.kind));
        std::vector<std::string> logical, ancillae, kinds;
        for (const auto& v : c.logical) logical.push_back(v.str());
        for (const auto& v : c.ancillae) ancillae.push_back(v.str());
        for (auto k : c.gadget_kinds) kinds.emplace_back(to_string(k));
        item["logical"] = logical;
        item["gauges"] = c.gauges;
        item["gadgets"] = kinds;
        item["ancillae"] = ancillae;
        item["penalty"] = c.penalty;
        item["verified"] = c.verified;
        item["warnings"] = c.warnings;
        clauses.push_back(std::move(item));
    }
    doc["clauses"] = std::move(clauses);
    return doc.dump(2) + "\n";
}

EmbeddingMetadata parse_metadata(std::string_view text) {
    using nlohmann::json;
    EmbeddingMetadata m;
    try {
        const json doc = json::parse(text);
        m.graph = ChimeraGraph(doc.at("graph").at("rows").get<int>(), doc.at("graph").at("cols").get<int>());
        m.embedding.graph = m.graph;
        m.embedding.layout = doc.at("layout").get<std::string>();
        m.embedding.block_size = doc.at("block_size").get<int>();
        m.embedding.ancilla_rows = doc.at("ancilla_rows").get<int>();
        m.embedding.strips = doc.at("strips").get<int>();
        m.num_variables = doc.at("num_variables").get<int>();
        m.energy_scale = doc.at("energy_scale").get<double>();
        m.constant = doc.at("constant").get<double>();
        for (const auto& c : doc.at("chains")) {
            auto v = Vertex::parse(c.at("vertex").get<std::string>());
            if (!v) throw EmbeddingError("bad vertex in metadata: " + c.at("vertex").get<std::string>());
            auto qubits = c.at("qubits").get<std::vector<int>>();
            for (int q : qubits) {
                if (!m.graph.contains(q)) throw EmbeddingError("metadata qubit out of range");
            }
            m.embedding.chains[*v] = std::move(qubits);
            m.chain_strength[*v] = c.at("strength").get<double>();
        }
    } catch (const json::exception& e) {
        throw EmbeddingError(std::string("malformed metadata: ") + e.what());
    }
    return m;
}

}  // namespace chimera_sat
