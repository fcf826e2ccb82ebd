#include "chimera_sat/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "chimera_sat/text.hpp"

namespace chimera_sat {

namespace fs = std::filesystem;

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys{
        "input", "outdir",  "metadata", "graph",       "layout", "Ja",     "g",           "q0",     "jinf-factor",
        "ratio-min", "seed", "restarts", "sweeps",     "target", "solver", "chain-moves", "timing", "K",
        "p",     "trials",  "permutation", "family",   "sizes",  "r",      "k"};
    return keys;
}

std::map<std::string, std::string> parse_config_text(std::string_view text) {
    std::map<std::string, std::string> out;
    const auto& keys = config_keys();
    std::istringstream in{std::string(text)};
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw UsageError("config line " + std::to_string(number) + ": expected key = value");
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            if (a == std::string::npos) return std::string();
            const auto b = s.find_last_not_of(" \t\r");
            return s.substr(a, b - a + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
            throw UsageError("config line " + std::to_string(number) + ": unknown key '" + key + "'");
        }
        if (!out.emplace(key, value).second) {
            throw UsageError("config line " + std::to_string(number) + ": duplicate key '" + key + "'");
        }
    }
    return out;
}

std::pair<int, int> parse_graph_size(std::string_view text) {
    const auto x = text.find_first_of("xX");
    if (x == std::string_view::npos) throw UsageError("graph size must look like MxN, got '" + std::string(text) + "'");
    const auto m = parse_integer(text.substr(0, x));
    const auto n = parse_integer(text.substr(x + 1));
    if (!m || !n || *m < 1 || *n < 1 || *m > 4096 || *n > 4096) {
        throw UsageError("graph size must look like MxN with positive M and N, got '" + std::string(text) + "'");
    }
    return {static_cast<int>(*m), static_cast<int>(*n)};
}

namespace {

double real_setting(const std::string& key, const std::string& value) {
    auto v = parse_real(value);
    if (!v || !std::isfinite(*v)) throw UsageError(key + ": expected a number, got '" + value + "'");
    return *v;
}

long long int_setting(const std::string& key, const std::string& value, long long lo, long long hi) {
    auto v = parse_integer(value);
    if (!v || *v < lo || *v > hi) {
        throw UsageError(key + ": expected an integer in [" + std::to_string(lo) + ", " + std::to_string(hi) +
                         "], got '" + value + "'");
    }
    return *v;
}

bool bool_setting(const std::string& key, const std::string& value) {
    if (value == "1" || value == "true" || value == "yes" || value == "on") return true;
    if (value == "0" || value == "false" || value == "no" || value == "off") return false;
    throw UsageError(key + ": expected true or false, got '" + value + "'");
}

std::vector<int> int_list(const std::string& key, const std::string& value) {
    std::vector<int> out;
    std::string v = value;
    std::replace(v.begin(), v.end(), ',', ' ');
    for (auto tok : split_whitespace(v)) out.push_back(static_cast<int>(int_setting(key, std::string(tok), 1, 1 << 20)));
    if (out.empty()) throw UsageError(key + ": expected a comma-separated list of integers");
    return out;
}

}  // namespace

RunConfig make_run_config(const std::string& command, const std::map<std::string, std::string>& settings) {
    RunConfig c;
    c.command = command;
    const auto& keys = config_keys();
    for (const auto& [key, value] : settings) {
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) throw UsageError("unknown setting '" + key + "'");
        if (key == "input") {
            c.input = value;
        } else if (key == "outdir") {
            c.outdir = value;
        } else if (key == "metadata") {
            c.metadata = value;
        } else if (key == "graph") {
            std::tie(c.graph_rows, c.graph_cols) = parse_graph_size(value);
        } else if (key == "layout") {
            try {
                c.layout = parse_layout(value);
            } catch (const EmbeddingError& e) {
                throw UsageError(e.what());
            }
        } else if (key == "Ja") {
            c.params.ja = real_setting(key, value);
        } else if (key == "g") {
            c.params.g = real_setting(key, value);
        } else if (key == "q0") {
            c.params.q0 = real_setting(key, value);
        } else if (key == "jinf-factor") {
            c.params.jinf_factor = real_setting(key, value);
        } else if (key == "ratio-min") {
            c.params.ratio_min = real_setting(key, value);
        } else if (key == "seed") {
            auto v = parse_integer(value);
            if (!v || *v < 0) throw UsageError("seed: expected a non-negative integer, got '" + value + "'");
            c.seed = static_cast<uint64_t>(*v);
        } else if (key == "restarts") {
            c.restarts = static_cast<int>(int_setting(key, value, 1, 1 << 16));
        } else if (key == "sweeps") {
            c.sweeps = static_cast<int>(int_setting(key, value, 1, 1 << 26));
        } else if (key == "target") {
            if (value == "abstract") {
                c.target = DecodeTarget::Abstract;
            } else if (value == "embedded") {
                c.target = DecodeTarget::Embedded;
            } else {
                throw UsageError("target: expected abstract or embedded, got '" + value + "'");
            }
        } else if (key == "solver") {
            if (value == "exact") {
                c.exact = true;
            } else if (value == "sa") {
                c.exact = false;
            } else {
                throw UsageError("solver: expected exact or sa, got '" + value + "'");
            }
        } else if (key == "chain-moves") {
            c.chain_moves = bool_setting(key, value);
        } else if (key == "timing") {
            c.timing = bool_setting(key, value);
        } else if (key == "K") {
            c.turbo_k = static_cast<int>(int_setting(key, value, 1, 62));
        } else if (key == "p") {
            c.turbo_p = real_setting(key, value);
            if (!(c.turbo_p > 0 && c.turbo_p < 0.5)) throw UsageError("p: must lie in (0, 1/2)");
        } else if (key == "trials") {
            c.trials = static_cast<int>(int_setting(key, value, 1, 1 << 24));
        } else if (key == "permutation") {
            c.permutation = int_list(key, value);
        } else if (key == "family") {
            if (value != "maxsat" && value != "turbo") throw UsageError("family: expected maxsat or turbo");
            c.family = value;
        } else if (key == "sizes") {
            c.sizes = int_list(key, value);
        } else if (key == "r") {
            c.density = real_setting(key, value);
            if (!(c.density > 0)) throw UsageError("r: must be positive");
        } else if (key == "k") {
            c.width = static_cast<int>(int_setting(key, value, 1, 16));
        }
    }
    if (!(c.params.ja > 0) || !(c.params.g > 0) || !(c.params.q0 > 0) || !(c.params.jinf_factor > 0) ||
        !(c.params.ratio_min > 0)) {
        throw UsageError("Ja, g, q0, jinf-factor and ratio-min must be positive");
    }
    if (!c.permutation.empty() && static_cast<int>(c.permutation.size()) != c.turbo_k) {
        throw UsageError("permutation must list K entries");
    }
    return c;
}

void write_file_atomic(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot write " + tmp.string());
        f << content;
        f.flush();
        if (!f) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw UsageError("cannot read " + path.string());
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

namespace {

Problem load_problem(const RunConfig& config) {
    if (config.input.empty()) throw UsageError("--input is required");
    return parse_wcnf(read_file(config.input));
}

CompileOptions compile_options(const RunConfig& config) {
    CompileOptions o;
    o.params = config.params;
    return o;
}

ChimeraGraph graph_for(const RunConfig& config, const CompiledProblem& compiled) {
    if (config.graph_rows > 0) return ChimeraGraph(config.graph_rows, config.graph_cols);
    return minimal_linear_graph(compiled);
}

AnnealOptions anneal_options(const RunConfig& config, double g) {
    AnnealOptions a;
    a.g = g;
    a.restarts = config.restarts;
    a.seed = config.seed;
    a.schedule.sweeps = config.sweeps;
    return a;
}

void print_warnings(const CompiledProblem& compiled, std::ostream& err) {
    for (const auto& c : compiled.clauses) {
        for (const auto& w : c.warnings) err << "clause " << c.clause_index << ": " << w << "\n";
    }
}

}  // namespace

int cmd_compile(const RunConfig& config, std::ostream& out, std::ostream& err) {
    const Problem problem = load_problem(config);
    const CompiledProblem compiled = compile_problem(problem, compile_options(config));
    print_warnings(compiled, err);
    const ChimeraGraph graph = graph_for(config, compiled);
    const Embedding embedding = embed_problem(compiled, graph, config.layout);
    const AuditReport audit = audit_embedding(embedding, compiled.model);
    if (!audit.ok) {
        err << "embedding audit failed: " << audit.problems.front() << "\n";
        return kExitFailure;
    }
    const PhysicalModel physical = realize(compiled.model, embedding, compiled.params);
    write_file_atomic(config.outdir / "abstract.ising", write_ising_text(compiled.model));
    write_file_atomic(config.outdir / "physical.ising", write_ising_text(physical.model));
    write_file_atomic(config.outdir / "embedding.json", write_metadata(physical, compiled));
    out << "variables " << compiled.num_variables << "\n";
    out << "clauses " << compiled.clauses.size() << "\n";
    out << "ancillae " << compiled.num_ancillae() << "\n";
    out << "graph " << graph.rows() << "x" << graph.cols() << "\n";
    out << "layout " << embedding.layout << "\n";
    out << "cells_used " << [&] {
        std::set<std::pair<int, int>> cells;
        for (const auto& [v, chain] : embedding.chains) {
            for (int q : chain) cells.emplace(graph.coord(q).row, graph.coord(q).col);
        }
        return cells.size();
    }() << "\n";
    out << "qubits " << embedding.num_qubits() << "\n";
    return kExitOk;
}

int cmd_verify(const RunConfig& config, std::ostream& out, std::ostream& err) {
    const Problem problem = load_problem(config);
    std::ostringstream report;
    bool pass = true;
    const CompileOptions options = compile_options(config);
    CompiledProblem compiled;
    try {
        compiled = compile_problem(problem, options);
    } catch (const GadgetError& e) {
        report << "FAIL " << e.what() << "\n";
        out << report.str();
        err << e.what() << "\n";
        if (!config.outdir.empty()) write_file_atomic(config.outdir / "verify_report.txt", report.str());
        return kExitFailure;
    }
    for (const auto& c : compiled.clauses) {
        report << "clause " << c.clause_index << ' ' << to_string(c.kind) << " gadgets";
        for (auto k : c.gadget_kinds) report << ' ' << to_string(k);
        report << " ancillae " << c.ancillae.size() << ' ' << (c.verified ? "verified" : "unverified") << "\n";
        if (!c.verified) {
            pass = false;
            err << "clause " << c.clause_index << ": gadget too large to verify exhaustively\n";
        }
    }
    // Superposition: the reduced spectrum of the whole model against the
    // weighted clause count.
    const int n = compiled.num_variables;
    if (n > kDefaultEnumerationCap) {
        report << "superposition skipped: " << n << " variables exceeds the enumeration cap\n";
        pass = false;
    } else {
        const auto logical = compiled.logical();
        const Spectrum spec = reduced_spectrum(compiled.model, logical);
        double worst = 0;
        for (uint64_t a = 0; a < spec.size(); ++a) {
            const double want = compiled.energy_scale * problem_energy(problem, a) + compiled.constant;
            worst = std::max(worst, std::fabs(spec.energy[a] - want));
        }
        const double tol = 1e-9 * std::max(1.0, compiled.model.max_magnitude());
        report << "superposition max_deviation " << format_real(worst) << (worst <= tol ? " ok" : " FAIL") << "\n";
        if (worst > tol) pass = false;
    }
    report << (pass ? "PASS" : "FAIL") << "\n";
    out << report.str();
    write_file_atomic(config.outdir / "verify_report.txt", report.str());
    return pass ? kExitOk : kExitFailure;
}

int cmd_solve(const RunConfig& config, std::ostream& out, std::ostream& err) {
    if (config.input.empty()) throw UsageError("--input is required");
    SolveReport report;
    report.include_timing = config.timing;
    SolveResult result;
    DecodeResult decoded;
    ExactOptions exact;
    if (config.input.extension() == ".ising") {
        const IsingModel model = parse_ising_text(read_file(config.input));
        std::optional<EmbeddingMetadata> meta;
        if (!config.metadata.empty()) meta = parse_metadata(read_file(config.metadata));
        AnnealOptions anneal = anneal_options(config, meta ? meta->energy_scale : GadgetParams{}.g);
        if (meta && config.chain_moves) anneal.clusters = chain_clusters(meta->embedding);
        result = config.exact ? solve_exact(model, exact) : solve_sa(model, anneal);
        if (meta) {
            decoded = decode(result.assignment(), meta->embedding);
            report.decoded = &decoded;
            report.num_variables = meta->num_variables;
        }
    } else {
        const Problem problem = load_problem(config);
        const CompiledProblem compiled = compile_problem(problem, compile_options(config));
        print_warnings(compiled, err);
        AnnealOptions anneal = anneal_options(config, compiled.energy_scale);
        if (config.target == DecodeTarget::Abstract) {
            result = config.exact ? solve_exact(compiled.model, exact) : solve_sa(compiled.model, anneal);
        } else {
            const ChimeraGraph graph = graph_for(config, compiled);
            const Embedding embedding = embed_problem(compiled, graph, config.layout);
            const PhysicalModel physical = realize(compiled.model, embedding, compiled.params);
            if (config.chain_moves) anneal.clusters = chain_clusters(embedding);
            result = config.exact ? solve_exact(physical.model, exact) : solve_sa(physical.model, anneal);
            decoded = decode(result.assignment(), embedding);
            report.decoded = &decoded;
        }
        report.num_variables = problem.num_variables();
        const SpinAssignment spins = report.decoded ? decoded.abstract : result.assignment();
        report.problem_energy = problem_energy(problem, logical_assignment(spins, problem.num_variables()));
        report.has_problem_energy = true;
    }
    report.result = &result;
    const std::string text = write_solve_report(report);
    write_file_atomic(config.outdir / "solve_report.txt", text);
    out << text;
    if (report.decoded && !decoded.broken.empty()) err << decoded.broken.size() << " broken chain(s)\n";
    return kExitOk;
}

int cmd_turbo(const RunConfig& config, std::ostream& out, std::ostream&) {
    const TurboCode code = config.permutation.empty() ? TurboCode::random(config.turbo_k, config.seed)
                                                      : TurboCode::with_permutation(config.permutation);
    const Channel channel(config.turbo_p);
    TurboSolverConfig solver;
    solver.target = config.target;
    solver.exact = config.exact;
    solver.compile = compile_options(config);
    solver.anneal = anneal_options(config, config.params.g);
    solver.layout = config.layout;
    solver.chain_moves = config.chain_moves;
    solver.graph_rows = config.graph_rows;
    solver.graph_cols = config.graph_cols;
    std::vector<TurboTrial> trials;
    int agree = 0, oracle = 0, errors = 0, broken = 0;
    for (int t = 0; t < config.trials; ++t) {
        trials.push_back(run_turbo_trial(code, channel, config.seed + static_cast<uint64_t>(t), solver));
        const auto& r = trials.back();
        oracle += r.oracle_available;
        agree += r.oracle_available && r.agrees;
        errors += r.bit_errors;
        broken += r.broken_chains > 0;
    }
    std::ostringstream summary;
    summary << "K " << code.K << "\n";
    summary << "permutation";
    for (int v : code.permutation) summary << ' ' << v;
    summary << "\n";
    summary << "p " << format_real(channel.p) << "\n";
    summary << "f " << format_real(channel.f()) << "\n";
    summary << "trials " << trials.size() << "\n";
    summary << "agreement " << agree << " " << oracle << "\n";
    summary << "bit_errors " << errors << "\n";
    summary << "trials_with_broken_chains " << broken << "\n";
    write_file_atomic(config.outdir / "turbo_trials.txt", write_trial_log(trials));
    write_file_atomic(config.outdir / "turbo_summary.txt", summary.str());
    out << summary.str();
    return kExitOk;
}

int cmd_stats(const RunConfig& config, std::ostream& out, std::ostream&) {
    const ScalingTable table =
        scaling_table(config.family, config.sizes, config.density, config.width, config.seed, config.params);
    const std::string text = write_scaling_table(table, config.family);
    write_file_atomic(config.outdir / "stats.txt", text);
    out << text;
    return kExitOk;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Compile weighted max-SAT problems to Chimera Ising models, solve and decode them"};
    app.require_subcommand(1);
    std::map<std::string, std::string> flags;
    std::string config_path;
    const std::vector<std::pair<std::string, std::string>> options{
        {"input", "input problem (.wcnf) or model (.ising)"},
        {"outdir", "directory for output files"},
        {"metadata", "embedding metadata for decoding a physical .ising input"},
        {"graph", "Chimera size MxN"},
        {"layout", "linear or serpentine"},
        {"Ja", "ancilla coupling scale"},
        {"g", "penalty per violated clause of unit weight"},
        {"q0", "ancilla field shift"},
        {"jinf-factor", "chain strength multiplier"},
        {"ratio-min", "required ratio for g, q0 << Ja"},
        {"seed", "random seed"},
        {"restarts", "annealing restarts"},
        {"sweeps", "annealing sweeps"},
        {"target", "abstract or embedded"},
        {"solver", "exact or sa"},
        {"chain-moves", "annealer may flip whole chains (true/false)"},
        {"timing", "include timings in reports (true/false)"},
        {"K", "turbo message length"},
        {"p", "channel flip probability"},
        {"trials", "turbo trials"},
        {"permutation", "turbo permutation p(1),...,p(K)"},
        {"family", "stats family: maxsat or turbo"},
        {"sizes", "stats sizes, comma separated"},
        {"r", "stats clause density"},
        {"k", "stats clause width"},
    };
    const std::vector<std::string> commands{"compile", "verify", "solve", "turbo", "stats"};
    for (const auto& name : commands) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "key=value config file");
        for (const auto& [key, help] : options) sub->add_option("--" + key, flags[key], help);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }
    std::string command;
    for (const auto& name : commands) {
        if (app.got_subcommand(name)) command = name;
    }
    CLI::App* sub = app.get_subcommand(command);
    try {
        std::map<std::string, std::string> settings;
        if (!config_path.empty()) settings = parse_config_text(read_file(config_path));
        for (const auto& [key, help] : options) {
            if (sub->count("--" + key) > 0) settings[key] = flags[key];
        }
        const RunConfig config = make_run_config(command, settings);
        if (command == "compile") return cmd_compile(config, out, err);
        if (command == "verify") return cmd_verify(config, out, err);
        if (command == "solve") return cmd_solve(config, out, err);
        if (command == "turbo") return cmd_turbo(config, out, err);
        return cmd_stats(config, out, err);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const CapacityError& e) {
        err << "capacity error: " << e.what() << "\n";
        return kExitCapacity;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return kExitFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}

Problem random_max_ksat(int n, int clauses, int k, uint64_t seed) {
    if (k > n) throw ProblemError("clause width exceeds variable count");
    std::mt19937_64 rng(seed);
    Problem p(n);
    std::vector<int> vars(n);
    for (int c = 0; c < clauses; ++c) {
        for (int i = 0; i < n; ++i) vars[i] = i + 1;
        std::vector<Literal> lits;
        for (int j = 0; j < k; ++j) {
            const int pick = j + static_cast<int>(rng() % static_cast<uint64_t>(n - j));
            std::swap(vars[j], vars[pick]);
            lits.push_back(Literal{vars[j], (rng() & 1) != 0});
        }
        p.add_clause(Clause::make_or(std::move(lits)));
    }
    return p;
}

Problem turbo_family_problem(int K, uint64_t seed) {
    const TurboCode code = TurboCode::random(K, seed);
    const Word message(K, 1);
    return build_decoding_problem(code, encode(code, message), Channel(0.1)).problem;
}

ScalingTable scaling_table(const std::string& family, const std::vector<int>& sizes, double density, int width,
                           uint64_t seed, const GadgetParams& params) {
    ScalingTable t;
    CompileOptions options;
    options.params = params;
    // Counting does not need the per-gadget spectrum check.
    options.verify_cap = 0;
    std::vector<double> xs, ys;
    for (int n : sizes) {
        Problem p = family == "turbo"
                        ? turbo_family_problem(n, seed)
                        : random_max_ksat(n, static_cast<int>(std::lround(density * n)), width, seed + static_cast<uint64_t>(n));
        const CompiledProblem compiled = compile_problem(p, options);
        ScalingRow row;
        row.size = n;
        row.budget = count_physical_qubits(compiled, Layout::Linear);
        t.rows.push_back(row);
        xs.push_back(n);
        ys.push_back(row.budget.physical);
    }
    if (xs.size() >= 2) t.slope = loglog_slope(xs, ys);
    return t;
}

std::string write_scaling_table(const ScalingTable& table, const std::string& family) {
    std::ostringstream out;
    out << "# family " << family << "\n";
    out << "# n clauses ancillae block_qubits ancilla_rows physical ref_n<k>c ref_n^2<k>r ref_n^2r<Nanc> ref_n^(k+1)\n";
    for (const auto& r : table.rows) {
        const auto& b = r.budget;
        out << r.size << ' ' << b.clauses << ' ' << b.ancillae << ' ' << b.block_qubits << ' ' << b.ancilla_rows << ' '
            << b.physical << ' ' << format_real(b.ref_linear) << ' ' << format_real(b.ref_quadratic) << ' '
            << format_real(b.ref_ancilla) << ' ' << format_real(b.ref_worst) << "\n";
    }
    out << "slope " << format_real(table.slope) << "\n";
    return out.str();
}

}  // namespace chimera_sat
