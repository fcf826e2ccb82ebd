#include "chimera_sat/gadgets.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>

#include "chimera_sat/text.hpp"

namespace chimera_sat {

GadgetParams GadgetParams::with_penalty(double g) {
    GadgetParams p;
    p.g = g;
    p.q0 = 0.3 * (g / 0.2);
    return p;
}

GadgetParams GadgetParams::scaled(double factor) const {
    GadgetParams p = *this;
    p.ja *= factor;
    p.g *= factor;
    p.q0 *= factor;
    return p;
}

std::string_view to_string(GadgetKind kind) {
    switch (kind) {
        case GadgetKind::Native:
            return "native";
        case GadgetKind::Or:
            return "or";
        case GadgetKind::Parity:
            return "parity";
        case GadgetKind::Symmetric:
            return "symmetric";
        case GadgetKind::And:
            return "and";
        case GadgetKind::Parity3:
            return "parity3";
    }
    return "?";
}

GadgetSite GadgetSite::standard(int k) {
    GadgetSite s;
    for (int i = 1; i <= k; ++i) s.logical.push_back(Vertex::logical(i));
    return s;
}

double Gadget::ideal(uint64_t logical_mask) const {
    uint64_t negations = 0;
    for (size_t i = 0; i < gauges.size(); ++i) {
        if (gauges[i] < 0) negations |= uint64_t{1} << i;
    }
    const uint64_t all = gauges.size() >= 64 ? ~uint64_t{0} : (uint64_t{1} << gauges.size()) - 1;
    return ideal_by_count[std::popcount((logical_mask ^ negations) & all)];
}

std::vector<double> Gadget::ideal_spectrum() const {
    if (width() > kDefaultSpinCap) throw CapError("gadget too wide to tabulate");
    std::vector<double> out(size_t{1} << width());
    for (uint64_t a = 0; a < out.size(); ++a) out[a] = ideal(a);
    return out;
}

namespace {

constexpr double kTolerance = 1e-9;

double tolerance_for(double g) { return kTolerance * std::max(1.0, std::fabs(g)); }

void check_gauges(const std::vector<int>& gauges) {
    if (gauges.empty()) throw GadgetError("gadget needs at least one literal");
    for (int c : gauges) {
        if (c != 1 && c != -1) throw GadgetError("gauges must be +1 or -1");
    }
}

GadgetSite resolve_site(const GadgetSite& site, int k) {
    if (site.logical.empty()) {
        GadgetSite s = GadgetSite::standard(k);
        s.clause_index = site.clause_index;
        s.ancilla_base = site.ancilla_base;
        return s;
    }
    if (static_cast<int>(site.logical.size()) != k) {
        throw GadgetError("gadget site has " + std::to_string(site.logical.size()) + " logical vertices, expected " +
                          std::to_string(k));
    }
    return site;
}

void check_basic(const GadgetParams& p) {
    if (!(p.ja > 0) || !(p.g > 0) || !(p.ratio_min > 0)) {
        throw GadgetError("gadget parameters must satisfy ja > 0, g > 0, ratio_min > 0");
    }
    if (p.g > p.ja / p.ratio_min * (1 + kTolerance)) {
        throw GadgetError("penalty g = " + format_real(p.g) + " exceeds ja/ratio_min = " +
                          format_real(p.ja / p.ratio_min));
    }
}

void check_shifted(const GadgetParams& p) {
    check_basic(p);
    if (!(p.q0 > p.g / 2)) {
        throw GadgetError("q0 = " + format_real(p.q0) + " must exceed g/2 = " + format_real(p.g / 2));
    }
    if (p.q0 > p.ja / p.ratio_min * (1 + kTolerance)) {
        throw GadgetError("q0 = " + format_real(p.q0) + " exceeds ja/ratio_min = " + format_real(p.ja / p.ratio_min));
    }
}

// Minimum over the non-logical vertices, which must not couple to each other.
double closed_form_energy(const IsingModel& model, const std::vector<Vertex>& logical, const std::vector<int>& spins) {
    SpinAssignment fixed;
    for (size_t i = 0; i < logical.size(); ++i) fixed[logical[i]] = spins[i];
    double e = model.offset();
    std::map<Vertex, double> free_field;
    for (const auto& [v, h] : model.fields()) {
        auto it = fixed.find(v);
        if (it != fixed.end()) {
            e += h * it->second;
        } else {
            free_field[v] += h;
        }
    }
    for (const auto& [pair, j] : model.couplings()) {
        auto a = fixed.find(pair.first);
        auto b = fixed.find(pair.second);
        if (a != fixed.end() && b != fixed.end()) {
            e += j * a->second * b->second;
        } else if (a != fixed.end()) {
            free_field[pair.second] += j * a->second;
        } else if (b != fixed.end()) {
            free_field[pair.first] += j * b->second;
        } else if (j != 0) {
            throw GadgetError("closed-form minimization needs independent ancillae");
        }
    }
    for (const auto& [v, f] : free_field) e -= std::fabs(f);
    return e;
}

// Reduced energy for each gauged-true count m (w.r.t. `gauges`), using the
// representative assignment with the first m literals true.
std::vector<double> count_profile(const IsingModel& model, const std::vector<Vertex>& logical,
                                  const std::vector<int>& gauges) {
    const int k = static_cast<int>(logical.size());
    std::vector<double> out(k + 1);
    std::vector<int> spins(k);
    for (int m = 0; m <= k; ++m) {
        for (int i = 0; i < k; ++i) spins[i] = i < m ? gauges[i] : -gauges[i];
        out[m] = closed_form_energy(model, logical, spins);
    }
    return out;
}

void normalize_offset(Gadget& gadget) {
    auto profile = count_profile(gadget.model, gadget.logical, gadget.realized_gauges);
    const double lowest = *std::min_element(profile.begin(), profile.end());
    gadget.model.add_offset(-lowest);
}

// Logical complete graph plus a bank of k ancillae, the common wiring of the
// OR, parity and symmetric gadgets. q holds q_1..q_k.
IsingModel ancilla_bank(const GadgetSite& site, const std::vector<int>& c, double ja, double logical_field,
                        const std::vector<double>& q) {
    const int k = static_cast<int>(c.size());
    IsingModel m;
    for (int i = 0; i < k; ++i) {
        m.add_vertex(site.logical[i]);
        m.add_field(site.logical[i], logical_field * c[i]);
    }
    for (int i = 0; i < k; ++i) {
        for (int j = i + 1; j < k; ++j) {
            m.add_coupling(site.logical[i], site.logical[j], ja * c[i] * c[j]);
        }
    }
    for (int j = 1; j <= k; ++j) {
        const Vertex a = Vertex::ancilla(site.clause_index, site.ancilla_base + j);
        m.add_vertex(a);
        m.add_field(a, -ja * (2 * j - k) + q[j - 1]);
        for (int i = 0; i < k; ++i) {
            m.add_coupling(site.logical[i], a, ja * c[i]);
        }
    }
    return m;
}

std::vector<Vertex> bank_ancillae(const GadgetSite& site, int count) {
    std::vector<Vertex> out;
    for (int j = 1; j <= count; ++j) out.push_back(Vertex::ancilla(site.clause_index, site.ancilla_base + j));
    return out;
}

Gadget base_gadget(GadgetKind kind, const std::vector<int>& gauges, const GadgetParams& params,
                   const GadgetSite& site) {
    Gadget g;
    g.kind = kind;
    g.logical = site.logical;
    g.gauges = gauges;
    g.realized_gauges = gauges;
    g.penalty = params.g;
    g.params = params;
    return g;
}

std::vector<double> parity_counts(int k, Parity desired, double g) {
    std::vector<double> ideal(k + 1);
    const int want = desired == Parity::Odd ? 1 : 0;
    for (int m = 0; m <= k; ++m) ideal[m] = (m % 2 == want) ? 0.0 : g;
    return ideal;
}

}  // namespace

Gadget build_or_gadget(const std::vector<int>& gauges, const GadgetParams& params, const GadgetSite& site_in) {
    check_gauges(gauges);
    check_basic(params);
    const int k = static_cast<int>(gauges.size());
    const GadgetSite site = resolve_site(site_in, k);
    std::vector<double> q(k, 0.0);
    q[0] = params.g / 2;
    Gadget g = base_gadget(GadgetKind::Or, gauges, params, site);
    g.model = ancilla_bank(site, gauges, params.ja, -params.ja, q);
    g.ancillae = bank_ancillae(site, k);
    g.ideal_by_count.assign(k + 1, 0.0);
    g.ideal_by_count[0] = params.g;
    normalize_offset(g);
    return g;
}

Gadget build_parity_gadget(const std::vector<int>& gauges, Parity desired, const GadgetParams& params,
                           const GadgetSite& site_in) {
    check_gauges(gauges);
    check_shifted(params);
    const int k = static_cast<int>(gauges.size());
    const GadgetSite site = resolve_site(site_in, k);
    Gadget g = base_gadget(GadgetKind::Parity, gauges, params, site);
    // The wiring below is satisfied when k - m is odd, i.e. m has the
    // parity of k + 1. The other parity is one gauge flip away.
    const Parity native = (k + 1) % 2 == 1 ? Parity::Odd : Parity::Even;
    if (native != desired) g.realized_gauges[0] = -g.realized_gauges[0];
    std::vector<double> q(k);
    for (int j = 1; j <= k; ++j) {
        q[j - 1] = (k - j) % 2 == 1 ? params.q0 + params.g / 2 : params.q0 - params.g / 2;
    }
    g.model = ancilla_bank(site, g.realized_gauges, params.ja, params.q0 - params.ja, q);
    g.ancillae = bank_ancillae(site, k);
    g.ideal_by_count = parity_counts(k, desired, params.g);
    normalize_offset(g);
    return g;
}

Gadget build_symmetric_gadget(const std::vector<int>& gauges, const std::vector<bool>& penalized,
                              const GadgetParams& params, const GadgetSite& site_in) {
    check_gauges(gauges);
    const int k = static_cast<int>(gauges.size());
    if (static_cast<int>(penalized.size()) != k + 1) {
        throw GadgetError("symmetric profile must have k+1 entries");
    }
    if (std::all_of(penalized.begin(), penalized.end(), [&](bool p) { return p == penalized[0]; })) {
        throw GadgetError("constant symmetric profile is an energy offset, not a clause");
    }
    check_shifted(params);
    const GadgetSite site = resolve_site(site_in, k);
    Gadget g = base_gadget(GadgetKind::Symmetric, gauges, params, site);
    auto f = [&](int m) { return penalized[m] ? params.g / 2 : 0.0; };
    std::vector<double> q(k);
    for (int j = 1; j <= k; ++j) q[j - 1] = params.q0 + f(j - 1) - f(j);
    g.model = ancilla_bank(site, gauges, params.ja, params.q0 - params.ja, q);
    g.ancillae = bank_ancillae(site, k);
    g.ideal_by_count.resize(k + 1);
    for (int m = 0; m <= k; ++m) g.ideal_by_count[m] = 2 * f(m);
    normalize_offset(g);
    return g;
}

Gadget build_and_gadget(const std::vector<int>& gauges, const GadgetParams& params, const GadgetSite& site_in,
                        const AndSearchOptions& search) {
    check_gauges(gauges);
    check_basic(params);
    const int k = static_cast<int>(gauges.size());
    if (k < 2) throw GadgetError("AND gadget needs at least two literals");
    const GadgetSite site = resolve_site(site_in, k);
    const Vertex anc = Vertex::ancilla(site.clause_index, site.ancilla_base + 1);
    const double tol = tolerance_for(params.g);

    auto candidate = [&](double h, double ancilla_field, double logical_coupling) {
        IsingModel m;
        for (int i = 0; i < k; ++i) {
            m.add_vertex(site.logical[i]);
            m.add_field(site.logical[i], h * gauges[i]);
        }
        if (logical_coupling != 0) {
            for (int i = 0; i < k; ++i) {
                for (int j = i + 1; j < k; ++j) {
                    m.add_coupling(site.logical[i], site.logical[j], logical_coupling * gauges[i] * gauges[j]);
                }
            }
        }
        m.add_vertex(anc);
        m.add_field(anc, ancilla_field);
        for (int i = 0; i < k; ++i) m.add_coupling(site.logical[i], anc, -h * gauges[i]);
        return m;
    };

    // Realized gap when the spectrum is flat over violating assignments and
    // the satisfying assignment lies below it; nullopt otherwise.
    auto score = [&](const IsingModel& m) -> std::optional<double> {
        std::vector<double> sat, viol;
        if (k + 1 <= 20) {
            auto spec = reduced_spectrum(m, site.logical);
            uint64_t target = 0;
            for (int i = 0; i < k; ++i) {
                if (gauges[i] > 0) target |= uint64_t{1} << i;
            }
            for (uint64_t a = 0; a < spec.size(); ++a) {
                (a == target ? sat : viol).push_back(spec.energy[a]);
            }
        } else {
            auto prof = count_profile(m, site.logical, gauges);
            sat.push_back(prof[k]);
            viol.assign(prof.begin(), prof.end() - 1);
        }
        auto [lo, hi] = std::minmax_element(viol.begin(), viol.end());
        if (*hi - *lo > tol) return std::nullopt;
        const double gap = *lo - sat[0];
        if (gap < search.gap_fraction * params.g) return std::nullopt;
        return gap;
    };

    for (double mag : search.magnitudes) {
        for (int hsign : {-1, +1}) {
            for (int variant = 0; variant < 2; ++variant) {
                for (double coup : search.couplings) {
                    const double h = hsign * mag * params.ja;
                    // Variant 0 is h_a = -h k - g/2 as stated with J^a = -h;
                    // variant 1 is the same ancilla read with opposite sign.
                    const double ha = variant == 0 ? -h * k - params.g / 2 : h * k + params.g / 2;
                    const double jll = coup * mag * params.ja;
                    IsingModel m = candidate(h, ha, jll);
                    auto gap = score(m);
                    if (!gap) continue;
                    Gadget g = base_gadget(GadgetKind::And, gauges, params, site);
                    m.scale(params.g / *gap);
                    g.model = std::move(m);
                    g.ancillae = {anc};
                    g.ideal_by_count.assign(k + 1, params.g);
                    g.ideal_by_count[k] = 0;
                    g.single_ancilla = true;
                    std::ostringstream note;
                    note << "single ancilla: h=" << format_real(h) << " J^a=" << format_real(-h)
                         << " h_a=" << format_real(ha) << " J=" << format_real(jll) << " gap "
                         << format_real(*gap) << " rescaled to g";
                    g.note = note.str();
                    normalize_offset(g);
                    return g;
                }
            }
        }
    }

    std::vector<bool> penalized(k + 1, true);
    penalized[k] = false;
    Gadget g = build_symmetric_gadget(gauges, penalized, params, site);
    g.single_ancilla = false;
    g.note = "no single-ancilla candidate reproduced the AND spectrum; using the k-ancilla symmetric gadget";
    return g;
}

IsingModel raw_parity3_model(const std::vector<int>& gauges, double coupling, double field, const GadgetSite& site_in) {
    check_gauges(gauges);
    if (gauges.size() != 3) throw GadgetError("3-bit parity gadget needs exactly three literals");
    const GadgetSite site = resolve_site(site_in, 3);
    IsingModel m;
    const Vertex anc = Vertex::ancilla(site.clause_index, site.ancilla_base + 1);
    for (int i = 0; i < 3; ++i) {
        m.add_vertex(site.logical[i]);
        m.add_field(site.logical[i], field * gauges[i]);
    }
    for (int i = 0; i < 3; ++i) {
        for (int j = i + 1; j < 3; ++j) {
            m.add_coupling(site.logical[i], site.logical[j], coupling * gauges[i] * gauges[j]);
        }
    }
    m.add_vertex(anc);
    m.add_field(anc, 2 * field);
    for (int i = 0; i < 3; ++i) m.add_coupling(site.logical[i], anc, 2 * coupling * gauges[i]);
    return m;
}

Gadget build_parity3_gadget(const std::vector<int>& gauges, Parity desired, const GadgetParams& params,
                            const GadgetSite& site_in) {
    check_gauges(gauges);
    check_basic(params);
    if (gauges.size() != 3) throw GadgetError("3-bit parity gadget needs exactly three literals");
    const double h = params.g;
    // Both levels stay flat only while the ancilla coupling dominates 2|h|.
    if (!(params.ja > 2 * std::fabs(h))) {
        throw GadgetError("3-bit parity gadget needs ja > 2|h|, got ja = " + format_real(params.ja) +
                          ", h = " + format_real(h));
    }
    const GadgetSite site = resolve_site(site_in, 3);
    Gadget g = base_gadget(GadgetKind::Parity3, gauges, params, site);
    // With all gauges +1 the wiring favors an even number of true literals.
    if (desired == Parity::Odd) g.realized_gauges[0] = -g.realized_gauges[0];
    g.model = raw_parity3_model(g.realized_gauges, params.ja / 2, h, site);
    auto prof = count_profile(g.model, g.logical, g.realized_gauges);
    const auto [lo, hi] = std::minmax_element(prof.begin(), prof.end());
    g.model.scale(params.g / (*hi - *lo));
    g.ancillae = {Vertex::ancilla(site.clause_index, site.ancilla_base + 1)};
    g.ideal_by_count = parity_counts(3, desired, params.g);
    normalize_offset(g);
    return g;
}

std::vector<Gadget> build_table_gadget(const std::vector<uint64_t>& violating, const std::vector<int>& gauges,
                                       const GadgetParams& params, const GadgetSite& site_in) {
    check_gauges(gauges);
    const int k = static_cast<int>(gauges.size());
    if (k > kDefaultSpinCap) throw GadgetError("table gadget too wide");
    const uint64_t total = uint64_t{1} << k;
    std::vector<uint64_t> rows = violating;
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    if (rows.empty() || rows.size() >= total || rows.back() >= total) {
        throw GadgetError("table violating set must be a nonempty proper subset of k-bit rows");
    }
    const GadgetSite site = resolve_site(site_in, k);
    std::vector<Gadget> out;
    for (size_t r = 0; r < rows.size(); ++r) {
        std::vector<int> sub(k);
        for (int i = 0; i < k; ++i) sub[i] = ((rows[r] >> i) & 1) ? -gauges[i] : gauges[i];
        GadgetSite s = site;
        s.ancilla_base = site.ancilla_base + static_cast<int>(r) * k;
        out.push_back(build_or_gadget(sub, params, s));
    }
    return out;
}

Gadget build_native_gadget(const std::vector<int>& gauges, const std::vector<bool>& penalized,
                           const GadgetParams& params, const GadgetSite& site_in) {
    check_gauges(gauges);
    const int k = static_cast<int>(gauges.size());
    if (static_cast<int>(penalized.size()) != k + 1) throw GadgetError("profile must have k+1 entries");
    if (!(params.g > 0)) throw GadgetError("penalty must be positive");
    const GadgetSite site = resolve_site(site_in, k);
    Gadget g = base_gadget(GadgetKind::Native, gauges, params, site);
    const double half = params.g / 2;
    if (k == 1 && penalized[0] != penalized[1]) {
        // penalty g when the literal takes the penalized value
        const int sign = penalized[0] ? -1 : +1;
        g.model.add_vertex(site.logical[0]);
        g.model.add_field(site.logical[0], sign * half * gauges[0]);
        g.model.set_offset(half);
    } else if (k == 2 && penalized[0] == penalized[2] && penalized[0] != penalized[1]) {
        const int sign = penalized[0] ? +1 : -1;
        g.model.add_coupling(site.logical[0], site.logical[1], sign * half * gauges[0] * gauges[1]);
        g.model.set_offset(half);
    } else {
        throw GadgetError("no native form for this profile");
    }
    g.ideal_by_count.resize(k + 1);
    for (int m = 0; m <= k; ++m) g.ideal_by_count[m] = penalized[m] ? params.g : 0.0;
    return g;
}

ValidationReport validate_gadget(const Gadget& gadget, const SpectrumOptions& options) {
    const int total = static_cast<int>(gadget.logical.size() + gadget.ancillae.size());
    if (total > options.max_enumerated) {
        throw CapError("gadget has " + std::to_string(total) + " spins, validation cap is " +
                       std::to_string(options.max_enumerated));
    }
    ValidationReport r;
    r.checked = true;
    const double tol = tolerance_for(gadget.penalty);
    auto spec = reduced_spectrum(gadget.model, gadget.logical, options);
    const auto [lo, hi] = std::minmax_element(spec.energy.begin(), spec.energy.end());
    const double lowest = *lo;
    r.realized_gap = *hi - *lo;
    double dev_shifted = 0, dev_raw = 0;
    for (uint64_t a = 0; a < spec.size(); ++a) {
        const double want = gadget.ideal(a);
        dev_shifted = std::max(dev_shifted, std::fabs(spec.energy[a] - lowest - want));
        dev_raw = std::max(dev_raw, std::fabs(spec.energy[a] - want));
    }
    r.max_deviation = dev_shifted;
    r.exact_match = dev_shifted <= tol;
    r.normalized = dev_raw <= tol;
    r.ancilla_gap = *std::min_element(spec.excitation.begin(), spec.excitation.end());
    if (!r.exact_match) {
        r.warnings.push_back("spectrum deviates from the clause spectrum by " + format_real(dev_shifted));
    }
    if (!gadget.ancillae.empty() && !(r.ancilla_gap > tol)) {
        r.warnings.push_back("no energy gap protecting the ancilla ground state");
    }

    const auto& p = gadget.params;
    r.ja_over_g = p.ja / gadget.penalty;
    if (gadget.kind != GadgetKind::Native && gadget.penalty > p.ja / p.ratio_min * (1 + kTolerance)) {
        r.warnings.push_back("margin: g = " + format_real(gadget.penalty) + " is not << ja = " + format_real(p.ja) +
                             " (ratio " + format_real(r.ja_over_g) + " < " + format_real(p.ratio_min) + ")");
    }
    if (gadget.kind == GadgetKind::Parity || gadget.kind == GadgetKind::Symmetric) {
        r.ja_over_q0 = p.ja / p.q0;
        if (p.q0 > p.ja / p.ratio_min * (1 + kTolerance)) {
            r.warnings.push_back("margin: q0 = " + format_real(p.q0) + " is not << ja = " + format_real(p.ja));
        }
        if (!(p.q0 > gadget.penalty / 2)) {
            r.warnings.push_back("margin: q0 must exceed g/2");
        }
    }
    return r;
}

std::vector<Gadget> build_clause_gadgets(const Clause& clause, const GadgetParams& params, const GadgetSite& site,
                                         const AndSearchOptions& search) {
    const int k = clause.width();
    const auto gauges = clause.gauges();
    std::vector<bool> penalized;
    if (clause.kind() != ClauseKind::Table) {
        penalized = as_symmetric(clause).penalized_counts();
    }
    if (k == 1) {
        if (clause.kind() == ClauseKind::Table) {
            // rows are literal values; row 0 means the literal is false
            const auto& rows = clause.violating_set();
            const bool false_bad = std::find(rows.begin(), rows.end(), uint64_t{0}) != rows.end();
            penalized = {false_bad, !false_bad};
        }
        return {build_native_gadget(gauges, penalized, params, site)};
    }
    switch (clause.kind()) {
        case ClauseKind::Or:
            return {build_or_gadget(gauges, params, site)};
        case ClauseKind::Xor:
            if (k == 2) return {build_native_gadget(gauges, penalized, params, site)};
            if (k == 3) return {build_parity3_gadget(gauges, Parity::Odd, params, site)};
            return {build_parity_gadget(gauges, Parity::Odd, params, site)};
        case ClauseKind::And:
            return {build_and_gadget(gauges, params, site, search)};
        case ClauseKind::Symmetric:
            return {build_symmetric_gadget(gauges, penalized, params, site)};
        case ClauseKind::Table:
            return build_table_gadget(clause.violating_set(), gauges, params, site);
    }
    throw GadgetError("unknown clause kind");
}

std::vector<Vertex> CompiledProblem::logical() const {
    std::vector<Vertex> out;
    for (int i = 1; i <= num_variables; ++i) out.push_back(Vertex::logical(i));
    return out;
}

size_t CompiledProblem::num_ancillae() const {
    size_t n = 0;
    for (const auto& c : clauses) n += c.ancillae.size();
    return n;
}

CompiledProblem compile_problem(const Problem& problem, const CompileOptions& options) {
    CompiledProblem out;
    out.num_variables = problem.num_variables();
    out.params = options.params;
    out.energy_scale = options.params.g;
    out.constant = 0;
    std::vector<IsingModel> parts;
    IsingModel logical_block;
    for (int i = 1; i <= problem.num_variables(); ++i) logical_block.add_vertex(Vertex::logical(i));
    parts.push_back(std::move(logical_block));

    const auto& clauses = problem.clauses();
    for (size_t l = 0; l < clauses.size(); ++l) {
        const Clause& clause = clauses[l];
        GadgetParams p = options.params;
        if (options.weight_scaling == WeightScaling::WholeGadget) {
            p = options.params.scaled(clause.weight());
        } else {
            // Margins are judged after construction and reported as warnings.
            p.g = options.params.g * clause.weight();
            p.q0 = std::max(options.params.q0, 0.75 * p.g);
            p.ratio_min = std::numeric_limits<double>::min();
        }
        GadgetSite site;
        site.clause_index = static_cast<int>(l);
        for (const auto& lit : clause.literals()) site.logical.push_back(Vertex::logical(lit.variable));

        ClauseProvenance prov;
        prov.clause_index = static_cast<int>(l);
        prov.kind = clause.kind();
        prov.logical = site.logical;
        prov.gauges = clause.gauges();
        prov.penalty = p.g;
        prov.verified = true;

        std::vector<Gadget> gadgets;
        try {
            gadgets = build_clause_gadgets(clause, p, site, options.and_search);
        } catch (const GadgetError& e) {
            throw GadgetError("clause " + std::to_string(l) + ": " + e.what());
        }
        for (auto& g : gadgets) {
            g.params.ratio_min = options.params.ratio_min;
            prov.gadget_kinds.push_back(g.kind);
            prov.ancillae.insert(prov.ancillae.end(), g.ancillae.begin(), g.ancillae.end());
            if (g.kind == GadgetKind::And) prov.and_single_ancilla = g.single_ancilla;
            if (!g.note.empty() && clause.kind() == ClauseKind::And) prov.warnings.push_back(g.note);
            const int spins = g.width() + static_cast<int>(g.ancillae.size());
            if (spins <= options.verify_cap) {
                SpectrumOptions so;
                so.max_enumerated = options.verify_cap;
                auto report = validate_gadget(g, so);
                if (!report.exact_match || !report.normalized) {
                    throw GadgetError("clause " + std::to_string(l) + ": gadget spectrum check failed (deviation " +
                                      format_real(report.max_deviation) + ")");
                }
                prov.warnings.insert(prov.warnings.end(), report.warnings.begin(), report.warnings.end());
            } else {
                prov.verified = false;
                prov.warnings.push_back("constructed, not verified (" + std::to_string(spins) + " spins)");
            }
            parts.push_back(std::move(g.model));
        }
        out.clauses.push_back(std::move(prov));
    }
    out.model = superimpose(parts);
    return out;
}

SpinAssignment logical_spins(uint64_t variable_mask, int num_variables) {
    SpinAssignment s;
    for (int i = 0; i < num_variables; ++i) s[Vertex::logical(i + 1)] = ((variable_mask >> i) & 1) ? 1 : -1;
    return s;
}

}  // namespace chimera_sat
