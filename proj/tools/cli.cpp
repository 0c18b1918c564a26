#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "hyperdyn/cohomology.hpp"
#include "hyperdyn/cover.hpp"
#include "hyperdyn/errors.hpp"
#include "hyperdyn/lattice.hpp"
#include "hyperdyn/margulis.hpp"
#include "hyperdyn/parallel.hpp"
#include "hyperdyn/symbolic_flow.hpp"

namespace hyperdyn::cli {

using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr int kEnvelopeVersion = 1;

// --- Parameter access ------------------------------------------------------

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(trim(cur));
    return out;
}

template <class T>
T parse_number(const std::string& text, const std::string& key) {
    T v{};
    const auto* end = text.data() + text.size();
    const auto [p, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || p != end || text.empty())
        throw invalid_input("parameter '" + key + "': cannot parse '" + text + "'");
    if constexpr (std::is_floating_point_v<T>)
        if (!std::isfinite(v)) throw invalid_input("parameter '" + key + "' must be finite");
    return v;
}

struct Params {
    std::map<std::string, std::string> values;

    const std::string& str(const std::string& key) const { return values.at(key); }
    bool has(const std::string& key) const { return !values.at(key).empty(); }
    double real(const std::string& key) const { return parse_number<double>(str(key), key); }
    int integer(const std::string& key) const { return parse_number<int>(str(key), key); }
    int positive(const std::string& key) const {
        const int v = integer(key);
        if (v < 1) throw invalid_input("parameter '" + key + "' must be positive");
        return v;
    }
    bool flag(const std::string& key) const {
        const auto& v = str(key);
        if (v == "true" || v == "1") return true;
        if (v == "false" || v == "0") return false;
        throw invalid_input("parameter '" + key + "' must be true or false");
    }
    std::vector<double> reals(const std::string& key, std::size_t expect = 0) const {
        std::vector<double> out;
        if (has(key))
            for (const auto& t : split(str(key), ',')) out.push_back(parse_number<double>(t, key));
        if (expect != 0 && out.size() != expect)
            throw invalid_input("parameter '" + key + "' needs " + std::to_string(expect) + " comma-separated values");
        return out;
    }
};

Mat2 matrix_param(const Params& p, const std::string& key) {
    const auto v = p.reals(key, 4);
    return theta(CoverElement({v[0], v[1], v[2], v[3]}, 0));
}

ToralAuto toral_param(const Params& p) {
    const auto v = p.reals("A", 4);
    std::array<std::int64_t, 4> a{};
    for (std::size_t i = 0; i < 4; ++i) {
        if (v[i] != std::round(v[i]) || std::abs(v[i]) > 1e6) throw invalid_input("A must have integer entries");
        a[i] = static_cast<std::int64_t>(v[i]);
    }
    return ToralAuto::make(a[0], a[1], a[2], a[3]);
}

// c plus terms "k1,k2,a,b;k1,k2,a,b".
TrigPoly trig_param(const Params& p, const std::string& const_key, const std::string& terms_key) {
    TrigPoly f = TrigPoly::constant(p.real(const_key));
    if (!p.has(terms_key)) return f;
    for (const auto& term : split(p.str(terms_key), ';')) {
        const auto v = split(term, ',');
        if (v.size() != 4) throw invalid_input("trig term '" + term + "' needs k1,k2,a,b");
        f.terms.push_back({parse_number<int>(v[0], terms_key), parse_number<int>(v[1], terms_key),
                           parse_number<double>(v[2], terms_key), parse_number<double>(v[3], terms_key)});
    }
    return f;
}

SuspensionFlow flow_param(const Params& p) { return SuspensionFlow(toral_param(p), trig_param(p, "roof-const", "roof-terms")); }

CohClass class_param(const Params& p, const std::string& key) { return {p.reals(key, 4)}; }

ExpandingMap map_param(const Params& p) { return ExpandingMap::make(p.positive("d"), p.real("eps")); }

// --- JSON helpers ----------------------------------------------------------

json checks_json(const std::vector<AuditCheck>& checks) {
    json out = json::array();
    for (const auto& c : checks) out.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    return out;
}

json class_json(const ConjClass& c) {
    return {{"word", to_string(c.rep)}, {"length", c.length}, {"trace", c.trace}, {"homology", c.homology}};
}

json pairs_json(const std::vector<std::pair<double, double>>& v) {
    json out = json::array();
    for (const auto& [a, b] : v) out.push_back({a, b});
    return out;
}

// --- Commands --------------------------------------------------------------

struct Context {
    const Params& p;
    std::optional<std::uint64_t> seed;
    EnumOptions enum_opts;
    std::uint64_t max_orbits = 0;

    json result;
    std::string csv;
    std::vector<std::string> flags;
    std::string lattice_convention;

    std::uint64_t seed_value() const { return *seed; }
    LatticeRep lattice() {
        LatticeRep lat = octagon_lattice();
        lattice_convention = lat.convention;
        return lat;
    }
    // Periodic points of period <= n bound the number of orbits visited.
    void orbit_budget(const ToralAuto& A, int n) const {
        if (n > 40) throw invalid_input("period bound must be <= 40");
        double total = 0.0;
        for (int k = 1; k <= n; ++k) total += std::abs(static_cast<double>(trace_power(A, k)) - 2.0);
        if (total > static_cast<double>(max_orbits))
            throw resource_limit("periodic points up to period " + std::to_string(n) + " exceed max-orbits");
    }
    int lattice_maxlen(const std::string& key = "maxlen") const {
        const int m = p.positive(key);
        if (m > 14) throw invalid_input("maxlen must be <= 14");
        return m;
    }
};

using Handler = std::function<void(Context&)>;

void cmd_length(Context& c) {
    if (c.p.has("trace") == c.p.has("matrix")) throw invalid_input("give exactly one of trace and matrix");
    Mat2 m;
    if (c.p.has("trace")) {
        const double t = c.p.real("trace");
        m = {t, -1.0, 1.0, 0.0};
    } else {
        m = matrix_param(c.p, "matrix");
    }
    c.result = {{"trace", std::abs(m.trace())}, {"length", translation_length(m)}, {"class", std::string(to_string(classify(m)))}};
}

void cmd_classify(Context& c) {
    const Mat2 m = matrix_param(c.p, "matrix");
    c.result = {{"class", std::string(to_string(classify(m)))}, {"trace", m.trace()}, {"length", translation_length(m)}};
}

void cmd_commutator(Context& c) {
    const CoverElement p(matrix_param(c.p, "p"), 0), q(matrix_param(c.p, "q"), 0);
    const auto seq = commutator_length_sequence(p, q, c.p.positive("n-max"));
    const double L = translation_length(p);
    json rows = json::array();
    double worst_scaled = 0.0, worst_trace = 0.0;
    std::ostringstream os;
    os.precision(17);
    os << "n,ratio,ratio_closed,trace_direct,trace_closed,trace_rel_diff\n";
    for (const auto& s : seq) {
        worst_scaled = std::max(worst_scaled, std::abs(s.ratio - L) * static_cast<double>(s.n));
        worst_trace = std::max(worst_trace, s.trace_rel_diff);
        rows.push_back({{"n", s.n}, {"ratio", s.ratio}, {"ratio_closed", s.ratio_closed}, {"trace_rel_diff", s.trace_rel_diff}});
        os << s.n << ',' << s.ratio << ',' << s.ratio_closed << ',' << s.trace_direct << ',' << s.trace_closed << ','
           << s.trace_rel_diff << '\n';
    }
    c.result = {{"length_p", L}, {"max_n_times_error", worst_scaled}, {"max_trace_rel_diff", worst_trace}, {"samples", rows}};
    c.csv = os.str();
}

void cmd_spectrum(Context& c) {
    const LatticeRep lat = c.lattice();
    EnumOptions opts = c.enum_opts;
    opts.dedup_inverse = c.p.flag("dedup-inverse");
    const auto spec = length_spectrum(lat, c.lattice_maxlen(), opts);
    json head = json::array();
    for (std::size_t i = 0; i < std::min<std::size_t>(spec.size(), 20); ++i) head.push_back(class_json(spec[i]));
    c.result = {{"maxlen", c.p.integer("maxlen")}, {"classes", spec.size()}, {"systole", spec.empty() ? 0.0 : spec.front().length},
                {"shortest", head}};
    c.csv = spectrum_csv(lat, spec);
}

void cmd_audit(Context& c) {
    const LatticeRep lat = c.lattice();
    const auto a = audit_lattice(lat, c.lattice_maxlen(), c.enum_opts);
    c.result = {{"maxlen", a.maxlen},
                {"words_checked", a.words_checked},
                {"parabolic_count", a.parabolic_count},
                {"elliptic_count", a.elliptic_count},
                {"identity_words", a.identity_words},
                {"unexplained_central", a.unexplained_central},
                {"relator_residual", a.relator_residual},
                {"relator_winding", a.relator_winding},
                {"homology_rank", a.homology_rank},
                {"min_displacement", a.min_displacement},
                {"centralizer_hits", a.centralizer_hits},
                {"checks", checks_json(a.checks)},
                {"all_pass", a.all_pass()}};
}

void cmd_delta_sup(Context& c) {
    const LatticeRep lat = c.lattice();
    const CohClass a = class_param(c.p, "class");
    const auto est = delta_sup(lat, a, c.lattice_maxlen(), c.enum_opts);
    const double margin = c.p.real("margin");
    json hist = json::array();
    for (const auto& [n, s] : est.history) hist.push_back({n, s});
    json witness = nullptr;
    if (!est.witness.rep.empty()) {
        witness = class_json(est.witness);
        witness["a_value"] = evaluate(a, est.witness.homology);
    }
    c.result = {{"maxlen", est.maxlen}, {"sup", est.sup}, {"status", to_string(in_delta(est.sup, margin))},
                {"margin", margin}, {"witness", witness}, {"history", hist}};
}

void cmd_delta_slice(Context& c) {
    const LatticeRep lat = c.lattice();
    const auto summary = summarize_classes(lat, c.lattice_maxlen(), c.enum_opts);
    const int grid = c.p.positive("grid");
    const auto pts = delta_slice(summary, class_param(c.p, "origin"), class_param(c.p, "dir1"), class_param(c.p, "dir2"), grid,
                                 c.p.real("extent"), c.p.real("margin"));
    std::uint64_t plausible = 0, out = 0, border = 0;
    for (const auto& pt : pts) {
        plausible += pt.status == DeltaStatus::Plausible;
        out += pt.status == DeltaStatus::CertifiedOut;
        border += pt.status == DeltaStatus::Borderline;
    }
    c.result = {{"points", pts.size()},
                {"plausible", plausible},
                {"certified_out", out},
                {"borderline", border},
                {"midpoint_violations", slice_midpoint_violations(pts, grid, 1.0)}};
    c.csv = slice_csv(pts);
}

void cmd_gamma_a(Context& c) {
    const LatticeRep lat = c.lattice();
    const auto au = gamma_a_audit(lat, class_param(c.p, "class"), c.lattice_maxlen(), c.p.positive("samples"), c.seed_value(),
                                  c.enum_opts);
    json viol = json::array();
    for (const auto& v : au.violators)
        viol.push_back({{"word", to_string(v.word)}, {"length", v.length}, {"a_value", v.a_value}, {"min_displacement", v.min_displacement}});
    c.result = {{"s_n", au.s_n},
                {"epsilon", au.epsilon},
                {"min_margin", au.min_margin},
                {"generator_margin", au.generator_margin},
                {"classes_checked", au.classes_checked},
                {"fixed_point_classes", au.fixed_point_classes},
                {"k0", au.k0},
                {"violator_bound", au.violator_bound},
                {"violators", viol},
                {"violators_bounded", au.violators_bounded},
                {"min_violator_displacement", au.min_violator_displacement},
                {"checks", checks_json(au.checks)},
                {"all_pass", au.all_pass()}};
}

void cmd_period_shift(Context& c) {
    const LatticeRep lat = c.lattice();
    const CohClass a = class_param(c.p, "class");
    const auto spec = length_spectrum(lat, c.lattice_maxlen(), c.enum_opts);
    std::ostringstream os;
    os.precision(17);
    os << "word,length,a,tau_a\n";
    double min_tau = INFINITY;
    std::uint64_t nonpositive = 0;
    for (const auto& cl : spec) {
        const double tau = period_shift(a, cl);
        min_tau = std::min(min_tau, tau);
        nonpositive += !(tau > 0.0);
        os << to_string(cl.rep) << ',' << cl.length << ',' << evaluate(a, cl.homology) << ',' << tau << '\n';
    }
    c.result = {{"classes", spec.size()}, {"min_tau_a", spec.empty() ? json(nullptr) : json(min_tau)}, {"nonpositive", nonpositive}};
    c.csv = os.str();
}

void cmd_fixed_points(Context& c) {
    const SuspensionFlow flow = flow_param(c.p);
    const int n = c.p.positive("n");
    c.orbit_budget(flow.base, n);
    const auto pts = fixed_points(flow.base, n);
    const std::int64_t expected = std::abs(trace_power(flow.base, n) - 2);
    c.result = {{"n", n}, {"count", pts.size()}, {"expected", expected}, {"match", static_cast<std::int64_t>(pts.size()) == expected}};
    c.csv = fixed_points_csv(flow, n);
}

json pressure_json(const PressureResult& r) {
    json raw = json::array();
    for (const auto& [n, v] : r.raw) raw.push_back({n, v});
    return {{"value", r.value}, {"aitken", r.aitken}, {"raw", raw}, {"converged", r.converged}};
}

void cmd_pressure(Context& c) {
    const ToralAuto A = toral_param(c.p);
    const int hi = c.p.positive("n-hi");
    c.orbit_budget(A, hi);
    const auto r = pressure_base(A, trig_param(c.p, "f-const", "f-terms"), c.p.positive("n-lo"), hi);
    c.result = pressure_json(r);
    if (!r.converged) c.flags.push_back("non-convergence");
}

void cmd_entropy(Context& c) {
    const SuspensionFlow flow = flow_param(c.p);
    const int hi = c.p.positive("n-hi");
    c.orbit_budget(flow.base, hi);
    const auto r = entropy_suspension(flow, c.p.positive("n-lo"), hi);
    c.result = {{"value", r.value}, {"bracket", {r.bracket_lo, r.bracket_hi}}, {"iterations", r.iterations}, {"converged", r.converged}};
    if (!r.converged) c.flags.push_back("non-convergence");
}

void cmd_srb(Context& c) {
    const ToralAuto A = toral_param(c.p);
    const int n = c.p.positive("n");
    c.orbit_budget(A, n);
    const auto r = srb_identity_check(A, n, c.p.reals("lambdas"));
    json cases = json::array();
    for (const auto& k : r.cases) cases.push_back({{"lambda", k.lambda}, {"entropy", k.entropy}});
    c.result = {{"n", r.n},           {"unstable_sum", r.unstable_sum}, {"unstable_pressure", r.unstable_pressure},
                {"cases", cases},     {"sum_ok", r.sum_ok},             {"pressure_ok", r.pressure_ok},
                {"cases_ok", r.cases_ok}, {"all_pass", r.all_pass()}};
}

void cmd_livschitz(Context& c) {
    const ToralAuto A = toral_param(c.p);
    const int n = c.p.positive("n-max");
    c.orbit_budget(A, n);
    const TrigPoly beta = trig_param(c.p, "beta-const", "beta-terms");
    const TrigPoly f = coboundary(A, beta) + TrigPoly::constant(c.p.real("perturb"));
    const auto r = livschitz_solve(A, f, n, c.p.real("tol"));
    c.result = {{"orbits", r.orbits.size()},
                {"max_orbit_sum", r.max_orbit_sum},
                {"recovery_spread", recovery_spread(r, beta)},
                {"holder_exponent", r.holder_exponent},
                {"holder_constant", r.holder_constant}};
}

void cmd_smoother(Context& c) {
    const SuspensionFlow flow = flow_param(c.p);
    const TrigPoly f = trig_param(c.p, "f-const", "f-terms");
    SmootherOptions o;
    o.grid = c.p.positive("grid");
    o.heights = c.p.positive("heights");
    o.samples = c.p.positive("samples");
    o.t_max = c.p.real("t-max");
    o.orbit_n_max = c.p.positive("orbit-n-max");
    o.seed = c.seed_value();
    c.orbit_budget(flow.base, o.orbit_n_max);
    const double frac = c.p.real("lambda-frac");
    if (!(frac > 0.0 && frac <= 1.0)) throw invalid_input("lambda-frac must lie in (0, 1]");
    const double rate = min_orbit_rate(flow, f, o.orbit_n_max);
    o.lambda_prime = rate - (1.0 - frac) * std::abs(rate);
    const auto r = averaging_smoother(flow, f, o);
    c.result = {{"lambda", r.lambda},         {"lambda_prime", o.lambda_prime},   {"T", r.T},
                {"min_slack", r.min_slack},   {"identity_residual", r.identity_residual},
                {"inequality_ok", r.inequality_ok}, {"identity_ok", r.identity_ok}};
    std::ostringstream os;
    os.precision(17);
    os << "x,y,beta\n";
    for (int i = 0; i < o.grid; ++i)
        for (int j = 0; j < o.grid; ++j)
            os << static_cast<double>(i) / o.grid << ',' << static_cast<double>(j) / o.grid << ','
               << r.beta_grid[static_cast<std::size_t>(i) * static_cast<std::size_t>(o.grid) + static_cast<std::size_t>(j)] << '\n';
    c.csv = os.str();
}

void cmd_delta_bar(Context& c) {
    const SuspensionFlow flow = flow_param(c.p);
    const int n = c.p.positive("n-table");
    c.orbit_budget(flow.base, std::max(n, 12));
    const auto r = delta_bar_chain(flow, c.p.real("a"), n, c.p.reals("rescale"));
    json rescale = json::array();
    for (const auto& [k, err] : r.rescale_checks) rescale.push_back({{"c", k}, {"error", err}});
    std::ostringstream os;
    os.precision(17);
    os << "n,tau,a,tau_rho,Ju,Js,J,delta_tau_rho,a_over\n";
    for (const auto& row : r.table)
        os << row.n << ',' << row.tau << ',' << row.a_value << ',' << row.tau_rho << ',' << row.ju << ',' << row.js << ','
           << row.j << ',' << row.delta_tau_rho << ',' << row.a_over << '\n';
    c.result = {{"a", r.a_scalar},
                {"h_a", r.h_a},
                {"delta", r.delta},
                {"period_residual_zero", r.period_residual_zero},
                {"rescaled_entropy", r.rescaled_entropy},
                {"rescale_error", r.rescale_error},
                {"rescale_checks", rescale},
                {"rows", r.table.size()}};
    c.csv = os.str();
}

void cmd_solvable(Context& c) {
    const SuspensionFlow flow = flow_param(c.p);
    SolvableOptions o;
    o.omega_scalar = c.p.real("omega");
    o.grid = c.p.positive("grid");
    o.heights = c.p.positive("heights");
    o.times = c.p.reals("times");
    o.n_orbits = c.p.positive("n-orbits");
    c.orbit_budget(flow.base, o.n_orbits);
    const auto r = solvable_volume_audit(flow, o);
    json planted = json::array();
    for (const auto& pl : r.planted)
        planted.push_back({{"delta", pl.triple.delta},
                           {"lambda", pl.triple.lambda},
                           {"lambda_s", pl.triple.lambda_s},
                           {"lambda_star", pl.lambda_star},
                           {"closed_form", pl.closed_form},
                           {"fit_residual", pl.fit_residual},
                           {"solvable2_residual", pl.solvable2_residual}});
    json vols = json::array();
    std::ostringstream os;
    os.precision(17);
    os << "t,lambda_star,I\n";
    for (const auto& v : r.volumes) {
        vols.push_back({{"t", v.t}, {"increasing", v.increasing}, {"i_at_zero", v.i_at_zero}, {"root", v.root}});
        for (const auto& [l, i] : v.curve) os << v.t << ',' << l << ',' << i << '\n';
    }
    c.result = {{"omega", r.omega_scalar}, {"planted", planted}, {"volumes", vols}};
    c.csv = os.str();
}

LeafMeasureCDF cdf_param(const Context& c, const ExpandingMap& g) {
    return mme_cdf(g, c.p.positive("depth"), c.p.has("resolution-bits") ? c.p.integer("resolution-bits") : 0);
}

void cmd_mme(Context& c) {
    const ExpandingMap g = map_param(c.p);
    const int depth = c.p.positive("depth");
    const LeafMeasureCDF F = cdf_param(c, g);
    const auto sc = scaling_check(g, F, c.p.positive("intervals"), c.seed_value(), c.p.real("max-len"));
    json depth_distance = nullptr;
    if (c.p.flag("depth-check") && (depth + 2) * std::log2(g.d) <= 24.0)
        depth_distance = cdf_distance(F, mme_cdf(g, depth + 2));
    c.result = {{"d", g.d},
                {"eps", g.eps},
                {"depth", depth},
                {"knots", F.size()},
                {"F_at_1", F(1.0)},
                {"scaling_intervals", sc.intervals},
                {"scaling_residual", sc.max_residual},
                {"depth_plus_2_distance", depth_distance}};
    c.csv = F.csv(static_cast<std::size_t>(c.p.positive("csv-stride")));
}

void cmd_linearize(Context& c) {
    const ExpandingMap g = map_param(c.p);
    const LeafMeasureCDF F = cdf_param(c, g);
    const int bits = c.p.positive("grid-bits");
    const auto lin = linearize(g, F, bits);
    c.result = {{"resolution_bits", bits},
                {"step_cells", lin.step_cells},
                {"derivative_min", lin.derivative_min},
                {"derivative_max", lin.derivative_max},
                {"max_deviation", lin.max_deviation},
                {"idempotence_error", idempotence_error(lin, c.p.positive("idempotence-depth"))}};
    std::ostringstream os;
    os.precision(17);
    os << "u,g_hat\n";
    const std::size_t stride = static_cast<std::size_t>(c.p.positive("csv-stride"));
    for (std::size_t i = 0; i < lin.map.values.size(); i += stride)
        os << static_cast<double>(i) / static_cast<double>(lin.map.values.size()) << ',' << lin.map.values[i] << '\n';
    c.csv = os.str();
}

void cmd_rn(Context& c) {
    const ExpandingMap g = map_param(c.p);
    const LeafMeasureCDF F = cdf_param(c, g);
    const auto r = holonomy_rn_check(g, F, c.p.real("roof-const"), c.p.positive("samples"), c.seed_value(), c.p.real("half-width"));
    c.result = {{"lambda", r.lambda},
                {"samples", r.samples},
                {"max_residual", r.max_residual},
                {"residual_eta0", r.residual_eta0},
                {"ratio_eta_c", r.ratio_eta_c}};
}

void cmd_regularity(Context& c) {
    const ExpandingMap g = map_param(c.p);
    const LeafMeasureCDF F = cdf_param(c, g);
    const auto r = regularity_diagnostic(F, c.p.positive("grid-bits"), c.p.positive("j-min"), c.p.positive("j-max"));
    c.result = {{"exponent", r.exponent}, {"constant", r.constant}, {"modulus", pairs_json(r.modulus)}};
    std::ostringstream os;
    os.precision(17);
    os << "h,modulus\n";
    for (const auto& [h, m] : r.modulus) os << h << ',' << m << '\n';
    c.csv = os.str();
}

// --- Command table ---------------------------------------------------------

const std::vector<ParamSpec> kFlowParams = {
    {"A", "2,1,1,1", "toral automorphism a0,a1,a2,a3 (row-major)"},
    {"roof-const", "1", "constant part of the roof"},
    {"roof-terms", "-", "roof terms k1,k2,cos,sin;..."},
};

const std::vector<ParamSpec> kMapParams = {
    {"d", "2", "degree of the expanding map"},
    {"eps", "0.3", "perturbation eps"},
    {"depth", "20", "preimage tree depth"},
    {"resolution-bits", "-", "require at least 2^bits CDF knots"},
};

std::vector<ParamSpec> join(std::vector<ParamSpec> a, const std::vector<ParamSpec>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

struct Entry {
    CommandSpec spec;
    Handler handler;
};

const std::vector<Entry>& table() {
    static const std::vector<Entry> t = {
        {{"length", "translation length from a trace or matrix", {{"trace", "-", "trace of the element"}, {"matrix", "-", "a,b,c,d"}}}, cmd_length},
        {{"classify", "classify an SL(2,R) matrix", {{"matrix", "", "a,b,c,d"}}}, cmd_classify},
        {{"commutator-limit", "L([P^n,Q])/2n against L(P)",
          {{"p", "2,1,1,1", "matrix P"}, {"q", "1,0,1,1", "matrix Q"}, {"n-max", "40", "largest n"}}},
         cmd_commutator},
        {{"spectrum", "length spectrum of the octagon lattice",
          {{"maxlen", "6", "word length bound"}, {"dedup-inverse", "false", "identify classes with their inverses"}}},
         cmd_spectrum},
        {{"audit-lattice", "lattice sanity audit", {{"maxlen", "6", "word length bound"}}}, cmd_audit},
        {{"delta-sup", "S_N(a) and membership status",
          {{"class", "", "cohomology class a1,a2,a3,a4"}, {"maxlen", "8", "word length bound"}, {"margin", "0.05", "plausibility margin"}}},
         cmd_delta_sup},
        {{"delta-slice", "S_N on a 2-D slice of classes",
          {{"origin", "0,0,0,0", "slice origin"},
           {"dir1", "1,0,0,0", "first direction"},
           {"dir2", "0,1,0,0", "second direction"},
           {"grid", "20", "half-width in grid steps"},
           {"extent", "1.5", "coordinate extent"},
           {"maxlen", "6", "word length bound"},
           {"margin", "0.05", "plausibility margin"}}},
         cmd_delta_slice},
        {{"gamma-a-audit", "freeness evidence for the deformed action",
          {{"class", "", "cohomology class"}, {"maxlen", "6", "word length bound"}, {"samples", "64", "points in the sample set V"}},
          true},
         cmd_gamma_a},
        {{"period-shift", "tau_a = L + a over the spectrum", {{"class", "", "cohomology class"}, {"maxlen", "6", "word length bound"}}},
         cmd_period_shift},
        {{"fixed-points", "Fix(A^n) by Smith normal form", join(kFlowParams, {{"n", "6", "period"}})}, cmd_fixed_points},
        {{"pressure", "base pressure P(A, f)",
          {{"A", "2,1,1,1", "toral automorphism"},
           {"f-const", "0", "constant part of f"},
           {"f-terms", "-", "terms of f"},
           {"n-lo", "4", "smallest period used"},
           {"n-hi", "12", "largest period used"}}},
         cmd_pressure},
        {{"entropy", "topological entropy of the suspension",
          join(kFlowParams, {{"n-lo", "4", "smallest period used"}, {"n-hi", "12", "largest period used"}})},
         cmd_entropy},
        {{"srb-check", "SRB identities",
          {{"A", "2,1,1,1", "toral automorphism"}, {"n", "12", "period"}, {"lambdas", "0.5,1,2", "target entropies"}}},
         cmd_srb},
        {{"livschitz", "recover a planted coboundary from periodic data",
          {{"A", "2,1,1,1", "toral automorphism"},
           {"beta-const", "0", "constant part of the planted beta"},
           {"beta-terms", "1,0,0.3,0;0,1,0,0.2", "terms of the planted beta"},
           {"perturb", "0", "constant added to the coboundary"},
           {"n-max", "10", "largest period"},
           {"tol", "1e-9", "orbit sum tolerance"}}},
         cmd_livschitz},
        {{"smoother", "averaging smoother for a flow cocycle",
          join(kFlowParams, {{"f-const", "1", "constant part of f"},
                             {"f-terms", "1,0,0.2,0", "terms of f"},
                             {"lambda-frac", "0.9", "lambda' as a fraction of the orbit rate"},
                             {"grid", "128", "base grid"},
                             {"heights", "4", "fiber heights"},
                             {"samples", "1000", "random checks"},
                             {"t-max", "5", "largest check time"},
                             {"orbit-n-max", "8", "largest orbit period"}}),
          true},
         cmd_smoother},
        {{"delta-bar", "delta-bar bookkeeping",
          join(kFlowParams, {{"a", "0.5", "scalar class value"}, {"n-table", "6", "largest period in the table"},
                             {"rescale", "0.5,2", "rescale factors"}})},
         cmd_delta_bar},
        {{"solvable-audit", "solvable-case audit",
          join(kFlowParams, {{"omega", "1", "scalar one-form"},
                             {"grid", "64", "base grid"},
                             {"heights", "16", "fiber cells"},
                             {"times", "1,2,4", "integration times"},
                             {"n-orbits", "6", "largest planted orbit period"}})},
         cmd_solvable},
        {{"mme-cdf", "MME CDF of an expanding circle map",
          join(kMapParams, {{"intervals", "100", "scaling check intervals"},
                            {"max-len", "0.05", "largest check interval"},
                            {"depth-check", "true", "compare with depth + 2"},
                            {"csv-stride", "256", "knots per CSV row"}}),
          true},
         cmd_mme},
        {{"linearize", "constant-expansion coordinate change",
          join(kMapParams, {{"grid-bits", "20", "linearization grid 2^bits"},
                            {"idempotence-depth", "16", "depth for the idempotence check"},
                            {"csv-stride", "256", "grid points per CSV row"}})},
         cmd_linearize},
        {{"rn-check", "holonomy Radon-Nikodym check",
          join(kMapParams, {{"roof-const", "1", "constant roof c"},
                            {"samples", "100", "random (point, eta) pairs"},
                            {"half-width", "0.01", "interval half-width"}}),
          true},
         cmd_rn},
        {{"regularity", "Hoelder exponent of the CDF",
          join(kMapParams, {{"grid-bits", "16", "evaluation grid 2^bits"}, {"j-min", "3", "smallest dyadic level"},
                            {"j-max", "12", "largest dyadic level"}})},
         cmd_regularity},
    };
    return t;
}

const Entry& find_entry(const std::string& name) {
    for (const auto& e : table())
        if (e.spec.name == name) return e;
    throw invalid_input("unknown command '" + name + "'");
}

int exit_code_for(ErrorKind k) {
    switch (k) {
        case ErrorKind::InvalidInput: return kExitInvalid;
        case ErrorKind::NonConvergence: return kExitNonConvergence;
        case ErrorKind::Internal: return kExitInternal;
    }
    return kExitInternal;
}

std::string kind_name(ErrorKind k) {
    switch (k) {
        case ErrorKind::InvalidInput: return "invalid-input";
        case ErrorKind::NonConvergence: return "non-convergence";
        case ErrorKind::Internal: return "internal";
    }
    return "internal";
}

std::uint64_t parse_budget(const std::string& text, const std::string& key) {
    const auto v = parse_number<std::int64_t>(text, key);
    if (v < 1) throw invalid_input("budget '" + key + "' must be positive");
    return static_cast<std::uint64_t>(v);
}

}  // namespace

const std::vector<CommandSpec>& commands() {
    static const std::vector<CommandSpec> specs = [] {
        std::vector<CommandSpec> s;
        for (const auto& e : table()) s.push_back(e.spec);
        return s;
    }();
    return specs;
}

void apply_config_text(RunConfig& cfg, const std::string& text) {
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw invalid_input("config line " + std::to_string(lineno) + ": expected key=value");
        const std::string key = trim(t.substr(0, eq)), value = trim(t.substr(eq + 1));
        if (key == "command") {
            if (!cfg.command.empty() && cfg.command != value)
                throw invalid_input("config command '" + value + "' does not match '" + cfg.command + "'");
            cfg.command = value;
        } else if (key == "seed") {
            cfg.seed = parse_number<std::uint64_t>(value, key);
        } else if (key == "max-words") {
            cfg.max_words = parse_budget(value, key);
        } else if (key == "max-orbits") {
            cfg.max_orbits = parse_budget(value, key);
        } else if (key == "time-limit-s") {
            cfg.time_limit_s = parse_number<double>(value, key);
        } else {
            const auto& spec = find_entry(cfg.command).spec;
            if (std::none_of(spec.params.begin(), spec.params.end(), [&](const ParamSpec& p) { return p.key == key; }))
                throw invalid_input("unknown key '" + key + "' for command '" + cfg.command + "'");
            cfg.params[key] = value;
        }
    }
}

RunOutcome run(const RunConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    RunOutcome out;
    json& env = out.envelope;
    env["command"] = cfg.command;
    env["seed"] = cfg.seed ? json(*cfg.seed) : json(nullptr);
    env["versions"] = {{"hyperdyn", kVersion}, {"envelope", kEnvelopeVersion}};
    env["result"] = nullptr;
    json diag = {{"threads", thread_count()}, {"flags", json::array()}};

    Params params;
    try {
        const Entry& entry = find_entry(cfg.command);
        for (const auto& [k, v] : cfg.params)
            if (std::none_of(entry.spec.params.begin(), entry.spec.params.end(), [&](const ParamSpec& p) { return p.key == k; }))
                throw invalid_input("unknown key '" + k + "' for command '" + cfg.command + "'");
        for (const auto& ps : entry.spec.params) {
            auto it = cfg.params.find(ps.key);
            std::string v = it != cfg.params.end() ? it->second : ps.fallback;
            if (v == "-") v.clear();
            if (v.empty() && ps.fallback.empty()) throw invalid_input("missing required parameter '" + ps.key + "'");
            params.values[ps.key] = v;
        }
        env["params"] = params.values;
        env["params"]["max-words"] = cfg.max_words;
        env["params"]["max-orbits"] = cfg.max_orbits;
        env["params"]["time-limit-s"] = cfg.time_limit_s;
        if (cfg.max_words < 1 || cfg.max_orbits < 1 || !(cfg.time_limit_s > 0.0)) throw invalid_input("budgets must be positive");
        if (entry.spec.needs_seed && !cfg.seed) throw invalid_input("--seed is required for '" + cfg.command + "'");

        Context ctx{params, cfg.seed, {}, cfg.max_orbits, nullptr, {}, {}, {}};
        ctx.enum_opts.max_words = cfg.max_words;
        entry.handler(ctx);
        env["result"] = std::move(ctx.result);
        out.csv = std::move(ctx.csv);
        if (!ctx.lattice_convention.empty()) env["versions"]["lattice_convention"] = ctx.lattice_convention;
        for (const auto& f : ctx.flags) diag["flags"].push_back(f);
        if (!ctx.flags.empty()) out.exit_code = kExitNonConvergence;
    } catch (const Error& e) {
        out.exit_code = exit_code_for(e.kind());
        diag["error"] = {{"kind", kind_name(e.kind())}, {"tag", e.tag()}, {"message", e.what()}};
    } catch (const std::exception& e) {
        out.exit_code = kExitInternal;
        diag["error"] = {{"kind", "internal"}, {"tag", "internal"}, {"message", e.what()}};
    }
    if (!env.contains("params")) env["params"] = cfg.params;

    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    if (ms > cfg.time_limit_s * 1000.0 && out.exit_code == kExitOk) {
        diag["flags"].push_back("time-limit-exceeded");
        out.exit_code = kExitNonConvergence;
    }
    diag["exit_code"] = out.exit_code;
    env["diagnostics"] = std::move(diag);
    env["wallclock_ms"] = ms;
    return out;
}

int main_entry(int argc, char** argv) {
    CLI::App app{"Numerical experiments on Anosov flows, surface groups and their deformations"};
    app.require_subcommand(1);
    std::string config_path, out_path, csv_path, seed_text, max_words, max_orbits, time_limit;
    std::size_t threads = 0;
    app.add_option("--config", config_path, "key=value configuration file");
    app.add_option("--seed", seed_text, "random seed (required for sampling commands)");
    app.add_option("--out", out_path, "write the JSON envelope here instead of stdout");
    app.add_option("--csv-out", csv_path, "write the CSV payload here");
    app.add_option("--threads", threads, "worker threads (default: HYPERDYN_THREADS or 1)");
    app.add_option("--max-words", max_words, "node budget for word enumeration");
    app.add_option("--max-orbits", max_orbits, "budget on periodic points visited");
    app.add_option("--time-limit-s", time_limit, "wallclock limit; exceeding it flags the run");

    std::map<std::string, std::map<std::string, std::string>> given;
    for (const auto& spec : commands()) {
        CLI::App* sub = app.add_subcommand(spec.name, spec.help);
        sub->fallthrough();
        for (const auto& p : spec.params) {
            const std::string note = p.fallback.empty() ? " (required)" : p.fallback == "-" ? "" : " (default " + p.fallback + ")";
            sub->add_option("--" + p.key, given[spec.name][p.key], p.help + note);
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInvalid;
    }

    RunConfig cfg;
    CLI::App* sub = app.get_subcommands().front();
    cfg.command = sub->get_name();
    RunOutcome outcome;
    try {
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw invalid_input("cannot read config file '" + config_path + "'");
            std::stringstream ss;
            ss << in.rdbuf();
            apply_config_text(cfg, ss.str());
        }
        for (const auto& [k, v] : given[cfg.command])
            if (sub->count("--" + k) > 0) cfg.params[k] = v;
        if (!seed_text.empty()) cfg.seed = parse_number<std::uint64_t>(seed_text, "seed");
        if (!max_words.empty()) cfg.max_words = parse_budget(max_words, "max-words");
        if (!max_orbits.empty()) cfg.max_orbits = parse_budget(max_orbits, "max-orbits");
        if (!time_limit.empty()) cfg.time_limit_s = parse_number<double>(time_limit, "time-limit-s");
        if (threads > 0) set_thread_count(threads);
    } catch (const Error& e) {
        std::cerr << "hyperdyn: " << e.what() << '\n';
        return kExitInvalid;
    }

    outcome = run(cfg);
    const std::string text = outcome.envelope.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream(out_path) << text;
    }
    if (!csv_path.empty() && !outcome.csv.empty()) std::ofstream(csv_path) << outcome.csv;
    if (outcome.envelope["diagnostics"].contains("error"))
        std::cerr << "hyperdyn: " << outcome.envelope["diagnostics"]["error"]["message"].get<std::string>() << '\n';
    return outcome.exit_code;
}

}  // namespace hyperdyn::cli
