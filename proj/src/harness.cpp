#include "hdde/harness.hpp"

#include "hdde/errors.hpp"
#include "fmt.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

namespace hdde {

namespace {

using detail::fmt17;
using nlohmann::json;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double number(const json& j, const char* key) {
    if (!j.is_number()) throw ConfigError(std::string("run config: '") + key + "' must be a number");
    return j.get<double>();
}

std::size_t count(const json& j, const char* key) {
    if (!j.is_number_integer() || j.get<long long>() <= 0)
        throw ConfigError(std::string("run config: '") + key + "' must be a positive integer");
    return j.get<std::size_t>();
}

json ext_json(const ExtendedReal& g) {
    if (g.is_finite()) return g.value();
    return g.to_string();
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot write " + path.string());
    return os;
}

void ensure_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
}

double guard_limit(const DelaySystem& sys, Epsilon eps) {
    const auto taus = delays(sys, eps);
    return kExponentGuard / *std::max_element(taus.begin(), taus.end());
}

} // namespace

// ---------------------------------------------------------------------------

namespace {

// Everything RunConfig::validate checks; an empty eps list is allowed while
// parsing because the command line may still supply it.
void check_config(const RunConfig& c, bool need_eps) {
    if (!c.system) throw ConfigError("run config: no system given");
    if (need_eps && c.eps_list.empty()) throw ConfigError("run config: eps list is empty");
    for (std::size_t i = 0; i < c.eps_list.size(); ++i) {
        Epsilon{c.eps_list[i]};
        if (i > 0 && !(c.eps_list[i] < c.eps_list[i - 1]))
            throw ConfigError("run config: eps list must be strictly decreasing");
    }
    if (c.window) c.window->validate();
    if (c.format != "csv" && c.format != "json") throw ConfigError("run config: format must be csv or json");
    if (!(c.tol > 0.0) || !(c.rank_tol > 0.0) || !(c.margin >= 0.0) || !(c.delta > 0.0) || !(c.distance_cap > 0.0))
        throw ConfigError("run config: tolerances must be positive");
    if (c.grid.omega_points == 0 || c.grid.phase_points == 0) throw ConfigError("run config: grid must be positive");
}

RunConfig parse_fields(const json& j, const std::filesystem::path& base_dir) {
    if (!j.is_object()) throw ConfigError("run config: top level must be an object");

    static const std::set<std::string> known{"system", "system_file", "eps",    "window", "grid",
                                             "tol",    "rank_tol",    "margin", "delta",  "distance_cap",
                                             "output"};
    for (const auto& [key, _] : j.items())
        if (!known.count(key)) throw ConfigError("run config: unknown key '" + key + "'");

    RunConfig cfg;
    if (j.contains("system") && j.contains("system_file"))
        throw ConfigError("run config: give either 'system' or 'system_file'");
    if (j.contains("system")) cfg.system = parse_system(j["system"].dump());
    if (j.contains("system_file")) {
        std::filesystem::path p = j["system_file"].get<std::string>();
        if (p.is_relative()) p = base_dir / p;
        cfg.system = load_system(p);
    }
    if (j.contains("eps")) {
        const json& e = j["eps"];
        if (e.is_number()) {
            cfg.eps_list = {e.get<double>()};
        } else if (e.is_array()) {
            for (const auto& v : e) cfg.eps_list.push_back(number(v, "eps"));
        } else {
            throw ConfigError("run config: 'eps' must be a number or an array");
        }
    }
    if (j.contains("window")) {
        const json& w = j["window"];
        if (!w.is_array() || w.size() != 4) throw ConfigError("run config: 'window' needs 4 numbers");
        cfg.window = Rectangle{number(w[0], "window"), number(w[1], "window"), number(w[2], "window"),
                               number(w[3], "window")};
    }
    if (j.contains("grid")) {
        const json& g = j["grid"];
        if (!g.is_object()) throw ConfigError("run config: 'grid' must be an object");
        if (g.contains("omega")) cfg.grid.omega_points = count(g["omega"], "grid.omega");
        if (g.contains("phase")) cfg.grid.phase_points = count(g["phase"], "grid.phase");
        if (g.contains("omega_range")) {
            const json& r = g["omega_range"];
            if (!r.is_array() || r.size() != 2) throw ConfigError("run config: 'grid.omega_range' needs 2 numbers");
            cfg.grid.omega_range = std::make_pair(number(r[0], "omega_range"), number(r[1], "omega_range"));
            if (!(cfg.grid.omega_range->first < cfg.grid.omega_range->second))
                throw ConfigError("run config: empty 'grid.omega_range'");
        }
    }
    if (j.contains("tol")) cfg.tol = number(j["tol"], "tol");
    if (j.contains("rank_tol")) cfg.rank_tol = number(j["rank_tol"], "rank_tol");
    if (j.contains("margin")) cfg.margin = number(j["margin"], "margin");
    if (j.contains("delta")) cfg.delta = number(j["delta"], "delta");
    if (j.contains("distance_cap")) cfg.distance_cap = number(j["distance_cap"], "distance_cap");
    if (j.contains("output")) {
        const json& o = j["output"];
        if (!o.is_object()) throw ConfigError("run config: 'output' must be an object");
        if (o.contains("dir")) {
            cfg.output_dir = o["dir"].get<std::string>();
            if (cfg.output_dir.is_relative()) cfg.output_dir = base_dir / cfg.output_dir;
        }
        if (o.contains("format")) cfg.format = o["format"].get<std::string>();
    }
    return cfg;
}

} // namespace

void RunConfig::validate() const { check_config(*this, true); }

RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("run config: ") + e.what());
    }
    RunConfig cfg;
    try {
        cfg = parse_fields(j, base_dir);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("run config: ") + e.what());
    }
    check_config(cfg, false);
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot read run config " + path.string());
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_run_config(ss.str(), path.parent_path());
}

// ---------------------------------------------------------------------------

Rectangle default_window(const DelaySystem& sys, Epsilon eps, const ExtendedReal& sup_n) {
    const double n = static_cast<double>(sys.delay_count());
    const double s = sup_n.is_finite() ? std::abs(sup_n.value()) : 10.0;
    const double limit = 0.9 * guard_limit(sys, eps);
    double half = std::min(10.0 * std::pow(eps.value(), n) * (1.0 + s), limit);
    double re_max = half;
    const StrongSpectrum strong = strong_spectrum(sys);
    for (const auto& mu : strong.S0_plus) re_max = std::max(re_max, std::min(limit, mu.real() + 2.0 * strong.r));
    const double big = omega_bound(sys);
    return Rectangle{-half, re_max, -big, big};
}

void check_window(const DelaySystem& sys, Epsilon eps, const Rectangle& window) {
    window.validate();
    check_evaluation_domain(sys, eps, Complex(window.re_min, 0.0));
    check_evaluation_domain(sys, eps, Complex(window.re_max, 0.0));
}

SpectrumRecord compute_spectrum(const DelaySystem& sys, Epsilon eps, const Rectangle& window,
                                const RootFinderOptions& opts) {
    check_window(sys, eps, window);
    CharacteristicFunction chi(sys, eps);
    AnalyticFunction f{[&](Complex z) { return chi.value(z); }, [&](Complex z) { return chi.derivative(z); },
                       chi.oscillation_rate(), 0.0};
    SpectrumRecord rec;
    rec.eps = eps.value();
    rec.window = window;
    rec.roots = find_roots(f, window, opts);
    return rec;
}

void write_spectrum_csv(std::ostream& os, const std::vector<SpectrumRecord>& records) {
    os << "eps,re,im,multiplicity,residual\n";
    for (const auto& r : records)
        for (const auto& root : r.roots)
            os << fmt17(r.eps) << ',' << fmt17(root.location.real()) << ',' << fmt17(root.location.imag()) << ','
               << root.multiplicity << ',' << fmt17(root.residual) << '\n';
}

// ---------------------------------------------------------------------------

AsymptoticSpectra::AsymptoticSpectra(const DelaySystem& sys, const ValidateOptions& opts)
    : sys_(&sys), opts_(opts), ladder_(build_ladder(sys, opts.rank_tol)) {
    const StrongSpectrum strong = strong_spectrum(sys);
    strong_points_ = strong.S0_plus;
    radius_ = strong.r;
    try {
        for (const auto& mu : strong_stable_spectrum(ladder_, opts.rank_tol)) strong_points_.push_back(mu);
    } catch (const DegeneracyError&) {
    }
    for (std::size_t k = 1; k <= sys.delay_count(); ++k) {
        auto pts = assemble_A_k(sys, ladder_, k, opts.grid);
        std::sort(pts.begin(), pts.end(), [](const Complex& a, const Complex& b) { return a.imag() < b.imag(); });
        samples_.push_back(std::move(pts));
    }
}

std::optional<double> AsymptoticSpectra::distance(std::size_t k, Complex z) const {
    const auto& pts = samples_.at(k - 1);
    double best = std::numeric_limits<double>::infinity();
    auto it = std::lower_bound(pts.begin(), pts.end(), z.imag(),
                               [](const Complex& p, double w) { return p.imag() < w; });
    for (auto up = it; up != pts.end() && up->imag() - z.imag() < best; ++up) best = std::min(best, std::abs(*up - z));
    for (auto dn = it; dn != pts.begin();) {
        --dn;
        if (z.imag() - dn->imag() >= best) break;
        best = std::min(best, std::abs(*dn - z));
    }
    if (const auto s = slice_distance(*sys_, ladder_, k, z, opts_.grid, opts_.slice_phase_points))
        best = std::min(best, *s);
    if (!std::isfinite(best)) return std::nullopt;
    return best;
}

EpsReport assign_roots(const AsymptoticSpectra& spectra, Epsilon eps, const SpectrumRecord& spectrum,
                       std::size_t n, double distance_cap) {
    EpsReport rep;
    rep.eps = eps.value();
    rep.window = spectrum.window;
    constexpr double inf = std::numeric_limits<double>::infinity();

    for (const auto& root : spectrum.roots) {
        rep.eigenvalue_count += root.multiplicity;
        rep.max_abs_re = std::max(rep.max_abs_re, std::abs(root.location.real()));
        Assignment a;
        a.lambda = root.location;
        a.multiplicity = root.multiplicity;

        double strong_best = inf;
        std::optional<Complex> strong_mu;
        for (const auto& mu : spectra.strong_points()) {
            const double d = std::abs(root.location - mu);
            if (d < spectra.radius() && d < strong_best) {
                strong_best = d;
                strong_mu = mu;
            }
        }

        std::vector<std::pair<double, std::size_t>> dist;
        for (std::size_t k = 1; k <= n; ++k) {
            const auto d = spectra.distance(k, rescale(eps, k, root.location));
            dist.emplace_back(d.value_or(inf), k);
        }
        std::sort(dist.begin(), dist.end());

        if (strong_mu) {
            a.scale = 0;
            a.nearest_scale = 0;
            a.rescaled = root.location;
            a.distance = strong_best;
            a.runner_up = dist.front().second;
            a.runner_up_distance = dist.front().first;
            rep.strong_matches.push_back(root.location);
        } else {
            a.nearest_scale = dist.front().second;
            a.rescaled = rescale(eps, a.nearest_scale, root.location);
            a.distance = dist.front().first;
            if (dist.size() > 1) {
                a.runner_up = dist[1].second;
                a.runner_up_distance = dist[1].first;
            }
            if (a.distance <= distance_cap) a.scale = a.nearest_scale;
            else ++rep.unassigned;
        }
        if (a.scale) {
            auto& m = rep.max_distance[*a.scale];
            m = std::max(m, a.distance);
            rep.family_size[*a.scale] += a.multiplicity;
        }
        rep.assignments.push_back(a);
    }
    return rep;
}

ValidationReport validate_spectrum(const DelaySystem& sys, const std::vector<double>& eps_list,
                                   const std::vector<Rectangle>& windows, const ValidateOptions& opts) {
    if (eps_list.size() != windows.size()) throw ConfigError("validate: need one window per eps");
    ValidateOptions o = opts;
    if (!o.grid.omega_range) {
        const double big = omega_bound(sys);
        double lo = -big;
        double hi = big;
        for (const auto& w : windows) {
            lo = std::min(lo, w.im_min);
            hi = std::max(hi, w.im_max);
        }
        o.grid.omega_range = std::make_pair(lo, hi);
    }
    const AsymptoticSpectra spectra(sys, o);

    ValidationReport report;
    report.notes = spectra.ladder().warnings;
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        const Epsilon eps(eps_list[i]);
        const SpectrumRecord rec = compute_spectrum(sys, eps, windows[i], o.roots);
        report.records.push_back(assign_roots(spectra, eps, rec, sys.delay_count(), o.distance_cap));
    }
    for (std::size_t k = 0; k <= sys.delay_count(); ++k) {
        bool ok = true;
        bool seen = false;
        for (std::size_t i = 1; i < report.records.size(); ++i) {
            const auto& prev = report.records[i - 1].max_distance;
            const auto& cur = report.records[i].max_distance;
            if (!prev.count(k) || !cur.count(k)) continue;
            seen = true;
            if (cur.at(k) > 2.0 * prev.at(k) + 1e-12) ok = false;
        }
        if (seen) report.nonincreasing[k] = ok;
    }
    return report;
}

std::string ValidationReport::to_json() const {
    json j;
    j["records"] = json::array();
    for (const auto& r : records) {
        json rec;
        rec["eps"] = r.eps;
        rec["window"] = {r.window.re_min, r.window.re_max, r.window.im_min, r.window.im_max};
        rec["eigenvalue_count"] = r.eigenvalue_count;
        rec["max_abs_re"] = r.max_abs_re;
        rec["unassigned"] = r.unassigned;
        json md = json::object();
        for (const auto& [k, d] : r.max_distance) md[std::to_string(k)] = d;
        rec["max_distance"] = md;
        json fs = json::object();
        for (const auto& [k, c] : r.family_size) fs[std::to_string(k)] = c;
        rec["family_size"] = fs;
        rec["strong_matches"] = json::array();
        for (const auto& z : r.strong_matches) rec["strong_matches"].push_back(complex_json(z));
        rec["assignments"] = json::array();
        for (const auto& a : r.assignments) {
            json x{{"lambda", complex_json(a.lambda)},
                   {"multiplicity", a.multiplicity},
                   {"scale", a.scale ? json(*a.scale) : json(nullptr)},
                   {"nearest_scale", a.nearest_scale},
                   {"rescaled", complex_json(a.rescaled)},
                   {"distance", std::isfinite(a.distance) ? json(a.distance) : json("inf")}};
            if (a.runner_up) {
                x["runner_up"] = *a.runner_up;
                x["runner_up_distance"] =
                    std::isfinite(a.runner_up_distance) ? json(a.runner_up_distance) : json("inf");
            }
            rec["assignments"].push_back(std::move(x));
        }
        j["records"].push_back(std::move(rec));
    }
    json ni = json::object();
    for (const auto& [k, ok] : nonincreasing) ni[std::to_string(k)] = ok;
    j["nonincreasing"] = ni;
    j["notes"] = notes;
    return j.dump(2);
}

// ---------------------------------------------------------------------------

std::vector<Rectangle> resolve_windows(const RunConfig& cfg) {
    cfg.validate();
    std::vector<Rectangle> out;
    if (cfg.window) {
        out.assign(cfg.eps_list.size(), *cfg.window);
        return out;
    }
    SupSearchConfig search;
    search.grid = cfg.grid;
    const ExtendedReal sup_n = sup_gamma(*cfg.system, cfg.system->delay_count(), search).sup;
    for (double e : cfg.eps_list) out.push_back(default_window(*cfg.system, Epsilon(e), sup_n));
    return out;
}

std::vector<std::filesystem::path> run_spectrum(const RunConfig& cfg) {
    const auto windows = resolve_windows(cfg);
    RootFinderOptions opts;
    opts.tol = cfg.tol;
    std::vector<SpectrumRecord> records;
    for (std::size_t i = 0; i < cfg.eps_list.size(); ++i)
        records.push_back(compute_spectrum(*cfg.system, Epsilon(cfg.eps_list[i]), windows[i], opts));

    ensure_dir(cfg.output_dir);
    if (cfg.format == "json") {
        json j = json::array();
        for (const auto& r : records) {
            json rec{{"eps", r.eps}, {"window", {r.window.re_min, r.window.re_max, r.window.im_min, r.window.im_max}}};
            rec["roots"] = json::array();
            for (const auto& root : r.roots)
                rec["roots"].push_back({{"re", root.location.real()},
                                        {"im", root.location.imag()},
                                        {"multiplicity", root.multiplicity},
                                        {"residual", root.residual}});
            j.push_back(std::move(rec));
        }
        const auto path = cfg.output_dir / "spectrum.json";
        open_out(path) << j.dump(2) << '\n';
        return {path};
    }
    const auto path = cfg.output_dir / "spectrum.csv";
    auto os = open_out(path);
    write_spectrum_csv(os, records);
    return {path};
}

std::vector<std::filesystem::path> run_validate(const RunConfig& cfg) {
    const auto windows = resolve_windows(cfg);
    ValidateOptions opts;
    opts.grid = cfg.grid;
    opts.roots.tol = cfg.tol;
    opts.rank_tol = cfg.rank_tol;
    opts.distance_cap = cfg.distance_cap;
    ValidationReport report = validate_spectrum(*cfg.system, cfg.eps_list, windows, opts);
    if (!report.records.empty()) {
        const auto& last = report.records.back();
        if (last.max_abs_re >= cfg.delta)
            report.notes.push_back("some eigenvalue has |Re| >= delta at the smallest eps");
    }
    ensure_dir(cfg.output_dir);
    const auto path = cfg.output_dir / "validation.json";
    open_out(path) << report.to_json() << '\n';
    return {path};
}

std::vector<std::filesystem::path> run_manifolds(const RunConfig& cfg) {
    check_config(cfg, false);
    const DelaySystem& sys = *cfg.system;
    const double big = omega_bound(sys);
    const auto range = cfg.grid.omega_range.value_or(std::make_pair(-big, big));
    const DegeneracyLadder ladder = build_ladder(sys, cfg.rank_tol);

    std::vector<ManifoldSample> all;
    for (std::size_t k = 1; k <= sys.delay_count(); ++k) {
        auto s = sample_manifold(full_level(sys, k, cfg.rank_tol), cfg.grid, range);
        all.insert(all.end(), s.begin(), s.end());
        if (const auto tl = tilde_level(ladder, sys, k, cfg.rank_tol)) {
            auto t = sample_manifold(*tl, cfg.grid, range);
            all.insert(all.end(), t.begin(), t.end());
        }
    }
    ensure_dir(cfg.output_dir);
    const auto path = cfg.output_dir / "manifolds.csv";
    auto os = open_out(path);
    write_manifold_csv(os, all, sys.delay_count());
    return {path};
}

std::vector<std::filesystem::path> run_classify(const RunConfig& cfg) {
    check_config(cfg, false);
    const DegeneracyLadder ladder = build_ladder(*cfg.system, cfg.rank_tol);
    ClassifyOptions opts;
    opts.margin = cfg.margin;
    opts.search.grid = cfg.grid;
    const StabilityVerdict v = classify(*cfg.system, ladder, opts);
    ensure_dir(cfg.output_dir);
    std::vector<std::filesystem::path> out;
    const auto txt = cfg.output_dir / "verdict.txt";
    open_out(txt) << verdict_text(v);
    out.push_back(txt);
    if (cfg.format == "json") {
        const auto js = cfg.output_dir / "verdict.json";
        open_out(js) << verdict_json(v) << '\n';
        out.push_back(js);
    }
    return out;
}

// ---------------------------------------------------------------------------

const std::vector<ExamplePreset>& example_presets() {
    static const std::vector<ExamplePreset> presets{
        {"fig2-stable", {Complex(-0.4, 0.5), 0.1, 0.2}},
        {"fig2-neutral", {Complex(-0.4, 0.5), 0.1, 0.3}},
        {"fig2-unstable", {Complex(-0.4, 0.5), 0.1, 0.4}},
        {"fig3", {Complex(-0.4, 0.5), 0.5, 0.3}},
    };
    return presets;
}

const ExamplePreset& example_preset(const std::string& name) {
    for (const auto& p : example_presets())
        if (p.name == name) return p;
    throw ConfigError("unknown example '" + name + "' (expected fig2-stable, fig2-neutral, fig2-unstable or fig3)");
}

DelaySystem scalar_system(const scalar2::ScalarParams& p) {
    p.validate();
    return DelaySystem::scalar({p.a, p.b, p.c}, {1.0, 1.0});
}

namespace {

double gap(const ExtendedReal& x, const ExtendedReal& y) {
    if (x.is_finite() && y.is_finite()) return std::abs(x.value() - y.value());
    return x == y ? 0.0 : std::numeric_limits<double>::infinity();
}

} // namespace

ExampleResult run_example(const std::string& name, const std::filesystem::path& output_dir, const GridConfig& grid) {
    const ExamplePreset& preset = example_preset(name);
    const scalar2::ScalarParams& p = preset.params;
    const DelaySystem sys = scalar_system(p);

    ExampleResult res;
    res.name = name;
    res.sup1_closed = scalar2::sup_gamma1(p);
    res.sup2_closed = scalar2::sup_gamma2(p);
    SupSearchConfig search;
    search.grid = grid;
    res.sup1_general = sup_gamma(sys, 1, search).sup;
    res.sup2_general = sup_gamma(sys, 2, search).sup;
    res.sup_discrepancy = std::max(gap(res.sup1_closed, res.sup1_general), gap(res.sup2_closed, res.sup2_general));
    res.verdict_closed = scalar2::classify_scalar(p);
    ClassifyOptions copts;
    copts.search = search;
    res.verdict_general = classify(sys, build_ladder(sys), copts);
    res.singular = scalar2::phi_singular(p);

    ensure_dir(output_dir);
    const double big = omega_bound(sys);
    const auto range = grid.omega_range.value_or(std::make_pair(-big, big));
    const std::size_t no = std::max<std::size_t>(grid.omega_points, 2);

    const CharLevel l1 = full_level(sys, 1);
    const auto g1_path = output_dir / (name + "_gamma1.csv");
    {
        auto os = open_out(g1_path);
        os << "omega,gamma_closed,gamma_general\n";
        for (std::size_t i = 0; i < no; ++i) {
            const double w = range.first + (range.second - range.first) * static_cast<double>(i) /
                                               static_cast<double>(no - 1);
            const ExtendedReal c = scalar2::gamma1(p, w);
            const ExtendedReal g = max_gamma(l1, PhasePoint{w, {}});
            res.gamma1_discrepancy = std::max(res.gamma1_discrepancy, gap(c, g));
            os << fmt17(w) << ',' << c.to_string() << ',' << g.to_string() << '\n';
        }
    }
    const CharLevel l2 = full_level(sys, 2);
    const auto g2_path = output_dir / (name + "_gamma2.csv");
    {
        auto os = open_out(g2_path);
        os << "omega,phi_1,gamma_closed,gamma_general\n";
        for (std::size_t i = 0; i < no; ++i) {
            const double w = range.first + (range.second - range.first) * static_cast<double>(i) /
                                               static_cast<double>(no - 1);
            for (std::size_t j = 0; j < grid.phase_points; ++j) {
                const double phi = kTwoPi * static_cast<double>(j) / static_cast<double>(grid.phase_points);
                const ExtendedReal c = scalar2::gamma2(p, w, phi);
                const ExtendedReal g = max_gamma(l2, PhasePoint{w, {phi}});
                res.gamma2_discrepancy = std::max(res.gamma2_discrepancy, gap(c, g));
                os << fmt17(w) << ',' << fmt17(phi) << ',' << c.to_string() << ',' << g.to_string() << '\n';
            }
        }
    }

    json j;
    j["name"] = name;
    j["params"] = {{"a", complex_json(p.a)}, {"b", complex_json(p.b)}, {"c", complex_json(p.c)}};
    j["sup_gamma1"] = {{"closed", ext_json(res.sup1_closed)}, {"general", ext_json(res.sup1_general)}};
    j["sup_gamma2"] = {{"closed", ext_json(res.sup2_closed)}, {"general", ext_json(res.sup2_general)}};
    j["max_discrepancy"] = {{"sup", res.sup_discrepancy},
                            {"gamma1", res.gamma1_discrepancy},
                            {"gamma2", res.gamma2_discrepancy}};
    j["verdict_closed"] = json::parse(verdict_json(res.verdict_closed));
    j["verdict_general"] = json::parse(verdict_json(res.verdict_general));
    if (const auto z = scalar2::gamma1_zeros(p)) j["gamma1_zeros"] = {z->first, z->second};
    if (res.singular) {
        j["singular_phases"] = json::array();
        for (const auto& s : {res.singular->first, res.singular->second}) {
            const SingularityFlags f = singularity_test(sys, 2, make_point(s.omega, {s.phi}, sys.sigmas()));
            j["singular_phases"].push_back(
                {{"omega", s.omega}, {"phi", s.phi}, {"residual", s.residual}, {"plus_flag", f.plus_infinity}});
        }
    }
    const auto summary = output_dir / (name + "_summary.json");
    open_out(summary) << j.dump(2) << '\n';
    res.files = {summary, g1_path, g2_path};
    return res;
}

} // namespace hdde
