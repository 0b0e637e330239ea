#include "hdde/classify.hpp"

#include "hdde/errors.hpp"
#include "fmt.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace hdde {

namespace {

using detail::fmt17;

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kHuge = 1e300;

PhasePoint to_point(const std::vector<double>& x) {
    PhasePoint p;
    p.omega = x[0];
    p.phi.assign(x.begin() + 1, x.end());
    return p;
}

PhasePoint canonical(const CharLevel& level, const std::vector<double>& x) {
    return make_point(x[0], std::vector<double>(x.begin() + 1, x.end()), level.sigma);
}

// |det B| relative to the natural size of B, and whether +inf is genuine.
struct DetProbe {
    double rel = 0.0;
    bool plus = false;
};

DetProbe probe(const CharLevel& level, const std::vector<double>& x) {
    const ComplexMatrix b = base_matrix(level, to_point(x));
    const double scale = std::pow(std::max(1.0, norm2(b)), static_cast<double>(level.dim()));
    DetProbe out;
    out.rel = std::abs(det(b)) / scale;
    if (out.rel <= 1e-12) {
        try {
            out.plus = max_gamma(level, to_point(x)).is_pos_inf();
        } catch (const TrivialityError&) {
            out.plus = false;
        }
    }
    return out;
}

// Solve the small dense real system a x = rhs by Gaussian elimination.
bool solve_small(std::vector<std::vector<double>> a, std::vector<double>& rhs) {
    const std::size_t n = rhs.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        if (std::abs(a[piv][c]) < 1e-300) return false;
        std::swap(a[c], a[piv]);
        std::swap(rhs[c], rhs[piv]);
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = a[r][c] / a[c][c];
            for (std::size_t j = c; j < n; ++j) a[r][j] -= f * a[c][j];
            rhs[r] -= f * rhs[c];
        }
    }
    for (std::size_t c = n; c-- > 0;) {
        for (std::size_t j = c + 1; j < n; ++j) rhs[c] -= a[c][j] * rhs[j];
        rhs[c] /= a[c][c];
    }
    return true;
}

// Levenberg-Marquardt on det B(x) = 0; returns the point if it converged to
// a genuine +inf singularity.
std::optional<std::vector<double>> find_singularity(const CharLevel& level, std::vector<double> x) {
    const std::size_t n = x.size();
    auto residual = [&](const std::vector<double>& p) { return det(base_matrix(level, to_point(p))); };
    double mu = 1e-6;
    Complex r = residual(x);
    for (int it = 0; it < 60; ++it) {
        std::vector<std::array<double, 2>> jac(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double h = 1e-7 * std::max(1.0, std::abs(x[i]));
            auto xp = x;
            auto xm = x;
            xp[i] += h;
            xm[i] -= h;
            const Complex d = (residual(xp) - residual(xm)) / (2.0 * h);
            jac[i] = {d.real(), d.imag()};
        }
        std::vector<std::vector<double>> jtj(n, std::vector<double>(n, 0.0));
        std::vector<double> g(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) jtj[i][j] = jac[i][0] * jac[j][0] + jac[i][1] * jac[j][1];
            g[i] = -(jac[i][0] * r.real() + jac[i][1] * r.imag());
        }
        double diag = 0.0;
        for (std::size_t i = 0; i < n; ++i) diag = std::max(diag, jtj[i][i]);
        bool improved = false;
        for (int tries = 0; tries < 8 && !improved; ++tries) {
            auto a = jtj;
            for (std::size_t i = 0; i < n; ++i) a[i][i] += mu * std::max(diag, 1e-300);
            auto step = g;
            if (!solve_small(a, step)) {
                mu *= 10.0;
                continue;
            }
            auto xn = x;
            for (std::size_t i = 0; i < n; ++i) xn[i] += step[i];
            const Complex rn = residual(xn);
            if (std::abs(rn) < std::abs(r)) {
                x = std::move(xn);
                r = rn;
                mu = std::max(mu * 0.1, 1e-12);
                improved = true;
            } else {
                mu *= 10.0;
            }
        }
        if (!improved) break;
        if (probe(level, x).plus) return x;
    }
    if (probe(level, x).plus) return x;
    return std::nullopt;
}

struct NmResult {
    std::vector<double> x;
    double f = kHuge;
    double size = 0.0;
    std::optional<std::vector<double>> singular;
};

// Nelder-Mead minimisation of -gamma_max.
NmResult nelder_mead(const CharLevel& level, std::vector<double> x0, const std::vector<double>& step, int max_iter) {
    const std::size_t n = x0.size();
    NmResult res;
    auto f = [&](const std::vector<double>& x) -> double {
        try {
            const ExtendedReal g = max_gamma(level, to_point(x));
            if (g.is_pos_inf()) {
                res.singular = x;
                return -kHuge;
            }
            if (g.is_neg_inf()) return kHuge;
            return -g.value();
        } catch (const TrivialityError&) {
            return kHuge;
        }
    };
    std::vector<std::vector<double>> s(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i) s[i + 1][i] += step[i];
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i <= n; ++i) fv[i] = f(s[i]);

    auto order = [&] {
        std::vector<std::size_t> idx(n + 1);
        for (std::size_t i = 0; i <= n; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        std::vector<std::vector<double>> s2;
        std::vector<double> f2;
        for (auto i : idx) {
            s2.push_back(s[i]);
            f2.push_back(fv[i]);
        }
        s = std::move(s2);
        fv = std::move(f2);
    };
    auto diameter = [&] {
        double d = 0.0;
        for (std::size_t i = 1; i <= n; ++i)
            for (std::size_t j = 0; j < n; ++j) d = std::max(d, std::abs(s[i][j] - s[0][j]));
        return d;
    };

    for (int it = 0; it < max_iter && !res.singular; ++it) {
        order();
        if (diameter() < 1e-11 && std::abs(fv[n] - fv[0]) < 1e-14) break;
        std::vector<double> c(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) c[j] += s[i][j] / static_cast<double>(n);
        auto along = [&](double t) {
            std::vector<double> x(n);
            for (std::size_t j = 0; j < n; ++j) x[j] = c[j] + t * (s[n][j] - c[j]);
            return x;
        };
        const auto xr = along(-1.0);
        const double fr = f(xr);
        if (fr < fv[0]) {
            const auto xe = along(-2.0);
            const double fe = f(xe);
            if (fe < fr) {
                s[n] = xe;
                fv[n] = fe;
            } else {
                s[n] = xr;
                fv[n] = fr;
            }
        } else if (fr < fv[n - 1]) {
            s[n] = xr;
            fv[n] = fr;
        } else {
            const bool outside = fr < fv[n];
            const auto xc = along(outside ? -0.5 : 0.5);
            const double fc = f(xc);
            if (fc < std::min(fr, fv[n])) {
                s[n] = xc;
                fv[n] = fc;
            } else {
                for (std::size_t i = 1; i <= n; ++i) {
                    for (std::size_t j = 0; j < n; ++j) s[i][j] = s[0][j] + 0.5 * (s[i][j] - s[0][j]);
                    fv[i] = f(s[i]);
                }
            }
        }
    }
    order();
    res.x = s[0];
    res.f = fv[0];
    res.size = diameter();
    return res;
}

struct GridCell {
    std::vector<double> x;
    ExtendedReal gamma;
    double det_rel = 0.0;
};

SupResult search(const CharLevel& level, const SupSearchConfig& cfg, std::pair<double, double> range) {
    const std::size_t dims = level.k;
    const std::size_t no = std::max<std::size_t>(cfg.grid.omega_points, 2);
    const std::size_t np = std::max<std::size_t>(cfg.grid.phase_points, 1);

    std::vector<double> step(dims);
    step[0] = (range.second - range.first) / static_cast<double>(no - 1);
    for (std::size_t j = 1; j < dims; ++j) step[j] = kTwoPi / level.sigma[j - 1] / static_cast<double>(np);

    std::vector<GridCell> cells;
    std::vector<std::size_t> idx(dims, 0);
    std::size_t total = no;
    for (std::size_t j = 1; j < dims; ++j) total *= np;
    cells.reserve(total);
    for (std::size_t t = 0; t < total; ++t) {
        std::size_t rem = t;
        std::vector<double> x(dims);
        for (std::size_t j = dims; j-- > 1;) {
            x[j] = step[j] * static_cast<double>(rem % np);
            rem /= np;
        }
        x[0] = range.first + step[0] * static_cast<double>(rem);
        GridCell cell;
        cell.x = std::move(x);
        try {
            cell.gamma = max_gamma(level, to_point(cell.x));
        } catch (const TrivialityError&) {
            cell.gamma = ExtendedReal::neg_inf();
        }
        cell.det_rel = probe(level, cell.x).rel;
        cells.push_back(std::move(cell));
    }

    auto singular_result = [&](const std::vector<double>& x) {
        SupResult out;
        out.sup = ExtendedReal::pos_inf();
        out.argmax = ManifoldWitness{level.k, canonical(level, x), 0, ExtendedReal::pos_inf()};
        return out;
    };
    for (const auto& c : cells)
        if (c.gamma.is_pos_inf()) return singular_result(c.x);

    const std::size_t seeds = std::min(cfg.refine_seeds, cells.size());
    std::vector<std::size_t> by_gamma(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) by_gamma[i] = i;
    std::vector<std::size_t> by_det = by_gamma;
    std::partial_sort(by_gamma.begin(), by_gamma.begin() + static_cast<std::ptrdiff_t>(seeds), by_gamma.end(),
                      [&](std::size_t a, std::size_t b) { return cells[b].gamma < cells[a].gamma; });
    std::partial_sort(by_det.begin(), by_det.begin() + static_cast<std::ptrdiff_t>(seeds), by_det.end(),
                      [&](std::size_t a, std::size_t b) { return cells[a].det_rel < cells[b].det_rel; });

    for (std::size_t i = 0; i < seeds; ++i) {
        for (std::size_t id : {by_gamma[i], by_det[i]}) {
            if (auto hit = find_singularity(level, cells[id].x)) return singular_result(*hit);
        }
    }

    NmResult best;
    bool have = false;
    for (std::size_t i = 0; i < seeds; ++i) {
        const auto& cell = cells[by_gamma[i]];
        if (cell.gamma.is_neg_inf()) continue;
        NmResult r = nelder_mead(level, cell.x, step, cfg.max_iterations);
        if (r.singular) return singular_result(*r.singular);
        if (!have || r.f < best.f) {
            best = std::move(r);
            have = true;
        }
    }

    SupResult out;
    if (!have) {
        out.sup = ExtendedReal::neg_inf();
        out.argmax = ManifoldWitness{level.k, canonical(level, cells.front().x), 0, ExtendedReal::neg_inf()};
        return out;
    }
    const double gmax = -best.f;
    out.sup = ExtendedReal::finite(gmax);
    out.argmax = ManifoldWitness{level.k, canonical(level, best.x), 0, out.sup};

    const double h = std::max(best.size, 1e-8);
    for (std::size_t j = 0; j < dims; ++j) {
        for (double sgn : {-1.0, 1.0}) {
            auto x = best.x;
            x[j] += sgn * h;
            try {
                const ExtendedReal g = max_gamma(level, to_point(x));
                if (g.is_finite()) out.uncertainty = std::max(out.uncertainty, std::abs(g.value() - gmax));
            } catch (const TrivialityError&) {
            }
        }
    }
    return out;
}

} // namespace

std::string to_string(Stability s) {
    switch (s) {
    case Stability::StronglyUnstable: return "StronglyUnstable";
    case Stability::WeaklyUnstable: return "WeaklyUnstable";
    case Stability::Stable: return "Stable";
    case Stability::Marginal: return "Marginal";
    }
    return "Unknown";
}

SupResult sup_gamma(const CharLevel& level, const SupSearchConfig& cfg, std::pair<double, double> omega_range) {
    if (!(omega_range.first < omega_range.second)) throw ConfigError("sup_gamma: empty omega window");
    SupResult out = search(level, cfg, omega_range);
    if (!cfg.leakage_check || !out.sup.is_finite()) return out;

    const double width = omega_range.second - omega_range.first;
    const double w = out.argmax.point.omega;
    if (w - omega_range.first < 0.05 * width || omega_range.second - w < 0.05 * width) {
        const double mid = 0.5 * (omega_range.first + omega_range.second);
        SupResult wide = search(level, cfg, {mid - width, mid + width});
        std::string msg = "argmax omega " + fmt17(w) + " lies within 5% of the search window edge";
        if (out.sup < wide.sup) {
            wide.warnings.push_back(msg + "; the doubled window found a larger value");
            return wide;
        }
        out.warnings.push_back(msg + "; the doubled window did not improve it");
    }
    return out;
}

SupResult sup_gamma(const DelaySystem& sys, std::size_t k, const SupSearchConfig& cfg) {
    const double big = omega_bound(sys);
    return sup_gamma(full_level(sys, k), cfg, cfg.grid.omega_range.value_or(std::make_pair(-big, big)));
}

StabilityVerdict classify(const DelaySystem& sys, const DegeneracyLadder& ladder, const ClassifyOptions& opts) {
    if (!ladder.nd_satisfied) {
        throw NdViolation("condition (ND) fails: the projected system degenerates to an ODE\n" +
                          describe_ladder(ladder));
    }
    StabilityVerdict v;
    v.notes = ladder.warnings;
    const StrongSpectrum strong = strong_spectrum(sys);

    const std::size_t n = sys.delay_count();
    for (std::size_t k = 1; k <= n; ++k) {
        try {
            const SupResult r = sup_gamma(sys, k, opts.search);
            SupEstimate e;
            e.k = k;
            e.sup = r.sup;
            e.uncertainty = r.uncertainty;
            e.argmax = r.argmax;
            v.sups.push_back(e);
            for (const auto& w : r.warnings) v.notes.push_back("k=" + std::to_string(k) + ": " + w);
        } catch (const TrivialityError&) {
            if (k == n) throw;
            v.notes.push_back("chi_" + std::to_string(k) + " vanishes identically; scale skipped");
        }
    }

    if (!strong.S0_plus.empty()) {
        v.status = Stability::StronglyUnstable;
        v.strong_witness = strong.S0_plus.back();
        return v;
    }

    bool all_negative = true;
    for (const auto& e : v.sups) {
        const double band = opts.margin + e.uncertainty;
        if (e.sup.is_pos_inf() || (e.sup.is_finite() && e.sup.value() > band)) {
            v.status = Stability::WeaklyUnstable;
            v.scale = e.k;
            v.manifold_witness = e.argmax;
            if (e.k < n) {
                v.notes.push_back("destabilized at scale " + std::to_string(e.k) + " < n; generic destabilization "
                                  "goes through the scale-n manifold");
            }
            return v;
        }
        if (e.sup.is_finite() && e.sup.value() >= -band) all_negative = false;
    }
    v.status = all_negative ? Stability::Stable : Stability::Marginal;
    return v;
}

std::string verdict_text(const StabilityVerdict& v) {
    std::ostringstream os;
    os << "status: " << to_string(v.status);
    if (v.scale) os << " (scale " << *v.scale << ")";
    os << '\n';
    if (v.strong_witness)
        os << "strong witness: " << fmt17(v.strong_witness->real()) << " + " << fmt17(v.strong_witness->imag()) << "i\n";
    if (v.manifold_witness) {
        const auto& w = *v.manifold_witness;
        os << "manifold witness: k=" << w.k << " omega=" << fmt17(w.point.omega);
        for (std::size_t j = 0; j < w.point.phi.size(); ++j) os << " phi_" << j + 1 << "=" << fmt17(w.point.phi[j]);
        os << " branch=" << w.branch << " gamma=" << w.gamma.to_string() << '\n';
    }
    os << "k,sup_gamma,uncertainty\n";
    for (const auto& e : v.sups) os << e.k << ',' << e.sup.to_string() << ',' << fmt17(e.uncertainty) << '\n';
    for (const auto& n : v.notes) os << "note: " << n << '\n';
    return os.str();
}

std::string verdict_json(const StabilityVerdict& v) {
    using nlohmann::json;
    auto ext = [](const ExtendedReal& g) -> json {
        if (g.is_finite()) return g.value();
        return g.to_string();
    };
    auto point = [](const PhasePoint& p) { return json{{"omega", p.omega}, {"phi", p.phi}}; };
    json j;
    j["status"] = to_string(v.status);
    j["scale"] = v.scale ? json(*v.scale) : json(nullptr);
    if (v.strong_witness) j["strong_witness"] = {v.strong_witness->real(), v.strong_witness->imag()};
    if (v.manifold_witness) {
        const auto& w = *v.manifold_witness;
        j["manifold_witness"] = {{"k", w.k}, {"point", point(w.point)}, {"branch", w.branch}, {"gamma", ext(w.gamma)}};
    }
    j["sups"] = json::array();
    for (const auto& e : v.sups) {
        json row{{"k", e.k}, {"sup", ext(e.sup)}, {"uncertainty", e.uncertainty}};
        if (e.argmax) row["argmax"] = point(e.argmax->point);
        j["sups"].push_back(row);
    }
    j["notes"] = v.notes;
    return j.dump(2);
}

} // namespace hdde
