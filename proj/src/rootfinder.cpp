#include "hdde/rootfinder.hpp"

#include "hdde/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

namespace hdde {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_phase(double d) noexcept {
    while (d > std::numbers::pi) d -= kTwoPi;
    while (d <= -std::numbers::pi) d += kTwoPi;
    return d;
}

class PhaseTracker {
public:
    PhaseTracker(const AnalyticFunction& f, const RootFinderOptions& opts) : f_(f), opts_(opts) {}

    Complex eval(Complex z) const {
        const Complex v = f_.value(z);
        if (v == Complex{}) throw BoundaryZeroError("zero on the contour at " + describe(z));
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw RangeError("non-finite function value at " + describe(z));
        return v;
    }

    // Total change of arg f along the straight segment a -> b.
    double segment(Complex a, Complex b) const {
        const double len = std::abs(b - a);
        const bool vertical = std::abs(b.real() - a.real()) < std::abs(b.imag() - a.imag());
        const double rate = vertical ? f_.im_rate : f_.re_rate;
        const double step = 0.5 * opts_.max_phase_step;
        const double want = rate > 0.0 ? std::ceil(len * rate / step) : 0.0;
        const auto samples = static_cast<std::size_t>(std::clamp(want, 8.0, 5e7));

        double total = 0.0;
        Sample sa = sample(a);
        for (std::size_t i = 1; i <= samples; ++i) {
            const Complex zb = i == samples ? b : a + (b - a) * (static_cast<double>(i) / static_cast<double>(samples));
            const Sample sb = sample(zb);
            total += refine(sa, sb, 0);
            sa = sb;
        }
        return total;
    }

private:
    struct Sample {
        Complex z;
        Complex f;
        double rho; // |f'/f|, bounds the local turning rate of arg f
    };

    Sample sample(Complex z) const {
        const Complex v = eval(z);
        Complex dv;
        if (f_.derivative) {
            dv = f_.derivative(z);
        } else {
            const double h = 1e-7 * (1.0 + std::abs(z));
            dv = (f_.value(z + h) - v) / h;
        }
        double rho = std::abs(dv / v);
        if (!std::isfinite(rho)) rho = std::numeric_limits<double>::max();
        return {z, v, rho};
    }

    // Accept the chord when the phase step is small and no endpoint sees a
    // zero closer than the chord length (|f/f'| estimates that distance; a
    // nearby multiple zero can turn arg f by 2 pi between samples unnoticed).
    double refine(const Sample& a, const Sample& b, int depth) const {
        const double d = wrap_phase(std::arg(b.f) - std::arg(a.f));
        const double len = std::abs(b.z - a.z);
        if (std::abs(d) <= opts_.max_phase_step && len * std::max(a.rho, b.rho) <= 2.0 * opts_.max_phase_step)
            return d;
        if (depth >= opts_.max_depth) {
            throw BoundaryZeroError("phase not resolved near " + describe(0.5 * (a.z + b.z)) +
                                    " (zero on or too close to the contour)");
        }
        const Sample m = sample(0.5 * (a.z + b.z));
        if (std::abs(m.f) <= opts_.boundary_tol * std::min(std::abs(a.f), std::abs(b.f)))
            throw BoundaryZeroError("zero near the contour at " + describe(m.z));
        return refine(a, m, depth + 1) + refine(m, b, depth + 1);
    }

    static std::string describe(Complex z) {
        return "(" + std::to_string(z.real()) + ", " + std::to_string(z.imag()) + ")";
    }

    const AnalyticFunction& f_;
    const RootFinderOptions& opts_;
};

// Winding number without retries.
std::size_t winding(const PhaseTracker& tracker, const Rectangle& r) {
    const Complex c00{r.re_min, r.im_min};
    const Complex c10{r.re_max, r.im_min};
    const Complex c11{r.re_max, r.im_max};
    const Complex c01{r.re_min, r.im_max};
    const double total =
        tracker.segment(c00, c10) + tracker.segment(c10, c11) + tracker.segment(c11, c01) + tracker.segment(c01, c00);
    const double turns = total / kTwoPi;
    const double rounded = std::round(turns);
    if (std::abs(turns - rounded) > 0.25 || rounded < -0.5) {
        throw ResolutionError("winding number is not an integer (" + std::to_string(turns) + " turns)");
    }
    return static_cast<std::size_t>(rounded);
}

struct Cell {
    Rectangle rect;
    std::size_t count = 0;
    int depth = 0; // in half-levels
};

class RootSearch {
public:
    RootSearch(const AnalyticFunction& f, const RootFinderOptions& opts) : f_(f), opts_(opts), tracker_(f, opts) {}

    std::vector<RootResult> run(const Cell& top) {
        std::vector<Cell> stack{top};
        while (!stack.empty()) {
            Cell cell = stack.back();
            stack.pop_back();
            process(cell, stack);
        }
        return std::move(found_);
    }

private:
    void process(const Cell& cell, std::vector<Cell>& stack) {
        if (cell.count == 0) return;
        const double diag = cell.rect.diagonal();
        const Complex mid = cell.rect.center();
        if (cell.count == 1) {
            if (auto z = newton(mid, cell.rect, 1)) {
                if (cell.rect.contains(*z, 1e-12 * diag)) {
                    accept(*z, 1, true);
                    return;
                }
            }
        }
        if (diag < opts_.tol || (cell.count > 1 && diag < opts_.cluster_tol * (1.0 + std::abs(mid)))) {
            accept_cluster(cell);
            return;
        }
        if (cell.depth >= 2 * opts_.max_depth) {
            if (diag < opts_.cluster_tol * (1.0 + std::abs(mid))) {
                accept_cluster(cell);
                return;
            }
            throw ResolutionError("root isolation exceeded the subdivision depth cap");
        }
        static constexpr std::array<double, 5> kOffsets{0.5, 0.5137, 0.4759, 0.5361, 0.4413};
        for (double frac : kOffsets) {
            std::vector<Cell> children = split(cell, frac);
            try {
                std::size_t sum = 0;
                for (auto& ch : children) {
                    ch.count = winding(tracker_, ch.rect);
                    sum += ch.count;
                }
                if (sum != cell.count) continue;
            } catch (const BoundaryZeroError&) {
                continue;
            } catch (const ResolutionError&) {
                continue;
            }
            for (auto it = children.rbegin(); it != children.rend(); ++it)
                if (it->count > 0) stack.push_back(*it);
            return;
        }
        if (diag < opts_.cluster_tol * (1.0 + std::abs(mid))) {
            // counts stop adding up at the noise floor of f: treat as one cluster
            accept_cluster(cell);
            return;
        }
        // a cell edge runs between the numerically split members of a multiple
        // zero; Newton still lands on it, and merge_close joins the pieces
        if (auto z = newton(mid, cell.rect, cell.count);
            z && cell.rect.contains(*z, std::max(1e-3 * diag, opts_.cluster_tol * (1.0 + std::abs(mid))))) {
            accept(*z, cell.count, true);
            return;
        }
        throw ResolutionError("could not partition a cell holding " + std::to_string(cell.count) + " zeros");
    }

    static std::vector<Cell> split(const Cell& c, double frac) {
        const Rectangle& r = c.rect;
        const double xm = r.re_min + frac * r.width();
        const double ym = r.im_min + frac * r.height();
        std::vector<Cell> out;
        if (r.width() > 2.0 * r.height()) {
            out.push_back({{r.re_min, xm, r.im_min, r.im_max}, 0, c.depth + 1});
            out.push_back({{xm, r.re_max, r.im_min, r.im_max}, 0, c.depth + 1});
        } else if (r.height() > 2.0 * r.width()) {
            out.push_back({{r.re_min, r.re_max, r.im_min, ym}, 0, c.depth + 1});
            out.push_back({{r.re_min, r.re_max, ym, r.im_max}, 0, c.depth + 1});
        } else {
            out.push_back({{r.re_min, xm, r.im_min, ym}, 0, c.depth + 2});
            out.push_back({{xm, r.re_max, r.im_min, ym}, 0, c.depth + 2});
            out.push_back({{r.re_min, xm, ym, r.im_max}, 0, c.depth + 2});
            out.push_back({{xm, r.re_max, ym, r.im_max}, 0, c.depth + 2});
        }
        return out;
    }

    Complex safe_value(Complex z) const { return f_.value(z); }

    // Newton (multiplicity-weighted) from z0; gives up when it wanders far
    // outside `cell` or leaves the domain of f.
    std::optional<Complex> newton(Complex z0, const Rectangle& cell, std::size_t multiplicity) const {
        const double m = static_cast<double>(multiplicity);
        const double roam = 0.5 * cell.diagonal() + 10.0 * opts_.tol;
        Complex z = z0;
        Complex z_prev = z0 + Complex(1e-7 * (1.0 + cell.diagonal()), 0.0);
        try {
            Complex f_prev = f_.value(z_prev);
            for (int it = 0; it < opts_.newton_max_iter; ++it) {
                const Complex fz = f_.value(z);
                if (fz == Complex{}) return z;
                Complex dfz;
                if (f_.derivative) {
                    dfz = f_.derivative(z);
                } else {
                    dfz = (fz - f_prev) / (z - z_prev);
                    z_prev = z;
                    f_prev = fz;
                }
                if (dfz == Complex{} || !std::isfinite(std::abs(dfz))) return std::nullopt;
                const Complex step = m * fz / dfz;
                z -= step;
                if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return std::nullopt;
                if (std::abs(z - cell.center()) > 4.0 * roam) return std::nullopt;
                if (std::abs(step) < opts_.tol) return z;
            }
        } catch (const RangeError&) {
            return std::nullopt;
        }
        return std::nullopt;
    }

    void accept(Complex z, std::size_t mult, bool converged) {
        found_.push_back({z, mult, std::abs(safe_value(z)), converged});
    }

    void accept_cluster(const Cell& cell) {
        const Complex mid = cell.rect.center();
        if (auto z = newton(mid, cell.rect, cell.count); z && cell.rect.contains(*z, cell.rect.diagonal())) {
            accept(*z, cell.count, true);
        } else {
            accept(mid, cell.count, false);
        }
    }

    const AnalyticFunction& f_;
    const RootFinderOptions& opts_;
    PhaseTracker tracker_;
    std::vector<RootResult> found_;
};

// Merge roots closer than max(tol, cluster_tol * (1 + |z|)), summing multiplicities.
std::vector<RootResult> merge_close(std::vector<RootResult> roots, const RootFinderOptions& opts) {
    auto radius = [&opts](Complex z) { return std::max(opts.tol, opts.cluster_tol * (1.0 + std::abs(z))); };
    double reach = 0.0;
    for (const auto& r : roots) reach = std::max(reach, radius(r.location));
    std::sort(roots.begin(), roots.end(), [](const RootResult& a, const RootResult& b) {
        return a.location.real() < b.location.real();
    });
    std::vector<bool> taken(roots.size(), false);
    std::vector<RootResult> out;
    for (std::size_t i = 0; i < roots.size(); ++i) {
        if (taken[i]) continue;
        RootResult acc = roots[i];
        double weight = static_cast<double>(acc.multiplicity);
        Complex sum = acc.location * weight;
        const double r = radius(roots[i].location);
        for (std::size_t j = i + 1; j < roots.size(); ++j) {
            if (roots[j].location.real() - roots[i].location.real() > reach) break;
            if (taken[j] || std::abs(roots[j].location - roots[i].location) > r) continue;
            taken[j] = true;
            const double w = static_cast<double>(roots[j].multiplicity);
            sum += roots[j].location * w;
            weight += w;
            acc.multiplicity += roots[j].multiplicity;
            acc.residual = std::max(acc.residual, roots[j].residual);
            acc.newton_converged = acc.newton_converged && roots[j].newton_converged;
        }
        acc.location = sum / weight;
        out.push_back(acc);
    }
    return out;
}

Cell counted_top(const AnalyticFunction& f, const Rectangle& rect, const RootFinderOptions& opts) {
    rect.validate();
    if (!f.value) throw ConfigError("count_zeros: function handle is empty");
    const PhaseTracker tracker(f, opts);
    Rectangle r = rect;
    for (int attempt = 0;; ++attempt) {
        try {
            return {r, winding(tracker, r), 0};
        } catch (const BoundaryZeroError&) {
            if (attempt >= opts.boundary_retries) throw;
            r = r.inflated(1e-6 * r.diagonal());
        }
    }
}

} // namespace

void Rectangle::validate() const {
    if (!(re_min < re_max) || !(im_min < im_max) || !std::isfinite(re_min) || !std::isfinite(re_max) ||
        !std::isfinite(im_min) || !std::isfinite(im_max)) {
        throw ConfigError("Rectangle: need re_min < re_max and im_min < im_max");
    }
}

double Rectangle::diagonal() const noexcept { return std::hypot(width(), height()); }

bool Rectangle::contains(Complex z, double slack) const noexcept {
    return z.real() >= re_min - slack && z.real() <= re_max + slack && z.imag() >= im_min - slack &&
           z.imag() <= im_max + slack;
}

Rectangle Rectangle::inflated(double amount) const noexcept {
    return {re_min - amount, re_max + amount, im_min - amount, im_max + amount};
}

std::size_t count_zeros(const AnalyticFunction& f, const Rectangle& rect, const RootFinderOptions& opts) {
    return counted_top(f, rect, opts).count;
}

std::vector<RootResult> find_roots(const AnalyticFunction& f, const Rectangle& rect, const RootFinderOptions& opts) {
    const Cell top = counted_top(f, rect, opts);
    RootSearch search(f, opts);
    auto roots = merge_close(search.run(top), opts);
    std::sort(roots.begin(), roots.end(), [](const RootResult& a, const RootResult& b) {
        if (a.location.imag() != b.location.imag()) return a.location.imag() < b.location.imag();
        return a.location.real() < b.location.real();
    });
    return roots;
}

} // namespace hdde
