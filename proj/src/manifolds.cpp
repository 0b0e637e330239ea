#include "hdde/manifolds.hpp"

#include "hdde/errors.hpp"
#include "fmt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

namespace hdde {

namespace {

using detail::fmt17;

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kPositiveMargin = 1e-12;

double system_scale(const DelaySystem& sys) {
    double s = 0.0;
    for (const auto& a : sys.matrices()) s = std::max(s, norm2(a));
    return s;
}

void fill_top(CharLevel& level, double rank_tol, double scale) {
    const SvdResult s = svd(level.C.back());
    const double cut = rank_tol * std::max(s.singular_values.empty() ? 0.0 : s.singular_values.front(), scale);
    level.top_rank = 0;
    level.top_smin = 0.0;
    for (double v : s.singular_values) {
        if (v > cut) {
            ++level.top_rank;
            level.top_smin = v;
        }
    }
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
    std::vector<double> out(count);
    if (count == 1) {
        out[0] = 0.5 * (lo + hi);
        return out;
    }
    for (std::size_t i = 0; i < count; ++i)
        out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    return out;
}

// Calls fn(phi) for every phase vector on the lattice, lexicographic order.
template <typename Fn>
void for_each_phase(const std::vector<double>& sigma, std::size_t dims, std::size_t points, Fn&& fn) {
    std::vector<std::size_t> idx(dims, 0);
    std::vector<double> phi(dims, 0.0);
    while (true) {
        for (std::size_t j = 0; j < dims; ++j)
            phi[j] = kTwoPi / sigma[j] * static_cast<double>(idx[j]) / static_cast<double>(points);
        fn(phi);
        std::size_t j = dims;
        while (j > 0) {
            --j;
            if (++idx[j] < points) break;
            idx[j] = 0;
            if (j == 0) return;
        }
        if (dims == 0) return;
    }
}

bool accept(const ExtendedReal& g, bool positive_only, bool negative_only) {
    if (!g.is_finite()) return false;
    if (positive_only) return g.value() > 0.0;
    if (negative_only) return g.value() < 0.0;
    return true;
}

struct SliceFilter {
    double lo;
    double hi;
};

// Extended value as a double for interval arithmetic along one sweep.
double as_double(const ExtendedReal& g) {
    if (g.is_pos_inf()) return std::numeric_limits<double>::infinity();
    if (g.is_neg_inf()) return -std::numeric_limits<double>::infinity();
    return g.value();
}

double interval_distance(double x, double a, double b, const SliceFilter& f) {
    double lo = std::max(std::min(a, b), f.lo);
    double hi = std::min(std::max(a, b), f.hi);
    if (lo > hi) return std::numeric_limits<double>::infinity();
    if (x < lo) return lo - x;
    if (x > hi) return x - hi;
    return 0.0;
}

// Distance from x to the gamma values swept by `level` along phi_1 at fixed
// omega and further phases; branches between consecutive samples are paired
// by nearest Y and assumed continuous.
double sweep_distance(const CharLevel& level, double omega, double x, const std::vector<double>& rest,
                      std::size_t phi1_points, const SliceFilter& filter) {
    double best = std::numeric_limits<double>::infinity();
    const double period = kTwoPi / level.sigma[0];
    std::vector<ManifoldSample> prev;
    for (std::size_t i = 0; i <= phi1_points; ++i) {
        PhasePoint p;
        p.omega = omega;
        p.phi.reserve(1 + rest.size());
        p.phi.push_back(period * static_cast<double>(i) / static_cast<double>(phi1_points));
        p.phi.insert(p.phi.end(), rest.begin(), rest.end());
        std::vector<ManifoldSample> cur;
        try {
            cur = branches(level, p);
        } catch (const TrivialityError&) {
            prev.clear();
            continue;
        }
        for (const auto& s : cur) {
            if (s.gamma.is_finite()) best = std::min(best, interval_distance(x, s.gamma.value(), s.gamma.value(), filter));
        }
        if (!prev.empty()) {
            std::vector<bool> used(cur.size(), false);
            for (const auto& a : prev) {
                std::size_t pick = cur.size();
                double dist = std::numeric_limits<double>::infinity();
                for (std::size_t j = 0; j < cur.size(); ++j) {
                    if (used[j] || a.Y.has_value() != cur[j].Y.has_value()) continue;
                    const double d = a.Y ? std::abs(*a.Y - *cur[j].Y) : 0.0;
                    if (d < dist) {
                        dist = d;
                        pick = j;
                    }
                }
                if (pick == cur.size()) continue;
                used[pick] = true;
                best = std::min(best, interval_distance(x, as_double(a.gamma), as_double(cur[pick].gamma), filter));
            }
        }
        prev = std::move(cur);
    }
    return best;
}

double point_distance(const CharLevel& level, double omega, double x, const SliceFilter& filter) {
    PhasePoint p;
    p.omega = omega;
    double best = std::numeric_limits<double>::infinity();
    try {
        for (const auto& s : branches(level, p))
            if (s.gamma.is_finite()) best = std::min(best, interval_distance(x, s.gamma.value(), s.gamma.value(), filter));
    } catch (const TrivialityError&) {
    }
    return best;
}

} // namespace

std::string ExtendedReal::to_string() const {
    if (is_pos_inf()) return "inf";
    if (is_neg_inf()) return "-inf";
    return fmt17(value_);
}

double canonical_phase(double phi, double period) noexcept {
    double r = std::fmod(phi, period);
    if (r < 0.0) r += period;
    if (r >= period) r = 0.0;
    return r;
}

PhasePoint make_point(double omega, std::vector<double> phi, const std::vector<double>& sigma) {
    if (phi.size() > sigma.size()) throw DimensionError("make_point: more phases than delay scales");
    for (std::size_t j = 0; j < phi.size(); ++j) phi[j] = canonical_phase(phi[j], kTwoPi / sigma[j]);
    return PhasePoint{omega, std::move(phi)};
}

StrongSpectrum strong_spectrum(const DelaySystem& sys) {
    StrongSpectrum out;
    out.S0 = eigenvalue_values(sys.A(0));
    std::sort(out.S0.begin(), out.S0.end(), [](const Complex& a, const Complex& b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    for (const auto& z : out.S0)
        if (z.real() > kPositiveMargin) out.S0_plus.push_back(z);

    const auto clusters = cluster_values(out.S0);
    for (std::size_t i = 0; i < clusters.size(); ++i) {
        for (std::size_t j = i + 1; j < clusters.size(); ++j) {
            const double d = std::abs(clusters[i].first - clusters[j].first);
            if (!out.r0 || d < *out.r0) out.r0 = d;
        }
    }
    double axis = std::numeric_limits<double>::infinity();
    for (const auto& z : out.S0) axis = std::min(axis, std::abs(z.real()));
    out.r = std::min(out.r0.value_or(axis), axis) / 3.0;
    return out;
}

CharLevel full_level(const DelaySystem& sys, std::size_t k, double rank_tol) {
    if (k < 1 || k > sys.delay_count()) throw ConfigError("full_level: k must lie in 1..n");
    CharLevel level;
    level.k = k;
    level.J = ComplexMatrix::identity(sys.dim());
    level.C.assign(sys.matrices().begin(), sys.matrices().begin() + static_cast<std::ptrdiff_t>(k + 1));
    level.sigma.assign(sys.sigmas().begin(), sys.sigmas().begin() + static_cast<std::ptrdiff_t>(k));
    fill_top(level, rank_tol, 0.0);
    return level;
}

std::optional<CharLevel> tilde_level(const DegeneracyLadder& ladder, const DelaySystem& sys, std::size_t k,
                                     double rank_tol) {
    if (k < 1 || k >= sys.delay_count()) return std::nullopt;
    const LadderLevel* lvl = ladder.level(k + 1);
    if (lvl == nullptr) return std::nullopt;
    CharLevel level;
    level.k = k;
    level.J = lvl->J;
    level.C.assign(lvl->A_proj.begin(), lvl->A_proj.begin() + static_cast<std::ptrdiff_t>(k + 1));
    level.sigma.assign(sys.sigmas().begin(), sys.sigmas().begin() + static_cast<std::ptrdiff_t>(k));
    level.tilde = true;
    fill_top(level, rank_tol, system_scale(sys));
    return level;
}

ComplexMatrix base_matrix(const CharLevel& level, const PhasePoint& point) {
    if (point.phi.size() + 1 != level.k) throw DimensionError("base_matrix: expected k-1 phases");
    ComplexMatrix b = level.C[0];
    b -= Complex(0.0, point.omega) * level.J;
    for (std::size_t j = 1; j < level.k; ++j) {
        const Complex e = std::polar(1.0, -level.sigma[j - 1] * point.phi[j - 1]);
        b += e * level.C[j];
    }
    return b;
}

std::vector<Complex> char_poly(const CharLevel& level, const PhasePoint& point) {
    const ComplexMatrix b = base_matrix(level, point);
    const ComplexMatrix& top = level.C[level.k];
    const std::size_t m = level.dim();

    if (m == 1) {
        const Complex c0 = b(0, 0);
        const Complex c1 = level.top_rank > 0 ? top(0, 0) : Complex{};
        const double scale = std::abs(c0) + std::abs(c1);
        if (scale == 0.0) throw TrivialityError("truncated characteristic polynomial vanishes identically");
        if (c1 == Complex{}) return {c0};
        return {c0, c1};
    }

    const double nb = norm2(b);
    const double nt = norm2(top);
    const double radius = level.top_smin > 0.0 ? 1.0 + nb / level.top_smin : 1.0 + nb;
    auto f = [&](Complex y) {
        ComplexMatrix t = b;
        t += y * top;
        return det(t);
    };
    auto coeffs = interpolate_on_circle(f, m, radius);
    coeffs.resize(level.top_rank + 1);
    const double abs_tol = 1e-13 * std::pow(std::max(nb + radius * nt, 1e-300), static_cast<double>(m));
    auto trimmed = trim_polynomial(std::move(coeffs), radius, 1e-10, abs_tol);
    if (trimmed.empty()) throw TrivialityError("truncated characteristic polynomial vanishes identically");
    return trimmed;
}

std::vector<ManifoldSample> branches(const CharLevel& level, const PhasePoint& point) {
    const auto coeffs = char_poly(level, point);
    const std::size_t degree = coeffs.size() - 1;
    const double sigma_k = level.sigma[level.k - 1];

    std::size_t zeros = 0;
    while (zeros < degree && coeffs[zeros] == Complex{}) ++zeros;
    std::vector<Complex> roots;
    if (degree > zeros) {
        roots = poly_roots(std::span<const Complex>(coeffs).subspan(zeros));
    }
    double ref = 0.0;
    for (const auto& c : coeffs) ref = std::max(ref, std::abs(c));
    const double lead = std::abs(coeffs.back());
    const double zero_cut = 1e-14 * (lead > 0.0 ? ref / lead : 1.0);

    std::vector<ManifoldSample> out;
    out.reserve(level.top_rank);
    auto push = [&](std::optional<Complex> y, ExtendedReal g) {
        ManifoldSample s;
        s.k = level.k;
        s.point = point;
        s.Y = y;
        s.gamma = g;
        if (g.is_finite()) s.projected = Complex(g.value(), point.omega);
        s.tilde = level.tilde;
        out.push_back(std::move(s));
    };
    for (std::size_t i = 0; i < zeros; ++i) push(Complex{}, ExtendedReal::pos_inf());
    for (const auto& y : roots) {
        if (std::abs(y) <= zero_cut) {
            push(Complex{}, ExtendedReal::pos_inf());
        } else {
            push(y, ExtendedReal::finite(-std::log(std::abs(y)) / sigma_k));
        }
    }
    for (std::size_t i = degree; i < level.top_rank; ++i) push(std::nullopt, ExtendedReal::neg_inf());

    std::stable_sort(out.begin(), out.end(), [](const ManifoldSample& a, const ManifoldSample& b) {
        if (!(a.gamma == b.gamma)) return b.gamma < a.gamma;
        if (a.Y && b.Y) return std::arg(*a.Y) < std::arg(*b.Y);
        return false;
    });
    for (std::size_t i = 0; i < out.size(); ++i) out[i].branch = i;
    return out;
}

ExtendedReal max_gamma(const CharLevel& level, const PhasePoint& point) {
    const auto bs = branches(level, point);
    return bs.empty() ? ExtendedReal::neg_inf() : bs.front().gamma;
}

std::vector<Complex> truncated_char_poly(const DelaySystem& sys, std::size_t k, const PhasePoint& point) {
    return char_poly(full_level(sys, k), point);
}

std::vector<ManifoldSample> gamma_branches(const DelaySystem& sys, std::size_t k, const PhasePoint& point) {
    return branches(full_level(sys, k), point);
}

SingularityFlags singularity_test(const DelaySystem& sys, std::size_t k, const PhasePoint& point, double rank_tol) {
    const CharLevel level = full_level(sys, k, rank_tol);
    const ComplexMatrix b = base_matrix(level, point);
    const std::size_t d = sys.dim();
    const bool b_singular =
        std::abs(det(b)) <= 1e-10 * std::pow(std::max(1.0, norm2(b)), static_cast<double>(d));

    SingularityFlags flags;
    if (level.top_rank == d) {
        flags.plus_infinity = b_singular;
        return flags;
    }
    const KernelBasis kb = kernel_vectors(sys.A(k), rank_tol);
    const ComplexMatrix block = kb.U1.adjoint() * b * kb.V1;
    const bool block_singular =
        std::abs(det(block)) <= 1e-10 * std::pow(std::max(1.0, norm2(block)), static_cast<double>(block.rows()));
    flags.plus_infinity = b_singular && !block_singular;
    flags.minus_infinity = block_singular && !b_singular;
    return flags;
}

Complex rescale(Epsilon eps, std::size_t k, Complex lambda) noexcept {
    return {lambda.real() * std::pow(eps.value(), -static_cast<double>(k)), lambda.imag()};
}

double omega_bound(const DelaySystem& sys) {
    double s = 1.0;
    for (const auto& a : sys.matrices()) s += norm2(a);
    return s;
}

std::vector<ManifoldSample> sample_manifold(const CharLevel& level, const GridConfig& grid,
                                            std::pair<double, double> omega_range) {
    if (grid.omega_points == 0 || grid.phase_points == 0) throw ConfigError("grid resolution must be positive");
    std::vector<ManifoldSample> out;
    for (double omega : linspace(omega_range.first, omega_range.second, grid.omega_points)) {
        for_each_phase(level.sigma, level.k - 1, grid.phase_points, [&](const std::vector<double>& phi) {
            const auto bs = branches(level, PhasePoint{omega, phi});
            out.insert(out.end(), bs.begin(), bs.end());
        });
    }
    return out;
}

std::vector<ManifoldSample> assemble_A_k_samples(const DelaySystem& sys, const DegeneracyLadder& ladder,
                                                 std::size_t k, const GridConfig& grid) {
    const double big = omega_bound(sys);
    const auto range = grid.omega_range.value_or(std::make_pair(-big, big));
    const std::size_t n = sys.delay_count();
    std::vector<ManifoldSample> out;
    for (auto& s : sample_manifold(full_level(sys, k), grid, range))
        if (accept(s.gamma, k < n, false)) out.push_back(std::move(s));
    if (k < n && ladder.k_under && k >= *ladder.k_under) {
        if (const auto tl = tilde_level(ladder, sys, k)) {
            for (auto& s : sample_manifold(*tl, grid, range))
                if (accept(s.gamma, false, true)) out.push_back(std::move(s));
        }
    }
    return out;
}

std::vector<Complex> assemble_A_k(const DelaySystem& sys, const DegeneracyLadder& ladder, std::size_t k,
                                  const GridConfig& grid) {
    std::vector<Complex> out;
    for (const auto& s : assemble_A_k_samples(sys, ladder, k, grid)) out.push_back(*s.projected);
    return out;
}

std::optional<double> slice_distance(const DelaySystem& sys, const DegeneracyLadder& ladder, std::size_t k,
                                     Complex z, const GridConfig& grid, std::size_t phi1_points) {
    const std::size_t n = sys.delay_count();
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<std::pair<CharLevel, SliceFilter>> parts;
    parts.emplace_back(full_level(sys, k), k < n ? SliceFilter{0.0, inf} : SliceFilter{-inf, inf});
    if (k < n && ladder.k_under && k >= *ladder.k_under) {
        if (auto tl = tilde_level(ladder, sys, k)) parts.emplace_back(std::move(*tl), SliceFilter{-inf, 0.0});
    }

    double best = inf;
    for (const auto& [level, filter] : parts) {
        if (k == 1) {
            best = std::min(best, point_distance(level, z.imag(), z.real(), filter));
            continue;
        }
        const std::vector<double> rest_sigma(level.sigma.begin() + 1, level.sigma.end());
        for_each_phase(rest_sigma, k - 2, grid.phase_points, [&](const std::vector<double>& rest) {
            best = std::min(best, sweep_distance(level, z.imag(), z.real(), rest, phi1_points, filter));
        });
    }
    if (!std::isfinite(best)) return std::nullopt;
    return best;
}

void write_manifold_csv(std::ostream& os, const std::vector<ManifoldSample>& samples, std::size_t n) {
    os << "k,omega";
    for (std::size_t j = 1; j < n; ++j) os << ",phi_" << j;
    os << ",branch,gamma,Y_re,Y_im,flags\n";
    for (const auto& s : samples) {
        os << s.k << ',' << fmt17(s.point.omega);
        for (std::size_t j = 0; j + 1 < n; ++j) {
            os << ',';
            if (j < s.point.phi.size()) os << fmt17(s.point.phi[j]);
        }
        os << ',' << s.branch << ',' << s.gamma.to_string() << ',';
        if (s.Y) os << fmt17(s.Y->real()) << ',' << fmt17(s.Y->imag());
        else os << ',';
        os << ',';
        std::string flags;
        if (s.gamma.is_pos_inf()) flags = "pos_inf";
        if (s.gamma.is_neg_inf()) flags = "neg_inf";
        if (s.tilde) flags += flags.empty() ? "tilde" : "|tilde";
        os << flags << '\n';
    }
}

} // namespace hdde
