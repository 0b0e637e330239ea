#include "hdde/scalar2.hpp"

#include "hdde/errors.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

namespace hdde::scalar2 {

namespace {

constexpr double kPi = std::numbers::pi;
// |Y| below this fraction of the coefficient scale counts as a zero root (gamma = +inf).
constexpr double kZeroRoot = 1e-14;

double residual(const ScalarParams& p, double omega, double phi) {
    return std::abs(Complex(0.0, -omega) + p.a + p.b * std::polar(1.0, -phi));
}

double wrap(double phi) {
    double r = std::fmod(phi, 2.0 * kPi);
    if (r < 0.0) r += 2.0 * kPi;
    return r >= 2.0 * kPi ? 0.0 : r;
}

} // namespace

void ScalarParams::validate() const {
    if (a == Complex{} || b == Complex{} || c == Complex{})
        throw ConfigError("scalar example requires nonzero a, b and c");
}

ExtendedReal gamma1(const ScalarParams& p, double omega) {
    const double dw = omega - p.a.imag();
    const double num = dw * dw + p.a.real() * p.a.real();
    if (std::sqrt(num) <= kZeroRoot * (std::abs(p.a) + std::abs(omega))) return ExtendedReal::pos_inf();
    return ExtendedReal::finite(-0.5 * std::log(num / std::norm(p.b)));
}

std::optional<std::pair<double, double>> gamma1_zeros(const ScalarParams& p) {
    const double disc = std::norm(p.b) - p.a.real() * p.a.real();
    if (disc < 0.0) return std::nullopt;
    const double s = std::sqrt(disc);
    return std::make_pair(p.a.imag() - s, p.a.imag() + s);
}

ExtendedReal sup_gamma1(const ScalarParams& p) {
    if (p.a.real() == 0.0) return ExtendedReal::pos_inf();
    return ExtendedReal::finite(std::log(std::abs(p.b) / std::abs(p.a.real())));
}

ExtendedReal gamma2(const ScalarParams& p, double omega, double phi1) {
    const double nb = std::abs(p.b);
    const double t = phi1 - std::arg(p.b);
    const double x = p.a.real() + nb * std::cos(t);
    const double y = omega - p.a.imag() + nb * std::sin(t);
    const double bracket = x * x + y * y;
    if (std::sqrt(bracket) <= kZeroRoot * (std::abs(p.a) + nb + std::abs(omega))) return ExtendedReal::pos_inf();
    return ExtendedReal::finite(-0.5 * std::log(bracket / std::norm(p.c)));
}

double omega_max(const ScalarParams& p, double phi1) {
    return p.a.imag() - std::abs(p.b) * std::sin(phi1 - std::arg(p.b));
}

ExtendedReal sup_gamma2(const ScalarParams& p) {
    const double gap = std::abs(p.a.real()) - std::abs(p.b);
    if (gap <= 0.0) return ExtendedReal::pos_inf();
    return ExtendedReal::finite(-std::log(gap / std::abs(p.c)));
}

std::optional<std::pair<SingularPhase, SingularPhase>> phi_singular(const ScalarParams& p) {
    const auto zeros = gamma1_zeros(p);
    if (!zeros) return std::nullopt;
    const double root = std::sqrt(std::max(0.0, std::norm(p.b) - p.a.real() * p.a.real()));
    const double theta = std::atan(root / p.a.real());
    const double arg_b = std::arg(p.b);

    // the printed formula -Arg b +- theta, plus its sign/half-turn variants
    std::array<double, 8> candidates{};
    std::size_t n = 0;
    for (double sb : {-1.0, 1.0})
        for (double st : {1.0, -1.0})
            for (double shift : {0.0, kPi}) candidates[n++] = sb * arg_b + st * theta + shift;

    auto pick = [&](double omega) {
        SingularPhase best{omega, 0.0, std::numeric_limits<double>::infinity()};
        for (double phi : candidates) {
            const double r = residual(p, omega, phi);
            if (r < best.residual) best = SingularPhase{omega, wrap(phi), r};
        }
        return best;
    };
    return std::make_pair(pick(zeros->first), pick(zeros->second));
}

StabilityVerdict classify_scalar(const ScalarParams& p, double margin) {
    StabilityVerdict v;
    const double re = p.a.real();
    const double nb = std::abs(p.b);
    const double nc = std::abs(p.c);

    SupEstimate s1;
    s1.k = 1;
    s1.sup = sup_gamma1(p);
    SupEstimate s2;
    s2.k = 2;
    s2.sup = sup_gamma2(p);
    v.sups.push_back(std::move(s1));
    v.sups.push_back(std::move(s2));

    if (re > margin) {
        v.status = Stability::StronglyUnstable;
        v.strong_witness = p.a;
        return v;
    }
    const double d1 = nb - std::abs(re);
    if (d1 > margin) {
        v.status = Stability::WeaklyUnstable;
        v.scale = 1;
        return v;
    }
    if (d1 >= -margin) {
        v.status = Stability::Marginal;
        return v;
    }
    const double d2 = nc - (std::abs(re) - nb);
    if (d2 > margin) {
        v.status = Stability::WeaklyUnstable;
        v.scale = 2;
        return v;
    }
    if (d2 >= -margin) {
        v.status = Stability::Marginal;
        return v;
    }
    v.status = Stability::Stable;
    return v;
}

} // namespace hdde::scalar2
