#include "doctest.h"

#include "hdde/errors.hpp"
#include "hdde/model.hpp"
#include "hdde/rootfinder.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace hdde;

namespace {

AnalyticFunction polynomial(std::vector<Complex> roots) {
    AnalyticFunction f;
    f.value = [roots](Complex z) {
        Complex p = 1.0;
        for (const auto& r : roots) p *= z - r;
        return p;
    };
    f.derivative = [roots](Complex z) {
        Complex s = 0.0;
        for (std::size_t i = 0; i < roots.size(); ++i) {
            Complex p = 1.0;
            for (std::size_t j = 0; j < roots.size(); ++j)
                if (j != i) p *= z - roots[j];
            s += p;
        }
        return s;
    };
    return f;
}

} // namespace

TEST_CASE("rectangle validation and helpers") {
    CHECK_THROWS_AS((Rectangle{1.0, 0.0, 0.0, 1.0}.validate()), ConfigError);
    CHECK_THROWS_AS((Rectangle{0.0, 1.0, 1.0, 1.0}.validate()), ConfigError);
    const Rectangle r{-1.0, 1.0, -2.0, 2.0};
    CHECK(r.contains({0.5, 1.5}));
    CHECK_FALSE(r.contains({1.5, 0.0}));
    const auto g = r.inflated(0.5);
    CHECK(g.re_min == -1.5);
    CHECK(g.im_max == 2.5);
}

TEST_CASE("roots of a polynomial with a double root") {
    const Complex i(0.0, 1.0);
    const auto f = polynomial({1.0, 1.0, i, Complex(-0.5, 0.3), Complex(5.0, 0.0)});
    const Rectangle rect{-2.0, 2.0, -2.0, 2.0};
    CHECK(count_zeros(f, rect) == 4);
    const auto roots = find_roots(f, rect);
    std::size_t total = 0;
    for (const auto& r : roots) total += r.multiplicity;
    CHECK(total == 4);
    REQUIRE(roots.size() == 3);
    bool saw_double = false;
    for (const auto& r : roots) {
        if (std::abs(r.location - 1.0) < 1e-6) {
            CHECK(r.multiplicity == 2);
            saw_double = true;
        }
    }
    CHECK(saw_double);
    // sorted by imaginary part
    for (std::size_t j = 1; j < roots.size(); ++j) CHECK(roots[j - 1].location.imag() <= roots[j].location.imag());
}

TEST_CASE("random polynomials: found roots match the winding count") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int t = 0; t < 40; ++t) {
        std::vector<Complex> zs;
        for (int j = 0; j < 1 + t % 6; ++j) zs.emplace_back(u(rng), u(rng));
        const auto f = polynomial(zs);
        const Rectangle rect{-1.0, 1.0, -1.0, 1.0};
        const std::size_t inside = static_cast<std::size_t>(
            std::count_if(zs.begin(), zs.end(), [&](Complex z) { return rect.contains(z); }));
        const auto roots = find_roots(f, rect);
        std::size_t total = 0;
        for (const auto& r : roots) total += r.multiplicity;
        CHECK(total == inside);
        for (const auto& r : roots) {
            double best = 1e9;
            for (const auto& z : zs) best = std::min(best, std::abs(z - r.location));
            CHECK(best < 1e-8);
        }
    }
}

TEST_CASE("a zero on the contour is handled by inflation") {
    const auto f = polynomial({Complex(1.0, 0.0)});
    const Rectangle rect{-1.0, 1.0, -1.0, 1.0};
    CHECK(count_zeros(f, rect) == 1);
}

TEST_CASE("window without zeros") {
    const auto f = polynomial({Complex(10.0, 0.0)});
    CHECK(find_roots(f, Rectangle{-1.0, 1.0, -1.0, 1.0}).empty());
}

TEST_CASE("principal root of -z + exp(-z)") {
    const auto sys = DelaySystem::scalar({0.0, 1.0}, {1.0});
    const CharacteristicFunction chi(sys, Epsilon(1.0));
    AnalyticFunction f;
    f.value = [&](Complex z) { return chi.value(z); };
    f.derivative = [&](Complex z) { return chi.derivative(z); };
    f.im_rate = chi.oscillation_rate();
    f.re_rate = chi.oscillation_rate();
    const auto roots = find_roots(f, Rectangle{0.0, 1.0, -0.5, 0.5});
    REQUIRE(roots.size() == 1);
    CHECK(std::abs(roots[0].location - 0.5671432904097838) < 1e-10);
    CHECK(roots[0].multiplicity == 1);
}
