#include "doctest.h"

#include "hdde/degeneracy.hpp"
#include "hdde/errors.hpp"
#include "hdde/model.hpp"
#include "hdde/rootfinder.hpp"

#include <algorithm>
#include <cmath>

using namespace hdde;

namespace {

// x' = A0 x + [[0,1],[0,0]] x(t - tau).
DelaySystem nilpotent_example(Complex a1, Complex a2, Complex a3, Complex a4) {
    return DelaySystem({ComplexMatrix::from_rows({{a1, a2}, {a3, a4}}),
                        ComplexMatrix::from_rows({{0.0, 1.0}, {0.0, 0.0}})},
                       {1.0});
}

std::vector<RootResult> spectrum(const DelaySystem& sys, double eps, const Rectangle& rect) {
    const CharacteristicFunction chi(sys, Epsilon(eps));
    AnalyticFunction f;
    f.value = [&](Complex z) { return chi.value(z); };
    f.derivative = [&](Complex z) { return chi.derivative(z); };
    f.im_rate = chi.oscillation_rate();
    f.re_rate = chi.oscillation_rate();
    return find_roots(f, rect);
}

} // namespace

TEST_CASE("nilpotent 2x2 example: one level with J = 0 and A_0 = a3") {
    const auto sys = nilpotent_example(-0.5, 0.7, 0.4, 0.3);
    const auto ladder = build_ladder(sys);
    CHECK(ladder.an_singular);
    REQUIRE(ladder.levels.size() == 1);
    const auto& lvl = ladder.levels[0];
    CHECK(lvl.k == 1);
    CHECK(lvl.dim == 1);
    CHECK(std::abs(lvl.J(0, 0)) < 1e-14);
    // U, V are unit vectors fixed up to a phase, so compare moduli
    CHECK(std::abs(std::abs(lvl.A_proj[0](0, 0)) - 0.4) < 1e-14);
    REQUIRE(ladder.k_under.has_value());
    CHECK(*ladder.k_under == 1);
    CHECK(ladder.nd_satisfied);
    CHECK(check_nd(ladder, sys));

    // chi~_0 is the constant a3 (up to the phase of U^* V)
    const Complex c0 = truncated_char(ladder, sys, 0, Epsilon(0.1), 0.0);
    const Complex c1 = truncated_char(ladder, sys, 0, Epsilon(0.1), Complex(-3.0, 2.0));
    CHECK(std::abs(std::abs(c0) - 0.4) < 1e-14);
    CHECK(std::abs(c1 - c0) < 1e-14);
    CHECK(strong_stable_spectrum(ladder).empty());
}

TEST_CASE("nilpotent 2x2 example with a3 = 0 violates ND and has spectrum {a1, a4}") {
    const Complex a1 = -0.5;
    const Complex a4(0.3, 0.2);
    const auto sys = nilpotent_example(a1, 0.7, 0.0, a4);
    const auto ladder = build_ladder(sys);
    CHECK_FALSE(ladder.nd_satisfied);
    CHECK_FALSE(check_nd(ladder, sys));
    for (double eps : {0.2, 0.1}) {
        const auto roots = spectrum(sys, eps, Rectangle{-2.0, 2.0, -2.0, 2.0});
        REQUIRE(roots.size() == 2);
        std::size_t total = 0;
        for (const auto& r : roots) total += r.multiplicity;
        CHECK(total == 2);
        for (const Complex want : {a1, a4}) {
            double best = 1e9;
            for (const auto& r : roots) best = std::min(best, std::abs(r.location - want));
            CHECK(best < 1e-8);
        }
    }
}

TEST_CASE("invertible A_n gives an empty ladder") {
    const auto sys = DelaySystem({ComplexMatrix::from_rows({{-1.0, 0.2}, {0.0, -2.0}}), ComplexMatrix::identity(2)},
                                 {1.0});
    const auto ladder = build_ladder(sys);
    CHECK(ladder.levels.empty());
    CHECK_FALSE(ladder.an_singular);
    CHECK_FALSE(ladder.k_under.has_value());
    CHECK(ladder.nd_satisfied);
    CHECK(check_nd(ladder, sys));
    CHECK_FALSE(ladder.rank_unstable);
}

TEST_CASE("d = 3, n = 2 chain that stops at level 2") {
    // A2 = diag(1, 1, 0): kernel and cokernel both e3; A_{1,1} = A1(2,2) = 0.8 is invertible.
    const auto A0 = ComplexMatrix::from_rows({{-1.0, 0.1, 0.0}, {0.0, -2.0, 0.3}, {0.2, 0.0, -0.7}});
    const auto A1 = ComplexMatrix::from_rows({{0.1, 0.0, 0.0}, {0.0, 0.2, 0.0}, {0.5, 0.0, 0.8}});
    const std::vector<Complex> d2{1.0, 1.0, 0.0};
    const auto sys = DelaySystem({A0, A1, ComplexMatrix::diagonal(d2)}, {1.0, 1.0});
    const auto ladder = build_ladder(sys);
    CHECK(ladder.an_singular);
    REQUIRE(ladder.levels.size() == 1);
    CHECK(ladder.levels[0].k == 2);
    CHECK(ladder.levels[0].dim == 1);
    CHECK(std::abs(std::abs(ladder.levels[0].J(0, 0)) - 1.0) < 1e-14);
    CHECK(std::abs(std::abs(ladder.levels[0].A_proj[1](0, 0)) - 0.8) < 1e-14);
    CHECK_FALSE(ladder.k_under.has_value());
    CHECK(ladder.heuristic());
    CHECK(ladder.nd_satisfied);
    CHECK(ladder.level(1) == nullptr);
    CHECK_THROWS_AS((void)truncated_char(ladder, sys, 0, Epsilon(0.1), 0.0), ConfigError);

    // chi~_1 at lambda = 0 is det(A_{0,1} + A_{1,1}), and its modulus is |-0.7 + 0.8|.
    const Complex v = truncated_char(ladder, sys, 1, Epsilon(0.1), 0.0);
    CHECK(std::abs(std::abs(v) - 0.1) < 1e-14);
}

TEST_CASE("chi~_1 for A2 = [[0,1],[0,0]] matches the symbolic expansion") {
    // U = e2, V = e1: J = 0, A_{0,1} = A0(1,0), A_{1,1} = A1(1,0)
    const Complex a(0.3, -0.2);
    const Complex b(-0.6, 0.1);
    const auto A0 = ComplexMatrix::from_rows({{-1.0, 0.5}, {a, -0.4}});
    const auto A1 = ComplexMatrix::from_rows({{0.2, 0.3}, {b, 0.7}});
    const auto A2 = ComplexMatrix::from_rows({{0.0, 1.0}, {0.0, 0.0}});
    const double sigma1 = 1.5;
    const auto sys = DelaySystem({A0, A1, A2}, {sigma1, 1.0});
    const auto ladder = build_ladder(sys);
    REQUIRE(ladder.level(2) != nullptr);
    CHECK(std::abs(ladder.level(2)->J(0, 0)) < 1e-14);

    const double eps = 0.2;
    const Complex l0(0.05, 0.3);
    const Complex l1(-0.1, -1.7);
    auto oracle = [&](Complex lam) { return a + b * std::exp(-lam * sigma1 / eps); };
    const Complex g0 = truncated_char(ladder, sys, 1, Epsilon(eps), l0);
    const Complex g1 = truncated_char(ladder, sys, 1, Epsilon(eps), l1);
    // equal up to one fixed unit factor
    CHECK(std::abs(std::abs(g0) - std::abs(oracle(l0))) < 1e-13);
    CHECK(std::abs(g0 / oracle(l0) - g1 / oracle(l1)) < 1e-12);
}

TEST_CASE("pencil eigenvalues") {
    const auto r1 = pencil_eigenvalues(ComplexMatrix::from_rows({{1.0}}), ComplexMatrix::from_rows({{-2.0}}));
    REQUIRE(r1.size() == 1);
    CHECK(std::abs(r1[0] + 2.0) < 1e-12);

    const std::vector<Complex> j{1.0, 0.0};
    const std::vector<Complex> a{-3.0, 5.0};
    const auto r2 = pencil_eigenvalues(ComplexMatrix::diagonal(j), ComplexMatrix::diagonal(a));
    REQUIRE(r2.size() == 1);
    CHECK(std::abs(r2[0] + 3.0) < 1e-10);

    CHECK(pencil_eigenvalues(ComplexMatrix::from_rows({{0.0}}), ComplexMatrix::from_rows({{0.4}})).empty());
    CHECK_THROWS_AS(pencil_eigenvalues(ComplexMatrix(2, 2), ComplexMatrix(2, 2)), DegeneracyError);
}

TEST_CASE("strong stable spectrum keeps only Re < 0 roots") {
    // A1 = diag(0, 1): U = V = e1, J = 1, A_{0,1} = A0(0,0)
    const auto make = [](double a1) {
        return DelaySystem({ComplexMatrix::from_rows({{a1, 0.5}, {0.5, -0.3}}),
                            ComplexMatrix::from_rows({{0.0, 0.0}, {0.0, 1.0}})},
                           {1.0});
    };
    const auto stable = build_ladder(make(-1.0));
    REQUIRE(stable.k_under == std::size_t{1});
    const auto s = strong_stable_spectrum(stable);
    REQUIRE(s.size() == 1);
    CHECK(std::abs(s[0] + 1.0) < 1e-10);
    CHECK(strong_stable_spectrum(build_ladder(make(0.6))).empty());
}

TEST_CASE("roots of the full system converge to the truncated root with its multiplicity") {
    // chi~_0(lambda) = -lambda + a1 has the simple root mu = a1 = -1.
    const auto sys = DelaySystem({ComplexMatrix::from_rows({{-1.0, 0.5}, {0.5, -0.3}}),
                                  ComplexMatrix::from_rows({{0.0, 0.0}, {0.0, 1.0}})},
                                 {1.0});
    const auto ladder = build_ladder(sys);
    const auto mu = strong_stable_spectrum(ladder);
    REQUIRE(mu.size() == 1);
    double prev = 1e9;
    for (double eps : {0.1, 0.05}) {
        const auto roots = spectrum(sys, eps, Rectangle{-1.2, -0.8, -0.2, 0.2});
        std::size_t total = 0;
        for (const auto& r : roots) total += r.multiplicity;
        CHECK(total == 1);
        REQUIRE(!roots.empty());
        const double dist = std::abs(roots[0].location - mu[0]);
        CHECK(dist < 1e-3);
        CHECK(dist <= prev);
        prev = dist;
    }
}

TEST_CASE("ladder dump lists every level") {
    const auto sys = nilpotent_example(-0.5, 0.7, 0.4, 0.3);
    const auto text = describe_ladder(build_ladder(sys));
    CHECK(text.find("k_under: 1") != std::string::npos);
    CHECK(text.find("nd_satisfied: true") != std::string::npos);
    CHECK(text.find("level 1 dim 1") != std::string::npos);
    CHECK(text.find("A_0:") != std::string::npos);
}
