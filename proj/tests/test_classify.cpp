#include "doctest.h"

#include "hdde/classify.hpp"
#include "hdde/errors.hpp"
#include "hdde/scalar2.hpp"

#include "json.hpp"

#include <cmath>
#include <random>

using namespace hdde;

namespace {

const Complex kA(-0.4, 0.5);

DelaySystem two_delay(Complex a, Complex b, Complex c) { return DelaySystem::scalar({a, b, c}, {1.0, 1.0}); }

StabilityVerdict verdict(const DelaySystem& sys) { return classify(sys, build_ladder(sys)); }

ComplexMatrix random_matrix(std::mt19937_64& rng, std::size_t d, double scale) {
    std::normal_distribution<double> nd;
    std::vector<Complex> e(d * d);
    for (auto& z : e) z = {scale * nd(rng), scale * nd(rng)};
    return ComplexMatrix(d, d, e);
}

} // namespace

TEST_CASE("sup gamma^(2) across the neutral threshold") {
    const auto below = sup_gamma(two_delay(kA, 0.1, 0.2), 2);
    REQUIRE(below.sup.is_finite());
    CHECK(below.sup.value() == doctest::Approx(std::log(2.0 / 3.0)).epsilon(1e-6));

    const auto neutral = sup_gamma(two_delay(kA, 0.1, 0.3), 2);
    REQUIRE(neutral.sup.is_finite());
    CHECK(std::abs(neutral.sup.value()) <= 1e-4);

    const auto above = sup_gamma(two_delay(kA, 0.1, 0.4), 2);
    REQUIRE(above.sup.is_finite());
    CHECK(std::abs(above.sup.value() - std::log(4.0 / 3.0)) <= 1e-4);
    CHECK(above.argmax.k == 2);
    CHECK(above.argmax.point.omega == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("sup gamma^(2) is unbounded when |b| > |Re a|") {
    const auto r = sup_gamma(two_delay(kA, 0.5, 0.3), 2);
    CHECK(r.sup.is_pos_inf());
    CHECK(r.argmax.gamma.is_pos_inf());
    // the witness is a singular point: -i omega + a + b e^{-i phi} = 0
    const Complex i(0.0, 1.0);
    const auto& pt = r.argmax.point;
    CHECK(std::abs(-i * pt.omega + kA + 0.5 * std::exp(-i * pt.phi[0])) < 1e-6);
}

TEST_CASE("sup gamma^(1) of a scalar system is ln(|b| / |Re a|) / sigma_1") {
    for (double sigma : {1.0, 2.0, 0.7}) {
        const Complex a(-0.6, 0.2);
        const Complex b(0.1, 0.25);
        const auto sys = DelaySystem::scalar({a, b}, {sigma});
        const auto r = sup_gamma(sys, 1);
        REQUIRE(r.sup.is_finite());
        CHECK(std::abs(r.sup.value() - std::log(std::abs(b) / 0.6) / sigma) < 1e-8);
    }
}

TEST_CASE("verdicts of the scalar presets") {
    const auto stable = verdict(two_delay(kA, 0.1, 0.2));
    CHECK(stable.status == Stability::Stable);
    CHECK(stable.sups.size() == 2);

    const auto neutral = verdict(two_delay(kA, 0.1, 0.3));
    CHECK(neutral.status == Stability::Marginal);

    const auto unstable = verdict(two_delay(kA, 0.1, 0.4));
    CHECK(unstable.status == Stability::WeaklyUnstable);
    CHECK(unstable.scale == std::size_t{2});
    REQUIRE(unstable.manifold_witness.has_value());
    CHECK(unstable.manifold_witness->gamma.value() > 1e-6);

    const auto weak1 = verdict(two_delay(kA, 0.5, 0.3));
    CHECK(weak1.status == Stability::WeaklyUnstable);
    CHECK(weak1.scale == std::size_t{1});
    CHECK_FALSE(weak1.notes.empty());

    const auto strong = verdict(two_delay(0.7, 0.2, 0.9));
    CHECK(strong.status == Stability::StronglyUnstable);
    REQUIRE(strong.strong_witness.has_value());
    CHECK(std::abs(*strong.strong_witness - 0.7) < 1e-12);
}

TEST_CASE("verdict is monotone in |c| across the threshold") {
    // |Re a| - |b| = 0.3
    for (int i = 0; i <= 20; ++i) {
        const double c = 0.2 + 0.01 * i;
        if (std::abs(c - 0.3) < 0.005) continue;
        const auto v = verdict(two_delay(kA, 0.1, c));
        CAPTURE(c);
        if (c < 0.3) {
            CHECK(v.status == Stability::Stable);
        } else {
            CHECK(v.status == Stability::WeaklyUnstable);
            CHECK(v.scale == std::size_t{2});
        }
    }
}

TEST_CASE("verdict is invariant under unitary similarity") {
    std::mt19937_64 rng(41);
    for (int t = 0; t < 3; ++t) {
        const std::vector<Complex> d0{Complex(-1.0, 0.3), Complex(-0.8, -0.2)};
        const auto A0 = ComplexMatrix::diagonal(d0) + random_matrix(rng, 2, 0.05);
        const auto A1 = random_matrix(rng, 2, 0.15);
        const auto A2 = random_matrix(rng, 2, t == 0 ? 0.15 : 0.6);
        const auto Q = svd(random_matrix(rng, 2, 1.0)).U;
        const DelaySystem sys({A0, A1, A2}, {1.0, 1.3});
        const DelaySystem rot({Q.adjoint() * A0 * Q, Q.adjoint() * A1 * Q, Q.adjoint() * A2 * Q}, {1.0, 1.3});
        const auto v1 = verdict(sys);
        const auto v2 = verdict(rot);
        CHECK(v1.status == v2.status);
        CHECK(v1.scale == v2.scale);
        REQUIRE(v1.sups.size() == v2.sups.size());
        for (std::size_t k = 0; k < v1.sups.size(); ++k) {
            REQUIRE(v1.sups[k].sup.is_finite());
            CHECK(std::abs(v1.sups[k].sup.value() - v2.sups[k].sup.value()) < 1e-6);
        }
    }
}

TEST_CASE("ND violation refuses classification") {
    const DelaySystem sys({ComplexMatrix::from_rows({{-0.5, 0.7}, {0.0, 0.3}}),
                           ComplexMatrix::from_rows({{0.0, 1.0}, {0.0, 0.0}})},
                          {1.0});
    CHECK_THROWS_AS(verdict(sys), NdViolation);
}

TEST_CASE("verdict text and json") {
    const auto v = verdict(two_delay(kA, 0.1, 0.4));
    const auto text = verdict_text(v);
    CHECK(text.find("WeaklyUnstable") != std::string::npos);
    CHECK(text.find("k,sup_gamma,uncertainty") != std::string::npos);
    const auto j = nlohmann::json::parse(verdict_json(v));
    CHECK(j["status"] == "WeaklyUnstable");
    CHECK(j["scale"] == 2);
    CHECK(j["sups"].size() == 2);
}

TEST_CASE("closed-form and general classifiers agree off the boundaries") {
    // a coarse slice of the acceptance lattice; the full lattice runs in the acceptance binary
    for (double re : {-0.8, -0.4, 0.4})
        for (double nb : {0.05, 0.6})
            for (double nc : {0.05, 0.9}) {
                const scalar2::ScalarParams p{Complex(re, 0.3), Complex(0.0, nb), Complex(nc, 0.0)};
                const auto closed = scalar2::classify_scalar(p);
                const auto general = verdict(two_delay(p.a, p.b, p.c));
                CAPTURE(re);
                CAPTURE(nb);
                CAPTURE(nc);
                CHECK(closed.status == general.status);
                CHECK(closed.scale == general.scale);
            }
}
