#include "doctest.h"

#include "hdde/errors.hpp"
#include "hdde/model.hpp"

#include <cmath>
#include <filesystem>
#include <random>

using namespace hdde;

namespace {

ComplexMatrix random_matrix(std::mt19937_64& rng, std::size_t d, bool real_only = false) {
    std::normal_distribution<double> nd;
    std::vector<Complex> e(d * d);
    for (auto& z : e) z = {nd(rng), real_only ? 0.0 : nd(rng)};
    return ComplexMatrix(d, d, e);
}

DelaySystem random_system(std::mt19937_64& rng, std::size_t d, std::size_t n, bool real_only = false) {
    std::uniform_real_distribution<double> us(0.5, 2.0);
    std::vector<ComplexMatrix> m;
    std::vector<double> sigma;
    for (std::size_t k = 0; k <= n; ++k) m.push_back(random_matrix(rng, d, real_only));
    for (std::size_t k = 0; k < n; ++k) sigma.push_back(us(rng));
    return DelaySystem(std::move(m), std::move(sigma));
}

// Root of -x + exp(-x) on [0, 1] by plain bisection.
double bisection_root() {
    double lo = 0.0;
    double hi = 1.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (-mid + std::exp(-mid) > 0.0) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

TEST_CASE("delays follow sigma_k eps^-k") {
    const auto s2 = DelaySystem::scalar({-1.0, 1.0, 1.0}, {1.0, 1.0});
    const auto t = delays(s2, Epsilon(0.01));
    CHECK(t[0] == doctest::Approx(100.0));
    CHECK(t[1] == doctest::Approx(10000.0));
    CHECK(delays(DelaySystem::scalar({-1.0, 1.0}, {2.0}), Epsilon(0.5))[0] == doctest::Approx(4.0));
    const auto t3 = delays(DelaySystem::scalar({-1.0, 1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}), Epsilon(0.1));
    CHECK(t3[0] == doctest::Approx(10.0));
    CHECK(t3[1] == doctest::Approx(100.0));
    CHECK(t3[2] == doctest::Approx(1000.0));
}

TEST_CASE("invalid systems and eps are rejected") {
    CHECK_THROWS_AS(Epsilon(0.0), ConfigError);
    CHECK_THROWS_AS(Epsilon(1.5), ConfigError);
    CHECK_THROWS_AS(DelaySystem::scalar({1.0}, {}), ConfigError);
    CHECK_THROWS_AS(DelaySystem::scalar({1.0, 0.0}, {1.0}), ConfigError);
    CHECK_THROWS_AS(DelaySystem::scalar({1.0, 1.0}, {-1.0}), ConfigError);
    CHECK_THROWS_AS(DelaySystem({ComplexMatrix::identity(2), ComplexMatrix::identity(3)}, {1.0}), ConfigError);
}

TEST_CASE("characteristic matrix at lambda = 0 is A0 + sum A_k for every eps") {
    std::mt19937_64 rng(7);
    const auto sys = random_system(rng, 3, 2);
    const ComplexMatrix sum = sys.A(0) + sys.A(1) + sys.A(2);
    for (double e : {0.5, 0.1, 0.01}) {
        const auto m = char_matrix(sys, Epsilon(e), 0.0);
        CHECK((m - sum).frobenius_norm() < 1e-14);
        CHECK(std::abs(char_value(sys, Epsilon(e), 0.0) - det(sum)) < 1e-12);
    }
}

TEST_CASE("scalar characteristic function matches its closed form") {
    const Complex a(-0.3, 0.2);
    const Complex b(0.7, -0.1);
    const auto sys = DelaySystem::scalar({a, b}, {1.0});
    const Epsilon eps(0.25);
    const Complex lam(0.01, 1.3);
    CHECK(std::abs(char_value(sys, eps, lam) - (-lam + a + b * std::exp(-lam / 0.25))) < 1e-13);
}

TEST_CASE("chi(-x + e^-x) has the bisection root") {
    const auto sys = DelaySystem::scalar({0.0, 1.0}, {1.0});
    const double root = bisection_root();
    CHECK(std::abs(root - 0.5671432904097838) < 1e-12);
    CHECK(std::abs(char_value(sys, Epsilon(1.0), 0.567143)) < 1e-5);
}

TEST_CASE("evaluation guard names the offending scale") {
    const auto sys = DelaySystem::scalar({-1.0, 1.0, 1.0}, {1.0, 1.0});
    try {
        (void)char_value(sys, Epsilon(0.01), Complex(-0.2, 0.0));
        FAIL("expected a guard violation");
    } catch (const EvaluationRangeError& e) {
        CHECK(e.scale() == 2);
    }
    CHECK_NOTHROW((void)char_value(sys, Epsilon(0.01), Complex(-0.05, 0.0)));
}

TEST_CASE("conjugate symmetry for real systems") {
    std::mt19937_64 rng(21);
    for (int t = 0; t < 20; ++t) {
        const auto sys = random_system(rng, 1 + t % 3, 1 + t % 2, true);
        const Complex lam(0.03 * (t % 5) - 0.05, 0.7 * t - 3.0);
        const Epsilon eps(0.3);
        const Complex v = char_value(sys, eps, lam);
        const Complex w = char_value(sys, eps, std::conj(lam));
        CHECK(std::abs(w - std::conj(v)) <= 1e-10 * std::max(1.0, std::abs(v)));
    }
}

TEST_CASE("derivative agrees with central differences") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> ure(-0.2, 0.2);
    std::uniform_real_distribution<double> uim(-3.0, 3.0);
    int checked = 0;
    for (int t = 0; t < 100; ++t) {
        const auto sys = random_system(rng, 1 + t % 4, 1 + t % 3);
        const Epsilon eps(0.5);
        const Complex lam(ure(rng), uim(rng));
        const double h = 1e-6 * (1.0 + std::abs(lam));
        const Complex fd = (char_value(sys, eps, lam + h) - char_value(sys, eps, lam - h)) / (2.0 * h);
        const Complex an = char_derivative(sys, eps, lam);
        CHECK(std::abs(an - fd) <= 1e-6 * (1.0 + std::abs(an)));
        ++checked;
    }
    CHECK(checked == 100);
}

TEST_CASE("CharacteristicFunction agrees with the free functions") {
    std::mt19937_64 rng(4);
    const auto sys = random_system(rng, 3, 2);
    const Epsilon eps(0.2);
    const CharacteristicFunction f(sys, eps);
    const Complex lam(0.01, 0.4);
    CHECK(std::abs(f.value(lam) - char_value(sys, eps, lam)) < 1e-12 * std::abs(f.value(lam)));
    CHECK(f.oscillation_rate() == doctest::Approx(std::max(1.0, f.taus().back())));
}

TEST_CASE("system files round-trip bit-exactly") {
    std::mt19937_64 rng(17);
    const auto sys = random_system(rng, 3, 2);
    const auto text = serialize_system(sys);
    const auto back = parse_system(text);
    CHECK(back == sys);
    CHECK(parse_system(serialize_system(back)) == sys);

    const auto path = std::filesystem::temp_directory_path() / "hdde_roundtrip_system.json";
    save_system(sys, path);
    CHECK(load_system(path) == sys);
    std::filesystem::remove(path);
}

TEST_CASE("system files accept plain numbers and reject malformed input") {
    const auto s = parse_system(R"({"d":1,"n":1,"sigma":[1],"A0":[[-0.5]],"A1":[[[0.2,0.1]]]})");
    CHECK(s.A(0)(0, 0) == Complex(-0.5, 0.0));
    CHECK(s.A(1)(0, 0) == Complex(0.2, 0.1));
    CHECK_THROWS_AS(parse_system("{"), ConfigError);
    CHECK_THROWS_AS(parse_system(R"({"d":1,"n":1,"sigma":[1],"A0":[[1]]})"), ConfigError);
    CHECK_THROWS_AS(parse_system(R"({"d":2,"n":1,"sigma":[1],"A0":[[1]],"A1":[[1]]})"), ConfigError);
}
