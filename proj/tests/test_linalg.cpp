#include "doctest.h"

#include "hdde/errors.hpp"
#include "hdde/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace hdde;

namespace {

ComplexMatrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c) {
    std::normal_distribution<double> nd;
    std::vector<Complex> e(r * c);
    for (auto& z : e) z = {nd(rng), nd(rng)};
    return ComplexMatrix(r, c, e);
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
    return m;
}

ComplexMatrix with_singular_values(const SvdResult& s) {
    ComplexMatrix d(s.singular_values.size(), s.singular_values.size());
    for (std::size_t i = 0; i < s.singular_values.size(); ++i) d(i, i) = s.singular_values[i];
    return s.U * d * s.V.adjoint();
}

} // namespace

TEST_CASE("matrix construction validates shape and finiteness") {
    CHECK_THROWS_AS(ComplexMatrix(2, 2, std::vector<Complex>(3)), DimensionError);
    CHECK_THROWS_AS(ComplexMatrix(1, 1, std::vector<Complex>{Complex(NAN, 0.0)}), ConfigError);
    const auto m = ComplexMatrix::from_rows({{1.0, 2.0}, {3.0, Complex(0.0, 1.0)}});
    CHECK(m(1, 1) == Complex(0.0, 1.0));
    CHECK(m.adjoint()(1, 1) == Complex(0.0, -1.0));
    CHECK(m.adjoint()(0, 1) == Complex(3.0, 0.0));
}

TEST_CASE("det of simple matrices") {
    CHECK(std::abs(det(ComplexMatrix::identity(3)) - 1.0) < 1e-15);
    const std::vector<Complex> diag{2.0, Complex(0.0, 3.0)};
    CHECK(std::abs(det(ComplexMatrix::diagonal(diag)) - Complex(0.0, 6.0)) < 1e-15);
    CHECK_THROWS_AS(det(ComplexMatrix(2, 3)), DimensionError);
    // upper triangular: product of the diagonal, exactly
    const auto t = ComplexMatrix::from_rows({{2.0, 5.0, 7.0}, {0.0, -3.0, 1.0}, {0.0, 0.0, 0.5}});
    CHECK(det(t) == Complex(-3.0, 0.0));
}

TEST_CASE("det matches the product of eigenvalues") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t d = 1 + trial % 6;
        const auto m = random_matrix(rng, d, d);
        Complex prod = 1.0;
        for (const auto& z : eigenvalue_values(m)) prod *= z;
        const Complex dm = det(m);
        CHECK(std::abs(prod - dm) <= 1e-9 * std::max(1.0, std::abs(dm)));
    }
}

TEST_CASE("eigenvalues of structured matrices") {
    const std::vector<Complex> diag{-1.0, 2.0};
    auto ev = eigenvalue_values(ComplexMatrix::diagonal(diag));
    std::sort(ev.begin(), ev.end(), [](Complex a, Complex b) { return a.real() < b.real(); });
    CHECK(std::abs(ev[0] + 1.0) < 1e-14);
    CHECK(std::abs(ev[1] - 2.0) < 1e-14);

    const auto jordan = ComplexMatrix::from_rows({{0.0, 1.0}, {0.0, 0.0}});
    for (const auto& z : eigenvalue_values(jordan)) CHECK(std::abs(z) < 1e-12);

    // companion matrix of z^2 - (1+i) z + i against the quadratic formula
    const Complex p = -Complex(1.0, 1.0);
    const Complex q = Complex(0.0, 1.0);
    const auto comp = ComplexMatrix::from_rows({{0.0, -q}, {1.0, -p}});
    const Complex disc = std::sqrt(p * p - 4.0 * q);
    const Complex r1 = (-p + disc) / 2.0;
    const Complex r2 = (-p - disc) / 2.0;
    const auto got = eigenvalue_values(comp);
    REQUIRE(got.size() == 2);
    const bool direct = std::abs(got[0] - r1) < 1e-10 && std::abs(got[1] - r2) < 1e-10;
    const bool swapped = std::abs(got[0] - r2) < 1e-10 && std::abs(got[1] - r1) < 1e-10;
    CHECK((direct || swapped));
}

TEST_CASE("eigenvalue residuals are small") {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 50; ++t) {
        const auto m = random_matrix(rng, 5, 5);
        for (const auto& e : eigenvalues(m)) {
            ComplexMatrix shifted = m;
            shifted -= e.value * ComplexMatrix::identity(5);
            CHECK(svd(shifted).singular_values.back() < 1e-10 * norm2(m));
        }
    }
}

TEST_CASE("svd of the nilpotent block and of zero") {
    const auto a = ComplexMatrix::from_rows({{0.0, 1.0}, {0.0, 0.0}});
    const auto s = svd(a);
    CHECK(std::abs(s.singular_values[0] - 1.0) < 1e-15);
    CHECK(s.singular_values[1] < 1e-15);
    const auto z = svd(ComplexMatrix(3, 3));
    for (double v : z.singular_values) CHECK(v == 0.0);
    CHECK(max_abs_diff(z.U.adjoint() * z.U, ComplexMatrix::identity(3)) < 1e-14);
}

TEST_CASE("svd reconstructs random matrices") {
    std::mt19937_64 rng(1);
    for (int t = 0; t < 100; ++t) {
        const auto m = random_matrix(rng, 5, 5);
        const auto s = svd(m);
        CHECK((m - with_singular_values(s)).frobenius_norm() < 1e-12 * m.frobenius_norm());
    }
}

TEST_CASE("kernel vectors of the nilpotent block") {
    const auto a = ComplexMatrix::from_rows({{0.0, 1.0}, {0.0, 0.0}});
    const auto k = kernel_vectors(a, 1e-10);
    CHECK(k.rank == 1);
    REQUIRE(k.U1.cols() == 1);
    CHECK(std::abs(k.U1(0, 0)) < 1e-14);
    CHECK(std::abs(std::abs(k.U1(1, 0)) - 1.0) < 1e-14);
    CHECK(std::abs(std::abs(k.V1(0, 0)) - 1.0) < 1e-14);
    CHECK(std::abs(k.V1(1, 0)) < 1e-14);

    const auto full = kernel_vectors(ComplexMatrix::identity(3), 1e-10);
    CHECK(full.rank == 3);
    CHECK(full.U1.cols() == 0);
}

TEST_CASE("kernel vectors of a rank-one outer product are orthogonal to its factors") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 20; ++t) {
        const auto u = random_matrix(rng, 4, 1);
        const auto v = random_matrix(rng, 4, 1);
        const auto m = u * v.adjoint();
        const auto k = kernel_vectors(m, 1e-10);
        CHECK(k.rank == 1);
        REQUIRE(k.U1.cols() == 3);
        const double scale = norm2(m);
        CHECK((k.U1.adjoint() * u).frobenius_norm() < 1e-10 * u.frobenius_norm());
        CHECK((k.V1.adjoint() * v).frobenius_norm() < 1e-10 * v.frobenius_norm());
        CHECK((k.U1.adjoint() * m * k.V1).frobenius_norm() <= 10 * 1e-10 * scale);
    }
}

TEST_CASE("numerical rank honours the absolute floor") {
    const auto tiny = ComplexMatrix::from_rows({{1e-20}});
    CHECK(numerical_rank(tiny, 1e-10) == 1);
    CHECK(numerical_rank(tiny, 1e-10, 1.0) == 0);
}

TEST_CASE("cluster_values groups near-equal values") {
    const std::vector<Complex> v{1.0, 1.0 + 1e-10, 2.0};
    const auto c = cluster_values(v);
    REQUIRE(c.size() == 2);
    CHECK(c[0].second == 2);
    CHECK(c[1].second == 1);
}

TEST_CASE("polynomial roots and interpolation") {
    // (z - 1)(z + 2i)(z - 3) expanded by hand
    const Complex i(0.0, 1.0);
    const std::vector<Complex> coeffs{6.0 * i, 3.0 - 8.0 * i, -4.0 + 2.0 * i, 1.0};
    auto roots = poly_roots(coeffs);
    REQUIRE(roots.size() == 3);
    for (const Complex want : {Complex(1.0), -2.0 * i, Complex(3.0)}) {
        double best = 1e9;
        for (const auto& r : roots) best = std::min(best, std::abs(r - want));
        CHECK(best < 1e-12);
    }
    const auto fit = interpolate_on_circle([&](Complex z) { return poly_eval(coeffs, z); }, 3, 2.0);
    for (std::size_t j = 0; j < 4; ++j) CHECK(std::abs(fit[j] - coeffs[j]) < 1e-12);

    const auto trimmed = trim_polynomial({1.0, 2.0, 1e-18}, 1.0, 1e-10, 0.0);
    CHECK(trimmed.size() == 2);
    CHECK(trim_polynomial({1e-20, 1e-20}, 1.0, 1e-10, 1e-15).empty());
}
