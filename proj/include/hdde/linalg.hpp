#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

namespace hdde {

using Complex = std::complex<double>;

/// Dense complex matrix, row-major. Sized for d <= ~16.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    /// Zero matrix.
    ComplexMatrix(std::size_t rows, std::size_t cols);
    /// Throws DimensionError when rows*cols != entries.size(), ConfigError on
    /// non-finite entries.
    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);

    static ComplexMatrix identity(std::size_t n);
    static ComplexMatrix diagonal(std::span<const Complex> values);
    static ComplexMatrix from_rows(std::initializer_list<std::initializer_list<Complex>> rows);

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] bool square() const noexcept { return rows_ == cols_; }
    [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

    Complex& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    const Complex& operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    [[nodiscard]] std::span<const Complex> entries() const noexcept { return data_; }
    [[nodiscard]] std::span<Complex> entries() noexcept { return data_; }

    /// Conjugate transpose.
    [[nodiscard]] ComplexMatrix adjoint() const;
    /// Columns [first, first+count).
    [[nodiscard]] ComplexMatrix columns(std::size_t first, std::size_t count) const;

    [[nodiscard]] double frobenius_norm() const noexcept;
    [[nodiscard]] bool is_zero() const noexcept;

    ComplexMatrix& operator+=(const ComplexMatrix& other);
    ComplexMatrix& operator-=(const ComplexMatrix& other);
    ComplexMatrix& operator*=(Complex s) noexcept;

    friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> data_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(Complex s, ComplexMatrix a);

/// U * diag(singular_values) * V^* with singular values sorted descending.
struct SvdResult {
    ComplexMatrix U;
    std::vector<double> singular_values;
    ComplexMatrix V;
};

/// Eigenvalue estimate with |det(M - value I)| as a conditioning hint.
struct Eigenvalue {
    Complex value;
    double residual = 0.0;
};

/// Cokernel/kernel singular vectors of a rank-deficient matrix.
struct KernelBasis {
    ComplexMatrix U1; ///< left singular vectors for the zero singular values
    ComplexMatrix V1; ///< right singular vectors for the zero singular values
    std::size_t rank = 0;
};

/// Default relative threshold separating zero from nonzero singular values.
inline constexpr double kDefaultRankTol = 1e-10;

/// Determinant via LU with partial pivoting.
Complex det(const ComplexMatrix& m);

/// All eigenvalues with algebraic multiplicity (Hessenberg + shifted QR).
std::vector<Eigenvalue> eigenvalues(const ComplexMatrix& m);

/// Values only, in the order returned by eigenvalues().
std::vector<Complex> eigenvalue_values(const ComplexMatrix& m);

/// One-sided Jacobi SVD of a square matrix.
SvdResult svd(const ComplexMatrix& m);

/// Largest singular value.
double norm2(const ComplexMatrix& m);

/// Singular values <= rank_tol * max(sigma_max, scale) count as zero. `scale`
/// gives an absolute floor so that pure round-off matrices register as zero.
KernelBasis kernel_vectors(const ComplexMatrix& m, double rank_tol = kDefaultRankTol, double scale = 0.0);

/// Number of singular values above rank_tol * max(sigma_max, scale).
std::size_t numerical_rank(const ComplexMatrix& m, double rank_tol = kDefaultRankTol, double scale = 0.0);

/// Group values lying within `radius` of each other; returns (representative,
/// count) pairs in first-seen order.
std::vector<std::pair<Complex, std::size_t>> cluster_values(std::span<const Complex> values, double radius = 1e-8);

// ---------------------------------------------------------------------------
// Polynomials (coefficients in ascending powers).

Complex poly_eval(std::span<const Complex> coeffs, Complex z) noexcept;

/// Roots of a polynomial whose leading coefficient is nonzero. Companion
/// eigenvalues followed by a few Newton polishing steps.
std::vector<Complex> poly_roots(std::span<const Complex> coeffs);

/// Coefficients of the unique polynomial of degree <= degree interpolating `f`
/// at degree+1 equispaced nodes on the circle |z| = radius.
std::vector<Complex> interpolate_on_circle(const std::function<Complex(Complex)>& f, std::size_t degree,
                                           double radius);

/// Drop leading coefficients whose scaled magnitude |c_j| radius^j is at most
/// rel_tol times the largest scaled magnitude. Returns an empty vector when
/// every scaled magnitude is <= abs_tol.
std::vector<Complex> trim_polynomial(std::vector<Complex> coeffs, double radius, double rel_tol, double abs_tol);

} // namespace hdde
