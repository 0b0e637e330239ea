#pragma once

#include "hdde/degeneracy.hpp"
#include "hdde/linalg.hpp"
#include "hdde/model.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hdde {

/// (omega, phi_1..phi_{k-1}) with every phi_j in [0, 2 pi / sigma_j).
struct PhasePoint {
    double omega = 0.0;
    std::vector<double> phi;

    friend bool operator==(const PhasePoint&, const PhasePoint&) = default;
};

/// Reduce phi into [0, period).
double canonical_phase(double phi, double period) noexcept;

/// Builds a PhasePoint with canonicalized phases; phi.size() must not exceed
/// sigma.size().
PhasePoint make_point(double omega, std::vector<double> phi, const std::vector<double>& sigma);

/// Real number extended by -inf and +inf. Infinite values carry no payload.
class ExtendedReal {
public:
    enum class Kind { NegInf, Finite, PosInf };

    constexpr ExtendedReal() = default;
    static constexpr ExtendedReal finite(double v) noexcept { return ExtendedReal(Kind::Finite, v); }
    static constexpr ExtendedReal pos_inf() noexcept { return ExtendedReal(Kind::PosInf, 0.0); }
    static constexpr ExtendedReal neg_inf() noexcept { return ExtendedReal(Kind::NegInf, 0.0); }

    [[nodiscard]] constexpr Kind kind() const noexcept { return kind_; }
    [[nodiscard]] constexpr bool is_finite() const noexcept { return kind_ == Kind::Finite; }
    [[nodiscard]] constexpr bool is_pos_inf() const noexcept { return kind_ == Kind::PosInf; }
    [[nodiscard]] constexpr bool is_neg_inf() const noexcept { return kind_ == Kind::NegInf; }
    /// Finite payload; 0 for infinities.
    [[nodiscard]] constexpr double value() const noexcept { return value_; }

    friend constexpr bool operator<(const ExtendedReal& a, const ExtendedReal& b) noexcept {
        if (a.kind_ != b.kind_) return static_cast<int>(a.kind_) < static_cast<int>(b.kind_);
        return a.is_finite() && a.value_ < b.value_;
    }
    friend constexpr bool operator==(const ExtendedReal&, const ExtendedReal&) = default;

    /// "-inf", "inf" or the value with 17 significant digits.
    [[nodiscard]] std::string to_string() const;

private:
    constexpr ExtendedReal(Kind k, double v) : kind_(k), value_(v) {}
    Kind kind_ = Kind::Finite;
    double value_ = 0.0;
};

struct ManifoldSample {
    std::size_t k = 0;
    PhasePoint point;
    std::size_t branch = 0;
    std::optional<Complex> Y; ///< absent for degree-deficiency (-inf) branches
    ExtendedReal gamma;
    std::optional<Complex> projected; ///< gamma + i omega when gamma is finite
    bool tilde = false;               ///< produced by a projected (tilde) function
};

struct StrongSpectrum {
    std::vector<Complex> S0;
    std::vector<Complex> S0_plus;
    std::optional<double> r0; ///< nullopt encodes +inf
    double r = 0.0;
};

/// Eigenvalues of A0, the unstable part (Re > 1e-12) and the radii r0, r.
StrongSpectrum strong_spectrum(const DelaySystem& sys);

/// det(-i omega J + C_0 + sum_{j<k} C_j exp(-i sigma_j phi_j) + C_k Y).
///
/// With J = I and C_j = A_j this is chi_k; with the level k+1 projections of
/// the degeneracy ladder it is the projected function chi~_k.
struct CharLevel {
    std::size_t k = 0;
    ComplexMatrix J;
    std::vector<ComplexMatrix> C; ///< C_0..C_k
    std::vector<double> sigma;    ///< sigma_1..sigma_k
    std::size_t top_rank = 0;     ///< d_k = rank C_k, the generic degree in Y
    double top_smin = 0.0;        ///< smallest nonzero singular value of C_k
    bool tilde = false;

    [[nodiscard]] std::size_t dim() const noexcept { return J.rows(); }
};

/// chi_k of the full system, 1 <= k <= n.
CharLevel full_level(const DelaySystem& sys, std::size_t k, double rank_tol = kDefaultRankTol);

/// chi~_k from ladder level k+1, or nullopt when that level does not exist
/// (k >= n or the singular chain stops above k+1).
std::optional<CharLevel> tilde_level(const DegeneracyLadder& ladder, const DelaySystem& sys, std::size_t k,
                                     double rank_tol = kDefaultRankTol);

/// B = -i omega J + C_0 + sum_{j<k} C_j exp(-i sigma_j phi_j).
ComplexMatrix base_matrix(const CharLevel& level, const PhasePoint& point);

/// Ascending coefficients in Y, trimmed to the effective degree (<= d_k).
/// Throws TrivialityError when the polynomial vanishes identically.
std::vector<Complex> char_poly(const CharLevel& level, const PhasePoint& point);

/// The d_k branches at `point`, ordered +inf first, then by decreasing gamma,
/// then -inf.
std::vector<ManifoldSample> branches(const CharLevel& level, const PhasePoint& point);

/// Largest gamma over all branches (-inf when every branch is -inf).
ExtendedReal max_gamma(const CharLevel& level, const PhasePoint& point);

std::vector<Complex> truncated_char_poly(const DelaySystem& sys, std::size_t k, const PhasePoint& point);
std::vector<ManifoldSample> gamma_branches(const DelaySystem& sys, std::size_t k, const PhasePoint& point);

struct SingularityFlags {
    bool plus_infinity = false;
    bool minus_infinity = false;
};

/// Singular-point conditions for gamma at `point`: plus when det B_k = 0 (and
/// the cokernel block U* B_k V is regular), minus when U* B_k V is singular
/// while B_k is not. For full-rank A_k the minus flag is always false.
SingularityFlags singularity_test(const DelaySystem& sys, std::size_t k, const PhasePoint& point,
                                  double rank_tol = kDefaultRankTol);

/// Pi(a + ib) = a eps^-k + ib.
Complex rescale(Epsilon eps, std::size_t k, Complex lambda) noexcept;

struct GridConfig {
    std::size_t omega_points = 401;
    std::size_t phase_points = 64;
    /// Defaults to [-Omega, Omega] with Omega = |A0| + sum |A_k| + 1.
    std::optional<std::pair<double, double>> omega_range;
};

/// ||A0|| + sum ||A_k|| + 1 (induced 2-norms).
double omega_bound(const DelaySystem& sys);

/// All branches on the grid, lexicographic in (omega, phi, branch).
std::vector<ManifoldSample> sample_manifold(const CharLevel& level, const GridConfig& grid,
                                            std::pair<double, double> omega_range);

/// Samples of A_k: gamma > 0 from chi_k plus gamma < 0 from chi~_k for k < n,
/// every finite sample for k = n.
std::vector<ManifoldSample> assemble_A_k_samples(const DelaySystem& sys, const DegeneracyLadder& ladder,
                                                 std::size_t k, const GridConfig& grid);

/// Projected points gamma + i omega of assemble_A_k_samples.
std::vector<Complex> assemble_A_k(const DelaySystem& sys, const DegeneracyLadder& ladder, std::size_t k,
                                  const GridConfig& grid);

/// Distance from the rescaled point z to the part of A_k lying on the line
/// Im = Im z. The first phase is swept with `phi1_points` samples (further
/// phases with grid.phase_points) and branch values between consecutive
/// samples are treated as continuous. nullopt when the slice is empty.
std::optional<double> slice_distance(const DelaySystem& sys, const DegeneracyLadder& ladder, std::size_t k,
                                     Complex z, const GridConfig& grid, std::size_t phi1_points = 256);

/// CSV: k, omega, phi_1..phi_{n-1}, branch, gamma, Y_re, Y_im, flags.
void write_manifold_csv(std::ostream& os, const std::vector<ManifoldSample>& samples, std::size_t n);

} // namespace hdde
