#pragma once

#include "hdde/linalg.hpp"
#include "hdde/model.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace hdde {

/// One step of the cokernel projection recursion.
///
/// Level k holds J = U^* V and A_proj[j] = U^* A_j V (j = 0..k-1) where U, V
/// span the cokernel/kernel of A_n (level n) or of the previous level's
/// order-k projected matrix A_{k,1}^{(k+1)} (levels k < n).
struct LadderLevel {
    std::size_t k = 0;
    ComplexMatrix J;
    std::vector<ComplexMatrix> A_proj;
    std::size_t dim = 0;
};

struct DegeneracyLadder {
    /// Ordered from level n downwards.
    std::vector<LadderLevel> levels;
    /// Lowest index of an unbroken singular chain reaching level 1..n-1
    /// (or level 1 when n = 1); nullopt when the chain stops at level n.
    std::optional<std::size_t> k_under;
    bool an_singular = false;
    bool nd_satisfied = true;
    /// Recomputing with a 10x looser rank tolerance changed the ladder.
    bool rank_unstable = false;
    std::vector<std::string> warnings;

    /// Level record for index k, or nullptr.
    [[nodiscard]] const LadderLevel* level(std::size_t k) const noexcept;
    /// Levels exist but k_under is undefined: truncated spectra built from
    /// them have no asymptotic guarantee.
    [[nodiscard]] bool heuristic() const noexcept { return an_singular && !k_under; }
};

/// Builds the projection ladder and evaluates condition (ND).
DegeneracyLadder build_ladder(const DelaySystem& sys, double rank_tol = kDefaultRankTol);

/// Condition (ND); vacuously true when A_n is invertible.
bool check_nd(const DegeneracyLadder& ladder, const DelaySystem& sys, double rank_tol = kDefaultRankTol);

/// chi~_k(lambda) from level k+1 (1 <= k <= n-1), or chi~_0 from level 1.
/// Throws ConfigError when the level is missing; the model evaluation guard
/// applies for k >= 1.
Complex truncated_char(const DegeneracyLadder& ladder, const DelaySystem& sys, std::size_t k, Epsilon eps,
                       Complex lambda);

/// Finite zeros of chi~_0 with negative real part, with multiplicity, when
/// k_under = 1; empty otherwise. Throws DegeneracyError if chi~_0 vanishes
/// identically.
std::vector<Complex> strong_stable_spectrum(const DegeneracyLadder& ladder, double rank_tol = kDefaultRankTol);

/// All finite zeros of det(-lambda J + A) (pencil eigenvalues) via
/// determinant interpolation on a circle; infinite eigenvalues drop out as
/// degree deficiency.
std::vector<Complex> pencil_eigenvalues(const ComplexMatrix& J, const ComplexMatrix& A);

/// Human-readable dump of the ladder (level, dimensions, matrices).
std::string describe_ladder(const DegeneracyLadder& ladder);

} // namespace hdde
