#pragma once

#include "hdde/verdict.hpp"

#include <optional>
#include <utility>

namespace hdde::scalar2 {

/// -lambda + a + b exp(-lambda / eps) + c exp(-lambda / eps^2), sigma = (1, 1).
///
/// Everything here is written out in closed form and never calls the general
/// machinery, so it can serve as an oracle for it.
struct ScalarParams {
    Complex a;
    Complex b;
    Complex c;

    /// Throws ConfigError unless a, b and c are nonzero.
    void validate() const;
};

ExtendedReal gamma1(const ScalarParams& p, double omega);

/// Im a +- sqrt(|b|^2 - Re a^2) when |b| >= |Re a| (equal pair at equality).
std::optional<std::pair<double, double>> gamma1_zeros(const ScalarParams& p);

/// ln(|b| / |Re a|), +inf for Re a = 0.
ExtendedReal sup_gamma1(const ScalarParams& p);

ExtendedReal gamma2(const ScalarParams& p, double omega, double phi1);

/// Im a - |b| sin(phi1 - Arg b): the maximizer of gamma2 over omega.
double omega_max(const ScalarParams& p, double phi1);

/// -ln((|Re a| - |b|) / |c|) when |Re a| > |b|, +inf otherwise.
ExtendedReal sup_gamma2(const ScalarParams& p);

struct SingularPhase {
    double omega = 0.0;
    double phi = 0.0;      ///< in [0, 2 pi)
    double residual = 0.0; ///< |-i omega + a + b exp(-i phi)|
};

/// The phases at which gamma2 is singular at omega_1 and omega_2 (same
/// order as gamma1_zeros), from the arctan formula with the branch chosen by
/// the smallest residual. nullopt when |b| < |Re a|.
std::optional<std::pair<SingularPhase, SingularPhase>> phi_singular(const ScalarParams& p);

/// Table of the scalar example: Re a > 0 strongly unstable, |b| > |Re a|
/// unstable at scale 1, |c| > |Re a| - |b| unstable at scale 2, otherwise
/// stable; within `margin` of a boundary the verdict is Marginal.
StabilityVerdict classify_scalar(const ScalarParams& p, double margin = 1e-12);

} // namespace hdde::scalar2
