#pragma once

#include "hdde/linalg.hpp"

#include <cstddef>
#include <functional>
#include <numbers>
#include <vector>

namespace hdde {

/// Axis-aligned search window in the complex plane.
struct Rectangle {
    double re_min = 0.0;
    double re_max = 0.0;
    double im_min = 0.0;
    double im_max = 0.0;

    /// Throws ConfigError unless re_min < re_max and im_min < im_max.
    void validate() const;
    [[nodiscard]] Complex center() const noexcept { return {0.5 * (re_min + re_max), 0.5 * (im_min + im_max)}; }
    [[nodiscard]] double width() const noexcept { return re_max - re_min; }
    [[nodiscard]] double height() const noexcept { return im_max - im_min; }
    [[nodiscard]] double diagonal() const noexcept;
    [[nodiscard]] bool contains(Complex z, double slack = 0.0) const noexcept;
    /// Grow every side by `amount`.
    [[nodiscard]] Rectangle inflated(double amount) const noexcept;
};

struct RootResult {
    Complex location;
    std::size_t multiplicity = 1;
    double residual = 0.0; ///< |f(location)|
    bool newton_converged = false;
};

/// f together with optional f' and hints about how fast arg f can turn.
///
/// The rates bound |d arg f / ds| along vertical (imaginary) and horizontal
/// (real) lines away from zeros; they set the initial boundary sampling density
/// so the phase tracker cannot alias. Zero means "no a-priori bound".
struct AnalyticFunction {
    std::function<Complex(Complex)> value;
    std::function<Complex(Complex)> derivative;
    double im_rate = 0.0;
    double re_rate = 0.0;
};

struct RootFinderOptions {
    double tol = 1e-10;                         ///< Newton step, smallest merge radius
    double boundary_tol = 1e-13;                ///< |f| <= boundary_tol * local scale counts as a boundary zero
    double max_phase_step = std::numbers::pi / 4;
    int max_depth = 40;                         ///< quadrisection levels (bisections count half)
    int newton_max_iter = 50;
    int boundary_retries = 3;
    /// A cell still holding several zeros is reported as one cluster (with the
    /// summed multiplicity) once its diagonal drops below cluster_tol * (1 + |center|);
    /// found zeros closer than that are merged the same way.
    double cluster_tol = 1e-6;
};

/// Winding number of f along the boundary of rect: the number of zeros
/// inside, counted with multiplicity. Inflates the rectangle by 1e-6 of its
/// diagonal (up to boundary_retries times) when a zero sits on the contour.
std::size_t count_zeros(const AnalyticFunction& f, const Rectangle& rect, const RootFinderOptions& opts = {});

/// All zeros inside rect with multiplicities, sorted by (Im, Re). Total
/// multiplicity equals count_zeros on the same rectangle.
std::vector<RootResult> find_roots(const AnalyticFunction& f, const Rectangle& rect,
                                   const RootFinderOptions& opts = {});

} // namespace hdde
