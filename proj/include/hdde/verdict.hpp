#pragma once

#include "hdde/linalg.hpp"
#include "hdde/manifolds.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace hdde {

enum class Stability { StronglyUnstable, WeaklyUnstable, Stable, Marginal };

std::string to_string(Stability s);

/// Point where gamma^(k) attains (or approaches) its supremum.
struct ManifoldWitness {
    std::size_t k = 0;
    PhasePoint point;
    std::size_t branch = 0;
    ExtendedReal gamma;
};

struct SupEstimate {
    std::size_t k = 0;
    ExtendedReal sup;
    double uncertainty = 0.0;
    std::optional<ManifoldWitness> argmax;
};

struct StabilityVerdict {
    Stability status = Stability::Marginal;
    /// Destabilizing scale for WeaklyUnstable.
    std::optional<std::size_t> scale;
    /// Eigenvalue of A0 with positive real part (StronglyUnstable).
    std::optional<Complex> strong_witness;
    /// Destabilizing manifold point (WeaklyUnstable).
    std::optional<ManifoldWitness> manifold_witness;
    std::vector<SupEstimate> sups;
    std::vector<std::string> notes;
};

} // namespace hdde
