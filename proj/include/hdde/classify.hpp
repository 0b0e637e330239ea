#pragma once

#include "hdde/degeneracy.hpp"
#include "hdde/manifolds.hpp"
#include "hdde/verdict.hpp"

#include <string>
#include <utility>
#include <vector>

namespace hdde {

struct SupSearchConfig {
    GridConfig grid;
    std::size_t refine_seeds = 5;
    int max_iterations = 4000;
    /// Re-search on a doubled omega window when the argmax lies within 5% of
    /// the window edge.
    bool leakage_check = true;
};

struct SupResult {
    ExtendedReal sup;
    ManifoldWitness argmax;
    double uncertainty = 0.0;
    std::vector<std::string> warnings;
};

/// sup over (omega, phi) and branches of gamma for one characteristic level:
/// grid scan, Gauss-Newton on det B = 0 to detect +inf, then Nelder-Mead
/// from the best grid cells.
SupResult sup_gamma(const CharLevel& level, const SupSearchConfig& cfg, std::pair<double, double> omega_range);

/// Same for chi_k of `sys` on the default omega window.
SupResult sup_gamma(const DelaySystem& sys, std::size_t k, const SupSearchConfig& cfg = {});

struct ClassifyOptions {
    double margin = 1e-6;
    SupSearchConfig search;
};

/// Throws NdViolation when the ladder reports (ND) failing.
StabilityVerdict classify(const DelaySystem& sys, const DegeneracyLadder& ladder, const ClassifyOptions& opts = {});

std::string verdict_text(const StabilityVerdict& v);
std::string verdict_json(const StabilityVerdict& v);

} // namespace hdde
