#pragma once

#include "hdde/classify.hpp"
#include "hdde/degeneracy.hpp"
#include "hdde/manifolds.hpp"
#include "hdde/model.hpp"
#include "hdde/rootfinder.hpp"
#include "hdde/scalar2.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hdde {

// ---------------------------------------------------------------------------
// Run configuration (JSON)
//
//   {
//     "system": { ...system schema... }   or   "system_file": "sys.json",
//     "eps": [0.05, 0.02],
//     "window": [re_min, re_max, im_min, im_max],     optional
//     "grid": {"omega": 401, "phase": 64, "omega_range": [lo, hi]},
//     "tol": 1e-10, "rank_tol": 1e-10, "margin": 1e-6,
//     "delta": 0.05, "distance_cap": 1.0,
//     "output": {"dir": "out", "format": "csv"}
//   }

struct RunConfig {
    std::optional<DelaySystem> system;
    std::vector<double> eps_list;
    std::optional<Rectangle> window;
    GridConfig grid;
    double tol = 1e-10;
    double rank_tol = kDefaultRankTol;
    double margin = 1e-6;
    double delta = 0.05;
    double distance_cap = 1.0;
    std::filesystem::path output_dir = ".";
    std::string format = "csv";

    /// Throws ConfigError: system missing, eps list empty or not strictly
    /// decreasing, eps outside (0, 1], degenerate window, unknown format.
    void validate() const;
};

/// Relative system_file and output.dir paths resolve against base_dir. Every
/// field is checked except that the eps list may still be empty.
RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir = ".");
RunConfig load_run_config(const std::filesystem::path& path);

/// Window centred on the imaginary axis: |Re| <= 10 eps^n (1 + |sup gamma^(n)|)
/// (sup = +inf counts as 10), widened to cover the strong unstable spectrum,
/// clipped to 0.9 of the evaluation guard; |Im| <= omega_bound(sys).
Rectangle default_window(const DelaySystem& sys, Epsilon eps, const ExtendedReal& sup_n);

/// Throws EvaluationRangeError naming the scale when the window leaves the
/// evaluation guard at this eps.
void check_window(const DelaySystem& sys, Epsilon eps, const Rectangle& window);

struct SpectrumRecord {
    double eps = 0.0;
    Rectangle window;
    std::vector<RootResult> roots;
};

SpectrumRecord compute_spectrum(const DelaySystem& sys, Epsilon eps, const Rectangle& window,
                                const RootFinderOptions& opts = {});

/// CSV columns eps, re, im, multiplicity, residual.
void write_spectrum_csv(std::ostream& os, const std::vector<SpectrumRecord>& records);

// ---------------------------------------------------------------------------
// Validation against the asymptotic spectra

struct Assignment {
    Complex lambda;
    std::size_t multiplicity = 1;
    /// 0 for a strong-spectrum match, otherwise the scale k; nullopt when
    /// every distance exceeds the cap.
    std::optional<std::size_t> scale;
    std::size_t nearest_scale = 0;
    Complex rescaled;
    double distance = 0.0;
    std::optional<std::size_t> runner_up;
    double runner_up_distance = 0.0;
};

struct EpsReport {
    double eps = 0.0;
    Rectangle window;
    std::size_t eigenvalue_count = 0;
    std::vector<Assignment> assignments;
    std::map<std::size_t, double> max_distance; ///< per scale, assigned roots only
    std::map<std::size_t, std::size_t> family_size;
    std::vector<Complex> strong_matches;
    double max_abs_re = 0.0;
    std::size_t unassigned = 0;
};

struct ValidationReport {
    std::vector<EpsReport> records;
    /// Per scale: max distance never grows by more than factor 2 from one
    /// eps to the next smaller one.
    std::map<std::size_t, bool> nonincreasing;
    std::vector<std::string> notes;

    [[nodiscard]] std::string to_json() const;
};

struct ValidateOptions {
    GridConfig grid;
    RootFinderOptions roots;
    double rank_tol = kDefaultRankTol;
    double distance_cap = 1.0;
    std::size_t slice_phase_points = 256;
};

/// Reference sets for the assignment step; independent of eps.
class AsymptoticSpectra {
public:
    AsymptoticSpectra(const DelaySystem& sys, const ValidateOptions& opts);

    /// Distance from the rescaled point z to A_k (1 <= k <= n).
    [[nodiscard]] std::optional<double> distance(std::size_t k, Complex z) const;
    /// S0+ together with the strong stable spectrum.
    [[nodiscard]] const std::vector<Complex>& strong_points() const noexcept { return strong_points_; }
    [[nodiscard]] double radius() const noexcept { return radius_; }
    [[nodiscard]] const DegeneracyLadder& ladder() const noexcept { return ladder_; }
    [[nodiscard]] std::size_t sample_count(std::size_t k) const { return samples_.at(k - 1).size(); }

private:
    const DelaySystem* sys_;
    ValidateOptions opts_;
    DegeneracyLadder ladder_;
    std::vector<Complex> strong_points_;
    double radius_ = 0.0;
    /// Per scale, projected samples sorted by imaginary part.
    std::vector<std::vector<Complex>> samples_;
};

EpsReport assign_roots(const AsymptoticSpectra& spectra, Epsilon eps, const SpectrumRecord& spectrum,
                       std::size_t n, double distance_cap);

/// `windows` gives one window per eps (same order as eps_list).
ValidationReport validate_spectrum(const DelaySystem& sys, const std::vector<double>& eps_list,
                                   const std::vector<Rectangle>& windows, const ValidateOptions& opts = {});

// ---------------------------------------------------------------------------
// Drivers: each writes into cfg.output_dir and returns the written paths.

std::vector<std::filesystem::path> run_spectrum(const RunConfig& cfg);
std::vector<std::filesystem::path> run_validate(const RunConfig& cfg);
std::vector<std::filesystem::path> run_manifolds(const RunConfig& cfg);
std::vector<std::filesystem::path> run_classify(const RunConfig& cfg);

/// Windows used by run_spectrum / run_validate: cfg.window, or the default window.
std::vector<Rectangle> resolve_windows(const RunConfig& cfg);

struct ExamplePreset {
    std::string name;
    scalar2::ScalarParams params;
};

/// fig2-stable, fig2-neutral, fig2-unstable, fig3.
const std::vector<ExamplePreset>& example_presets();
/// Throws ConfigError for unknown names.
const ExamplePreset& example_preset(const std::string& name);

/// The scalar example as a DelaySystem with sigma = (1, 1).
DelaySystem scalar_system(const scalar2::ScalarParams& p);

struct ExampleResult {
    std::string name;
    ExtendedReal sup1_closed;
    ExtendedReal sup1_general;
    ExtendedReal sup2_closed;
    ExtendedReal sup2_general;
    double sup_discrepancy = 0.0; ///< max over finite pairs
    double gamma1_discrepancy = 0.0;
    double gamma2_discrepancy = 0.0;
    StabilityVerdict verdict_closed;
    StabilityVerdict verdict_general;
    std::optional<std::pair<scalar2::SingularPhase, scalar2::SingularPhase>> singular;
    std::vector<std::filesystem::path> files;
};

/// Closed-form and general outputs side by side; writes
/// <name>_summary.json, <name>_gamma1.csv and <name>_gamma2.csv.
ExampleResult run_example(const std::string& name, const std::filesystem::path& output_dir,
                          const GridConfig& grid = {});

} // namespace hdde
