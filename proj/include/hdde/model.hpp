#pragma once

#include "hdde/linalg.hpp"

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace hdde {

/// x'(t) = A0 x(t) + sum_k A_k x(t - sigma_k eps^-k), k = 1..n.
///
/// Immutable after construction. Every A_k is d x d, A_1..A_n are nonzero, every
/// sigma_k is positive, and n >= 1.
class DelaySystem {
public:
    /// `matrices` holds A0..An, so n = matrices.size() - 1 = sigma.size().
    DelaySystem(std::vector<ComplexMatrix> matrices, std::vector<double> sigma);

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] std::size_t delay_count() const noexcept { return sigma_.size(); }
    [[nodiscard]] const ComplexMatrix& A(std::size_t k) const { return matrices_.at(k); }
    [[nodiscard]] const std::vector<ComplexMatrix>& matrices() const noexcept { return matrices_; }
    [[nodiscard]] double sigma(std::size_t k) const { return sigma_.at(k - 1); }
    [[nodiscard]] const std::vector<double>& sigmas() const noexcept { return sigma_; }

    /// Scalar system -lambda + a0 + sum a_k exp(-lambda tau_k).
    static DelaySystem scalar(std::vector<Complex> coefficients, std::vector<double> sigma);

    friend bool operator==(const DelaySystem&, const DelaySystem&) = default;

private:
    std::size_t dim_ = 0;
    std::vector<ComplexMatrix> matrices_;
    std::vector<double> sigma_;
};

/// Small parameter of the delay hierarchy, 0 < value <= 1.
class Epsilon {
public:
    explicit Epsilon(double value);
    [[nodiscard]] double value() const noexcept { return value_; }
    friend bool operator==(const Epsilon&, const Epsilon&) = default;

private:
    double value_;
};

/// Largest admissible |Re(lambda)| * tau_k; beyond it exp(-lambda tau_k)
/// leaves double range.
inline constexpr double kExponentGuard = 700.0;

/// tau_k = sigma_k * eps^-k for k = 1..n.
std::vector<double> delays(const DelaySystem& sys, Epsilon eps);

/// Throws EvaluationRangeError if |Re(lambda)| tau_k exceeds the guard for some k.
void check_evaluation_domain(const DelaySystem& sys, Epsilon eps, Complex lambda);

/// Delta(lambda) = -lambda I + A0 + sum_k A_k exp(-lambda tau_k).
ComplexMatrix char_matrix(const DelaySystem& sys, Epsilon eps, Complex lambda);

/// chi(lambda) = det Delta(lambda).
Complex char_value(const DelaySystem& sys, Epsilon eps, Complex lambda);

/// chi'(lambda) via the adjugate form of Jacobi's formula, tr(adj(Delta) Delta').
Complex char_derivative(const DelaySystem& sys, Epsilon eps, Complex lambda);

/// Precomputed evaluator of chi and chi' for a fixed (system, eps). Cheaper
/// than the free functions when called millions of times.
class CharacteristicFunction {
public:
    CharacteristicFunction(const DelaySystem& sys, Epsilon eps);

    [[nodiscard]] Complex value(Complex lambda) const;
    [[nodiscard]] Complex derivative(Complex lambda) const;
    [[nodiscard]] const std::vector<double>& taus() const noexcept { return taus_; }
    /// Upper bound for |d arg chi / ds| away from zeros: the fastest exponential rate.
    [[nodiscard]] double oscillation_rate() const noexcept;

private:
    void guard(Complex lambda) const;

    const DelaySystem* sys_;
    std::vector<double> taus_;
};

// ---------------------------------------------------------------------------
// System definition files (JSON)
//
//   {
//     "d": 2, "n": 1, "sigma": [1.0],
//     "A0": [[[re, im], [re, im]], [[re, im], [re, im]]],
//     "A1": ...
//   }

DelaySystem parse_system(const std::string& text);
std::string serialize_system(const DelaySystem& sys);
DelaySystem load_system(const std::filesystem::path& path);
void save_system(const DelaySystem& sys, const std::filesystem::path& path);

} // namespace hdde
