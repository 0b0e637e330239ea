#include "hdde/model.hpp"

#include "hdde/errors.hpp"

#include "json.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace hdde {

namespace {

using nlohmann::json;

ComplexMatrix derivative_matrix(const DelaySystem& sys, const std::vector<double>& taus,
                                const std::vector<Complex>& exps) {
    const std::size_t d = sys.dim();
    ComplexMatrix dm = -1.0 * ComplexMatrix::identity(d);
    for (std::size_t k = 1; k <= sys.delay_count(); ++k) {
        const Complex w = -taus[k - 1] * exps[k - 1];
        const auto& a = sys.A(k);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) dm(i, j) += w * a(i, j);
    }
    return dm;
}

ComplexMatrix assemble(const DelaySystem& sys, Complex lambda, const std::vector<Complex>& exps) {
    const std::size_t d = sys.dim();
    ComplexMatrix m = sys.A(0);
    for (std::size_t i = 0; i < d; ++i) m(i, i) -= lambda;
    for (std::size_t k = 1; k <= sys.delay_count(); ++k) {
        const Complex e = exps[k - 1];
        const auto& a = sys.A(k);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) m(i, j) += e * a(i, j);
    }
    return m;
}

// d/dlambda det(M) = sum_i det(M with row i replaced by row i of M').
Complex det_derivative(const ComplexMatrix& m, const ComplexMatrix& dm) {
    const std::size_t d = m.rows();
    Complex total{};
    for (std::size_t i = 0; i < d; ++i) {
        ComplexMatrix r = m;
        for (std::size_t j = 0; j < d; ++j) r(i, j) = dm(i, j);
        total += det(r);
    }
    return total;
}

std::vector<Complex> exponentials(const std::vector<double>& taus, Complex lambda) {
    std::vector<Complex> e(taus.size());
    for (std::size_t k = 0; k < taus.size(); ++k) e[k] = std::exp(-lambda * taus[k]);
    return e;
}

json matrix_to_json(const ComplexMatrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
        rows.push_back(std::move(row));
    }
    return rows;
}

ComplexMatrix matrix_from_json(const json& j, std::size_t d, const std::string& name) {
    if (!j.is_array() || j.size() != d) throw ConfigError(name + ": expected " + std::to_string(d) + " rows");
    std::vector<Complex> entries;
    entries.reserve(d * d);
    for (const auto& row : j) {
        if (!row.is_array() || row.size() != d)
            throw ConfigError(name + ": expected " + std::to_string(d) + " columns per row");
        for (const auto& z : row) {
            if (z.is_number()) {
                entries.emplace_back(z.get<double>(), 0.0);
            } else if (z.is_array() && z.size() == 2 && z[0].is_number() && z[1].is_number()) {
                entries.emplace_back(z[0].get<double>(), z[1].get<double>());
            } else {
                throw ConfigError(name + ": entries must be [re, im] pairs");
            }
        }
    }
    return ComplexMatrix(d, d, std::move(entries));
}

} // namespace

// ---------------------------------------------------------------------------

DelaySystem::DelaySystem(std::vector<ComplexMatrix> matrices, std::vector<double> sigma)
    : matrices_(std::move(matrices)), sigma_(std::move(sigma)) {
    if (sigma_.empty()) throw ConfigError("DelaySystem: at least one delay is required");
    if (matrices_.size() != sigma_.size() + 1)
        throw ConfigError("DelaySystem: need n+1 = " + std::to_string(sigma_.size() + 1) + " matrices, got " +
                          std::to_string(matrices_.size()));
    dim_ = matrices_.front().rows();
    if (dim_ == 0) throw ConfigError("DelaySystem: dimension must be positive");
    for (std::size_t k = 0; k < matrices_.size(); ++k) {
        const auto& a = matrices_[k];
        if (a.rows() != dim_ || a.cols() != dim_)
            throw ConfigError("DelaySystem: A" + std::to_string(k) + " is not " + std::to_string(dim_) + "x" +
                              std::to_string(dim_));
        if (k > 0 && a.is_zero()) throw ConfigError("DelaySystem: A" + std::to_string(k) + " must be nonzero");
    }
    for (std::size_t k = 0; k < sigma_.size(); ++k) {
        if (!(sigma_[k] > 0.0) || !std::isfinite(sigma_[k]))
            throw ConfigError("DelaySystem: sigma_" + std::to_string(k + 1) + " must be positive and finite");
    }
}

DelaySystem DelaySystem::scalar(std::vector<Complex> coefficients, std::vector<double> sigma) {
    std::vector<ComplexMatrix> m;
    m.reserve(coefficients.size());
    for (const auto& c : coefficients) m.emplace_back(1, 1, std::vector<Complex>{c});
    return DelaySystem(std::move(m), std::move(sigma));
}

Epsilon::Epsilon(double value) : value_(value) {
    if (!(value > 0.0 && value <= 1.0)) throw ConfigError("Epsilon: value must lie in (0, 1]");
}

std::vector<double> delays(const DelaySystem& sys, Epsilon eps) {
    std::vector<double> taus(sys.delay_count());
    for (std::size_t k = 1; k <= sys.delay_count(); ++k) {
        const double tau = sys.sigma(k) * std::pow(eps.value(), -static_cast<double>(k));
        if (!std::isfinite(tau)) throw RangeError("delays: tau_" + std::to_string(k) + " overflows");
        taus[k - 1] = tau;
    }
    return taus;
}

void check_evaluation_domain(const DelaySystem& sys, Epsilon eps, Complex lambda) {
    const auto taus = delays(sys, eps);
    for (std::size_t k = 0; k < taus.size(); ++k) {
        if (std::abs(lambda.real()) * taus[k] > kExponentGuard) {
            throw EvaluationRangeError(k + 1, "characteristic matrix: |Re(lambda)| * tau_" + std::to_string(k + 1) +
                                                  " exceeds " + std::to_string(kExponentGuard) + " at Re(lambda) = " +
                                                  std::to_string(lambda.real()));
        }
    }
}

ComplexMatrix char_matrix(const DelaySystem& sys, Epsilon eps, Complex lambda) {
    check_evaluation_domain(sys, eps, lambda);
    return assemble(sys, lambda, exponentials(delays(sys, eps), lambda));
}

Complex char_value(const DelaySystem& sys, Epsilon eps, Complex lambda) {
    return det(char_matrix(sys, eps, lambda));
}

Complex char_derivative(const DelaySystem& sys, Epsilon eps, Complex lambda) {
    return CharacteristicFunction(sys, eps).derivative(lambda);
}

CharacteristicFunction::CharacteristicFunction(const DelaySystem& sys, Epsilon eps)
    : sys_(&sys), taus_(delays(sys, eps)) {}

void CharacteristicFunction::guard(Complex lambda) const {
    for (std::size_t k = 0; k < taus_.size(); ++k) {
        if (std::abs(lambda.real()) * taus_[k] > kExponentGuard) {
            throw EvaluationRangeError(k + 1, "characteristic matrix: |Re(lambda)| * tau_" + std::to_string(k + 1) +
                                                  " exceeds " + std::to_string(kExponentGuard) + " at Re(lambda) = " +
                                                  std::to_string(lambda.real()));
        }
    }
}

Complex CharacteristicFunction::value(Complex lambda) const {
    guard(lambda);
    if (sys_->dim() == 1) {
        Complex v = sys_->A(0)(0, 0) - lambda;
        for (std::size_t k = 0; k < taus_.size(); ++k) v += sys_->A(k + 1)(0, 0) * std::exp(-lambda * taus_[k]);
        return v;
    }
    return det(assemble(*sys_, lambda, exponentials(taus_, lambda)));
}

Complex CharacteristicFunction::derivative(Complex lambda) const {
    guard(lambda);
    if (sys_->dim() == 1) {
        Complex v = -1.0;
        for (std::size_t k = 0; k < taus_.size(); ++k)
            v -= taus_[k] * sys_->A(k + 1)(0, 0) * std::exp(-lambda * taus_[k]);
        return v;
    }
    const auto e = exponentials(taus_, lambda);
    return det_derivative(assemble(*sys_, lambda, e), derivative_matrix(*sys_, taus_, e));
}

double CharacteristicFunction::oscillation_rate() const noexcept {
    double r = 1.0;
    for (double t : taus_) r = std::max(r, t);
    return r;
}

// ---------------------------------------------------------------------------

DelaySystem parse_system(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("system file: ") + e.what());
    }
    try {
        const auto d = j.at("d").get<std::size_t>();
        const auto n = j.at("n").get<std::size_t>();
        auto sigma = j.at("sigma").get<std::vector<double>>();
        if (sigma.size() != n) throw ConfigError("system file: sigma must have n entries");
        std::vector<ComplexMatrix> mats;
        for (std::size_t k = 0; k <= n; ++k) {
            const std::string key = "A" + std::to_string(k);
            if (!j.contains(key)) throw ConfigError("system file: missing " + key);
            mats.push_back(matrix_from_json(j.at(key), d, key));
        }
        return DelaySystem(std::move(mats), std::move(sigma));
    } catch (const json::exception& e) {
        throw ConfigError(std::string("system file: ") + e.what());
    }
}

std::string serialize_system(const DelaySystem& sys) {
    json j;
    j["d"] = sys.dim();
    j["n"] = sys.delay_count();
    j["sigma"] = sys.sigmas();
    for (std::size_t k = 0; k <= sys.delay_count(); ++k) j["A" + std::to_string(k)] = matrix_to_json(sys.A(k));
    return j.dump(2);
}

DelaySystem load_system(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open system file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_system(ss.str());
}

void save_system(const DelaySystem& sys, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write system file " + path.string());
    out << serialize_system(sys) << '\n';
}

} // namespace hdde
