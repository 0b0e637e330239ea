#include "hdde/linalg.hpp"

#include "hdde/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <numbers>
#include <string>

namespace hdde {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void require_square(const ComplexMatrix& m, const char* op) {
    if (!m.square()) {
        throw DimensionError(std::string(op) + ": matrix is " + std::to_string(m.rows()) + "x" +
                             std::to_string(m.cols()) + ", expected square");
    }
}

double column_norm2(const ComplexMatrix& w, std::size_t j) {
    double s = 0.0;
    for (std::size_t i = 0; i < w.rows(); ++i) s += std::norm(w(i, j));
    return s;
}

// Reduce to upper Hessenberg form by Householder reflections (similarity).
void to_hessenberg(ComplexMatrix& h) {
    const std::size_t n = h.rows();
    if (n < 3) return;
    std::vector<Complex> v(n);
    for (std::size_t k = 0; k + 2 < n; ++k) {
        double xnorm = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) xnorm += std::norm(h(i, k));
        xnorm = std::sqrt(xnorm);
        if (xnorm == 0.0) continue;
        const Complex x0 = h(k + 1, k);
        const Complex phase = std::abs(x0) > 0.0 ? x0 / std::abs(x0) : Complex(1.0, 0.0);
        const Complex alpha = -phase * xnorm;
        std::fill(v.begin(), v.end(), Complex{});
        for (std::size_t i = k + 1; i < n; ++i) v[i] = h(i, k);
        v[k + 1] -= alpha;
        double vnorm = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) vnorm += std::norm(v[i]);
        if (vnorm == 0.0) continue;
        // H <- (I - 2 v v^*/|v|^2) H
        for (std::size_t j = 0; j < n; ++j) {
            Complex s{};
            for (std::size_t i = k + 1; i < n; ++i) s += std::conj(v[i]) * h(i, j);
            s *= 2.0 / vnorm;
            for (std::size_t i = k + 1; i < n; ++i) h(i, j) -= v[i] * s;
        }
        // H <- H (I - 2 v v^*/|v|^2)
        for (std::size_t i = 0; i < n; ++i) {
            Complex s{};
            for (std::size_t j = k + 1; j < n; ++j) s += h(i, j) * v[j];
            s *= 2.0 / vnorm;
            for (std::size_t j = k + 1; j < n; ++j) h(i, j) -= s * std::conj(v[j]);
        }
        for (std::size_t i = k + 2; i < n; ++i) h(i, k) = Complex{};
    }
}

struct Givens {
    double c = 1.0;
    Complex s{};
};

// G = [[c, s], [-conj(s), c]] with G [x; y] = [r; 0].
Givens make_givens(Complex x, Complex y) {
    const double ax = std::abs(x);
    const double ay = std::abs(y);
    if (ay == 0.0) return {1.0, Complex{}};
    if (ax == 0.0) return {0.0, std::conj(y) / ay};
    const double r = std::hypot(ax, ay);
    return {ax / r, (x / ax) * std::conj(y) / r};
}

std::vector<Complex> hessenberg_qr_eigenvalues(ComplexMatrix h) {
    const std::size_t n = h.rows();
    std::vector<Complex> eig(n);
    if (n == 0) return eig;
    to_hessenberg(h);

    std::vector<Givens> rot(n);
    std::ptrdiff_t hi = static_cast<std::ptrdiff_t>(n) - 1;
    int iter = 0;
    int total_iter = 0;
    while (hi >= 0) {
        if (hi == 0) {
            eig[0] = h(0, 0);
            break;
        }
        std::ptrdiff_t l = hi;
        while (l > 0) {
            const double sub = std::abs(h(l, l - 1));
            const double diag = std::abs(h(l - 1, l - 1)) + std::abs(h(l, l));
            if (sub <= kEps * diag || sub < std::numeric_limits<double>::min()) {
                h(l, l - 1) = Complex{};
                break;
            }
            --l;
        }
        if (l == hi) {
            eig[hi] = h(hi, hi);
            --hi;
            iter = 0;
            continue;
        }
        ++iter;
        if (++total_iter > 100 * static_cast<int>(n) + 100) {
            throw ResolutionError("eigenvalues: QR iteration did not converge");
        }

        Complex mu;
        if (iter % 11 == 10) {
            // exceptional shift
            mu = h(hi, hi) + Complex(std::abs(h(hi, hi - 1)) * 0.75, std::abs(h(hi, hi - 1)) * 0.4375);
        } else {
            const Complex a = h(hi - 1, hi - 1);
            const Complex b = h(hi - 1, hi);
            const Complex c = h(hi, hi - 1);
            const Complex d = h(hi, hi);
            const Complex half = 0.5 * (a - d);
            const Complex disc = std::sqrt(half * half + b * c);
            const Complex m1 = 0.5 * (a + d) + disc;
            const Complex m2 = 0.5 * (a + d) - disc;
            mu = std::abs(m1 - d) < std::abs(m2 - d) ? m1 : m2;
        }

        for (std::ptrdiff_t k = l; k <= hi; ++k) h(k, k) -= mu;
        for (std::ptrdiff_t k = l; k < hi; ++k) {
            const Givens g = make_givens(h(k, k), h(k + 1, k));
            rot[k] = g;
            for (std::ptrdiff_t j = k; j <= hi; ++j) {
                const Complex t1 = h(k, j);
                const Complex t2 = h(k + 1, j);
                h(k, j) = g.c * t1 + g.s * t2;
                h(k + 1, j) = -std::conj(g.s) * t1 + g.c * t2;
            }
        }
        for (std::ptrdiff_t k = l; k < hi; ++k) {
            const Givens& g = rot[k];
            for (std::ptrdiff_t i = l; i <= std::min(k + 1, hi); ++i) {
                const Complex t1 = h(i, k);
                const Complex t2 = h(i, k + 1);
                h(i, k) = g.c * t1 + std::conj(g.s) * t2;
                h(i, k + 1) = -g.s * t1 + g.c * t2;
            }
        }
        for (std::ptrdiff_t k = l; k <= hi; ++k) h(k, k) += mu;
    }
    return eig;
}

// Orthonormal completion of columns [first, n) given orthonormal columns [0, first).
void complete_basis(ComplexMatrix& u, std::size_t first) {
    const std::size_t n = u.rows();
    std::size_t filled = first;
    for (std::size_t e = 0; e < n && filled < u.cols(); ++e) {
        std::vector<Complex> v(n, Complex{});
        v[e] = 1.0;
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t j = 0; j < filled; ++j) {
                Complex dot{};
                for (std::size_t i = 0; i < n; ++i) dot += std::conj(u(i, j)) * v[i];
                for (std::size_t i = 0; i < n; ++i) v[i] -= dot * u(i, j);
            }
        }
        double nv = 0.0;
        for (const auto& x : v) nv += std::norm(x);
        nv = std::sqrt(nv);
        if (nv < 1e-8) continue;
        for (std::size_t i = 0; i < n; ++i) u(i, filled) = v[i] / nv;
        ++filled;
    }
}

} // namespace

// ---------------------------------------------------------------------------
// ComplexMatrix

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, Complex{}) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (rows_ * cols_ != data_.size()) {
        throw DimensionError("ComplexMatrix: " + std::to_string(rows_) + "x" + std::to_string(cols_) +
                             " needs " + std::to_string(rows_ * cols_) + " entries, got " +
                             std::to_string(data_.size()));
    }
    for (const auto& z : data_) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
            throw ConfigError("ComplexMatrix: non-finite entry");
        }
    }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const Complex> values) {
    ComplexMatrix m(values.size(), values.size());
    for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
    return m;
}

ComplexMatrix ComplexMatrix::from_rows(std::initializer_list<std::initializer_list<Complex>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    std::vector<Complex> entries;
    entries.reserve(r * c);
    for (const auto& row : rows) {
        if (row.size() != c) throw DimensionError("ComplexMatrix::from_rows: ragged rows");
        entries.insert(entries.end(), row.begin(), row.end());
    }
    return ComplexMatrix(r, c, std::move(entries));
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
    return out;
}

ComplexMatrix ComplexMatrix::columns(std::size_t first, std::size_t count) const {
    if (first + count > cols_) throw DimensionError("ComplexMatrix::columns: range out of bounds");
    ComplexMatrix out(rows_, count);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < count; ++j) out(i, j) = (*this)(i, first + j);
    return out;
}

double ComplexMatrix::frobenius_norm() const noexcept {
    double s = 0.0;
    for (const auto& z : data_) s += std::norm(z);
    return std::sqrt(s);
}

bool ComplexMatrix::is_zero() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](const Complex& z) { return z == Complex{}; });
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_) throw DimensionError("ComplexMatrix: shape mismatch in +");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_) throw DimensionError("ComplexMatrix: shape mismatch in -");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex s) noexcept {
    for (auto& z : data_) z *= s;
    return *this;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows()) {
        throw DimensionError("ComplexMatrix: cannot multiply " + std::to_string(a.rows()) + "x" +
                             std::to_string(a.cols()) + " by " + std::to_string(b.rows()) + "x" +
                             std::to_string(b.cols()));
    }
    ComplexMatrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const Complex aik = a(i, k);
            if (aik == Complex{}) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
        }
    return out;
}

// ---------------------------------------------------------------------------
// Decompositions

Complex det(const ComplexMatrix& m) {
    require_square(m, "det");
    const std::size_t n = m.rows();
    if (n == 0) return 1.0;
    if (n == 1) return m(0, 0);
    if (n == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    ComplexMatrix lu = m;
    Complex result = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = std::abs(lu(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            const double a = std::abs(lu(i, k));
            if (a > best) {
                best = a;
                piv = i;
            }
        }
        if (best == 0.0) return Complex{};
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(piv, j));
            result = -result;
        }
        const Complex pivot = lu(k, k);
        result *= pivot;
        for (std::size_t i = k + 1; i < n; ++i) {
            const Complex f = lu(i, k) / pivot;
            if (f == Complex{}) continue;
            for (std::size_t j = k + 1; j < n; ++j) lu(i, j) -= f * lu(k, j);
        }
    }
    return result;
}

std::vector<Eigenvalue> eigenvalues(const ComplexMatrix& m) {
    require_square(m, "eigenvalues");
    const auto vals = hessenberg_qr_eigenvalues(m);
    std::vector<Eigenvalue> out;
    out.reserve(vals.size());
    for (const auto& v : vals) {
        ComplexMatrix shifted = m;
        for (std::size_t i = 0; i < m.rows(); ++i) shifted(i, i) -= v;
        out.push_back({v, std::abs(det(shifted))});
    }
    return out;
}

std::vector<Complex> eigenvalue_values(const ComplexMatrix& m) {
    require_square(m, "eigenvalues");
    return hessenberg_qr_eigenvalues(m);
}

SvdResult svd(const ComplexMatrix& m) {
    require_square(m, "svd");
    const std::size_t n = m.rows();
    ComplexMatrix w = m;
    ComplexMatrix v = ComplexMatrix::identity(n);
    const double tol = static_cast<double>(std::max<std::size_t>(n, 1)) * kEps;

    for (int sweep = 0; sweep < 80; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double alpha = column_norm2(w, p);
                const double beta = column_norm2(w, q);
                Complex gamma{};
                for (std::size_t i = 0; i < n; ++i) gamma += std::conj(w(i, p)) * w(i, q);
                const double g = std::abs(gamma);
                if (g == 0.0 || g <= tol * std::sqrt(alpha * beta)) continue;
                rotated = true;
                // rotate the phase out of column q, then a real Jacobi rotation
                const Complex ph = std::conj(gamma / g);
                const double zeta = (beta - alpha) / (2.0 * g);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t i = 0; i < n; ++i) {
                    const Complex wp = w(i, p);
                    const Complex wq = w(i, q) * ph;
                    w(i, p) = c * wp - s * wq;
                    w(i, q) = s * wp + c * wq;
                    const Complex vp = v(i, p);
                    const Complex vq = v(i, q) * ph;
                    v(i, p) = c * vp - s * vq;
                    v(i, q) = s * vp + c * vq;
                }
            }
        }
        if (!rotated) break;
    }

    std::vector<double> sigma(n);
    for (std::size_t j = 0; j < n; ++j) sigma[j] = std::sqrt(column_norm2(w, j));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sigma[a] > sigma[b]; });

    SvdResult out{ComplexMatrix(n, n), std::vector<double>(n), ComplexMatrix(n, n)};
    std::size_t nonzero = 0;
    for (std::size_t jj = 0; jj < n; ++jj) {
        const std::size_t j = order[jj];
        out.singular_values[jj] = sigma[j];
        for (std::size_t i = 0; i < n; ++i) out.V(i, jj) = v(i, j);
        if (sigma[j] > 0.0) {
            for (std::size_t i = 0; i < n; ++i) out.U(i, jj) = w(i, j) / sigma[j];
            nonzero = jj + 1;
        }
    }
    // re-orthogonalize the columns of U (matters only for tiny singular values)
    for (std::size_t j = 0; j < nonzero; ++j) {
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t k = 0; k < j; ++k) {
                Complex dot{};
                for (std::size_t i = 0; i < n; ++i) dot += std::conj(out.U(i, k)) * out.U(i, j);
                for (std::size_t i = 0; i < n; ++i) out.U(i, j) -= dot * out.U(i, k);
            }
        }
        const double nj = std::sqrt(column_norm2(out.U, j));
        if (nj < 0.5) {
            // lost to cancellation; rebuild from the remaining basis
            nonzero = j;
            break;
        }
        for (std::size_t i = 0; i < n; ++i) out.U(i, j) /= nj;
    }
    complete_basis(out.U, nonzero);
    return out;
}

double norm2(const ComplexMatrix& m) {
    if (m.empty()) return 0.0;
    if (!m.square()) {
        // pad to square; only used for small projected blocks
        const std::size_t n = std::max(m.rows(), m.cols());
        ComplexMatrix sq(n, n);
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (std::size_t j = 0; j < m.cols(); ++j) sq(i, j) = m(i, j);
        return svd(sq).singular_values.front();
    }
    return svd(m).singular_values.front();
}

KernelBasis kernel_vectors(const ComplexMatrix& m, double rank_tol, double scale) {
    if (!(rank_tol > 0.0)) throw ConfigError("kernel_vectors: rank_tol must be positive");
    const SvdResult f = svd(m);
    const std::size_t n = m.rows();
    const double smax = n == 0 ? 0.0 : f.singular_values.front();
    const double threshold = rank_tol * std::max(smax, scale);
    std::size_t rank = 0;
    for (double s : f.singular_values)
        if (s > threshold) ++rank;
    return {f.U.columns(rank, n - rank), f.V.columns(rank, n - rank), rank};
}

std::size_t numerical_rank(const ComplexMatrix& m, double rank_tol, double scale) {
    if (m.empty()) return 0;
    const SvdResult f = svd(m);
    const double threshold = rank_tol * std::max(f.singular_values.front(), scale);
    return static_cast<std::size_t>(std::count_if(f.singular_values.begin(), f.singular_values.end(),
                                                  [&](double s) { return s > threshold; }));
}

std::vector<std::pair<Complex, std::size_t>> cluster_values(std::span<const Complex> values, double radius) {
    std::vector<std::pair<Complex, std::size_t>> clusters;
    for (const auto& v : values) {
        auto it = std::find_if(clusters.begin(), clusters.end(),
                               [&](const auto& c) { return std::abs(c.first - v) <= radius; });
        if (it == clusters.end()) {
            clusters.emplace_back(v, 1);
        } else {
            // running mean keeps the representative centred
            it->first += (v - it->first) / static_cast<double>(it->second + 1);
            ++it->second;
        }
    }
    return clusters;
}

// ---------------------------------------------------------------------------
// Polynomials

Complex poly_eval(std::span<const Complex> coeffs, Complex z) noexcept {
    Complex acc{};
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * z + *it;
    return acc;
}

std::vector<Complex> poly_roots(std::span<const Complex> coeffs) {
    if (coeffs.empty()) throw DimensionError("poly_roots: empty coefficient list");
    const std::size_t m = coeffs.size() - 1;
    const Complex lead = coeffs.back();
    if (lead == Complex{}) throw DimensionError("poly_roots: zero leading coefficient");
    if (m == 0) return {};
    if (m == 1) return {-coeffs[0] / coeffs[1]};

    ComplexMatrix companion(m, m);
    for (std::size_t i = 1; i < m; ++i) companion(i, i - 1) = 1.0;
    for (std::size_t i = 0; i < m; ++i) companion(i, m - 1) = -coeffs[i] / lead;
    std::vector<Complex> roots = eigenvalue_values(companion);

    std::vector<Complex> deriv(m);
    for (std::size_t j = 1; j <= m; ++j) deriv[j - 1] = coeffs[j] * static_cast<double>(j);
    for (auto& r : roots) {
        for (int it = 0; it < 3; ++it) {
            const Complex p = poly_eval(coeffs, r);
            const Complex dp = poly_eval(deriv, r);
            if (dp == Complex{}) break;
            const Complex step = p / dp;
            // stop when the step no longer reduces |p| (multiple roots)
            const Complex cand = r - step;
            if (std::abs(poly_eval(coeffs, cand)) >= std::abs(p)) break;
            r = cand;
        }
    }
    return roots;
}

std::vector<Complex> interpolate_on_circle(const std::function<Complex(Complex)>& f, std::size_t degree,
                                           double radius) {
    const std::size_t nodes = degree + 1;
    std::vector<Complex> values(nodes);
    for (std::size_t k = 0; k < nodes; ++k) {
        const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(nodes);
        values[k] = f(std::polar(radius, theta));
    }
    std::vector<Complex> coeffs(nodes);
    for (std::size_t j = 0; j < nodes; ++j) {
        Complex acc{};
        for (std::size_t k = 0; k < nodes; ++k) {
            const double theta =
                -2.0 * std::numbers::pi * static_cast<double>((j * k) % nodes) / static_cast<double>(nodes);
            acc += values[k] * std::polar(1.0, theta);
        }
        coeffs[j] = acc / (static_cast<double>(nodes) * std::pow(radius, static_cast<double>(j)));
    }
    return coeffs;
}

std::vector<Complex> trim_polynomial(std::vector<Complex> coeffs, double radius, double rel_tol, double abs_tol) {
    double biggest = 0.0;
    std::vector<double> scaled(coeffs.size());
    for (std::size_t j = 0; j < coeffs.size(); ++j) {
        scaled[j] = std::abs(coeffs[j]) * std::pow(radius, static_cast<double>(j));
        biggest = std::max(biggest, scaled[j]);
    }
    if (biggest <= abs_tol) return {};
    while (!coeffs.empty() && scaled[coeffs.size() - 1] <= rel_tol * biggest) coeffs.pop_back();
    // round-off in the low-order terms must not masquerade as a root at zero
    for (std::size_t j = 0; j < coeffs.size(); ++j)
        if (scaled[j] <= kEps * biggest) coeffs[j] = Complex{};
    return coeffs;
}

} // namespace hdde
