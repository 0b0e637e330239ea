#include "hdde/degeneracy.hpp"

#include "hdde/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hdde {

namespace {

double system_scale(const DelaySystem& sys) {
    double s = 0.0;
    for (const auto& a : sys.matrices()) s = std::max(s, norm2(a));
    return s;
}

// Ladder structure only; k_under / nd are filled in by the caller.
std::vector<LadderLevel> descend(const DelaySystem& sys, double rank_tol) {
    const std::size_t n = sys.delay_count();
    const double scale = system_scale(sys);
    std::vector<LadderLevel> levels;

    const KernelBasis top = kernel_vectors(sys.A(n), rank_tol);
    if (top.rank == sys.dim()) return levels;

    {
        LadderLevel lvl;
        lvl.k = n;
        const ComplexMatrix uh = top.U1.adjoint();
        lvl.J = uh * top.V1;
        for (std::size_t j = 0; j < n; ++j) lvl.A_proj.push_back(uh * sys.A(j) * top.V1);
        lvl.dim = sys.dim() - top.rank;
        levels.push_back(std::move(lvl));
    }

    // descend while the order-k projected matrix stays singular
    for (std::size_t k = n - 1; k >= 1; --k) {
        const LadderLevel& prev = levels.back();
        const ComplexMatrix& pivot = prev.A_proj[k];
        const KernelBasis kb = kernel_vectors(pivot, rank_tol, scale);
        if (kb.rank == prev.dim) break;
        LadderLevel lvl;
        lvl.k = k;
        const ComplexMatrix uh = kb.U1.adjoint();
        lvl.J = uh * prev.J * kb.V1;
        for (std::size_t j = 0; j < k; ++j) lvl.A_proj.push_back(uh * prev.A_proj[j] * kb.V1);
        lvl.dim = prev.dim - kb.rank;
        levels.push_back(std::move(lvl));
    }
    return levels;
}

bool same_shape(const std::vector<LadderLevel>& a, const std::vector<LadderLevel>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].k != b[i].k || a[i].dim != b[i].dim) return false;
    return true;
}

} // namespace

const LadderLevel* DegeneracyLadder::level(std::size_t k) const noexcept {
    for (const auto& l : levels)
        if (l.k == k) return &l;
    return nullptr;
}

DegeneracyLadder build_ladder(const DelaySystem& sys, double rank_tol) {
    if (!(rank_tol > 0.0)) throw ConfigError("build_ladder: rank_tol must be positive");
    DegeneracyLadder ladder;
    ladder.levels = descend(sys, rank_tol);
    ladder.an_singular = !ladder.levels.empty();

    if (ladder.an_singular) {
        const std::size_t n = sys.delay_count();
        const std::size_t lowest = ladder.levels.back().k;
        if (lowest <= n - 1 || lowest == 1) ladder.k_under = lowest;
    }

    const auto loose = descend(sys, 10.0 * rank_tol);
    if (!same_shape(ladder.levels, loose)) {
        ladder.rank_unstable = true;
        ladder.warnings.emplace_back("rank decisions change under a 10x looser tolerance; ladder is near a "
                                     "rank threshold");
    }
    if (ladder.heuristic()) {
        ladder.warnings.emplace_back("singular chain stops at level n; truncated spectra from this ladder are "
                                     "heuristic");
    }
    ladder.nd_satisfied = check_nd(ladder, sys, rank_tol);
    return ladder;
}

bool check_nd(const DegeneracyLadder& ladder, const DelaySystem& sys, double rank_tol) {
    if (!ladder.an_singular || ladder.k_under != std::size_t{1}) return true;
    const LadderLevel* bottom = ladder.level(1);
    if (bottom == nullptr) return true;
    const KernelBasis jk = kernel_vectors(bottom->J, rank_tol, 1.0);
    if (jk.rank == bottom->dim) return true;
    const ComplexMatrix reduced = jk.U1.adjoint() * bottom->A_proj[0] * jk.V1;
    return numerical_rank(reduced, rank_tol, system_scale(sys)) == reduced.rows();
}

Complex truncated_char(const DegeneracyLadder& ladder, const DelaySystem& sys, std::size_t k, Epsilon eps,
                       Complex lambda) {
    const std::size_t n = sys.delay_count();
    if (k >= n) throw ConfigError("truncated_char: k must be below n");
    const LadderLevel* lvl = ladder.level(k + 1);
    if (lvl == nullptr) throw ConfigError("truncated_char: ladder has no level " + std::to_string(k + 1));

    ComplexMatrix m = lvl->A_proj[0];
    m -= lambda * lvl->J;
    if (k >= 1) {
        const auto taus = delays(sys, eps);
        for (std::size_t j = 1; j <= k; ++j) {
            const double tau = taus[j - 1];
            if (std::abs(lambda.real()) * tau > kExponentGuard) {
                throw EvaluationRangeError(j, "truncated characteristic function: |Re(lambda)| * tau_" +
                                                  std::to_string(j) + " exceeds the guard");
            }
            m += std::exp(-lambda * tau) * lvl->A_proj[j];
        }
    }
    return det(m);
}

std::vector<Complex> pencil_eigenvalues(const ComplexMatrix& J, const ComplexMatrix& A) {
    if (!J.square() || !A.square() || J.rows() != A.rows())
        throw DimensionError("pencil_eigenvalues: J and A must be square of equal size");
    const std::size_t m = A.rows();
    const double nj = norm2(J);
    const double na = norm2(A);
    const double radius = nj > 0.0 ? 1.0 + na / nj : 1.0 + na;
    auto f = [&](Complex z) {
        ComplexMatrix t = A;
        t -= z * J;
        return det(t);
    };
    const auto coeffs = interpolate_on_circle(f, m, radius);
    const double abs_tol = 1e-13 * std::pow(radius * nj + na, static_cast<double>(m));
    const auto trimmed = trim_polynomial(coeffs, radius, 1e-10, abs_tol);
    if (trimmed.empty()) throw DegeneracyError("det(-lambda J + A) vanishes identically");
    return poly_roots(trimmed);
}

std::vector<Complex> strong_stable_spectrum(const DegeneracyLadder& ladder, double /*rank_tol*/) {
    if (ladder.k_under != std::size_t{1}) return {};
    const LadderLevel* bottom = ladder.level(1);
    if (bottom == nullptr) return {};
    auto roots = pencil_eigenvalues(bottom->J, bottom->A_proj[0]);
    std::erase_if(roots, [](const Complex& z) { return !(z.real() < 0.0); });
    std::sort(roots.begin(), roots.end(), [](const Complex& a, const Complex& b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return roots;
}

std::string describe_ladder(const DegeneracyLadder& ladder) {
    std::ostringstream os;
    os.precision(17);
    auto put = [&os](const ComplexMatrix& m) {
        for (std::size_t i = 0; i < m.rows(); ++i) {
            os << "    [";
            for (std::size_t j = 0; j < m.cols(); ++j) {
                os << (j ? ", " : "") << "(" << m(i, j).real() << ", " << m(i, j).imag() << ")";
            }
            os << "]\n";
        }
    };
    os << "an_singular: " << (ladder.an_singular ? "true" : "false") << '\n';
    os << "k_under: " << (ladder.k_under ? std::to_string(*ladder.k_under) : std::string("none")) << '\n';
    os << "nd_satisfied: " << (ladder.nd_satisfied ? "true" : "false") << '\n';
    os << "rank_unstable: " << (ladder.rank_unstable ? "true" : "false") << '\n';
    for (const auto& lvl : ladder.levels) {
        os << "level " << lvl.k << " dim " << lvl.dim << '\n';
        os << "  J:\n";
        put(lvl.J);
        for (std::size_t j = 0; j < lvl.A_proj.size(); ++j) {
            os << "  A_" << j << ":\n";
            put(lvl.A_proj[j]);
        }
    }
    for (const auto& w : ladder.warnings) os << "warning: " << w << '\n';
    return os.str();
}

} // namespace hdde
