#pragma once

// Linear algebra of Lorentz-Minkowski space L^m with metric
// -dx1^2 + dx2^2 + ... + dxm^2. Coordinate 0 is time.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "spacelike/errors.hpp"

namespace spacelike {

template <typename Scalar>
using LorentzVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Symmetric bilinear form Q(u, v) = u^T Q v in canonical coordinates.
template <typename Scalar>
using SymBilinearForm = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Vec = LorentzVector<double>;
using Mat = Eigen::MatrixXd;

/// Default tolerances for quantities derived by exact arithmetic.
inline constexpr double kUnitTol = 1e-9;
inline constexpr double kCausalTol = 1e-9;
inline constexpr double kSectionTol = 1e-9;

enum class CausalClass { spacelike, timelike, lightlike, zero };

inline const char* to_string(CausalClass c) {
    switch (c) {
        case CausalClass::spacelike: return "spacelike";
        case CausalClass::timelike: return "timelike";
        case CausalClass::lightlike: return "lightlike";
        case CausalClass::zero: return "zero";
    }
    return "?";
}

/// diag(-1, 1, ..., 1) as a vector of signs.
template <typename Scalar = double>
LorentzVector<Scalar> signature(Eigen::Index m) {
    LorentzVector<Scalar> eta = LorentzVector<Scalar>::Ones(m);
    eta(0) = Scalar(-1);
    return eta;
}

template <typename DerivedU, typename DerivedV>
typename DerivedU::Scalar inner(const Eigen::MatrixBase<DerivedU>& u,
                                const Eigen::MatrixBase<DerivedV>& v) {
    if (u.size() != v.size()) {
        throw UsageError("inner: dimension mismatch (" + std::to_string(u.size()) + " vs " +
                         std::to_string(v.size()) + ")");
    }
    const Eigen::Index m = u.size();
    return -u(0) * v(0) + u.tail(m - 1).dot(v.tail(m - 1));
}

/// Lorentzian square <v, v>; not a norm, may be negative.
template <typename Derived>
typename Derived::Scalar squared_norm(const Eigen::MatrixBase<Derived>& v) {
    return inner(v, v);
}

/// Lightlike test is relative to the Euclidean size of v.
template <typename Derived>
CausalClass causal_classify(const Eigen::MatrixBase<Derived>& v, double tol = kCausalTol) {
    const double scale = static_cast<double>(v.squaredNorm());
    if (scale == 0.0) return CausalClass::zero;
    const double q = static_cast<double>(squared_norm(v));
    if (std::abs(q) <= tol * scale) return CausalClass::lightlike;
    return q < 0 ? CausalClass::timelike : CausalClass::spacelike;
}

template <typename Derived>
bool is_causal(const Eigen::MatrixBase<Derived>& v, double tol = kCausalTol) {
    const CausalClass c = causal_classify(v, tol);
    return c == CausalClass::timelike || c == CausalClass::lightlike;
}

template <typename Derived>
void require_unit_timelike(const Eigen::MatrixBase<Derived>& a, double tol = kUnitTol) {
    if (a.size() < 3) throw UsageError("ambient dimension must be at least 3");
    const double q = static_cast<double>(squared_norm(a));
    if (std::abs(q + 1.0) > tol) {
        throw DomainError("vector is not unit timelike: <a,a> = " + std::to_string(q));
    }
}

/// v + <v,a> a, the component of v in the spacelike hyperplane a^perp.
template <typename DerivedV, typename DerivedA>
LorentzVector<typename DerivedV::Scalar> project_onto_orthogonal(
    const Eigen::MatrixBase<DerivedV>& v, const Eigen::MatrixBase<DerivedA>& a) {
    require_unit_timelike(a);
    return v + inner(v, a) * a;
}

/// trace of A_Q where <A_Q u, v> = Q(u, v): tr(eta Q).
template <typename Derived>
typename Derived::Scalar trace_lorentz(const Eigen::MatrixBase<Derived>& Q) {
    using S = typename Derived::Scalar;
    return Q.diagonal().sum() - S(2) * Q(0, 0);
}

template <typename Derived>
typename Derived::Scalar trace_euclid(const Eigen::MatrixBase<Derived>& Q) {
    return Q.trace();
}

/// Volume of the unit round sphere S^k.
inline double sphere_volume(int k) {
    const double h = 0.5 * (k + 1);
    return 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

/// Closed form of the integral of Q(v,v) over the light-cone section relative to a:
/// Vol(S^{m-2})/(m-1) * [m Q(a,a) + tr(eta Q)].
template <typename DerivedQ, typename DerivedA>
double avg_lemma_rhs(const Eigen::MatrixBase<DerivedQ>& Q, const Eigen::MatrixBase<DerivedA>& a) {
    require_unit_timelike(a);
    const auto m = static_cast<int>(a.size());
    const double qaa = a.dot(Q * a);
    return sphere_volume(m - 2) / (m - 1) * (m * qaa + trace_lorentz(Q));
}

/// Euclidean analogue: integral of Q(v,v) over S^{m-1} = Vol(S^{m-1})/m * tr(Q).
template <typename DerivedQ>
double euclid_avg_rhs(const Eigen::MatrixBase<DerivedQ>& Q) {
    const auto m = static_cast<int>(Q.rows());
    return sphere_volume(m - 1) / m * trace_euclid(Q);
}

/// Result of signature Gram-Schmidt: columns of `basis` are mutually orthogonal
/// with <b_j, b_j> = signs(j).
struct PseudoOrthonormalSet {
    Mat basis;
    Vec signs;
};

/// Extends `seed` (columns already pseudo-orthonormal with `seed_signs`) by
/// canonical axes until it spans L^m. Spatial axes are tried before the time
/// axis and each step takes the candidate with the largest |<w,w>|.
inline PseudoOrthonormalSet complete_pseudo_orthonormal(const Mat& seed, const Vec& seed_signs,
                                                        double pivot_tol = 1e-8) {
    const Eigen::Index m = seed.rows();
    PseudoOrthonormalSet out;
    out.basis.resize(m, m);
    out.signs.resize(m);
    Eigen::Index filled = seed.cols();
    out.basis.leftCols(filled) = seed;
    out.signs.head(filled) = seed_signs;

    std::vector<bool> used(static_cast<std::size_t>(m), false);
    while (filled < m) {
        Eigen::Index best = -1;
        double best_q = 0.0;
        Vec best_w;
        // index order 1..m-1 then 0 keeps the time axis last on ties
        for (Eigen::Index step = 0; step < m; ++step) {
            const Eigen::Index k = (step + 1) % m;
            if (used[static_cast<std::size_t>(k)]) continue;
            Vec w = Vec::Unit(m, k);
            for (Eigen::Index j = 0; j < filled; ++j) {
                w -= out.signs(j) * inner(w, out.basis.col(j)) * out.basis.col(j);
            }
            const double q = squared_norm(w);
            if (std::abs(q) > std::abs(best_q) + 1e-14) {
                best = k;
                best_q = q;
                best_w = w;
            }
        }
        if (best < 0 || std::abs(best_q) < pivot_tol) {
            throw NumericalError("degenerate frame: pivot below tolerance");
        }
        used[static_cast<std::size_t>(best)] = true;
        out.basis.col(filled) = best_w / std::sqrt(std::abs(best_q));
        out.signs(filled) = best_q < 0 ? -1.0 : 1.0;
        ++filled;
    }
    return out;
}

/// Orthonormal (spacelike) basis of a^perp as the columns of an m x (m-1) matrix.
template <typename Derived>
Mat orthogonal_complement_basis(const Eigen::MatrixBase<Derived>& a) {
    require_unit_timelike(a);
    const Eigen::Index m = a.size();
    const auto set = complete_pseudo_orthonormal(Mat(a), Vec::Constant(1, -1.0));
    return set.basis.rightCols(m - 1);
}

/// Unit timelike vector (cosh s, sinh s * u) for a Euclidean unit u in R^{m-1}.
inline Vec boost_direction(double s, const Vec& u) {
    Vec a(u.size() + 1);
    a(0) = std::cosh(s);
    a.tail(u.size()) = std::sinh(s) * u.normalized();
    return a;
}

/// Uniform point on the unit sphere of R^k.
template <typename Rng>
Vec random_unit_vector(Eigen::Index k, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Vec u(k);
    do {
        for (Eigen::Index i = 0; i < k; ++i) u(i) = normal(rng);
    } while (u.norm() < 1e-12);
    return u.normalized();
}

/// Lorentz transformation (columns = images of canonical axes) built from a
/// random boost of rapidity up to `max_rapidity` composed with a random rotation.
template <typename Rng>
Mat random_lorentz_transform(Eigen::Index m, Rng& rng, double max_rapidity = 1.0) {
    std::uniform_real_distribution<double> unif(0.0, max_rapidity);
    const Vec a = boost_direction(unif(rng), random_unit_vector(m - 1, rng));
    Mat spatial = orthogonal_complement_basis(a);
    // random rotation inside a^perp
    std::normal_distribution<double> normal(0.0, 1.0);
    Mat g(m - 1, m - 1);
    for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = normal(rng);
    const Eigen::HouseholderQR<Mat> qr(g);
    const Mat rot = qr.householderQ();
    Mat out(m, m);
    out.col(0) = a;
    out.rightCols(m - 1) = spatial * rot;
    return out;
}

/// `count` points of the light-cone section {<v,v> = 0, <v,a> = -1}, as columns.
/// Each is v = a + u with u uniform on the unit sphere of a^perp.
inline Mat sample_spherical_section(const Vec& a, std::uint64_t seed, Eigen::Index count) {
    require_unit_timelike(a);
    const Eigen::Index m = a.size();
    const Mat e = orthogonal_complement_basis(a);
    std::mt19937_64 rng(seed);
    Mat out(m, count);
    for (Eigen::Index s = 0; s < count; ++s) {
        out.col(s) = a + e * random_unit_vector(m - 1, rng);
    }
    return out;
}

}  // namespace spacelike
