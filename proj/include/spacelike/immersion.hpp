#pragma once

// Spacelike immersions psi: S^n -> L^m given as restrictions of an ambient map
// defined on a neighbourhood of the unit sphere S^n in R^{n+1}, plus the
// pointwise extrinsic geometry (frames, second fundamental form, mean curvature).

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "spacelike/minkowski.hpp"

namespace spacelike {

/// Ambient second derivatives: column i*d + j holds d^2 Phi / dx_i dx_j.
using HessianStack = Mat;

class Immersion {
public:
    Immersion(std::string name, int n, int m);
    virtual ~Immersion() = default;

    const std::string& name() const { return name_; }
    int n() const { return n_; }
    int m() const { return m_; }

    /// Ambient map Phi on R^{n+1}; psi is its restriction to S^n.
    virtual Vec ambient(const Vec& x) const = 0;
    /// m x (n+1). Default: central differences with one Richardson step.
    virtual Mat ambient_jacobian(const Vec& x) const;
    /// m x (n+1)^2. Default: central differences of ambient_jacobian.
    virtual HessianStack ambient_hessian(const Vec& x) const;
    /// Closed-form mean curvature at p on S^n, when the gallery item knows it.
    virtual std::optional<Vec> mean_curvature_closed_form(const Vec& /*p*/) const {
        return std::nullopt;
    }
    /// JSON description of the item and its parameters.
    virtual nlohmann::ordered_json describe() const;

    // Chart-level derivatives at p in S^n, in the central-projection chart
    // u -> (p + T u)/|p + T u| where T is tangent_basis(p).
    Vec eval(const Vec& p) const { return ambient(p); }
    Mat jacobian(const Vec& p) const;
    /// m x n^2, column i*n + j = d^2 psi / du_i du_j at u = 0.
    Mat hessian(const Vec& p) const;

protected:
    std::string name_;
    int n_;
    int m_;
};

using ImmersionPtr = std::shared_ptr<const Immersion>;

/// Euclidean orthonormal basis of the tangent space T_p S^n, as (n+1) x n.
Mat tangent_basis(const Vec& p);
/// Point of S^n with chart coordinates u around p.
Vec chart_point(const Vec& p, const Mat& T, const Vec& u);

/// Pointwise geometry bundle.
struct ShapeSample {
    Vec point;
    Vec position;
    Mat metric;        ///< n x n, g = J^T eta J
    Mat tangent;       ///< m x n, pseudo-orthonormal spacelike frame
    Mat normal;        ///< m x (m-n)
    Vec normal_signs;  ///< exactly one entry is -1
    Mat second_fundamental_form;  ///< m x n^2 in chart coordinates
    Vec mean_curvature;
    std::optional<Vec> projected_mean_curvature;  ///< H_a = H + <H,a> a
    std::optional<Vec> a_tangent;                 ///< tangential part of a
    std::optional<Vec> a_normal;                  ///< normal part of a

    /// Tangential part of an arbitrary ambient vector.
    Vec tangential_part(const Vec& v) const;
    Vec normal_part(const Vec& v) const;
};

inline constexpr double kFrameTol = 1e-8;

/// Throws NumericalError("not spacelike here") when the induced metric is not SPD.
ShapeSample shape_at(const Immersion& imm, const Vec& p, const std::optional<Vec>& a = std::nullopt);

/// Induced metric only (cheaper than shape_at).
Mat induced_metric(const Immersion& imm, const Vec& p);

// ---------------------------------------------------------------------------
// Gallery

/// Unit-speed spacelike curve in L^2.
struct PlaneCurve {
    std::string name;
    std::function<Eigen::Vector2d(double)> eval;
    std::function<Eigen::Vector2d(double)> d1;
    std::function<Eigen::Vector2d(double)> d2;
    double parameter = 0.0;  ///< e.g. hyperbola radius, reported in describe()
};

/// alpha(t) = rho (cosh(t/rho), sinh(t/rho)); <alpha'',alpha''> = -1/rho^2.
PlaneCurve hyperbola_curve(double rho);
/// alpha(t) = (0, t), a geodesic.
PlaneCurve straight_line_curve();

/// Round n-sphere of radius r in the spacelike hyperplane through `center`
/// orthogonal to the unit timelike `a`.
ImmersionPtr gallery_round_sphere(int n, double r, const Vec& center, const Vec& a);
/// (t, y) in S^n -> (cosh t, sinh t, y) in L^{n+2}; isometric.
ImmersionPtr gallery_counterexample(int n);
/// (t, y) in S^n -> (alpha(t), y) in L^{n+2}.
ImmersionPtr gallery_cylinder_curve(int n, PlaneCurve curve);
/// x in S^n -> (f(x), x, f(x)) in L^{n+3} with f = c0 + c1 x_0 + c2 x_0^2;
/// lies in the lightlike hyperplane x_1 = x_m.
ImmersionPtr gallery_lightlike_hyperplane(int n, double c0 = 0.5, double c1 = 0.3, double c2 = 0.5);
/// User map with finite-difference derivatives.
ImmersionPtr make_function_immersion(std::string name, int n, int m, std::function<Vec(const Vec&)> map);
/// psi + offset.
ImmersionPtr translated(ImmersionPtr base, const Vec& offset);

/// Normal fields N1 = (cosh t, sinh t, 0), N2 = (t sinh t, t cosh t, y) of the
/// counterexample at p = (t, y).
std::pair<Vec, Vec> counterexample_normals(const Vec& p);

/// Builds a gallery item from a declarative description, e.g.
/// {"item": "round-sphere", "n": 2, "radius": 1.5}.
ImmersionPtr load_immersion_spec(const nlohmann::json& spec);
ImmersionPtr load_immersion_spec_file(const std::string& path);

}  // namespace spacelike
