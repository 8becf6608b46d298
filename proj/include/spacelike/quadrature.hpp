#pragma once

// Integration over immersed meshes, exact slice quadrature on S^n, Minkowski
// identities, and Monte Carlo integration over light-cone sections.

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "spacelike/fem.hpp"
#include "spacelike/immersion.hpp"

namespace spacelike {

struct IntegralResult {
    Vec value;             ///< size 1 for scalar integrals
    double error = 0.0;    ///< estimated absolute error; 0 when not estimated
    std::string method;    ///< "mesh" | "slice" | "monte-carlo"
    std::string parameters;

    double scalar() const { return value(0); }
};

/// Element-average quadrature of per-vertex data (equivalently lumped-mass weights).
IntegralResult integrate_vertex_density(const FEMPencil& pencil, const Eigen::VectorXd& density);
IntegralResult integrate_element_density(const FEMPencil& pencil, const Eigen::VectorXd& density);
/// Componentwise integral of a V x k vertex field.
IntegralResult integrate_vertex_field(const FEMPencil& pencil, const Eigen::MatrixXd& field);

/// Pointwise geometry at every mesh vertex, from exact derivatives.
struct VertexGeometry {
    Eigen::MatrixXd position;        ///< V x m
    Eigen::MatrixXd mean_curvature;  ///< V x m
    std::vector<Mat> tangent;        ///< m x n pseudo-orthonormal frame per vertex

    /// ||a^T||^2 per vertex.
    Eigen::VectorXd tangent_part_squared(const Vec& a) const;
};

VertexGeometry sample_vertex_geometry(const ParamMesh& mesh, const Immersion& imm);

/// Gauss-Jacobi rule for weight (1-t)^alpha (1+t)^beta on [-1, 1] (Golub-Welsch).
std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_jacobi(int nodes, double alpha, double beta);

inline constexpr int kSliceNodes = 64;

/// Integral over S^n of a function of the first coordinate t:
/// Vol(S^{n-1}) * int_{-1}^{1} phi(t) (1-t^2)^{(n-2)/2} dt.
IntegralResult sphere_slice_integral(int n, const std::function<double(double)>& phi, int nodes = kSliceNodes);

/// int_M (1 + <psi, H>) dV.
IntegralResult minkowski_residual(const FEMPencil& pencil, const VertexGeometry& geom);

/// Residuals of int (1 + <psi_a, H_a> - <psi,a><H,a>) dV and of
/// int <psi_a, H_a> dV + Vol + (1/n) int ||a^T||^2 dV.
std::pair<IntegralResult, IntegralResult> minkowski_a_identities(const FEMPencil& pencil,
                                                                 const VertexGeometry& geom, const Vec& a);

/// Vol(S^{m-2}) times the sample mean of Q(v,v) over the section relative to a.
IntegralResult monte_carlo_section_integral(const Mat& Q, const Vec& a, std::int64_t samples, std::uint64_t seed);
/// Euclidean counterpart over the unit sphere S^{m-1} of R^m.
IntegralResult monte_carlo_sphere_integral(const Mat& Q, std::int64_t samples, std::uint64_t seed);

/// c / Vol with c = int psi dV.
Vec gravity_center(const FEMPencil& pencil);
/// psi - gravity_center, as a new immersion.
ImmersionPtr recenter_to_gravity_origin(const ImmersionPtr& imm, const FEMPencil& pencil);

}  // namespace spacelike
