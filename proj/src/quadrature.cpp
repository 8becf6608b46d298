#include "spacelike/quadrature.hpp"

#include <cmath>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>

#include "spacelike/errors.hpp"

namespace spacelike {

IntegralResult integrate_vertex_density(const FEMPencil& pencil, const Eigen::VectorXd& density) {
    if (density.size() != pencil.vertex_count()) throw UsageError("vertex density size does not match mesh");
    return {Vec::Constant(1, pencil.lumped_mass.dot(density)), 0.0, "mesh",
            "vertices=" + std::to_string(pencil.vertex_count())};
}

IntegralResult integrate_element_density(const FEMPencil& pencil, const Eigen::VectorXd& density) {
    if (density.size() != pencil.element_count()) throw UsageError("element density size does not match mesh");
    return {Vec::Constant(1, pencil.element_volume.dot(density)), 0.0, "mesh",
            "elements=" + std::to_string(pencil.element_count())};
}

IntegralResult integrate_vertex_field(const FEMPencil& pencil, const Eigen::MatrixXd& field) {
    if (field.rows() != pencil.vertex_count()) throw UsageError("vertex field size does not match mesh");
    return {field.transpose() * pencil.lumped_mass, 0.0, "mesh",
            "vertices=" + std::to_string(pencil.vertex_count())};
}

Eigen::VectorXd VertexGeometry::tangent_part_squared(const Vec& a) const {
    Eigen::VectorXd out(static_cast<Eigen::Index>(tangent.size()));
    for (std::size_t v = 0; v < tangent.size(); ++v) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < tangent[v].cols(); ++i) {
            const double c = inner(a, tangent[v].col(i));
            s += c * c;
        }
        out(static_cast<Eigen::Index>(v)) = s;
    }
    return out;
}

VertexGeometry sample_vertex_geometry(const ParamMesh& mesh, const Immersion& imm) {
    const Eigen::Index V = mesh.vertex_count();
    VertexGeometry g;
    g.position.resize(V, imm.m());
    g.mean_curvature.resize(V, imm.m());
    g.tangent.resize(static_cast<std::size_t>(V));
    for (Eigen::Index v = 0; v < V; ++v) {
        const ShapeSample s = shape_at(imm, mesh.vertices.col(v));
        g.position.row(v) = s.position.transpose();
        g.mean_curvature.row(v) = s.mean_curvature.transpose();
        g.tangent[static_cast<std::size_t>(v)] = s.tangent;
    }
    return g;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_jacobi(int nodes, double alpha, double beta) {
    if (nodes < 1) throw UsageError("Gauss-Jacobi rule needs at least one node");
    if (!(alpha > -1 && beta > -1)) throw DomainError("Jacobi exponents must exceed -1");
    const double ab = alpha + beta;
    // monic three-term recurrence p_{k+1} = (t - a_k) p_k - b_k p_{k-1}
    Eigen::VectorXd diag(nodes);
    Eigen::VectorXd off(std::max(nodes - 1, 0));
    for (int k = 0; k < nodes; ++k) {
        const double denom = (2 * k + ab) * (2 * k + ab + 2);
        diag(k) = (k == 0) ? (beta - alpha) / (ab + 2) : (beta * beta - alpha * alpha) / denom;
    }
    for (int k = 1; k < nodes; ++k) {
        double b;
        if (k == 1) {
            b = 4 * (1 + alpha) * (1 + beta) / ((2 + ab) * (2 + ab) * (3 + ab));
        } else {
            const double s = 2 * k + ab;
            b = 4 * k * (k + alpha) * (k + beta) * (k + ab) / (s * s * (s + 1) * (s - 1));
        }
        off(k - 1) = std::sqrt(b);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
    const double mu0 = std::pow(2.0, ab + 1) * std::tgamma(alpha + 1) * std::tgamma(beta + 1) / std::tgamma(ab + 2);
    const Eigen::VectorXd weights = mu0 * es.eigenvectors().row(0).transpose().array().square();
    return {es.eigenvalues(), weights};
}

IntegralResult sphere_slice_integral(int n, const std::function<double(double)>& phi, int nodes) {
    if (n < 1) throw UsageError("slice integral needs n >= 1");
    const double e = 0.5 * (n - 2);
    const auto [t, w] = gauss_jacobi(nodes, e, e);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < t.size(); ++i) {
        const double f = phi(t(i));
        if (!std::isfinite(f)) throw NumericalError("slice integrand is not finite at t = " + std::to_string(t(i)));
        sum += w(i) * f;
    }
    // Vol(S^0) = 2 counts the two points of each slice when n = 1
    const double value = sphere_volume(n - 1) * sum;
    return {Vec::Constant(1, value), 1e-14 * std::abs(value), "slice",
            "n=" + std::to_string(n) + " nodes=" + std::to_string(nodes)};
}

namespace {

double lorentz_row_inner(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, Eigen::Index v) {
    return inner(a.row(v).transpose(), b.row(v).transpose());
}

}  // namespace

IntegralResult minkowski_residual(const FEMPencil& pencil, const VertexGeometry& geom) {
    const Eigen::Index V = pencil.vertex_count();
    Eigen::VectorXd density(V);
    for (Eigen::Index v = 0; v < V; ++v) density(v) = 1.0 + lorentz_row_inner(geom.position, geom.mean_curvature, v);
    IntegralResult r = integrate_vertex_density(pencil, density);
    r.parameters += " identity=minkowski";
    return r;
}

std::pair<IntegralResult, IntegralResult> minkowski_a_identities(const FEMPencil& pencil,
                                                                 const VertexGeometry& geom, const Vec& a) {
    require_unit_timelike(a);
    const Eigen::Index V = pencil.vertex_count();
    const int n = pencil.n;
    const Eigen::VectorXd at2 = geom.tangent_part_squared(a);
    Eigen::VectorXd first(V), second(V);
    for (Eigen::Index v = 0; v < V; ++v) {
        const Vec psi = geom.position.row(v).transpose();
        const Vec h = geom.mean_curvature.row(v).transpose();
        const double psi_a_dot_h_a = inner(project_onto_orthogonal(psi, a), project_onto_orthogonal(h, a));
        first(v) = 1.0 + psi_a_dot_h_a - inner(psi, a) * inner(h, a);
        second(v) = psi_a_dot_h_a + 1.0 + at2(v) / n;
    }
    return {integrate_vertex_density(pencil, first), integrate_vertex_density(pencil, second)};
}

namespace {

template <typename Sampler>
IntegralResult monte_carlo(const Mat& Q, std::int64_t samples, double volume, Sampler&& sample,
                           const std::string& params) {
    if (samples < 2) throw UsageError("Monte Carlo needs at least 2 samples");
    if (!Q.isApprox(Q.transpose(), 1e-12)) throw UsageError("bilinear form must be symmetric");
    // Welford running mean/variance
    double mean = 0.0;
    double m2 = 0.0;
    for (std::int64_t s = 1; s <= samples; ++s) {
        const Vec v = sample();
        const double x = v.dot(Q * v);
        const double d = x - mean;
        mean += d / static_cast<double>(s);
        m2 += d * (x - mean);
    }
    const double var = m2 / static_cast<double>(samples - 1);
    return {Vec::Constant(1, volume * mean), volume * std::sqrt(var / static_cast<double>(samples)), "monte-carlo",
            params};
}

}  // namespace

IntegralResult monte_carlo_section_integral(const Mat& Q, const Vec& a, std::int64_t samples, std::uint64_t seed) {
    require_unit_timelike(a);
    const Eigen::Index m = a.size();
    if (Q.rows() != m || Q.cols() != m) throw UsageError("bilinear form has wrong dimension");
    const Mat e = orthogonal_complement_basis(a);
    std::mt19937_64 rng(seed);
    return monte_carlo(
        Q, samples, sphere_volume(static_cast<int>(m) - 2),
        [&] { return Vec(a + e * random_unit_vector(m - 1, rng)); },
        "samples=" + std::to_string(samples) + " seed=" + std::to_string(seed));
}

IntegralResult monte_carlo_sphere_integral(const Mat& Q, std::int64_t samples, std::uint64_t seed) {
    const Eigen::Index m = Q.rows();
    std::mt19937_64 rng(seed);
    return monte_carlo(
        Q, samples, sphere_volume(static_cast<int>(m) - 1), [&] { return random_unit_vector(m, rng); },
        "samples=" + std::to_string(samples) + " seed=" + std::to_string(seed));
}

Vec gravity_center(const FEMPencil& pencil) {
    return integrate_vertex_field(pencil, pencil.positions).value / pencil.volume();
}

ImmersionPtr recenter_to_gravity_origin(const ImmersionPtr& imm, const FEMPencil& pencil) {
    if (imm->m() != pencil.m) throw UsageError("immersion and pencil disagree on ambient dimension");
    return translated(imm, -gravity_center(pencil));
}

}  // namespace spacelike
