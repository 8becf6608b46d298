#pragma once

// Test vector fields and the eigenvalue upper bounds built from them, evaluated
// on a discretized spacelike immersion, plus equality-case diagnostics.
//
// Two kinds of integrals appear:
//  * FEM-exact forms, f^T K g and f^T M g of P1 fields. Inequalities built only
//    from these (main lemma and its specializations) hold exactly at the
//    discrete level because lambda1 is the discrete minimum of the Rayleigh
//    quotient; they are judged with kBoundTol.
//  * Pointwise densities (|H|^2, |H_a|^2, |a^T|^2) sampled from the exact
//    immersion and integrated by element averaging. Bounds mixing these with
//    the discrete lambda1 are judged with the context's discretization tolerance.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spacelike/fem.hpp"
#include "spacelike/immersion.hpp"
#include "spacelike/quadrature.hpp"

namespace spacelike {

inline constexpr double kBoundTol = 1e-6;
inline constexpr double kCenterTol = 1e-8;
inline constexpr double kEqualityTol = 5e-2;
inline constexpr double kElleTol = 1e-8;
inline constexpr double kMaxRapidity = 2.0;

enum class Expectation { hold, violate, info };

const char* to_string(Expectation e);

struct BoundReport {
    std::string name;
    std::string anchor;  ///< stable identifier of the inequality being checked
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
    double tolerance = kBoundTol;
    bool holds = false;
    bool precondition_met = true;
    std::optional<Vec> a;
    int level = 0;
    Eigen::Index vertices = 0;
    Expectation expected = Expectation::hold;
    std::vector<std::pair<std::string, double>> details;

    double relative_slack() const;
    /// holds for `hold`, fails for `violate`, anything for `info`.
    bool as_expected() const;
};

/// Everything the bounds need about one discretized immersion.
struct LabContext {
    ImmersionPtr immersion;
    ParamMesh mesh;
    FEMPencil pencil;
    Spectrum spectrum;
    VertexGeometry geometry;
    Vec center;  ///< gravity center by mesh quadrature
    double discretization_tolerance = kBoundTol;

    int n() const { return pencil.n; }
    int m() const { return pencil.m; }
    double lambda1() const { return spectrum.lambda1; }
    double volume() const { return pencil.volume(); }
    /// Gravity center at the origin within kCenterTol (relative to the size of psi).
    bool centered() const;
};

LabContext prepare_context(ImmersionPtr imm, ParamMesh mesh, const SolverOptions& options = {},
                           double discretization_tolerance = kBoundTol);

struct TestField {
    Eigen::MatrixXd values;  ///< V x m
    bool centered = false;
    double center_residual = 0.0;  ///< max_j |int W_j dV| / Vol
    std::string provenance;        ///< mean-curvature | position | projected-position | custom
};

TestField make_test_field(const LabContext& ctx, Eigen::MatrixXd values, std::string provenance,
                          double center_tol = kCenterTol);
TestField make_test_field_H(const LabContext& ctx);
/// Requires a recentered context (UsageError otherwise).
TestField make_test_field_position(const LabContext& ctx);
TestField make_test_field_projected(const LabContext& ctx, const Vec& a);
/// W - (int W dV)/Vol.
TestField centered_field(const LabContext& ctx, const TestField& w);

/// sum_j eps_j |grad <b_j, W>|^2 per element for a pseudo-orthonormal basis
/// (canonical basis when omitted).
Eigen::VectorXd trace_AQ1_density(const LabContext& ctx, const TestField& w,
                                  const std::optional<PseudoOrthonormalSet>& basis = std::nullopt);

/// lhs = lambda1 int [m <a,W>^2 + |W|^2], rhs = int [m |grad <a,W>|^2 + trace A_Q1],
/// on the centered version of W.
BoundReport main_lemma_sides(const LabContext& ctx, const TestField& w, const Vec& a);

BoundReport reilly_bound(const LabContext& ctx);
BoundReport prop_f60_bound(const LabContext& ctx, const Vec& a);
std::pair<BoundReport, BoundReport> position_field_bounds(const LabContext& ctx, const Vec& a);
BoundReport E_bound(const LabContext& ctx, const Vec& a);
BoundReport Estar_bound(const LabContext& ctx, const Vec& a);

/// Matrix of Q(v, w) = int <grad F_v, grad F_w> - lambda1 int F_v F_w with
/// F_v = <v, psi> in canonical coordinates. Requires a recentered context.
Mat elle_Q_matrix(const LabContext& ctx);
double elle_Q_form(const LabContext& ctx, const Vec& v, const Vec& w);

/// Reilly check under a causal kernel direction ell of Q.
BoundReport elle_reilly_check(const LabContext& ctx, const Vec& ell);

struct CausalKernelSearch {
    bool found = false;
    Vec best;               ///< causal direction with the smallest normalized Q(ell, ell)
    double best_ratio = 0;  ///< Q(ell,ell) / (|Q| |ell|_E^2)
    int samples = 0;
};
CausalKernelSearch search_causal_kernel(const LabContext& ctx, int samples, std::uint64_t seed);

enum class Verdict { equality_case, strict, inconclusive };
const char* to_string(Verdict v);

struct EqualityDiagnostic {
    double residual = 0.0;            ///< |r - mu_a a|_E (L^2) / |psi_hat|_E (L^2)
    Eigen::VectorXd mu;               ///< mu_a per vertex
    double mu_integral = 0.0;
    double a_tangent_mean = 0.0;      ///< int |a^T|^2 / Vol
    double radius_from_lambda = 0.0;  ///< sqrt(n / lambda1)
    double radius_from_curvature = 0.0;  ///< mean of 1/|H_a|
    double radius_from_position = 0.0;   ///< sqrt(int |psi_hat|^2 / Vol)
    Verdict verdict = Verdict::inconclusive;
};

/// Residual of Delta psi_hat + lambda1 psi_hat = mu_a a. Requires a recentered context.
EqualityDiagnostic equality_diagnostic(const LabContext& ctx, const Vec& a, double tau_eq = kEqualityTol);

/// Canonical time axis followed by boosts (cosh s, sinh s u), s uniform in
/// [0, max_rapidity], u uniform on S^{m-2}. A prefix of a longer list for the same seed.
std::vector<Vec> sample_timelike_directions(int m, int count, std::uint64_t seed,
                                            double max_rapidity = kMaxRapidity);

/// Minimum of the (E) right-hand side over sampled directions.
BoundReport infimum_over_directions(const LabContext& ctx, int direction_samples, std::uint64_t seed);

}  // namespace spacelike
