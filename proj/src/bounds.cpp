#include "spacelike/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>

#include "spacelike/errors.hpp"

namespace spacelike {

const char* to_string(Expectation e) {
    switch (e) {
        case Expectation::hold: return "hold";
        case Expectation::violate: return "violate";
        case Expectation::info: return "info";
    }
    return "?";
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::equality_case: return "equality-case";
        case Verdict::strict: return "strict";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "?";
}

double BoundReport::relative_slack() const {
    const double scale = std::max(std::abs(lhs), std::abs(rhs));
    return scale > 0 ? slack / scale : 0.0;
}

bool BoundReport::as_expected() const {
    switch (expected) {
        case Expectation::hold: return precondition_met && holds;
        case Expectation::violate: return !holds;
        case Expectation::info: return true;
    }
    return false;
}

namespace {

BoundReport make_report(const LabContext& ctx, std::string name, std::string anchor, double lhs, double rhs,
                        double tolerance, const std::optional<Vec>& a = std::nullopt) {
    BoundReport r;
    r.name = std::move(name);
    r.anchor = std::move(anchor);
    r.lhs = lhs;
    r.rhs = rhs;
    r.slack = rhs - lhs;
    r.tolerance = tolerance;
    r.holds = r.slack >= -tolerance * std::max(std::abs(lhs), std::abs(rhs));
    r.a = a;
    r.level = ctx.mesh.level;
    r.vertices = ctx.pencil.vertex_count();
    return r;
}

// <a, W> per vertex.
Eigen::VectorXd pair_with(const Eigen::MatrixXd& w, const Vec& a) {
    return w * (signature(a.size()).asDiagonal() * a);
}

// sum_j eps_j W_j^T A W_j for a sparse form A.
double lorentz_form(const Eigen::MatrixXd& w, const SparseMatrix& A) {
    const Vec eta = signature(w.cols());
    double s = 0.0;
    for (Eigen::Index j = 0; j < w.cols(); ++j) s += eta(j) * w.col(j).dot(A * w.col(j));
    return s;
}

double quad(const Eigen::VectorXd& f, const SparseMatrix& A) { return f.dot(A * f); }

double position_scale(const LabContext& ctx) {
    return 1.0 + ctx.pencil.positions.cwiseAbs().maxCoeff();
}

void require_centered(const LabContext& ctx, const char* what) {
    if (!ctx.centered()) {
        throw UsageError(std::string(what) + " needs an immersion recentered to its gravity center");
    }
}

Eigen::VectorXd lorentz_row_squares(const Eigen::MatrixXd& w) {
    Eigen::VectorXd out(w.rows());
    for (Eigen::Index v = 0; v < w.rows(); ++v) out(v) = squared_norm(w.row(v).transpose());
    return out;
}

}  // namespace

bool LabContext::centered() const {
    return center.cwiseAbs().maxCoeff() <= kCenterTol * position_scale(*this);
}

LabContext prepare_context(ImmersionPtr imm, ParamMesh mesh, const SolverOptions& options,
                           double discretization_tolerance) {
    LabContext ctx;
    ctx.pencil = assemble_pencil(mesh, *imm);
    ctx.spectrum = solve_lambda1(ctx.pencil, options);
    ctx.geometry = sample_vertex_geometry(mesh, *imm);
    ctx.center = gravity_center(ctx.pencil);
    ctx.immersion = std::move(imm);
    ctx.mesh = std::move(mesh);
    ctx.discretization_tolerance = std::max(discretization_tolerance, kBoundTol);
    return ctx;
}

TestField make_test_field(const LabContext& ctx, Eigen::MatrixXd values, std::string provenance,
                          double center_tol) {
    if (values.rows() != ctx.pencil.vertex_count() || values.cols() != ctx.m()) {
        throw UsageError("test field has wrong shape");
    }
    TestField w;
    w.values = std::move(values);
    w.provenance = std::move(provenance);
    const Vec integral = integrate_vertex_field(ctx.pencil, w.values).value;
    w.center_residual = integral.cwiseAbs().maxCoeff() / ctx.volume();
    const double scale = 1.0 + w.values.cwiseAbs().maxCoeff();
    w.centered = w.center_residual <= center_tol * scale;
    return w;
}

TestField make_test_field_H(const LabContext& ctx) {
    return make_test_field(ctx, ctx.geometry.mean_curvature, "mean-curvature", 10 * kCenterTol);
}

TestField make_test_field_position(const LabContext& ctx) {
    require_centered(ctx, "position test field");
    return make_test_field(ctx, ctx.pencil.positions, "position");
}

TestField make_test_field_projected(const LabContext& ctx, const Vec& a) {
    require_centered(ctx, "projected position test field");
    require_unit_timelike(a);
    Eigen::MatrixXd w = ctx.pencil.positions;
    w += pair_with(ctx.pencil.positions, a) * a.transpose();
    return make_test_field(ctx, std::move(w), "projected-position");
}

TestField centered_field(const LabContext& ctx, const TestField& w) {
    const Vec mean = integrate_vertex_field(ctx.pencil, w.values).value / ctx.volume();
    TestField out = make_test_field(ctx, w.values.rowwise() - mean.transpose(), w.provenance);
    return out;
}

Eigen::VectorXd trace_AQ1_density(const LabContext& ctx, const TestField& w,
                                  const std::optional<PseudoOrthonormalSet>& basis) {
    const int m = ctx.m();
    PseudoOrthonormalSet b;
    if (basis) {
        b = *basis;
    } else {
        b.basis = Mat::Identity(m, m);
        b.signs = signature(m);
    }
    Eigen::VectorXd out = Eigen::VectorXd::Zero(ctx.pencil.element_count());
    for (Eigen::Index j = 0; j < m; ++j) {
        const Eigen::VectorXd f = pair_with(w.values, b.basis.col(j));
        out += b.signs(j) * gradient_squared_per_element(ctx.pencil, f);
    }
    return out;
}

BoundReport main_lemma_sides(const LabContext& ctx, const TestField& w, const Vec& a) {
    require_unit_timelike(a);
    const TestField hat = w.centered ? w : centered_field(ctx, w);
    const int m = ctx.m();
    const Eigen::VectorXd fa = pair_with(hat.values, a);
    const double weight = m * quad(fa, ctx.pencil.mass) + lorentz_form(hat.values, ctx.pencil.mass);
    if (!(weight > 0)) throw DomainError("main lemma: test field vanishes identically");
    const double grad_a = m * quad(fa, ctx.pencil.stiffness);
    const double trace_q1 = lorentz_form(hat.values, ctx.pencil.stiffness);
    BoundReport r = make_report(ctx, "main-lemma[" + w.provenance + "]", "main-lemma", ctx.lambda1() * weight,
                                grad_a + trace_q1, kBoundTol, a);
    r.details = {{"center_residual", w.center_residual},
                 {"m_grad_a_W_sq", grad_a},
                 {"trace_AQ1_integral", trace_q1},
                 {"weight_integral", weight}};
    return r;
}

BoundReport reilly_bound(const LabContext& ctx) {
    const double h2 = integrate_vertex_density(ctx.pencil, lorentz_row_squares(ctx.geometry.mean_curvature)).scalar();
    BoundReport r = make_report(ctx, "reilly", "reilly-inequality", ctx.lambda1(), ctx.n() * h2 / ctx.volume(),
                                ctx.discretization_tolerance);
    r.details = {{"int_H_sq", h2}, {"volume", ctx.volume()}};
    return r;
}

BoundReport prop_f60_bound(const LabContext& ctx, const Vec& a) {
    require_unit_timelike(a);
    const TestField hat = centered_field(ctx, make_test_field_H(ctx));
    const int m = ctx.m();
    const Eigen::VectorXd fa = pair_with(hat.values, a);
    const double grad_a = m * quad(fa, ctx.pencil.stiffness);
    const double trace_q1 = lorentz_form(hat.values, ctx.pencil.stiffness);
    const double pair_a = m * quad(fa, ctx.pencil.mass);
    const double h2 = lorentz_form(hat.values, ctx.pencil.mass);
    if (!(pair_a + h2 > 0)) throw NumericalError("mean-curvature bound: degenerate denominator");
    BoundReport r = make_report(ctx, "mean-curvature-test-field", "mean-curvature-test-field", ctx.lambda1(),
                                (grad_a + trace_q1) / (pair_a + h2), kBoundTol, a);
    r.details = {{"m_grad_aH_sq", grad_a},
                 {"trace_AH2_plus_normal_grad", trace_q1},
                 {"m_aH_sq", pair_a},
                 {"int_H_sq", h2}};
    return r;
}

std::pair<BoundReport, BoundReport> position_field_bounds(const LabContext& ctx, const Vec& a) {
    require_centered(ctx, "position-field lemmas");
    require_unit_timelike(a);
    const int n = ctx.n();
    const int m = ctx.m();
    const Eigen::MatrixXd& psi = ctx.pencil.positions;
    const Eigen::VectorXd fa = pair_with(psi, a);
    const double psi2 = lorentz_form(psi, ctx.pencil.mass);
    const double fa2 = quad(fa, ctx.pencil.mass);
    const double grad_fa = quad(fa, ctx.pencil.stiffness);
    const double vol = ctx.volume();

    BoundReport pos_bound = make_report(ctx, "position-field", "position-field-lemma", ctx.lambda1() * (m * fa2 + psi2),
                                  n * vol + m * grad_fa, kBoundTol, a);
    BoundReport proj_bound = make_report(ctx, "projected-position-field", "projected-position-field-lemma",
                                   ctx.lambda1() * (psi2 + fa2), n * vol + grad_fa, kBoundTol, a);
    pos_bound.details = proj_bound.details = {{"int_psi_sq", psi2}, {"int_a_psi_sq", fa2}, {"int_aT_sq", grad_fa}};
    return {pos_bound, proj_bound};
}

namespace {

struct ProjectedIntegrals {
    double ha2 = 0.0;
    double at2 = 0.0;
};

ProjectedIntegrals projected_integrals(const LabContext& ctx, const Vec& a) {
    require_unit_timelike(a);
    const Eigen::MatrixXd& h = ctx.geometry.mean_curvature;
    Eigen::VectorXd ha2(h.rows());
    for (Eigen::Index v = 0; v < h.rows(); ++v) {
        const Vec hv = h.row(v).transpose();
        const double ha = inner(hv, a);
        ha2(v) = squared_norm(hv) + ha * ha;
    }
    return {integrate_vertex_density(ctx.pencil, ha2).scalar(),
            integrate_vertex_density(ctx.pencil, ctx.geometry.tangent_part_squared(a)).scalar()};
}

}  // namespace

BoundReport E_bound(const LabContext& ctx, const Vec& a) {
    const auto [ha2, at2] = projected_integrals(ctx, a);
    const int n = ctx.n();
    BoundReport r = make_report(ctx, "E", "bound-E", ctx.lambda1(), n * ha2 / (ctx.volume() + at2 / n),
                                ctx.discretization_tolerance, a);
    r.details = {{"int_Ha_sq", ha2}, {"int_aT_sq", at2}, {"volume", ctx.volume()}};
    return r;
}

BoundReport Estar_bound(const LabContext& ctx, const Vec& a) {
    const auto [ha2, at2] = projected_integrals(ctx, a);
    BoundReport r = make_report(ctx, "E*", "bound-E-star", ctx.lambda1(), ctx.n() * ha2 / ctx.volume(),
                                ctx.discretization_tolerance, a);
    r.details = {{"int_Ha_sq", ha2}, {"int_aT_sq", at2}, {"volume", ctx.volume()}};
    return r;
}

Mat elle_Q_matrix(const LabContext& ctx) {
    require_centered(ctx, "Q form");
    const int m = ctx.m();
    const Vec eta = signature(m);
    const Eigen::MatrixXd f = ctx.pencil.positions * eta.asDiagonal();  // column i = F_{e_i}
    const Eigen::MatrixXd kf = ctx.pencil.stiffness * f;
    const Eigen::MatrixXd mf = ctx.pencil.mass * f;
    Mat q = f.transpose() * kf - ctx.lambda1() * (f.transpose() * mf);
    return 0.5 * (q + q.transpose());
}

double elle_Q_form(const LabContext& ctx, const Vec& v, const Vec& w) { return v.dot(elle_Q_matrix(ctx) * w); }

BoundReport elle_reilly_check(const LabContext& ctx, const Vec& ell) {
    if (!is_causal(ell)) throw DomainError("ell must be a nonzero causal vector");
    const Mat q = elle_Q_matrix(ctx);
    const double qnorm = q.norm();
    const double ratio = qnorm > 0 ? ell.dot(q * ell) / (qnorm * ell.squaredNorm()) : 0.0;

    BoundReport r = reilly_bound(ctx);
    r.name = "reilly-under-causal-kernel";
    r.anchor = "causal-kernel-reilly";
    r.a = ell;
    r.precondition_met = std::abs(ratio) <= kElleTol;

    const int n = ctx.n();
    const double lambda = ctx.lambda1();
    const Eigen::MatrixXd& psi = ctx.pencil.positions;
    const Eigen::MatrixXd res = apply_discrete_laplacian(ctx.pencil, psi) + lambda * psi;
    const double lorentz_sq = integrate_vertex_density(ctx.pencil, lorentz_row_squares(res)).scalar();
    const double euclid_sq = integrate_vertex_density(ctx.pencil, res.rowwise().squaredNorm()).scalar();
    const double scale_sq =
        integrate_vertex_density(ctx.pencil, (lambda * psi).rowwise().squaredNorm()).scalar();
    const double psi2 = integrate_vertex_density(ctx.pencil, lorentz_row_squares(psi)).scalar();
    const double vol = ctx.volume();
    const double energy_gap = std::abs(lambda * psi2 - n * vol) / (n * vol);
    const double lorentz_rel = std::abs(lorentz_sq) / scale_sq;
    const bool equality = lorentz_rel <= kEqualityTol * kEqualityTol && energy_gap <= kEqualityTol;

    r.details.emplace_back("q_ratio", ratio);
    r.details.emplace_back("residual_lorentz_sq_rel", lorentz_rel);
    r.details.emplace_back("residual_euclid_rel", std::sqrt(euclid_sq / scale_sq));
    r.details.emplace_back("energy_gap_rel", energy_gap);
    r.details.emplace_back("equality_case", equality ? 1.0 : 0.0);
    return r;
}

CausalKernelSearch search_causal_kernel(const LabContext& ctx, int samples, std::uint64_t seed) {
    const Mat q = elle_Q_matrix(ctx);
    const double qnorm = q.norm();
    const int m = ctx.m();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> rapidity(0.0, kMaxRapidity);
    CausalKernelSearch out;
    out.best_ratio = std::numeric_limits<double>::infinity();
    for (int s = 0; s < samples; ++s) {
        const Vec u = random_unit_vector(m - 1, rng);
        Vec ell(m);
        if (s % 2 == 0) {  // lightlike (1, u)
            ell(0) = 1.0;
            ell.tail(m - 1) = u;
        } else {
            ell = boost_direction(rapidity(rng), u);
        }
        const double ratio = qnorm > 0 ? ell.dot(q * ell) / (qnorm * ell.squaredNorm()) : 0.0;
        if (ratio < out.best_ratio) {
            out.best_ratio = ratio;
            out.best = ell;
        }
    }
    out.samples = samples;
    out.found = std::abs(out.best_ratio) <= kElleTol;
    return out;
}

EqualityDiagnostic equality_diagnostic(const LabContext& ctx, const Vec& a, double tau_eq) {
    require_centered(ctx, "equality diagnostic");
    require_unit_timelike(a);
    const int n = ctx.n();
    const double lambda = ctx.lambda1();
    const Eigen::MatrixXd& psi = ctx.pencil.positions;
    const Eigen::MatrixXd r = apply_discrete_laplacian(ctx.pencil, psi) + lambda * psi;

    EqualityDiagnostic d;
    d.mu = -pair_with(r, a);
    const Eigen::MatrixXd res = r - d.mu * a.transpose();
    const double res_l2 = integrate_vertex_density(ctx.pencil, res.rowwise().squaredNorm()).scalar();
    const double psi_l2 = integrate_vertex_density(ctx.pencil, psi.rowwise().squaredNorm()).scalar();
    d.residual = std::sqrt(res_l2 / psi_l2);
    d.mu_integral = integrate_vertex_density(ctx.pencil, d.mu).scalar();
    const double vol = ctx.volume();
    d.a_tangent_mean = integrate_vertex_density(ctx.pencil, ctx.geometry.tangent_part_squared(a)).scalar() / vol;
    d.radius_from_lambda = std::sqrt(n / lambda);

    const Eigen::MatrixXd& h = ctx.geometry.mean_curvature;
    Eigen::VectorXd inv_ha(h.rows());
    for (Eigen::Index v = 0; v < h.rows(); ++v) {
        const Vec hv = h.row(v).transpose();
        const double ha = inner(hv, a);
        const double ha2 = squared_norm(hv) + ha * ha;
        inv_ha(v) = ha2 > 0 ? 1.0 / std::sqrt(ha2) : 0.0;
    }
    d.radius_from_curvature = integrate_vertex_density(ctx.pencil, inv_ha).scalar() / vol;
    d.radius_from_position =
        std::sqrt(std::max(0.0, integrate_vertex_density(ctx.pencil, lorentz_row_squares(psi)).scalar() / vol));

    if (d.residual <= tau_eq) {
        d.verdict = Verdict::equality_case;
    } else if (d.residual >= 10 * tau_eq) {
        d.verdict = Verdict::strict;
    } else {
        d.verdict = Verdict::inconclusive;
    }
    return d;
}

std::vector<Vec> sample_timelike_directions(int m, int count, std::uint64_t seed, double max_rapidity) {
    std::vector<Vec> out;
    if (count <= 0) return out;
    out.reserve(static_cast<std::size_t>(count));
    out.push_back(Vec::Unit(m, 0));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> rapidity(0.0, max_rapidity);
    while (static_cast<int>(out.size()) < count) {
        const double s = rapidity(rng);
        out.push_back(boost_direction(s, random_unit_vector(m - 1, rng)));
    }
    return out;
}

BoundReport infimum_over_directions(const LabContext& ctx, int direction_samples, std::uint64_t seed) {
    if (direction_samples < 1) throw UsageError("need at least one direction sample");
    const auto dirs = sample_timelike_directions(ctx.m(), direction_samples, seed);
    BoundReport best;
    bool first = true;
    for (const Vec& a : dirs) {
        BoundReport r = E_bound(ctx, a);
        if (first || r.rhs < best.rhs) {
            best = std::move(r);
            first = false;
        }
    }
    best.name = "E-infimum";
    best.anchor = "bound-E-infimum";
    best.details.emplace_back("direction_samples", static_cast<double>(direction_samples));
    return best;
}

}  // namespace spacelike
