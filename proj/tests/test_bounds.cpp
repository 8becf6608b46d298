#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "spacelike/bounds.hpp"
#include "spacelike/errors.hpp"

using namespace spacelike;

namespace {

LabContext centered_context(const ImmersionPtr& imm, int level) {
    const ParamMesh mesh = build_sphere_mesh(imm->n(), level);
    const FEMPencil raw = assemble_pencil(mesh, *imm);
    return prepare_context(recenter_to_gravity_origin(imm, raw), mesh, {}, 1e-2);
}

ImmersionPtr unit_sphere(int n) { return gallery_round_sphere(n, 1.0, Vec::Zero(n + 2), Vec::Unit(n + 2, 0)); }

std::vector<ImmersionPtr> gallery(int n) {
    return {unit_sphere(n), gallery_counterexample(n), gallery_cylinder_curve(n, hyperbola_curve(2.0)),
            gallery_lightlike_hyperplane(n)};
}

double rel(double x, double y) { return std::abs(x - y) / std::max(std::abs(x), std::abs(y)); }

}  // namespace

TEST(Bounds, MainLemmaHoldsAcrossGallery) {
    for (int n : {1, 2}) {
        for (const auto& imm : gallery(n)) {
            const LabContext ctx = centered_context(imm, 3);
            for (const Vec& a : sample_timelike_directions(ctx.m(), 6, 3)) {
                for (const TestField& w : {make_test_field_H(ctx), make_test_field_position(ctx),
                                           make_test_field_projected(ctx, a)}) {
                    const BoundReport r = main_lemma_sides(ctx, w, a);
                    EXPECT_TRUE(r.holds) << imm->name() << " " << w.provenance << " slack " << r.slack;
                }
            }
        }
    }
}

TEST(Bounds, MainLemmaReducesToMinimumPrinciple) {
    // W = f a with mean-zero f: trace density is -|grad f|^2 and the lemma is
    // (m - 1) lambda int f^2 <= (m - 1) int |grad f|^2
    const LabContext ctx = centered_context(gallery_counterexample(2), 3);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> nd;
    const Vec a = sample_timelike_directions(ctx.m(), 3, 9)[2];
    Eigen::VectorXd f(ctx.pencil.vertex_count());
    for (Eigen::Index i = 0; i < f.size(); ++i) f(i) = nd(rng);
    f.array() -= ctx.pencil.lumped_mass.dot(f) / ctx.volume();
    const TestField w = make_test_field(ctx, f * a.transpose(), "custom");
    const Eigen::VectorXd dens = trace_AQ1_density(ctx, w);
    EXPECT_LT((dens + gradient_squared_per_element(ctx.pencil, f)).norm(), 1e-9 * dens.norm());
    const BoundReport r = main_lemma_sides(ctx, w, a);
    const int m = ctx.m();
    EXPECT_NEAR(r.lhs, (m - 1) * ctx.lambda1() * f.dot(ctx.pencil.mass * f), 1e-9 * r.lhs);
    EXPECT_NEAR(r.rhs, (m - 1) * f.dot(ctx.pencil.stiffness * f), 1e-9 * r.rhs);
    EXPECT_TRUE(r.holds);
}

TEST(Bounds, MainLemmaEqualityForEigenfunctionField) {
    // W = f b with f the discrete eigenfunction and b spacelike orthogonal to a
    const LabContext ctx = centered_context(gallery_counterexample(2), 3);
    const Vec a = Vec::Unit(4, 0);
    const TestField w = make_test_field(ctx, ctx.spectrum.eigenfunction * Vec::Unit(4, 2).transpose(), "custom");
    const BoundReport r = main_lemma_sides(ctx, w, a);
    EXPECT_LT(std::abs(r.relative_slack()), 1e-7);
}

TEST(Bounds, ZeroFieldIsDegenerate) {
    const LabContext ctx = centered_context(unit_sphere(2), 2);
    const TestField w = make_test_field(ctx, Eigen::MatrixXd::Zero(ctx.pencil.vertex_count(), 4), "custom");
    EXPECT_THROW(main_lemma_sides(ctx, w, Vec::Unit(4, 0)), DomainError);
}

TEST(Bounds, TraceDensityIsBasisIndependent) {
    const LabContext ctx = centered_context(gallery_cylinder_curve(2, hyperbola_curve(2.0)), 3);
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 5; ++trial) {
        const Mat L = random_lorentz_transform(4, rng, 1.0);
        PseudoOrthonormalSet basis{L, signature(4)};
        for (const TestField& w : {make_test_field_H(ctx), make_test_field_position(ctx)}) {
            const Eigen::VectorXd d0 = trace_AQ1_density(ctx, w);
            const Eigen::VectorXd d1 = trace_AQ1_density(ctx, w, basis);
            EXPECT_LE((d0 - d1).cwiseAbs().maxCoeff(), 1e-9 * d0.cwiseAbs().maxCoeff());
        }
    }
}

TEST(Bounds, PositionTraceIsExactlyN) {
    for (int n : {1, 2}) {
        const LabContext ctx = centered_context(gallery_counterexample(n), 3);
        const Eigen::VectorXd d = trace_AQ1_density(ctx, make_test_field_position(ctx));
        EXPECT_LT((d.array() - n).abs().maxCoeff(), 1e-10);
    }
}

TEST(Bounds, ProjectedTraceConvergesToIdentity) {
    const Vec a = Vec::Unit(4, 0);
    double prev = 1.0;
    for (int level = 2; level <= 4; ++level) {
        const LabContext ctx = centered_context(gallery_counterexample(2), level);
        const Eigen::VectorXd d = trace_AQ1_density(ctx, make_test_field_projected(ctx, a));
        const Eigen::VectorXd at = ctx.geometry.tangent_part_squared(a);
        double l1 = 0.0;
        for (Eigen::Index e = 0; e < d.size(); ++e) {
            double avg = 0.0;
            for (int k = 0; k < 3; ++k) avg += at(ctx.pencil.simplices(k, e)) / 3.0;
            l1 += ctx.pencil.element_volume(e) * std::abs(d(e) - 2.0 - avg);
        }
        l1 /= ctx.volume();
        EXPECT_LT(l1, prev);
        prev = l1;
    }
    EXPECT_LT(prev, 1e-2);
}

TEST(Bounds, PositionFieldsNeedRecentering) {
    const ParamMesh mesh = build_icosphere_mesh(2);
    const LabContext ctx = prepare_context(gallery_counterexample(2), mesh);
    EXPECT_FALSE(ctx.centered());
    EXPECT_THROW(make_test_field_position(ctx), UsageError);
    EXPECT_THROW(make_test_field_projected(ctx, Vec::Unit(4, 0)), UsageError);
    EXPECT_THROW(position_field_bounds(ctx, Vec::Unit(4, 0)), UsageError);
    EXPECT_THROW(elle_Q_matrix(ctx), UsageError);
    EXPECT_THROW(equality_diagnostic(ctx, Vec::Unit(4, 0)), UsageError);
}

TEST(Bounds, ProjectedFieldKillsAComponent) {
    const LabContext ctx = centered_context(gallery_counterexample(2), 2);
    const Vec a = Vec::Unit(4, 0);
    const TestField w = make_test_field_projected(ctx, a);
    EXPECT_LT(w.values.col(0).cwiseAbs().maxCoeff(), 1e-14);
    // the sphere already lies in a^perp
    const LabContext s = centered_context(unit_sphere(2), 2);
    EXPECT_LT((make_test_field_projected(s, a).values - s.pencil.positions).norm(), 1e-14);
}

TEST(Bounds, ReillyOnGallery) {
    for (int n : {1, 2}) {
        const LabContext sphere = centered_context(unit_sphere(n), 4);
        const BoundReport rs = reilly_bound(sphere);
        EXPECT_NEAR(rs.rhs, n, 1e-9);
        EXPECT_TRUE(rs.holds);

        const LabContext ce = centered_context(gallery_counterexample(n), 4);
        const BoundReport rc = reilly_bound(ce);
        EXPECT_FALSE(rc.holds);
        // certificate margin
        EXPECT_LT(rc.rhs, ce.lambda1() - 0.5 * n / ((n + 1.0) * (n + 1.0)));

        const LabContext cyl = centered_context(gallery_cylinder_curve(n, hyperbola_curve(2.0)), 4);
        EXPECT_FALSE(reilly_bound(cyl).holds);
    }
}

TEST(Bounds, EOrderingAndTranslationInvariance) {
    const ParamMesh mesh = build_icosphere_mesh(3);
    const auto imm = gallery_counterexample(2);
    const LabContext raw = prepare_context(imm, mesh, {}, 1e-2);
    const LabContext moved = prepare_context(translated(imm, Eigen::Vector4d(3.0, -1.0, 2.0, 0.5)), mesh, {}, 1e-2);
    for (const Vec& a : sample_timelike_directions(4, 10, 5)) {
        const BoundReport e = E_bound(raw, a);
        const BoundReport es = Estar_bound(raw, a);
        EXPECT_LE(e.rhs, es.rhs);
        EXPECT_LE(rel(e.rhs, E_bound(moved, a).rhs), 1e-10);
        EXPECT_LE(rel(es.rhs, Estar_bound(moved, a).rhs), 1e-10);
    }
    EXPECT_THROW(E_bound(raw, Vec(Eigen::Vector4d(2, 0, 0, 0))), DomainError);
}

TEST(Bounds, F60AndPositionLemmasHold) {
    for (const auto& imm : gallery(2)) {
        const LabContext ctx = centered_context(imm, 3);
        for (const Vec& a : sample_timelike_directions(4, 5, 17)) {
            EXPECT_TRUE(prop_f60_bound(ctx, a).holds) << imm->name();
            const auto [pos_bound, proj_bound] = position_field_bounds(ctx, a);
            EXPECT_TRUE(pos_bound.holds) << imm->name();
            EXPECT_TRUE(proj_bound.holds) << imm->name();
        }
    }
}

TEST(Bounds, SphereReachesEqualityInPositionLemmas) {
    const LabContext ctx = centered_context(unit_sphere(2), 4);
    const auto [pos_bound, proj_bound] = position_field_bounds(ctx, Vec::Unit(4, 0));
    EXPECT_LT(std::abs(pos_bound.relative_slack()), 1e-2);
    EXPECT_LT(std::abs(proj_bound.relative_slack()), 1e-2);
    EXPECT_LT(std::abs(prop_f60_bound(ctx, Vec::Unit(4, 0)).relative_slack()), 1e-2);
}

TEST(Bounds, QFormIsPositiveSemidefinite) {
    for (const auto& imm : gallery(2)) {
        const LabContext ctx = centered_context(imm, 3);
        const Mat q = elle_Q_matrix(ctx);
        EXPECT_LT((q - q.transpose()).norm(), 1e-12);
        EXPECT_GE(Eigen::SelfAdjointEigenSolver<Mat>(q).eigenvalues()(0), -kBoundTol * q.norm());
    }
    const LabContext s = centered_context(unit_sphere(2), 3);
    EXPECT_NEAR(elle_Q_form(s, Vec::Unit(4, 0), Vec::Unit(4, 0)), 0.0, 1e-14);
}

TEST(Bounds, ElleCheckOnKernelDirections) {
    const LabContext s = centered_context(unit_sphere(2), 4);
    const BoundReport rs = elle_reilly_check(s, Vec::Unit(4, 0));
    EXPECT_TRUE(rs.precondition_met);
    EXPECT_TRUE(rs.holds);

    const LabContext l = centered_context(gallery_lightlike_hyperplane(2), 3);
    const Vec ell = Vec::Unit(5, 0) + Vec::Unit(5, 4);
    const BoundReport rl = elle_reilly_check(l, ell);
    EXPECT_TRUE(rl.precondition_met);
    EXPECT_TRUE(rl.holds);

    EXPECT_THROW(elle_reilly_check(s, Vec::Unit(4, 1)), DomainError);

    const LabContext c = centered_context(gallery_counterexample(2), 3);
    const CausalKernelSearch search = search_causal_kernel(c, 2000, 1);
    EXPECT_FALSE(search.found);
    EXPECT_FALSE(elle_reilly_check(c, search.best).precondition_met);
}

TEST(Bounds, EqualityDiagnosticOnSphere) {
    const LabContext ctx = centered_context(unit_sphere(2), 4);
    const EqualityDiagnostic d = equality_diagnostic(ctx, Vec::Unit(4, 0));
    EXPECT_EQ(d.verdict, Verdict::equality_case);
    EXPECT_LT(d.mu.cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT(d.a_tangent_mean, 1e-20);
    EXPECT_NEAR(d.radius_from_lambda, 1.0, 1e-2);
    EXPECT_NEAR(d.radius_from_curvature, 1.0, 1e-9);
}

TEST(Bounds, MuIntegratesToZero) {
    const LabContext ctx = centered_context(gallery_counterexample(2), 3);
    for (const Vec& a : sample_timelike_directions(4, 5, 2)) {
        const EqualityDiagnostic d = equality_diagnostic(ctx, a);
        // K 1 = 0 and the field is centered, so int mu = -<a, int (Delta + lambda) psi> = 0
        EXPECT_LE(std::abs(d.mu_integral), 1e-8 * ctx.volume());
    }
}

TEST(Bounds, DirectionSamplingIsPrefixStable) {
    const auto a20 = sample_timelike_directions(4, 20, 3);
    const auto a200 = sample_timelike_directions(4, 200, 3);
    for (std::size_t i = 0; i < a20.size(); ++i) EXPECT_EQ(a20[i], a200[i]);
    for (const Vec& a : a200) EXPECT_NEAR(squared_norm(a), -1.0, 1e-9);
    const LabContext ctx = centered_context(gallery_counterexample(2), 3);
    EXPECT_LE(infimum_over_directions(ctx, 200, 3).rhs, infimum_over_directions(ctx, 20, 3).rhs);
    EXPECT_TRUE(infimum_over_directions(ctx, 50, 3).holds);
}
