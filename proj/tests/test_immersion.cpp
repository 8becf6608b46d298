#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "spacelike/errors.hpp"
#include "spacelike/immersion.hpp"

using namespace spacelike;

namespace {

std::vector<ImmersionPtr> gallery(int n) {
    const int m = n + 2;
    std::mt19937_64 rng(2);
    const Vec a = boost_direction(0.6, random_unit_vector(m - 1, rng));
    return {gallery_round_sphere(n, 1.0, Vec::Zero(m), Vec::Unit(m, 0)),
            gallery_round_sphere(n, 1.7, Vec::Constant(m, 0.3), a),
            gallery_counterexample(n),
            gallery_cylinder_curve(n, hyperbola_curve(2.0)),
            gallery_cylinder_curve(n, straight_line_curve()),
            gallery_lightlike_hyperplane(n)};
}

std::vector<Vec> sample_points(int n, int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<Vec> out;
    for (int i = 0; i < count; ++i) out.push_back(random_unit_vector(n + 1, rng));
    return out;
}

// psi in the central-projection chart around p.
Vec chart_eval(const Immersion& imm, const Vec& p, const Vec& u) {
    return imm.eval(chart_point(p, tangent_basis(p), u));
}

}  // namespace

TEST(Immersion, JacobianMatchesFiniteDifferences) {
    for (int n : {1, 2}) {
        for (const auto& imm : gallery(n)) {
            for (const Vec& p : sample_points(n, 5, 17)) {
                const Mat j = imm->jacobian(p);
                const double h = 1e-6;
                for (int i = 0; i < n; ++i) {
                    const Vec e = Vec::Unit(n, i);
                    const Vec fd = (chart_eval(*imm, p, h * e) - chart_eval(*imm, p, -h * e)) / (2 * h);
                    EXPECT_LT((fd - j.col(i)).norm(), 1e-6 * (1 + fd.norm())) << imm->name();
                }
            }
        }
    }
}

TEST(Immersion, HessianMatchesFiniteDifferences) {
    for (int n : {1, 2}) {
        for (const auto& imm : gallery(n)) {
            for (const Vec& p : sample_points(n, 4, 23)) {
                const Mat hs = imm->hessian(p);
                const double h = 1e-4;
                for (int i = 0; i < n; ++i) {
                    for (int j = 0; j < n; ++j) {
                        const Vec ei = h * Vec::Unit(n, i);
                        const Vec ej = h * Vec::Unit(n, j);
                        const Vec fd = (chart_eval(*imm, p, ei + ej) - chart_eval(*imm, p, ei - ej) -
                                        chart_eval(*imm, p, ej - ei) + chart_eval(*imm, p, -ei - ej)) /
                                       (4 * h * h);
                        EXPECT_LT((fd - hs.col(i * n + j)).norm(), 1e-5 * (1 + fd.norm())) << imm->name();
                    }
                }
            }
        }
    }
}

TEST(Immersion, ShippedItemsAreIsometricToTheirSpheres) {
    for (int n : {1, 2}) {
        for (const auto& imm : gallery(n)) {
            const double r = imm->describe().value("radius", 1.0);
            for (const Vec& p : sample_points(n, 6, 31)) {
                EXPECT_LT((induced_metric(*imm, p) - r * r * Mat::Identity(n, n)).norm(), 1e-9) << imm->name();
            }
        }
    }
}

TEST(Immersion, MeanCurvatureMatchesClosedForm) {
    for (int n : {1, 2}) {
        for (const auto& imm : gallery(n)) {
            for (const Vec& p : sample_points(n, 6, 37)) {
                const auto closed = imm->mean_curvature_closed_form(p);
                ASSERT_TRUE(closed.has_value()) << imm->name();
                EXPECT_LT((shape_at(*imm, p).mean_curvature - *closed).norm(), 1e-8) << imm->name();
            }
        }
    }
}

TEST(Immersion, CounterexampleCurvatureFormula) {
    for (int n : {1, 2}) {
        const auto imm = gallery_counterexample(n);
        for (const Vec& p : sample_points(n, 8, 41)) {
            const double t = p(0);
            const double expected = 1 - (1 - t * t) * (1 - t * t) / (n * n);
            EXPECT_NEAR(squared_norm(shape_at(*imm, p).mean_curvature), expected, 1e-9);
            const auto [n1, n2] = counterexample_normals(p);
            const Vec h_formula = (1 - t * t) / n * n1 - n2;
            EXPECT_LT((shape_at(*imm, p).mean_curvature - h_formula).norm(), 1e-9);
        }
    }
}

TEST(Immersion, FramesAreAdapted) {
    for (int n : {1, 2}) {
        for (const auto& imm : gallery(n)) {
            const int m = imm->m();
            const Vec a = Vec::Unit(m, 0);
            for (const Vec& p : sample_points(n, 4, 43)) {
                const ShapeSample s = shape_at(*imm, p, a);
                Mat frame(m, m);
                frame << s.tangent, s.normal;
                Vec signs(m);
                signs << Vec::Ones(n), s.normal_signs;
                const Mat g = frame.transpose() * signature(m).asDiagonal() * frame;
                EXPECT_LT((g - Mat(signs.asDiagonal())).norm(), 1e-9);
                EXPECT_EQ((s.normal_signs.array() < 0).count(), 1);
                // H is normal
                EXPECT_LT(s.tangential_part(s.mean_curvature).norm(), 1e-9);
                // a = a^T + a^N
                EXPECT_LT((*s.a_tangent + *s.a_normal - a).norm(), 1e-10);
                EXPECT_NEAR(inner(*s.projected_mean_curvature, a), 0.0, 1e-10);
            }
        }
    }
}

TEST(Immersion, MinimalInSphereHasConstantCurvature) {
    // round sphere of radius r in the hyperplane: H = -(psi - c)/r^2
    const Vec c = Eigen::Vector4d(0.0, 1.0, -2.0, 0.5);
    const auto imm = gallery_round_sphere(2, 2.0, c, Vec::Unit(4, 0));
    for (const Vec& p : sample_points(2, 5, 47)) {
        const ShapeSample s = shape_at(*imm, p);
        EXPECT_LT((s.mean_curvature + (s.position - c) / 4.0).norm(), 1e-9);
    }
}

TEST(Immersion, LightlikeItemStaysInHyperplane) {
    const auto imm = gallery_lightlike_hyperplane(2);
    for (const Vec& p : sample_points(2, 10, 53)) {
        const Vec x = imm->eval(p);
        EXPECT_NEAR(x(0), x(imm->m() - 1), 1e-14);
    }
}

TEST(Immersion, TranslationKeepsDerivatives) {
    const auto base = gallery_counterexample(2);
    const auto moved = translated(base, Eigen::Vector4d(1, 2, 3, 4));
    const Vec p = Eigen::Vector3d(0.2, 0.4, 0.6).normalized();
    EXPECT_LT((moved->eval(p) - base->eval(p) - Vec(Eigen::Vector4d(1, 2, 3, 4))).norm(), 1e-14);
    EXPECT_LT((shape_at(*moved, p).mean_curvature - shape_at(*base, p).mean_curvature).norm(), 1e-9);
}

TEST(Immersion, FunctionImmersionUsesFiniteDifferences) {
    // counterexample rebuilt from a bare map
    const auto fn = make_function_immersion("fn", 2, 4, [](const Vec& x) {
        return Vec(Eigen::Vector4d(std::cosh(x(0)), std::sinh(x(0)), x(1), x(2)));
    });
    const auto ref = gallery_counterexample(2);
    for (const Vec& p : sample_points(2, 4, 59)) {
        EXPECT_LT((shape_at(*fn, p).mean_curvature - shape_at(*ref, p).mean_curvature).norm(), 1e-5);
    }
}

TEST(Immersion, RejectsBadConstruction) {
    EXPECT_THROW(gallery_round_sphere(2, -1.0, Vec::Zero(4), Vec::Unit(4, 0)), UsageError);
    EXPECT_THROW(gallery_round_sphere(2, 1.0, Vec::Zero(4), Vec(Eigen::Vector4d(2, 0, 0, 0))), DomainError);
    EXPECT_THROW(make_function_immersion("bad", 2, 3, [](const Vec& x) { return x; }), UsageError);
}

TEST(Immersion, NonSpacelikePointIsReported) {
    // timelike image: x -> (2 x0, x0, x1, x2) has induced metric with negative directions
    const auto bad = make_function_immersion("timelike", 2, 4, [](const Vec& x) {
        return Vec(Eigen::Vector4d(3 * x(1), x(0), 0.1 * x(1), x(2)));
    });
    EXPECT_THROW(shape_at(*bad, Vec(Eigen::Vector3d(1, 0, 0))), NumericalError);
}

TEST(Immersion, SpecLoader) {
    const auto s = load_immersion_spec(nlohmann::json{{"item", "round-sphere"}, {"n", 2}, {"radius", 1.5}});
    EXPECT_EQ(s->m(), 4);
    EXPECT_DOUBLE_EQ(s->describe()["radius"].get<double>(), 1.5);
    EXPECT_EQ(load_immersion_spec(nlohmann::json{{"item", "lightlike-hyperplane"}, {"n", 1}})->m(), 4);
    EXPECT_THROW(load_immersion_spec(nlohmann::json{{"item", "torus"}}), UsageError);
    EXPECT_THROW(load_immersion_spec(nlohmann::json::array()), UsageError);
    EXPECT_THROW(load_immersion_spec_file("/nonexistent/spec.json"), UsageError);
}
