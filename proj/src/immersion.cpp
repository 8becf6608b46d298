#include "spacelike/immersion.hpp"

#include <cmath>
#include <fstream>
#include <utility>

namespace spacelike {

Immersion::Immersion(std::string name, int n, int m) : name_(std::move(name)), n_(n), m_(m) {
    if (n < 1) throw UsageError("intrinsic dimension must be at least 1");
    if (m < 3) throw UsageError("ambient dimension must be at least 3");
    if (m < n + 2) throw UsageError("a compact spacelike submanifold needs m >= n + 2");
}

Mat Immersion::ambient_jacobian(const Vec& x) const {
    const Eigen::Index d = x.size();
    const double h = 1e-5;
    Mat out(m_, d);
    for (Eigen::Index k = 0; k < d; ++k) {
        const Vec e = Vec::Unit(d, k);
        const Vec coarse = (ambient(x + h * e) - ambient(x - h * e)) / (2 * h);
        const Vec fine = (ambient(x + 0.5 * h * e) - ambient(x - 0.5 * h * e)) / h;
        out.col(k) = (4 * fine - coarse) / 3;
    }
    return out;
}

HessianStack Immersion::ambient_hessian(const Vec& x) const {
    const Eigen::Index d = x.size();
    const double h = 1e-4;
    HessianStack out(m_, d * d);
    for (Eigen::Index l = 0; l < d; ++l) {
        const Vec e = Vec::Unit(d, l);
        const Mat dj = (ambient_jacobian(x + h * e) - ambient_jacobian(x - h * e)) / (2 * h);
        for (Eigen::Index k = 0; k < d; ++k) out.col(k * d + l) = dj.col(k);
    }
    for (Eigen::Index k = 0; k < d; ++k) {
        for (Eigen::Index l = k + 1; l < d; ++l) {
            const Vec sym = 0.5 * (out.col(k * d + l) + out.col(l * d + k));
            out.col(k * d + l) = sym;
            out.col(l * d + k) = sym;
        }
    }
    return out;
}

nlohmann::ordered_json Immersion::describe() const {
    return {{"item", name_}, {"n", n_}, {"m", m_}};
}

Mat tangent_basis(const Vec& p) {
    const Eigen::HouseholderQR<Mat> qr{Mat(p)};
    const Mat q = qr.householderQ();
    return q.rightCols(p.size() - 1);
}

Vec chart_point(const Vec& p, const Mat& T, const Vec& u) { return (p + T * u).normalized(); }

Mat Immersion::jacobian(const Vec& p) const { return ambient_jacobian(p) * tangent_basis(p); }

Mat Immersion::hessian(const Vec& p) const {
    const Eigen::Index d = p.size();
    const Mat T = tangent_basis(p);
    const Mat amb_j = ambient_jacobian(p);
    const HessianStack amb_h = ambient_hessian(p);
    Mat out = Mat::Zero(m_, n_ * n_);
    for (int i = 0; i < n_; ++i) {
        for (int j = 0; j < n_; ++j) {
            Vec col = Vec::Zero(m_);
            for (Eigen::Index k = 0; k < d; ++k) {
                for (Eigen::Index l = 0; l < d; ++l) {
                    const double w = T(k, i) * T(l, j);
                    if (w != 0.0) col += w * amb_h.col(k * d + l);
                }
            }
            // second derivative of the chart itself is -delta_ij p
            if (i == j) col -= amb_j * p;
            out.col(i * n_ + j) = col;
        }
    }
    return out;
}

Vec ShapeSample::tangential_part(const Vec& v) const {
    Vec out = Vec::Zero(v.size());
    for (Eigen::Index i = 0; i < tangent.cols(); ++i) out += inner(v, tangent.col(i)) * tangent.col(i);
    return out;
}

Vec ShapeSample::normal_part(const Vec& v) const {
    Vec out = Vec::Zero(v.size());
    for (Eigen::Index k = 0; k < normal.cols(); ++k) {
        out += normal_signs(k) * inner(v, normal.col(k)) * normal.col(k);
    }
    return out;
}

namespace {

Mat metric_of(const Mat& J) {
    const Vec eta = signature(J.rows());
    return J.transpose() * eta.asDiagonal() * J;
}

}  // namespace

Mat induced_metric(const Immersion& imm, const Vec& p) { return metric_of(imm.jacobian(p)); }

ShapeSample shape_at(const Immersion& imm, const Vec& p, const std::optional<Vec>& a) {
    const int n = imm.n();
    const int m = imm.m();
    if (p.size() != n + 1) throw UsageError("shape_at: point has wrong dimension");

    ShapeSample s;
    s.point = p;
    s.position = imm.eval(p);
    const Mat J = imm.jacobian(p);
    s.metric = metric_of(J);

    const Eigen::LLT<Mat> llt(s.metric);
    if (llt.info() != Eigen::Success) throw NumericalError("not spacelike here: induced metric is not SPD");
    // E = J L^{-T} has E^T eta E = I
    s.tangent = llt.matrixL().solve(J.transpose()).transpose();

    const auto frame = complete_pseudo_orthonormal(s.tangent, Vec::Ones(n), kFrameTol);
    s.normal = frame.basis.rightCols(m - n);
    s.normal_signs = frame.signs.tail(m - n);
    if ((s.normal_signs.array() < 0).count() != 1) {
        throw NumericalError("normal frame must carry exactly one timelike direction");
    }

    const Mat hess = imm.hessian(p);
    s.second_fundamental_form.resize(m, n * n);
    for (int c = 0; c < n * n; ++c) s.second_fundamental_form.col(c) = s.normal_part(hess.col(c));

    const Mat ginv = llt.solve(Mat::Identity(n, n));
    s.mean_curvature = Vec::Zero(m);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) s.mean_curvature += ginv(i, j) * s.second_fundamental_form.col(i * n + j);
    }
    s.mean_curvature /= n;

    if (a) {
        if (a->size() != m) throw UsageError("shape_at: a has wrong dimension");
        require_unit_timelike(*a);
        s.projected_mean_curvature = s.mean_curvature + inner(s.mean_curvature, *a) * *a;
        s.a_tangent = s.tangential_part(*a);
        s.a_normal = s.normal_part(*a);
    }
    return s;
}

// ---------------------------------------------------------------------------

PlaneCurve hyperbola_curve(double rho) {
    if (!(rho > 0)) throw UsageError("hyperbola radius must be positive");
    PlaneCurve c;
    c.name = "hyperbola";
    c.parameter = rho;
    c.eval = [rho](double t) { return Eigen::Vector2d(rho * std::cosh(t / rho), rho * std::sinh(t / rho)); };
    c.d1 = [rho](double t) { return Eigen::Vector2d(std::sinh(t / rho), std::cosh(t / rho)); };
    c.d2 = [rho](double t) { return Eigen::Vector2d(std::cosh(t / rho) / rho, std::sinh(t / rho) / rho); };
    return c;
}

PlaneCurve straight_line_curve() {
    PlaneCurve c;
    c.name = "line";
    c.eval = [](double t) { return Eigen::Vector2d(0.0, t); };
    c.d1 = [](double) { return Eigen::Vector2d(0.0, 1.0); };
    c.d2 = [](double) { return Eigen::Vector2d(0.0, 0.0); };
    return c;
}

namespace {

class RoundSphere final : public Immersion {
public:
    RoundSphere(int n, double r, Vec center, Vec a)
        : Immersion("round-sphere", n, static_cast<int>(a.size())), r_(r), center_(std::move(center)),
          a_(std::move(a)) {
        if (!(r > 0)) throw UsageError("sphere radius must be positive");
        if (center_.size() != m_) throw UsageError("sphere center has wrong dimension");
        frame_ = orthogonal_complement_basis(a_).leftCols(n + 1);
    }

    Vec ambient(const Vec& x) const override { return center_ + r_ * frame_ * x; }
    Mat ambient_jacobian(const Vec&) const override { return r_ * frame_; }
    HessianStack ambient_hessian(const Vec&) const override {
        return HessianStack::Zero(m_, (n_ + 1) * (n_ + 1));
    }
    std::optional<Vec> mean_curvature_closed_form(const Vec& p) const override {
        return Vec(-(ambient(p) - center_) / (r_ * r_));
    }
    nlohmann::ordered_json describe() const override {
        auto j = Immersion::describe();
        j["radius"] = r_;
        j["center"] = std::vector<double>(center_.data(), center_.data() + center_.size());
        j["a"] = std::vector<double>(a_.data(), a_.data() + a_.size());
        return j;
    }

private:
    double r_;
    Vec center_;
    Vec a_;
    Mat frame_;
};

class Cylinder final : public Immersion {
public:
    Cylinder(std::string name, int n, PlaneCurve curve)
        : Immersion(std::move(name), n, n + 2), curve_(std::move(curve)) {
        for (int k = 0; k <= 64; ++k) {
            const double t = -1.0 + 2.0 * k / 64.0;
            const Eigen::Vector2d v = curve_.d1(t);
            if (std::abs(-v(0) * v(0) + v(1) * v(1) - 1.0) > kUnitTol) {
                throw DomainError("curve is not unit-speed spacelike on [-1, 1]");
            }
        }
    }

    Vec ambient(const Vec& x) const override {
        Vec out(m_);
        out.head<2>() = curve_.eval(x(0));
        out.tail(n_) = x.tail(n_);
        return out;
    }
    Mat ambient_jacobian(const Vec& x) const override {
        Mat out = Mat::Zero(m_, n_ + 1);
        out.col(0).head<2>() = curve_.d1(x(0));
        out.bottomRightCorner(n_, n_).setIdentity();
        return out;
    }
    HessianStack ambient_hessian(const Vec& x) const override {
        HessianStack out = HessianStack::Zero(m_, (n_ + 1) * (n_ + 1));
        out.col(0).head<2>() = curve_.d2(x(0));
        return out;
    }
    std::optional<Vec> mean_curvature_closed_form(const Vec& p) const override {
        const double t = p(0);
        Vec h = Vec::Zero(m_);
        h.head<2>() = (1 - t * t) / n_ * curve_.d2(t) - t * curve_.d1(t);
        h.tail(n_) = -p.tail(n_);
        return h;
    }
    nlohmann::ordered_json describe() const override {
        auto j = Immersion::describe();
        if (name_ != "counterexample") {
            j["curve"] = curve_.name;
            j["curve_parameter"] = curve_.parameter;
        }
        return j;
    }

private:
    PlaneCurve curve_;
};

class LightlikeHyperplaneSphere final : public Immersion {
public:
    LightlikeHyperplaneSphere(int n, double c0, double c1, double c2)
        : Immersion("lightlike-hyperplane", n, n + 3), c0_(c0), c1_(c1), c2_(c2) {}

    Vec ambient(const Vec& x) const override {
        Vec out(m_);
        const double f = height(x);
        out(0) = f;
        out.segment(1, n_ + 1) = x;
        out(m_ - 1) = f;
        return out;
    }
    Mat ambient_jacobian(const Vec& x) const override {
        Mat out = Mat::Zero(m_, n_ + 1);
        const double df = c1_ + 2 * c2_ * x(0);
        out(0, 0) = df;
        out(m_ - 1, 0) = df;
        out.block(1, 0, n_ + 1, n_ + 1).setIdentity();
        return out;
    }
    HessianStack ambient_hessian(const Vec&) const override {
        HessianStack out = HessianStack::Zero(m_, (n_ + 1) * (n_ + 1));
        out(0, 0) = 2 * c2_;
        out(m_ - 1, 0) = 2 * c2_;
        return out;
    }
    std::optional<Vec> mean_curvature_closed_form(const Vec& p) const override {
        // Beltrami on the round sphere: Delta x0 = -n x0, Delta x0^2 = 2 - 2(n+1) x0^2
        const double t = p(0);
        const double lap_f = -n_ * c1_ * t + c2_ * (2 - 2 * (n_ + 1) * t * t);
        Vec h(m_);
        h(0) = lap_f / n_;
        h.segment(1, n_ + 1) = -p;
        h(m_ - 1) = lap_f / n_;
        return h;
    }
    nlohmann::ordered_json describe() const override {
        auto j = Immersion::describe();
        j["c0"] = c0_;
        j["c1"] = c1_;
        j["c2"] = c2_;
        return j;
    }

private:
    double height(const Vec& x) const { return c0_ + c1_ * x(0) + c2_ * x(0) * x(0); }
    double c0_, c1_, c2_;
};

class FunctionImmersion final : public Immersion {
public:
    FunctionImmersion(std::string name, int n, int m, std::function<Vec(const Vec&)> map)
        : Immersion(std::move(name), n, m), map_(std::move(map)) {}
    Vec ambient(const Vec& x) const override { return map_(x); }

private:
    std::function<Vec(const Vec&)> map_;
};

class Translated final : public Immersion {
public:
    Translated(ImmersionPtr base, Vec offset)
        : Immersion(base->name(), base->n(), base->m()), base_(std::move(base)), offset_(std::move(offset)) {
        if (offset_.size() != m_) throw UsageError("translation has wrong dimension");
    }
    Vec ambient(const Vec& x) const override { return base_->ambient(x) + offset_; }
    Mat ambient_jacobian(const Vec& x) const override { return base_->ambient_jacobian(x); }
    HessianStack ambient_hessian(const Vec& x) const override { return base_->ambient_hessian(x); }
    std::optional<Vec> mean_curvature_closed_form(const Vec& p) const override {
        return base_->mean_curvature_closed_form(p);
    }
    nlohmann::ordered_json describe() const override {
        auto j = base_->describe();
        j["translation"] = std::vector<double>(offset_.data(), offset_.data() + offset_.size());
        return j;
    }

private:
    ImmersionPtr base_;
    Vec offset_;
};

Vec vec_from_json(const nlohmann::json& j) {
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

ImmersionPtr gallery_round_sphere(int n, double r, const Vec& center, const Vec& a) {
    return std::make_shared<RoundSphere>(n, r, center, a);
}

ImmersionPtr gallery_counterexample(int n) {
    return std::make_shared<Cylinder>("counterexample", n, hyperbola_curve(1.0));
}

ImmersionPtr gallery_cylinder_curve(int n, PlaneCurve curve) {
    return std::make_shared<Cylinder>("cylinder-curve", n, std::move(curve));
}

ImmersionPtr gallery_lightlike_hyperplane(int n, double c0, double c1, double c2) {
    return std::make_shared<LightlikeHyperplaneSphere>(n, c0, c1, c2);
}

ImmersionPtr make_function_immersion(std::string name, int n, int m, std::function<Vec(const Vec&)> map) {
    return std::make_shared<FunctionImmersion>(std::move(name), n, m, std::move(map));
}

ImmersionPtr translated(ImmersionPtr base, const Vec& offset) {
    return std::make_shared<Translated>(std::move(base), offset);
}

std::pair<Vec, Vec> counterexample_normals(const Vec& p) {
    const Eigen::Index n = p.size() - 1;
    const double t = p(0);
    Vec n1 = Vec::Zero(n + 2);
    Vec n2 = Vec::Zero(n + 2);
    n1(0) = std::cosh(t);
    n1(1) = std::sinh(t);
    n2(0) = t * std::sinh(t);
    n2(1) = t * std::cosh(t);
    n2.tail(n) = p.tail(n);
    return {n1, n2};
}

ImmersionPtr load_immersion_spec(const nlohmann::json& spec) {
    if (!spec.is_object() || !spec.contains("item")) throw UsageError("immersion spec needs an \"item\" field");
    const std::string item = spec.at("item").get<std::string>();
    const int n = spec.value("n", 2);
    if (item == "round-sphere") {
        const int m = spec.value("m", n + 2);
        const double r = spec.value("radius", 1.0);
        const Vec center = spec.contains("center") ? vec_from_json(spec["center"]) : Vec::Zero(m);
        const Vec a = spec.contains("a") ? vec_from_json(spec["a"]) : Vec::Unit(m, 0);
        return gallery_round_sphere(n, r, center, a);
    }
    if (item == "counterexample") return gallery_counterexample(n);
    if (item == "cylinder-curve") {
        const std::string curve = spec.value("curve", std::string("hyperbola"));
        if (curve == "hyperbola") return gallery_cylinder_curve(n, hyperbola_curve(spec.value("curve_parameter", 2.0)));
        if (curve == "line") return gallery_cylinder_curve(n, straight_line_curve());
        throw UsageError("unknown curve: " + curve);
    }
    if (item == "lightlike-hyperplane") {
        return gallery_lightlike_hyperplane(n, spec.value("c0", 0.5), spec.value("c1", 0.3), spec.value("c2", 0.5));
    }
    throw UsageError("unknown gallery item: " + item);
}

ImmersionPtr load_immersion_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open immersion spec file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw UsageError("malformed immersion spec file: " + std::string(e.what()));
    }
    return load_immersion_spec(j);
}

}  // namespace spacelike
