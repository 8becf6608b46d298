#include "spacelike/fem.hpp"

#include <cmath>
#include <random>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "spacelike/errors.hpp"

namespace spacelike {

namespace {

// Reference gradients of the barycentric hat functions: row k is d/du_k, so
// d phi_0 = -1 and d phi_j = e_j.
Eigen::MatrixXd reference_gradients(int n) {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n + 1);
    d.col(0).setConstant(-1.0);
    d.rightCols(n).setIdentity();
    return d;
}

double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

}  // namespace

FEMPencil assemble_pencil(const ParamMesh& mesh, const Immersion& imm) {
    if (mesh.n != imm.n()) throw UsageError("mesh and immersion have different intrinsic dimension");
    validate_closed(mesh);

    const int n = mesh.n;
    const int m = imm.m();
    const Eigen::Index V = mesh.vertex_count();
    const Eigen::Index E = mesh.simplex_count();

    FEMPencil p;
    p.n = n;
    p.m = m;
    p.simplices = mesh.simplices;
    p.positions.resize(V, m);
    for (Eigen::Index v = 0; v < V; ++v) p.positions.row(v) = imm.eval(mesh.vertices.col(v)).transpose();

    p.element_volume.resize(E);
    p.element_gram_inverse.resize(static_cast<std::size_t>(E));

    const Eigen::MatrixXd dref = reference_gradients(n);
    const Vec eta = signature(m);
    const double mass_scale = 1.0 / ((n + 1) * (n + 2));

    std::vector<Eigen::Triplet<double>> kt;
    std::vector<Eigen::Triplet<double>> mt;
    kt.reserve(static_cast<std::size_t>(E * (n + 1) * (n + 1)));
    mt.reserve(kt.capacity());

    for (Eigen::Index e = 0; e < E; ++e) {
        Eigen::MatrixXd chords(m, n);
        const Eigen::Index v0 = mesh.simplices(0, e);
        for (int k = 0; k < n; ++k) {
            chords.col(k) = (p.positions.row(mesh.simplices(k + 1, e)) - p.positions.row(v0)).transpose();
        }
        const Eigen::MatrixXd gram = chords.transpose() * eta.asDiagonal() * chords;
        const Eigen::LLT<Eigen::MatrixXd> llt(gram);
        const double det = gram.determinant();
        if (llt.info() != Eigen::Success || !(det > 0)) {
            throw NumericalError("element " + std::to_string(e) + " not spacelike / mesh too coarse");
        }
        const double vol = std::sqrt(det) / factorial(n);
        Eigen::MatrixXd ginv = llt.solve(Eigen::MatrixXd::Identity(n, n));
        p.element_volume(e) = vol;

        const Eigen::MatrixXd ke = vol * dref.transpose() * ginv * dref;
        for (int i = 0; i <= n; ++i) {
            for (int j = 0; j <= n; ++j) {
                const int vi = mesh.simplices(i, e);
                const int vj = mesh.simplices(j, e);
                kt.emplace_back(vi, vj, ke(i, j));
                mt.emplace_back(vi, vj, vol * mass_scale * (i == j ? 2.0 : 1.0));
            }
        }
        p.element_gram_inverse[static_cast<std::size_t>(e)] = std::move(ginv);
    }

    p.stiffness.resize(V, V);
    p.mass.resize(V, V);
    p.stiffness.setFromTriplets(kt.begin(), kt.end());
    p.mass.setFromTriplets(mt.begin(), mt.end());
    p.lumped_mass = p.mass * Eigen::VectorXd::Ones(V);
    return p;
}

Spectrum solve_lambda1(const FEMPencil& pencil, const SolverOptions& options) {
    const Eigen::Index N = pencil.vertex_count();
    if (N < 3) throw UsageError("eigensolver needs at least 3 vertices");
    const Eigen::Index block = std::min<Eigen::Index>(options.block_size, N - 1);
    const Eigen::VectorXd& lumped = pencil.lumped_mass;
    const double vol = lumped.sum();

    // K restricted to vertices 1..N-1 is SPD when ker K = constants
    const SparseMatrix reduced = pencil.stiffness.bottomRightCorner(N - 1, N - 1);
    Eigen::SimplicialLDLT<SparseMatrix> ldlt(reduced);
    if (ldlt.info() != Eigen::Success) throw NumericalError("stiffness factorization failed");

    auto deflate = [&](Eigen::Ref<Eigen::VectorXd> x) { x.array() -= lumped.dot(x) / vol; };
    auto solve_on_complement = [&](const Eigen::VectorXd& b) {
        Eigen::VectorXd x(N);
        x(0) = 0.0;
        x.tail(N - 1) = ldlt.solve(b.tail(N - 1));
        deflate(x);
        return x;
    };

    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd X(N, block);
    for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = normal(rng);
    for (Eigen::Index j = 0; j < block; ++j) deflate(X.col(j));

    Spectrum out;
    Eigen::MatrixXd Y(N, block);
    for (int it = 1; it <= options.max_iterations; ++it) {
        const Eigen::MatrixXd MX = pencil.mass * X;
        for (Eigen::Index j = 0; j < block; ++j) Y.col(j) = solve_on_complement(MX.col(j));

        Eigen::MatrixXd A = Y.transpose() * (pencil.stiffness * Y);
        Eigen::MatrixXd B = Y.transpose() * (pencil.mass * Y);
        A = 0.5 * (A + A.transpose()).eval();
        B = 0.5 * (B + B.transpose()).eval();
        const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ritz(A, B);
        if (ritz.info() != Eigen::Success) throw NumericalError("Rayleigh-Ritz step failed");
        X = Y * ritz.eigenvectors();

        const double theta = ritz.eigenvalues()(0);
        const Eigen::VectorXd f = X.col(0);
        const Eigen::VectorXd mf = pencil.mass * f;
        const double res = (pencil.stiffness * f - theta * mf).norm() / (std::abs(theta) * mf.norm());

        out.iterations = it;
        out.residual = res;
        if (res <= options.tolerance) {
            out.lambda1 = theta;
            out.eigenfunction = f / std::sqrt(f.dot(mf));
            out.ritz_values = ritz.eigenvalues();
            out.multiplicity = 0;
            for (Eigen::Index j = 0; j < block; ++j) {
                if (std::abs(out.ritz_values(j) - theta) <= 10.0 * options.tolerance * theta) ++out.multiplicity;
            }
            if (!(theta > 0)) throw NumericalError("first nonzero eigenvalue is not positive");
            return out;
        }
    }
    throw NumericalError("eigensolver did not converge after " + std::to_string(options.max_iterations) +
                         " iterations (residual " + std::to_string(out.residual) + ")");
}

Eigen::MatrixXd apply_discrete_laplacian(const FEMPencil& pencil, const Eigen::MatrixXd& values) {
    if (values.rows() != pencil.vertex_count()) throw UsageError("laplacian: field size does not match mesh");
    Eigen::MatrixXd out = -(pencil.stiffness * values);
    out.array().colwise() /= pencil.lumped_mass.array();
    return out;
}

Eigen::VectorXd gradient_inner_per_element(const FEMPencil& pencil, const Eigen::VectorXd& f,
                                           const Eigen::VectorXd& g) {
    if (f.size() != pencil.vertex_count() || g.size() != pencil.vertex_count()) {
        throw UsageError("gradient: field size does not match mesh");
    }
    const int n = pencil.n;
    Eigen::VectorXd out(pencil.element_count());
    Eigen::VectorXd df(n), dg(n);
    for (Eigen::Index e = 0; e < pencil.element_count(); ++e) {
        const int v0 = pencil.simplices(0, e);
        for (int k = 0; k < n; ++k) {
            df(k) = f(pencil.simplices(k + 1, e)) - f(v0);
            dg(k) = g(pencil.simplices(k + 1, e)) - g(v0);
        }
        out(e) = df.dot(pencil.element_gram_inverse[static_cast<std::size_t>(e)] * dg);
    }
    return out;
}

Eigen::VectorXd gradient_squared_per_element(const FEMPencil& pencil, const Eigen::VectorXd& values) {
    return gradient_inner_per_element(pencil, values, values);
}

}  // namespace spacelike
