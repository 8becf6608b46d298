#pragma once

// P1 finite elements for the Laplace-Beltrami operator of the metric induced
// by a spacelike immersion. Element metrics come from Lorentz inner products of
// immersed edge chords.

#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "spacelike/immersion.hpp"
#include "spacelike/mesh.hpp"

namespace spacelike {

using SparseMatrix = Eigen::SparseMatrix<double>;

struct FEMPencil {
    int n = 0;
    int m = 0;
    SparseMatrix stiffness;
    SparseMatrix mass;                  ///< consistent
    Eigen::VectorXd lumped_mass;        ///< row sums of `mass`
    Eigen::MatrixXd positions;          ///< V x m, psi at the vertices
    Eigen::MatrixXi simplices;          ///< copy of the mesh connectivity
    Eigen::VectorXd element_volume;
    std::vector<Eigen::MatrixXd> element_gram_inverse;  ///< n x n per element

    Eigen::Index vertex_count() const { return lumped_mass.size(); }
    Eigen::Index element_count() const { return element_volume.size(); }
    double volume() const { return lumped_mass.sum(); }
};

/// Throws NumericalError naming the first element whose chord Gram matrix is not SPD.
FEMPencil assemble_pencil(const ParamMesh& mesh, const Immersion& imm);

struct SolverOptions {
    double tolerance = 1e-8;     ///< relative residual ||K f - lambda M f|| / (lambda ||M f||)
    int max_iterations = 10000;
    int block_size = 8;
    std::uint64_t seed = 1;
};

struct Spectrum {
    double lambda1 = 0.0;
    Eigen::VectorXd eigenfunction;     ///< M-normalized, M-orthogonal to constants
    int iterations = 0;
    double residual = 0.0;             ///< relative, as in SolverOptions::tolerance
    int multiplicity = 1;              ///< Ritz values within 10 * tolerance of lambda1
    Eigen::VectorXd ritz_values;       ///< leading Ritz values at exit
};

/// Smallest nonzero generalized eigenpair of (K, M). Constants are deflated
/// exactly: every iterate is projected M-orthogonally against 1 and the singular
/// stiffness is inverted on that complement by pinning one vertex.
Spectrum solve_lambda1(const FEMPencil& pencil, const SolverOptions& options = {});

/// Delta_h f = -(lumped M)^{-1} K f, so that Delta_h psi approximates n H.
/// `values` is V x k; applied column by column.
Eigen::MatrixXd apply_discrete_laplacian(const FEMPencil& pencil, const Eigen::MatrixXd& values);

/// |grad f|^2 of the P1 interpolant on each element under the element metric.
Eigen::VectorXd gradient_squared_per_element(const FEMPencil& pencil, const Eigen::VectorXd& values);

/// <grad f, grad g> per element.
Eigen::VectorXd gradient_inner_per_element(const FEMPencil& pencil, const Eigen::VectorXd& f,
                                           const Eigen::VectorXd& g);

}  // namespace spacelike
