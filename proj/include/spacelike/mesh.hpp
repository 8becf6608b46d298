#pragma once

// Simplicial meshes of the parameter spheres S^1 and S^2. Vertices are stored
// chart-free as unit vectors in R^{n+1}.

#include <iosfwd>
#include <string>

#include <Eigen/Core>

namespace spacelike {

struct ParamMesh {
    int n = 0;                  ///< intrinsic dimension, 1 or 2
    Eigen::MatrixXd vertices;   ///< (n+1) x V
    Eigen::MatrixXi simplices;  ///< (n+1) x E vertex indices
    int level = 0;

    Eigen::Index vertex_count() const { return vertices.cols(); }
    Eigen::Index simplex_count() const { return simplices.cols(); }
};

/// Uniform cyclic polyline with `segments` vertices on the unit circle.
ParamMesh build_circle_mesh(int segments);
/// Icosahedron subdivided `level` times and projected to S^2: 10 * 4^level + 2 vertices.
ParamMesh build_icosphere_mesh(int level);
/// Level-indexed sphere mesh: icosphere for n = 2, 16 * 2^level segments for n = 1.
ParamMesh build_sphere_mesh(int n, int level);

/// V - E + F for n = 2, V - E for n = 1.
int euler_characteristic(const ParamMesh& mesh);
/// Throws NumericalError on degenerate simplices or open/non-manifold facets.
void validate_closed(const ParamMesh& mesh);

/// ASCII format:
///   n
///   V
///   V lines of n+1 coordinates
///   E
///   E lines of n+1 vertex indices
void write_mesh(std::ostream& out, const ParamMesh& mesh);
ParamMesh read_mesh(std::istream& in);

}  // namespace spacelike
