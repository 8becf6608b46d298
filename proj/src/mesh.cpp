#include "spacelike/mesh.hpp"

#include <array>
#include <cmath>
#include <iomanip>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <utility>
#include <vector>

#include "spacelike/errors.hpp"

namespace spacelike {

ParamMesh build_circle_mesh(int segments) {
    if (segments < 3) throw UsageError("circle mesh needs at least 3 segments");
    ParamMesh mesh;
    mesh.n = 1;
    mesh.vertices.resize(2, segments);
    mesh.simplices.resize(2, segments);
    for (int k = 0; k < segments; ++k) {
        const double theta = 2.0 * std::numbers::pi * k / segments;
        mesh.vertices(0, k) = std::cos(theta);
        mesh.vertices(1, k) = std::sin(theta);
        mesh.simplices(0, k) = k;
        mesh.simplices(1, k) = (k + 1) % segments;
    }
    return mesh;
}

ParamMesh build_icosphere_mesh(int level) {
    if (level < 0) throw UsageError("icosphere level must be non-negative");
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Eigen::Vector3d> verts = {
        {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
        {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
        {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1},
    };
    for (auto& v : verts) v.normalize();
    std::vector<std::array<int, 3>> faces = {
        {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
        {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
        {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1},
    };

    for (int l = 0; l < level; ++l) {
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int a, int b) {
            const auto key = std::minmax(a, b);
            const auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            verts.push_back((verts[static_cast<std::size_t>(a)] + verts[static_cast<std::size_t>(b)]).normalized());
            const int idx = static_cast<int>(verts.size()) - 1;
            midpoint.emplace(key, idx);
            return idx;
        };
        std::vector<std::array<int, 3>> next;
        next.reserve(faces.size() * 4);
        for (const auto& f : faces) {
            const int ab = mid(f[0], f[1]);
            const int bc = mid(f[1], f[2]);
            const int ca = mid(f[2], f[0]);
            next.push_back({f[0], ab, ca});
            next.push_back({f[1], bc, ab});
            next.push_back({f[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        faces = std::move(next);
    }

    ParamMesh mesh;
    mesh.n = 2;
    mesh.level = level;
    mesh.vertices.resize(3, static_cast<Eigen::Index>(verts.size()));
    for (std::size_t i = 0; i < verts.size(); ++i) mesh.vertices.col(static_cast<Eigen::Index>(i)) = verts[i];
    mesh.simplices.resize(3, static_cast<Eigen::Index>(faces.size()));
    for (std::size_t f = 0; f < faces.size(); ++f) {
        for (int c = 0; c < 3; ++c) mesh.simplices(c, static_cast<Eigen::Index>(f)) = faces[f][static_cast<std::size_t>(c)];
    }
    return mesh;
}

ParamMesh build_sphere_mesh(int n, int level) {
    if (level < 0) throw UsageError("mesh level must be non-negative");
    if (n == 1) {
        ParamMesh mesh = build_circle_mesh(16 << level);
        mesh.level = level;
        return mesh;
    }
    if (n == 2) return build_icosphere_mesh(level);
    throw UsageError("only n = 1 and n = 2 parameter spheres are meshed");
}

int euler_characteristic(const ParamMesh& mesh) {
    const auto V = static_cast<int>(mesh.vertex_count());
    const auto F = static_cast<int>(mesh.simplex_count());
    if (mesh.n == 1) return V - F;
    std::map<std::pair<int, int>, int> edges;
    for (Eigen::Index f = 0; f < mesh.simplex_count(); ++f) {
        for (int c = 0; c < 3; ++c) {
            edges[std::minmax(mesh.simplices(c, f), mesh.simplices((c + 1) % 3, f))]++;
        }
    }
    return V - static_cast<int>(edges.size()) + F;
}

void validate_closed(const ParamMesh& mesh) {
    const Eigen::Index V = mesh.vertex_count();
    if (mesh.vertices.rows() != mesh.n + 1 || mesh.simplices.rows() != mesh.n + 1) {
        throw UsageError("mesh arrays do not match the intrinsic dimension");
    }
    for (Eigen::Index f = 0; f < mesh.simplex_count(); ++f) {
        for (int c = 0; c <= mesh.n; ++c) {
            const int v = mesh.simplices(c, f);
            if (v < 0 || v >= V) throw UsageError("simplex " + std::to_string(f) + " has an invalid vertex index");
            for (int c2 = c + 1; c2 <= mesh.n; ++c2) {
                if (mesh.simplices(c2, f) == v) throw NumericalError("simplex " + std::to_string(f) + " is degenerate");
            }
        }
    }
    if (mesh.n == 1) {
        std::vector<int> degree(static_cast<std::size_t>(V), 0);
        for (Eigen::Index f = 0; f < mesh.simplex_count(); ++f) {
            degree[static_cast<std::size_t>(mesh.simplices(0, f))]++;
            degree[static_cast<std::size_t>(mesh.simplices(1, f))]++;
        }
        for (int d : degree) {
            if (d != 2) throw NumericalError("polyline is not closed: vertex degree " + std::to_string(d));
        }
        return;
    }
    std::map<std::pair<int, int>, int> edges;
    for (Eigen::Index f = 0; f < mesh.simplex_count(); ++f) {
        for (int c = 0; c < 3; ++c) {
            edges[std::minmax(mesh.simplices(c, f), mesh.simplices((c + 1) % 3, f))]++;
        }
    }
    for (const auto& [edge, count] : edges) {
        if (count != 2) {
            throw NumericalError("edge (" + std::to_string(edge.first) + "," + std::to_string(edge.second) +
                                 ") is shared by " + std::to_string(count) + " triangles");
        }
    }
}

void write_mesh(std::ostream& out, const ParamMesh& mesh) {
    out << mesh.n << '\n' << mesh.vertex_count() << '\n' << std::setprecision(17);
    for (Eigen::Index v = 0; v < mesh.vertex_count(); ++v) {
        for (int c = 0; c <= mesh.n; ++c) out << (c ? " " : "") << mesh.vertices(c, v);
        out << '\n';
    }
    out << mesh.simplex_count() << '\n';
    for (Eigen::Index f = 0; f < mesh.simplex_count(); ++f) {
        for (int c = 0; c <= mesh.n; ++c) out << (c ? " " : "") << mesh.simplices(c, f);
        out << '\n';
    }
}

ParamMesh read_mesh(std::istream& in) {
    ParamMesh mesh;
    Eigen::Index V = 0;
    Eigen::Index E = 0;
    if (!(in >> mesh.n >> V) || mesh.n < 1 || mesh.n > 2 || V < 0) throw UsageError("mesh file: bad header");
    mesh.vertices.resize(mesh.n + 1, V);
    for (Eigen::Index v = 0; v < V; ++v) {
        for (int c = 0; c <= mesh.n; ++c) {
            if (!(in >> mesh.vertices(c, v))) throw UsageError("mesh file: truncated vertex block");
        }
    }
    if (!(in >> E) || E < 0) throw UsageError("mesh file: bad simplex count");
    mesh.simplices.resize(mesh.n + 1, E);
    for (Eigen::Index f = 0; f < E; ++f) {
        for (int c = 0; c <= mesh.n; ++c) {
            if (!(in >> mesh.simplices(c, f))) throw UsageError("mesh file: truncated simplex block");
        }
    }
    return mesh;
}

}  // namespace spacelike
