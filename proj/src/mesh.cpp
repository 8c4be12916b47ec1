#include "polyvem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <string>

namespace polyvem {

namespace {

std::string cell_tag(int c) { return " (cell " + std::to_string(c) + ")"; }

// 2D edge normal: edge direction rotated -90 deg, so a counter-clockwise
// polygon traversal yields outward normals.
Eigen::Vector2d edge_normal(const Eigen::Vector2d& a, const Eigen::Vector2d& b)
{
    const Eigen::Vector2d d = b - a;
    return Eigen::Vector2d(d.y(), -d.x());
}

struct FaceGeom {
    double area;
    Eigen::Vector3d normal;
    Eigen::Vector3d centroid;
};

// Fan triangulation about the node-average point.  Scalar area is the sum
// of triangle areas; the normal is the normalized vector sum; the centroid
// is area-weighted.  Exact for planar faces.
FaceGeom fan_face_geometry(const Eigen::MatrixXd& coords, const std::vector<int>& nodes)
{
    const int m = static_cast<int>(nodes.size());
    Eigen::Vector3d xbar = Eigen::Vector3d::Zero();
    for (int i : nodes)
        xbar += coords.col(i);
    xbar /= m;

    double area = 0.0;
    Eigen::Vector3d vec_area = Eigen::Vector3d::Zero();
    Eigen::Vector3d weighted_centroid = Eigen::Vector3d::Zero();
    for (int j = 0; j < m; ++j) {
        const Eigen::Vector3d a = coords.col(nodes[j]);
        const Eigen::Vector3d b = coords.col(nodes[(j + 1) % m]);
        const Eigen::Vector3d tn = 0.5 * (a - xbar).cross(b - xbar);
        const double ta = tn.norm();
        area += ta;
        vec_area += tn;
        weighted_centroid += ta * (xbar + a + b) / 3.0;
    }

    FaceGeom g;
    g.area = area;
    g.normal = vec_area.norm() > 0 ? Eigen::Vector3d(vec_area / vec_area.norm())
                                   : Eigen::Vector3d::Zero();
    g.centroid = area > 0 ? Eigen::Vector3d(weighted_centroid / area) : xbar;
    return g;
}

} // namespace

std::vector<int> PolyMesh::cell_nodes(int c) const
{
    if (dim == 2) {
        // Rebuild the counter-clockwise perimeter from the edge set.  Each
        // edge, oriented by its sign, runs along the CCW traversal.
        std::map<int, int> next;
        for (const CellFace& cf : cells[c]) {
            const std::vector<int>& e = faces[cf.face];
            if (cf.sign > 0)
                next[e[0]] = e[1];
            else
                next[e[1]] = e[0];
        }
        std::vector<int> loop;
        loop.reserve(next.size());
        int start = next.begin()->first;
        int cur = start;
        do {
            loop.push_back(cur);
            auto it = next.find(cur);
            if (it == next.end())
                throw std::runtime_error("cell_nodes: open edge loop" + cell_tag(c));
            cur = it->second;
        } while (cur != start && loop.size() <= next.size());
        if (cur != start || loop.size() != next.size())
            throw std::runtime_error("cell_nodes: edge loop does not close" + cell_tag(c));
        return loop;
    }

    std::set<int> uniq;
    for (const CellFace& cf : cells[c])
        uniq.insert(faces[cf.face].begin(), faces[cf.face].end());
    return std::vector<int>(uniq.begin(), uniq.end());
}

Eigen::MatrixXd PolyMesh::bounding_box() const
{
    Eigen::MatrixXd box(dim, 2);
    box.col(0) = coords.rowwise().minCoeff();
    box.col(1) = coords.rowwise().maxCoeff();
    return box;
}

PolyMesh build_mesh(const Eigen::MatrixXd& node_coords,
                    std::vector<std::vector<int>> faces,
                    std::vector<std::vector<CellFace>> cells)
{
    PolyMesh mesh;
    mesh.dim = static_cast<int>(node_coords.rows());
    if (mesh.dim != 2 && mesh.dim != 3)
        throw std::runtime_error("build_mesh: dimension must be 2 or 3");
    mesh.coords = node_coords;
    mesh.faces = std::move(faces);
    mesh.cells = std::move(cells);

    const int n_nodes = mesh.num_nodes();
    const int n_faces = mesh.num_faces();

    std::vector<char> node_used(n_nodes, 0);
    for (int f = 0; f < n_faces; ++f) {
        const auto& fn = mesh.faces[f];
        const size_t min_nodes = mesh.dim == 2 ? 2 : 3;
        if (fn.size() < min_nodes)
            throw std::runtime_error("build_mesh: face " + std::to_string(f) + " has too few nodes");
        if (mesh.dim == 2 && fn.size() != 2)
            throw std::runtime_error("build_mesh: 2D face " + std::to_string(f) + " must have 2 nodes");
        std::set<int> uniq(fn.begin(), fn.end());
        if (uniq.size() != fn.size())
            throw std::runtime_error("build_mesh: duplicate node in face " + std::to_string(f));
        for (int n : fn) {
            if (n < 0 || n >= n_nodes)
                throw std::runtime_error("build_mesh: dangling node index in face " + std::to_string(f));
            node_used[n] = 1;
        }
    }
    for (int n = 0; n < n_nodes; ++n)
        if (!node_used[n])
            throw std::runtime_error("build_mesh: node " + std::to_string(n) + " not referenced by any face");

    mesh.face_neighbors.assign(n_faces, {-1, -1});
    std::vector<int> use_count(n_faces, 0);
    for (int c = 0; c < mesh.num_cells(); ++c) {
        if (mesh.cells[c].empty())
            throw std::runtime_error("build_mesh: empty cell" + cell_tag(c));
        for (const CellFace& cf : mesh.cells[c]) {
            if (cf.face < 0 || cf.face >= n_faces)
                throw std::runtime_error("build_mesh: dangling face index" + cell_tag(c));
            if (cf.sign != 1 && cf.sign != -1)
                throw std::runtime_error("build_mesh: orientation sign must be +-1" + cell_tag(c));
            if (++use_count[cf.face] > 2)
                throw std::runtime_error("build_mesh: non-manifold face " + std::to_string(cf.face));
            auto& nb = mesh.face_neighbors[cf.face];
            int& slot = cf.sign > 0 ? nb.first : nb.second;
            if (slot >= 0)
                throw std::runtime_error("build_mesh: inconsistent orientation of face "
                                         + std::to_string(cf.face));
            slot = c;
        }
    }
    for (int f = 0; f < n_faces; ++f) {
        if (use_count[f] == 0)
            throw std::runtime_error("build_mesh: face " + std::to_string(f) + " belongs to no cell");
        auto& nb = mesh.face_neighbors[f];
        if (nb.first < 0) {
            // boundary face stored with inward normal; flip storage so that
            // cell_minus exists
            std::reverse(mesh.faces[f].begin(), mesh.faces[f].end());
            for (auto& cfs : mesh.cells)
                for (auto& cf : cfs)
                    if (cf.face == f)
                        cf.sign = -cf.sign;
            std::swap(nb.first, nb.second);
        }
    }
    return mesh;
}

GeometryCache compute_geometry(const PolyMesh& mesh)
{
    const int d = mesh.dim;
    const int n_faces = mesh.num_faces();
    const int n_cells = mesh.num_cells();

    GeometryCache g;
    g.face_area.resize(n_faces);
    g.face_normal.resize(d, n_faces);
    g.face_centroid.resize(d, n_faces);
    g.face_node_average.resize(d, n_faces);

    for (int f = 0; f < n_faces; ++f) {
        const auto& fn = mesh.faces[f];
        Eigen::VectorXd xbar = Eigen::VectorXd::Zero(d);
        for (int n : fn)
            xbar += mesh.coords.col(n);
        xbar /= static_cast<double>(fn.size());
        g.face_node_average.col(f) = xbar;

        if (d == 2) {
            const Eigen::Vector2d a = mesh.coords.col(fn[0]);
            const Eigen::Vector2d b = mesh.coords.col(fn[1]);
            const Eigen::Vector2d sn = edge_normal(a, b);
            const double len = sn.norm();
            if (!(len > 0))
                throw std::runtime_error("compute_geometry: zero-length face " + std::to_string(f));
            g.face_area[f] = len;
            g.face_normal.col(f) = sn / len;
            g.face_centroid.col(f) = 0.5 * (a + b);
        } else {
            const FaceGeom fg = fan_face_geometry(mesh.coords, fn);
            if (!(fg.area > 0))
                throw std::runtime_error("compute_geometry: zero-area face " + std::to_string(f));
            g.face_area[f] = fg.area;
            g.face_normal.col(f) = fg.normal;
            g.face_centroid.col(f) = fg.centroid;
        }
    }

    g.cell_volume.resize(n_cells);
    g.cell_centroid.resize(d, n_cells);
    g.cell_node_average.resize(d, n_cells);
    g.cell_node_count.resize(n_cells);
    g.cell_diameter.resize(n_cells);
    g.cell_closedness.resize(n_cells);

    for (int c = 0; c < n_cells; ++c) {
        const std::vector<int> nodes = mesh.cell_nodes(c);
        g.cell_node_count[c] = static_cast<int>(nodes.size());
        Eigen::VectorXd xbar = Eigen::VectorXd::Zero(d);
        for (int n : nodes)
            xbar += mesh.coords.col(n);
        xbar /= static_cast<double>(nodes.size());
        g.cell_node_average.col(c) = xbar;

        double diam = 0.0;
        for (size_t i = 0; i < nodes.size(); ++i)
            for (size_t j = i + 1; j < nodes.size(); ++j)
                diam = std::max(diam, (mesh.coords.col(nodes[i]) - mesh.coords.col(nodes[j])).norm());
        g.cell_diameter[c] = diam;

        Eigen::VectorXd closed = Eigen::VectorXd::Zero(d);
        for (const CellFace& cf : mesh.cells[c])
            closed += cf.sign * g.face_area[cf.face] * g.face_normal.col(cf.face);
        g.cell_closedness[c] = closed.norm();

        if (d == 2) {
            // signed triangle fan from the mean of edge midpoints
            Eigen::Vector2d apex = Eigen::Vector2d::Zero();
            for (const CellFace& cf : mesh.cells[c])
                apex += g.face_centroid.col(cf.face).head<2>();
            apex /= static_cast<double>(mesh.cells[c].size());

            double vol = 0.0;
            Eigen::Vector2d weighted = Eigen::Vector2d::Zero();
            for (const CellFace& cf : mesh.cells[c]) {
                const auto& e = mesh.faces[cf.face];
                Eigen::Vector2d a = mesh.coords.col(e[0]);
                Eigen::Vector2d b = mesh.coords.col(e[1]);
                if (cf.sign < 0)
                    std::swap(a, b);
                const double ta = 0.5 * ((a.x() - apex.x()) * (b.y() - apex.y())
                                         - (b.x() - apex.x()) * (a.y() - apex.y()));
                vol += ta;
                weighted += ta * (apex + a + b) / 3.0;
            }
            if (!(vol > 0))
                throw std::runtime_error("inverted cell" + cell_tag(c));
            g.cell_volume[c] = vol;
            g.cell_centroid.col(c) = weighted / vol;
        } else {
            // signed tetrahedra from the mean of face centroids
            Eigen::Vector3d apex = Eigen::Vector3d::Zero();
            for (const CellFace& cf : mesh.cells[c])
                apex += g.face_centroid.col(cf.face).head<3>();
            apex /= static_cast<double>(mesh.cells[c].size());

            double vol = 0.0;
            Eigen::Vector3d weighted = Eigen::Vector3d::Zero();
            for (const CellFace& cf : mesh.cells[c]) {
                const auto& fn = mesh.faces[cf.face];
                const int m = static_cast<int>(fn.size());
                Eigen::Vector3d fbar = g.face_node_average.col(cf.face);
                for (int j = 0; j < m; ++j) {
                    Eigen::Vector3d a = mesh.coords.col(fn[j]);
                    Eigen::Vector3d b = mesh.coords.col(fn[(j + 1) % m]);
                    if (cf.sign < 0)
                        std::swap(a, b);
                    // tet (apex; fbar, a, b), positive when the fan triangle
                    // points outward
                    const double tv = (a - apex).cross(b - apex).dot(fbar - apex) / 6.0;
                    vol += tv;
                    weighted += tv * (apex + a + b + fbar) / 4.0;
                }
            }
            if (!(vol > 0))
                throw std::runtime_error("inverted cell" + cell_tag(c));
            g.cell_volume[c] = vol;
            g.cell_centroid.col(c) = weighted / vol;
        }
    }
    return g;
}

double GeometryCache::total_volume() const
{
    double t = 0.0;
    for (double v : cell_volume)
        t += v;
    return t;
}

std::vector<double> face_node_integrals(const PolyMesh& mesh,
                                        const GeometryCache& geom, int face)
{
    const auto& fn = mesh.faces[face];
    const int m = static_cast<int>(fn.size());
    std::vector<double> vals(m);

    if (mesh.dim == 2) {
        vals[0] = vals[1] = 0.5 * geom.face_area[face];
        return vals;
    }

    const Eigen::Vector3d nf = geom.face_normal.col(face);
    const Eigen::Vector3d shift = geom.face_centroid.col(face) - geom.face_node_average.col(face);
    for (int i = 0; i < m; ++i) {
        const Eigen::Vector3d prev = mesh.coords.col(fn[(i + m - 1) % m]);
        const Eigen::Vector3d cur = mesh.coords.col(fn[i]);
        const Eigen::Vector3d next = mesh.coords.col(fn[(i + 1) % m]);
        // in-plane outward edge normals scaled by edge length
        const Eigen::Vector3d n_minus = (cur - prev).cross(nf);
        const Eigen::Vector3d n_plus = (next - cur).cross(nf);
        vals[i] = geom.face_area[face] / m + 0.5 * (n_minus + n_plus).dot(shift);
    }
    return vals;
}

double face_node_integral(const PolyMesh& mesh, const GeometryCache& geom,
                          int face, int node)
{
    const auto& fn = mesh.faces[face];
    const auto it = std::find(fn.begin(), fn.end(), node);
    if (it == fn.end())
        throw std::invalid_argument("face_node_integral: node " + std::to_string(node)
                                    + " not on face " + std::to_string(face));
    return face_node_integrals(mesh, geom, face)[it - fn.begin()];
}

} // namespace polyvem
