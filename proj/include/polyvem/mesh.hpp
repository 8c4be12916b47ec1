#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

namespace polyvem {

// Polyhedral (3D) / polygonal (2D) mesh.  In 2D a "face" is an edge of two
// nodes, so the same structure and assembly kernels serve both dimensions.
//
// Faces are stored once, with a node order that defines the stored normal
// (counter-clockwise seen from the normal side; in 2D the edge a->b has
// normal (b-a) rotated -90 degrees).  A cell lists its faces together with
// an orientation sign: +1 if the stored normal is outward for that cell,
// -1 if inward.  face_neighbors[f] = (cell_minus, cell_plus) with the
// stored normal pointing from cell_minus into cell_plus; cell_plus is -1
// on the boundary.

struct CellFace {
    int face;
    int sign; // +1 stored normal outward for this cell, -1 inward
};

struct PolyMesh {
    int dim = 3;
    Eigen::MatrixXd coords;                          // dim x n_nodes
    std::vector<std::vector<int>> faces;             // node indices per face
    std::vector<std::vector<CellFace>> cells;        // signed face references
    std::vector<std::pair<int, int>> face_neighbors; // (cell_minus, cell_plus)

    int num_nodes() const { return static_cast<int>(coords.cols()); }
    int num_faces() const { return static_cast<int>(faces.size()); }
    int num_cells() const { return static_cast<int>(cells.size()); }

    bool is_boundary_face(int f) const { return face_neighbors[f].second < 0; }

    /// Unique node indices of a cell.  In 2D the nodes come in
    /// counter-clockwise perimeter order; in 3D in ascending index order.
    std::vector<int> cell_nodes(int c) const;

    /// Bounding box (dim x 2 matrix: min column, max column).
    Eigen::MatrixXd bounding_box() const;
};

/// Build and validate a mesh.  Derives face_neighbors from the signed cell
/// face lists.  Fails (std::runtime_error) on dangling indices, faces shared
/// by more than two cells, inconsistent orientation signs, empty cells,
/// duplicate nodes within a face or nodes not referenced by any face.
/// Boundary faces listed with sign -1 are re-oriented in storage so that
/// cell_minus always exists (both orientations describe the same boundary
/// face).
PolyMesh build_mesh(const Eigen::MatrixXd& node_coords,
                    std::vector<std::vector<int>> faces,
                    std::vector<std::vector<CellFace>> cells);

// Exact geometric quantities used by the VEM assembly.
//
// 3D faces may be non-planar: area, unit normal and centroid then come from
// the triangle fan about the node-average point (scalar area sum, normalized
// vector-sum normal, area-weighted centroid).  Cell volumes are signed
// tetrahedra from the mean of the cell's face centroids; one consistent
// convention among several for curved faces.
struct GeometryCache {
    // per face
    std::vector<double> face_area;             // |f|, m^(d-1)
    Eigen::MatrixXd face_normal;               // dim x n_faces, unit, stored orientation
    Eigen::MatrixXd face_centroid;             // dim x n_faces
    Eigen::MatrixXd face_node_average;         // dim x n_faces

    // per cell
    std::vector<double> cell_volume;           // |E|, m^d
    Eigen::MatrixXd cell_centroid;             // dim x n_cells
    Eigen::MatrixXd cell_node_average;         // x_bar_E, dim x n_cells
    std::vector<int> cell_node_count;
    std::vector<double> cell_diameter;         // max pairwise node distance

    // closedness residual |sum_f sign |f| n_f| per cell; zero for meshes
    // with planar faces, O(curvature) otherwise
    std::vector<double> cell_closedness;

    double total_volume() const;
};

/// Compute all geometric quantities.  Throws "inverted cell" (with the cell
/// index) if a signed volume comes out non-positive.
GeometryCache compute_geometry(const PolyMesh& mesh);

/// Integral of the virtual basis function of `node` over `face`:
/// |f|/2 in 2D; in 3D |f|/m + (n_{e,i-}+n_{e,i+}) . (x^f - xbar^f) / 2,
/// where n_{e,i+-} are the in-plane outward normals of the two edges of the
/// face adjacent to the node, scaled by edge length.  This choice makes the
/// node integrals of any planar polygon sum exactly to |f|.
/// Throws if the node is not on the face.
double face_node_integral(const PolyMesh& mesh, const GeometryCache& geom,
                          int face, int node);

/// Node integrals for every node of a face, in face node order.
std::vector<double> face_node_integrals(const PolyMesh& mesh,
                                        const GeometryCache& geom, int face);

} // namespace polyvem
