#pragma once

#include "polyvem/mesh.hpp"

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

namespace polyvem {

// Corner-point grid description (GRDECL subset).  Depths increase downward;
// build_cornerpoint maps depth d to the coordinate z = -d so that +z points
// up everywhere in the artifact.
struct CornerPointSpec {
    int nx = 0, ny = 0, nz = 0;
    std::vector<double> coord;   // 6 per pillar, (nx+1)(ny+1) pillars
    std::vector<double> zcorn;   // 8 nx ny nz corner depths
    std::vector<int> actnum;     // nx ny nz, empty means all active

    int num_cells() const { return nx * ny * nz; }
    bool active(int i, int j, int k) const
    {
        if (actnum.empty())
            return true;
        return actnum[i + nx * (j + ny * k)] != 0;
    }
    /// Corner depth of cell (i,j,k); ci/cj/ck in {0,1}, ck=0 is the top.
    double corner_depth(int i, int j, int k, int ci, int cj, int ck) const
    {
        const int ii = 2 * i + ci, jj = 2 * j + cj, kk = 2 * k + ck;
        return zcorn[ii + 2 * nx * (jj + std::size_t(2) * ny * kk)];
    }
    double& corner_depth(int i, int j, int k, int ci, int cj, int ck)
    {
        const int ii = 2 * i + ci, jj = 2 * j + cj, kk = 2 * k + ck;
        return zcorn[ii + 2 * nx * (jj + std::size_t(2) * ny * kk)];
    }
};

/// Parse the GRDECL subset: SPECGRID/DIMENS, COORD, ZCORN, ACTNUM.
/// Keywords end with '/'; "N*value" repeat tokens expand; comment lines
/// start with "--"; other keywords are skipped (reported in *skipped).
/// Throws on wrong item counts, unterminated keywords and malformed repeats.
CornerPointSpec parse_grdecl(const std::string& text,
                             std::vector<std::string>* skipped = nullptr);

/// Read and parse a GRDECL file.
CornerPointSpec read_grdecl_file(const std::string& path,
                                 std::vector<std::string>* skipped = nullptr);

/// Build the polyhedral mesh of a corner-point grid.  Nodes on a pillar
/// merge when their depths agree to 1e-9 x model diameter; mismatching
/// depths across a pillar pair leave the two side quadrilaterals unmatched
/// (fault faces become boundary faces).  Cells pinched to zero thickness on
/// all four pillars are dropped.  Throws on zcorn inversion.
PolyMesh build_cornerpoint(const CornerPointSpec& spec);

/// Regular Cartesian grid (2D or 3D per counts.size()) with every node
/// displaced by amplitude * prod_k sin(pi x_k / L_k) in each coordinate.
/// The field vanishes on the boundary, so boundary nodes stay put.
/// Throws if a cell inverts.
PolyMesh twisted_cartesian(const std::vector<int>& counts,
                           const std::vector<double>& lengths,
                           double twist_amplitude);

using EdgeFilter = std::function<bool(const PolyMesh&, int face)>;

/// Filter selecting 2D edges whose unit normal projects on `axis` by more
/// than `threshold` in absolute value (axis 1 selects "horizontal" edges).
EdgeFilter direction_edge_filter(int axis, double threshold = 0.5);

/// Split every selected edge of a 2D mesh at its midpoint; cells become
/// polygons with additional nodes.
PolyMesh insert_edge_midnodes(const PolyMesh& mesh, const EdgeFilter& filter);

/// Replace every non-triangular 3D face by its fan of triangles about the
/// node-average point (one new node per such face).  The resulting faces are
/// planar and the per-cell boundary area is preserved.
PolyMesh triangulate_faces(const PolyMesh& mesh);

/// Mirror the mesh in its vertical mid-plane (last coordinate); faces are
/// re-oriented so volumes stay positive.
PolyMesh flip_vertical(const PolyMesh& mesh);

/// Scale coordinates per axis; factors must be positive.
PolyMesh scale_mesh(const PolyMesh& mesh, const Eigen::VectorXd& factors);

/// Surround a corner-point model with `margin` rings/layers of cells so the
/// hull becomes a rectangular prism: lateral columns replicate the nearest
/// boundary column, extra top/bottom layers fill up to the flat global
/// top/bottom depth (pinching to zero thickness where the model already
/// touches them).
CornerPointSpec pad_embed(const CornerPointSpec& spec, int margin);

// Synthetic reservoir-style grid: layered corner-point model with smoothly
// tilted interior pillars and wavy interior horizons (curved faces), flat
// top and bottom.  erosion > 0 clamps interior horizons against a dome
// surface, pinching interior layers to zero thickness.
struct LayeredGridOptions {
    int nx = 4, ny = 4, nz = 4;
    double lx = 1.0, ly = 1.0, lz = 1.0;
    double pillar_tilt = 0.0;   // lateral offset amplitude (m)
    double horizon_wave = 0.0;  // interior horizon amplitude (m)
    double erosion = 0.0;       // dome height as a fraction of lz
};

CornerPointSpec layered_cornerpoint(const LayeredGridOptions& opt);

} // namespace polyvem
