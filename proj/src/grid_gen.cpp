#include "polyvem/grid_gen.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace polyvem {

namespace {

// ---------------------------------------------------------------------------
// GRDECL tokenizer
// ---------------------------------------------------------------------------

std::vector<std::string> tokenize(const std::string& text)
{
    std::vector<std::string> tokens;
    std::string cur;
    for (size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '-' && i + 1 < text.size() && text[i + 1] == '-') {
            while (i < text.size() && text[i] != '\n')
                ++i;
            if (!cur.empty()) {
                tokens.push_back(cur);
                cur.clear();
            }
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(text[i]))) {
            if (!cur.empty()) {
                tokens.push_back(cur);
                cur.clear();
            }
        } else if (text[i] == '/') {
            if (!cur.empty()) {
                tokens.push_back(cur);
                cur.clear();
            }
            tokens.push_back("/");
        } else {
            cur += text[i];
        }
    }
    if (!cur.empty())
        tokens.push_back(cur);
    return tokens;
}

bool is_keyword(const std::string& tok)
{
    if (tok.empty() || !std::isalpha(static_cast<unsigned char>(tok[0])))
        return false;
    return std::all_of(tok.begin(), tok.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_';
    });
}

double parse_real(const std::string& tok, const std::string& keyword)
{
    size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(tok, &pos);
    } catch (const std::exception&) {
        throw std::runtime_error("parse_grdecl: bad number '" + tok + "' in " + keyword);
    }
    if (pos != tok.size())
        throw std::runtime_error("parse_grdecl: bad number '" + tok + "' in " + keyword);
    return v;
}

// data tokens of one keyword up to '/', with N*value expansion
std::vector<double> read_values(const std::vector<std::string>& tokens, size_t& pos,
                                const std::string& keyword)
{
    std::vector<double> values;
    while (true) {
        if (pos >= tokens.size())
            throw std::runtime_error("parse_grdecl: unterminated keyword " + keyword);
        const std::string& tok = tokens[pos++];
        if (tok == "/")
            break;
        const size_t star = tok.find('*');
        if (star != std::string::npos) {
            const std::string count_str = tok.substr(0, star);
            const std::string value_str = tok.substr(star + 1);
            long count = 0;
            try {
                size_t cpos = 0;
                count = std::stol(count_str, &cpos);
                if (cpos != count_str.size() || count <= 0 || value_str.empty())
                    throw std::invalid_argument("");
            } catch (const std::exception&) {
                throw std::runtime_error("parse_grdecl: malformed repeat token '" + tok
                                         + "' in " + keyword);
            }
            const double v = parse_real(value_str, keyword);
            values.insert(values.end(), count, v);
        } else {
            values.push_back(parse_real(tok, keyword));
        }
    }
    return values;
}

// ---------------------------------------------------------------------------
// face bookkeeping shared by the mesh generators
// ---------------------------------------------------------------------------

struct FaceTable {
    std::map<std::vector<int>, int> index;
    std::vector<std::vector<int>> faces;

    // registers (or matches) an outward-oriented loop and appends the signed
    // reference to the cell
    void add(std::vector<int> loop, std::vector<CellFace>& cell)
    {
        // drop cyclically repeated nodes (pinched corners)
        std::vector<int> clean;
        for (int n : loop)
            if (clean.empty() || clean.back() != n)
                clean.push_back(n);
        while (clean.size() > 1 && clean.front() == clean.back())
            clean.pop_back();
        if (clean.size() < 3)
            return; // degenerate (zero-area) face

        std::vector<int> key = clean;
        std::sort(key.begin(), key.end());
        const auto it = index.find(key);
        if (it == index.end()) {
            const int id = static_cast<int>(faces.size());
            index.emplace(std::move(key), id);
            faces.push_back(std::move(clean));
            cell.push_back({id, +1});
        } else {
            cell.push_back({it->second, -1});
        }
    }
};

// six outward quads of a hexahedron; u/l are upper/lower (high/low z) node
// ids indexed by (ci,cj)
void add_hex_faces(FaceTable& table, std::vector<CellFace>& cell,
                   const std::array<std::array<int, 2>, 2>& u,
                   const std::array<std::array<int, 2>, 2>& l)
{
    table.add({u[0][0], u[1][0], u[1][1], u[0][1]}, cell); // top
    table.add({l[0][0], l[0][1], l[1][1], l[1][0]}, cell); // bottom
    table.add({l[0][0], u[0][0], u[0][1], l[0][1]}, cell); // west
    table.add({l[1][0], l[1][1], u[1][1], u[1][0]}, cell); // east
    table.add({l[0][0], l[1][0], u[1][0], u[0][0]}, cell); // south
    table.add({l[0][1], u[0][1], u[1][1], l[1][1]}, cell); // north
}

// drop nodes that no face references and renumber
PolyMesh finalize_mesh(int dim, const std::vector<Eigen::VectorXd>& coords,
                       std::vector<std::vector<int>> faces,
                       std::vector<std::vector<CellFace>> cells)
{
    std::vector<int> remap(coords.size(), -1);
    int used = 0;
    for (const auto& f : faces)
        for (int n : f)
            if (remap[n] < 0)
                remap[n] = used++;

    Eigen::MatrixXd C(dim, used);
    for (size_t n = 0; n < coords.size(); ++n)
        if (remap[n] >= 0)
            C.col(remap[n]) = coords[n];
    for (auto& f : faces)
        for (int& n : f)
            n = remap[n];

    return build_mesh(C, std::move(faces), std::move(cells));
}

} // namespace

// ---------------------------------------------------------------------------
// parser
// ---------------------------------------------------------------------------

CornerPointSpec parse_grdecl(const std::string& text, std::vector<std::string>* skipped)
{
    const std::vector<std::string> tokens = tokenize(text);
    CornerPointSpec spec;
    bool have_dims = false, have_coord = false, have_zcorn = false;
    std::vector<double> actnum_vals;
    bool have_actnum = false;

    size_t pos = 0;
    while (pos < tokens.size()) {
        const std::string keyword = tokens[pos++];
        if (!is_keyword(keyword))
            throw std::runtime_error("parse_grdecl: expected keyword, got '" + keyword + "'");

        if (keyword == "SPECGRID" || keyword == "DIMENS") {
            const std::vector<double> v = [&] {
                // SPECGRID carries trailing non-numeric items; read raw tokens
                std::vector<double> dims;
                while (true) {
                    if (pos >= tokens.size())
                        throw std::runtime_error("parse_grdecl: unterminated keyword " + keyword);
                    const std::string& tok = tokens[pos++];
                    if (tok == "/")
                        break;
                    if (dims.size() < 3)
                        dims.push_back(parse_real(tok, keyword));
                }
                return dims;
            }();
            if (v.size() < 3)
                throw std::runtime_error("parse_grdecl: " + keyword + " needs 3 dimensions");
            spec.nx = static_cast<int>(v[0]);
            spec.ny = static_cast<int>(v[1]);
            spec.nz = static_cast<int>(v[2]);
            if (spec.nx <= 0 || spec.ny <= 0 || spec.nz <= 0)
                throw std::runtime_error("parse_grdecl: non-positive grid dimensions");
            have_dims = true;
        } else if (keyword == "COORD") {
            spec.coord = read_values(tokens, pos, keyword);
            have_coord = true;
        } else if (keyword == "ZCORN") {
            spec.zcorn = read_values(tokens, pos, keyword);
            have_zcorn = true;
        } else if (keyword == "ACTNUM") {
            actnum_vals = read_values(tokens, pos, keyword);
            have_actnum = true;
        } else {
            if (skipped)
                skipped->push_back(keyword);
            while (pos < tokens.size() && tokens[pos] != "/")
                ++pos;
            if (pos >= tokens.size())
                throw std::runtime_error("parse_grdecl: unterminated keyword " + keyword);
            ++pos;
        }
    }

    if (!have_dims)
        throw std::runtime_error("parse_grdecl: missing SPECGRID/DIMENS");
    if (!have_coord)
        throw std::runtime_error("parse_grdecl: missing COORD");
    if (!have_zcorn)
        throw std::runtime_error("parse_grdecl: missing ZCORN");

    const size_t want_coord = 6u * (spec.nx + 1) * (spec.ny + 1);
    if (spec.coord.size() != want_coord)
        throw std::runtime_error("parse_grdecl: COORD count mismatch ("
                                 + std::to_string(spec.coord.size()) + " != "
                                 + std::to_string(want_coord) + ")");
    const size_t want_zcorn = 8u * spec.nx * spec.ny * spec.nz;
    if (spec.zcorn.size() != want_zcorn)
        throw std::runtime_error("parse_grdecl: ZCORN count mismatch ("
                                 + std::to_string(spec.zcorn.size()) + " != "
                                 + std::to_string(want_zcorn) + ")");
    if (have_actnum) {
        if (actnum_vals.size() != static_cast<size_t>(spec.num_cells()))
            throw std::runtime_error("parse_grdecl: ACTNUM count mismatch ("
                                     + std::to_string(actnum_vals.size()) + " != "
                                     + std::to_string(spec.num_cells()) + ")");
        spec.actnum.resize(actnum_vals.size());
        std::transform(actnum_vals.begin(), actnum_vals.end(), spec.actnum.begin(),
                       [](double v) { return v != 0.0 ? 1 : 0; });
    }
    return spec;
}

CornerPointSpec read_grdecl_file(const std::string& path, std::vector<std::string>* skipped)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("read_grdecl_file: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_grdecl(ss.str(), skipped);
}

// ---------------------------------------------------------------------------
// corner-point mesh construction
// ---------------------------------------------------------------------------

PolyMesh build_cornerpoint(const CornerPointSpec& spec)
{
    const int nx = spec.nx, ny = spec.ny, nz = spec.nz;
    if (spec.coord.size() != 6u * (nx + 1) * (ny + 1)
        || spec.zcorn.size() != 8u * nx * ny * nz)
        throw std::invalid_argument("build_cornerpoint: inconsistent spec sizes");

    // model diameter for the merge tolerance
    double lo[3] = {spec.coord[0], spec.coord[1], spec.zcorn[0]};
    double hi[3] = {spec.coord[0], spec.coord[1], spec.zcorn[0]};
    for (size_t p = 0; p < spec.coord.size() / 6; ++p) {
        for (int e = 0; e < 2; ++e) {
            for (int d = 0; d < 2; ++d) {
                const double v = spec.coord[6 * p + 3 * e + d];
                lo[d] = std::min(lo[d], v);
                hi[d] = std::max(hi[d], v);
            }
        }
    }
    for (double z : spec.zcorn) {
        lo[2] = std::min(lo[2], z);
        hi[2] = std::max(hi[2], z);
    }
    const double diam = std::hypot(hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]);
    const double tol = 1e-9 * std::max(diam, 1e-30);

    // zcorn monotonicity along every pillar
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            for (int cj = 0; cj < 2; ++cj) {
                for (int ci = 0; ci < 2; ++ci) {
                    double prev = -1e300;
                    for (int k = 0; k < nz; ++k) {
                        const double top = spec.corner_depth(i, j, k, ci, cj, 0);
                        const double bot = spec.corner_depth(i, j, k, ci, cj, 1);
                        if (bot < top - tol || top < prev - tol)
                            throw std::runtime_error(
                                "build_cornerpoint: inverted cell (zcorn inversion) at ("
                                + std::to_string(i) + "," + std::to_string(j) + ","
                                + std::to_string(k) + ")");
                        prev = bot;
                    }
                }
            }
        }
    }

    const auto kept = [&](int i, int j, int k) {
        if (!spec.active(i, j, k))
            return false;
        for (int cj = 0; cj < 2; ++cj)
            for (int ci = 0; ci < 2; ++ci)
                if (spec.corner_depth(i, j, k, ci, cj, 1)
                        - spec.corner_depth(i, j, k, ci, cj, 0) > tol)
                    return true;
        return false; // pinched to zero thickness on all pillars: erosion
    };

    // gather corner depths per pillar, then merge within tolerance
    const int n_pillars = (nx + 1) * (ny + 1);
    std::vector<std::vector<double>> pillar_depths(n_pillars);
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                if (!kept(i, j, k))
                    continue;
                for (int cj = 0; cj < 2; ++cj)
                    for (int ci = 0; ci < 2; ++ci)
                        for (int ck = 0; ck < 2; ++ck)
                            pillar_depths[(i + ci) + (nx + 1) * (j + cj)]
                                .push_back(spec.corner_depth(i, j, k, ci, cj, ck));
            }

    std::vector<Eigen::VectorXd> coords;
    std::vector<std::vector<double>> pillar_keys(n_pillars); // cluster representatives
    std::vector<std::vector<int>> pillar_node(n_pillars);
    for (int p = 0; p < n_pillars; ++p) {
        auto& depths = pillar_depths[p];
        std::sort(depths.begin(), depths.end());
        const double* c = &spec.coord[6 * p];
        for (double z : depths) {
            if (!pillar_keys[p].empty() && z - pillar_keys[p].back() <= tol)
                continue;
            pillar_keys[p].push_back(z);
            const double dz = c[5] - c[2];
            const double t = std::abs(dz) > 1e-30 ? (z - c[2]) / dz : 0.0;
            Eigen::Vector3d pt(c[0] + t * (c[3] - c[0]), c[1] + t * (c[4] - c[1]), -z);
            coords.emplace_back(pt);
            pillar_node[p].push_back(static_cast<int>(coords.size()) - 1);
        }
    }

    const auto node_at = [&](int pi, int pj, double z) {
        const int p = pi + (nx + 1) * pj;
        const auto& keys = pillar_keys[p];
        const auto it = std::lower_bound(keys.begin(), keys.end(), z - tol);
        if (it == keys.end() || std::abs(*it - z) > tol)
            throw std::logic_error("build_cornerpoint: pillar node lookup failed");
        return pillar_node[p][it - keys.begin()];
    };

    FaceTable table;
    std::vector<std::vector<CellFace>> cells;
    for (int k = 0; k < nz; ++k) {
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                if (!kept(i, j, k))
                    continue;
                // ck=0 has the smaller depth, i.e. the upper corners in z=-depth
                std::array<std::array<int, 2>, 2> u, l;
                for (int cj = 0; cj < 2; ++cj)
                    for (int ci = 0; ci < 2; ++ci) {
                        u[ci][cj] = node_at(i + ci, j + cj, spec.corner_depth(i, j, k, ci, cj, 0));
                        l[ci][cj] = node_at(i + ci, j + cj, spec.corner_depth(i, j, k, ci, cj, 1));
                    }
                std::vector<CellFace> cell;
                add_hex_faces(table, cell, u, l);
                if (cell.empty())
                    throw std::runtime_error("build_cornerpoint: cell without faces");
                cells.push_back(std::move(cell));
            }
        }
    }
    if (cells.empty())
        throw std::runtime_error("build_cornerpoint: no active cells");

    return finalize_mesh(3, coords, std::move(table.faces), std::move(cells));
}

// ---------------------------------------------------------------------------
// synthetic generators and transforms
// ---------------------------------------------------------------------------

PolyMesh twisted_cartesian(const std::vector<int>& counts,
                           const std::vector<double>& lengths,
                           double twist_amplitude)
{
    const int dim = static_cast<int>(counts.size());
    if ((dim != 2 && dim != 3) || lengths.size() != counts.size())
        throw std::invalid_argument("twisted_cartesian: need 2 or 3 counts with lengths");
    for (int c : counts)
        if (c <= 0)
            throw std::invalid_argument("twisted_cartesian: non-positive cell count");
    for (double l : lengths)
        if (!(l > 0))
            throw std::invalid_argument("twisted_cartesian: non-positive length");

    const auto displaced = [&](const Eigen::VectorXd& x) {
        double s = twist_amplitude;
        for (int d = 0; d < dim; ++d)
            s *= std::sin(M_PI * x(d) / lengths[d]);
        return Eigen::VectorXd(x.array() + s);
    };

    if (dim == 2) {
        const int nx = counts[0], ny = counts[1];
        const double hx = lengths[0] / nx, hy = lengths[1] / ny;
        const auto nid = [&](int i, int j) { return i + (nx + 1) * j; };

        std::vector<Eigen::VectorXd> coords((nx + 1) * (ny + 1));
        for (int j = 0; j <= ny; ++j)
            for (int i = 0; i <= nx; ++i)
                coords[nid(i, j)] = displaced(Eigen::Vector2d(i * hx, j * hy));

        // horizontal edges stored left-to-right, vertical ones bottom-to-top
        std::vector<std::vector<int>> faces;
        const auto hedge = [&](int i, int j) { return i + nx * j; };
        const int n_h = nx * (ny + 1);
        const auto vedge = [&](int i, int j) { return n_h + i + (nx + 1) * j; };
        for (int j = 0; j <= ny; ++j)
            for (int i = 0; i < nx; ++i)
                faces.push_back({nid(i, j), nid(i + 1, j)});
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i <= nx; ++i)
                faces.push_back({nid(i, j), nid(i, j + 1)});

        std::vector<std::vector<CellFace>> cells;
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
                // stored horizontal normal points down (outward for the cell
                // above), vertical normal points right (outward for the left
                // cell)
                cells.push_back({{hedge(i, j), +1},
                                 {vedge(i + 1, j), +1},
                                 {hedge(i, j + 1), -1},
                                 {vedge(i, j), -1}});

        Eigen::MatrixXd C(2, coords.size());
        for (size_t n = 0; n < coords.size(); ++n)
            C.col(n) = coords[n];
        PolyMesh mesh = build_mesh(C, std::move(faces), std::move(cells));
        compute_geometry(mesh); // throws on inverted cells
        return mesh;
    }

    const int nx = counts[0], ny = counts[1], nz = counts[2];
    const double hx = lengths[0] / nx, hy = lengths[1] / ny, hz = lengths[2] / nz;
    const auto nid = [&](int i, int j, int k) { return i + (nx + 1) * (j + (ny + 1) * k); };

    std::vector<Eigen::VectorXd> coords((nx + 1) * (ny + 1) * (nz + 1));
    for (int k = 0; k <= nz; ++k)
        for (int j = 0; j <= ny; ++j)
            for (int i = 0; i <= nx; ++i)
                coords[nid(i, j, k)] = displaced(Eigen::Vector3d(i * hx, j * hy, k * hz));

    FaceTable table;
    std::vector<std::vector<CellFace>> cells;
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                std::array<std::array<int, 2>, 2> u, l;
                for (int cj = 0; cj < 2; ++cj)
                    for (int ci = 0; ci < 2; ++ci) {
                        u[ci][cj] = nid(i + ci, j + cj, k + 1);
                        l[ci][cj] = nid(i + ci, j + cj, k);
                    }
                std::vector<CellFace> cell;
                add_hex_faces(table, cell, u, l);
                cells.push_back(std::move(cell));
            }

    PolyMesh mesh = finalize_mesh(3, coords, std::move(table.faces), std::move(cells));
    compute_geometry(mesh);
    return mesh;
}

EdgeFilter direction_edge_filter(int axis, double threshold)
{
    return [axis, threshold](const PolyMesh& mesh, int face) {
        const auto& fn = mesh.faces[face];
        const Eigen::Vector2d d = mesh.coords.col(fn[1]) - mesh.coords.col(fn[0]);
        const Eigen::Vector2d n(d.y(), -d.x());
        return std::abs(n(axis)) > threshold * n.norm();
    };
}

PolyMesh insert_edge_midnodes(const PolyMesh& mesh, const EdgeFilter& filter)
{
    if (mesh.dim != 2)
        throw std::invalid_argument("insert_edge_midnodes: 2D meshes only");

    std::vector<Eigen::VectorXd> coords(mesh.num_nodes());
    for (int n = 0; n < mesh.num_nodes(); ++n)
        coords[n] = mesh.coords.col(n);

    std::vector<std::vector<int>> faces;
    std::vector<std::array<int, 2>> halves(mesh.num_faces(), {-1, -1});
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const auto& fn = mesh.faces[f];
        if (filter(mesh, f)) {
            coords.emplace_back(0.5 * (mesh.coords.col(fn[0]) + mesh.coords.col(fn[1])));
            const int mid = static_cast<int>(coords.size()) - 1;
            halves[f][0] = static_cast<int>(faces.size());
            faces.push_back({fn[0], mid});
            halves[f][1] = static_cast<int>(faces.size());
            faces.push_back({mid, fn[1]});
        } else {
            halves[f][0] = static_cast<int>(faces.size());
            faces.push_back(fn);
        }
    }

    std::vector<std::vector<CellFace>> cells(mesh.num_cells());
    for (int c = 0; c < mesh.num_cells(); ++c)
        for (const CellFace& cf : mesh.cells[c]) {
            cells[c].push_back({halves[cf.face][0], cf.sign});
            if (halves[cf.face][1] >= 0)
                cells[c].push_back({halves[cf.face][1], cf.sign});
        }

    return finalize_mesh(2, coords, std::move(faces), std::move(cells));
}

PolyMesh triangulate_faces(const PolyMesh& mesh)
{
    if (mesh.dim != 3)
        throw std::invalid_argument("triangulate_faces: 3D meshes only");

    std::vector<Eigen::VectorXd> coords(mesh.num_nodes());
    for (int n = 0; n < mesh.num_nodes(); ++n)
        coords[n] = mesh.coords.col(n);

    std::vector<std::vector<int>> faces;
    std::vector<std::vector<int>> pieces(mesh.num_faces());
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const auto& fn = mesh.faces[f];
        const int m = static_cast<int>(fn.size());
        if (m == 3) {
            pieces[f].push_back(static_cast<int>(faces.size()));
            faces.push_back(fn);
            continue;
        }
        Eigen::VectorXd xbar = Eigen::VectorXd::Zero(3);
        for (int n : fn)
            xbar += mesh.coords.col(n);
        coords.emplace_back(xbar / m);
        const int center = static_cast<int>(coords.size()) - 1;
        for (int j = 0; j < m; ++j) {
            pieces[f].push_back(static_cast<int>(faces.size()));
            faces.push_back({center, fn[j], fn[(j + 1) % m]});
        }
    }

    std::vector<std::vector<CellFace>> cells(mesh.num_cells());
    for (int c = 0; c < mesh.num_cells(); ++c)
        for (const CellFace& cf : mesh.cells[c])
            for (int piece : pieces[cf.face])
                cells[c].push_back({piece, cf.sign});

    return finalize_mesh(3, coords, std::move(faces), std::move(cells));
}

PolyMesh flip_vertical(const PolyMesh& mesh)
{
    const int axis = mesh.dim - 1;
    const double lo = mesh.coords.row(axis).minCoeff();
    const double hi = mesh.coords.row(axis).maxCoeff();

    Eigen::MatrixXd C = mesh.coords;
    C.row(axis) = (lo + hi) - C.row(axis).array();

    // a reflection inverts orientations; reversing every face loop restores
    // outward normals for the same signs
    std::vector<std::vector<int>> faces = mesh.faces;
    for (auto& f : faces)
        std::reverse(f.begin(), f.end());

    PolyMesh out = build_mesh(C, std::move(faces), mesh.cells);
    compute_geometry(out);
    return out;
}

PolyMesh scale_mesh(const PolyMesh& mesh, const Eigen::VectorXd& factors)
{
    if (factors.size() != mesh.dim)
        throw std::invalid_argument("scale_mesh: one factor per axis required");
    if (factors.minCoeff() <= 0)
        throw std::invalid_argument("scale_mesh: factors must be positive");
    PolyMesh out = mesh;
    out.coords = factors.asDiagonal() * out.coords;
    return out;
}

CornerPointSpec pad_embed(const CornerPointSpec& spec, int margin)
{
    if (margin < 0)
        throw std::invalid_argument("pad_embed: negative margin");
    if (margin == 0)
        return spec;

    const int nx = spec.nx, ny = spec.ny, nz = spec.nz, m = margin;
    const double d_top = *std::min_element(spec.zcorn.begin(), spec.zcorn.end());
    const double d_bot = *std::max_element(spec.zcorn.begin(), spec.zcorn.end());

    // lateral bounding box and mean spacing from the pillar endpoints
    double xmin = spec.coord[0], xmax = spec.coord[0];
    double ymin = spec.coord[1], ymax = spec.coord[1];
    for (size_t p = 0; p < spec.coord.size() / 6; ++p)
        for (int e = 0; e < 2; ++e) {
            xmin = std::min(xmin, spec.coord[6 * p + 3 * e]);
            xmax = std::max(xmax, spec.coord[6 * p + 3 * e]);
            ymin = std::min(ymin, spec.coord[6 * p + 3 * e + 1]);
            ymax = std::max(ymax, spec.coord[6 * p + 3 * e + 1]);
        }
    const double hx = (xmax - xmin) / nx;
    const double hy = (ymax - ymin) / ny;

    CornerPointSpec out;
    out.nx = nx + 2 * m;
    out.ny = ny + 2 * m;
    out.nz = nz + 2 * m;
    out.coord.resize(6u * (out.nx + 1) * (out.ny + 1));
    out.zcorn.resize(8u * out.nx * out.ny * out.nz);
    out.actnum.assign(out.num_cells(), 1);

    for (int J = 0; J <= out.ny; ++J) {
        for (int I = 0; I <= out.nx; ++I) {
            double* c = &out.coord[6u * (I + (out.nx + 1) * J)];
            const bool in_x = I >= m && I <= m + nx;
            const bool in_y = J >= m && J <= m + ny;
            if (in_x && in_y) {
                const double* src = &spec.coord[6u * ((I - m) + (nx + 1) * (J - m))];
                // original pillar line, re-parameterized to span [d_top, d_bot]
                const double dz = src[5] - src[2];
                for (int axis = 0; axis < 2; ++axis) {
                    const double a = src[axis], b = src[3 + axis];
                    const double slope = std::abs(dz) > 1e-30 ? (b - a) / dz : 0.0;
                    c[axis] = a + slope * (d_top - src[2]);
                    c[3 + axis] = a + slope * (d_bot - src[2]);
                }
            } else {
                // vertical padding pillar on the extended lattice
                const int i_cl = std::clamp(I - m, 0, nx);
                const int j_cl = std::clamp(J - m, 0, ny);
                const double* src = &spec.coord[6u * (i_cl + (nx + 1) * j_cl)];
                double x = 0.5 * (src[0] + src[3]);
                double y = 0.5 * (src[1] + src[4]);
                if (I < m)
                    x = xmin - (m - I) * hx;
                else if (I > m + nx)
                    x = xmax + (I - m - nx) * hx;
                if (J < m)
                    y = ymin - (m - J) * hy;
                else if (J > m + ny)
                    y = ymax + (J - m - ny) * hy;
                c[0] = c[3] = x;
                c[1] = c[4] = y;
            }
            c[2] = d_top;
            c[5] = d_bot;
        }
    }

    // clamped fine-grid zcorn lookup (replicates boundary columns laterally)
    const auto zsrc = [&](int ii, int jj, int kk) {
        ii = std::clamp(ii - 2 * m, 0, 2 * nx - 1);
        jj = std::clamp(jj - 2 * m, 0, 2 * ny - 1);
        return spec.zcorn[ii + 2u * nx * (jj + std::size_t(2) * ny * kk)];
    };

    for (int K = 0; K < out.nz; ++K) {
        for (int J = 0; J < out.ny; ++J) {
            for (int I = 0; I < out.nx; ++I) {
                for (int cj = 0; cj < 2; ++cj) {
                    for (int ci = 0; ci < 2; ++ci) {
                        const int ii = 2 * I + ci, jj = 2 * J + cj;
                        double top, bot;
                        if (K < m) {
                            const double local_top = zsrc(ii, jj, 0);
                            top = d_top + (local_top - d_top) * K / m;
                            bot = d_top + (local_top - d_top) * (K + 1) / m;
                        } else if (K >= m + nz) {
                            const double local_bot = zsrc(ii, jj, 2 * nz - 1);
                            const int q = K - m - nz;
                            top = local_bot + (d_bot - local_bot) * q / m;
                            bot = local_bot + (d_bot - local_bot) * (q + 1) / m;
                        } else {
                            top = zsrc(ii, jj, 2 * (K - m));
                            bot = zsrc(ii, jj, 2 * (K - m) + 1);
                        }
                        out.corner_depth(I, J, K, ci, cj, 0) = top;
                        out.corner_depth(I, J, K, ci, cj, 1) = bot;
                    }
                }
                const bool inside = I >= m && I < m + nx && J >= m && J < m + ny
                    && K >= m && K < m + nz;
                if (inside)
                    out.actnum[I + out.nx * (J + std::size_t(out.ny) * K)] =
                        spec.active(I - m, J - m, K - m) ? 1 : 0;
            }
        }
    }
    return out;
}

CornerPointSpec layered_cornerpoint(const LayeredGridOptions& opt)
{
    const int nx = opt.nx, ny = opt.ny, nz = opt.nz;
    if (nx <= 0 || ny <= 0 || nz <= 0)
        throw std::invalid_argument("layered_cornerpoint: non-positive dimensions");
    const double hx = opt.lx / nx, hy = opt.ly / ny;

    CornerPointSpec spec;
    spec.nx = nx;
    spec.ny = ny;
    spec.nz = nz;
    spec.coord.resize(6u * (nx + 1) * (ny + 1));
    spec.zcorn.resize(8u * nx * ny * nz);

    // pillars: smooth lateral tilt vanishing on the boundary
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i <= nx; ++i) {
            const double x0 = i * hx, y0 = j * hy;
            const double s = std::sin(M_PI * x0 / opt.lx) * std::sin(M_PI * y0 / opt.ly);
            double* c = &spec.coord[6u * (i + (nx + 1) * j)];
            c[0] = x0 + opt.pillar_tilt * s;
            c[1] = y0 + 0.6 * opt.pillar_tilt * s;
            c[2] = 0.0;
            c[3] = x0 - opt.pillar_tilt * s;
            c[4] = y0 - 0.6 * opt.pillar_tilt * s;
            c[5] = opt.lz;
        }
    }

    // horizon depths per pillar; flat top (k=0) and bottom (k=nz)
    const auto horizon = [&](int i, int j, int k) {
        const double x0 = i * hx, y0 = j * hy;
        double depth = opt.lz * k / nz
            + opt.horizon_wave * std::sin(M_PI * k / static_cast<double>(nz))
                  * std::sin(2.0 * M_PI * x0 / opt.lx) * std::sin(2.0 * M_PI * y0 / opt.ly);
        if (opt.erosion > 0 && k > 0 && k < nz) {
            const double dome = std::sin(M_PI * x0 / opt.lx) * std::sin(M_PI * y0 / opt.ly);
            const double surface = opt.lz * opt.erosion * std::max(0.0, dome * dome);
            depth = std::max(depth, surface);
        }
        return depth;
    };

    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
                for (int cj = 0; cj < 2; ++cj)
                    for (int ci = 0; ci < 2; ++ci) {
                        spec.corner_depth(i, j, k, ci, cj, 0) = horizon(i + ci, j + cj, k);
                        spec.corner_depth(i, j, k, ci, cj, 1) = horizon(i + ci, j + cj, k + 1);
                    }
    return spec;
}

} // namespace polyvem
