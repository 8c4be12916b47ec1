#include "polyvem/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace polyvem {

namespace {

void set_precision(std::ostream& os)
{
    os.precision(17);
}

} // namespace

std::string vtk_string(const PolyMesh& mesh, const VtkFields& fields)
{
    std::ostringstream os;
    set_precision(os);
    os << "# vtk DataFile Version 3.0\n"
       << "polyvem output\n"
       << "ASCII\n"
       << "DATASET UNSTRUCTURED_GRID\n";

    const int n = mesh.num_nodes();
    os << "POINTS " << n << " double\n";
    for (int i = 0; i < n; ++i) {
        os << mesh.coords(0, i) << ' ' << mesh.coords(1, i) << ' '
           << (mesh.dim == 3 ? mesh.coords(2, i) : 0.0) << '\n';
    }

    const int nc = mesh.num_cells();
    if (mesh.dim == 2) {
        std::size_t total = 0;
        std::vector<std::vector<int>> loops(nc);
        for (int c = 0; c < nc; ++c) {
            loops[c] = mesh.cell_nodes(c);
            total += loops[c].size() + 1;
        }
        os << "CELLS " << nc << ' ' << total << '\n';
        for (const auto& loop : loops) {
            os << loop.size();
            for (int v : loop)
                os << ' ' << v;
            os << '\n';
        }
        os << "CELL_TYPES " << nc << '\n';
        for (int c = 0; c < nc; ++c)
            os << 7 << '\n'; // VTK_POLYGON
    } else {
        // polyhedra as face streams: len nFaces (nPts ids...) per cell
        std::size_t total = 0;
        for (int c = 0; c < nc; ++c) {
            std::size_t len = 1;
            for (const CellFace& cf : mesh.cells[c])
                len += 1 + mesh.faces[cf.face].size();
            total += len + 1;
        }
        os << "CELLS " << nc << ' ' << total << '\n';
        for (int c = 0; c < nc; ++c) {
            std::size_t len = 1;
            for (const CellFace& cf : mesh.cells[c])
                len += 1 + mesh.faces[cf.face].size();
            os << len << ' ' << mesh.cells[c].size();
            for (const CellFace& cf : mesh.cells[c]) {
                os << ' ' << mesh.faces[cf.face].size();
                for (int v : mesh.faces[cf.face])
                    os << ' ' << v;
            }
            os << '\n';
        }
        os << "CELL_TYPES " << nc << '\n';
        for (int c = 0; c < nc; ++c)
            os << 42 << '\n'; // VTK_POLYHEDRON
    }

    if (fields.displacement) {
        const NodalField& u = *fields.displacement;
        if (u.size() != static_cast<long>(mesh.dim) * n)
            throw std::invalid_argument("vtk_string: displacement size mismatch");
        os << "POINT_DATA " << n << "\n"
           << "VECTORS displacement double\n";
        for (int i = 0; i < n; ++i) {
            os << u(mesh.dim * i) << ' ' << u(mesh.dim * i + 1) << ' '
               << (mesh.dim == 3 ? u(mesh.dim * i + 2) : 0.0) << '\n';
        }
    }
    if (fields.cell_scalars) {
        if (fields.cell_scalars->size() != nc)
            throw std::invalid_argument("vtk_string: cell scalar size mismatch");
        os << "CELL_DATA " << nc << "\n"
           << "SCALARS " << fields.cell_scalar_name << " double 1\n"
           << "LOOKUP_TABLE default\n";
        for (int c = 0; c < nc; ++c)
            os << (*fields.cell_scalars)(c) << '\n';
    }
    return os.str();
}

void write_vtk(const PolyMesh& mesh, const std::string& path, const VtkFields& fields)
{
    write_text_file(path, vtk_string(mesh, fields));
}

std::string pvmesh_string(const PolyMesh& mesh)
{
    std::ostringstream os;
    set_precision(os);
    os << "polyvem-mesh 1\n";
    os << "dim " << mesh.dim << '\n';
    os << "nodes " << mesh.num_nodes() << '\n';
    for (int n = 0; n < mesh.num_nodes(); ++n) {
        for (int d = 0; d < mesh.dim; ++d)
            os << (d ? " " : "") << mesh.coords(d, n);
        os << '\n';
    }
    os << "faces " << mesh.num_faces() << '\n';
    for (const auto& f : mesh.faces) {
        os << f.size();
        for (int v : f)
            os << ' ' << v;
        os << '\n';
    }
    os << "cells " << mesh.num_cells() << '\n';
    for (const auto& c : mesh.cells) {
        os << c.size();
        for (const CellFace& cf : c)
            os << ' ' << cf.face << ' ' << cf.sign;
        os << '\n';
    }
    return os.str();
}

void write_pvmesh(const PolyMesh& mesh, const std::string& path)
{
    write_text_file(path, pvmesh_string(mesh));
}

PolyMesh parse_pvmesh(const std::string& text)
{
    std::istringstream is(text);
    std::string magic;
    int version = 0;
    is >> magic >> version;
    if (magic != "polyvem-mesh" || version != 1)
        throw std::runtime_error("parse_pvmesh: not a polyvem-mesh file");

    std::string key;
    int dim = 0, n_nodes = 0;
    is >> key >> dim;
    if (key != "dim" || (dim != 2 && dim != 3))
        throw std::runtime_error("parse_pvmesh: bad dim record");
    is >> key >> n_nodes;
    if (key != "nodes" || n_nodes <= 0)
        throw std::runtime_error("parse_pvmesh: bad nodes record");
    Eigen::MatrixXd coords(dim, n_nodes);
    for (int n = 0; n < n_nodes; ++n)
        for (int d = 0; d < dim; ++d)
            is >> coords(d, n);

    int n_faces = 0;
    is >> key >> n_faces;
    if (key != "faces")
        throw std::runtime_error("parse_pvmesh: bad faces record");
    std::vector<std::vector<int>> faces(n_faces);
    for (auto& f : faces) {
        int count = 0;
        is >> count;
        f.resize(count);
        for (int& v : f)
            is >> v;
    }

    int n_cells = 0;
    is >> key >> n_cells;
    if (key != "cells")
        throw std::runtime_error("parse_pvmesh: bad cells record");
    std::vector<std::vector<CellFace>> cells(n_cells);
    for (auto& c : cells) {
        int count = 0;
        is >> count;
        c.resize(count);
        for (CellFace& cf : c)
            is >> cf.face >> cf.sign;
    }
    if (!is)
        throw std::runtime_error("parse_pvmesh: truncated file");

    return build_mesh(coords, std::move(faces), std::move(cells));
}

PolyMesh read_pvmesh(const std::string& path)
{
    return parse_pvmesh(read_text_file(path));
}

void write_text_file(const std::string& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out)
        throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace polyvem
