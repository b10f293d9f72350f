#include "varicurv/mesh_io.hpp"

#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace varicurv {

namespace {

/// Next non-empty, non-comment line; tracks line numbers.
bool next_line(std::istream& in, std::string& line, std::size_t& line_no)
{
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        if (line.find_first_not_of(" \t\r") != std::string::npos) {
            return true;
        }
    }
    return false;
}

} // namespace

Mesh read_off(std::istream& in)
{
    std::string line;
    std::size_t line_no = 0;
    if (!next_line(in, line, line_no)) {
        throw ParseError("empty OFF input", 1);
    }
    std::istringstream header(line);
    std::string magic;
    header >> magic;
    if (magic != "OFF") {
        throw ParseError("expected OFF header", line_no);
    }
    long long nv = -1;
    long long nf = -1;
    long long ne = 0;
    if (!(header >> nv)) {
        if (!next_line(in, line, line_no)) {
            throw ParseError("missing counts", line_no);
        }
        header = std::istringstream(line);
        header >> nv;
    }
    if (!(header >> nf) || nv < 0 || nf < 0) {
        throw ParseError("malformed vertex/face counts", line_no);
    }
    header >> ne;

    std::vector<Eigen::Vector3d> coords;
    coords.reserve(static_cast<std::size_t>(nv));
    for (long long k = 0; k < nv; ++k) {
        if (!next_line(in, line, line_no)) {
            throw ParseError("unexpected end of file in vertex list", line_no + 1);
        }
        std::istringstream row(line);
        Eigen::Vector3d p;
        if (!(row >> p.x() >> p.y() >> p.z())) {
            throw ParseError("vertex needs three coordinates", line_no);
        }
        coords.push_back(p);
    }

    Mesh mesh;
    int face_size = 0;
    for (long long k = 0; k < nf; ++k) {
        if (!next_line(in, line, line_no)) {
            throw ParseError("unexpected end of file in face list", line_no + 1);
        }
        std::istringstream row(line);
        int count = 0;
        if (!(row >> count) || (count != 2 && count != 3)) {
            throw ParseError("faces must have 2 (segment) or 3 (triangle) vertices", line_no);
        }
        if (face_size != 0 && count != face_size) {
            throw ParseError("mixed segment and triangle faces", line_no);
        }
        face_size = count;
        std::vector<int> el(static_cast<std::size_t>(count));
        for (int& idx : el) {
            if (!(row >> idx) || idx < 0 || idx >= nv) {
                throw ParseError("face vertex index out of range", line_no);
            }
        }
        mesh.elements.push_back(std::move(el));
    }
    mesh.ambient_dim = face_size == 2 ? 2 : 3;
    for (std::size_t k = 0; k < coords.size(); ++k) {
        if (mesh.ambient_dim == 2) {
            if (coords[k].z() != 0.0) {
                throw ParseError("segment meshes must lie in the x3 = 0 plane (vertex " + std::to_string(k) + ")",
                                 line_no);
            }
            mesh.vertices.emplace_back(Vec(coords[k].head<2>()));
        } else {
            mesh.vertices.emplace_back(Vec(coords[k]));
        }
    }
    return mesh;
}

Mesh read_off_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open mesh file " + path.string());
    }
    return read_off(in);
}

void write_off(std::ostream& out, const Mesh& mesh)
{
    out << "OFF\n" << mesh.vertices.size() << " " << mesh.elements.size() << " 0\n";
    out << std::setprecision(17);
    for (const auto& v : mesh.vertices) {
        out << v(0) << " " << v(1) << " " << (v.size() > 2 ? v(2) : 0.0) << "\n";
    }
    for (const auto& el : mesh.elements) {
        out << el.size();
        for (int idx : el) {
            out << " " << idx;
        }
        out << "\n";
    }
}

} // namespace varicurv
