#include "textile/mesh_io.hpp"

#include <charconv>
#include <sstream>

#include "textile/error.hpp"

namespace textile {

std::string format_double(double value) {
    if (value == 0.0) return "0";  // folds -0
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

namespace {

void append_vec(std::string& out, const Vec3& p) {
    out += format_double(p.x());
    out += ' ';
    out += format_double(p.y());
    out += ' ';
    out += format_double(p.z());
}

double parse_double(const std::string& token, const char* what) {
    double v = 0.0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
        throw ParseError("<mesh>", what, "bad number '" + token + "'");
    }
    return v;
}

std::int64_t parse_int(const std::string& token, const char* what) {
    std::int64_t v = 0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
        throw ParseError("<mesh>", what, "bad integer '" + token + "'");
    }
    return v;
}

}  // namespace

std::string write_obj(const std::vector<NamedSurface>& meshes) {
    std::string out = "# textile surface mesh\n";
    std::int64_t base = 1;
    for (const auto& [name, mesh] : meshes) {
        out += "o " + name + "\n";
        for (const auto& p : mesh.vertices) {
            out += "v ";
            append_vec(out, p);
            out += '\n';
        }
        for (const auto& q : mesh.quads) {
            out += "f";
            for (int i : q) out += ' ' + std::to_string(base + i);
            out += '\n';
        }
        for (const auto& t : mesh.cap_triangles) {
            out += "f";
            for (int i : t) out += ' ' + std::to_string(base + i);
            out += '\n';
        }
        base += static_cast<std::int64_t>(mesh.vertices.size());
    }
    return out;
}

std::vector<NamedSurface> read_obj(const std::string& text) {
    std::vector<NamedSurface> meshes;
    std::istringstream in(text);
    std::string line;
    std::int64_t base = 1;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag) || tag[0] == '#') continue;
        if (tag == "o") {
            if (!meshes.empty()) base += static_cast<std::int64_t>(meshes.back().mesh.vertices.size());
            NamedSurface s;
            ls >> s.name;
            meshes.push_back(std::move(s));
            continue;
        }
        if (meshes.empty()) meshes.emplace_back();
        auto& mesh = meshes.back().mesh;
        std::vector<std::string> tokens;
        for (std::string t; ls >> t;) tokens.push_back(t);
        if (tag == "v") {
            if (tokens.size() != 3) throw ParseError("<obj>", "v", "expected 3 coordinates");
            mesh.vertices.emplace_back(parse_double(tokens[0], "v"), parse_double(tokens[1], "v"),
                                       parse_double(tokens[2], "v"));
        } else if (tag == "f") {
            std::vector<int> ids;
            for (const auto& t : tokens) ids.push_back(static_cast<int>(parse_int(t, "f") - base));
            if (ids.size() == 4) {
                mesh.quads.push_back({ids[0], ids[1], ids[2], ids[3]});
            } else if (ids.size() == 3) {
                mesh.cap_triangles.push_back({ids[0], ids[1], ids[2]});
            } else {
                throw ParseError("<obj>", "f", "expected 3 or 4 indices");
            }
        }
    }
    return meshes;
}

std::string write_vtk(const VolumeMesh& mesh, const std::string& title) {
    std::string out = "# vtk DataFile Version 3.0\n" + title + "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    out += "POINTS " + std::to_string(mesh.vertices.size()) + " double\n";
    for (const auto& p : mesh.vertices) {
        append_vec(out, p);
        out += '\n';
    }
    const std::size_t n = mesh.cell_count();
    std::size_t size = 0;
    for (std::size_t c = 0; c < n; ++c) size += 1 + mesh.cell(c).size();
    out += "CELLS " + std::to_string(n) + " " + std::to_string(size) + "\n";
    for (std::size_t c = 0; c < n; ++c) {
        const auto ids = mesh.cell(c);
        out += std::to_string(ids.size());
        for (auto id : ids) out += ' ' + std::to_string(id);
        out += '\n';
    }
    out += "CELL_TYPES " + std::to_string(n) + "\n";
    for (auto t : mesh.cell_types) out += std::to_string(static_cast<int>(t)) + "\n";
    out += "CELL_DATA " + std::to_string(n) + "\nSCALARS yarn_id int 1\nLOOKUP_TABLE default\n";
    for (int label : mesh.cell_labels) out += std::to_string(label) + "\n";
    return out;
}

VolumeMesh read_vtk(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    for (int i = 0; i < 4 && std::getline(in, line); ++i) {
        if (i == 0 && line.rfind("# vtk DataFile", 0) != 0) {
            throw ParseError("<vtk>", "header", "not a legacy VTK file");
        }
    }
    VolumeMesh mesh;
    std::string word;
    auto expect = [&](const char* keyword) {
        if (!(in >> word) || word != keyword) {
            throw ParseError("<vtk>", keyword, "missing section");
        }
    };
    std::string tok;
    expect("POINTS");
    in >> tok;
    const std::int64_t np = parse_int(tok, "POINTS");
    in >> word;  // scalar type
    mesh.vertices.resize(static_cast<std::size_t>(np));
    for (auto& p : mesh.vertices) {
        for (int k = 0; k < 3; ++k) {
            in >> tok;
            p[k] = parse_double(tok, "POINTS");
        }
    }
    expect("CELLS");
    in >> tok;
    const std::int64_t nc = parse_int(tok, "CELLS");
    in >> tok;
    for (std::int64_t c = 0; c < nc; ++c) {
        in >> tok;
        const std::int64_t m = parse_int(tok, "CELLS");
        mesh.offsets.push_back(static_cast<std::int64_t>(mesh.connectivity.size()));
        for (std::int64_t i = 0; i < m; ++i) {
            in >> tok;
            mesh.connectivity.push_back(parse_int(tok, "CELLS"));
        }
    }
    expect("CELL_TYPES");
    in >> tok;
    for (std::int64_t c = 0; c < nc; ++c) {
        in >> tok;
        const auto t = parse_int(tok, "CELL_TYPES");
        if (t != 12 && t != 13) throw ParseError("<vtk>", "CELL_TYPES", "unsupported cell type");
        mesh.cell_types.push_back(static_cast<CellType>(t));
    }
    expect("CELL_DATA");
    in >> tok >> word >> word >> word >> word >> word;  // n SCALARS name type 1 LOOKUP_TABLE
    in >> word;                                         // default
    for (std::int64_t c = 0; c < nc; ++c) {
        in >> tok;
        mesh.cell_labels.push_back(static_cast<int>(parse_int(tok, "CELL_DATA")));
    }
    if (!in) throw ParseError("<vtk>", "CELL_DATA", "truncated file");
    return mesh;
}

}  // namespace textile
