#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "schro/errors.hpp"
#include "schro/geometry.hpp"

namespace schro {

namespace {

// Next non-blank, non-comment line; false at end of file.
bool next_line(std::istream& in, std::string& line) {
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
}

[[noreturn]] void parse_error(const std::filesystem::path& path, const std::string& msg) {
    throw InputError("OFF parse error in " + path.string() + ": " + msg);
}

}  // namespace

ManifoldMesh load_mesh(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open mesh file " + path.string());

    std::string line;
    if (!next_line(in, line)) parse_error(path, "empty file");
    {
        std::istringstream header(line);
        std::string tag;
        header >> tag;
        if (tag != "OFF") parse_error(path, "missing OFF header");
    }
    if (!next_line(in, line)) parse_error(path, "missing counts line");
    long long nv = -1;
    long long nf = -1;
    {
        std::istringstream counts(line);
        if (!(counts >> nv >> nf) || nv < 0 || nf < 0) parse_error(path, "bad counts line");
    }

    std::vector<Eigen::Vector3d> positions;
    positions.reserve(static_cast<std::size_t>(nv));
    for (long long i = 0; i < nv; ++i) {
        if (!next_line(in, line)) parse_error(path, "truncated vertex list");
        std::istringstream row(line);
        Eigen::Vector3d x;
        if (!(row >> x[0] >> x[1] >> x[2])) parse_error(path, "bad vertex line " + std::to_string(i));
        positions.push_back(x);
    }

    std::vector<Triangle> triangles;
    triangles.reserve(static_cast<std::size_t>(nf));
    for (long long f = 0; f < nf; ++f) {
        if (!next_line(in, line)) parse_error(path, "truncated face list");
        std::istringstream row(line);
        int arity = 0;
        Triangle t{};
        if (!(row >> arity)) parse_error(path, "bad face line " + std::to_string(f));
        if (arity != 3) parse_error(path, "face " + std::to_string(f) + " is not a triangle");
        if (!(row >> t[0] >> t[1] >> t[2])) parse_error(path, "bad face line " + std::to_string(f));
        triangles.push_back(t);
    }
    return make_surface(std::move(positions), std::move(triangles));
}

void save_mesh(const ManifoldMesh& mesh, const std::filesystem::path& path) {
    if (mesh.kind() != MeshKind::TriangleSurface) throw InputError("only triangle surfaces can be saved as OFF");
    std::FILE* f = std::fopen(path.string().c_str(), "w");
    if (f == nullptr) throw InputError("cannot write " + path.string());
    std::fprintf(f, "OFF\n%d %zu 0\n", mesh.vertex_count(), mesh.triangles().size());
    for (const auto& x : mesh.positions()) std::fprintf(f, "%.17g %.17g %.17g\n", x[0], x[1], x[2]);
    for (const auto& t : mesh.triangles()) std::fprintf(f, "3 %d %d %d\n", t[0], t[1], t[2]);
    std::fclose(f);
}

}  // namespace schro
