#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "spfem/mesh.hpp"

namespace spfem {

namespace {

std::string format17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_mesh(std::ostream& out, const Mesh& mesh) {
  out << "vertices " << mesh.num_vertices() << " triangles " << mesh.num_triangles() << '\n';
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    const Point2 p = mesh.vertex(v);
    out << format17(p.x) << ' ' << format17(p.y) << ' ' << (mesh.is_boundary_vertex(v) ? 1 : 0) << '\n';
  }
  for (const auto& t : mesh.triangles()) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

Mesh read_mesh(std::istream& in) {
  std::string w1, w2;
  std::size_t nv = 0, nt = 0;
  if (!(in >> w1 >> nv >> w2 >> nt) || w1 != "vertices" || w2 != "triangles")
    throw Error("mesh file: expected header 'vertices N triangles M'");
  std::vector<Point2> verts(nv);
  std::vector<std::uint8_t> flags(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    std::string xs, ys;
    int flag = 0;
    if (!(in >> xs >> ys >> flag)) throw Error("mesh file: truncated vertex block at line " + std::to_string(v + 2));
    // strtod is correctly rounded, so 17-digit output reads back bit-exactly
    verts[v] = {std::strtod(xs.c_str(), nullptr), std::strtod(ys.c_str(), nullptr)};
    flags[v] = flag != 0;
  }
  std::vector<Triangle> tris(nt);
  for (std::size_t t = 0; t < nt; ++t)
    if (!(in >> tris[t][0] >> tris[t][1] >> tris[t][2]))
      throw Error("mesh file: truncated triangle block at triangle " + std::to_string(t));
  return Mesh(std::move(verts), std::move(tris), std::move(flags));
}

void save_mesh(const std::string& path, const Mesh& mesh) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write mesh file " + path);
  write_mesh(out, mesh);
}

Mesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read mesh file " + path);
  return read_mesh(in);
}

}  // namespace spfem
