#include "shapetensor/io.hpp"

#include <fstream>
#include <iomanip>

namespace shapetensor {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << std::setprecision(17);
  return out;
}

}  // namespace

void write_off(const Mesh& m, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "OFF\n" << m.n_vertices() << " " << m.n_triangles() << " 0\n";
  for (const auto& v : m.vertices) out << v.x() << " " << v.y() << " 0\n";
  for (const auto& t : m.triangles) out << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
  if (!out) throw IoError("write failed: " + path);
}

void write_boundary_csv(const Mesh& m, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "x,y\n";
  for (int v : boundary_loop(m)) out << m.vertices[v].x() << "," << m.vertices[v].y() << "\n";
  if (!out) throw IoError("write failed: " + path);
}

void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out = open_out(path);
  for (size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << "\n";
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << "\n";
  }
  if (!out) throw IoError("write failed: " + path);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out = open_out(path);
  out << content;
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace shapetensor
