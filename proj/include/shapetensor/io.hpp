#ifndef SHAPETENSOR_IO_HPP
#define SHAPETENSOR_IO_HPP

#include <string>
#include <vector>

#include "shapetensor/mesh.hpp"

namespace shapetensor {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ASCII OFF with z = 0.
void write_off(const Mesh& m, const std::string& path);

// Boundary loop as "x,y" lines, CCW, first vertex not repeated.
void write_boundary_csv(const Mesh& m, const std::string& path);

// Generic numeric CSV: one header line, then one row per record.
void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace shapetensor

#endif
