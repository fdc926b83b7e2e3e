#pragma once

#include <filesystem>
#include <string>

#include "cylvar/grid.hpp"

namespace cylvar {

// Shortest text keeping full double precision in the pinned dump format:
// printf %.17g.
std::string fmt17(double x);

// Writes `content` to `path` atomically: a sibling temp file is written,
// flushed, then renamed over the target.
void atomic_write(const std::filesystem::path& path, const std::string& content);

// Scalar profile dump:
//   # scalar nr=<int> nz=<int> rmax=<float> zmax=<float>
//   r,z,value          (row-major: i outer, j inner)
void write_scalar_csv(const std::filesystem::path& path, const ScalarField& f);
ScalarField read_scalar_csv(const std::filesystem::path& path);

// Vector field dump:
//   # vector n=<int> L=<float>
//   x,y,z,Ux,Uy,Uz     (row-major: i outer, then j, then k)
void write_vector_csv(const std::filesystem::path& path, const VectorField3& f);
VectorField3 read_vector_csv(const std::filesystem::path& path);

}  // namespace cylvar
