#include "cylvar/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cylvar {

namespace fs = std::filesystem;

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void atomic_write(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("atomic_write: cannot open " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("atomic_write: short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

void write_scalar_csv(const fs::path& path, const ScalarField& f) {
  const Grid2& g = f.grid;
  std::string out;
  out.reserve(40 * g.size() + 64);
  out += "# scalar nr=" + std::to_string(g.nr) + " nz=" + std::to_string(g.nz) +
         " rmax=" + fmt17(g.rmax) + " zmax=" + fmt17(g.zmax) + "\n";
  for (int i = 0; i < g.nr; ++i)
    for (int j = 0; j < g.nz; ++j)
      out += fmt17(g.r(i)) + "," + fmt17(g.z(j)) + "," + fmt17(f.at(i, j)) + "\n";
  atomic_write(path, out);
}

namespace {

// Parses "key=value" off a header chunk, or throws.
std::string header_value(const std::string& header, const std::string& key,
                         const fs::path& path) {
  const std::string needle = key + "=";
  const auto pos = header.find(needle);
  if (pos == std::string::npos)
    throw std::runtime_error(path.string() + ": malformed header, missing " + key);
  auto end = header.find(' ', pos);
  if (end == std::string::npos) end = header.size();
  return header.substr(pos + needle.size(), end - pos - needle.size());
}

std::vector<double> parse_row(const std::string& line, std::size_t ncols,
                              std::size_t lineno, const fs::path& path) {
  std::vector<double> out;
  out.reserve(ncols);
  std::size_t start = 0;
  while (start <= line.size()) {
    auto comma = line.find(',', start);
    if (comma == std::string::npos) comma = line.size();
    try {
      out.push_back(std::stod(line.substr(start, comma - start)));
    } catch (...) {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                               ": unparsable number");
    }
    start = comma + 1;
    if (comma == line.size()) break;
  }
  if (out.size() != ncols)
    throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                             ": expected " + std::to_string(ncols) + " columns");
  for (double x : out)
    if (!std::isfinite(x))
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                               ": non-finite value");
  return out;
}

}  // namespace

ScalarField read_scalar_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_scalar_csv: cannot open " + path.string());
  std::string header;
  if (!std::getline(in, header) || header.rfind("# scalar", 0) != 0)
    throw std::runtime_error(path.string() + ": not a scalar field dump");
  const int nr = std::stoi(header_value(header, "nr", path));
  const int nz = std::stoi(header_value(header, "nz", path));
  const double rmax = std::stod(header_value(header, "rmax", path));
  const double zmax = std::stod(header_value(header, "zmax", path));
  ScalarField f{Grid2(nr, nz, rmax, zmax)};
  std::string line;
  std::size_t lineno = 1;
  std::size_t count = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (count >= f.grid.size())
      throw std::runtime_error(path.string() + ": more rows than nr*nz");
    const auto row = parse_row(line, 3, lineno, path);
    f.v[count++] = row[2];
  }
  if (count != f.grid.size())
    throw std::runtime_error(path.string() + ": truncated dump (" +
                             std::to_string(count) + " of " +
                             std::to_string(f.grid.size()) + " rows)");
  return f;
}

void write_vector_csv(const fs::path& path, const VectorField3& f) {
  const Grid3& g = f.grid;
  std::string out;
  out.reserve(80 * g.size() + 64);
  out += "# vector n=" + std::to_string(g.n) + " L=" + fmt17(g.L) + "\n";
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      for (int k = 0; k < g.n; ++k) {
        out += fmt17(g.coord(i)) + "," + fmt17(g.coord(j)) + "," +
               fmt17(g.coord(k));
        for (int c = 0; c < 3; ++c) out += "," + fmt17(f.at(i, j, k, c));
        out += "\n";
      }
  atomic_write(path, out);
}

VectorField3 read_vector_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_vector_csv: cannot open " + path.string());
  std::string header;
  if (!std::getline(in, header) || header.rfind("# vector", 0) != 0)
    throw std::runtime_error(path.string() + ": not a vector field dump");
  const int n = std::stoi(header_value(header, "n", path));
  const double L = std::stod(header_value(header, "L", path));
  VectorField3 f{Grid3(n, L)};
  std::string line;
  std::size_t lineno = 1;
  std::size_t count = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (count >= f.grid.size())
      throw std::runtime_error(path.string() + ": more rows than n^3");
    const auto row = parse_row(line, 6, lineno, path);
    for (int c = 0; c < 3; ++c) f.v[3 * count + c] = row[3 + c];
    ++count;
  }
  if (count != f.grid.size())
    throw std::runtime_error(path.string() + ": truncated dump (" +
                             std::to_string(count) + " of " +
                             std::to_string(f.grid.size()) + " rows)");
  return f;
}

}  // namespace cylvar
