#pragma once

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "cylvar/grid.hpp"
#include "cylvar/rng.hpp"

namespace testing {

// Fresh scratch directory; removed by the destructor.
class TmpDir {
 public:
  TmpDir() {
    std::string tmpl =
        (std::filesystem::temp_directory_path() / "cylvar_test_XXXXXX").string();
    if (!mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
    path_ = tmpl;
  }
  ~TmpDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

struct CmdResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr interleaved
};

// Runs through the shell, capturing combined output and the exit code.
inline CmdResult run_cmd(const std::string& cmd) {
  CmdResult res;
  FILE* pipe = popen((cmd + " 2>&1").c_str(), "r");
  if (!pipe) throw std::runtime_error("popen failed: " + cmd);
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe))
    res.output.append(buf, n);
  const int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << s;
  if (!out) throw std::runtime_error("cannot write " + p.string());
}

// Smooth random profile: a few signed Gaussian bumps times r (finite energy
// near the axis), zero well before the domain wall.
inline cylvar::ScalarField random_profile(const cylvar::Grid2& g,
                                          std::uint64_t seed) {
  cylvar::CounterRng rng(seed);
  struct Bump {
    double c, rho, zc, w;
  };
  std::array<Bump, 3> bumps;
  for (int m = 0; m < 3; ++m) {
    bumps[m].c = rng.uniform(4 * m + 0, -1.0, 1.0);
    bumps[m].rho = rng.uniform(4 * m + 1, 0.0, 2.5);
    bumps[m].zc = rng.uniform(4 * m + 2, -2.5, 2.5);
    bumps[m].w = rng.uniform(4 * m + 3, 0.6, 1.6);
  }
  return cylvar::sample_scalar(g, [bumps](double r, double z) {
    double s = 0.0;
    for (const auto& b : bumps) {
      const double dr = r - b.rho, dz = z - b.zc;
      s += b.c * std::exp(-(dr * dr + dz * dz) / (b.w * b.w));
    }
    return r * s;
  });
}

}  // namespace testing
