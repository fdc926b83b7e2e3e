#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "cylvar/config.hpp"
#include "cylvar/conformal.hpp"
#include "cylvar/functionals.hpp"
#include "cylvar/grid.hpp"
#include "cylvar/io.hpp"
#include "cylvar/manifest.hpp"
#include "cylvar/operators.hpp"
#include "cylvar/parallel.hpp"
#include "cylvar/solvers.hpp"
#include "cylvar/suites.hpp"

namespace fs = std::filesystem;
using namespace cylvar;

namespace {

struct RunArtifacts {
  RunManifest manifest;
  ScalarField u;
  VectorField3 U;
};

IdentityTable identity_table(const ScalarField& u, const VectorField3& U,
                             double a, const Nonlinearity& nl, double j_total,
                             double e_total) {
  IdentityTable t;
  t.j_vs_e_rel =
      std::abs(j_total - e_total) / std::max(std::abs(j_total), 1e-300);

  const Scalar3 d = div3(U);
  for (double x : d.v) t.max_div_lift = std::max(t.max_div_lift, std::abs(x));

  t.nehari_residual = std::abs(fiber_derivative(u, a, nl, 1.0)) /
                      std::max(x_norm_sq(u, a), 1e-300);

  const ScalarField back = restrict_azimuthal(U, u.grid);
  for (std::size_t m = 0; m < u.v.size(); ++m)
    t.lift_roundtrip_max_err =
        std::max(t.lift_roundtrip_max_err, std::abs(back.v[m] - u.v[m]));
  return t;
}

// Solve per the config and assemble the manifest; throws on solver failure.
RunArtifacts run_pipeline(const Config& cfg) {
  const Grid2 g2 = cfg.grid2();
  const Grid3 g3 = cfg.grid3();
  const Nonlinearity nl = cfg.nonlinearity();

  const auto t0 = std::chrono::steady_clock::now();

  SolveResult res;
  std::optional<double> mp_level;
  if (cfg.mode == RunMode::mountain_pass) {
    MountainPassResult mp =
        mountain_pass_level_bound(g2, cfg.a, nl, cfg.solver);
    res.u = mp.peak;
    res.energy = energy_scalar(mp.peak, cfg.a, nl);
    res.dual_residual =
        gradient_scalar(mp.peak, cfg.a, nl, cfg.solver.cg_tol).dual_norm;
    res.iterations = mp.sweeps;
    res.converged = true;
    for (double lv : mp.sweep_levels) res.trace.push_back({lv, 0.0});
    mp_level = mp.level;
  } else if (cfg.mode == RunMode::critical) {
    res = solve_critical(g2, cfg.a, cfg.solver);
  } else if (cfg.solver.k_nodes == 1) {
    res = excited_symmetric_state(g2, cfg.a, nl, cfg.solver);
  } else {
    res = solve_ground_state(g2, cfg.a, nl, cfg.solver);
  }

  RunArtifacts art;
  art.u = res.u;
  art.U = lift(res.u, g3);
  const EnergyBreakdown e = energy_vector(art.U, nl);

  const double wall =
      deterministic_mode()
          ? 0.0
          : std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();

  RunManifest& m = art.manifest;
  m.config_echo = cfg.echo();
  m.nr = cfg.nr;
  m.nz = cfg.nz;
  m.rmax = cfg.rmax;
  m.zmax = cfg.zmax;
  m.n3 = cfg.n3;
  m.L3 = cfg.L3;
  m.nl_kind = cfg.nl_kind;
  m.p = cfg.p;
  m.eps_weight = cfg.eps_weight;
  m.j = res.energy;
  m.e = e;
  m.dual_residual = res.dual_residual;
  m.rayleigh = res.rayleigh;
  m.mountain_pass_level = mp_level;
  m.identities =
      identity_table(res.u, art.U, cfg.a, nl, res.energy.total, e.total);
  m.converged = res.converged;
  m.iterations = res.iterations;
  m.trace = res.trace;
  m.wall_time_seconds = wall;
  m.seed = cfg.solver.seed;
  return art;
}

int do_solve(const std::string& config_path, const std::string& out_override) {
  Config cfg;
  try {
    cfg = parse_config_file(config_path);
    if (!out_override.empty()) cfg.out_dir = out_override;
  } catch (const ConfigError& e) {
    std::cerr << "cylvar solve: " << e.what() << "\n";
    return 2;
  }

  RunArtifacts art;
  try {
    art = run_pipeline(cfg);
  } catch (const std::exception& e) {
    std::cerr << "cylvar solve: " << e.what() << "\n";
    return 3;
  }

  try {
    fs::create_directories(cfg.out_dir);
    write_manifest(fs::path(cfg.out_dir) / "manifest.json", art.manifest);
    write_scalar_csv(fs::path(cfg.out_dir) / "scalar.csv", art.u);
    write_vector_csv(fs::path(cfg.out_dir) / "vector.csv", art.U);
  } catch (const std::exception& e) {
    std::cerr << "cylvar solve: " << e.what() << "\n";
    return 2;
  }
  return art.manifest.converged ? 0 : 3;
}

int do_verify(const std::string& suite, int resolution,
              const std::string& mutation) {
  SuiteOptions opt;
  opt.resolution = resolution;
  opt.mutate_curl_sign = (mutation == "curl_sign");
  SuiteReport rep;
  try {
    rep = run_suite(suite, opt);
  } catch (const std::exception& e) {
    std::cerr << "cylvar verify: " << e.what() << "\n";
    return 2;
  }
  std::cout << rep.to_csv();
  return rep.all_pass() ? 0 : 1;
}

std::vector<std::string> split_values(const std::string& csv) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : csv) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

int do_sweep(const std::string& config_path, const std::string& param,
             const std::string& values_csv) {
  Config base;
  try {
    base = parse_config_file(config_path);
  } catch (const ConfigError& e) {
    std::cerr << "cylvar sweep: " << e.what() << "\n";
    return 2;
  }

  const std::vector<std::string> values = split_values(values_csv);
  if (values.empty() ||
      (values.size() == 1 && values.front().empty())) {
    std::cerr << "cylvar sweep: empty values list\n";
    return 2;
  }

  // Materialize one config per value up front so every usage error exits
  // before any computation starts.
  std::vector<Config> cfgs;
  for (const std::string& v : values) {
    if (v.empty()) {
      std::cerr << "cylvar sweep: empty value in list\n";
      return 2;
    }
    Config c = base;
    c.out_dir = (fs::path(base.out_dir) / (param + "_" + v)).string();
    try {
      if (param == "a" || param == "p") {
        errno = 0;
        char* end = nullptr;
        const double x = std::strtod(v.c_str(), &end);
        if (end != v.c_str() + v.size() || errno == ERANGE ||
            !std::isfinite(x)) {
          std::cerr << "cylvar sweep: " << param << " value '" << v
                    << "' is not a number\n";
          return 2;
        }
        if (param == "a") {
          c.a = x;
        } else {
          c.p = x;
        }
        // Round-trip through the parser so its range validation applies.
        Config patched =
            parse_config_text(c.render(), "sweep:" + param + "=" + v);
        patched.out_dir = c.out_dir;
        c = patched;
      } else if (param == "resolution") {
        errno = 0;
        char* end = nullptr;
        const long n = std::strtol(v.c_str(), &end, 10);
        if (end != v.c_str() + v.size() || errno == ERANGE || n < 9) {
          std::cerr << "cylvar sweep: resolution value '" << v
                    << "' must be an integer >= 9\n";
          return 2;
        }
        c.nr = static_cast<int>(n) - 1;
        c.nz = 2 * static_cast<int>(n) - 1;
        c.n3 = static_cast<int>(n);
      } else {
        std::cerr << "cylvar sweep: unknown parameter '" << param
                  << "' (expected a, p or resolution)\n";
        return 2;
      }
    } catch (const ConfigError& e) {
      std::cerr << "cylvar sweep: " << e.what() << "\n";
      return 2;
    }
    cfgs.push_back(std::move(c));
  }

  struct Row {
    bool failed = true;
    std::string error;
    double j = std::nan("");
    double rayleigh = std::nan("");
    double residual = std::nan("");
    double walltime = std::nan("");
  };
  std::vector<Row> rows(cfgs.size());

  // Values run concurrently; each pipeline is independent and writes only
  // its own directory.
  std::vector<std::thread> workers;
  workers.reserve(cfgs.size());
  for (std::size_t i = 0; i < cfgs.size(); ++i) {
    workers.emplace_back([&cfgs, &rows, i] {
      Row& row = rows[i];
      try {
        const RunArtifacts art = run_pipeline(cfgs[i]);
        fs::create_directories(cfgs[i].out_dir);
        write_manifest(fs::path(cfgs[i].out_dir) / "manifest.json",
                       art.manifest);
        row.j = art.manifest.j.total;
        if (art.manifest.rayleigh) row.rayleigh = *art.manifest.rayleigh;
        row.residual = art.manifest.dual_residual;
        row.walltime = art.manifest.wall_time_seconds;
        row.failed = !art.manifest.converged;
        if (row.failed) row.error = "did not converge";
      } catch (const std::exception& e) {
        row.failed = true;
        row.error = e.what();
      }
    });
  }
  for (auto& w : workers) w.join();

  std::string csv = "param,J,rayleigh,residual,walltime\n";
  bool any_failed = false;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Row& row = rows[i];
    csv += values[i];
    csv += ',';
    csv += fmt17(row.j);
    csv += ',';
    csv += fmt17(row.rayleigh);
    csv += ',';
    csv += fmt17(row.residual);
    csv += ',';
    csv += fmt17(row.walltime);
    csv += '\n';
    if (row.failed) {
      any_failed = true;
      std::cerr << "cylvar sweep: " << param << " = " << values[i] << ": "
                << (row.error.empty() ? "failed" : row.error) << "\n";
    }
  }

  try {
    fs::create_directories(base.out_dir);
    atomic_write(fs::path(base.out_dir) / "sweep.csv", csv);
  } catch (const std::exception& e) {
    std::cerr << "cylvar sweep: " << e.what() << "\n";
    return 2;
  }
  std::cout << csv;
  return any_failed ? 1 : 0;
}

int do_lift(const std::string& in_path, const std::string& out_path, int n3,
            double L3) {
  ScalarField u;
  try {
    u = read_scalar_csv(in_path);
  } catch (const std::exception& e) {
    std::cerr << "cylvar lift: " << e.what() << "\n";
    return 2;
  }
  if (n3 < 8) {
    std::cerr << "cylvar lift: --n3 must be at least 8\n";
    return 2;
  }
  const double L = L3 > 0.0 ? L3 : std::max(u.grid.rmax, u.grid.zmax);
  try {
    write_vector_csv(out_path, lift(u, Grid3(n3, L)));
  } catch (const std::exception& e) {
    std::cerr << "cylvar lift: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "cylvar: symmetric variational states of a planar-rotation-invariant "
      "field equation, computed on the scalar half-plane and verified "
      "against its three-dimensional curl-curl lift"};
  app.require_subcommand(1);

  std::string config_path, out_override;
  auto* solve = app.add_subcommand(
      "solve", "Minimize the configured energy and write manifest + fields");
  solve->add_option("--config", config_path, "Config file (section.key = value)")
      ->required();
  solve->add_option("--out", out_override, "Override output.dir");

  std::string suite, mutation;
  int resolution = 33;
  auto* verify = app.add_subcommand(
      "verify", "Run an invariant suite and print its defect report");
  verify->add_option("--suite", suite, "identities|conformal|symmetry|nonlinearity")
      ->required();
  verify->add_option("--resolution", resolution, "Grid resolution (default 33)");
  verify
      ->add_option("--mutation", mutation,
                   "Fault injection: curl_sign negates every curl the "
                   "identities suite computes (the report must go red)")
      ->check(CLI::IsMember({"curl_sign"}));

  std::string sweep_config, sweep_param, sweep_values;
  auto* sweep = app.add_subcommand(
      "sweep", "Re-solve across parameter values and tabulate the results");
  sweep->add_option("--config", sweep_config, "Base config file")->required();
  sweep->add_option("--param", sweep_param, "a|p|resolution")->required();
  sweep->add_option("--values", sweep_values, "Comma-separated values")
      ->required();

  std::string lift_in, lift_out;
  int lift_n3 = 65;
  double lift_L3 = 0.0;
  auto* lift_cmd = app.add_subcommand(
      "lift", "Extend a scalar field CSV to its azimuthal vector field");
  lift_cmd->add_option("--in", lift_in, "Scalar field CSV")->required();
  lift_cmd->add_option("--out", lift_out, "Vector field CSV")->required();
  lift_cmd->add_option("--n3", lift_n3, "Cube nodes per axis (default 65)");
  lift_cmd->add_option("--L3", lift_L3,
                       "Cube half-size (default max(rmax, zmax))");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "cylvar: " << e.what() << "\n";
    return 2;
  }

  if (solve->parsed()) return do_solve(config_path, out_override);
  if (verify->parsed()) return do_verify(suite, resolution, mutation);
  if (sweep->parsed()) return do_sweep(sweep_config, sweep_param, sweep_values);
  if (lift_cmd->parsed()) return do_lift(lift_in, lift_out, lift_n3, lift_L3);
  return 2;
}
