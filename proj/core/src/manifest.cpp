#include "cylvar/manifest.hpp"

#include <cstdio>
#include <sstream>

#include "cylvar/io.hpp"

namespace cylvar {

namespace {

// Hand-rolled writer: key order is part of the file contract, so a generic
// (sorting or hash-ordered) serializer is the wrong tool.
class JsonWriter {
 public:
  void begin_obj() { open('{'); }
  void end_obj() { close('}'); }
  void begin_arr(const std::string& k) { key(k); open('['); }
  void end_arr() { close(']'); }

  void field(const std::string& k, const std::string& v) { key(k); comma(); str(v); }
  void field(const std::string& k, double v) { key(k); comma(); os_ << fmt17(v); }
  void field(const std::string& k, int v) { key(k); comma(); os_ << v; }
  void field(const std::string& k, std::uint64_t v) { key(k); comma(); os_ << v; }
  void field(const std::string& k, bool v) { key(k); comma(); os_ << (v ? "true" : "false"); }
  void obj_field(const std::string& k) { key(k); open('{'); }
  void elem(double v) { comma(); os_ << fmt17(v); }
  void elem(int v) { comma(); os_ << v; }

  std::string take() { return os_.str(); }

 private:
  void open(char c) {
    comma();
    os_ << c;
    first_.push_back(true);
  }
  void close(char c) {
    os_ << c;
    first_.pop_back();
  }
  // Separator before any value or key; a key leaves pending_ set so the
  // value that follows it is not separated from the ':'.
  void comma() {
    if (pending_) {
      pending_ = false;
      return;
    }
    if (first_.empty()) return;
    if (!first_.back()) os_ << ",";
    first_.back() = false;
  }
  void key(const std::string& k) {
    comma();
    str(k);
    os_ << ":";
    pending_ = true;
  }
  void str(const std::string& s) {
    os_ << '"';
    for (char c : s) {
      switch (c) {
        case '"': os_ << "\\\""; break;
        case '\\': os_ << "\\\\"; break;
        case '\n': os_ << "\\n"; break;
        case '\t': os_ << "\\t"; break;
        case '\r': os_ << "\\r"; break;
        default:
          if (static_cast<unsigned char>(c) < 0x20) {
            char buf[8];
            std::snprintf(buf, sizeof buf, "\\u%04x", static_cast<unsigned>(c));
            os_ << buf;
          } else {
            os_ << c;
          }
      }
    }
    os_ << '"';
  }

  std::ostringstream os_;
  std::vector<bool> first_;
  bool pending_ = false;
};

void energy_obj(JsonWriter& w, const std::string& k, const EnergyBreakdown& e) {
  w.obj_field(k);
  w.field("quadratic", e.quadratic);
  w.field("nonlinear", e.nonlinear);
  w.field("total", e.total);
  w.end_obj();
}

}  // namespace

std::string manifest_json(const RunManifest& m) {
  JsonWriter w;
  w.begin_obj();

  w.obj_field("config");
  for (const auto& [k, v] : m.config_echo) w.field(k, v);
  w.end_obj();

  w.obj_field("grid");
  w.field("nr", m.nr);
  w.field("nz", m.nz);
  w.field("rmax", m.rmax);
  w.field("zmax", m.zmax);
  w.field("n3", m.n3);
  w.field("L3", m.L3);
  w.end_obj();

  w.obj_field("nonlinearity");
  w.field("kind", m.nl_kind);
  w.field("p", m.p);
  w.field("eps_weight", m.eps_weight);
  w.end_obj();

  w.obj_field("energies");
  energy_obj(w, "J", m.j);
  energy_obj(w, "E", m.e);
  w.end_obj();

  w.field("dual_residual", m.dual_residual);
  if (m.rayleigh) w.field("rayleigh", *m.rayleigh);
  if (m.mountain_pass_level) w.field("mountain_pass_level", *m.mountain_pass_level);

  w.obj_field("identities");
  w.field("j_vs_e_rel", m.identities.j_vs_e_rel);
  w.field("max_div_lift", m.identities.max_div_lift);
  w.field("nehari_residual", m.identities.nehari_residual);
  w.field("lift_roundtrip_max_err", m.identities.lift_roundtrip_max_err);
  w.end_obj();

  w.field("converged", m.converged);
  w.field("iterations", m.iterations);

  w.obj_field("trace");
  w.begin_arr("j");
  for (const auto& t : m.trace) w.elem(t.j);
  w.end_arr();
  w.begin_arr("residual");
  for (const auto& t : m.trace) w.elem(t.residual);
  w.end_arr();
  w.end_obj();

  w.field("wall_time_seconds", m.wall_time_seconds);
  w.field("seed", m.seed);
  w.field("format_version", m.format_version);

  w.end_obj();
  std::string out = w.take();
  out += "\n";
  return out;
}

void write_manifest(const std::filesystem::path& path, const RunManifest& m) {
  atomic_write(path, manifest_json(m));
}

}  // namespace cylvar
