#include "hpc/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace hpc {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void field_error(const std::string& path, const std::string& what) {
  throw Error("field '" + path + "': " + what);
}

// Reads the members of one object, rejecting unknown keys.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) field_error(path_.empty() ? "<root>" : path_, "expected object");
  }
  /// Rejects keys that were never looked up.
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) field_error(sub(it.key()), "unknown field");
  }

  std::string sub(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void get(const std::string& key, double& v) {
    if (const json* p = find(key)) {
      if (!p->is_number()) field_error(sub(key), "expected number");
      v = p->get<double>();
    }
  }
  void get(const std::string& key, int& v) {
    if (const json* p = find(key)) {
      if (!p->is_number_integer()) field_error(sub(key), "expected integer");
      v = p->get<int>();
    }
  }
  void get(const std::string& key, std::uint64_t& v) {
    if (const json* p = find(key)) {
      if (!p->is_number_unsigned()) field_error(sub(key), "expected non-negative integer");
      v = p->get<std::uint64_t>();
    }
  }
  void get(const std::string& key, bool& v) {
    if (const json* p = find(key)) {
      if (!p->is_boolean()) field_error(sub(key), "expected boolean");
      v = p->get<bool>();
    }
  }
  void get(const std::string& key, std::string& v, std::initializer_list<const char*> allowed = {}) {
    if (const json* p = find(key)) {
      if (!p->is_string()) field_error(sub(key), "expected string");
      v = p->get<std::string>();
      if (allowed.size() == 0) return;
      for (const char* a : allowed)
        if (v == a) return;
      std::string msg = "unexpected value '" + v + "' (allowed:";
      for (const char* a : allowed) msg += std::string(" ") + a;
      field_error(sub(key), msg + ")");
    }
  }
  void get(const std::string& key, std::optional<double>& v) {
    if (const json* p = find(key)) {
      if (p->is_null()) {
        v.reset();
        return;
      }
      if (!p->is_number()) field_error(sub(key), "expected number or null");
      v = p->get<double>();
    }
  }
  void get(const std::string& key, std::vector<double>& v) {
    if (const json* p = find(key)) {
      if (!p->is_array()) field_error(sub(key), "expected array of numbers");
      v.clear();
      for (const auto& e : *p) {
        if (!e.is_number()) field_error(sub(key), "expected array of numbers");
        v.push_back(e.get<double>());
      }
    }
  }
  void get(const std::string& key, std::vector<std::string>& v) {
    if (const json* p = find(key)) {
      if (!p->is_array()) field_error(sub(key), "expected array of strings");
      v.clear();
      for (const auto& e : *p) {
        if (!e.is_string()) field_error(sub(key), "expected array of strings");
        v.push_back(e.get<std::string>());
      }
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_detuning(const json& j, const std::string& path, DetuningSpec& d) {
  if (j.is_number()) {
    d = {DetuningSpec::Mode::Absolute, j.get<double>()};
  } else if (j.is_string()) {
    if (j.get<std::string>() != "resonance") field_error(path, "expected number, \"resonance\" or {\"offset_from_omega\": x}");
    d = {DetuningSpec::Mode::Resonance, 0.0};
  } else if (j.is_object()) {
    ObjectReader r(j, path);
    d = {DetuningSpec::Mode::OffsetFromOmega, 0.0};
    if (!r.find("offset_from_omega")) field_error(r.sub("offset_from_omega"), "missing");
    r.get("offset_from_omega", d.value);
    r.finish();
  } else {
    field_error(path, "expected number, \"resonance\" or {\"offset_from_omega\": x}");
  }
}

json write_detuning(const DetuningSpec& d) {
  switch (d.mode) {
    case DetuningSpec::Mode::Absolute:
      return d.value;
    case DetuningSpec::Mode::Resonance:
      return "resonance";
    default:
      return json{{"offset_from_omega", d.value}};
  }
}

std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    std::string what = e.what();
    const auto pos = what.find("; last read");
    throw Error("config parse error at " + line_col(text, e.byte) + ": " + (pos == std::string::npos ? what : what.substr(pos + 2)));
  }
  Scenario s;
  ObjectReader r(root, "");
  if (!r.find("schema_version")) field_error("schema_version", "missing");
  r.get("schema_version", s.schema_version);
  if (s.schema_version != kSchemaVersion)
    field_error("schema_version", "unsupported version " + std::to_string(s.schema_version) + " (expected " +
                                      std::to_string(kSchemaVersion) + ")");
  r.get("name", s.name);
  r.get("route", s.route, {"dipole", "analytic", "transfer_matrix", "coupled_modes"});
  r.get("output", s.output);
  r.get("seed", s.seed);
  if (const json* g = r.find("geometry")) {
    ObjectReader o(*g, "geometry");
    auto& c = s.geometry;
    o.get("type", c.type, {"hp_cavity", "bilayer", "single_layer", "empty"});
    o.get("length", c.length);
    o.get("mirror_n", c.mirror_n);
    o.get("lattice_constant", c.lattice_constant);
    o.get("n_side", c.n_side);
    o.get("curvature_radius", c.curvature_radius);
    o.get("isotropic", c.isotropic);
    o.get("axis", c.axis, {"x", "y"});
    o.get("lock_detuning", c.lock_detuning);
    if (c.n_side < 0) field_error("geometry.n_side", "must be >= 0");
    if (c.mirror_n < 0) field_error("geometry.mirror_n", "must be >= 0");
    o.finish();
    if (!(c.lattice_constant > 0.0)) field_error("geometry.lattice_constant", "must be positive");
    if (c.curvature_radius < 0.0) field_error("geometry.curvature_radius", "must be >= 0 (0 = flat)");
  }
  if (const json* d = r.find("drive")) {
    ObjectReader o(*d, "drive");
    auto& c = s.drive;
    o.get("kind", c.kind, {"plane_wave", "gaussian"});
    o.get("polarization", c.polarization, {"rcp", "lcp", "x", "y"});
    o.get("waist", c.waist);
    o.get("focus_z", c.focus_z);
    o.get("amplitude", c.amplitude);
    o.get("k_parallel", c.k_parallel);
    o.finish();
    if (c.k_parallel.size() != 2) field_error("drive.k_parallel", "expected 2 numbers");
    if (!(c.waist > 0.0)) field_error("drive.waist", "must be positive");
  }
  if (const json* w = r.find("sweep")) {
    ObjectReader o(*w, "sweep");
    auto& c = s.sweep;
    o.get("variable", c.variable, {"detuning", "length_shift"});
    o.get("min", c.min);
    o.get("max", c.max);
    o.get("points", c.points);
    o.get("offset_from_omega", c.offset_from_omega);
    o.get("coupled_modes_window", c.coupled_modes_window);
    o.finish();
    if (c.points < 1) field_error("sweep.points", "must be >= 1");
    if (c.max < c.min) field_error("sweep.max", "must be >= sweep.min");
  }
  if (const json* f = r.find("field_map")) {
    ObjectReader o(*f, "field_map");
    auto& c = s.field_map;
    o.get("mode", c.mode, {"rs_map", "profile"});
    if (const json* d = o.find("detuning")) read_detuning(*d, "field_map.detuning", c.detuning);
    o.get("x", c.x);
    o.get("y_min", c.y_min);
    o.get("y_max", c.y_max);
    o.get("z_min", c.z_min);
    o.get("z_max", c.z_max);
    o.get("resolution", c.resolution);
    o.get("include_evanescent", c.include_evanescent);
    o.get("g_max", c.g_max);
    o.get("profile_points", c.profile_points);
    o.finish();
    if (!(c.resolution > 0.0)) field_error("field_map.resolution", "must be positive");
    if (c.profile_points < 1) field_error("field_map.profile_points", "must be >= 1");
  }
  if (const json* q = r.find("sensing")) {
    ObjectReader o(*q, "sensing");
    auto& c = s.sensing;
    o.get("handedness", c.handedness, {"RHS", "LHS", "achiral"});
    o.get("delta_s", c.delta_s);
    o.get("gamma_s", c.gamma_s);
    o.get("position", c.position);
    o.get("F", c.F);
    o.get("F_LO", c.F_LO);
    o.get("T", c.T);
    o.get("eta_q", c.eta_q);
    o.get("detuning", c.detuning);
    o.get("windows", c.windows);
    o.get("entry_window", c.entry_window);
    o.get("exit_window", c.exit_window);
    o.get("model", c.model, {"helicity_channel", "oriented"});
    o.get("n_rot", c.n_rot);
    o.get("samples_per_window", c.samples_per_window);
    o.finish();
    if (c.windows < 1) field_error("sensing.windows", "must be >= 1");
    if (c.exit_window < c.entry_window) field_error("sensing.exit_window", "must be >= entry_window");
  }
  if (const json* c = r.find("compare")) {
    ObjectReader o(*c, "compare");
    o.get("routes", s.compare.routes);
    o.finish();
    for (const auto& rt : s.compare.routes)
      if (rt != "dipole" && rt != "analytic" && rt != "transfer_matrix" && rt != "coupled_modes")
        field_error("compare.routes", "unknown route '" + rt + "'");
  }
  r.finish();
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open scenario file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_scenario(ss.str());
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

std::string serialize_scenario(const Scenario& s) {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json j;
  j["schema_version"] = s.schema_version;
  j["name"] = s.name;
  j["route"] = s.route;
  j["output"] = s.output;
  j["seed"] = s.seed;
  const auto& g = s.geometry;
  j["geometry"] = {{"type", g.type},
                   {"length", g.length},
                   {"mirror_n", g.mirror_n},
                   {"lattice_constant", g.lattice_constant},
                   {"n_side", g.n_side},
                   {"curvature_radius", g.curvature_radius},
                   {"isotropic", g.isotropic},
                   {"axis", g.axis},
                   {"lock_detuning", opt(g.lock_detuning)}};
  const auto& d = s.drive;
  j["drive"] = {{"kind", d.kind},           {"polarization", d.polarization}, {"waist", d.waist},
                {"focus_z", opt(d.focus_z)}, {"amplitude", d.amplitude},       {"k_parallel", d.k_parallel}};
  const auto& w = s.sweep;
  j["sweep"] = {{"variable", w.variable},
                {"min", w.min},
                {"max", w.max},
                {"points", w.points},
                {"offset_from_omega", w.offset_from_omega},
                {"coupled_modes_window", w.coupled_modes_window}};
  const auto& f = s.field_map;
  j["field_map"] = {{"mode", f.mode},
                    {"detuning", write_detuning(f.detuning)},
                    {"x", f.x},
                    {"y_min", f.y_min},
                    {"y_max", f.y_max},
                    {"z_min", f.z_min},
                    {"z_max", f.z_max},
                    {"resolution", f.resolution},
                    {"include_evanescent", f.include_evanescent},
                    {"g_max", f.g_max},
                    {"profile_points", f.profile_points}};
  const auto& q = s.sensing;
  j["sensing"] = {{"handedness", q.handedness},
                  {"delta_s", q.delta_s},
                  {"gamma_s", q.gamma_s},
                  {"position", opt(q.position)},
                  {"F", q.F},
                  {"F_LO", q.F_LO},
                  {"T", q.T},
                  {"eta_q", q.eta_q},
                  {"detuning", q.detuning},
                  {"windows", q.windows},
                  {"entry_window", q.entry_window},
                  {"exit_window", q.exit_window},
                  {"model", q.model},
                  {"n_rot", q.n_rot},
                  {"samples_per_window", q.samples_per_window}};
  j["compare"] = {{"routes", s.compare.routes}};
  return j.dump(2) + "\n";
}

}  // namespace hpc
