// SPDX-License-Identifier: Apache-2.0
#include "cornerflow/scenario.hpp"

#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cornerflow/analysis.hpp"
#include "cornerflow/compressible.hpp"
#include "cornerflow/field_export.hpp"
#include "cornerflow/forces.hpp"

namespace cornerflow {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

// ---- key path -> line ------------------------------------------------------------

std::string escape_token(const std::string& key) {
  std::string out;
  for (const char c : key) {
    if (c == '~') {
      out += "~0";
    } else if (c == '/') {
      out += "~1";
    } else {
      out += c;
    }
  }
  return out;
}

// Walks syntactically valid JSON text and records the line on which every
// value starts, keyed by JSON pointer.
class LineIndex {
 public:
  explicit LineIndex(std::string_view text) : t_(text) {
    if (!t_.empty()) value("");
  }

  std::size_t line(std::string pointer) const {
    for (;;) {
      if (auto it = lines_.find(pointer); it != lines_.end()) return it->second;
      if (pointer.empty()) return 1;
      pointer.erase(pointer.rfind('/'));
    }
  }

 private:
  void skip() {
    while (pos_ < t_.size() && std::isspace(static_cast<unsigned char>(t_[pos_]))) {
      if (t_[pos_] == '\n') ++line_;
      ++pos_;
    }
  }

  std::string string() {
    std::string out;
    ++pos_;
    while (pos_ < t_.size() && t_[pos_] != '"') {
      if (t_[pos_] == '\\') ++pos_;
      if (pos_ < t_.size()) out += t_[pos_++];
    }
    ++pos_;
    return out;
  }

  void value(const std::string& path) {
    skip();
    if (pos_ >= t_.size()) return;
    lines_[path] = line_;
    const char c = t_[pos_];
    if (c == '{' || c == '[') {
      const char close = c == '{' ? '}' : ']';
      ++pos_;
      std::size_t index = 0;
      for (;;) {
        skip();
        if (pos_ >= t_.size()) return;
        if (t_[pos_] == close) {
          ++pos_;
          return;
        }
        if (c == '{') {
          const std::string key = string();
          skip();
          ++pos_;  // ':'
          value(path + "/" + escape_token(key));
        } else {
          value(path + "/" + std::to_string(index++));
        }
        skip();
        if (pos_ < t_.size() && t_[pos_] == ',') ++pos_;
      }
    }
    if (c == '"') {
      string();
      return;
    }
    while (pos_ < t_.size() && !std::isspace(static_cast<unsigned char>(t_[pos_])) && t_[pos_] != ',' &&
           t_[pos_] != ']' && t_[pos_] != '}') {
      ++pos_;
    }
  }

  std::string_view t_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::map<std::string, std::size_t> lines_;
};

std::string dotted(const std::string& pointer) {
  std::string out;
  for (const char c : pointer) out += c == '/' ? '.' : c;
  return out.empty() ? "(root)" : out.substr(1);
}

// ---- validated scenario ------------------------------------------------------------

enum class FlowMode { circulation, kutta, sweep };

struct Scenario {
  std::string name;
  json body_config;
  std::optional<Body> body;
  std::string body_type;

  bool incompressible = true;
  double gamma = 1.4;
  double mach = 0.0;

  double speed = 1.0;
  double angle_deg = 0.0;
  FlowMode mode = FlowMode::circulation;
  double circulation = 0.0;
  std::size_t kutta_corner = 0;
  double sweep_from = 0.0, sweep_to = 0.0;
  std::size_t sweep_count = 0;

  std::string method;
  PanelOptions panels;
  std::size_t n_r = 128, n_theta = 256;
  double far_circumradii = 20.0;
  CompressibleOptions compressible;

  bool corner_fits = false, sign_attainment = false, far_field = false, circulation_check = false;
  bool forces = false, census = false, sign_census = false, compressible_solve = true;
  std::optional<std::vector<GridLevel>> refinement_levels;

  std::string directory = "cornerflow_out";
  std::optional<std::string> field_file;
  std::size_t field_resolution = 200;
  double field_margin = 2.0;
  std::optional<std::string> nodes_file;

  FitOptions fit;
  std::size_t fit_samples = 48;
  double far_field_residual = 1e-2;
  double coincidence_factor = 1.0;
  std::size_t sign_resolution = 400;

  json normalised;
};

class Reader {
 public:
  Reader(const json& root, const LineIndex& lines, const std::set<std::string>& overridden)
      : root_(root), lines_(lines), overridden_(overridden) {}

  [[noreturn]] void fail(const std::string& pointer, const std::string& message) const {
    for (const auto& o : overridden_) {
      if (pointer.rfind(o, 0) == 0 && (pointer.size() == o.size() || pointer[o.size()] == '/')) {
        throw ConfigError(0, "override " + dotted(pointer) + ": " + message);
      }
    }
    throw ConfigError(lines_.line(pointer), dotted(pointer) + ": " + message);
  }

  const json* find(const std::string& pointer) const {
    const json::json_pointer p(pointer);
    return root_.contains(p) ? &root_.at(p) : nullptr;
  }

  bool has(const std::string& pointer) const { return find(pointer) != nullptr; }

  void object(const std::string& pointer, std::initializer_list<const char*> allowed) const {
    const json* v = find(pointer);
    if (!v) return;
    if (!v->is_object()) fail(pointer, "expected an object");
    for (const auto& [key, _] : v->items()) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || key == a;
      if (!ok) fail(pointer + "/" + escape_token(key), "unknown key");
    }
  }

  double number(const std::string& pointer, std::optional<double> fallback = {}) const {
    const json* v = find(pointer);
    if (!v) {
      if (!fallback) fail(pointer, "required number is missing");
      return *fallback;
    }
    if (!v->is_number()) fail(pointer, "expected a number");
    const double x = v->get<double>();
    if (!std::isfinite(x)) fail(pointer, "expected a finite number");
    return x;
  }

  std::size_t count(const std::string& pointer, std::optional<std::size_t> fallback = {}) const {
    const json* v = find(pointer);
    if (!v) {
      if (!fallback) fail(pointer, "required integer is missing");
      return *fallback;
    }
    if (!v->is_number_integer() || v->get<long long>() < 0) fail(pointer, "expected a non-negative integer");
    return v->get<std::size_t>();
  }

  bool flag(const std::string& pointer, bool fallback) const {
    const json* v = find(pointer);
    if (!v) return fallback;
    if (!v->is_boolean()) fail(pointer, "expected true or false");
    return v->get<bool>();
  }

  std::string text(const std::string& pointer, std::optional<std::string> fallback = {}) const {
    const json* v = find(pointer);
    if (!v) {
      if (!fallback) fail(pointer, "required string is missing");
      return *fallback;
    }
    if (!v->is_string()) fail(pointer, "expected a string");
    return v->get<std::string>();
  }

  void require(bool ok, const std::string& pointer, const std::string& message) const {
    if (!ok) fail(pointer, message);
  }

 private:
  const json& root_;
  const LineIndex& lines_;
  const std::set<std::string>& overridden_;
};

bool safe_file_name(const std::string& s) {
  if (s.empty() || s == "." || s == "..") return false;
  for (const char c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' && c != '.') return false;
  }
  return true;
}

void apply_overrides(json& root, const std::vector<std::string>& overrides, std::set<std::string>& overridden) {
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError(0, "override '" + o + "' is not key=value");
    const std::string key = o.substr(0, eq);
    const std::string raw = o.substr(eq + 1);
    std::string pointer;
    std::stringstream parts(key);
    for (std::string part; std::getline(parts, part, '.');) {
      if (part.empty()) throw ConfigError(0, "override '" + o + "' has an empty key segment");
      pointer += "/" + escape_token(part);
    }
    json value = json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;
    try {
      root[json::json_pointer(pointer)] = value;
    } catch (const json::exception&) {
      throw ConfigError(0, "override '" + o + "' does not address an object member");
    }
    overridden.insert(pointer);
  }
}

Body build_body(const Reader& r, Scenario& sc) {
  r.object("/body", {"type", "radius", "chord", "alpha_deg", "vertices", "sides", "circumradius", "rotation_deg"});
  r.require(r.has("/body"), "/body", "required object is missing");
  sc.body_type = r.text("/body/type");
  const auto only = [&](std::initializer_list<const char*> keys) {
    for (const auto& [key, _] : r.find("/body")->items()) {
      bool ok = key == "type";
      for (const char* k : keys) ok = ok || key == k;
      if (!ok) r.fail("/body/" + escape_token(key), "not a parameter of body type '" + sc.body_type + "'");
    }
  };
  json& nb = sc.normalised["body"];
  nb["type"] = sc.body_type;
  if (sc.body_type == "circle") {
    only({"radius"});
    const double radius = r.number("/body/radius", 1.0);
    r.require(radius > 0.0, "/body/radius", "must be positive");
    nb["radius"] = radius;
    return Body::circle(radius);
  }
  if (sc.body_type == "flat_plate") {
    only({"chord", "alpha_deg"});
    const double chord = r.number("/body/chord", 4.0);
    const double alpha = r.number("/body/alpha_deg", 0.0);
    r.require(chord > 0.0, "/body/chord", "must be positive");
    r.require(std::abs(alpha) < 90.0, "/body/alpha_deg", "must lie in (-90, 90)");
    nb["chord"] = chord;
    nb["alpha_deg"] = alpha;
    return Body::flat_plate(chord, alpha * pi / 180.0);
  }
  std::vector<Point> vertices;
  if (sc.body_type == "polygon") {
    only({"vertices"});
    const json* v = r.find("/body/vertices");
    r.require(v && v->is_array() && v->size() >= 3, "/body/vertices", "expected an array of at least 3 [x, y] pairs");
    for (std::size_t k = 0; k < v->size(); ++k) {
      const std::string p = "/body/vertices/" + std::to_string(k);
      const json& xy = (*v)[k];
      r.require(xy.is_array() && xy.size() == 2 && xy[0].is_number() && xy[1].is_number(), p, "expected [x, y]");
      vertices.emplace_back(xy[0].get<double>(), xy[1].get<double>());
      nb["vertices"].push_back({vertices.back().real(), vertices.back().imag()});
    }
  } else if (sc.body_type == "regular_polygon") {
    only({"sides", "circumradius", "rotation_deg"});
    const std::size_t sides = r.count("/body/sides");
    const double radius = r.number("/body/circumradius", 1.0);
    const double rotation = r.number("/body/rotation_deg", 0.0);
    r.require(sides >= 3 && sides <= 4096, "/body/sides", "must lie in [3, 4096]");
    r.require(radius > 0.0, "/body/circumradius", "must be positive");
    for (std::size_t k = 0; k < sides; ++k) {
      vertices.push_back(std::polar(radius, rotation * pi / 180.0 + two_pi * double(k) / double(sides)));
    }
    nb["sides"] = sides;
    nb["circumradius"] = radius;
    nb["rotation_deg"] = rotation;
  } else {
    r.fail("/body/type", "unknown body type '" + sc.body_type + "' (circle, flat_plate, polygon, regular_polygon)");
  }
  try {
    return Body::polygon(std::move(vertices));
  } catch (const Error& e) {
    r.fail(sc.body_type == "polygon" ? "/body/vertices" : "/body", e.what());
  }
}

Scenario parse(const std::string& text, const std::vector<std::string>& overrides) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    const std::size_t end = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t k = 0; k < end; ++k) line += text[k] == '\n';
    throw ConfigError(line, std::string("malformed JSON: ") + e.what());
  }
  const LineIndex lines(text);
  if (!root.is_object()) throw ConfigError(1, "config must be a JSON object");
  std::set<std::string> overridden;
  apply_overrides(root, overrides, overridden);
  const Reader r(root, lines, overridden);

  Scenario sc;
  json& n = sc.normalised;
  r.object("", {"schema_version", "name", "body", "gas", "flow", "solver", "analyses", "output", "tolerances"});
  r.require(r.count("/schema_version") == 1, "/schema_version", "only schema_version 1 is supported");
  n["schema_version"] = 1;
  sc.name = r.text("/name");
  r.require(safe_file_name(sc.name), "/name", "use letters, digits, '_', '-' or '.'");
  n["name"] = sc.name;

  sc.body = build_body(r, sc);
  const Body& body = *sc.body;
  const bool circle = body.is_circle();
  const bool plate = body.is_flat_plate();

  // gas
  r.object("/gas", {"incompressible", "gamma", "mach"});
  sc.incompressible = r.flag("/gas/incompressible", !r.has("/gas/mach"));
  if (sc.incompressible) {
    r.require(!r.has("/gas/mach") && !r.has("/gas/gamma"), "/gas", "an incompressible gas takes no gamma or mach");
    n["gas"]["incompressible"] = true;
  } else {
    sc.gamma = r.number("/gas/gamma", 1.4);
    sc.mach = r.number("/gas/mach");
    r.require(sc.gamma > 1.0, "/gas/gamma", "must exceed 1");
    r.require(sc.mach > 0.0 && sc.mach < 1.0, "/gas/mach", "must lie in (0, 1)");
    r.require(circle || plate, "/body/type", "compressible flow needs a circle or flat_plate body");
    n["gas"] = {{"incompressible", false}, {"gamma", sc.gamma}, {"mach", sc.mach}};
  }

  // flow
  r.object("/flow", {"speed", "angle_deg", "circulation", "kutta_corner", "circulation_sweep"});
  r.object("/flow/circulation_sweep", {"from", "to", "count"});
  if (sc.incompressible) {
    sc.speed = r.number("/flow/speed", 1.0);
    r.require(sc.speed > 0.0, "/flow/speed", "must be positive");
    n["flow"]["speed"] = sc.speed;
  } else {
    r.require(!r.has("/flow/speed"), "/flow/speed", "compressible free-stream speed follows from gas.mach");
  }
  sc.angle_deg = r.number("/flow/angle_deg", 0.0);
  r.require(sc.incompressible || sc.angle_deg == 0.0, "/flow/angle_deg",
            "compressible flows run along +x; set the incidence with body.alpha_deg");
  n["flow"]["angle_deg"] = sc.angle_deg;
  const int given = int(r.has("/flow/circulation")) + int(r.has("/flow/kutta_corner")) +
                    int(r.has("/flow/circulation_sweep"));
  r.require(given == 1, "/flow", "give exactly one of circulation, kutta_corner, circulation_sweep");
  if (r.has("/flow/circulation")) {
    sc.mode = FlowMode::circulation;
    sc.circulation = r.number("/flow/circulation");
    n["flow"]["circulation"] = sc.circulation;
  } else if (r.has("/flow/kutta_corner")) {
    sc.mode = FlowMode::kutta;
    sc.kutta_corner = r.count("/flow/kutta_corner");
    r.require(sc.kutta_corner < body.corners().size(), "/flow/kutta_corner",
              "corner id out of range (body has " + std::to_string(body.corners().size()) + " corners)");
    n["flow"]["kutta_corner"] = sc.kutta_corner;
  } else {
    sc.mode = FlowMode::sweep;
    r.require(sc.incompressible, "/flow/circulation_sweep", "sweeps are incompressible only");
    sc.sweep_from = r.number("/flow/circulation_sweep/from");
    sc.sweep_to = r.number("/flow/circulation_sweep/to");
    sc.sweep_count = r.count("/flow/circulation_sweep/count");
    r.require(sc.sweep_to > sc.sweep_from, "/flow/circulation_sweep/to", "must exceed 'from'");
    r.require(sc.sweep_count >= 2 && sc.sweep_count <= 1001, "/flow/circulation_sweep/count", "must lie in [2, 1001]");
    n["flow"]["circulation_sweep"] = {{"from", sc.sweep_from}, {"to", sc.sweep_to}, {"count", sc.sweep_count}};
  }

  // solver
  r.object("/solver", {"method", "panels_per_side", "plate_panels", "clustering", "n_r", "n_theta",
                       "far_circumradii", "relaxation", "tolerance", "max_iterations"});
  json& ns = n["solver"];
  if (sc.incompressible) {
    sc.method = r.text("/solver/method", circle ? "exact" : "panel");
    r.require(sc.method == "exact" || sc.method == "panel", "/solver/method", "expected 'exact' or 'panel'");
    r.require(!(sc.method == "exact" && body.is_polygon()), "/solver/method", "no exact solution for polygons");
    r.require(!(sc.method == "panel" && circle), "/solver/method", "use a regular_polygon body for panel circles");
    ns["method"] = sc.method;
    if (sc.method == "panel") {
      sc.panels.panels_per_side = r.count("/solver/panels_per_side", sc.panels.panels_per_side);
      sc.panels.plate_panels = r.count("/solver/plate_panels", sc.panels.plate_panels);
      sc.panels.clustering = r.number("/solver/clustering", sc.panels.clustering);
      r.require(sc.panels.panels_per_side >= 1, "/solver/panels_per_side", "must be at least 1");
      r.require(sc.panels.plate_panels >= 8, "/solver/plate_panels", "must be at least 8");
      r.require(sc.panels.clustering >= 0.0 && sc.panels.clustering <= 1.0, "/solver/clustering", "must lie in [0, 1]");
      ns["panels_per_side"] = sc.panels.panels_per_side;
      ns["plate_panels"] = sc.panels.plate_panels;
      ns["clustering"] = sc.panels.clustering;
    }
  } else {
    r.require(!r.has("/solver/method"), "/solver/method", "compressible runs use the conformal grid solver");
    sc.n_r = r.count("/solver/n_r", sc.n_r);
    sc.n_theta = r.count("/solver/n_theta", sc.n_theta);
    sc.far_circumradii = r.number("/solver/far_circumradii", sc.far_circumradii);
    sc.compressible.relaxation = r.number("/solver/relaxation", sc.compressible.relaxation);
    sc.compressible.tolerance = r.number("/solver/tolerance", sc.compressible.tolerance);
    sc.compressible.max_iterations = r.count("/solver/max_iterations", sc.compressible.max_iterations);
    r.require(sc.n_r >= 16, "/solver/n_r", "must be at least 16");
    r.require(sc.n_theta >= 16 && sc.n_theta % 2 == 0, "/solver/n_theta", "must be even and at least 16");
    r.require(sc.far_circumradii >= 20.0, "/solver/far_circumradii", "must be at least 20");
    r.require(sc.compressible.relaxation > 0.0 && sc.compressible.relaxation <= 1.0, "/solver/relaxation",
              "must lie in (0, 1]");
    r.require(sc.compressible.tolerance > 0.0, "/solver/tolerance", "must be positive");
    r.require(sc.compressible.max_iterations >= 1, "/solver/max_iterations", "must be at least 1");
    ns = {{"n_r", sc.n_r}, {"n_theta", sc.n_theta}, {"far_circumradii", sc.far_circumradii},
          {"relaxation", sc.compressible.relaxation}, {"tolerance", sc.compressible.tolerance},
          {"max_iterations", sc.compressible.max_iterations}};
  }
  if (sc.incompressible) {
    for (const char* key : {"n_r", "n_theta", "far_circumradii", "relaxation", "tolerance", "max_iterations"}) {
      r.require(!r.has(std::string("/solver/") + key), std::string("/solver/") + key, "compressible runs only");
    }
  } else {
    for (const char* key : {"panels_per_side", "plate_panels", "clustering"}) {
      r.require(!r.has(std::string("/solver/") + key), std::string("/solver/") + key, "panel runs only");
    }
  }

  // analyses
  r.object("/analyses", {"corner_fits", "sign_attainment", "far_field", "circulation_check", "forces", "census",
                         "sign_census", "compressible_solve", "refinement_study"});
  r.object("/analyses/refinement_study", {"levels"});
  json& na = n["analyses"];
  const auto incompressible_only = [&](const char* key, bool& target) {
    const std::string p = std::string("/analyses/") + key;
    target = r.flag(p, false);
    r.require(!target || sc.incompressible, p, "incompressible runs only");
    na[key] = target;
  };
  incompressible_only("corner_fits", sc.corner_fits);
  incompressible_only("sign_attainment", sc.sign_attainment);
  incompressible_only("far_field", sc.far_field);
  incompressible_only("circulation_check", sc.circulation_check);
  incompressible_only("forces", sc.forces);
  incompressible_only("census", sc.census);
  incompressible_only("sign_census", sc.sign_census);
  if (sc.mode == FlowMode::sweep) {
    for (const char* key : {"sign_attainment", "far_field", "circulation_check", "sign_census"}) {
      r.require(!na[key].get<bool>(), std::string("/analyses/") + key, "not available with a circulation sweep");
    }
  }
  r.require(!sc.census || !circle, "/analyses/census", "the circle has no corners");
  r.require(!sc.census || sc.method == "panel" || !sc.incompressible, "/analyses/census", "needs the panel method");
  if (!sc.incompressible) {
    sc.compressible_solve = r.flag("/analyses/compressible_solve", true);
    na["compressible_solve"] = sc.compressible_solve;
    if (r.has("/analyses/refinement_study")) {
      std::vector<GridLevel> levels{{64, 128}, {128, 256}, {256, 512}};
      if (const json* lv = r.find("/analyses/refinement_study/levels")) {
        r.require(lv->is_array() && lv->size() >= 3, "/analyses/refinement_study/levels",
                  "expected at least three [n_r, n_theta] pairs");
        levels.clear();
        for (std::size_t k = 0; k < lv->size(); ++k) {
          const std::string p = "/analyses/refinement_study/levels/" + std::to_string(k);
          const json& g = (*lv)[k];
          r.require(g.is_array() && g.size() == 2 && g[0].is_number_integer() && g[1].is_number_integer(), p,
                    "expected [n_r, n_theta]");
          const long long nr = g[0].get<long long>();
          const long long nt = g[1].get<long long>();
          r.require(nr >= 16 && nt >= 16 && nt % 2 == 0, p, "needs n_r >= 16 and even n_theta >= 16");
          levels.push_back({std::size_t(nr), std::size_t(nt)});
        }
      }
      sc.refinement_levels = levels;
      for (const auto& l : levels) na["refinement_study"]["levels"].push_back({l.n_r, l.n_theta});
    }
  } else {
    r.require(!r.has("/analyses/compressible_solve"), "/analyses/compressible_solve", "compressible runs only");
    r.require(!r.has("/analyses/refinement_study"), "/analyses/refinement_study", "compressible runs only");
  }

  // output
  r.object("/output", {"directory", "field", "nodes"});
  r.object("/output/field", {"file", "resolution", "margin_circumradii"});
  sc.directory = r.text("/output/directory", sc.directory);
  r.require(!sc.directory.empty(), "/output/directory", "must not be empty");
  n["output"]["directory"] = sc.directory;
  if (r.has("/output/field")) {
    r.require(sc.incompressible && sc.mode != FlowMode::sweep, "/output/field", "needs a single incompressible flow");
    sc.field_file = r.text("/output/field/file", "field.csv");
    sc.field_resolution = r.count("/output/field/resolution", sc.field_resolution);
    sc.field_margin = r.number("/output/field/margin_circumradii", sc.field_margin);
    r.require(safe_file_name(*sc.field_file), "/output/field/file", "plain file name expected");
    r.require(sc.field_resolution >= 2 && sc.field_resolution <= 4000, "/output/field/resolution",
              "must lie in [2, 4000]");
    r.require(sc.field_margin > 0.0, "/output/field/margin_circumradii", "must be positive");
    n["output"]["field"] = {
        {"file", *sc.field_file}, {"resolution", sc.field_resolution}, {"margin_circumradii", sc.field_margin}};
  }
  if (r.has("/output/nodes")) {
    r.require(!sc.incompressible && sc.compressible_solve, "/output/nodes", "needs a compressible solve");
    sc.nodes_file = r.text("/output/nodes");
    r.require(safe_file_name(*sc.nodes_file), "/output/nodes", "plain file name expected");
    n["output"]["nodes"] = *sc.nodes_file;
  }

  // tolerances
  r.object("/tolerances",
           {"tol_a1", "fit_modes", "fit_samples", "far_field_residual", "coincidence_factor", "sign_resolution"});
  sc.fit.tol_a1 = r.number("/tolerances/tol_a1", sc.fit.tol_a1);
  sc.fit.modes = r.count("/tolerances/fit_modes", sc.fit.modes);
  sc.fit_samples = r.count("/tolerances/fit_samples", sc.fit_samples);
  sc.far_field_residual = r.number("/tolerances/far_field_residual", sc.far_field_residual);
  sc.coincidence_factor = r.number("/tolerances/coincidence_factor", sc.coincidence_factor);
  sc.sign_resolution = r.count("/tolerances/sign_resolution", sc.sign_resolution);
  r.require(sc.fit.tol_a1 > 0.0, "/tolerances/tol_a1", "must be positive");
  r.require(sc.fit.modes >= 1 && sc.fit.modes <= 12, "/tolerances/fit_modes", "must lie in [1, 12]");
  r.require(sc.fit_samples >= 8, "/tolerances/fit_samples", "must be at least 8");
  r.require(sc.far_field_residual > 0.0, "/tolerances/far_field_residual", "must be positive");
  r.require(sc.coincidence_factor >= 0.0, "/tolerances/coincidence_factor", "must be non-negative");
  r.require(sc.sign_resolution >= 8 && sc.sign_resolution <= 4000, "/tolerances/sign_resolution",
            "must lie in [8, 4000]");
  n["tolerances"] = {{"tol_a1", sc.fit.tol_a1},
                     {"fit_modes", sc.fit.modes},
                     {"fit_samples", sc.fit_samples},
                     {"far_field_residual", sc.far_field_residual},
                     {"coincidence_factor", sc.coincidence_factor},
                     {"sign_resolution", sc.sign_resolution}};
  return sc;
}

// ---- summary pieces --------------------------------------------------------------------

json complex_json(Point z) { return json::array({z.real(), z.imag()}); }

json error_json(const Error& e) {
  json out{{"kind", std::string(to_string(e.kind()))}, {"message", e.what()}, {"details", json::object()}};
  for (const auto& [key, value] : e.details()) out["details"][key] = value;
  return out;
}

json corner_json(const CornerReport& c) {
  return {{"corner_id", c.corner_id},
          {"beta", c.beta},
          {"expected_exponent", c.expected_exponent},
          {"fitted_exponent", c.fitted_exponent},
          {"a1", c.a1},
          {"a1_uncertainty", c.a1_uncertainty},
          {"threshold", c.threshold},
          {"singular", c.singular},
          {"modes", c.modes},
          {"condition", c.condition},
          {"residual", c.residual},
          {"radii", c.radii}};
}

json root_json(const KuttaRoot& k) {
  return {{"corner_id", k.corner_id}, {"circulation", k.circulation}, {"uncertainty", k.uncertainty},
          {"a1_at_zero", k.a1_at_zero}, {"slope", k.slope},           {"threshold", k.threshold},
          {"degenerate", k.degenerate}};
}

json panel_json(const PanelSolution& s) {
  json out{{"panels", s.geometry->panel_count()},
           {"rcond", s.rcond},
           {"tangency_residual", s.tangency_residual},
           {"dropped_row_residual", s.dropped_row_residual},
           {"stream_offset", s.stream_offset},
           {"stream_spread", s.stream_spread}};
  out["dropped_row"] = s.dropped_row ? json(*s.dropped_row) : json(nullptr);
  return out;
}

// Kutta root of an exact plate flow from the affine edge coefficient.
double plate_kutta_root(const Body& body, Point w_inf, std::size_t corner) {
  const auto& shape = std::get<FlatPlateShape>(body.shape());
  const auto k0 = plate_edge_coefficients(shape.chord, shape.alpha, {w_inf, 0.0});
  const auto k1 = plate_edge_coefficients(shape.chord, shape.alpha, {w_inf, 1.0});
  const Point a = corner == 0 ? k0.trailing : k0.leading;
  const Point b = corner == 0 ? k1.trailing : k1.leading;
  return -a.imag() / (b - a).imag();
}

class Runner {
 public:
  Runner(const Scenario& sc, const fs::path& dir, std::ostream& log, int verbosity)
      : sc_(sc), dir_(dir), log_(log), verbosity_(verbosity) {}

  void run(json& out) {
    if (sc_.incompressible) {
      incompressible(out);
    } else {
      compressible(out);
    }
  }

 private:
  void note(const std::string& msg) const {
    if (verbosity_ >= 2) log_ << sc_.name << ": " << msg << '\n';
  }

  const Body& body() const { return *sc_.body; }

  CensusOptions census_options() const {
    CensusOptions o;
    o.panels = sc_.panels;
    o.fit = sc_.fit;
    o.samples = sc_.fit_samples;
    o.coincidence_factor = sc_.coincidence_factor;
    return o;
  }

  json corner_fits(const ComplexFlow& flow, bool with_signs) const {
    json list = json::array();
    for (std::size_t id = 0; id < body().corners().size(); ++id) {
      const auto radii = default_fit_radii(body(), id);
      json c = corner_json(fit_corner(flow, body(), id, radii, sc_.fit_samples, sc_.fit));
      if (with_signs) {
        const auto s = sign_attainment(flow, body().corners()[id], radii.front(),
                                       std::max<std::size_t>(64, sc_.fit_samples));
        c["sign_attainment"] = {{"verdict", std::string(to_string(s.verdict))}, {"radii", s.radii},
                                {"psi_min", s.psi_min},                          {"psi_max", s.psi_max},
                                {"tolerance", s.tolerance}};
      }
      list.push_back(c);
    }
    return list;
  }

  json forces(const ComplexFlow& flow, Point w_inf, double gamma) const {
    const double rc = body().circumradius();
    const auto f = blasius_force(flow, Contour::circle(body().centroid(), 2.0 * rc, 1024), 1.0);
    return {{"drag", f.drag},
            {"lift", f.lift},
            {"fx", f.fx},
            {"fy", f.fy},
            {"error_estimate", f.error_estimate},
            {"contour_radius", f.contour_radius},
            {"kutta_joukowsky_lift", kutta_joukowsky_lift(1.0, w_inf, gamma)}};
  }

  void incompressible(json& out) {
    const Point w_inf = std::polar(sc_.speed, -sc_.angle_deg * pi / 180.0);
    const bool panel = sc_.method == "panel";
    std::optional<PanelSystem> system;
    if (panel) {
      note("factorising the panel system");
      system.emplace(body(), w_inf, sc_.panels);
      out["panel_system"] = {{"panels", system->geometry().panel_count()}, {"rcond", system->rcond()}};
    }
    const auto make_flow = [&](double gamma) {
      if (panel) return ComplexFlow::panel(system->solve(gamma));
      if (body().is_circle()) return ComplexFlow::circle(std::get<CircleShape>(body().shape()).radius, {w_inf, gamma});
      const auto& shape = std::get<FlatPlateShape>(body().shape());
      return ComplexFlow::plate(shape.chord, shape.alpha, {w_inf, gamma});
    };

    if (sc_.census) {
      note("corner census");
      const auto c = corner_census(body(), w_inf, census_options());
      json census{{"corners", c.corners},
                  {"max_simultaneously_regular", c.max_simultaneously_regular},
                  {"min_singular", c.min_singular},
                  {"all_regular_possible", c.all_regular_possible},
                  {"degenerate_coincidence", c.degenerate_coincidence},
                  {"sweep_min_singular", c.sweep_min_singular},
                  {"verdict", std::string(c.verdict())}};
      census["roots"] = json::array();
      for (const auto& k : c.roots) census["roots"].push_back(root_json(k));
      census["sweep"] = json::array();
      for (const auto& e : c.sweep) census["sweep"].push_back({{"circulation", e.circulation}, {"singular", e.singular}});
      out["census"] = census;
    }

    if (sc_.mode == FlowMode::sweep) {
      json entries = json::array();
      for (std::size_t k = 0; k < sc_.sweep_count; ++k) {
        const double t = double(k) / double(sc_.sweep_count - 1);
        const double gamma = (1.0 - t) * sc_.sweep_from + t * sc_.sweep_to;
        const auto flow = make_flow(gamma);
        json e{{"circulation", gamma}};
        if (sc_.corner_fits) {
          e["corners"] = corner_fits(flow, false);
          std::vector<std::size_t> singular;
          for (const auto& c : e["corners"]) {
            if (c["singular"].get<bool>()) singular.push_back(c["corner_id"].get<std::size_t>());
          }
          e["singular"] = singular;
        }
        if (sc_.forces) e["forces"] = forces(flow, w_inf, gamma);
        entries.push_back(e);
      }
      out["sweep"] = entries;
      return;
    }

    double gamma = sc_.circulation;
    if (sc_.mode == FlowMode::kutta) {
      if (panel) {
        note("Kutta root");
        const auto root = kutta_solve(*system, sc_.kutta_corner, census_options());
        gamma = root.circulation;
        out["kutta"] = root_json(root);
      } else {
        gamma = plate_kutta_root(body(), w_inf, sc_.kutta_corner);
        out["kutta"] = {{"corner_id", sc_.kutta_corner}, {"circulation", gamma}};
      }
      if (body().is_flat_plate()) out["kutta"]["conformal_circulation"] = plate_kutta_root(body(), w_inf, sc_.kutta_corner);
    }
    const auto flow = make_flow(gamma);
    out["flow"] = {{"kind", std::string(flow.kind_name())}, {"w_inf", complex_json(w_inf)}, {"circulation", gamma}};
    if (const auto* s = flow.panel_solution()) out["panel"] = panel_json(*s);

    const double rc = body().circumradius();
    if (sc_.corner_fits || sc_.sign_attainment) {
      note("corner fits");
      out["corners"] = corner_fits(flow, sc_.sign_attainment);
    }
    if (sc_.circulation_check) {
      note("loop integrals");
      json loops = json::array();
      for (const double f : {1.5, 3.0, 6.0}) {
        const auto li = loop_integral(flow, Contour::circle(body().centroid(), f * rc, 1024));
        loops.push_back({{"radius", f * rc},
                         {"circulation", li.circulation},
                         {"mass_flux", li.mass_flux},
                         {"error_estimate", li.error_estimate}});
      }
      out["circulation_check"] = loops;
    }
    if (sc_.far_field) {
      note("far-field fit");
      const double radii[] = {5.0 * rc, 6.5 * rc, 8.0 * rc};
      const auto lf = farfield_fit(flow, radii, 256, {sc_.far_field_residual});
      out["far_field"] = {{"c0", complex_json(lf.c0)},         {"c1", complex_json(lf.c1)},
                          {"c2", complex_json(lf.c2)},         {"residual", lf.residual},
                          {"gamma_estimate", lf.gamma_estimate}, {"radii", radii}};
    }
    if (sc_.forces) {
      note("forces");
      out["forces"] = forces(flow, w_inf, gamma);
    }
    if (sc_.sign_census) {
      note("sign-component census");
      const auto s = sign_component_census(flow, window_around(body()), sc_.sign_resolution);
      out["sign_census"] = {{"resolution", sc_.sign_resolution},
                            {"bounded_positive", s.bounded_positive},
                            {"bounded_negative", s.bounded_negative},
                            {"components_positive", s.components_positive},
                            {"components_negative", s.components_negative},
                            {"masked_cells", s.masked_cells},
                            {"unsigned_cells", s.unsigned_cells},
                            {"tolerance", s.tolerance},
                            {"inconclusive", s.inconclusive}};
    }
    if (sc_.field_file) {
      note("field export");
      export_field(flow, window_around(body(), sc_.field_margin), sc_.field_resolution, (dir_ / *sc_.field_file).string());
      out["files"].push_back(*sc_.field_file);
    }
  }

  void compressible(json& out) {
    const GasModel gas(sc_.gamma);
    const auto state = BernoulliState::from_free_stream(gas, sc_.mach);
    const Point w_inf{state.free_stream_speed(), 0.0};
    double gamma = sc_.circulation;
    if (sc_.mode == FlowMode::kutta) gamma = plate_kutta_root(body(), w_inf, sc_.kutta_corner);
    out["flow"] = {{"kind", "compressible"}, {"w_inf", complex_json(w_inf)}, {"circulation", gamma},
                   {"mach_inf", sc_.mach}, {"rho_inf", 1.0}};

    if (sc_.compressible_solve) {
      note("compressible solve");
      const auto grid = ConformalGrid::build(body(), sc_.far_circumradii * body().circumradius(), sc_.n_r, sc_.n_theta);
      CompressibleOptions opts = sc_.compressible;
      try {
        const auto sol = solve_subsonic(grid, gas, state, {w_inf, gamma}, opts);
        json log = json::array();
        for (const auto& it : sol.log) {
          log.push_back({{"residual", it.residual},
                         {"linear_residual", it.linear_residual},
                         {"max_flux_ratio", it.max_flux_ratio}});
        }
        const Point zmax = grid.z(sol.max_mach_i, sol.max_mach_j);
        out["compressible"] = {{"converged", sol.converged},
                               {"residual", sol.residual},
                               {"iterations", sol.log.size()},
                               {"max_mach", sol.max_mach},
                               {"max_mach_location", complex_json(zmax)},
                               {"corner_max_mach", sol.corner_max_mach},
                               {"first_flux_ratio", sol.first_flux_ratio},
                               {"non_physical", sol.non_physical},
                               {"log", log}};
        if (sc_.nodes_file) {
          export_nodes(sol, (dir_ / *sc_.nodes_file).string());
          out["files"].push_back(*sc_.nodes_file);
        }
      } catch (const Error& e) {
        // The study below may still be informative; record and rethrow after it.
        out["compressible"] = {{"converged", false}, {"error", error_json(e)}};
        pending_ = e;
      }
    }
    if (sc_.refinement_levels) {
      note("refinement study");
      const auto study = refinement_study(body(), gas, sc_.mach, gamma, *sc_.refinement_levels, sc_.far_circumradii,
                                          sc_.compressible);
      json levels = json::array();
      for (const auto& l : study.levels) {
        levels.push_back({{"n_r", l.grid.n_r},
                          {"n_theta", l.grid.n_theta},
                          {"spacing", l.spacing},
                          {"status", l.status},
                          {"message", l.message},
                          {"max_mach", l.max_mach},
                          {"corner_max_mach", l.corner_max_mach},
                          {"first_flux_ratio", l.first_flux_ratio},
                          {"iterations", l.iterations}});
      }
      out["refinement_study"] = {{"levels", levels},
                                 {"blow_up_signature", study.corner_mach_increasing || study.sonic_abort_at_finest},
                                 {"corner_mach_increasing", study.corner_mach_increasing},
                                 {"flux_ratio_increasing", study.flux_ratio_increasing},
                                 {"sonic_abort_at_finest", study.sonic_abort_at_finest},
                                 {"corner_mach_constant", study.corner_mach_constant},
                                 {"cauchy_differences", study.cauchy_differences},
                                 {"cauchy_shrinking", study.cauchy_shrinking}};
    }
    if (pending_) throw *pending_;
  }

  const Scenario& sc_;
  fs::path dir_;
  std::ostream& log_;
  int verbosity_;
  std::optional<Error> pending_;
};

bool write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
  f.flush();
  return bool(f);
}

}  // namespace

std::string validate_scenario(const std::string& config_text, const std::vector<std::string>& overrides) {
  return parse(config_text, overrides).normalised.dump(2);
}

RunResult run_scenario(const std::string& config_path, const RunOptions& options) {
  std::ostream& log = options.log ? *options.log : std::cerr;
  RunResult result;
  json summary{{"schema_version", 1}, {"config", config_path}};

  const auto finish = [&](const fs::path& dir) {
    result.summary = summary.dump(2) + "\n";
    if (!dir.empty()) {
      const fs::path path = dir / "summary.json";
      if (write_text(path, result.summary)) {
        result.summary_path = path.string();
      } else if (options.verbosity >= 1) {
        log << "cannot write " << path.string() << '\n';
      }
    }
    return result;
  };

  std::string text;
  {
    std::ifstream f(config_path, std::ios::binary);
    if (!f) {
      if (options.verbosity >= 1) log << config_path << ": cannot read config\n";
      result.exit_code = 2;
      summary["status"] = "config_error";
      summary["error"] = error_json(Error(ErrorKind::config, "cannot read " + config_path));
      return finish(options.out_dir ? fs::path(*options.out_dir) : fs::path());
    }
    std::ostringstream ss;
    ss << f.rdbuf();
    text = ss.str();
  }

  std::optional<Scenario> sc;
  try {
    sc = parse(text, options.overrides);
  } catch (const ConfigError& e) {
    if (options.verbosity >= 1) log << config_path << ": " << e.what() << '\n';
    result.exit_code = 2;
    summary["status"] = "config_error";
    summary["error"] = error_json(e);
    summary["error"]["line"] = e.line();
    fs::path dir;
    if (options.out_dir) {
      std::error_code ec;
      fs::create_directories(*options.out_dir, ec);
      if (!ec) dir = *options.out_dir;
    }
    return finish(dir);
  }

  const fs::path dir = options.out_dir ? fs::path(*options.out_dir) : fs::path(sc->directory);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    if (options.verbosity >= 1) log << dir.string() << ": output directory is not writable\n";
    result.exit_code = 2;
    summary["status"] = "config_error";
    summary["error"] = error_json(Error(ErrorKind::io, "cannot create output directory " + dir.string()));
    return finish({});
  }

  summary["name"] = sc->name;
  summary["scenario"] = sc->normalised;
  json body{{"type", sc->body_type}, {"circumradius", sc->body->circumradius()},
            {"centroid", complex_json(sc->body->centroid())}, {"corners", json::array()}};
  for (std::size_t k = 0; k < sc->body->corners().size(); ++k) {
    const Corner& c = sc->body->corners()[k];
    body["corners"].push_back(
        {{"id", k}, {"vertex", complex_json(c.vertex)}, {"beta", c.beta}, {"protruding", c.protruding}});
  }
  summary["body"] = body;
  summary["results"] = json::object();
  try {
    Runner(*sc, dir, log, options.verbosity).run(summary["results"]);
    summary["status"] = "ok";
  } catch (const Error& e) {
    result.exit_code = 1;
    summary["status"] = "solver_error";
    summary["error"] = error_json(e);
  } catch (const std::exception& e) {
    result.exit_code = 1;
    summary["status"] = "solver_error";
    summary["error"] = {{"kind", "internal"}, {"message", e.what()}, {"details", json::object()}};
  }
  finish(dir);
  if (options.verbosity >= 1) {
    log << sc->name << ": " << summary["status"].get<std::string>();
    if (result.exit_code == 1) log << " (" << summary["error"]["kind"].get<std::string>() << ": "
                                   << summary["error"]["message"].get<std::string>() << ')';
    log << " -> " << (result.summary_path.empty() ? "(summary not written)" : result.summary_path) << '\n';
  }
  return result;
}

}  // namespace cornerflow
