#include "run_config.hpp"

#include <cmath>

namespace threelines::cli {

namespace {

template <class T>
void read(const json& doc, const char* key, T& into) {
  if (doc.contains(key)) into = doc.at(key).get<T>();
}

Vec3 vec3(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) throw ConfigError(std::string(what) + " must be an array of three numbers");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

const char* to_string(Mode m) {
  switch (m) {
    case Mode::classify:
      return "classify";
    case Mode::solve:
      return "solve";
    case Mode::build_surface:
      return "build-surface";
    case Mode::build_trinoid:
      return "build-trinoid";
    case Mode::verify:
      return "verify";
  }
  return "?";
}

std::string branch_string(const std::array<int, 3>& b) {
  std::string s;
  for (int x : b) s += x > 0 ? '+' : '-';
  return s;
}

std::array<int, 3> parse_branch(const std::string& s) {
  if (s.size() != 3) throw ConfigError("branch filter must look like \"+-+\", got \"" + s + "\"");
  std::array<int, 3> b{};
  for (int i = 0; i < 3; ++i) {
    if (s[i] != '+' && s[i] != '-') throw ConfigError("branch filter must look like \"+-+\", got \"" + s + "\"");
    b[i] = s[i] == '+' ? 1 : -1;
  }
  return b;
}

json to_json(const Tolerances& t) {
  return {{"system_residual", t.system_residual},
          {"wronskian", t.wronskian},
          {"path_independence", t.path_independence},
          {"collinearity", t.collinearity},
          {"signed_distance", t.signed_distance},
          {"end_fit", t.end_fit},
          {"classify_round_trip", t.classify_round_trip},
          {"lambda_hat", t.lambda_hat},
          {"det_drift", t.det_drift},
          {"plane_residual", t.plane_residual},
          {"plane_coincidence", t.plane_coincidence},
          {"embeddedness", t.embeddedness},
          {"distinctness", t.distinctness},
          {"growth", t.growth}};
}

json to_json(const geometry::TripleConfig& c) {
  return {{"alpha0", c.alpha0}, {"gamma0", c.gamma0}, {"beta0", c.beta0}, {"A", c.A},
          {"B", c.B},           {"C", c.C},           {"eps0", c.eps0}};
}

json to_json(const geometry::LineTriple& l) {
  json out = json::array();
  for (const auto& d : l) {
    out.push_back({{"point", {d.point.x(), d.point.y(), d.point.z()}},
                   {"direction", {d.direction.x(), d.direction.y(), d.direction.z()}}});
  }
  return out;
}

json to_json(const geometry::Lifted& l) { return {{"alpha", l.alpha}, {"beta", l.beta}, {"gamma", l.gamma}}; }

geometry::TripleConfig config_from_json(const json& j) {
  geometry::TripleConfig c;
  for (const char* k : {"alpha0", "gamma0", "beta0", "A", "B", "C", "eps0"}) {
    if (!j.contains(k)) throw ConfigError(std::string("configuration is missing \"") + k + "\"");
  }
  c.alpha0 = j.at("alpha0").get<double>();
  c.gamma0 = j.at("gamma0").get<double>();
  c.beta0 = j.at("beta0").get<double>();
  c.A = j.at("A").get<double>();
  c.B = j.at("B").get<double>();
  c.C = j.at("C").get<double>();
  c.eps0 = j.at("eps0").get<int>();
  if (c.eps0 != 1 && c.eps0 != -1) throw ConfigError("eps0 must be 1 or -1");
  return c;
}

geometry::LineTriple lines_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) throw ConfigError("\"lines\" must hold three lines");
  geometry::LineTriple out;
  for (int k = 0; k < 3; ++k) {
    out[k] = geometry::make_line(vec3(j[k].at("point"), "point"), vec3(j[k].at("direction"), "direction"));
  }
  return out;
}

void apply_json(const json& doc, RunConfig& cfg) {
  if (!doc.is_object()) throw ConfigError("configuration must be a JSON object");
  try {
    if (doc.contains("lines")) cfg.lines = lines_from_json(doc.at("lines"));
    if (doc.contains("config")) cfg.config = config_from_json(doc.at("config"));
    if (doc.contains("mu")) {
      const auto& m = doc.at("mu");
      if (!m.is_array() || m.size() != 3) throw ConfigError("\"mu\" must hold three numbers");
      cfg.mu = std::array<double, 3>{m[0].get<double>(), m[1].get<double>(), m[2].get<double>()};
    }
    if (doc.contains("lifted")) {
      const auto& l = doc.at("lifted");
      cfg.lifted = geometry::Lifted{l.at("alpha").get<double>(), l.at("beta").get<double>(), l.at("gamma").get<double>()};
    }
    read(doc, "out", cfg.out_dir);
    read(doc, "resolution", cfg.resolution);
    read(doc, "threads", cfg.threads);
    read(doc, "solution", cfg.solution);
    read(doc, "flip_reflection", cfg.flip_reflection);
    read(doc, "emit_lines", cfg.emit_lines);
    read(doc, "formats", cfg.formats);
    read(doc, "seed", cfg.seed);
    read(doc, "samples", cfg.samples);
    read(doc, "perturb_pqr", cfg.perturb_pqr);
    if (doc.contains("branches")) {
      cfg.branches.clear();
      for (const auto& b : doc.at("branches")) cfg.branches.push_back(parse_branch(b.get<std::string>()));
    }
    if (doc.contains("window")) {
      const auto& w = doc.at("window");
      read(w, "x_min", cfg.window.x_min);
      read(w, "x_max", cfg.window.x_max);
      read(w, "y_max", cfg.window.y_max);
      read(w, "r_excl", cfg.window.r_excl);
    }
    read(doc, "r_excl", cfg.window.r_excl);
    if (doc.contains("tolerances")) {
      const auto& t = doc.at("tolerances");
      Tolerances& o = cfg.tol;
      read(t, "system_residual", o.system_residual);
      read(t, "wronskian", o.wronskian);
      read(t, "path_independence", o.path_independence);
      read(t, "collinearity", o.collinearity);
      read(t, "signed_distance", o.signed_distance);
      read(t, "end_fit", o.end_fit);
      read(t, "classify_round_trip", o.classify_round_trip);
      read(t, "lambda_hat", o.lambda_hat);
      read(t, "det_drift", o.det_drift);
      read(t, "plane_residual", o.plane_residual);
      read(t, "plane_coincidence", o.plane_coincidence);
      read(t, "embeddedness", o.embeddedness);
      read(t, "distinctness", o.distinctness);
      read(t, "growth", o.growth);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed configuration: ") + e.what());
  }
}

void check(const RunConfig& cfg) {
  const int forms = cfg.lines.has_value() + cfg.config.has_value() + cfg.mu.has_value();
  if (forms != 1) throw ConfigError("supply exactly one of \"lines\", \"config\" or \"mu\"");
  const json t = to_json(cfg.tol);
  for (const auto& [k, v] : t.items()) {
    if (!(v.get<double>() > 0.0)) throw ConfigError("tolerance \"" + k + "\" must be positive");
  }
  if (cfg.resolution < 2) throw ConfigError("resolution must be at least 2");
  if (!(cfg.window.r_excl > 0.0)) throw ConfigError("r_excl must be positive");
  if (cfg.samples < 1) throw ConfigError("samples must be positive");
  for (const auto& f : cfg.formats) {
    if (f != "obj" && f != "ply") throw ConfigError("unknown mesh format \"" + f + "\"");
  }
}

}  // namespace threelines::cli
