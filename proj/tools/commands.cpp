#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "CLI11.hpp"
#include "threelines/error.hpp"
#include "threelines/solver.hpp"
#include "threelines/surface.hpp"
#include "threelines/trinoid.hpp"

namespace threelines::cli {

namespace fs = std::filesystem;
using surface::End;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr std::array<End, 3> kEnds{End::zero, End::one, End::infinity};

double rel(double got, double want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); }

json complex_json(cplx z) {
  if (std::isinf(z.real()) || std::isinf(z.imag())) return "inf";
  return json::array({z.real(), z.imag()});
}

json solution_json(const solver::PqrSolution& s, const geometry::Lifted& l) {
  const auto abc = solver::pqr_to_abc(s.p, s.q, s.r, l);
  const auto hat = solver::hat_lambda_values(s.p, s.q, s.r, s.eps, l);
  return {{"p", s.p},
          {"q", s.q},
          {"r", s.r},
          {"eps", s.eps},
          {"branch", branch_string(s.branch)},
          {"y", s.y},
          {"residual", s.residual},
          {"abc", {{"a", abc.a}, {"b", abc.b}, {"c", abc.c}}},
          {"lambda_hat", {{"at0", hat.at0}, {"at1", hat.at1}}},
          {"flags", s.flags}};
}

fs::path out_path(const RunConfig& cfg, const std::string& name) { return fs::path(cfg.out_dir) / name; }

void ensure_out_dir(const RunConfig& cfg) {
  if (!cfg.out_dir.empty()) fs::create_directories(cfg.out_dir);
}

// Writes the result document next to the meshes when an output directory is set.
void emit(const RunConfig& cfg, const json& result, std::ostream& out) {
  out << result.dump(2) << '\n';
  if (cfg.out_dir.empty()) return;
  ensure_out_dir(cfg);
  std::string name = to_string(cfg.mode);
  std::ofstream f(out_path(cfg, name + ".json"));
  f << result.dump(2) << '\n';
}

std::vector<std::string> write_meshes(const RunConfig& cfg, const std::string& stem, const SurfaceMesh& mesh) {
  std::vector<std::string> files;
  if (cfg.out_dir.empty()) return files;
  ensure_out_dir(cfg);
  for (const auto& fmt : cfg.formats) {
    const fs::path p = out_path(cfg, stem + "." + fmt);
    std::ofstream f(p, fmt == "ply" ? std::ios::binary : std::ios::out);
    if (fmt == "ply") {
      write_ply(f, mesh);
    } else {
      write_obj(f, mesh);
    }
    if (!f) throw std::runtime_error("could not write " + p.string());
    files.push_back(p.string());
  }
  return files;
}

struct MinimalSetup {
  geometry::TripleConfig cfg;
  solver::Prepared prep;
  std::vector<solver::PqrSolution> solutions;
};

MinimalSetup minimal_setup(const RunConfig& rc) {
  MinimalSetup s;
  s.cfg = rc.config ? *rc.config : geometry::classify_triple(*rc.lines);
  const geometry::Lifted l = rc.lifted ? *rc.lifted : geometry::Lifted{s.cfg.alpha0, s.cfg.beta0, s.cfg.gamma0};
  s.prep = solver::prepare(s.cfg, l, rc.flip_reflection);
  for (auto& sol : solver::solve_pqr(s.prep.ends, s.prep.eps)) {
    const bool keep = rc.branches.empty() || std::find(rc.branches.begin(), rc.branches.end(), sol.branch) != rc.branches.end();
    if (keep) s.solutions.push_back(sol);
  }
  return s;
}

trinoid::TrinoidSpec trinoid_spec(const RunConfig& rc) {
  trinoid::TrinoidSpec spec{(*rc.mu)[0], (*rc.mu)[1], (*rc.mu)[2], rc.lifted};
  trinoid::validate(spec);
  if (!trinoid::growth_check(spec).in_K) throw InvalidInput("reduced growth data is not in K");
  return spec;
}

const solver::PqrSolution& chosen(const RunConfig& rc, const MinimalSetup& s) {
  if (rc.solution < 0 || rc.solution >= static_cast<int>(s.solutions.size())) {
    throw InvalidInput("solution index " + std::to_string(rc.solution) + " out of range (" +
                       std::to_string(s.solutions.size()) + " solutions)");
  }
  return s.solutions[rc.solution];
}

// -------------------------------------------------------------------------------------------------

int cmd_classify(const RunConfig& rc, std::ostream& out) {
  json result;
  if (rc.lines) {
    const auto cfg = geometry::classify_triple(*rc.lines);
    result["config"] = to_json(cfg);
    if (rc.emit_lines) {
      const auto lines = geometry::lines_from_config(cfg);
      const auto back = geometry::classify_triple(lines);
      const double d = std::max({std::abs(back.alpha0 - cfg.alpha0), std::abs(back.beta0 - cfg.beta0),
                                 std::abs(back.gamma0 - cfg.gamma0), rel(back.A, cfg.A), rel(back.B, cfg.B),
                                 rel(back.C, cfg.C)});
      result["lines"] = to_json(lines);
      result["round_trip"] = {{"config", to_json(back)},
                              {"max_difference", d},
                              {"tolerance", rc.tol.classify_round_trip},
                              {"preserved", d <= rc.tol.classify_round_trip && back.eps0 == cfg.eps0}};
    }
  } else if (rc.config) {
    result["config"] = to_json(*rc.config);
    if (rc.emit_lines) result["lines"] = to_json(geometry::lines_from_config(*rc.config));
  } else {
    throw InvalidInput("classify needs \"lines\" or \"config\"");
  }
  emit(rc, result, out);
  return Exit::ok;
}

int cmd_solve(const RunConfig& rc, std::ostream& out) {
  json result;
  result["tolerances"] = to_json(rc.tol);
  if (rc.mu) {
    const auto spec = trinoid_spec(rc);
    const auto cd = trinoid::cousin_data(spec);
    const auto admissible = trinoid::trinoid_pqr(spec);
    json sols = json::array();
    for (auto sol : solver::solve_pqr(cd.prep.ends, cd.prep.eps)) {
      if (!rc.branches.empty() && std::find(rc.branches.begin(), rc.branches.end(), sol.branch) == rc.branches.end()) continue;
      const auto& a = admissible.pqr;
      if (std::abs(sol.p - a.p) < 1e-9 && std::abs(sol.q - a.q) < 1e-9 && std::abs(sol.r - a.r) < 1e-9) {
        sol.flags.push_back("trinoid_admissible");
      }
      sols.push_back(solution_json(sol, cd.prep.lifted));
    }
    result["mu"] = *rc.mu;
    result["config"] = to_json(cd.cfg);
    result["lifted"] = to_json(cd.prep.lifted);
    result["eps"] = cd.prep.eps;
    result["solutions"] = sols;
  } else {
    const auto s = minimal_setup(rc);
    json sols = json::array();
    for (const auto& sol : s.solutions) sols.push_back(solution_json(sol, s.prep.lifted));
    result["config"] = to_json(s.cfg);
    result["lifted"] = to_json(s.prep.lifted);
    result["eps"] = s.prep.eps;
    result["solutions"] = sols;
  }
  if (result["solutions"].empty()) {
    result["message"] = "no real solution found";
    emit(rc, result, out);
    return Exit::empty_result;
  }
  emit(rc, result, out);
  return Exit::ok;
}

struct SurfaceBuild {
  MinimalSetup setup;
  solver::PqrSolution solution;
  SurfaceMesh mesh;
};

int cmd_build_surface(const RunConfig& rc, std::ostream& out) {
  if (rc.mu) throw InvalidInput("build-surface needs \"lines\" or \"config\"");
  const auto s = minimal_setup(rc);
  if (s.solutions.empty()) {
    emit(rc, {{"config", to_json(s.cfg)}, {"solutions", json::array()}, {"message", "no real solution found"}}, out);
    return Exit::empty_result;
  }
  const auto& sol = chosen(rc, s);
  const surface::WeierstrassEvaluator ev(s.prep, solver::pqr_to_abc(sol.p, sol.q, sol.r, s.prep.lifted));
  surface::MeshOptions mo;
  mo.resolution = rc.resolution;
  mo.window = rc.window;
  mo.threads = rc.threads;
  const SurfaceMesh mesh = surface::generate_mesh(ev, mo);

  json lines = json::array();
  geometry::LineTriple fitted;
  std::ofstream csv;
  if (!rc.out_dir.empty()) {
    ensure_out_dir(rc);
    csv.open(out_path(rc, "surface_boundary.csv"));
    csv << "segment,z,x1,x2,x3,distance_to_fit\n";
    csv.precision(17);
  }
  for (int tag = 1; tag <= 3; ++tag) {
    const auto f = surface::fit_line(mesh, tag);
    fitted[tag - 1] = f.line;
    lines.push_back({{"segment", tag},
                     {"point", {f.line.point.x(), f.line.point.y(), f.line.point.z()}},
                     {"direction", {f.line.direction.x(), f.line.direction.y(), f.line.direction.z()}},
                     {"residual", f.residual},
                     {"max_deviation", f.max_deviation},
                     {"scale", f.scale}});
    if (csv.is_open()) {
      for (int id : mesh.tagged(tag)) {
        const Vec3 d = mesh.vertices[id].x - f.line.point;
        const double dist = (d - d.dot(f.line.direction) * f.line.direction).norm();
        const Vec3& x = mesh.vertices[id].x;
        csv << tag << ',' << mesh.vertices[id].z.real() << ',' << x.x() << ',' << x.y() << ',' << x.z() << ',' << dist
            << '\n';
      }
    }
  }
  json ends = json::array();
  for (End e : kEnds) {
    const auto a = surface::fit_end_asymptotics(ev, e);
    ends.push_back({{"end", surface::to_string(e)}, {"A", a.A}, {"alpha", a.alpha}, {"residual", a.residual}});
  }
  json result{{"config", to_json(s.cfg)},
              {"lifted", to_json(s.prep.lifted)},
              {"solution", solution_json(sol, s.prep.lifted)},
              {"resolution", rc.resolution},
              {"r_excl", rc.window.r_excl},
              {"vertices", mesh.vertices.size()},
              {"faces", mesh.faces.size()},
              {"lines", lines},
              {"end_fits", ends},
              {"notes", mesh.notes},
              {"tolerances", to_json(rc.tol)}};
  try {
    result["classified"] = to_json(geometry::classify_triple(fitted));
  } catch (const DegenerateInput& e) {
    result["classified"] = {{"error", e.what()}, {"test", e.test()}};
  }
  result["files"] = write_meshes(rc, "surface", mesh);
  emit(rc, result, out);
  return Exit::ok;
}

int cmd_build_trinoid(const RunConfig& rc, std::ostream& out) {
  if (!rc.mu) throw InvalidInput("build-trinoid needs \"mu\"");
  const auto spec = trinoid_spec(rc);
  const auto gc = trinoid::growth_check(spec);
  const auto cd = trinoid::cousin_data(spec);
  trinoid::TrinoidMeshOptions mo;
  mo.mesh.resolution = rc.resolution;
  mo.mesh.window = rc.window;
  mo.mesh.threads = rc.threads;
  const auto tm = trinoid::trinoid_mesh(cd, mo);
  const auto dist = trinoid::boundary_distinctness(spec, rc.tol.distinctness);
  const auto boundary = trinoid::asymptotic_boundary_points(cd.ev);

  json points = json::array(), embedded = json::array();
  for (cplx b : boundary) points.push_back(complex_json(b));
  bool all_embedded = true;
  for (End e : kEnds) {
    const auto c = trinoid::embeddedness_check(cd.ev, e, rc.tol.embeddedness);
    embedded.push_back({{"end", surface::to_string(e)}, {"c_minus2", c.c_minus2}, {"c_minus1", c.c_minus1}, {"embedded", c.embedded}});
    all_embedded = all_embedded && c.embedded;
  }
  double plane_residual = 0;
  for (const auto& p : tm.planes) plane_residual = std::max(plane_residual, p.residual);
  const bool all_distinct = dist.distinct[0] && dist.distinct[1] && dist.distinct[2];

  json result{{"growths", {1 - spec.mu0, 1 - spec.mu1, 1 - spec.mu_inf}},
              {"mu", *rc.mu},
              {"in_K", gc.in_K},
              {"nondegenerate", gc.nondegenerate},
              {"boundary_points", points},
              {"distinct", dist.distinct},
              {"distinct_by_gauss", dist.distinct_by_gauss},
              {"det_drift", tm.det_drift},
              {"plane_residual", plane_residual},
              {"plane_spread", tm.plane_spread},
              {"embeddedness", embedded},
              {"config", to_json(cd.cfg)},
              {"lifted", to_json(cd.prep.lifted)},
              {"pqr", {cd.p, cd.q, cd.r}},
              {"eps", cd.prep.eps},
              {"resolution", rc.resolution},
              {"vertices", tm.halfspace.vertices.size()},
              {"tolerances", to_json(rc.tol)}};
  result["all_true"] = gc.in_K && gc.nondegenerate && all_distinct && dist.agree && all_embedded &&
                       tm.det_drift < rc.tol.det_drift && plane_residual < rc.tol.plane_residual &&
                       tm.plane_spread < rc.tol.plane_coincidence;
  auto files = write_meshes(rc, "trinoid.halfspace", tm.halfspace);
  for (auto& f : write_meshes(rc, "trinoid.ball", tm.ball)) files.push_back(f);
  result["files"] = files;
  emit(rc, result, out);
  return Exit::ok;
}

// -------------------------------------------------------------------------------------------------

struct Sample {
  std::string check;
  cplx z;
  double value;
};

void verify_minimal(const RunConfig& rc, VerificationReport& rep, std::vector<Sample>& samples, json& info) {
  const auto s = minimal_setup(rc);
  if (s.solutions.empty()) throw InvalidInput("no real solution to verify");
  solver::PqrSolution sol = chosen(rc, s);
  sol.p += rc.perturb_pqr;
  const auto& l = s.prep.lifted;
  const auto& T = rc.tol;
  info["config"] = to_json(s.cfg);
  info["solution"] = solution_json(sol, l);

  auto worst = [](const std::array<double, 3>& r) { return std::max({std::abs(r[0]), std::abs(r[1]), std::abs(r[2])}); };
  rep.add("system_residual", "pqr system = 0", worst(solver::pqr_residuals(sol.p, sol.q, sol.r, s.prep.ends, sol.eps)),
          T.system_residual);
  const auto abc = solver::pqr_to_abc(sol.p, sol.q, sol.r, l);
  rep.add("abc_residual", "equivalent (a,b,c) system = 0", worst(solver::abc_residuals(abc, s.prep.ends, sol.eps)),
          T.system_residual);

  const surface::WeierstrassEvaluator ev(s.prep, abc);
  std::mt19937_64 rng(rc.seed);
  std::uniform_real_distribution<double> ux(-3.0, 4.0), uy(0.05, 3.0);
  auto point = [&] {
    for (;;) {
      const cplx z(ux(rng), uy(rng));
      if (std::abs(z) > 0.05 && std::abs(z - 1.0) > 0.05) return z;
    }
  };
  double w_worst = 0;
  for (int k = 0; k < rc.samples; ++k) {
    const cplx z = point();
    const auto w = ev.weierstrass_at(z);
    const cplx lhs = w.k1 * w.dk2 - w.dk1 * w.k2, want = cplx(0.0, 1.0) * s.prep.phi(z);
    const double scale = std::max({std::abs(want), std::abs(w.k1 * w.dk2), std::abs(w.dk1 * w.k2)});
    const double e = std::abs(lhs - want) / scale;
    samples.push_back({"spinor_wronskian", z, e});
    w_worst = std::max(w_worst, e);
  }
  rep.add("spinor_wronskian", "k1 k2' - k1' k2 = i phi (relative)", w_worst, T.wronskian);

  double p_worst = 0;
  for (int k = 0; k < std::min(rc.samples, 20); ++k) {
    const cplx z = point();
    const Vec3 a = ev.immerse(z, {cplx(z.real(), 3.5)}), b = ev.immerse(z, {cplx(z.real() < 0.5 ? 2.0 : -1.0, 0.3)});
    const double e = (a - b).norm() / std::max(1.0, a.norm());
    samples.push_back({"path_independence", z, e});
    p_worst = std::max(p_worst, e);
  }
  rep.add("path_independence", "x(z) independent of the path", p_worst, T.path_independence);

  const double want[3] = {s.prep.ends.A, s.prep.ends.C, s.prep.ends.B};
  for (int k = 0; k < 3; ++k) {
    const auto a = surface::fit_end_asymptotics(ev, kEnds[k]);
    rep.add(std::string("end_fit_") + surface::to_string(kEnds[k]), "Q z^2 2 pi / (i alpha) -> input distance",
            rel(a.A, want[k]), T.end_fit);
  }

  surface::MeshOptions mo;
  mo.resolution = rc.resolution;
  mo.window = rc.window;
  mo.threads = rc.threads;
  const SurfaceMesh mesh = surface::generate_mesh(ev, mo);
  geometry::LineTriple fitted;
  for (int tag = 1; tag <= 3; ++tag) {
    const auto f = surface::fit_line(mesh, tag);
    fitted[tag - 1] = f.line;
    rep.add("collinearity_" + std::to_string(tag), "boundary segment on a line (deviation / scale)",
            f.max_deviation / f.scale, T.collinearity);
  }
  const auto ref = geometry::lines_from_config(s.cfg);
  const std::array<std::pair<int, int>, 3> pairs{{{0, 1}, {2, 0}, {1, 2}}};
  for (auto [i, j] : pairs) {
    rep.add("signed_distance_" + std::to_string(i + 1) + std::to_string(j + 1), "matches the configuration",
            rel(geometry::signed_distance(fitted[i], fitted[j]), geometry::signed_distance(ref[i], ref[j])),
            T.signed_distance);
  }
  const auto back = geometry::classify_triple(fitted);
  const double d = std::max({std::abs(back.alpha0 - s.cfg.alpha0), std::abs(back.beta0 - s.cfg.beta0),
                             std::abs(back.gamma0 - s.cfg.gamma0)});
  rep.add("classify_angles", "fitted lines classify to the input angles", d, T.classify_round_trip);
  rep.add("classify_eps0", "fitted lines keep eps0", back.eps0 == s.cfg.eps0 ? 0.0 : 1.0, 0.5);
}

void verify_trinoid(const RunConfig& rc, VerificationReport& rep, std::vector<Sample>& samples, json& info) {
  const auto spec = trinoid_spec(rc);
  const auto& T = rc.tol;
  const auto sol = trinoid::trinoid_pqr(spec);
  const auto ends = trinoid::trinoid_rhs(spec);
  const double p = sol.pqr.p + rc.perturb_pqr, q = sol.pqr.q, r = sol.pqr.r;
  info["pqr"] = {p, q, r};
  info["eps"] = sol.pqr.eps;
  info["lifted"] = to_json(sol.lifted);

  const auto res = solver::pqr_residuals(p, q, r, ends, sol.pqr.eps);
  rep.add("system_residual", "trinoid system = 0", std::max({std::abs(res[0]), std::abs(res[1]), std::abs(res[2])}),
          T.system_residual);
  const auto hat = solver::hat_lambda_values(p, q, r, sol.pqr.eps, sol.lifted);
  rep.add("lambda_hat_0", "Lambda_hat(0) = 0", std::abs(hat.at0), T.lambda_hat);
  rep.add("lambda_hat_1", "Lambda_hat(1) = 0", std::abs(hat.at1), T.lambda_hat);
  const auto gc = trinoid::growth_check(spec);
  rep.add("umehara_equivalence", "Umehara condition agrees with K", gc.umehara_equivalent ? 0.0 : 1.0, 0.5);

  const auto cd = trinoid::cousin_data(spec);
  trinoid::TrinoidMeshOptions mo;
  mo.mesh.resolution = rc.resolution;
  mo.mesh.window = rc.window;
  mo.mesh.threads = rc.threads;
  mo.reflect = false;
  const auto tm = trinoid::trinoid_mesh(cd, mo);
  rep.add("det_drift", "|det F - 1|", tm.det_drift, T.det_drift);
  for (int k = 0; k < 3; ++k) {
    rep.add("plane_residual_" + std::to_string(k + 1), "boundary segment in a hyperbolic plane", tm.planes[k].residual,
            T.plane_residual);
  }
  rep.add("plane_coincidence", "the three boundary planes coincide", tm.plane_spread, T.plane_coincidence);
  for (End e : kEnds) {
    const auto c = trinoid::embeddedness_check(cd.ev, e, T.embeddedness);
    rep.add(std::string("embedded_") + surface::to_string(e), "S_z g - 2 Q° regular at the end",
            std::max(std::abs(c.c_minus2), std::abs(c.c_minus1)), T.embeddedness);
  }
  const auto dist = trinoid::boundary_distinctness(spec, T.distinctness);
  rep.add("distinctness_agreement", "quadratic tests agree with G°", dist.agree ? 0.0 : 1.0, 0.5);
  const double mus[3] = {spec.mu0, spec.mu1, spec.mu_inf};
  for (int k = 0; k < 3; ++k) {
    const auto a = surface::fit_end_asymptotics(cd.ev, kEnds[k]);
    const double mu = std::sqrt(std::max(0.0, 1 + 4 * a.A * a.alpha / (2 * kPi)));
    samples.push_back({"growth_readoff", cplx(k, 0.0), mu});
    rep.add(std::string("growth_") + surface::to_string(kEnds[k]), "growth read-off matches mu", std::abs(mu - mus[k]),
            T.growth);
  }
}

int cmd_verify(const RunConfig& rc, std::ostream& out) {
  VerificationReport rep;
  std::vector<Sample> samples;
  json info;
  if (rc.mu) {
    verify_trinoid(rc, rep, samples, info);
  } else {
    verify_minimal(rc, rep, samples, info);
  }
  json result = rep.to_json();
  result["input"] = info;
  result["seed"] = rc.seed;
  result["samples"] = rc.samples;
  result["perturb_pqr"] = rc.perturb_pqr;
  result["tolerances"] = to_json(rc.tol);
  if (!rc.out_dir.empty()) {
    ensure_out_dir(rc);
    std::ofstream csv(out_path(rc, "verify_samples.csv"));
    csv.precision(17);
    csv << "check,re_z,im_z,value\n";
    for (const auto& s : samples) csv << s.check << ',' << s.z.real() << ',' << s.z.imag() << ',' << s.value << '\n';
  }
  emit(rc, result, out);
  return rep.pass() ? Exit::ok : Exit::numerical_failure;
}

}  // namespace

void VerificationReport::add(std::string name, std::string target, double measured, double tolerance) {
  checks.push_back({std::move(name), std::move(target), measured, tolerance, measured <= tolerance});
}

bool VerificationReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

json VerificationReport::to_json() const {
  json list = json::array();
  for (const auto& c : checks) {
    list.push_back({{"name", c.name}, {"target", c.target}, {"measured", c.measured}, {"tolerance", c.tolerance}, {"pass", c.pass}});
  }
  return {{"checks", list}, {"pass", pass()}};
}

int run_mode(const RunConfig& rc, std::ostream& out, std::ostream& err) {
  auto fail = [&](int code, const std::string& kind, const std::string& what, const std::string& test = {}) {
    json e{{"error", kind}, {"message", what}, {"mode", to_string(rc.mode)}};
    if (!test.empty()) e["test"] = test;
    err << e.dump() << '\n';
    return code;
  };
  try {
    check(rc);
    switch (rc.mode) {
      case Mode::classify:
        return cmd_classify(rc, out);
      case Mode::solve:
        return cmd_solve(rc, out);
      case Mode::build_surface:
        return cmd_build_surface(rc, out);
      case Mode::build_trinoid:
        return cmd_build_trinoid(rc, out);
      case Mode::verify:
        return cmd_verify(rc, out);
    }
  } catch (const DegenerateInput& e) {
    return fail(Exit::invalid_input, "degenerate", e.what(), e.test());
  } catch (const ConfigError& e) {
    return fail(Exit::invalid_input, "config", e.what());
  } catch (const InvalidInput& e) {
    return fail(Exit::invalid_input, "invalid_input", e.what());
  } catch (const NumericalFailure& e) {
    return fail(Exit::numerical_failure, "numerical_failure", e.what());
  } catch (const std::exception& e) {
    return fail(Exit::numerical_failure, "failure", e.what());
  }
  return Exit::ok;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Minimal disks bounded by three lines and CMC-1 trinoids"};
  app.require_subcommand(1);

  RunConfig rc;
  std::string config_path, input_path, mu_text;
  std::optional<int> resolution;
  std::optional<double> r_excl;
  bool flip = false, emit_lines = false;
  std::string out_dir;

  const std::array<std::pair<Mode, const char*>, 5> modes{{{Mode::classify, "classify three lines into a configuration"},
                                                            {Mode::solve, "solve the (p, q, r) system"},
                                                            {Mode::build_surface, "mesh a minimal disk"},
                                                            {Mode::build_trinoid, "mesh a trinoid in H^3"},
                                                            {Mode::verify, "run the invariant checks"}}};
  std::vector<std::pair<Mode, CLI::App*>> subs;
  for (auto [mode, help] : modes) {
    CLI::App* s = app.add_subcommand(to_string(mode), help);
    s->add_option("input", input_path, "configuration or lines JSON (same as --config)");
    s->add_option("--config", config_path, "configuration JSON");
    s->add_option("--out", out_dir, "output directory");
    s->add_option("--resolution", resolution, "mesh cells along the real direction");
    s->add_option("--r-excl", r_excl, "radius of the holes around the ends");
    s->add_option("--mu", mu_text, "trinoid end data mu0,mu1,mu_inf");
    s->add_flag("--flip-reflection", flip, "apply the x3-axis reflection (lambda, mu) -> (-i lambda, i mu)");
    s->add_flag("--emit-lines", emit_lines, "also emit the representative lines of the configuration");
    subs.emplace_back(mode, s);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return Exit::ok;
  } catch (const CLI::ParseError& e) {
    err << json{{"error", "usage"}, {"message", e.what()}}.dump() << '\n';
    return Exit::invalid_input;
  }
  for (auto [mode, s] : subs) {
    if (s->parsed()) rc.mode = mode;
  }

  try {
    if (!config_path.empty() && !input_path.empty()) throw ConfigError("give the configuration once");
    const std::string path = config_path.empty() ? input_path : config_path;
    if (!path.empty()) {
      std::ifstream f(path);
      if (!f) throw ConfigError("cannot open " + path);
      json doc;
      try {
        doc = json::parse(f);
      } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
      }
      apply_json(doc, rc);
    }
    if (!mu_text.empty()) {
      std::array<double, 3> m{};
      std::stringstream ss(mu_text);
      std::string tok;
      int k = 0;
      while (std::getline(ss, tok, ',')) {
        if (k >= 3) throw ConfigError("--mu takes three comma-separated numbers");
        try {
          m[k++] = std::stod(tok);
        } catch (const std::exception&) {
          throw ConfigError("--mu: cannot read \"" + tok + "\"");
        }
      }
      if (k != 3) throw ConfigError("--mu takes three comma-separated numbers");
      rc.mu = m;
    }
  } catch (const ConfigError& e) {
    err << json{{"error", "config"}, {"message", e.what()}}.dump() << '\n';
    return Exit::invalid_input;
  }
  if (!out_dir.empty()) rc.out_dir = out_dir;
  if (resolution) rc.resolution = *resolution;
  if (r_excl) rc.window.r_excl = *r_excl;
  rc.flip_reflection = rc.flip_reflection || flip;
  rc.emit_lines = rc.emit_lines || emit_lines;
  return run_mode(rc, out, err);
}

}  // namespace threelines::cli
