#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "threelines/geometry.hpp"
#include "threelines/surface.hpp"

namespace threelines::cli {

using nlohmann::json;

enum class Mode { classify, solve, build_surface, build_trinoid, verify };
const char* to_string(Mode m);

enum Exit : int { ok = 0, invalid_input = 2, empty_result = 3, numerical_failure = 4 };

// Defaults are the acceptance tolerances; every report echoes the values in use.
struct Tolerances {
  double system_residual = 1e-10;
  double wronskian = 1e-9;
  double path_independence = 1e-8;
  double collinearity = 1e-5;        // times the segment scale
  double signed_distance = 1e-4;     // relative
  double end_fit = 1e-6;             // relative
  double classify_round_trip = 1e-9;
  double lambda_hat = 1e-10;
  double det_drift = 1e-8;
  double plane_residual = 1e-5;
  double plane_coincidence = 1e-4;
  double embeddedness = 1e-5;
  double distinctness = 1e-9;
  double growth = 1e-8;
};

struct RunConfig {
  Mode mode = Mode::classify;

  // exactly one input form
  std::optional<geometry::LineTriple> lines;
  std::optional<geometry::TripleConfig> config;
  std::optional<std::array<double, 3>> mu;
  std::optional<geometry::Lifted> lifted;  // lifts of the configuration, or the trinoid lift override

  std::string out_dir;
  int resolution = 64;
  surface::Window window;
  int threads = 0;
  std::vector<std::array<int, 3>> branches;  // keep only these sign patterns; empty keeps all
  int solution = 0;                          // index into the solution list for surface builds
  bool flip_reflection = false;
  bool emit_lines = false;
  std::vector<std::string> formats{"obj", "ply"};
  std::uint64_t seed = 20240601;
  int samples = 200;
  double perturb_pqr = 0.0;  // fault injection for verify: added to p
  Tolerances tol;
};

// Thrown for malformed configuration documents; maps to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Reads the document into cfg (fields absent from the document keep their values) and checks the
// invariants: exactly one input form, positive tolerances, a usable mesh window.
void apply_json(const json& doc, RunConfig& cfg);
void check(const RunConfig& cfg);

json to_json(const Tolerances& t);
json to_json(const geometry::TripleConfig& c);
json to_json(const geometry::LineTriple& l);
json to_json(const geometry::Lifted& l);
geometry::TripleConfig config_from_json(const json& j);
geometry::LineTriple lines_from_json(const json& j);

// "+-+" <-> {1, -1, 1}
std::string branch_string(const std::array<int, 3>& b);
std::array<int, 3> parse_branch(const std::string& s);

}  // namespace threelines::cli
