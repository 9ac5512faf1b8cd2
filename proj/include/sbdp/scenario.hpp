#pragma once

#include <map>
#include <optional>
#include <string>

#include "sbdp/analysis.hpp"
#include "sbdp/engine.hpp"
#include "sbdp/problems.hpp"

namespace sbdp {

/// A scenario is a flat key=value description of a problem instance, a
/// solver configuration, and output options.
struct Scenario {
  std::string problem;  ///< catalog name (required)

  // Problem parameters.
  double a = 4.0;          ///< quad2 coupling coefficient
  bool g2 = false;         ///< quad2: add the second equality
  int m = 200;             ///< logreg: samples
  int n = 100;             ///< logreg: features
  int agents = 10;         ///< logreg: agent count
  std::uint64_t seed = 1;  ///< logreg: data seed
  double eps_reg = 0.1;
  double box = 0.25;

  // Solver configuration (mirrors EngineConfig).
  Variant variant = Variant::Plus;
  double alpha = 0.5;
  double beta = 1.0;
  double rho = 0.0;
  double gamma = 0.0;
  double eps = 1e-8;
  int max_iter = 1000;
  bool neighbor_affine = false;
  bool parallel = false;

  std::optional<Vec> x0;  ///< initial primal iterate (default zeros)

  bool analysis = true;  ///< compute oracle/certificate columns
  bool timing = false;   ///< fill wall_ms (breaks bitwise reproducibility)
};

/// Parses key=value lines ('#' starts a comment). Unknown keys and
/// malformed values raise ModelError.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

struct ScenarioResult {
  RunResult run;
  ProblemGraph graph;
  std::string csv;  ///< per-iteration trace table
  std::optional<analysis::Certificate> certificate;
  std::optional<Point> reference;  ///< centralized solution when analysis=on
};

/// Builds the problem, runs the engine, and renders the trace CSV with
/// columns iter, err2, errP, bound_Cq, lyapunov_V, s_inf, comm_floats,
/// wall_ms. Oracle-based columns are "nan" when analysis is off.
ScenarioResult run_scenario(const Scenario& sc);

/// Builds only the problem graph described by the scenario.
ProblemGraph build_problem(const Scenario& sc,
                           std::shared_ptr<LogregData>* data_out = nullptr);

}  // namespace sbdp
