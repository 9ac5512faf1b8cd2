#pragma once

#include <string>
#include <vector>

#include "sbdp/local.hpp"
#include "sbdp/model.hpp"
#include "sbdp/netsim.hpp"

namespace sbdp {

/// Algorithm variants.
///  - Baseline: plain decomposition update x += a*s, duals moved toward the
///    local multipliers (a = 1 gives the undamped Newton-like iteration).
///  - Plus: primal-dual update through the local mixing matrix.
///  - PlusIdentity: mixing matrix replaced by the identity; valid only when
///    all constraints are decoupled.
///  - PlusSosc: Plus with the exchanged curvature-correction terms.
///  - PlusPartialSosc: correction restricted to each agent's own decoupled
///    constraint rows (no extra communication round).
enum class Variant { Baseline, Plus, PlusIdentity, PlusSosc, PlusPartialSosc };

const char* variant_name(Variant v);
Variant variant_from_name(const std::string& s);

struct EngineConfig {
  Variant variant = Variant::Plus;
  double alpha = 0.5;   ///< primal-dual step size, in (0, 1]
  double beta = 1.0;    ///< dual regularization step size, > 0
  double rho = 0.0;     ///< local proximal penalty, >= 0
  double gamma = 0.0;   ///< correction weight, >= 0
  double eps = 1e-8;    ///< stopping threshold on max_i |s_i|_inf
  int max_iter = 1000;
  double local_tol = 1e-10;  ///< subproblem solver tolerance
  double tau = 1e-6;         ///< active-set threshold
  bool neighbor_affine = false;  ///< single-round sensitivity-free exchange
  bool parallel = false;         ///< OpenMP over agents
  bool record_locals = true;     ///< keep local solutions in the trace
  std::string* netlog = nullptr; ///< optional TSV message log sink
};

enum class RunStatus { Converged, MaxIterations, Failed };

struct IterRecord {
  int iter = 0;
  Point p;            ///< iterate p^iter
  double s_inf = 0.0; ///< max_i |s_i|_inf of the step taken FROM this iterate
  long floats = 0;    ///< float traffic of the iteration starting here
  double wall_ms = 0.0;
  std::vector<LocalSolution> locals;  ///< subproblem solutions at this iterate
};

struct RunResult {
  RunStatus status = RunStatus::MaxIterations;
  Point final_point;
  std::vector<IterRecord> trace;  ///< trace[q] holds p^q
  CommLedger ledger;
  int iterations = 0;
  std::string message;
};

/// Runs the distributed iteration from p0. All inter-agent data flow goes
/// through the message simulator; each agent only reads its own state and
/// its inbox. Throws ModelError on invalid configuration.
RunResult run_engine(const ProblemGraph& g, const Point& p0,
                     const EngineConfig& cfg);

}  // namespace sbdp
