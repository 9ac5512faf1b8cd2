#pragma once

#include <vector>

#include "sbdp/ipm.hpp"
#include "sbdp/model.hpp"

namespace sbdp {

/// Decoupled subproblem of one agent at a frozen iterate: the own variables
/// move by s while neighbor variables stay at their communicated values.
/// Objective: f_i(x_i + s, x_N) + (rho/2)|s|^2 + c's with the received
/// sensitivity term c; constraints are the agent's own g_i, h_i evaluated at
/// (x_i + s, x_N).
struct LocalNlp {
  int agent = 0;
  const ProblemGraph* graph = nullptr;
  Vec z;       ///< frozen [x_i; x_N]
  Vec c;       ///< sensitivity linear term (length dim)
  double rho = 0.0;

  /// Generic NLP over the step variable s.
  Nlp as_nlp() const;
};

struct LocalSolution {
  Vec s;      ///< primal step
  Vec nu;     ///< equality multipliers
  Vec kappa;  ///< inequality multipliers (>= 0 up to solver tolerance)
  double kkt = 0.0;
  int iters = 0;
  std::vector<int> active;      ///< active inequality rows, global indices
  std::vector<int> degenerate;  ///< weakly active rows (kappa and h both ~ 0)
};

/// Builds the agent's subproblem at the given frozen data.
LocalNlp make_local_nlp(const ProblemGraph& g, int agent, const Vec& z,
                        const Vec& c, double rho);

/// Solves the subproblem with the interior-point method; warm starts the
/// multipliers (pass empty for cold start), primal start s = 0. Computes the
/// active set with threshold tau. Throws SolverError if the solve fails.
LocalSolution solve_local(const LocalNlp& nlp, const Vec& nu0, const Vec& mu0,
                          double tol = 1e-10, double tau = 1e-6);

/// KKT max-norm of the subproblem at a candidate solution.
double local_kkt_residual(const LocalNlp& nlp, const LocalSolution& y);

/// Active-set classification of inequality rows at a solution: a row is
/// active when kappa > tau or |h| <= tau; rows with both kappa <= tau and
/// |h| <= tau are additionally flagged as degenerate. Indices are global.
void classify_active_set(const LocalNlp& nlp, LocalSolution& y, double tau);

/// Coefficient matrix of the local primal-dual mixing update (curvature,
/// constraint Jacobians, dual regularization), evaluated at the local
/// solution. Size (dim + n_eq + n_ineq) squared.
Mat mixing_matrix(const LocalNlp& nlp, const LocalSolution& y, double beta);

/// Correction block S_{ij}: the product of agent j's constraint Jacobians
/// with respect to agents i and j, weighted by the squared inequality
/// multipliers; evaluated at agent j's local solution. `wrt` is i, `nlp`
/// and `y` belong to agent j. When `decoupled_only` is set, only the
/// leading decoupled constraint rows contribute.
Mat correction_matrix_S(const LocalNlp& nlp, const LocalSolution& y, int wrt,
                        bool decoupled_only);

}  // namespace sbdp
