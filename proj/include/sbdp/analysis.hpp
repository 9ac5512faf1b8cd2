#pragma once

#include <string>
#include <vector>

#include "sbdp/engine.hpp"
#include "sbdp/local.hpp"
#include "sbdp/model.hpp"

namespace sbdp {
namespace analysis {

/// Solves every agent's subproblem at the given iterate with directly
/// computed sensitivity terms (centralized convenience path for analysis;
/// the engine itself always goes through the message simulator).
std::vector<LocalSolution> solve_locals(const ProblemGraph& g, const Point& p,
                                        double rho, double tol = 1e-10);

/// Stacked subproblem solution Y(p) = [s; nu; kappa] in global ordering.
Vec stacked_solution(const ProblemGraph& g,
                     const std::vector<LocalSolution>& ys);

/// Centralized KKT solve of the coupled problem (oracle reference point).
Point central_solve(const ProblemGraph& g, const Vec& x0, double tol = 1e-10);

/// Central linearization matrix of the update dynamics at p:
/// [[L + gamma*R, Jg', Jh'], [-beta*Jg, 0, 0], [-beta*U*Jh, 0, -beta*H]]
/// with U = diag(mu), H = diag(h(x)) and the correction weight term
/// R = Jg'Jg + Jh'U^2 Jh. With `partial` set, the left factor of R keeps
/// only each agent's decoupled constraint rows.
Mat assemble_A(const ProblemGraph& g, const Point& p, double beta,
               double gamma = 0.0, bool partial = false);

/// Local/central split of the fixed-point linearization: M holds the
/// block-diagonal subproblem KKT matrices (with the proximal rho), N the
/// same rows with the full coupled Jacobians and Hessian, D the projector
/// onto the dual components.
struct SplitMatrices {
  Mat M, N, D;
  std::vector<LocalSolution> locals;
};
SplitMatrices assemble_M_N_D(const ProblemGraph& g, const Point& p,
                             double rho, double tol = 1e-10);

/// Diagonal-dominance diagnostics of the plain decomposition iteration.
struct GddReport {
  double norm = 0.0;         ///< ||I - M^{-1}N||_2
  double spectral_radius = 0.0;
  bool contractive = false;  ///< norm < 1
};
GddReport gdd_metric(const Mat& M, const Mat& N);

/// Largest admissible step size from the eigenvalues of A:
/// alpha_bar = min over eigenvalues with positive real part of
/// 2 Re(l)/|l|^2, capped at 1. Fails when some eigenvalue has
/// nonpositive real part.
struct StepReport {
  bool ok = false;
  double alpha_bar = 0.0;
  std::string message;
};
StepReport max_step_size(const Mat& A);

/// Dual step size heuristic: ratio of the smallest eigenvalue of the
/// shifted-point Lagrangian Hessian to the largest eigenvalue of the
/// multiplier-weighted squared Jacobian, both evaluated after one round of
/// subproblem solves at p. Throws SolverError when the ratio is not
/// positive and finite.
double tune_beta(const ProblemGraph& g, const Point& p, double rho,
                 double tol = 1e-10);

/// Smallest proximal weight making every agent's own-block Lagrangian
/// Hessian positive definite (with a 1e-8 margin).
double min_rho(const ProblemGraph& g, const Point& p);

/// Solves A' X A - X = -Q for symmetric positive definite Q via complex
/// Schur reduction. Guards dimension (> 400 -> ModelError) and verifies the
/// residual to 1e-8. Throws SolverError if the equation is singular or the
/// residual check fails.
Mat solve_discrete_lyapunov(const Mat& A, const Mat& Q);

/// Convergence constants derived from the Lyapunov pair (P, Q):
///   e  = (1 - 1e-6) * lambda_min(Q),
///   C  = largest generalized eigenvalue of (P - Q) w.r.t. P
///        (per-step contraction factor of the Lyapunov function),
///   C0 = sqrt(cond(P)),  C1 = sqrt(1 - e / lambda_max(P)).
struct Constants {
  double C = 0.0, C0 = 0.0, C1 = 0.0, e = 0.0;
  double lam_min_P = 0.0, lam_max_P = 0.0;
};
Constants convergence_constants(const Mat& P, const Mat& Q);

/// Regularity report at a candidate KKT point.
struct AssumptionReport {
  bool licq = false;
  double licq_sigma_min = 0.0;
  bool strict_complementarity = false;
  double sc_margin = 0.0;            ///< min active multiplier
  bool uniform_sosc = false;
  double hessian_lambda_min = 0.0;   ///< lambda_min of the full Hessian
  bool sosc = false;
  double reduced_lambda_min = 0.0;   ///< on the active-constraint nullspace
  bool partial_sosc = false;
  double partial_lambda_min = 0.0;   ///< on the decoupled-row nullspace
  bool local_regularity = false;     ///< own-block Hessians + rho PD
  double local_lambda_min = 0.0;
  std::vector<int> active_set;       ///< active inequality rows (global)
  std::vector<int> degenerate;       ///< |h| <= tau with multiplier <= tau
  std::string summary;
};
AssumptionReport check_assumptions(const ProblemGraph& g, const Point& p,
                                   double rho, double tau = 1e-6);

/// Smallest correction weight gamma (bisection on [0, 1e4] to 1e-3) making
/// L + gamma * Ja' Ubar^2 Ja positive definite, where Ja stacks the active
/// constraint rows (all rows, or only decoupled rows with `partial`) and
/// Ubar carries ones for equalities and the active multipliers for
/// inequalities. Throws SolverError when no gamma in range works.
double min_gamma(const ProblemGraph& g, const Point& p, bool partial = false,
                 double tau = 1e-6);

/// Derivative of the subproblem solution map: closed form -M^{-1}(N - M D)
/// against central finite differences of the stacked solutions.
struct GradPhiReport {
  double max_abs_err = 0.0;
  bool active_set_changed = false;  ///< FD perturbations crossed the active set
  bool ok = false;
};
GradPhiReport grad_phi_check(const ProblemGraph& g, const Point& p, double rho,
                             double fd_step = 1e-6, double tol = 1e-3);

/// Constructive basin check along a recorded trajectory: active sets of all
/// subproblem solutions match the reference active set, the Lyapunov
/// function V = dp' P dp decreases strictly until it plateaus, and local
/// regularity holds at every iterate.
struct BasinReport {
  bool certified = false;
  int first_violation = -1;
  std::string reason;
  double plateau = 0.0;  ///< V level below which decrease is not enforced
};
BasinReport certify_basin(const ProblemGraph& g, const RunResult& run,
                          const Point& p_star, const Mat& P,
                          double plateau_v = 1e-14);

/// Bundle of tuned parameters and certification data for one problem.
struct Certificate {
  double rho = 0.0, beta = 0.0, alpha_bar = 0.0, alpha = 0.0;
  Mat P;  ///< Lyapunov matrix of the closed-loop linearization (empty on failure)
  Constants constants;
  AssumptionReport assumptions;
  bool step_ok = false;
  std::string step_message;
  int dim_p = 0;
};

/// Runs the tuning pipeline at p_ref: min_rho, tune_beta (unless beta_fixed
/// > 0), linearization, max_step_size (alpha = 0.9 * alpha_bar unless
/// alpha_fixed > 0), Lyapunov pair with Q = I, convergence constants,
/// assumption checks.
Certificate make_certificate(const ProblemGraph& g, const Point& p_ref,
                             double beta_fixed = 0.0, double gamma = 0.0,
                             bool partial = false, double alpha_fixed = 0.0);

std::string certificate_text(const Certificate& c);

}  // namespace analysis
}  // namespace sbdp
