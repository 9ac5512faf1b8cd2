#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sbdp/types.hpp"

namespace sbdp {

/// One agent of the coupled problem. All callbacks take the agent's local
/// stacked vector z = [x_i; x_{j1}; x_{j2}; ...] where j1 < j2 < ... are the
/// agent's neighbors in ascending id order. Derivative callbacks may be left
/// empty; finite-difference fallbacks are installed by
/// ProblemGraph::finalize().
struct AgentProblem {
  int dim = 0;      ///< size of the agent's own decision vector x_i
  int n_eq = 0;     ///< number of local equality constraints g_i
  int n_ineq = 0;   ///< number of local inequality constraints h_i (h <= 0)
  int n_eq_dec = 0;    ///< leading g rows depending on x_i only
  int n_ineq_dec = 0;  ///< leading h rows depending on x_i only
  bool neighbor_affine = false;  ///< sensitivities computable by neighbors

  std::function<double(const Vec&)> f;
  std::function<Vec(const Vec&)> grad_f;  ///< length = z.size()
  std::function<Mat(const Vec&)> hess_f;  ///< z.size() x z.size()
  /// Own-block corner of hess_f (dim x dim); optional fast path, derived
  /// from hess_f when absent.
  std::function<Mat(const Vec&)> hess_f_own;

  std::function<Vec(const Vec&)> g;      ///< length n_eq
  std::function<Mat(const Vec&)> jac_g;  ///< n_eq x z.size()
  std::function<Vec(const Vec&)> h;      ///< length n_ineq
  std::function<Mat(const Vec&)> jac_h;  ///< n_ineq x z.size()

  /// Multiplier-weighted constraint Hessians sum_k w_k * hess(g_k) etc.
  std::function<Mat(const Vec&, const Vec&)> hess_g;
  std::function<Mat(const Vec&, const Vec&)> hess_h;
};

/// Primal-dual iterate: global primal vector plus stacked per-agent
/// multipliers (equalities first, then inequalities, in agent order).
struct Point {
  Vec x;    ///< stacked x_i
  Vec lam;  ///< stacked equality multipliers
  Vec mu;   ///< stacked inequality multipliers

  /// Full vector p = [x; lam; mu].
  Vec stacked() const;
};

/// Graph-structured NLP: agents plus an undirected coupling graph.
class ProblemGraph {
 public:
  std::string name;
  std::vector<AgentProblem> agents;
  std::vector<std::vector<int>> nbr;  ///< sorted neighbor lists
  bool constraints_decoupled = false;

  /// Validates the model, computes index offsets and installs
  /// finite-difference fallbacks for missing derivative callbacks.
  /// Throws ModelError on malformed input (asymmetric or disconnected
  /// graph, self-loops, dimension mismatches).
  void finalize();

  int num_agents() const { return static_cast<int>(agents.size()); }
  int nx() const { return nx_; }
  int ng() const { return ng_; }
  int nh() const { return nh_; }
  /// Size of the full primal-dual vector p.
  int np() const { return nx_ + ng_ + nh_; }

  int x_offset(int i) const { return xoff_[i]; }
  int g_offset(int i) const { return goff_[i]; }
  int h_offset(int i) const { return hoff_[i]; }

  /// Local stacked vector z_i = [x_i; x_{N_i}] gathered from a global x.
  Vec gather(int i, const Vec& x) const;
  /// Global indices corresponding to the entries of z_i.
  const std::vector<int>& z_index(int i) const { return zidx_[i]; }
  /// Position of neighbor j's block inside z_i (offset into z).
  int z_block_of(int i, int j) const;

  Vec x_of(int i, const Point& p) const;
  Vec lam_of(int i, const Point& p) const;
  Vec mu_of(int i, const Point& p) const;

  /// Zero-initialized point of the right dimensions.
  Point zero_point() const;

 private:
  int nx_ = 0, ng_ = 0, nh_ = 0;
  std::vector<int> xoff_, goff_, hoff_;
  std::vector<std::vector<int>> zidx_;
};

/// Value of the central Lagrangian L(p) = sum_i f_i + lam_i'g_i + mu_i'h_i.
double central_lagrangian(const ProblemGraph& g, const Point& p);

/// Gradient of agent `owner`'s local Lagrangian L_owner with respect to the
/// variables of agent `wrt` (which must be `owner` itself or one of its
/// neighbors).
Vec neighbor_gradient(const ProblemGraph& g, int owner, int wrt,
                      const Point& p);

/// Componentwise residuals of the central KKT conditions, max-norm
/// aggregated.
struct KktResidual {
  double stationarity = 0.0;
  double eq_feasibility = 0.0;
  double ineq_feasibility = 0.0;  ///< max(h, 0)
  double dual_feasibility = 0.0;  ///< max(-mu, 0)
  double complementarity = 0.0;   ///< |mu .* h|
  double overall = 0.0;
};
KktResidual central_kkt_residual(const ProblemGraph& g, const Point& p);

/// Hessian of the central Lagrangian at p (w.r.t. the full x), assembled
/// from per-agent contributions.
Mat central_hessian(const ProblemGraph& g, const Point& p);
/// Central constraint Jacobians at x (rows in agent order).
Mat central_jac_g(const ProblemGraph& g, const Vec& x);
Mat central_jac_h(const ProblemGraph& g, const Vec& x);
/// Stacked constraint values at x.
Vec central_g(const ProblemGraph& g, const Vec& x);
Vec central_h(const ProblemGraph& g, const Vec& x);
/// Gradient of sum_i f_i at x.
Vec central_grad_f(const ProblemGraph& g, const Vec& x);
double central_f(const ProblemGraph& g, const Vec& x);

/// Result of cross-checking analytic derivatives against central finite
/// differences at a point.
struct AuditReport {
  double max_grad_err = 0.0;
  double max_jac_err = 0.0;
  double max_hess_err = 0.0;
  bool ok = false;
  std::string summary;
};

/// Compares the analytic derivative callbacks of every agent against
/// finite differences of the value callbacks at the given global x
/// (and multipliers for the weighted constraint Hessians).
AuditReport finite_difference_audit(const ProblemGraph& g, const Point& p,
                                    double tol = 1e-5);

}  // namespace sbdp
