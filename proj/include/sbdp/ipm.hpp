#pragma once

#include <functional>
#include <string>

#include "sbdp/types.hpp"

namespace sbdp {

/// Generic dense NLP  min f(x)  s.t.  g(x) = 0,  h(x) <= 0.
struct Nlp {
  int n = 0;
  int n_eq = 0;
  int n_ineq = 0;
  std::function<double(const Vec&)> f;
  std::function<Vec(const Vec&)> grad;
  std::function<Vec(const Vec&)> g;
  std::function<Mat(const Vec&)> jac_g;
  std::function<Vec(const Vec&)> h;
  std::function<Mat(const Vec&)> jac_h;
  /// Hessian of the Lagrangian f + lam'g + mu'h at (x, lam, mu).
  std::function<Mat(const Vec&, const Vec&, const Vec&)> hess_lag;
};

struct IpmOptions {
  double tol = 1e-10;          ///< KKT max-norm target
  double barrier_init = 0.1;   ///< initial barrier parameter
  double barrier_shrink = 0.2; ///< multiplicative barrier reduction
  double boundary_frac = 0.995;///< fraction-to-boundary factor
  double hess_min_eig = 1e-8;  ///< inertia-correction floor for the Hessian
  int max_iter = 300;
  double diverge_norm = 1e10;  ///< iterate norm treated as unbounded
};

struct IpmResult {
  Vec x;
  Vec lam;
  Vec mu;
  double kkt = 0.0;  ///< final KKT max-norm (barrier-free)
  int iters = 0;
  bool ok = false;
  std::string message;
};

/// Primal-dual interior-point solve with slack variables, inertia-corrected
/// Newton steps, fraction-to-boundary rule, and a KKT-residual Armijo line
/// search. Warm starts from (x0, lam0, mu0); pass empty duals for a cold
/// start. Throws SolverError on divergence; returns ok=false only via
/// message when max_iter is hit with a finite iterate.
IpmResult solve_ipm(const Nlp& nlp, const Vec& x0, const Vec& lam0,
                    const Vec& mu0, const IpmOptions& opt = {});

}  // namespace sbdp
