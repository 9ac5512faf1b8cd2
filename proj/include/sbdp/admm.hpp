#pragma once

#include <memory>
#include <vector>

#include "sbdp/problems.hpp"

namespace sbdp {

struct AdmmOptions {
  double penalty = 0.1;   ///< ADMM penalty parameter
  double tol = 1e-5;      ///< stop when |x - x_ref|_2 <= tol
  int max_iter = 5000;
  double subsolve_tol = 1e-10;
};

struct AdmmResult {
  Vec x;                       ///< stacked feature vector at the last iterate
  std::vector<double> err2;    ///< |x^k - x_ref|_2 per iteration (incl. k=0)
  int iterations = 0;
  bool converged = false;
};

/// Consensus-by-sharing ADMM on the feature-split regression instance:
/// each agent updates its own feature block against the averaged
/// prediction, the averaged prediction is re-fit to the loss by scalar
/// Newton steps, and scaled duals close the loop. Progress is measured
/// against the reference solution x_ref. Throws SolverError on divergence.
AdmmResult admm_logreg_baseline(const LogregData& data, const Vec& x_ref,
                                const AdmmOptions& opt = {});

}  // namespace sbdp
