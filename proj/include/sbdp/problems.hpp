#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "sbdp/model.hpp"

namespace sbdp {

/// Two scalar agents with quadratic costs 0.5*x_i^2 coupled by the
/// equality x_1 + a*x_2 = 0 owned by agent 0; optionally a second equality
/// x_1 + x_2 = 0 owned by agent 1.
ProblemGraph make_quad2(double a, bool second_constraint = false);

/// Two scalar agents with the indefinite bilinear cost 0.5*x_i*x_j each and
/// the equality x_1 - x_2 = 0 owned by agent 0. The central Hessian is
/// indefinite, so the plain mixing update fails without a correction term.
ProblemGraph make_bilinear2();

/// Two scalar agents with nonconvex inequality coupling:
/// f_1 = 2(x_1-1)^2, f_2 = (x_2-2)^2, h_1 = -1 - x_1 x_2 <= 0,
/// h_2 = -1.5 + x_1 x_2 <= 0.
ProblemGraph make_nonconvex2();

/// Shared data of a generated regression instance.
struct LogregData {
  int m = 0, n = 0, M = 0;
  Mat A;        ///< m x n feature matrix
  Vec b;        ///< labels in {-1, +1}
  Vec x_true;
  double eps_reg = 0.1;
  double box = 0.25;
};

/// Feature-split regularized logistic regression over a complete coupling
/// graph: agent i owns n/M features, its cost is the 1/M share of the
/// global loss plus (eps_reg/2)|x_i|^2, with the box -box <= x_i <= box as
/// decoupled inequality rows. Data is drawn from the deterministic
/// counter-based streams of the seed. Throws ModelError unless M divides n.
ProblemGraph make_logreg(int m, int n, int M, std::uint64_t seed,
                         double eps_reg = 0.1, double box = 0.25,
                         std::shared_ptr<LogregData>* data_out = nullptr);

struct CatalogEntry {
  std::string name;
  std::string description;
};
std::vector<CatalogEntry> catalog();

}  // namespace sbdp
