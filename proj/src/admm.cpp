#include "sbdp/admm.hpp"

#include <cmath>

#include "sbdp/ipm.hpp"

namespace sbdp {
namespace {

double sigmoid(double t) {
  return t >= 0.0 ? 1.0 / (1.0 + std::exp(-t))
                  : std::exp(t) / (1.0 + std::exp(t));
}

double softplus(double t) {
  return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

// Minimize phi(z) = (1/m) softplus(-b*M*z) + (M*rho/2)(z - v)^2 by a
// safeguarded Newton iteration; phi is strictly convex in z.
double fit_share(double b, double v, int m, int M, double rho, double tol) {
  double z = v;
  // Bracket: the loss gradient is bounded by M/m, so the minimizer lies
  // within |z - v| <= 1/(m*rho).
  double lo = v - 1.0 / (m * rho) - 1.0;
  double hi = v + 1.0 / (m * rho) + 1.0;
  for (int it = 0; it < 100; ++it) {
    const double t = -b * M * z;
    const double sg = sigmoid(t);
    const double d1 = -(b * M / m) * sg + M * rho * (z - v);
    if (std::abs(d1) <= tol) return z;
    if (d1 > 0.0) hi = z; else lo = z;
    const double d2 = (M * M / double(m)) * sg * (1.0 - sg) + M * rho;
    double zn = z - d1 / d2;
    if (zn <= lo || zn >= hi) zn = 0.5 * (lo + hi);
    z = zn;
  }
  return z;
}

}  // namespace

AdmmResult admm_logreg_baseline(const LogregData& data, const Vec& x_ref,
                                const AdmmOptions& opt) {
  const int M = data.M;
  const int nb = data.n / M;
  const int m = data.m;
  const double rho = opt.penalty;
  if (rho <= 0.0) throw ModelError("penalty must be positive");

  Vec x = Vec::Zero(data.n);
  Vec zbar = Vec::Zero(m);
  Vec u = Vec::Zero(m);
  Vec axbar = Vec::Zero(m);  // (1/M) * A * x
  std::vector<Vec> ax(M, Vec::Zero(m));

  AdmmResult res;
  res.err2.push_back((x - x_ref).norm());

  for (int k = 0; k < opt.max_iter; ++k) {
    // Block updates: box-constrained regularized least squares per agent.
    for (int i = 0; i < M; ++i) {
      const auto Ai = data.A.middleCols(i * nb, nb);
      const Vec v = ax[i] + zbar - axbar - u;
      Nlp sub;
      sub.n = nb;
      sub.n_ineq = 2 * nb;
      sub.f = [&](const Vec& xi) {
        return 0.5 * data.eps_reg * xi.squaredNorm() +
               0.5 * rho * (Ai * xi - v).squaredNorm();
      };
      sub.grad = [&](const Vec& xi) {
        return Vec(data.eps_reg * xi + rho * (Ai.transpose() * (Ai * xi - v)));
      };
      sub.h = [&](const Vec& xi) {
        Vec h(2 * nb);
        h.head(nb) = xi.array() - data.box;
        h.tail(nb) = -data.box - xi.array();
        return h;
      };
      sub.jac_h = [&](const Vec&) {
        Mat J(2 * nb, nb);
        J.topRows(nb) = Mat::Identity(nb, nb);
        J.bottomRows(nb) = -Mat::Identity(nb, nb);
        return J;
      };
      sub.hess_lag = [&](const Vec&, const Vec&, const Vec&) {
        return Mat(data.eps_reg * Mat::Identity(nb, nb) +
                   rho * Ai.transpose() * Ai);
      };
      IpmOptions iopt;
      iopt.tol = opt.subsolve_tol;
      const IpmResult r =
          solve_ipm(sub, x.segment(i * nb, nb), Vec::Zero(0),
                    Vec::Constant(2 * nb, 1.0), iopt);
      if (!r.ok) throw SolverError("block update failed: " + r.message);
      x.segment(i * nb, nb) = r.x;
      ax[i] = Ai * r.x;
    }
    axbar.setZero();
    for (int i = 0; i < M; ++i) axbar += ax[i];
    axbar /= M;

    // Share update: per-component strictly convex scalar fit.
    for (int j = 0; j < m; ++j)
      zbar[j] = fit_share(data.b[j], axbar[j] + u[j], m, M, rho, 1e-12);

    u += axbar - zbar;

    res.err2.push_back((x - x_ref).norm());
    res.iterations = k + 1;
    if (res.err2.back() <= opt.tol) {
      res.converged = true;
      break;
    }
    if (res.err2.back() > 1e6) throw SolverError("iterates diverged");
  }
  res.x = x;
  return res;
}

}  // namespace sbdp
