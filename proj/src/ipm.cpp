#include "sbdp/ipm.hpp"

#include <algorithm>
#include <cmath>

namespace sbdp {
namespace {

struct Residual {
  Vec stat, eq, slack, comp;
  double norm(double barrier) const {
    double r = stat.size() ? stat.cwiseAbs().maxCoeff() : 0.0;
    if (eq.size()) r = std::max(r, eq.cwiseAbs().maxCoeff());
    if (slack.size()) r = std::max(r, slack.cwiseAbs().maxCoeff());
    if (comp.size())
      r = std::max(r, (comp.array() - barrier).abs().maxCoeff());
    return r;
  }
};

Residual residual(const Nlp& nlp, const Vec& x, const Vec& w, const Vec& lam,
                  const Vec& mu) {
  Residual r;
  r.stat = nlp.grad(x);
  if (nlp.n_eq > 0) r.stat += nlp.jac_g(x).transpose() * lam;
  if (nlp.n_ineq > 0) r.stat += nlp.jac_h(x).transpose() * mu;
  r.eq = nlp.n_eq > 0 ? Vec(nlp.g(x)) : Vec(0);
  if (nlp.n_ineq > 0) {
    r.slack = nlp.h(x) + w;
    r.comp = w.array() * mu.array();
  } else {
    r.slack = Vec(0);
    r.comp = Vec(0);
  }
  return r;
}

// Barrier-free KKT error of the original NLP (complementarity target 0,
// with primal/dual infeasibility measured directly on h and mu).
double kkt_error(const Nlp& nlp, const Vec& x, const Vec& lam, const Vec& mu) {
  Vec stat = nlp.grad(x);
  if (nlp.n_eq > 0) stat += nlp.jac_g(x).transpose() * lam;
  if (nlp.n_ineq > 0) stat += nlp.jac_h(x).transpose() * mu;
  double r = stat.size() ? stat.cwiseAbs().maxCoeff() : 0.0;
  if (nlp.n_eq > 0) r = std::max(r, nlp.g(x).cwiseAbs().maxCoeff());
  if (nlp.n_ineq > 0) {
    const Vec h = nlp.h(x);
    r = std::max(r, h.cwiseMax(0.0).maxCoeff());
    r = std::max(r, (-mu).cwiseMax(0.0).maxCoeff());
    r = std::max(r, (mu.array() * h.array()).abs().maxCoeff());
  }
  return r;
}

}  // namespace

IpmResult solve_ipm(const Nlp& nlp, const Vec& x0, const Vec& lam0,
                    const Vec& mu0, const IpmOptions& opt) {
  const int n = nlp.n, me = nlp.n_eq, mi = nlp.n_ineq;
  Vec x = x0;
  Vec lam = lam0.size() == me ? lam0 : Vec(Vec::Zero(me));
  Vec mu(mi), w(mi);
  if (mi > 0) {
    const Vec h = nlp.h(x);
    for (int k = 0; k < mi; ++k) {
      w[k] = std::max(1e-2, -h[k]);
      mu[k] = mu0.size() == mi ? std::max(mu0[k], 1e-6)
                               : opt.barrier_init / w[k];
    }
  }

  double barrier = mi > 0 ? opt.barrier_init : 0.0;
  IpmResult out;
  for (int iter = 0; iter < opt.max_iter; ++iter) {
    out.iters = iter;
    const double err0 = kkt_error(nlp, x, lam, mu);
    if (err0 <= opt.tol) {
      out.x = x;
      out.lam = lam;
      out.mu = mu;
      out.kkt = err0;
      out.ok = true;
      out.message = "converged";
      return out;
    }
    Residual r = residual(nlp, x, w, lam, mu);
    if (mi > 0 && r.norm(barrier) <= std::max(barrier, opt.tol))
      barrier = std::max(barrier * opt.barrier_shrink, 0.1 * opt.tol);

    // Assemble the condensed KKT system in (dx, dlam).
    Mat H = nlp.hess_lag(x, lam, mu);
    Vec rhs_x = -r.stat;
    Mat Jh(0, n);
    if (mi > 0) {
      Jh = nlp.jac_h(x);
      const Vec sigma = mu.array() / w.array();
      H += Jh.transpose() * sigma.asDiagonal() * Jh;
      // dmu = (mu_b - w.*mu)/w + sigma.*(slack_res + Jh dx)
      const Vec base =
          ((Vec::Constant(mi, barrier) - r.comp).array() / w.array() +
           (mu.array() / w.array()) * r.slack.array())
              .matrix();
      rhs_x -= Jh.transpose() * base;
    }
    // Inertia correction: shift until the condensed Hessian is positive
    // definite with margin.
    {
      Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (H + H.transpose()));
      const double lmin = es.eigenvalues().minCoeff();
      if (lmin < opt.hess_min_eig)
        H += (opt.hess_min_eig - lmin) * Mat::Identity(n, n);
    }
    Mat K = Mat::Zero(n + me, n + me);
    K.topLeftCorner(n, n) = H;
    Vec rhs(n + me);
    rhs.head(n) = rhs_x;
    if (me > 0) {
      const Mat Jg = nlp.jac_g(x);
      K.topRightCorner(n, me) = Jg.transpose();
      K.bottomLeftCorner(me, n) = Jg;
      K.bottomRightCorner(me, me) = -1e-12 * Mat::Identity(me, me);
      rhs.tail(me) = -r.eq;
    }
    const Vec sol = K.partialPivLu().solve(rhs);
    if (!sol.allFinite()) throw SolverError("singular KKT system");
    const Vec dx = sol.head(n);
    const Vec dlam = me > 0 ? Vec(sol.tail(me)) : Vec(0);
    Vec dw(mi), dmu(mi);
    if (mi > 0) {
      dw = -(r.slack + Jh * dx);
      dmu = ((Vec::Constant(mi, barrier) - r.comp).array() / w.array() -
             (mu.array() / w.array()) * dw.array())
                .matrix();
    }

    // Fraction-to-boundary step limit.
    double amax = 1.0;
    for (int k = 0; k < mi; ++k) {
      if (dw[k] < 0.0) amax = std::min(amax, -opt.boundary_frac * w[k] / dw[k]);
      if (dmu[k] < 0.0)
        amax = std::min(amax, -opt.boundary_frac * mu[k] / dmu[k]);
    }

    // Armijo backtracking on the barrier KKT residual.
    const double phi0 = r.norm(barrier);
    double alpha = amax;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      const Vec xn = x + alpha * dx;
      const Vec wn = mi > 0 ? Vec(w + alpha * dw) : w;
      const Vec ln = me > 0 ? Vec(lam + alpha * dlam) : lam;
      const Vec mn = mi > 0 ? Vec(mu + alpha * dmu) : mu;
      const double phi = residual(nlp, xn, wn, ln, mn).norm(barrier);
      if (phi <= (1.0 - 1e-4 * alpha) * phi0 || ls == 39) {
        x = xn;
        w = wn;
        lam = ln;
        mu = mn;
        accepted = phi <= phi0;
        break;
      }
      alpha *= 0.5;
    }
    (void)accepted;
    if (x.cwiseAbs().maxCoeff() > opt.diverge_norm)
      throw SolverError("iterate diverged (problem unbounded or infeasible)");
  }
  out.x = x;
  out.lam = lam;
  out.mu = mu;
  out.kkt = kkt_error(nlp, x, lam, mu);
  out.ok = false;
  out.message = "max iterations reached";
  return out;
}

}  // namespace sbdp
