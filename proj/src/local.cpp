#include "sbdp/local.hpp"

#include <cmath>

namespace sbdp {
namespace {

// Frozen vector with the agent's own block shifted by s.
Vec shifted(const LocalNlp& nlp, const Vec& s) {
  Vec z = nlp.z;
  z.head(s.size()) += s;
  return z;
}

}  // namespace

Nlp LocalNlp::as_nlp() const {
  const AgentProblem& a = graph->agents[agent];
  const int n = a.dim;
  Nlp out;
  out.n = n;
  out.n_eq = a.n_eq;
  out.n_ineq = a.n_ineq;
  const LocalNlp self = *this;
  out.f = [self, &a](const Vec& s) {
    const Vec zz = shifted(self, s);
    return a.f(zz) + 0.5 * self.rho * s.squaredNorm() + self.c.dot(s);
  };
  out.grad = [self, &a, n](const Vec& s) -> Vec {
    const Vec zz = shifted(self, s);
    return a.grad_f(zz).head(n) + self.rho * s + self.c;
  };
  out.hess_lag = [self, &a, n](const Vec& s, const Vec& nu,
                               const Vec& kappa) -> Mat {
    const Vec zz = shifted(self, s);
    Mat H = a.hess_f_own(zz);
    if (a.n_eq > 0) H += a.hess_g(zz, nu).topLeftCorner(n, n);
    if (a.n_ineq > 0) H += a.hess_h(zz, kappa).topLeftCorner(n, n);
    H += self.rho * Mat::Identity(n, n);
    return H;
  };
  out.g = [self, &a](const Vec& s) { return a.g(shifted(self, s)); };
  out.jac_g = [self, &a, n](const Vec& s) -> Mat {
    return a.jac_g(shifted(self, s)).leftCols(n);
  };
  out.h = [self, &a](const Vec& s) { return a.h(shifted(self, s)); };
  out.jac_h = [self, &a, n](const Vec& s) -> Mat {
    return a.jac_h(shifted(self, s)).leftCols(n);
  };
  return out;
}

LocalNlp make_local_nlp(const ProblemGraph& g, int agent, const Vec& z,
                        const Vec& c, double rho) {
  if (agent < 0 || agent >= g.num_agents())
    throw ModelError("agent index out of range");
  if (z.size() != static_cast<long>(g.z_index(agent).size()))
    throw ModelError("frozen vector has wrong length");
  if (c.size() != g.agents[agent].dim)
    throw ModelError("sensitivity term has wrong length");
  if (rho < 0.0) throw ModelError("penalty must be nonnegative");
  LocalNlp nlp;
  nlp.agent = agent;
  nlp.graph = &g;
  nlp.z = z;
  nlp.c = c;
  nlp.rho = rho;
  return nlp;
}

LocalSolution solve_local(const LocalNlp& nlp, const Vec& nu0, const Vec& mu0,
                          double tol, double tau) {
  const AgentProblem& a = nlp.graph->agents[nlp.agent];
  IpmOptions opt;
  opt.tol = tol;
  const IpmResult r =
      solve_ipm(nlp.as_nlp(), Vec::Zero(a.dim), nu0, mu0, opt);
  if (!r.ok)
    throw SolverError("local subproblem solve failed: " + r.message);
  LocalSolution y;
  y.s = r.x;
  y.nu = r.lam;
  y.kappa = r.mu;
  y.kkt = r.kkt;
  y.iters = r.iters;
  classify_active_set(nlp, y, tau);
  return y;
}

double local_kkt_residual(const LocalNlp& nlp, const LocalSolution& y) {
  const Nlp p = nlp.as_nlp();
  Vec stat = p.grad(y.s);
  if (p.n_eq > 0) stat += p.jac_g(y.s).transpose() * y.nu;
  if (p.n_ineq > 0) stat += p.jac_h(y.s).transpose() * y.kappa;
  double r = stat.size() ? stat.cwiseAbs().maxCoeff() : 0.0;
  if (p.n_eq > 0) r = std::max(r, p.g(y.s).cwiseAbs().maxCoeff());
  if (p.n_ineq > 0) {
    const Vec h = p.h(y.s);
    r = std::max(r, h.cwiseMax(0.0).maxCoeff());
    r = std::max(r, (-y.kappa).cwiseMax(0.0).maxCoeff());
    r = std::max(r, (y.kappa.array() * h.array()).abs().maxCoeff());
  }
  return r;
}

void classify_active_set(const LocalNlp& nlp, LocalSolution& y, double tau) {
  const AgentProblem& a = nlp.graph->agents[nlp.agent];
  y.active.clear();
  y.degenerate.clear();
  if (a.n_ineq == 0) return;
  const Vec h = a.h(shifted(nlp, y.s));
  const int off = nlp.graph->h_offset(nlp.agent);
  for (int k = 0; k < a.n_ineq; ++k) {
    const bool small_h = std::abs(h[k]) <= tau;
    const bool pos_kappa = y.kappa[k] > tau;
    if (pos_kappa || small_h) y.active.push_back(off + k);
    if (small_h && !pos_kappa) y.degenerate.push_back(off + k);
  }
}

Mat mixing_matrix(const LocalNlp& nlp, const LocalSolution& y, double beta) {
  if (beta <= 0.0) throw ModelError("dual step size must be positive");
  const AgentProblem& a = nlp.graph->agents[nlp.agent];
  const int n = a.dim, me = a.n_eq, mi = a.n_ineq;
  const Vec zz = shifted(nlp, y.s);

  Mat H = a.hess_f_own(zz);
  if (me > 0) H += a.hess_g(zz, y.nu).topLeftCorner(n, n);
  if (mi > 0) H += a.hess_h(zz, y.kappa).topLeftCorner(n, n);
  H += nlp.rho * Mat::Identity(n, n);

  Mat P = Mat::Zero(n + me + mi, n + me + mi);
  P.topLeftCorner(n, n) = H;
  if (me > 0) {
    const Mat Jg = a.jac_g(zz).leftCols(n);
    P.block(0, n, n, me) = Jg.transpose();
    P.block(n, 0, me, n) = -beta * Jg;
  }
  if (mi > 0) {
    const Mat Jh = a.jac_h(zz).leftCols(n);
    const Vec h = a.h(zz);
    P.block(0, n + me, n, mi) = Jh.transpose();
    P.block(n + me, 0, mi, n) = -beta * y.kappa.asDiagonal() * Jh;
    P.block(n + me, n + me, mi, mi) =
        Mat(-beta * h.asDiagonal());
  }
  return P;
}

Mat correction_matrix_S(const LocalNlp& nlp, const LocalSolution& y, int wrt,
                        bool decoupled_only) {
  const ProblemGraph& g = *nlp.graph;
  const int j = nlp.agent;
  const AgentProblem& a = g.agents[j];
  if (decoupled_only && wrt != j)
    throw ModelError("decoupled correction blocks are diagonal only");
  const int off = g.z_block_of(j, wrt);
  const int ni = g.agents[wrt].dim, nj = a.dim;
  const Vec zz = shifted(nlp, y.s);
  Mat S = Mat::Zero(ni, nj);
  const int re = decoupled_only ? a.n_eq_dec : a.n_eq;
  const int ri = decoupled_only ? a.n_ineq_dec : a.n_ineq;
  if (re > 0) {
    const Mat Jg = a.jac_g(zz);
    S += Jg.block(0, off, re, ni).transpose() * Jg.block(0, 0, re, nj);
  }
  if (ri > 0) {
    const Mat Jh = a.jac_h(zz);
    const Vec k2 = y.kappa.head(ri).array().square();
    S += Jh.block(0, off, ri, ni).transpose() * k2.asDiagonal() *
         Jh.block(0, 0, ri, nj);
  }
  return S;
}

}  // namespace sbdp
