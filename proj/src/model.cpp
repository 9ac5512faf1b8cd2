#include "sbdp/model.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>

namespace sbdp {
namespace {

// Central-difference step scaled to the point.
double fd_step(double x) { return 1e-6 * (1.0 + std::abs(x)); }

Vec fd_grad(const std::function<double(const Vec&)>& f, const Vec& z) {
  Vec g(z.size());
  Vec zp = z;
  for (int k = 0; k < z.size(); ++k) {
    const double d = fd_step(z[k]);
    zp[k] = z[k] + d;
    const double fp = f(zp);
    zp[k] = z[k] - d;
    const double fm = f(zp);
    zp[k] = z[k];
    g[k] = (fp - fm) / (2.0 * d);
  }
  return g;
}

Mat fd_jac(const std::function<Vec(const Vec&)>& fn, const Vec& z, int rows) {
  Mat J(rows, z.size());
  Vec zp = z;
  for (int k = 0; k < z.size(); ++k) {
    const double d = fd_step(z[k]);
    zp[k] = z[k] + d;
    const Vec fp = fn(zp);
    zp[k] = z[k] - d;
    const Vec fm = fn(zp);
    zp[k] = z[k];
    J.col(k) = (fp - fm) / (2.0 * d);
  }
  return J;
}

}  // namespace

Vec Point::stacked() const {
  Vec p(x.size() + lam.size() + mu.size());
  p << x, lam, mu;
  return p;
}

void ProblemGraph::finalize() {
  const int M = num_agents();
  if (M == 0) throw ModelError("problem graph has no agents");
  if (static_cast<int>(nbr.size()) != M)
    throw ModelError("neighbor list count does not match agent count");

  for (int i = 0; i < M; ++i) {
    auto& a = agents[i];
    if (a.dim <= 0) throw ModelError("agent dimension must be positive");
    if (a.n_eq < 0 || a.n_ineq < 0) throw ModelError("negative constraint count");
    if (a.n_eq_dec < 0 || a.n_eq_dec > a.n_eq ||
        a.n_ineq_dec < 0 || a.n_ineq_dec > a.n_ineq)
      throw ModelError("decoupled row counts out of range");
    std::vector<int> ns = nbr[i];
    std::sort(ns.begin(), ns.end());
    if (std::adjacent_find(ns.begin(), ns.end()) != ns.end())
      throw ModelError("duplicate neighbor entry");
    for (int j : ns) {
      if (j < 0 || j >= M) throw ModelError("neighbor index out of range");
      if (j == i) throw ModelError("self-loop in coupling graph");
      if (!std::binary_search(nbr[j].begin(), nbr[j].end(), i) &&
          std::find(nbr[j].begin(), nbr[j].end(), i) == nbr[j].end())
        throw ModelError("coupling graph is not symmetric");
    }
    nbr[i] = ns;
    if (!a.f || !a.g && a.n_eq > 0 || !a.h && a.n_ineq > 0)
      throw ModelError("missing value callback");
  }

  // Connectivity (BFS).
  if (M > 1) {
    std::vector<char> seen(M, 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    int count = 1;
    while (!q.empty()) {
      const int i = q.front();
      q.pop();
      for (int j : nbr[i])
        if (!seen[j]) {
          seen[j] = 1;
          ++count;
          q.push(j);
        }
    }
    if (count != M) throw ModelError("coupling graph is not connected");
  }

  xoff_.assign(M, 0);
  goff_.assign(M, 0);
  hoff_.assign(M, 0);
  nx_ = ng_ = nh_ = 0;
  for (int i = 0; i < M; ++i) {
    xoff_[i] = nx_;
    goff_[i] = ng_;
    hoff_[i] = nh_;
    nx_ += agents[i].dim;
    ng_ += agents[i].n_eq;
    nh_ += agents[i].n_ineq;
  }

  zidx_.assign(M, {});
  for (int i = 0; i < M; ++i) {
    auto& idx = zidx_[i];
    for (int k = 0; k < agents[i].dim; ++k) idx.push_back(xoff_[i] + k);
    for (int j : nbr[i])
      for (int k = 0; k < agents[j].dim; ++k) idx.push_back(xoff_[j] + k);
  }

  // Install finite-difference fallbacks for missing derivatives.
  for (int i = 0; i < M; ++i) {
    auto& a = agents[i];
    if (!a.grad_f) {
      auto f = a.f;
      a.grad_f = [f](const Vec& z) { return fd_grad(f, z); };
    }
    if (!a.hess_f) {
      auto gr = a.grad_f;
      const int n = static_cast<int>(zidx_[i].size());
      a.hess_f = [gr, n](const Vec& z) {
        Mat H = fd_jac(gr, z, n);
        return Mat(0.5 * (H + H.transpose()));
      };
    }
    if (!a.hess_f_own) {
      auto hf = a.hess_f;
      const int n = a.dim;
      a.hess_f_own = [hf, n](const Vec& z) {
        return Mat(hf(z).topLeftCorner(n, n));
      };
    }
    if (a.n_eq > 0) {
      if (!a.jac_g) {
        auto fn = a.g;
        const int r = a.n_eq;
        a.jac_g = [fn, r](const Vec& z) { return fd_jac(fn, z, r); };
      }
      if (!a.hess_g) {
        auto jac = a.jac_g;
        const int n = static_cast<int>(zidx_[i].size());
        a.hess_g = [jac, n](const Vec& z, const Vec& w) {
          auto wg = [jac, &w](const Vec& zz) -> Vec {
            return jac(zz).transpose() * w;
          };
          Mat H = fd_jac(wg, z, n);
          return Mat(0.5 * (H + H.transpose()));
        };
      }
    } else {
      a.g = [](const Vec&) { return Vec(0); };
      a.jac_g = [n = static_cast<int>(zidx_[i].size())](const Vec&) {
        return Mat(0, n);
      };
      a.hess_g = [n = static_cast<int>(zidx_[i].size())](const Vec&, const Vec&) {
        return Mat(Mat::Zero(n, n));
      };
    }
    if (a.n_ineq > 0) {
      if (!a.jac_h) {
        auto fn = a.h;
        const int r = a.n_ineq;
        a.jac_h = [fn, r](const Vec& z) { return fd_jac(fn, z, r); };
      }
      if (!a.hess_h) {
        auto jac = a.jac_h;
        const int n = static_cast<int>(zidx_[i].size());
        a.hess_h = [jac, n](const Vec& z, const Vec& w) {
          auto wh = [jac, &w](const Vec& zz) -> Vec {
            return jac(zz).transpose() * w;
          };
          Mat H = fd_jac(wh, z, n);
          return Mat(0.5 * (H + H.transpose()));
        };
      }
    } else {
      a.h = [](const Vec&) { return Vec(0); };
      a.jac_h = [n = static_cast<int>(zidx_[i].size())](const Vec&) {
        return Mat(0, n);
      };
      a.hess_h = [n = static_cast<int>(zidx_[i].size())](const Vec&, const Vec&) {
        return Mat(Mat::Zero(n, n));
      };
    }
  }
}

Vec ProblemGraph::gather(int i, const Vec& x) const {
  const auto& idx = zidx_[i];
  Vec z(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) z[k] = x[idx[k]];
  return z;
}

int ProblemGraph::z_block_of(int i, int j) const {
  if (j == i) return 0;
  int off = agents[i].dim;
  for (int n : nbr[i]) {
    if (n == j) return off;
    off += agents[n].dim;
  }
  throw ModelError("agent is not a neighbor");
}

Vec ProblemGraph::x_of(int i, const Point& p) const {
  return p.x.segment(xoff_[i], agents[i].dim);
}
Vec ProblemGraph::lam_of(int i, const Point& p) const {
  return p.lam.segment(goff_[i], agents[i].n_eq);
}
Vec ProblemGraph::mu_of(int i, const Point& p) const {
  return p.mu.segment(hoff_[i], agents[i].n_ineq);
}

Point ProblemGraph::zero_point() const {
  Point p;
  p.x = Vec::Zero(nx_);
  p.lam = Vec::Zero(ng_);
  p.mu = Vec::Zero(nh_);
  return p;
}

double central_lagrangian(const ProblemGraph& g, const Point& p) {
  double L = 0.0;
  for (int i = 0; i < g.num_agents(); ++i) {
    const Vec z = g.gather(i, p.x);
    const auto& a = g.agents[i];
    L += a.f(z);
    if (a.n_eq > 0) L += g.lam_of(i, p).dot(a.g(z));
    if (a.n_ineq > 0) L += g.mu_of(i, p).dot(a.h(z));
  }
  return L;
}

Vec neighbor_gradient(const ProblemGraph& g, int owner, int wrt,
                      const Point& p) {
  const auto& a = g.agents[owner];
  const Vec z = g.gather(owner, p.x);
  Vec grad = a.grad_f(z);
  if (a.n_eq > 0) grad += a.jac_g(z).transpose() * g.lam_of(owner, p);
  if (a.n_ineq > 0) grad += a.jac_h(z).transpose() * g.mu_of(owner, p);
  const int off = g.z_block_of(owner, wrt);
  return grad.segment(off, g.agents[wrt].dim);
}

Vec central_grad_f(const ProblemGraph& g, const Vec& x) {
  Vec grad = Vec::Zero(g.nx());
  for (int i = 0; i < g.num_agents(); ++i) {
    const Vec z = g.gather(i, x);
    const Vec gz = g.agents[i].grad_f(z);
    const auto& idx = g.z_index(i);
    for (std::size_t k = 0; k < idx.size(); ++k) grad[idx[k]] += gz[k];
  }
  return grad;
}

double central_f(const ProblemGraph& g, const Vec& x) {
  double v = 0.0;
  for (int i = 0; i < g.num_agents(); ++i) v += g.agents[i].f(g.gather(i, x));
  return v;
}

Vec central_g(const ProblemGraph& g, const Vec& x) {
  Vec out(g.ng());
  for (int i = 0; i < g.num_agents(); ++i)
    if (g.agents[i].n_eq > 0)
      out.segment(g.g_offset(i), g.agents[i].n_eq) =
          g.agents[i].g(g.gather(i, x));
  return out;
}

Vec central_h(const ProblemGraph& g, const Vec& x) {
  Vec out(g.nh());
  for (int i = 0; i < g.num_agents(); ++i)
    if (g.agents[i].n_ineq > 0)
      out.segment(g.h_offset(i), g.agents[i].n_ineq) =
          g.agents[i].h(g.gather(i, x));
  return out;
}

Mat central_jac_g(const ProblemGraph& g, const Vec& x) {
  Mat J = Mat::Zero(g.ng(), g.nx());
  for (int i = 0; i < g.num_agents(); ++i) {
    if (g.agents[i].n_eq == 0) continue;
    const Mat Ji = g.agents[i].jac_g(g.gather(i, x));
    const auto& idx = g.z_index(i);
    for (std::size_t k = 0; k < idx.size(); ++k)
      J.block(g.g_offset(i), idx[k], g.agents[i].n_eq, 1) += Ji.col(k);
  }
  return J;
}

Mat central_jac_h(const ProblemGraph& g, const Vec& x) {
  Mat J = Mat::Zero(g.nh(), g.nx());
  for (int i = 0; i < g.num_agents(); ++i) {
    if (g.agents[i].n_ineq == 0) continue;
    const Mat Ji = g.agents[i].jac_h(g.gather(i, x));
    const auto& idx = g.z_index(i);
    for (std::size_t k = 0; k < idx.size(); ++k)
      J.block(g.h_offset(i), idx[k], g.agents[i].n_ineq, 1) += Ji.col(k);
  }
  return J;
}

Mat central_hessian(const ProblemGraph& g, const Point& p) {
  Mat H = Mat::Zero(g.nx(), g.nx());
  for (int i = 0; i < g.num_agents(); ++i) {
    const auto& a = g.agents[i];
    const Vec z = g.gather(i, p.x);
    Mat Hi = a.hess_f(z);
    if (a.n_eq > 0) Hi += a.hess_g(z, g.lam_of(i, p));
    if (a.n_ineq > 0) Hi += a.hess_h(z, g.mu_of(i, p));
    const auto& idx = g.z_index(i);
    for (std::size_t r = 0; r < idx.size(); ++r)
      for (std::size_t c = 0; c < idx.size(); ++c)
        H(idx[r], idx[c]) += Hi(r, c);
  }
  return H;
}

KktResidual central_kkt_residual(const ProblemGraph& g, const Point& p) {
  KktResidual res;
  Vec stat = central_grad_f(g, p.x);
  if (g.ng() > 0) stat += central_jac_g(g, p.x).transpose() * p.lam;
  if (g.nh() > 0) stat += central_jac_h(g, p.x).transpose() * p.mu;
  res.stationarity = stat.size() ? stat.cwiseAbs().maxCoeff() : 0.0;
  if (g.ng() > 0)
    res.eq_feasibility = central_g(g, p.x).cwiseAbs().maxCoeff();
  if (g.nh() > 0) {
    const Vec h = central_h(g, p.x);
    res.ineq_feasibility = h.cwiseMax(0.0).maxCoeff();
    res.dual_feasibility = (-p.mu).cwiseMax(0.0).maxCoeff();
    res.complementarity = (p.mu.array() * h.array()).abs().maxCoeff();
  }
  res.overall = std::max({res.stationarity, res.eq_feasibility,
                          res.ineq_feasibility, res.dual_feasibility,
                          res.complementarity});
  return res;
}

AuditReport finite_difference_audit(const ProblemGraph& g, const Point& p,
                                    double tol) {
  AuditReport rep;
  for (int i = 0; i < g.num_agents(); ++i) {
    const auto& a = g.agents[i];
    const Vec z = g.gather(i, p.x);
    const int n = static_cast<int>(z.size());

    const Vec ga = a.grad_f(z);
    const Vec gn = fd_grad(a.f, z);
    rep.max_grad_err = std::max(rep.max_grad_err,
                                (ga - gn).cwiseAbs().maxCoeff());
    {
      Mat Ha = a.hess_f(z);
      Mat Hn = fd_jac(a.grad_f, z, n);
      rep.max_hess_err = std::max(
          rep.max_hess_err,
          (Ha - 0.5 * (Hn + Hn.transpose())).cwiseAbs().maxCoeff());
    }
    if (a.n_eq > 0) {
      Mat Ja = a.jac_g(z);
      Mat Jn = fd_jac(a.g, z, a.n_eq);
      rep.max_jac_err =
          std::max(rep.max_jac_err, (Ja - Jn).cwiseAbs().maxCoeff());
      const Vec w = g.lam_of(i, p);
      auto wg = [&a, &w](const Vec& zz) -> Vec {
        return a.jac_g(zz).transpose() * w;
      };
      Mat Hn2 = fd_jac(wg, z, n);
      rep.max_hess_err = std::max(
          rep.max_hess_err,
          (a.hess_g(z, w) - 0.5 * (Hn2 + Hn2.transpose())).cwiseAbs().maxCoeff());
    }
    if (a.n_ineq > 0) {
      Mat Ja = a.jac_h(z);
      Mat Jn = fd_jac(a.h, z, a.n_ineq);
      rep.max_jac_err =
          std::max(rep.max_jac_err, (Ja - Jn).cwiseAbs().maxCoeff());
      const Vec w = g.mu_of(i, p);
      auto wh = [&a, &w](const Vec& zz) -> Vec {
        return a.jac_h(zz).transpose() * w;
      };
      Mat Hn2 = fd_jac(wh, z, n);
      rep.max_hess_err = std::max(
          rep.max_hess_err,
          (a.hess_h(z, w) - 0.5 * (Hn2 + Hn2.transpose())).cwiseAbs().maxCoeff());
    }
  }
  rep.ok = rep.max_grad_err <= tol && rep.max_jac_err <= tol &&
           rep.max_hess_err <= 1e2 * tol;
  std::ostringstream os;
  os << "grad " << rep.max_grad_err << "  jac " << rep.max_jac_err << "  hess "
     << rep.max_hess_err << (rep.ok ? "  [ok]" : "  [MISMATCH]");
  rep.summary = os.str();
  return rep;
}

}  // namespace sbdp
