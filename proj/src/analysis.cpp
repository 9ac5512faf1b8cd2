#include "sbdp/analysis.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

#include "sbdp/ipm.hpp"

namespace sbdp {
namespace analysis {
namespace {

using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

Vec sensitivity_term(const ProblemGraph& g, int i, const Point& p) {
  Vec c = Vec::Zero(g.agents[i].dim);
  for (int j : g.nbr[i]) c += neighbor_gradient(g, j, i, p);
  return c;
}

double lambda_min(const Mat& A) {
  if (A.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (A + A.transpose()));
  return es.eigenvalues().minCoeff();
}

double lambda_max(const Mat& A) {
  if (A.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (A + A.transpose()));
  return es.eigenvalues().maxCoeff();
}

// Kernel basis of a (possibly empty) row-stacked Jacobian.
Mat kernel_basis(const Mat& J, int n) {
  if (J.rows() == 0) return Mat(Mat::Identity(n, n));
  Eigen::JacobiSVD<Mat> svd(J, Eigen::ComputeFullV);
  const double tol = 1e-10 * std::max(1.0, svd.singularValues()(0));
  int rank = 0;
  for (int k = 0; k < svd.singularValues().size(); ++k)
    if (svd.singularValues()(k) > tol) ++rank;
  return svd.matrixV().rightCols(n - rank);
}

// Active inequality rows (global indices) by |h| <= tau.
std::vector<int> active_rows(const ProblemGraph& g, const Point& p,
                             double tau) {
  std::vector<int> act;
  const Vec h = central_h(g, p.x);
  for (int k = 0; k < h.size(); ++k)
    if (std::abs(h[k]) <= tau) act.push_back(k);
  return act;
}

// Stacked active Jacobian [Jg; Jh_active] with the matching weight vector
// ubar = [ones; mu_active]. With `partial`, rows not marked decoupled in
// their agent are dropped.
void active_jacobian(const ProblemGraph& g, const Point& p, double tau,
                     bool partial, Mat* Ja, Vec* ubar) {
  const std::vector<int> act = active_rows(g, p, tau);
  const Mat Jg = central_jac_g(g, p.x);
  const Mat Jh = central_jac_h(g, p.x);
  std::vector<int> eq_rows, in_rows;
  for (int i = 0; i < g.num_agents(); ++i)
    for (int k = 0; k < g.agents[i].n_eq; ++k)
      if (!partial || k < g.agents[i].n_eq_dec)
        eq_rows.push_back(g.g_offset(i) + k);
  for (int k : act) {
    // Locate the owning agent to test the decoupled-row property.
    int owner = 0;
    while (owner + 1 < g.num_agents() && g.h_offset(owner + 1) <= k) ++owner;
    const int local = k - g.h_offset(owner);
    if (!partial || local < g.agents[owner].n_ineq_dec) in_rows.push_back(k);
  }
  Ja->resize(eq_rows.size() + in_rows.size(), g.nx());
  ubar->resize(Ja->rows());
  int r = 0;
  for (int k : eq_rows) {
    Ja->row(r) = Jg.row(k);
    (*ubar)[r++] = 1.0;
  }
  for (int k : in_rows) {
    Ja->row(r) = Jh.row(k);
    (*ubar)[r++] = p.mu[k];
  }
}

}  // namespace

std::vector<LocalSolution> solve_locals(const ProblemGraph& g, const Point& p,
                                        double rho, double tol) {
  std::vector<LocalSolution> ys;
  ys.reserve(g.num_agents());
  for (int i = 0; i < g.num_agents(); ++i) {
    const LocalNlp nlp = make_local_nlp(g, i, g.gather(i, p.x),
                                        sensitivity_term(g, i, p), rho);
    ys.push_back(solve_local(nlp, g.lam_of(i, p), g.mu_of(i, p), tol));
  }
  return ys;
}

Vec stacked_solution(const ProblemGraph& g,
                     const std::vector<LocalSolution>& ys) {
  Vec v = Vec::Zero(g.np());
  for (int i = 0; i < g.num_agents(); ++i) {
    v.segment(g.x_offset(i), g.agents[i].dim) = ys[i].s;
    v.segment(g.nx() + g.g_offset(i), g.agents[i].n_eq) = ys[i].nu;
    v.segment(g.nx() + g.ng() + g.h_offset(i), g.agents[i].n_ineq) =
        ys[i].kappa;
  }
  return v;
}

Point central_solve(const ProblemGraph& g, const Vec& x0, double tol) {
  Nlp nlp;
  nlp.n = g.nx();
  nlp.n_eq = g.ng();
  nlp.n_ineq = g.nh();
  nlp.f = [&g](const Vec& x) { return central_f(g, x); };
  nlp.grad = [&g](const Vec& x) { return central_grad_f(g, x); };
  nlp.g = [&g](const Vec& x) { return central_g(g, x); };
  nlp.jac_g = [&g](const Vec& x) { return central_jac_g(g, x); };
  nlp.h = [&g](const Vec& x) { return central_h(g, x); };
  nlp.jac_h = [&g](const Vec& x) { return central_jac_h(g, x); };
  nlp.hess_lag = [&g](const Vec& x, const Vec& lam, const Vec& mu) {
    Point pt{x, lam, mu};
    return central_hessian(g, pt);
  };
  IpmOptions opt;
  opt.tol = tol;
  // The interior-point solver has no feasibility restoration phase, so a
  // badly infeasible start can stall on nonconvex instances. Fall back to a
  // short deterministic cascade of alternative starts.
  const Vec starts[] = {x0, Vec(Vec::Zero(g.nx())), Vec(0.5 * x0),
                        Vec(Vec::Ones(g.nx()))};
  std::string last = "no start attempted";
  for (const Vec& s : starts) {
    try {
      const IpmResult r = solve_ipm(nlp, s, Vec(0), Vec(0), opt);
      if (r.ok) return Point{r.x, r.lam, r.mu};
      last = r.message;
    } catch (const SolverError& e) {
      last = e.what();
    }
  }
  throw SolverError("central solve failed: " + last);
}

Mat assemble_A(const ProblemGraph& g, const Point& p, double beta,
               double gamma, bool partial) {
  if (beta <= 0.0) throw ModelError("beta must be positive");
  const int nx = g.nx(), ng = g.ng(), nh = g.nh();
  const Mat L = central_hessian(g, p);
  const Mat Jg = central_jac_g(g, p.x);
  const Mat Jh = central_jac_h(g, p.x);
  const Vec h = central_h(g, p.x);

  Mat A = Mat::Zero(nx + ng + nh, nx + ng + nh);
  A.topLeftCorner(nx, nx) = L;
  if (gamma > 0.0) {
    Mat Jg_l = Jg, Jh_l = Jh;
    if (partial) {
      // Keep only each agent's decoupled rows in the left factor.
      for (int i = 0; i < g.num_agents(); ++i) {
        for (int k = g.agents[i].n_eq_dec; k < g.agents[i].n_eq; ++k)
          Jg_l.row(g.g_offset(i) + k).setZero();
        for (int k = g.agents[i].n_ineq_dec; k < g.agents[i].n_ineq; ++k)
          Jh_l.row(g.h_offset(i) + k).setZero();
      }
    }
    A.topLeftCorner(nx, nx) += gamma * (Jg_l.transpose() * Jg +
                                        Jh_l.transpose() *
                                            p.mu.array().square().matrix()
                                                .asDiagonal() *
                                            Jh);
  }
  if (ng > 0) {
    A.block(0, nx, nx, ng) = Jg.transpose();
    A.block(nx, 0, ng, nx) = -beta * Jg;
  }
  if (nh > 0) {
    A.block(0, nx + ng, nx, nh) = Jh.transpose();
    A.block(nx + ng, 0, nh, nx) = -beta * p.mu.asDiagonal() * Jh;
    A.block(nx + ng, nx + ng, nh, nh) = Mat(-beta * h.asDiagonal());
  }
  return A;
}

SplitMatrices assemble_M_N_D(const ProblemGraph& g, const Point& p,
                             double rho, double tol) {
  SplitMatrices out;
  out.locals = solve_locals(g, p, rho, tol);
  const int nx = g.nx(), ng = g.ng(), nh = g.nh();
  const int np = nx + ng + nh;
  out.M = Mat::Zero(np, np);
  out.N = Mat::Zero(np, np);
  out.D = Mat::Zero(np, np);
  out.D.bottomRightCorner(ng + nh, ng + nh) =
      Mat::Identity(ng + nh, ng + nh);

  // Global vector of shifted decisions xbar = x + s, and the point carrying
  // the subproblem multipliers.
  Point pbar = p;
  for (int i = 0; i < g.num_agents(); ++i) {
    pbar.x.segment(g.x_offset(i), g.agents[i].dim) += out.locals[i].s;
    pbar.lam.segment(g.g_offset(i), g.agents[i].n_eq) = out.locals[i].nu;
    pbar.mu.segment(g.h_offset(i), g.agents[i].n_ineq) = out.locals[i].kappa;
  }

  // N: full coupled rows evaluated at the shifted point with the subproblem
  // multipliers.
  const Mat L = central_hessian(g, pbar);
  const Mat Jg = central_jac_g(g, pbar.x);
  const Mat Jh = central_jac_h(g, pbar.x);
  out.N.topLeftCorner(nx, nx) = L;
  if (ng > 0) {
    out.N.block(0, nx, nx, ng) = Jg.transpose();
    out.N.block(nx, 0, ng, nx) = Jg;
  }
  if (nh > 0) {
    out.N.block(0, nx + ng, nx, nh) = Jh.transpose();
    out.N.block(nx + ng, 0, nh, nx) = pbar.mu.asDiagonal() * Jh;
  }

  // M: block-diagonal local rows (own columns only) with the proximal rho,
  // evaluated at the same shifted point.
  for (int i = 0; i < g.num_agents(); ++i) {
    const auto& a = g.agents[i];
    const int n = a.dim;
    const Vec z = g.gather(i, pbar.x);
    Mat Hi = a.hess_f_own(z);
    if (a.n_eq > 0) Hi += a.hess_g(z, out.locals[i].nu).topLeftCorner(n, n);
    if (a.n_ineq > 0)
      Hi += a.hess_h(z, out.locals[i].kappa).topLeftCorner(n, n);
    Hi += rho * Mat::Identity(n, n);
    const int xo = g.x_offset(i);
    out.M.block(xo, xo, n, n) = Hi;
    if (a.n_eq > 0) {
      const Mat Jgi = a.jac_g(z).leftCols(n);
      const int go = nx + g.g_offset(i);
      out.M.block(xo, go, n, a.n_eq) = Jgi.transpose();
      out.M.block(go, xo, a.n_eq, n) = Jgi;
    }
    if (a.n_ineq > 0) {
      const Mat Jhi = a.jac_h(z).leftCols(n);
      const Vec hi = a.h(z);
      const int ho = nx + ng + g.h_offset(i);
      out.M.block(xo, ho, n, a.n_ineq) = Jhi.transpose();
      out.M.block(ho, xo, a.n_ineq, n) =
          out.locals[i].kappa.asDiagonal() * Jhi;
      out.M.block(ho, ho, a.n_ineq, a.n_ineq) = Mat(hi.asDiagonal());
      // Matching central block: complementarity slack on the diagonal.
      out.N.block(ho, ho, a.n_ineq, a.n_ineq) = Mat(hi.asDiagonal());
    }
  }
  return out;
}

GddReport gdd_metric(const Mat& M, const Mat& N) {
  GddReport rep;
  const Mat T = Mat::Identity(M.rows(), M.cols()) - M.partialPivLu().solve(N);
  if (!T.allFinite()) throw SolverError("local KKT matrix is singular");
  Eigen::JacobiSVD<Mat> svd(T);
  rep.norm = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  Eigen::EigenSolver<Mat> es(T);
  rep.spectral_radius = es.eigenvalues().cwiseAbs().maxCoeff();
  rep.contractive = rep.norm < 1.0;
  return rep;
}

StepReport max_step_size(const Mat& A) {
  StepReport rep;
  Eigen::EigenSolver<Mat> es(A);
  double ab = 1.0;
  for (int k = 0; k < es.eigenvalues().size(); ++k) {
    const std::complex<double> l = es.eigenvalues()(k);
    if (std::abs(l) < 1e-12) continue;  // zero modes do not constrain alpha
    if (l.real() <= 1e-12) {
      rep.ok = false;
      std::ostringstream os;
      os << "eigenvalue with nonpositive real part: " << l.real() << " + "
         << l.imag() << "i";
      rep.message = os.str();
      return rep;
    }
    ab = std::min(ab, 2.0 * l.real() / std::norm(l));
  }
  rep.ok = true;
  rep.alpha_bar = ab;
  rep.message = "ok";
  return rep;
}

double tune_beta(const ProblemGraph& g, const Point& p, double rho,
                 double tol) {
  const std::vector<LocalSolution> ys = solve_locals(g, p, rho, tol);
  Point pbar = p;
  for (int i = 0; i < g.num_agents(); ++i) {
    pbar.x.segment(g.x_offset(i), g.agents[i].dim) += ys[i].s;
    pbar.lam.segment(g.g_offset(i), g.agents[i].n_eq) = ys[i].nu;
    pbar.mu.segment(g.h_offset(i), g.agents[i].n_ineq) = ys[i].kappa;
  }
  const double num = lambda_min(central_hessian(g, pbar));
  Mat J(g.ng() + g.nh(), g.nx());
  J << central_jac_g(g, pbar.x), central_jac_h(g, pbar.x);
  Vec kbar(g.ng() + g.nh());
  kbar.head(g.ng()).setOnes();
  kbar.tail(g.nh()) = pbar.mu;
  const double den = lambda_max(J.transpose() * kbar.asDiagonal() * J);
  if (den <= 1e-14)
    throw SolverError("degenerate weighted Jacobian; cannot tune beta");
  const double beta = num / den;
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw SolverError("tuned beta is not positive");
  return beta;
}

double min_rho(const ProblemGraph& g, const Point& p) {
  double worst = 0.0;
  for (int i = 0; i < g.num_agents(); ++i) {
    const auto& a = g.agents[i];
    const int n = a.dim;
    const Vec z = g.gather(i, p.x);
    Mat Hi = a.hess_f_own(z);
    if (a.n_eq > 0) Hi += a.hess_g(z, g.lam_of(i, p)).topLeftCorner(n, n);
    if (a.n_ineq > 0) Hi += a.hess_h(z, g.mu_of(i, p)).topLeftCorner(n, n);
    worst = std::min(worst, lambda_min(Hi));
  }
  return worst < 0.0 ? -worst + 1e-8 : 0.0;
}

Mat solve_discrete_lyapunov(const Mat& A, const Mat& Q) {
  const int n = static_cast<int>(A.rows());
  if (n != A.cols() || Q.rows() != n || Q.cols() != n)
    throw ModelError("dimension mismatch in Lyapunov solve");
  if (n > 400) throw ModelError("Lyapunov solve guarded to dimension 400");
  const Eigen::ComplexSchur<Mat> schur(A);
  const CMat T = schur.matrixT();
  for (int j = 0; j < n; ++j)
    if (std::abs(T(j, j)) >= 1.0)
      throw SolverError("unstable matrix in discrete Lyapunov solve");
  const CMat U = schur.matrixU();
  const CMat Th = T.adjoint();
  const CMat Qt = U.adjoint() * Q * U;

  CMat Y = CMat::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    CVec rhs = -Qt.col(j);
    for (int k = 0; k < j; ++k) rhs -= T(k, j) * (Th * Y.col(k));
    // (T(j,j) * T^H - I) y_j = rhs, lower triangular.
    CMat Lj = T(j, j) * Th - CMat::Identity(n, n);
    Y.col(j) = Lj.triangularView<Eigen::Lower>().solve(rhs);
    if (!Y.col(j).allFinite())
      throw SolverError("singular discrete Lyapunov equation");
  }
  Mat X = (U * Y * U.adjoint()).real();
  X = (0.5 * (X + Mat(X.transpose()))).eval();
  const double res =
      (A.transpose() * X * A - X + Q).cwiseAbs().maxCoeff();
  if (res > 1e-8 * std::max(1.0, Q.cwiseAbs().maxCoeff()))
    throw SolverError("Lyapunov residual check failed");
  return X;
}

Constants convergence_constants(const Mat& P, const Mat& Q) {
  Constants c;
  Eigen::SelfAdjointEigenSolver<Mat> ep(P);
  c.lam_min_P = ep.eigenvalues().minCoeff();
  c.lam_max_P = ep.eigenvalues().maxCoeff();
  if (c.lam_min_P <= 0.0)
    throw SolverError("Lyapunov matrix is not positive definite");
  c.e = (1.0 - 1e-6) * lambda_min(Q);
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> ge(Mat(P - Q), P);
  c.C = ge.eigenvalues().maxCoeff();
  c.C0 = std::sqrt(c.lam_max_P / c.lam_min_P);
  c.C1 = std::sqrt(1.0 - c.e / c.lam_max_P);
  return c;
}

AssumptionReport check_assumptions(const ProblemGraph& g, const Point& p,
                                   double rho, double tau) {
  AssumptionReport rep;
  rep.active_set = active_rows(g, p, tau);
  for (int k : rep.active_set)
    if (p.mu[k] <= tau) rep.degenerate.push_back(k);
  rep.sc_margin = rep.active_set.empty() ? 0.0 : 1e300;
  for (int k : rep.active_set)
    rep.sc_margin = std::min(rep.sc_margin, p.mu[k]);
  // Also require inactive constraints to have (near) zero multipliers.
  bool inactive_ok = true;
  {
    const Vec h = central_h(g, p.x);
    for (int k = 0; k < h.size(); ++k)
      if (std::abs(h[k]) > tau && p.mu[k] > tau) inactive_ok = false;
  }
  rep.strict_complementarity =
      inactive_ok && (rep.active_set.empty() || rep.sc_margin > tau);

  Mat Ja;
  Vec ubar;
  active_jacobian(g, p, tau, /*partial=*/false, &Ja, &ubar);
  if (Ja.rows() == 0) {
    rep.licq = true;
    rep.licq_sigma_min = 0.0;
  } else {
    Eigen::JacobiSVD<Mat> svd(Ja);
    rep.licq_sigma_min = svd.singularValues().minCoeff();
    rep.licq = Ja.rows() <= Ja.cols() && rep.licq_sigma_min > 1e-8;
  }

  const Mat L = central_hessian(g, p);
  rep.hessian_lambda_min = lambda_min(L);
  rep.uniform_sosc = rep.hessian_lambda_min > 0.0;

  const Mat Z = kernel_basis(Ja, g.nx());
  rep.reduced_lambda_min =
      Z.cols() > 0 ? lambda_min(Mat(Z.transpose() * L * Z)) : 0.0;
  rep.sosc = Z.cols() == 0 || rep.reduced_lambda_min > 0.0;

  Mat Jd;
  Vec ud;
  active_jacobian(g, p, tau, /*partial=*/true, &Jd, &ud);
  const Mat Zd = kernel_basis(Jd, g.nx());
  rep.partial_lambda_min =
      Zd.cols() > 0 ? lambda_min(Mat(Zd.transpose() * L * Zd)) : 0.0;
  rep.partial_sosc = Zd.cols() == 0 || rep.partial_lambda_min > 0.0;

  rep.local_lambda_min = 1e300;
  for (int i = 0; i < g.num_agents(); ++i) {
    const auto& a = g.agents[i];
    const int n = a.dim;
    const Vec z = g.gather(i, p.x);
    Mat Hi = a.hess_f_own(z);
    if (a.n_eq > 0) Hi += a.hess_g(z, g.lam_of(i, p)).topLeftCorner(n, n);
    if (a.n_ineq > 0) Hi += a.hess_h(z, g.mu_of(i, p)).topLeftCorner(n, n);
    Hi += rho * Mat::Identity(n, n);
    rep.local_lambda_min = std::min(rep.local_lambda_min, lambda_min(Hi));
  }
  rep.local_regularity = rep.local_lambda_min > 0.0;

  std::ostringstream os;
  os << "LICQ " << (rep.licq ? "ok" : "FAIL") << " (sigma_min "
     << rep.licq_sigma_min << "); SC "
     << (rep.strict_complementarity ? "ok" : "FAIL") << " (margin "
     << rep.sc_margin << "); uniform curvature "
     << (rep.uniform_sosc ? "ok" : "no") << " (lmin "
     << rep.hessian_lambda_min << "); reduced curvature "
     << (rep.sosc ? "ok" : "FAIL") << " (lmin " << rep.reduced_lambda_min
     << "); partial " << (rep.partial_sosc ? "ok" : "no") << "; local "
     << (rep.local_regularity ? "ok" : "FAIL") << " (lmin "
     << rep.local_lambda_min << ")";
  rep.summary = os.str();
  return rep;
}

double min_gamma(const ProblemGraph& g, const Point& p, bool partial,
                 double tau) {
  const Mat L = central_hessian(g, p);
  Mat Ja;
  Vec ubar;
  active_jacobian(g, p, tau, partial, &Ja, &ubar);
  auto pd_at = [&](double gamma) {
    Mat W = L;
    if (Ja.rows() > 0)
      W += gamma * Ja.transpose() *
           ubar.array().square().matrix().asDiagonal() * Ja;
    return lambda_min(W) > 0.0;
  };
  if (pd_at(0.0)) return 0.0;
  double lo = 0.0, hi = 1e4;
  if (!pd_at(hi))
    throw SolverError(
        "no correction weight in [0, 1e4] restores positive curvature");
  while (hi - lo > 1e-3) {
    const double mid = 0.5 * (lo + hi);
    (pd_at(mid) ? hi : lo) = mid;
  }
  return hi;
}

GradPhiReport grad_phi_check(const ProblemGraph& g, const Point& p, double rho,
                             double fd_step, double tol) {
  GradPhiReport rep;
  const SplitMatrices sm = assemble_M_N_D(g, p, rho);
  const Mat closed =
      -sm.M.partialPivLu().solve(Mat(sm.N - sm.M * sm.D));
  if (!closed.allFinite())
    throw SolverError("local KKT matrix singular in derivative check");

  auto signature = [&](const std::vector<LocalSolution>& ys) {
    std::vector<int> sig;
    for (const auto& y : ys)
      for (int k : y.active) sig.push_back(k);
    return sig;
  };
  const std::vector<int> base_sig = signature(sm.locals);

  const int np = g.np();
  Mat fd(np, np);
  Vec p0 = p.stacked();
  for (int k = 0; k < np; ++k) {
    Vec pp = p0, pm = p0;
    pp[k] += fd_step;
    pm[k] -= fd_step;
    Point a{pp.head(g.nx()), pp.segment(g.nx(), g.ng()), pp.tail(g.nh())};
    Point b{pm.head(g.nx()), pm.segment(g.nx(), g.ng()), pm.tail(g.nh())};
    const auto ya = solve_locals(g, a, rho);
    const auto yb = solve_locals(g, b, rho);
    if (signature(ya) != base_sig || signature(yb) != base_sig)
      rep.active_set_changed = true;
    fd.col(k) =
        (stacked_solution(g, ya) - stacked_solution(g, yb)) / (2.0 * fd_step);
  }
  rep.max_abs_err = (closed - fd).cwiseAbs().maxCoeff();
  rep.ok = !rep.active_set_changed && rep.max_abs_err <= tol;
  return rep;
}

BasinReport certify_basin(const ProblemGraph& g, const RunResult& run,
                          const Point& p_star, const Mat& P,
                          double plateau_v) {
  BasinReport rep;
  rep.plateau = plateau_v;
  // Reference active set at the solution.
  std::vector<int> ref;
  {
    const Vec h = central_h(g, p_star.x);
    for (int k = 0; k < h.size(); ++k)
      if (std::abs(h[k]) <= 1e-6) ref.push_back(k);
  }
  double prev_v = 1e300;
  for (std::size_t q = 0; q < run.trace.size(); ++q) {
    const auto& rec = run.trace[q];
    const Vec dp = rec.p.stacked() - p_star.stacked();
    const double v = dp.dot(P * dp);
    if (v > plateau_v && q > 0 && v >= prev_v) {
      rep.first_violation = static_cast<int>(q);
      rep.reason = "Lyapunov function did not decrease";
      return rep;
    }
    if (!rec.locals.empty() && v > plateau_v) {
      std::vector<int> act;
      for (const auto& y : rec.locals)
        for (int k : y.active) act.push_back(k);
      std::sort(act.begin(), act.end());
      if (act != ref) {
        rep.first_violation = static_cast<int>(q);
        rep.reason = "subproblem active set differs from the reference";
        return rep;
      }
      for (const auto& y : rec.locals)
        if (!y.degenerate.empty()) {
          rep.first_violation = static_cast<int>(q);
          rep.reason = "degenerate (weakly active) constraint encountered";
          return rep;
        }
    }
    prev_v = std::min(prev_v, v);
  }
  rep.certified = true;
  rep.reason = "active sets stable, Lyapunov decrease verified";
  return rep;
}

Certificate make_certificate(const ProblemGraph& g, const Point& p_ref,
                             double beta_fixed, double gamma, bool partial,
                             double alpha_fixed) {
  Certificate c;
  c.dim_p = g.np();
  c.rho = min_rho(g, p_ref);
  c.beta = beta_fixed > 0.0 ? beta_fixed : tune_beta(g, p_ref, c.rho);
  const Mat A = assemble_A(g, p_ref, c.beta, gamma, partial);
  const StepReport sr = max_step_size(A);
  c.step_ok = sr.ok;
  c.step_message = sr.message;
  c.assumptions = check_assumptions(g, p_ref, c.rho);
  if (sr.ok) {
    c.alpha_bar = sr.alpha_bar;
    c.alpha = alpha_fixed > 0.0 ? alpha_fixed : 0.9 * sr.alpha_bar;
    const Mat Acl =
        Mat::Identity(A.rows(), A.cols()) - c.alpha * A;
    const Mat Q = Mat::Identity(A.rows(), A.cols());
    c.P = solve_discrete_lyapunov(Acl, Q);
    c.constants = convergence_constants(c.P, Q);
  }
  return c;
}

std::string certificate_text(const Certificate& c) {
  std::ostringstream os;
  os << "parameter certificate (p-dimension " << c.dim_p << ")\n"
     << "  rho       " << c.rho << "\n"
     << "  beta      " << c.beta << "\n";
  if (c.step_ok) {
    os << "  alpha_bar " << c.alpha_bar << "\n"
       << "  alpha     " << c.alpha << "\n"
       << "  C         " << c.constants.C << "\n"
       << "  C0        " << c.constants.C0 << "\n"
       << "  C1        " << c.constants.C1 << "\n"
       << "  lam(P)    [" << c.constants.lam_min_P << ", "
       << c.constants.lam_max_P << "]\n";
  } else {
    os << "  step size: FAILED (" << c.step_message << ")\n";
  }
  os << "  assumptions: " << c.assumptions.summary << "\n";
  return os.str();
}

}  // namespace analysis
}  // namespace sbdp
