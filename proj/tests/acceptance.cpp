// Integration suite: prints one PASS/FAIL line per acceptance criterion and
// exits with the number of failed criteria. Sub-checks that fail print the
// measured values so the log explains every red line.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <vector>

#include "sbdp/admm.hpp"
#include "sbdp/analysis.hpp"
#include "sbdp/engine.hpp"
#include "sbdp/scenario.hpp"

using namespace sbdp;
using namespace sbdp::analysis;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;
std::vector<std::string> notes;

void criterion(int id, const std::string& what, bool pass) {
  std::printf("CRITERION %d: %s  [%s]\n", id, pass ? "PASS" : "FAIL",
              what.c_str());
  for (const auto& n : notes) std::printf("    %s\n", n.c_str());
  notes.clear();
  if (!pass) ++failures;
}

bool expect(bool ok, const std::string& detail) {
  if (!ok) notes.push_back("failed: " + detail);
  return ok;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

EngineConfig nonconvex_config() {
  EngineConfig cfg;
  cfg.variant = Variant::Plus;
  cfg.alpha = 0.35;
  cfg.beta = 2.0;
  cfg.rho = 0.0;
  cfg.eps = 1e-8;
  cfg.max_iter = 400;
  return cfg;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

int main() {
  // ---- shared setup -----------------------------------------------------
  ProblemGraph nc = make_nonconvex2();
  Point p0 = nc.zero_point();
  p0.x << 1.4, 1.4;
  const Point nc_star = central_solve(nc, Vec::Zero(2));

  // ---- 1: nonconvex two-agent optimum -----------------------------------
  RunResult nc_run;
  {
    const auto t0 = Clock::now();
    nc_run = run_engine(nc, p0, nonconvex_config());
    const double secs = seconds_since(t0);
    bool ok = expect(nc_run.status == RunStatus::Converged, "run converged");
    ok &= expect(std::abs(nc_run.final_point.x[0] - 0.82) <= 5e-3 &&
                     std::abs(nc_run.final_point.x[1] - 1.84) <= 5e-3,
                 "x near [0.82, 1.84], got [" + fmt(nc_run.final_point.x[0]) +
                     ", " + fmt(nc_run.final_point.x[1]) + "]");
    ok &= expect(std::abs(nc_run.final_point.mu[0]) <= 5e-3 &&
                     std::abs(nc_run.final_point.mu[1] - 0.4) <= 5e-3,
                 "mu near [0, 0.4]");
    ok &= expect(secs < 1.0, "runtime < 1 s, got " + fmt(secs));
    criterion(1, "nonconvex two-agent run reaches the reference optimum", ok);
  }

  // ---- 2: tuning pipeline ------------------------------------------------
  Certificate cert;
  {
    bool ok = true;
    const double beta_f = tune_beta(nc, nc_star, 0.0);
    ok &= expect(std::abs(beta_f - 2.0) <= 0.1,
                 "dual step heuristic in 2 +- 0.1, got " + fmt(beta_f));
    cert = make_certificate(nc, nc_star, 2.0, 0.0, false, 0.35);
    ok &= expect(cert.step_ok, "step-size rule succeeded");
    ok &= expect(std::abs(cert.alpha_bar - 0.4) <= 0.02,
                 "alpha_bar 0.4 +- 0.02, got " + fmt(cert.alpha_bar));
    ok &= expect(std::abs(cert.constants.C - 0.76) <= 0.03,
                 "C 0.76 +- 0.03, got " + fmt(cert.constants.C));
    ok &= expect(std::abs(cert.constants.C0 - 2.07) <= 0.05,
                 "C0 2.07 +- 0.05, got " + fmt(cert.constants.C0));
    ok &= expect(std::abs(cert.constants.C1 - 0.88) <= 0.05,
                 "C1 0.88 +- 0.05, got " + fmt(cert.constants.C1));
    criterion(2, "tuning pipeline constants on the nonconvex instance", ok);
  }

  // ---- 3: weighted-norm decrease and envelopes ---------------------------
  {
    bool ok = cert.step_ok && nc_run.status == RunStatus::Converged;
    const Vec star = nc_star.stacked();
    const Mat& P = cert.P;
    const double C = cert.constants.C;
    const double C0 = cert.constants.C0, C1 = cert.constants.C1;
    double v_prev = 0.0, v0 = 0.0, e0 = 0.0;
    for (std::size_t q = 0; ok && q < nc_run.trace.size(); ++q) {
      const Vec d = nc_run.trace[q].p.stacked() - star;
      const double v = d.dot(P * d);
      const double e2 = d.norm();
      if (q == 0) {
        v0 = v;
        e0 = e2;
      } else if (e2 > 1e-7) {  // enforced until the residual plateaus
        ok &= expect(v < v_prev, "weighted norm strictly decreasing at q=" +
                                     std::to_string(q));
        ok &= expect(v <= std::pow(C, double(q)) * v0 * (1 + 1e-9),
                     "V <= C^q V0 at q=" + std::to_string(q));
        ok &= expect(e2 <= C0 * std::pow(C1, double(q)) * e0 * (1 + 1e-9),
                     "R-linear envelope at q=" + std::to_string(q));
      }
      v_prev = v;
    }
    const BasinReport basin = certify_basin(nc, nc_run, nc_star, cert.P);
    ok &= expect(basin.certified, "basin certification: " + basin.reason);
    criterion(3, "certified run: weighted-norm decrease and both envelopes",
              ok);
  }

  // ---- 4: weak/strong coupling dichotomy ---------------------------------
  {
    bool ok = true;
    EngineConfig base;
    base.variant = Variant::Baseline;
    base.alpha = 1.0;
    base.eps = 1e-10;
    base.max_iter = 300;
    for (double a : {0.3, 0.9}) {
      ProblemGraph g = make_quad2(a);
      Point s = g.zero_point();
      s.x << 1.0, 1.0;
      const RunResult r = run_engine(g, s, base);
      ok &= expect(r.status == RunStatus::Converged &&
                       r.final_point.x.cwiseAbs().maxCoeff() <= 1e-8,
                   "plain decomposition converges at a=" + fmt(a));
    }
    for (double a : {1.1, 4.0}) {
      ProblemGraph g = make_quad2(a);
      Point s = g.zero_point();
      s.x << 1.0, 1.0;
      const RunResult r = run_engine(g, s, base);
      ok &= expect(r.status != RunStatus::Converged,
                   "plain decomposition diverges at a=" + fmt(a));
    }
    // Recursion-matrix eigenvalues {0, +-i a}.
    for (double a : {0.3, 4.0}) {
      ProblemGraph g = make_quad2(a);
      Vec x0(2);
      x0 << 1.0, 1.0;
      const Point s = central_solve(g, x0);
      const SplitMatrices sm = assemble_M_N_D(g, s, 0.0);
      Eigen::EigenSolver<Mat> es(
          Mat(Mat::Identity(3, 3) - sm.M.partialPivLu().solve(sm.N)));
      double re = 0.0, im = 0.0;
      for (int k = 0; k < 3; ++k) {
        re = std::max(re, std::abs(es.eigenvalues()[k].real()));
        im = std::max(im, std::abs(es.eigenvalues()[k].imag()));
      }
      ok &= expect(re <= 1e-12 && std::abs(im - a) <= 1e-12,
                   "recursion eigenvalues {0, +-i a} at a=" + fmt(a));
    }
    // Two equalities, a = 4: damped plain decomposition fails for every
    // alpha, the mixing update with analysis-supplied parameters converges.
    ProblemGraph g2 = make_quad2(4.0, true);
    Point s2 = g2.zero_point();
    s2.x << 1.0, 1.0;
    for (double alpha : {0.1, 0.5, 0.9}) {
      EngineConfig damped = base;
      damped.alpha = alpha;
      damped.max_iter = 2000;
      const RunResult r = run_engine(g2, s2, damped);
      ok &= expect(r.status != RunStatus::Converged,
                   "damped plain decomposition fails at alpha=" + fmt(alpha));
    }
    const Point star2 = central_solve(g2, s2.x);
    const Certificate c2 = make_certificate(g2, star2);
    ok &= expect(c2.step_ok, "tuning pipeline on the two-equality instance");
    if (c2.step_ok) {
      EngineConfig plus;
      plus.variant = Variant::Plus;
      plus.alpha = c2.alpha;
      plus.beta = c2.beta;
      plus.rho = c2.rho;
      plus.eps = 1e-10;
      plus.max_iter = 5000;
      const RunResult r = run_engine(g2, s2, plus);
      ok &= expect(
          r.status == RunStatus::Converged &&
              (r.final_point.stacked() - star2.stacked()).norm() <= 1e-6,
          "mixing update with supplied (alpha=" + fmt(plus.alpha) +
              ", beta=" + fmt(plus.beta) + ") reaches the oracle solution");
    }
    criterion(4, "coupling-strength dichotomy and rescue by the mixing update",
              ok);
  }

  // ---- 5: bilinear consensus dichotomy -----------------------------------
  {
    bool ok = true;
    ProblemGraph g = make_bilinear2();
    const Point z = g.zero_point();
    for (double b : {0.1, 1.0, 10.0}) {
      const Mat A = assemble_A(g, z, b, 0.0);
      Eigen::EigenSolver<Mat> es(A);
      const std::complex<double> root =
          std::sqrt(std::complex<double>(1.0 - 8.0 * b));
      bool neg_pair = false;
      double worst = 0.0;
      for (int k = 0; k < 3; ++k) {
        const std::complex<double> l = es.eigenvalues()[k];
        const double d =
            std::min({std::abs(l - std::complex<double>(1.0, 0.0)),
                      std::abs(l - (-0.5 - 0.5 * root)),
                      std::abs(l - (-0.5 + 0.5 * root))});
        worst = std::max(worst, d);
        if (l.real() < 0.0) neg_pair = true;
      }
      ok &= expect(worst <= 1e-10 && neg_pair,
                   "closed-form eigenvalues at beta=" + fmt(b));
    }
    const double g_min = min_gamma(g, z);
    ok &= expect(std::abs(g_min - 0.5) <= 1e-3,
                 "smallest stabilizing weight 0.5, got " + fmt(g_min));
    Point s = g.zero_point();
    s.x << 1.0, -1.0;
    EngineConfig cfg;
    cfg.alpha = 0.9;
    cfg.beta = 0.1;
    cfg.rho = 1.0;
    cfg.eps = 1e-8;
    cfg.max_iter = 200;
    cfg.variant = Variant::Plus;
    const RunResult bad = run_engine(g, s, cfg);
    double worst_err = 0.0;
    for (const auto& rec : bad.trace)
      worst_err = std::max(worst_err, rec.p.stacked().norm());
    ok &= expect(bad.status != RunStatus::Converged && worst_err > 1e3,
                 "uncorrected run blows past 1e3 within 200 iterations");
    cfg.variant = Variant::PlusSosc;
    cfg.gamma = 1.0;
    cfg.max_iter = 2000;
    const RunResult good = run_engine(g, s, cfg);
    ok &= expect(good.status == RunStatus::Converged &&
                     good.final_point.stacked().cwiseAbs().maxCoeff() <= 1e-8,
                 "corrected run converges to the origin");
    criterion(5, "bilinear consensus: correction weight decides convergence",
              ok);
  }

  // ---- 6: feature-split logistic regression ------------------------------
  std::shared_ptr<LogregData> lr_data;
  ProblemGraph lr = make_logreg(200, 100, 10, 1, 0.1, 0.25, &lr_data);
  Point lr_star;
  {
    const auto t0 = Clock::now();
    bool ok = true;
    lr_star = central_solve(lr, Vec::Zero(100));
    EngineConfig cfg;
    cfg.variant = Variant::PlusIdentity;
    cfg.alpha = 0.85;
    cfg.rho = 0.01;
    cfg.eps = 1e-9;
    cfg.max_iter = 400;
    const RunResult r = run_engine(lr, lr.zero_point(), cfg);
    double err = std::numeric_limits<double>::infinity();
    int hit = -1;
    for (const auto& rec : r.trace) {
      err = (rec.p.x - lr_star.x).norm();
      if (err <= 1e-5) {
        hit = rec.iter;
        break;
      }
    }
    ok &= expect(hit >= 0,
                 "identity variant at alpha=0.85 reaches 1e-5 within 400 "
                 "iterations; best |x - x*| = " +
                     fmt(err));
    {
      // Diagnostic only (not part of the criterion): the analysis-supplied
      // step size converges on the same instance.
      EngineConfig diag = cfg;
      diag.alpha = 0.42;
      const RunResult rd = run_engine(lr, lr.zero_point(), diag);
      notes.push_back("note: same run at alpha=0.42 -> " +
                      std::string(rd.status == RunStatus::Converged
                                      ? "converged"
                                      : "not converged") +
                      " after " + std::to_string(rd.iterations) +
                      " iterations, |x - x*| = " +
                      fmt((rd.final_point.x - lr_star.x).norm()));
      for (const auto& rec : r.ledger.records)
        if (rec.iter >= 0)
          ok &= expect(rec.floats_total == 1800,
                       "1800 floats per iteration, got " +
                           std::to_string(rec.floats_total) + " at iter " +
                           std::to_string(rec.iter));
    }
    AdmmOptions aopt;
    aopt.penalty = 0.1;
    aopt.tol = 1e-5;
    aopt.max_iter = 4000;
    const AdmmResult ar = admm_logreg_baseline(*lr_data, lr_star.x, aopt);
    ok &= expect(ar.converged,
                 "consensus splitting baseline reaches 1e-5 (got " +
                     fmt(ar.err2.back()) + " after " +
                     std::to_string(ar.iterations) + " iterations)");
    if (ar.converged)
      notes.push_back("note: splitting baseline took " +
                      std::to_string(ar.iterations) + " iterations");
    const double secs = seconds_since(t0);
    ok &= expect(secs < 60.0, "runtime < 60 s, got " + fmt(secs));
    criterion(6, "regression benchmark: distributed run, splitting baseline, "
                 "exact float budget", ok);
  }

  // ---- 7: property suites -------------------------------------------------
  {
    bool ok = true;
    struct Case {
      ProblemGraph g;
      Point star;
      EngineConfig cfg;
    };
    std::vector<Case> cases;
    {
      Case c{make_quad2(4.0, true), {}, {}};
      c.star = central_solve(c.g, Vec::Zero(2));
      c.cfg.variant = Variant::Plus;
      c.cfg.alpha = 0.5;
      c.cfg.beta = 0.05;
      cases.push_back(std::move(c));
    }
    {
      Case c{make_bilinear2(), {}, {}};
      c.star = central_solve(c.g, Vec::Zero(2));
      c.cfg.variant = Variant::PlusSosc;
      c.cfg.alpha = 0.9;
      c.cfg.beta = 0.1;
      c.cfg.rho = 1.0;
      c.cfg.gamma = 1.0;
      cases.push_back(std::move(c));
    }
    {
      Case c{make_nonconvex2(), nc_star, nonconvex_config()};
      cases.push_back(std::move(c));
    }
    {
      Case c{lr, lr_star, {}};
      c.cfg.variant = Variant::PlusIdentity;
      c.cfg.alpha = 0.42;
      c.cfg.rho = 0.01;
      cases.push_back(std::move(c));
    }
    for (auto& c : cases) {
      c.cfg.eps = 1e-300;  // force exactly one full update step
      c.cfg.max_iter = 1;
      const RunResult r = run_engine(c.g, c.star, c.cfg);
      const double moved =
          (r.final_point.stacked() - c.star.stacked()).cwiseAbs().maxCoeff();
      ok &= expect(moved <= 1e-6, "fixed point of " + c.g.name +
                                      ": one step moves " + fmt(moved));
    }

    // Factorization of the mixing matrices against the subproblem KKT
    // blocks: P_i = blkdiag(I, -beta I, -beta I) * M_i at the solution.
    for (const double beta : {2.0}) {
      const SplitMatrices sm = assemble_M_N_D(nc, nc_star, 0.0);
      const auto ys = solve_locals(nc, nc_star, 0.0);
      double resid = 0.0;
      for (int i = 0; i < nc.num_agents(); ++i) {
        const LocalNlp nlp = make_local_nlp(
            nc, i, nc.gather(i, nc_star.x), Vec::Zero(nc.agents[i].dim), 0.0);
        const Mat P = mixing_matrix(nlp, ys[i], beta);
        // Global indices of agent i's rows in [s; nu; kappa] ordering.
        std::vector<int> idx;
        for (int k = 0; k < nc.agents[i].dim; ++k)
          idx.push_back(nc.x_offset(i) + k);
        for (int k = 0; k < nc.agents[i].n_eq; ++k)
          idx.push_back(nc.nx() + nc.g_offset(i) + k);
        for (int k = 0; k < nc.agents[i].n_ineq; ++k)
          idx.push_back(nc.nx() + nc.ng() + nc.h_offset(i) + k);
        Mat Mi(idx.size(), idx.size());
        for (std::size_t r = 0; r < idx.size(); ++r)
          for (std::size_t s = 0; s < idx.size(); ++s)
            Mi(r, s) = sm.M(idx[r], idx[s]);
        Vec scale = Vec::Constant(idx.size(), -beta);
        scale.head(nc.agents[i].dim).setOnes();
        resid = std::max(resid,
                         (P - scale.asDiagonal() * Mi).cwiseAbs().maxCoeff());
      }
      ok &= expect(resid <= 1e-8,
                   "mixing/KKT factorization residual " + fmt(resid));
    }

    // Solution-map derivative checks.
    {
      ProblemGraph q2 = make_quad2(4.0, true);
      Point p = q2.zero_point();
      p.x << 0.3, -0.2;
      const GradPhiReport a = grad_phi_check(q2, p, 0.0);
      ok &= expect(a.ok && a.max_abs_err <= 1e-6,
                   "solution-map derivative on the quadratic pair, err " +
                       fmt(a.max_abs_err));
      const GradPhiReport b = grad_phi_check(nc, nc_star, 0.0);
      ok &= expect(b.ok && b.max_abs_err <= 1e-3,
                   "solution-map derivative on the nonconvex pair, err " +
                       fmt(b.max_abs_err));
    }

    // Communication budgets for every variant plus neighbor-affine mode.
    {
      ProblemGraph small = make_logreg(40, 12, 3, 7);
      Point z0 = small.zero_point();
      const struct {
        Variant v;
        bool na;
      } combos[] = {{Variant::Baseline, false},
                    {Variant::Plus, false},
                    {Variant::PlusIdentity, false},
                    {Variant::PlusSosc, false},
                    {Variant::PlusPartialSosc, false},
                    {Variant::Plus, true},
                    {Variant::PlusSosc, true}};
      for (const auto& cb : combos) {
        EngineConfig cfg;
        cfg.variant = cb.v;
        cfg.alpha = 0.4;
        cfg.beta = 1.0;
        cfg.rho = 0.01;
        cfg.gamma = cb.v == Variant::PlusSosc ? 0.1 : 0.0;
        cfg.eps = 1e-9;
        cfg.max_iter = 50;
        cfg.neighbor_affine = cb.na;
        const RunResult r = run_engine(small, z0, cfg);
        std::string msg;
        const bool want_corr = cb.v == Variant::PlusSosc;
        ok &= expect(r.status != RunStatus::Failed &&
                         verify_budget(r.ledger, small, want_corr, cb.na, &msg),
                     std::string("budget for ") + variant_name(cb.v) +
                         (cb.na ? " (neighbor-affine)" : "") + ": " + msg);
      }
    }

    // Derivative audit on every catalog problem.
    {
      std::vector<ProblemGraph> all;
      all.push_back(make_quad2(4.0, true));
      all.push_back(make_bilinear2());
      all.push_back(make_nonconvex2());
      all.push_back(make_logreg(30, 8, 2, 5));
      for (auto& g : all) {
        Point p = g.zero_point();
        for (Eigen::Index k = 0; k < p.x.size(); ++k)
          p.x[k] = 0.1 + 0.03 * double(k % 5);
        p.lam.setConstant(0.3);
        p.mu.setConstant(0.2);
        const AuditReport rep = finite_difference_audit(g, p);
        ok &= expect(rep.ok, "derivative audit on " + g.name);
      }
    }

    // Bitwise CSV reproducibility for an identical seed.
    {
      const char* text =
          "problem = logreg\nm = 60\nn = 20\nagents = 4\nseed = 3\n"
          "variant = plus_identity\nalpha = 0.42\nrho = 0.01\n"
          "eps = 1e-9\nmax_iter = 200\nanalysis = off\n";
      const ScenarioResult a = run_scenario(parse_scenario(text));
      const ScenarioResult b = run_scenario(parse_scenario(text));
      ok &= expect(a.csv == b.csv && a.run.status == RunStatus::Converged,
                   "bitwise identical trace for identical seeds");
    }
    criterion(7, "property suites: fixed point, factorization, derivatives, "
                 "budgets, reproducibility", ok);
  }

  std::printf("%d of 7 criteria passed\n", 7 - failures);
  return failures;
}
