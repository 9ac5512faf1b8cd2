#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <complex>

#include "doctest.h"
#include "sbdp/analysis.hpp"
#include "sbdp/problems.hpp"

using namespace sbdp;
using namespace sbdp::analysis;

namespace {

const double kX1 = 0.8165810768427796;
const double kX2 = 1.8369272109507901;
const double kMu2 = 0.3994037914268429;

Point reference_nonconvex(const ProblemGraph& g) {
  Point p = g.zero_point();
  p.x << kX1, kX2;
  p.mu << 0.0, kMu2;
  return p;
}

}  // namespace

TEST_CASE("centralized oracle reproduces the reference optimum") {
  ProblemGraph g = make_nonconvex2();
  Vec x0(2);
  x0 << 1.4, 1.4;
  const Point p = central_solve(g, x0);
  CHECK(p.x[0] == doctest::Approx(kX1).epsilon(1e-8));
  CHECK(p.x[1] == doctest::Approx(kX2).epsilon(1e-8));
  CHECK(p.mu[1] == doctest::Approx(kMu2).epsilon(1e-7));
}

TEST_CASE("update linearization of the bilinear problem has the closed form") {
  // At any point: A = [[gamma, 1-gamma, 1], [1-gamma, gamma, -1],
  //                    [-beta, beta, 0]].
  ProblemGraph g = make_bilinear2();
  Point p = g.zero_point();
  const double beta = 0.1, gamma = 1.0;
  const Mat A = assemble_A(g, p, beta, gamma);
  Mat want(3, 3);
  want << gamma, 1 - gamma, 1, 1 - gamma, gamma, -1, -beta, beta, 0;
  CHECK((A - want).cwiseAbs().maxCoeff() <= 1e-12);

  // Without the correction the matrix has a negative-real-part eigenvalue
  // pair -1/2 +- sqrt(1 - 8 beta)/2 next to the eigenvalue 1.
  for (double b : {0.1, 1.0, 10.0}) {
    const Mat A0 = assemble_A(g, p, b, 0.0);
    Eigen::EigenSolver<Mat> es(A0);
    std::vector<std::complex<double>> ev(3);
    for (int k = 0; k < 3; ++k) ev[k] = es.eigenvalues()[k];
    std::sort(ev.begin(), ev.end(), [](auto u, auto v) {
      return u.real() != v.real() ? u.real() < v.real()
                                  : u.imag() < v.imag();
    });
    const std::complex<double> root = std::sqrt(std::complex<double>(1 - 8 * b));
    std::vector<std::complex<double>> want0 = {
        -0.5 - 0.5 * root, -0.5 + 0.5 * root, {1.0, 0.0}};
    std::sort(want0.begin(), want0.end(), [](auto u, auto v) {
      return u.real() != v.real() ? u.real() < v.real()
                                  : u.imag() < v.imag();
    });
    for (int k = 0; k < 3; ++k)
      CHECK(std::abs(ev[k] - want0[k]) <= 1e-10);
    CHECK(ev[0].real() < 0.0);  // a pair with negative real part
  }
}

TEST_CASE("step-size rule on the nonconvex reference") {
  ProblemGraph g = make_nonconvex2();
  const Point p = reference_nonconvex(g);
  const Mat A = assemble_A(g, p, 2.0);
  const StepReport sr = max_step_size(A);
  REQUIRE(sr.ok);
  CHECK(sr.alpha_bar == doctest::Approx(0.4).epsilon(1e-10));
}

TEST_CASE("step-size rule caps at one and rejects unstable directions") {
  ProblemGraph g = make_quad2(4.0);
  const Point p = central_solve(g, Vec(Vec{{1.0, 1.0}}));
  const Mat A = assemble_A(g, p, 0.054013534593336306);
  const StepReport sr = max_step_size(A);
  REQUIRE(sr.ok);
  CHECK(sr.alpha_bar == doctest::Approx(1.0));

  // Bilinear problem without correction: negative-real-part eigenvalues.
  ProblemGraph b = make_bilinear2();
  const StepReport bad = max_step_size(assemble_A(b, b.zero_point(), 0.1));
  CHECK_FALSE(bad.ok);
}

TEST_CASE("dual step heuristic at the nonconvex reference") {
  ProblemGraph g = make_nonconvex2();
  const Point p = reference_nonconvex(g);
  CHECK(tune_beta(g, p, 0.0) == doctest::Approx(1.1915).epsilon(1e-3));
}

TEST_CASE("proximal weight covers indefinite own blocks") {
  ProblemGraph g = make_bilinear2();
  CHECK(min_rho(g, g.zero_point()) == doctest::Approx(1e-8));
  ProblemGraph n = make_nonconvex2();
  CHECK(min_rho(n, reference_nonconvex(n)) <= 1e-7);
}

TEST_CASE("discrete Lyapunov solver verifies its residual") {
  Mat A(2, 2);
  A << 0.5, 0.2, -0.1, 0.3;
  const Mat Q = Mat::Identity(2, 2);
  const Mat P = solve_discrete_lyapunov(A, Q);
  CHECK((A.transpose() * P * A - P + Q).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((P - P.transpose()).cwiseAbs().maxCoeff() == 0.0);

  Mat U(2, 2);
  U << 1.5, 0.0, 0.0, 0.2;  // unstable
  CHECK_THROWS_AS(solve_discrete_lyapunov(U, Q), SolverError);
  CHECK_THROWS_AS(solve_discrete_lyapunov(Mat::Zero(401, 401),
                                          Mat::Identity(401, 401)),
                  ModelError);
}

TEST_CASE("convergence constants at the certified step size") {
  ProblemGraph g = make_nonconvex2();
  const Point p = reference_nonconvex(g);
  const Certificate c = make_certificate(g, p, 2.0, 0.0, false, 0.35);
  REQUIRE(c.step_ok);
  CHECK(c.alpha == doctest::Approx(0.35));
  CHECK(c.constants.C == doctest::Approx(0.7666988016913578).epsilon(1e-8));
  CHECK(c.constants.C0 == doctest::Approx(2.065583039017917).epsilon(1e-8));
  CHECK(c.constants.C1 == doctest::Approx(0.875613385970862).epsilon(1e-6));
  CHECK(c.constants.lam_min_P == doctest::Approx(1.00461).epsilon(1e-4));
  CHECK(c.constants.lam_max_P == doctest::Approx(4.28630).epsilon(1e-4));
}

TEST_CASE("plain-decomposition contraction metric tracks the coupling strength") {
  for (double a : {0.5, 4.0}) {
    ProblemGraph g = make_quad2(a);
    const Point p = central_solve(g, Vec(Vec{{1.0, 1.0}}));
    const SplitMatrices sm = assemble_M_N_D(g, p, 0.0);
    const GddReport rep = gdd_metric(sm.M, sm.N);
    CHECK(rep.spectral_radius == doctest::Approx(a).epsilon(1e-8));
    CHECK(rep.contractive == (a < 1.0));
    // Eigenvalues of I - M^{-1}N are {0, +-i a}: purely imaginary pair.
    Eigen::EigenSolver<Mat> es(
        Mat(Mat::Identity(3, 3) - sm.M.partialPivLu().solve(sm.N)));
    double max_re = 0.0, max_im = 0.0;
    for (int k = 0; k < 3; ++k) {
      max_re = std::max(max_re, std::abs(es.eigenvalues()[k].real()));
      max_im = std::max(max_im, std::abs(es.eigenvalues()[k].imag()));
    }
    CHECK(max_re <= 1e-12);
    CHECK(max_im == doctest::Approx(a).epsilon(1e-10));
  }
}

TEST_CASE("assumption checks at the reference optimum") {
  ProblemGraph g = make_nonconvex2();
  const AssumptionReport rep = check_assumptions(g, reference_nonconvex(g), 0.0);
  CHECK(rep.licq);
  CHECK(rep.strict_complementarity);
  CHECK(rep.sc_margin == doctest::Approx(kMu2).epsilon(1e-6));
  CHECK(rep.uniform_sosc);
  CHECK(rep.sosc);
  CHECK(rep.local_regularity);
  REQUIRE(rep.active_set.size() == 1);
  CHECK(rep.active_set[0] == 1);
  CHECK(rep.degenerate.empty());
}

TEST_CASE("smallest stabilizing correction weight of the bilinear problem") {
  ProblemGraph g = make_bilinear2();
  CHECK(min_gamma(g, g.zero_point()) == doctest::Approx(0.5).epsilon(2e-3));
}

TEST_CASE("solution-map derivative matches finite differences") {
  ProblemGraph g = make_quad2(4.0, true);
  Point p = g.zero_point();
  p.x << 0.3, -0.2;
  const GradPhiReport rep = grad_phi_check(g, p, 0.0);
  CHECK(rep.ok);
  CHECK(rep.max_abs_err <= 1e-6);

  // The closed form is derived at a fixed point; evaluate it there.
  ProblemGraph n = make_nonconvex2();
  const GradPhiReport rn = grad_phi_check(n, reference_nonconvex(n), 0.0);
  CHECK(rn.ok);
  CHECK(rn.max_abs_err <= 1e-3);
}

TEST_CASE("basin certification accepts the recorded nonconvex run") {
  ProblemGraph g = make_nonconvex2();
  EngineConfig cfg;
  cfg.variant = Variant::Plus;
  cfg.alpha = 0.35;
  cfg.beta = 2.0;
  cfg.eps = 1e-8;
  cfg.max_iter = 400;
  Point p0 = g.zero_point();
  p0.x << 1.4, 1.4;
  const RunResult run = run_engine(g, p0, cfg);
  REQUIRE(run.status == RunStatus::Converged);
  const Point star = reference_nonconvex(g);
  const Certificate c = make_certificate(g, star, 2.0, 0.0, false, 0.35);
  REQUIRE(c.step_ok);
  const BasinReport rep = certify_basin(g, run, star, c.P);
  CHECK(rep.certified);
}
