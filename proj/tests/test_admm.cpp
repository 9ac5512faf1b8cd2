#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "sbdp/admm.hpp"
#include "sbdp/analysis.hpp"

using namespace sbdp;

TEST_CASE("feature-sharing splitting reaches the centralized solution") {
  std::shared_ptr<LogregData> data;
  ProblemGraph g = make_logreg(60, 20, 4, 2, 0.1, 0.25, &data);
  const Point star = analysis::central_solve(g, Vec::Zero(20));
  AdmmOptions opt;
  opt.penalty = 0.1;
  opt.tol = 1e-5;
  opt.max_iter = 4000;
  const AdmmResult r = admm_logreg_baseline(*data, star.x, opt);
  REQUIRE(r.converged);
  CHECK((r.x - star.x).norm() <= 1e-5);
  // The error trace starts at |x_ref| and is recorded every iteration.
  CHECK((int)r.err2.size() == r.iterations + 1);
  CHECK(r.err2.front() == doctest::Approx(star.x.norm()));
}

TEST_CASE("iterates respect the box constraints") {
  std::shared_ptr<LogregData> data;
  ProblemGraph g = make_logreg(40, 12, 3, 4, 0.1, 0.25, &data);
  const Point star = analysis::central_solve(g, Vec::Zero(12));
  AdmmOptions opt;
  opt.penalty = 0.5;
  opt.tol = 1e-4;
  opt.max_iter = 2000;
  const AdmmResult r = admm_logreg_baseline(*data, star.x, opt);
  REQUIRE(r.converged);
  CHECK(r.x.cwiseAbs().maxCoeff() <= 0.25 + 1e-8);
}

TEST_CASE("invalid penalty is rejected") {
  std::shared_ptr<LogregData> data;
  make_logreg(20, 8, 2, 1, 0.1, 0.25, &data);
  AdmmOptions opt;
  opt.penalty = 0.0;
  CHECK_THROWS_AS(admm_logreg_baseline(*data, Vec::Zero(8), opt), ModelError);
}
