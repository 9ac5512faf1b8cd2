#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "sbdp/analysis.hpp"
#include "sbdp/problems.hpp"

using namespace sbdp;

TEST_CASE("catalog lists the built-in problems") {
  const auto cat = catalog();
  REQUIRE(cat.size() == 4);
  CHECK(cat[0].name == "quad2");
  CHECK(cat[1].name == "bilinear2");
  CHECK(cat[2].name == "nonconvex2");
  CHECK(cat[3].name == "logreg");
}

TEST_CASE("coupled quadratic structure and solution") {
  ProblemGraph g = make_quad2(4.0);
  CHECK(g.ng() == 1);
  const Point p = analysis::central_solve(g, Vec(Vec{{1.0, 1.0}}));
  CHECK(p.x.cwiseAbs().maxCoeff() <= 1e-9);  // origin is feasible and optimal

  ProblemGraph g2 = make_quad2(4.0, true);
  CHECK(g2.ng() == 2);
  CHECK(g2.name == "quad2_two_eq");
}

TEST_CASE("derivative audit passes on every catalog problem") {
  {
    ProblemGraph g = make_quad2(4.0, true);
    Point p = g.zero_point();
    p.x << 0.4, -0.7;
    p.lam << 0.3, -0.2;
    CHECK(finite_difference_audit(g, p).ok);
  }
  {
    ProblemGraph g = make_bilinear2();
    Point p = g.zero_point();
    p.x << 0.6, -0.3;
    p.lam << 0.5;
    CHECK(finite_difference_audit(g, p).ok);
  }
  {
    ProblemGraph g = make_nonconvex2();
    Point p = g.zero_point();
    p.x << 1.1, 0.8;
    p.mu << 0.4, 0.3;
    CHECK(finite_difference_audit(g, p).ok);
  }
  {
    ProblemGraph g = make_logreg(30, 8, 2, 5);
    Point p = g.zero_point();
    p.x.setConstant(0.05);
    p.mu.setConstant(0.2);
    CHECK(finite_difference_audit(g, p).ok);
  }
}

TEST_CASE("regression instance generation is deterministic per seed") {
  std::shared_ptr<LogregData> d1, d2, d3;
  make_logreg(50, 20, 4, 11, 0.1, 0.25, &d1);
  make_logreg(50, 20, 4, 11, 0.1, 0.25, &d2);
  make_logreg(50, 20, 4, 12, 0.1, 0.25, &d3);
  CHECK((d1->A - d2->A).cwiseAbs().maxCoeff() == 0.0);
  CHECK((d1->b - d2->b).cwiseAbs().maxCoeff() == 0.0);
  CHECK((d1->x_true - d2->x_true).cwiseAbs().maxCoeff() == 0.0);
  CHECK((d1->A - d3->A).cwiseAbs().maxCoeff() > 0.0);
  for (int k = 0; k < d1->m; ++k)
    CHECK(std::abs(d1->b[k]) == doctest::Approx(1.0));
  // Standard normal features: mean near 0, variance near 1.
  const double mean = d1->A.mean();
  const double var = (d1->A.array() - mean).square().mean();
  CHECK(std::abs(mean) <= 0.1);
  CHECK(var == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("regression instance shape and constraint structure") {
  CHECK_THROWS_AS(make_logreg(10, 7, 2, 1), ModelError);
  ProblemGraph g = make_logreg(20, 12, 3, 1);
  CHECK(g.constraints_decoupled);
  CHECK(g.nx() == 12);
  CHECK(g.nh() == 24);
  for (int i = 0; i < 3; ++i) {
    CHECK(g.agents[i].dim == 4);
    CHECK(g.agents[i].n_ineq == 8);
    CHECK(g.agents[i].n_ineq_dec == 8);
    CHECK(g.nbr[i].size() == 2);  // complete graph
  }
  // Box rows: x <= box stacked over -x <= box.
  Vec x = Vec::Constant(12, 0.3);
  const Vec h = central_h(g, x);
  CHECK(h.head(4).maxCoeff() == doctest::Approx(0.05));
  CHECK(h.segment(4, 4).maxCoeff() == doctest::Approx(-0.55));
}

TEST_CASE("own-block Hessian fast path agrees with the full Hessian corner") {
  ProblemGraph g = make_logreg(25, 8, 2, 9);
  const Vec z = Vec::Constant(8, 0.1);
  const Mat full = g.agents[0].hess_f(z);
  const Mat own = g.agents[0].hess_f_own(z);
  CHECK((full.topLeftCorner(4, 4) - own).cwiseAbs().maxCoeff() <= 1e-12);
}
