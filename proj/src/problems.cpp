#include "sbdp/problems.hpp"

#include <cmath>

#include "sbdp/rng.hpp"

namespace sbdp {
namespace {

double softplus(double t) {
  return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

double sigmoid(double t) {
  return t >= 0.0 ? 1.0 / (1.0 + std::exp(-t))
                  : std::exp(t) / (1.0 + std::exp(t));
}

}  // namespace

ProblemGraph make_quad2(double a, bool second_constraint) {
  ProblemGraph g;
  g.name = second_constraint ? "quad2_two_eq" : "quad2";
  g.agents.resize(2);
  g.nbr = {{1}, {0}};

  // Agent 0: z = [x1, x2], cost 0.5*x1^2, equality x1 + a*x2 = 0.
  auto& a0 = g.agents[0];
  a0.dim = 1;
  a0.n_eq = 1;
  a0.neighbor_affine = true;
  a0.f = [](const Vec& z) { return 0.5 * z[0] * z[0]; };
  a0.grad_f = [](const Vec& z) { return Vec(Vec{{z[0], 0.0}}); };
  a0.hess_f = [](const Vec&) {
    Mat H = Mat::Zero(2, 2);
    H(0, 0) = 1.0;
    return H;
  };
  a0.g = [a](const Vec& z) { return Vec(Vec{{z[0] + a * z[1]}}); };
  a0.jac_g = [a](const Vec&) {
    Mat J(1, 2);
    J << 1.0, a;
    return J;
  };
  a0.hess_g = [](const Vec&, const Vec&) { return Mat(Mat::Zero(2, 2)); };

  // Agent 1: z = [x2, x1], cost 0.5*x2^2, optional equality x1 + x2 = 0.
  auto& a1 = g.agents[1];
  a1.dim = 1;
  a1.n_eq = second_constraint ? 1 : 0;
  a1.neighbor_affine = true;
  a1.f = [](const Vec& z) { return 0.5 * z[0] * z[0]; };
  a1.grad_f = [](const Vec& z) { return Vec(Vec{{z[0], 0.0}}); };
  a1.hess_f = [](const Vec&) {
    Mat H = Mat::Zero(2, 2);
    H(0, 0) = 1.0;
    return H;
  };
  if (second_constraint) {
    a1.g = [](const Vec& z) { return Vec(Vec{{z[0] + z[1]}}); };
    a1.jac_g = [](const Vec&) {
      Mat J(1, 2);
      J << 1.0, 1.0;
      return J;
    };
    a1.hess_g = [](const Vec&, const Vec&) { return Mat(Mat::Zero(2, 2)); };
  }
  g.finalize();
  return g;
}

ProblemGraph make_bilinear2() {
  ProblemGraph g;
  g.name = "bilinear2";
  g.agents.resize(2);
  g.nbr = {{1}, {0}};
  for (int i = 0; i < 2; ++i) {
    auto& ai = g.agents[i];
    ai.dim = 1;
    ai.neighbor_affine = true;
    ai.f = [](const Vec& z) { return 0.5 * z[0] * z[1]; };
    ai.grad_f = [](const Vec& z) { return Vec(Vec{{0.5 * z[1], 0.5 * z[0]}}); };
    ai.hess_f = [](const Vec&) {
      Mat H(2, 2);
      H << 0.0, 0.5, 0.5, 0.0;
      return H;
    };
  }
  auto& a0 = g.agents[0];
  a0.n_eq = 1;
  a0.g = [](const Vec& z) { return Vec(Vec{{z[0] - z[1]}}); };
  a0.jac_g = [](const Vec&) {
    Mat J(1, 2);
    J << 1.0, -1.0;
    return J;
  };
  a0.hess_g = [](const Vec&, const Vec&) { return Mat(Mat::Zero(2, 2)); };
  g.finalize();
  return g;
}

ProblemGraph make_nonconvex2() {
  ProblemGraph g;
  g.name = "nonconvex2";
  g.agents.resize(2);
  g.nbr = {{1}, {0}};

  // Agent 0: z = [x1, x2].
  auto& a0 = g.agents[0];
  a0.dim = 1;
  a0.n_ineq = 1;
  a0.neighbor_affine = true;
  a0.f = [](const Vec& z) { return 2.0 * (z[0] - 1.0) * (z[0] - 1.0); };
  a0.grad_f = [](const Vec& z) { return Vec(Vec{{4.0 * (z[0] - 1.0), 0.0}}); };
  a0.hess_f = [](const Vec&) {
    Mat H = Mat::Zero(2, 2);
    H(0, 0) = 4.0;
    return H;
  };
  a0.h = [](const Vec& z) { return Vec(Vec{{-1.0 - z[0] * z[1]}}); };
  a0.jac_h = [](const Vec& z) {
    Mat J(1, 2);
    J << -z[1], -z[0];
    return J;
  };
  a0.hess_h = [](const Vec&, const Vec& w) {
    Mat H(2, 2);
    H << 0.0, -w[0], -w[0], 0.0;
    return H;
  };

  // Agent 1: z = [x2, x1].
  auto& a1 = g.agents[1];
  a1.dim = 1;
  a1.n_ineq = 1;
  a1.neighbor_affine = true;
  a1.f = [](const Vec& z) { return (z[0] - 2.0) * (z[0] - 2.0); };
  a1.grad_f = [](const Vec& z) { return Vec(Vec{{2.0 * (z[0] - 2.0), 0.0}}); };
  a1.hess_f = [](const Vec&) {
    Mat H = Mat::Zero(2, 2);
    H(0, 0) = 2.0;
    return H;
  };
  a1.h = [](const Vec& z) { return Vec(Vec{{-1.5 + z[1] * z[0]}}); };
  a1.jac_h = [](const Vec& z) {
    Mat J(1, 2);
    J << z[1], z[0];
    return J;
  };
  a1.hess_h = [](const Vec&, const Vec& w) {
    Mat H(2, 2);
    H << 0.0, w[0], w[0], 0.0;
    return H;
  };
  g.finalize();
  return g;
}

ProblemGraph make_logreg(int m, int n, int M, std::uint64_t seed,
                         double eps_reg, double box,
                         std::shared_ptr<LogregData>* data_out) {
  if (M <= 0 || n <= 0 || m <= 0) throw ModelError("sizes must be positive");
  if (n % M != 0)
    throw ModelError("agent count must divide the feature count");
  const int nb = n / M;

  auto data = std::make_shared<LogregData>();
  data->m = m;
  data->n = n;
  data->M = M;
  data->eps_reg = eps_reg;
  data->box = box;
  data->A.resize(m, n);
  {
    CounterRng features(seed, 0);
    for (int k = 0; k < m; ++k)
      for (int j = 0; j < n; ++j) data->A(k, j) = features.normal();
    CounterRng truth(seed, 1);
    data->x_true.resize(n);
    for (int j = 0; j < n; ++j) data->x_true[j] = truth.normal();
    CounterRng noise(seed, 2);
    data->b.resize(m);
    const double sd = std::sqrt(0.1);
    for (int k = 0; k < m; ++k) {
      const double t =
          data->A.row(k).dot(data->x_true) + sd * noise.normal();
      data->b[k] = t >= 0.0 ? 1.0 : -1.0;
    }
  }

  ProblemGraph g;
  g.name = "logreg";
  g.constraints_decoupled = true;
  g.agents.resize(M);
  g.nbr.resize(M);
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j)
      if (j != i) g.nbr[i].push_back(j);

  for (int i = 0; i < M; ++i) {
    auto& ai = g.agents[i];
    ai.dim = nb;
    ai.n_ineq = 2 * nb;
    ai.n_ineq_dec = 2 * nb;
    ai.neighbor_affine = true;

    // z = [x_i; x_0; ...; x_{M-1} without i] -> global feature order.
    std::vector<int> perm(n);
    {
      int pos = 0;
      for (int k = 0; k < nb; ++k) perm[pos++] = i * nb + k;
      for (int j = 0; j < M; ++j) {
        if (j == i) continue;
        for (int k = 0; k < nb; ++k) perm[pos++] = j * nb + k;
      }
    }
    auto to_global = [perm, n](const Vec& z) {
      Vec x(n);
      for (int k = 0; k < n; ++k) x[perm[k]] = z[k];
      return x;
    };

    ai.f = [data, to_global, nb, M, eps_reg](const Vec& z) {
      const Vec x = to_global(z);
      double loss = 0.0;
      for (int k = 0; k < data->m; ++k)
        loss += softplus(-data->b[k] * data->A.row(k).dot(x));
      loss /= data->m;
      return loss / M + 0.5 * eps_reg * z.head(nb).squaredNorm();
    };
    ai.grad_f = [data, to_global, perm, nb, M, eps_reg, n](const Vec& z) {
      const Vec x = to_global(z);
      Vec w(data->m);
      for (int k = 0; k < data->m; ++k)
        w[k] = -data->b[k] * sigmoid(-data->b[k] * data->A.row(k).dot(x));
      Vec gx = (data->A.transpose() * w) / (data->m * M);
      Vec gz(n);
      for (int k = 0; k < n; ++k) gz[k] = gx[perm[k]];
      gz.head(nb) += eps_reg * z.head(nb);
      return gz;
    };
    ai.hess_f = [data, to_global, perm, nb, M, eps_reg, n](const Vec& z) {
      const Vec x = to_global(z);
      Vec d(data->m);
      for (int k = 0; k < data->m; ++k) {
        const double sg = sigmoid(-data->b[k] * data->A.row(k).dot(x));
        d[k] = sg * (1.0 - sg);
      }
      const Mat Hx =
          data->A.transpose() * d.asDiagonal() * data->A / (data->m * M);
      Mat Hz(n, n);
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) Hz(r, c) = Hx(perm[r], perm[c]);
      Hz.topLeftCorner(nb, nb) += eps_reg * Mat::Identity(nb, nb);
      return Hz;
    };
    ai.hess_f_own = [data, to_global, i, nb, M, eps_reg](const Vec& z) {
      const Vec x = to_global(z);
      Vec d(data->m);
      for (int k = 0; k < data->m; ++k) {
        const double sg = sigmoid(-data->b[k] * data->A.row(k).dot(x));
        d[k] = sg * (1.0 - sg);
      }
      const auto Ai = data->A.middleCols(i * nb, nb);
      Mat H = Ai.transpose() * d.asDiagonal() * Ai / (data->m * M);
      H += eps_reg * Mat::Identity(nb, nb);
      return H;
    };

    ai.h = [box, nb](const Vec& z) {
      Vec h(2 * nb);
      h.head(nb) = z.head(nb).array() - box;
      h.tail(nb) = -box - z.head(nb).array();
      return h;
    };
    ai.jac_h = [nb, n](const Vec&) {
      Mat J = Mat::Zero(2 * nb, n);
      J.topLeftCorner(nb, nb) = Mat::Identity(nb, nb);
      J.block(nb, 0, nb, nb) = -Mat::Identity(nb, nb);
      return J;
    };
    ai.hess_h = [n](const Vec&, const Vec&) { return Mat(Mat::Zero(n, n)); };
  }
  g.finalize();
  if (data_out) *data_out = data;
  return g;
}

std::vector<CatalogEntry> catalog() {
  return {
      {"quad2",
       "two quadratic agents, one coupled equality x1 + a*x2 = 0 (parameter "
       "a); optional second equality x1 + x2 = 0 via g2=on"},
      {"bilinear2",
       "two agents with indefinite bilinear cost and equality x1 = x2; "
       "needs the curvature correction to converge"},
      {"nonconvex2",
       "two agents, nonconvex product inequalities; small benchmark with an "
       "active constraint at the solution"},
      {"logreg",
       "feature-split regularized logistic regression with box constraints "
       "on a complete graph (m, n, agents, seed, eps_reg, box)"},
  };
}

}  // namespace sbdp
