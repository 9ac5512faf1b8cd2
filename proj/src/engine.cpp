#include "sbdp/engine.hpp"

#include <chrono>
#include <cmath>

#ifdef SBDP_HAVE_OPENMP
#include <omp.h>
#endif

namespace sbdp {
namespace {

// Everything one agent knows locally: its own primal-dual block plus caches
// filled exclusively from received messages.
struct AgentState {
  Vec x, lam, mu;
  Vec xN;                    // stacked neighbor decisions (ascending id)
  std::vector<Vec> nbr_lam;  // neighbor duals (neighbor-affine mode only)
  std::vector<Vec> nbr_mu;
  Vec c;                     // accumulated sensitivity term
  Vec corr;                  // accumulated correction sum
  LocalSolution y;
  bool has_warm = false;
};

int nbr_slot(const ProblemGraph& g, int i, int j) {
  const auto& ns = g.nbr[i];
  for (std::size_t k = 0; k < ns.size(); ++k)
    if (ns[k] == j) return static_cast<int>(k);
  throw ModelError("not a neighbor");
}

int nbr_x_offset(const ProblemGraph& g, int i, int j) {
  int off = 0;
  for (int n : g.nbr[i]) {
    if (n == j) return off;
    off += g.agents[n].dim;
  }
  throw ModelError("not a neighbor");
}

Vec frozen_z(const ProblemGraph& g, int i, const AgentState& st) {
  Vec z(g.agents[i].dim + st.xN.size());
  z << st.x, st.xN;
  return z;
}

// Gradient of agent `owner`'s Lagrangian with respect to block `wrt`,
// evaluated from the data the calling agent holds: owner's primal-dual
// block plus the stacked vector z_owner.
Vec owner_gradient(const ProblemGraph& g, int owner, int wrt, const Vec& z,
                   const Vec& lam, const Vec& mu) {
  const AgentProblem& a = g.agents[owner];
  Vec grad = a.grad_f(z);
  if (a.n_eq > 0) grad += a.jac_g(z).transpose() * lam;
  if (a.n_ineq > 0) grad += a.jac_h(z).transpose() * mu;
  const int off = g.z_block_of(owner, wrt);
  return grad.segment(off, g.agents[wrt].dim);
}

}  // namespace

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::Baseline: return "baseline";
    case Variant::Plus: return "plus";
    case Variant::PlusIdentity: return "plus_identity";
    case Variant::PlusSosc: return "plus_sosc";
    case Variant::PlusPartialSosc: return "plus_partial_sosc";
  }
  return "?";
}

Variant variant_from_name(const std::string& s) {
  if (s == "baseline") return Variant::Baseline;
  if (s == "plus") return Variant::Plus;
  if (s == "plus_identity") return Variant::PlusIdentity;
  if (s == "plus_sosc") return Variant::PlusSosc;
  if (s == "plus_partial_sosc") return Variant::PlusPartialSosc;
  throw ModelError("unknown variant: " + s);
}

RunResult run_engine(const ProblemGraph& g, const Point& p0,
                     const EngineConfig& cfg) {
  const int M = g.num_agents();
  if (cfg.alpha <= 0.0 || cfg.alpha > 1.0)
    throw ModelError("step size alpha must be in (0, 1]");
  if (cfg.beta <= 0.0) throw ModelError("dual step size beta must be positive");
  if (cfg.rho < 0.0 || cfg.gamma < 0.0)
    throw ModelError("penalties must be nonnegative");
  if (cfg.eps <= 0.0) throw ModelError("stopping tolerance must be positive");
  if (cfg.variant == Variant::PlusIdentity && !g.constraints_decoupled)
    throw ModelError(
        "identity mixing requires a problem with decoupled constraints");
  if (p0.x.size() != g.nx() || p0.lam.size() != g.ng() ||
      p0.mu.size() != g.nh())
    throw ModelError("initial point has wrong dimensions");
  if (cfg.neighbor_affine) {
    for (int i = 0; i < M; ++i) {
      if (!g.agents[i].neighbor_affine)
        throw ModelError("problem is not in neighbor-affine form");
      // Agent i must be able to reconstruct z_j for each neighbor j.
      for (int j : g.nbr[i])
        for (int k : g.nbr[j])
          if (k != i &&
              !std::binary_search(g.nbr[i].begin(), g.nbr[i].end(), k))
            throw ModelError(
                "neighbor-affine mode needs locally reconstructible "
                "neighborhoods");
    }
  }
  const bool with_correction =
      cfg.variant == Variant::PlusSosc && !cfg.neighbor_affine;

  NetSim net(&g);
  net.set_log(cfg.netlog);

  std::vector<AgentState> st(M);
  for (int i = 0; i < M; ++i) {
    st[i].x = g.x_of(i, p0);
    st[i].lam = g.lam_of(i, p0);
    st[i].mu = g.mu_of(i, p0);
    int nn = 0;
    for (int j : g.nbr[i]) nn += g.agents[j].dim;
    st[i].xN = Vec::Zero(nn);
    st[i].nbr_lam.resize(g.nbr[i].size());
    st[i].nbr_mu.resize(g.nbr[i].size());
    st[i].c = Vec::Zero(g.agents[i].dim);
    st[i].corr = Vec::Zero(g.agents[i].dim);
  }

  auto decision_payload = [&](int i) {
    if (!cfg.neighbor_affine) return st[i].x;
    Vec d(g.agents[i].dim + g.agents[i].n_eq + g.agents[i].n_ineq);
    d << st[i].x, st[i].lam, st[i].mu;
    return d;
  };
  auto absorb_decision = [&](int i, const Message& m) {
    const int j = m.from;
    const int nd = g.agents[j].dim;
    st[i].xN.segment(nbr_x_offset(g, i, j), nd) = m.data.head(nd);
    if (cfg.neighbor_affine) {
      const int slot = nbr_slot(g, i, j);
      st[i].nbr_lam[slot] = m.data.segment(nd, g.agents[j].n_eq);
      st[i].nbr_mu[slot] = m.data.tail(g.agents[j].n_ineq);
    }
  };

  // Setup round (before iteration 0): share the initial decisions so every
  // agent can assemble its frozen neighbor data.
  net.begin_iteration(-1);
  {
    std::vector<Message> out;
    for (int i = 0; i < M; ++i)
      for (int j : g.nbr[i])
        out.push_back({i, j, MsgKind::Decision, decision_payload(i), false});
    auto in = net.exchange(std::move(out));
    for (int i = 0; i < M; ++i)
      for (const auto& m : in[i]) absorb_decision(i, m);
  }

  auto snapshot = [&](int iter) {
    IterRecord rec;
    rec.iter = iter;
    rec.p = g.zero_point();
    for (int i = 0; i < M; ++i) {
      rec.p.x.segment(g.x_offset(i), g.agents[i].dim) = st[i].x;
      rec.p.lam.segment(g.g_offset(i), g.agents[i].n_eq) = st[i].lam;
      rec.p.mu.segment(g.h_offset(i), g.agents[i].n_ineq) = st[i].mu;
    }
    return rec;
  };

  RunResult res;
  res.trace.push_back(snapshot(0));

  std::string fail_msg;
  bool failed = false;
  for (int q = 0; q < cfg.max_iter; ++q) {
    const auto t0 = std::chrono::steady_clock::now();
    net.begin_iteration(q);

    // --- Step 1: sensitivity terms ---------------------------------------
    if (cfg.neighbor_affine) {
      // Each agent evaluates its neighbors' Lagrangian gradients itself
      // from the communicated neighbor decisions and duals.
      for (int i = 0; i < M; ++i) {
        st[i].c.setZero();
        for (std::size_t k = 0; k < g.nbr[i].size(); ++k) {
          const int j = g.nbr[i][k];
          // Assemble z_j from agent i's local caches.
          Vec zj(g.z_index(j).size());
          zj.head(g.agents[j].dim) =
              st[i].xN.segment(nbr_x_offset(g, i, j), g.agents[j].dim);
          int off = g.agents[j].dim;
          for (int l : g.nbr[j]) {
            const int nd = g.agents[l].dim;
            if (l == i)
              zj.segment(off, nd) = st[i].x;
            else
              zj.segment(off, nd) = st[i].xN.segment(nbr_x_offset(g, i, l), nd);
            off += nd;
          }
          st[i].c += owner_gradient(g, j, i, zj, st[i].nbr_lam[k],
                                    st[i].nbr_mu[k]);
        }
      }
    } else {
      std::vector<std::vector<Message>> msgs(M);
#ifdef SBDP_HAVE_OPENMP
#pragma omp parallel for if (cfg.parallel) schedule(static)
#endif
      for (int i = 0; i < M; ++i) {
        const Vec z = frozen_z(g, i, st[i]);
        for (int j : g.nbr[i]) {
          Vec grad = owner_gradient(g, i, j, z, st[i].lam, st[i].mu);
          msgs[i].push_back({i, j, MsgKind::Sensitivity, std::move(grad),
                             false});
        }
      }
      std::vector<Message> out;
      for (auto& v : msgs)
        for (auto& m : v) out.push_back(std::move(m));
      auto in = net.exchange(std::move(out));
      for (int i = 0; i < M; ++i) {
        st[i].c.setZero();
        for (const auto& m : in[i]) st[i].c += m.data;
      }
    }

    // --- Step 2: decoupled subproblem solves ------------------------------
#ifdef SBDP_HAVE_OPENMP
#pragma omp parallel for if (cfg.parallel) schedule(dynamic)
#endif
    for (int i = 0; i < M; ++i) {
      if (failed) continue;
      try {
        const LocalNlp nlp =
            make_local_nlp(g, i, frozen_z(g, i, st[i]), st[i].c, cfg.rho);
        st[i].y = solve_local(nlp, st[i].lam, st[i].mu, cfg.local_tol,
                              cfg.tau);
        st[i].has_warm = true;
      } catch (const std::exception& e) {
#ifdef SBDP_HAVE_OPENMP
#pragma omp critical
#endif
        {
          failed = true;
          fail_msg = e.what();
        }
      }
    }
    if (failed) break;
    if (cfg.record_locals) {
      auto& locs = res.trace.back().locals;
      locs.clear();
      for (int i = 0; i < M; ++i) locs.push_back(st[i].y);
    }

    // --- Step 3: correction round (full curvature correction only) --------
    const bool want_correction =
        cfg.variant == Variant::PlusSosc ||
        cfg.variant == Variant::PlusPartialSosc;
    if (want_correction) {
      for (int i = 0; i < M; ++i) {
        const LocalNlp nlp =
            make_local_nlp(g, i, frozen_z(g, i, st[i]), st[i].c, cfg.rho);
        const bool dec_only = cfg.variant == Variant::PlusPartialSosc;
        st[i].corr = correction_matrix_S(nlp, st[i].y, i, dec_only) * st[i].y.s;
      }
      if (cfg.variant == Variant::PlusSosc) {
        std::vector<Message> out;
        for (int j = 0; j < M; ++j) {
          const LocalNlp nlp =
              make_local_nlp(g, j, frozen_z(g, j, st[j]), st[j].c, cfg.rho);
          for (int i : g.nbr[j]) {
            Vec v = correction_matrix_S(nlp, st[j].y, i, false) * st[j].y.s;
            out.push_back({j, i, MsgKind::Correction, std::move(v), false});
          }
        }
        auto in = net.exchange(std::move(out));
        for (int i = 0; i < M; ++i)
          for (const auto& m : in[i]) st[i].corr += m.data;
      }
    }

    // --- Step 4: primal-dual update ---------------------------------------
    double s_inf = 0.0;
#ifdef SBDP_HAVE_OPENMP
#pragma omp parallel for if (cfg.parallel) schedule(static)
#endif
    for (int i = 0; i < M; ++i) {
      const LocalSolution& y = st[i].y;
      if (cfg.variant == Variant::Baseline ||
          cfg.variant == Variant::PlusIdentity) {
        st[i].x += cfg.alpha * y.s;
        st[i].lam += cfg.alpha * (y.nu - st[i].lam);
        st[i].mu += cfg.alpha * (y.kappa - st[i].mu);
      } else {
        const LocalNlp nlp =
            make_local_nlp(g, i, frozen_z(g, i, st[i]), st[i].c, cfg.rho);
        const Mat P = mixing_matrix(nlp, y, cfg.beta);
        Vec diff(P.rows());
        diff << y.s, y.nu - st[i].lam, y.kappa - st[i].mu;
        Vec upd = P * diff;
        if (want_correction) upd.head(g.agents[i].dim) += cfg.gamma * st[i].corr;
        st[i].x += cfg.alpha * upd.head(g.agents[i].dim);
        st[i].lam += cfg.alpha * upd.segment(g.agents[i].dim, g.agents[i].n_eq);
        st[i].mu += cfg.alpha * upd.tail(g.agents[i].n_ineq);
      }
    }
    for (int i = 0; i < M; ++i)
      s_inf = std::max(s_inf, st[i].y.s.size()
                                  ? st[i].y.s.cwiseAbs().maxCoeff()
                                  : 0.0);

    // --- Step 5: decision exchange ----------------------------------------
    {
      std::vector<Message> out;
      for (int i = 0; i < M; ++i)
        for (int j : g.nbr[i])
          out.push_back({i, j, MsgKind::Decision, decision_payload(i), false});
      auto in = net.exchange(std::move(out));
      for (int i = 0; i < M; ++i)
        for (const auto& m : in[i]) absorb_decision(i, m);
    }

    // --- Step 6: stopping flags -------------------------------------------
    bool all_small = true;
    {
      std::vector<Message> out;
      for (int i = 0; i < M; ++i) {
        const bool small =
            (st[i].y.s.size() ? st[i].y.s.cwiseAbs().maxCoeff() : 0.0) <=
            cfg.eps;
        all_small = all_small && small;
        for (int j : g.nbr[i])
          out.push_back({i, j, MsgKind::Flag, Vec(0), small});
      }
      net.exchange_flags(std::move(out));
    }

    const auto t1 = std::chrono::steady_clock::now();
    auto& prev = res.trace.back();
    prev.s_inf = s_inf;
    prev.floats = net.ledger().at_iter(q).floats_total;
    prev.wall_ms =
        std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(
            t1 - t0)
            .count();
    res.trace.push_back(snapshot(q + 1));
    res.iterations = q + 1;

    if (all_small) {
      res.status = RunStatus::Converged;
      res.message = "step norm below tolerance";
      break;
    }
    if (res.trace.back().p.x.cwiseAbs().maxCoeff() > 1e12) {
      res.status = RunStatus::Failed;
      res.message = "iterates diverged";
      break;
    }
  }
  if (failed) {
    res.status = RunStatus::Failed;
    res.message = "local solve failed: " + fail_msg;
  } else if (res.status != RunStatus::Converged &&
             res.status != RunStatus::Failed) {
    res.status = res.iterations >= cfg.max_iter ? RunStatus::MaxIterations
                                                : res.status;
    if (res.message.empty()) res.message = "maximum iterations reached";
  }
  res.final_point = res.trace.back().p;
  res.ledger = net.ledger();
  return res;
}

}  // namespace sbdp
