#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "sbdp/admm.hpp"
#include "sbdp/scenario.hpp"

namespace {

constexpr int kExitConverged = 0;
constexpr int kExitMaxIter = 2;
constexpr int kExitSolverError = 3;

struct Overrides {
  std::string variant;
  double alpha = -1, beta = -1, rho = -1, gamma = -1, eps = -1;
  int max_iter = -1;
  long seed = -1;
  bool timing = false;
  bool no_analysis = false;
};

void apply(const Overrides& o, sbdp::Scenario& sc) {
  if (!o.variant.empty()) sc.variant = sbdp::variant_from_name(o.variant);
  if (o.alpha >= 0) sc.alpha = o.alpha;
  if (o.beta >= 0) sc.beta = o.beta;
  if (o.rho >= 0) sc.rho = o.rho;
  if (o.gamma >= 0) sc.gamma = o.gamma;
  if (o.eps >= 0) sc.eps = o.eps;
  if (o.max_iter >= 0) sc.max_iter = o.max_iter;
  if (o.seed >= 0) sc.seed = static_cast<std::uint64_t>(o.seed);
  if (o.timing) sc.timing = true;
  if (o.no_analysis) sc.analysis = false;
}

void add_override_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--variant", o.variant,
                  "override the update variant (baseline, plus, "
                  "plus_identity, plus_sosc, plus_partial_sosc)");
  cmd->add_option("--alpha", o.alpha, "override the step size");
  cmd->add_option("--beta", o.beta, "override the dual step size");
  cmd->add_option("--rho", o.rho, "override the proximal weight");
  cmd->add_option("--gamma", o.gamma, "override the correction weight");
  cmd->add_option("--eps", o.eps, "override the stopping threshold");
  cmd->add_option("--max-iter", o.max_iter, "override the iteration cap");
  cmd->add_option("--seed", o.seed, "override the data seed");
  cmd->add_flag("--timing", o.timing,
                "record wall-clock times in the trace (not reproducible "
                "bit-for-bit across machines)");
  cmd->add_flag("--no-analysis", o.no_analysis,
                "skip the centralized reference solve and certificate");
}

int cmd_run(const std::string& path, const Overrides& o,
            const std::string& out_csv) {
  sbdp::Scenario sc = sbdp::load_scenario(path);
  apply(o, sc);
  const sbdp::ScenarioResult res = sbdp::run_scenario(sc);

  std::cout << "problem    " << res.graph.name << " (" << res.graph.nx()
            << " primal, " << res.graph.np() << " total variables)\n"
            << "variant    " << sbdp::variant_name(sc.variant) << "\n"
            << "status     "
            << (res.run.status == sbdp::RunStatus::Converged  ? "converged"
                : res.run.status == sbdp::RunStatus::Failed   ? "failed"
                                                              : "max-iterations")
            << " after " << res.run.iterations << " iterations\n";
  if (!res.run.message.empty())
    std::cout << "message    " << res.run.message << "\n";
  std::cout << "comm       " << res.run.ledger.total_floats()
            << " floats total\n";
  if (res.reference) {
    const sbdp::Vec d =
        res.run.final_point.stacked() - res.reference->stacked();
    std::cout << "error      |p - p*|_2 = " << d.norm() << "\n";
  }
  if (res.certificate)
    std::cout << sbdp::analysis::certificate_text(*res.certificate);

  if (!out_csv.empty()) {
    std::ofstream f(out_csv, std::ios::binary);
    if (!f) {
      std::cerr << "cannot write " << out_csv << "\n";
      return kExitSolverError;
    }
    f << res.csv;
    std::cout << "trace      " << out_csv << " (" << res.run.trace.size()
              << " rows)\n";
  }
  switch (res.run.status) {
    case sbdp::RunStatus::Converged: return kExitConverged;
    case sbdp::RunStatus::MaxIterations: return kExitMaxIter;
    default: return kExitSolverError;
  }
}

int cmd_catalog() {
  for (const auto& e : sbdp::catalog())
    std::cout << e.name << "\n    " << e.description << "\n";
  return 0;
}

int cmd_analyze(const std::string& path, const Overrides& o) {
  sbdp::Scenario sc = sbdp::load_scenario(path);
  apply(o, sc);
  const sbdp::ProblemGraph g = sbdp::build_problem(sc);
  sbdp::Point p0 = g.zero_point();
  if (sc.x0) p0.x = *sc.x0;
  const sbdp::Point star = sbdp::analysis::central_solve(g, p0.x);
  std::cout << "problem    " << g.name << "\n"
            << "reference  x* = [" << star.x.transpose() << "]\n";
  const auto cert = sbdp::analysis::make_certificate(
      g, star, sc.beta, sc.gamma,
      sc.variant == sbdp::Variant::PlusPartialSosc);
  std::cout << sbdp::analysis::certificate_text(cert);
  const auto sm = sbdp::analysis::assemble_M_N_D(g, star, cert.rho);
  const auto gdd = sbdp::analysis::gdd_metric(sm.M, sm.N);
  std::cout << "plain decomposition: |I - M^-1 N|_2 = " << gdd.norm
            << ", spectral radius = " << gdd.spectral_radius
            << (gdd.contractive ? " (contractive)" : " (NOT contractive)")
            << "\n";
  try {
    std::cout << "min gamma  " << sbdp::analysis::min_gamma(g, star) << "\n";
  } catch (const std::exception& e) {
    std::cout << "min gamma  unavailable (" << e.what() << ")\n";
  }
  return 0;
}

int cmd_audit(const std::string& path, const Overrides& o, double tol) {
  sbdp::Scenario sc = sbdp::load_scenario(path);
  apply(o, sc);
  const sbdp::ProblemGraph g = sbdp::build_problem(sc);
  sbdp::Point p = g.zero_point();
  if (sc.x0)
    p.x = *sc.x0;
  else
    for (Eigen::Index i = 0; i < p.x.size(); ++i)
      p.x[i] = 0.1 + 0.01 * double(i % 7);
  p.lam.setConstant(0.5);
  p.mu.setConstant(0.5);
  const auto rep = sbdp::finite_difference_audit(g, p, tol);
  std::cout << rep.summary;
  return rep.ok ? 0 : kExitSolverError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"distributed solver for graph-structured constrained programs"};
  app.require_subcommand(1);

  Overrides o;
  std::string path, out_csv;
  double audit_tol = 1e-5;

  auto* run = app.add_subcommand("run", "run a scenario file");
  run->add_option("scenario", path, "scenario file")->required();
  run->add_option("--out", out_csv, "write the per-iteration trace CSV here");
  add_override_flags(run, o);

  auto* cat = app.add_subcommand("catalog", "list built-in problems");

  auto* ana = app.add_subcommand(
      "analyze", "tune parameters and print the certificate for a scenario");
  ana->add_option("scenario", path, "scenario file")->required();
  add_override_flags(ana, o);

  auto* aud = app.add_subcommand(
      "audit", "check analytic derivatives against finite differences");
  aud->add_option("scenario", path, "scenario file")->required();
  aud->add_option("--tol", audit_tol, "mismatch tolerance");
  add_override_flags(aud, o);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(path, o, out_csv);
    if (*cat) return cmd_catalog();
    if (*ana) return cmd_analyze(path, o);
    if (*aud) return cmd_audit(path, o, audit_tol);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolverError;
  }
  return 0;
}
