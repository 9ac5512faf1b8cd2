#include "sbdp/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace sbdp {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  throw ModelError("bad boolean for '" + key + "': " + v);
}

double parse_num(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double d = 0.0;
  try {
    d = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw ModelError("bad number for '" + key + "': " + v);
  }
  if (pos != v.size()) throw ModelError("bad number for '" + key + "': " + v);
  return d;
}

int parse_int(const std::string& key, const std::string& v) {
  const double d = parse_num(key, v);
  const int i = static_cast<int>(d);
  if (double(i) != d) throw ModelError("expected integer for '" + key + "'");
  return i;
}

Vec parse_vec(const std::string& key, const std::string& v) {
  std::vector<double> vals;
  std::stringstream ss(v);
  std::string tok;
  while (std::getline(ss, tok, ',')) vals.push_back(parse_num(key, trim(tok)));
  Vec out(vals.size());
  for (std::size_t i = 0; i < vals.size(); ++i) out[i] = vals[i];
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  Scenario sc;
  bool have_problem = false;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ModelError("line " + std::to_string(lineno) +
                       ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key == "problem") {
      sc.problem = val;
      have_problem = true;
    } else if (key == "a") {
      sc.a = parse_num(key, val);
    } else if (key == "g2") {
      sc.g2 = parse_bool(key, val);
    } else if (key == "m") {
      sc.m = parse_int(key, val);
    } else if (key == "n") {
      sc.n = parse_int(key, val);
    } else if (key == "agents") {
      sc.agents = parse_int(key, val);
    } else if (key == "seed") {
      sc.seed = static_cast<std::uint64_t>(parse_int(key, val));
    } else if (key == "eps_reg") {
      sc.eps_reg = parse_num(key, val);
    } else if (key == "box") {
      sc.box = parse_num(key, val);
    } else if (key == "variant") {
      sc.variant = variant_from_name(val);
    } else if (key == "alpha") {
      sc.alpha = parse_num(key, val);
    } else if (key == "beta") {
      sc.beta = parse_num(key, val);
    } else if (key == "rho") {
      sc.rho = parse_num(key, val);
    } else if (key == "gamma") {
      sc.gamma = parse_num(key, val);
    } else if (key == "eps") {
      sc.eps = parse_num(key, val);
    } else if (key == "max_iter") {
      sc.max_iter = parse_int(key, val);
    } else if (key == "neighbor_affine") {
      sc.neighbor_affine = parse_bool(key, val);
    } else if (key == "parallel") {
      sc.parallel = parse_bool(key, val);
    } else if (key == "x0") {
      sc.x0 = parse_vec(key, val);
    } else if (key == "analysis") {
      sc.analysis = parse_bool(key, val);
    } else if (key == "timing") {
      sc.timing = parse_bool(key, val);
    } else {
      throw ModelError("unknown scenario key '" + key + "'");
    }
  }
  if (!have_problem) throw ModelError("scenario is missing 'problem'");
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ModelError("cannot open scenario file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_scenario(ss.str());
}

ProblemGraph build_problem(const Scenario& sc,
                           std::shared_ptr<LogregData>* data_out) {
  if (sc.problem == "quad2") return make_quad2(sc.a, sc.g2);
  if (sc.problem == "bilinear2") return make_bilinear2();
  if (sc.problem == "nonconvex2") return make_nonconvex2();
  if (sc.problem == "logreg")
    return make_logreg(sc.m, sc.n, sc.agents, sc.seed, sc.eps_reg, sc.box,
                       data_out);
  throw ModelError("unknown problem '" + sc.problem + "'");
}

ScenarioResult run_scenario(const Scenario& sc) {
  ScenarioResult out;
  out.graph = build_problem(sc);
  const ProblemGraph& g = out.graph;

  Point p0 = g.zero_point();
  if (sc.x0) {
    if (sc.x0->size() != g.nx())
      throw ModelError("x0 has wrong length for problem '" + sc.problem + "'");
    p0.x = *sc.x0;
  }

  EngineConfig cfg;
  cfg.variant = sc.variant;
  cfg.alpha = sc.alpha;
  cfg.beta = sc.beta;
  cfg.rho = sc.rho;
  cfg.gamma = sc.gamma;
  cfg.eps = sc.eps;
  cfg.max_iter = sc.max_iter;
  cfg.neighbor_affine = sc.neighbor_affine;
  cfg.parallel = sc.parallel;
  out.run = run_engine(g, p0, cfg);

  Vec p_star;
  Mat P;
  double C = std::numeric_limits<double>::quiet_NaN();
  double V0 = std::numeric_limits<double>::quiet_NaN();
  if (sc.analysis) {
    out.reference = analysis::central_solve(g, p0.x);
    p_star = out.reference->stacked();
    try {
      const bool partial = sc.variant == Variant::PlusPartialSosc;
      out.certificate =
          analysis::make_certificate(g, *out.reference, sc.beta, sc.gamma,
                                     partial, sc.alpha);
      if (out.certificate->step_ok) {
        P = out.certificate->P;
        C = out.certificate->constants.C;
        const Vec d0 = out.run.trace.front().p.stacked() - p_star;
        V0 = d0.dot(P * d0);
      }
    } catch (const std::exception&) {
      out.certificate.reset();
    }
  }

  std::ostringstream csv;
  csv << "iter,err2,errP,bound_Cq,lyapunov_V,s_inf,comm_floats,wall_ms\n";
  for (const auto& rec : out.run.trace) {
    double err2 = std::numeric_limits<double>::quiet_NaN();
    double errP = err2, bound = err2, V = err2;
    if (sc.analysis && p_star.size() == rec.p.stacked().size()) {
      const Vec d = rec.p.stacked() - p_star;
      err2 = d.norm();
      if (P.size() > 0) {
        V = d.dot(P * d);
        errP = std::sqrt(std::max(0.0, V));
        bound = std::pow(C, rec.iter) * V0;
      }
    }
    csv << rec.iter << ',' << fmt(err2) << ',' << fmt(errP) << ','
        << fmt(bound) << ',' << fmt(V) << ',' << fmt(rec.s_inf) << ','
        << rec.floats << ',' << fmt(sc.timing ? rec.wall_ms : 0.0) << '\n';
  }
  out.csv = csv.str();
  return out;
}

}  // namespace sbdp
