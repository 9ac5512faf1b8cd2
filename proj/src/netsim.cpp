#include "sbdp/netsim.hpp"

#include <algorithm>
#include <sstream>

namespace sbdp {

const char* msg_kind_name(MsgKind k) {
  switch (k) {
    case MsgKind::Sensitivity: return "SENSITIVITY";
    case MsgKind::Decision: return "DECISION";
    case MsgKind::Correction: return "CORRECTION";
    case MsgKind::Flag: return "FLAG";
  }
  return "?";
}

CommRecord& CommLedger::at_iter(int iter) {
  for (auto& r : records)
    if (r.iter == iter) return r;
  records.push_back({});
  records.back().iter = iter;
  return records.back();
}

long CommLedger::total_floats() const {
  long t = 0;
  for (const auto& r : records) t += r.floats_total;
  return t;
}

NetSim::NetSim(const ProblemGraph* graph) : graph_(graph) {}

void NetSim::begin_iteration(int iter) { iter_ = iter; }

void NetSim::log_message(const Message& m, long step) const {
  if (!log_) return;
  std::ostringstream os;
  os << iter_ << '\t' << step << '\t' << m.from << '\t' << m.to << '\t'
     << msg_kind_name(m.kind) << '\t' << m.data.size() << '\n';
  *log_ += os.str();
}

std::vector<std::vector<Message>> NetSim::exchange(std::vector<Message> out) {
  CommRecord& rec = ledger_.at_iter(iter_);
  rec.steps += 1;
  std::vector<std::vector<Message>> in(graph_->num_agents());
  for (auto& m : out) {
    if (m.kind == MsgKind::Flag)
      throw ModelError("flags go through exchange_flags");
    if (m.data.size() == 0) throw ModelError("empty message payload");
    const auto& ns = graph_->nbr[m.from];
    if (!std::binary_search(ns.begin(), ns.end(), m.to))
      throw ModelError("message between non-neighbors");
    rec.floats_total += m.data.size();
    switch (m.kind) {
      case MsgKind::Sensitivity: rec.floats_sensitivity += m.data.size(); break;
      case MsgKind::Decision: rec.floats_decision += m.data.size(); break;
      case MsgKind::Correction: rec.floats_correction += m.data.size(); break;
      default: break;
    }
    log_message(m, rec.steps);
    in[m.to].push_back(std::move(m));
  }
  return in;
}

std::vector<std::vector<Message>> NetSim::exchange_flags(
    std::vector<Message> out) {
  CommRecord& rec = ledger_.at_iter(iter_);
  std::vector<std::vector<Message>> in(graph_->num_agents());
  for (auto& m : out) {
    if (m.kind != MsgKind::Flag) throw ModelError("expected flag message");
    const auto& ns = graph_->nbr[m.from];
    if (!std::binary_search(ns.begin(), ns.end(), m.to))
      throw ModelError("message between non-neighbors");
    rec.flag_bits += 1;
    log_message(m, rec.steps);
    in[m.to].push_back(std::move(m));
  }
  return in;
}

Budget expected_budget(const ProblemGraph& g, bool with_correction,
                       bool neighbor_affine) {
  Budget b;
  long coupling = 0;   // sum_i n_i |N_i|
  long extended = 0;   // sum_i (n_i + n_gi + n_hi) |N_i|
  for (int i = 0; i < g.num_agents(); ++i) {
    const long deg = static_cast<long>(g.nbr[i].size());
    coupling += static_cast<long>(g.agents[i].dim) * deg;
    extended += static_cast<long>(g.agents[i].dim + g.agents[i].n_eq +
                                  g.agents[i].n_ineq) *
                deg;
  }
  if (neighbor_affine) {
    b.steps = with_correction ? 2 : 1;
    b.floats = extended + (with_correction ? coupling : 0);
  } else {
    b.steps = with_correction ? 3 : 2;
    b.floats = (with_correction ? 3 : 2) * coupling;
  }
  return b;
}

bool verify_budget(const CommLedger& ledger, const ProblemGraph& g,
                   bool with_correction, bool neighbor_affine,
                   std::string* message) {
  const Budget want = expected_budget(g, with_correction, neighbor_affine);
  for (const auto& r : ledger.records) {
    if (r.iter < 0) continue;  // setup round, not part of the per-iteration budget
    if (r.steps != want.steps || r.floats_total != want.floats) {
      if (message) {
        std::ostringstream os;
        os << "iteration " << r.iter << ": got " << r.floats_total
           << " floats in " << r.steps << " steps, expected " << want.floats
           << " in " << want.steps;
        *message = os.str();
      }
      return false;
    }
  }
  if (message) *message = "budget ok";
  return true;
}

}  // namespace sbdp
