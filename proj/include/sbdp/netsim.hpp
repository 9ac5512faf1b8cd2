#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sbdp/model.hpp"

namespace sbdp {

enum class MsgKind { Sensitivity, Decision, Correction, Flag };

const char* msg_kind_name(MsgKind k);

/// One directed message between graph neighbors.
struct Message {
  int from = 0;
  int to = 0;
  MsgKind kind = MsgKind::Decision;
  Vec data;         ///< float payload (empty for flags)
  bool flag = false;
};

/// Per-iteration float/step accounting of the simulated network.
struct CommRecord {
  int iter = 0;
  long steps = 0;             ///< synchronized float exchange rounds
  long floats_total = 0;
  long floats_sensitivity = 0;
  long floats_decision = 0;
  long floats_correction = 0;
  long flag_bits = 0;
};

class CommLedger {
 public:
  std::vector<CommRecord> records;
  CommRecord& at_iter(int iter);
  long total_floats() const;
};

/// Round-based synchronous message simulator over the coupling graph.
/// Messages are only deliverable between graph neighbors; every exchange()
/// call is one communication step. Optionally mirrors the traffic into a
/// TSV log (iter, step, from, to, kind, float_count).
class NetSim {
 public:
  explicit NetSim(const ProblemGraph* graph);

  void begin_iteration(int iter);
  int iteration() const { return iter_; }

  /// Delivers one synchronized round of float messages; returns per-agent
  /// inboxes. Throws ModelError for messages between non-neighbors or with
  /// empty payloads.
  std::vector<std::vector<Message>> exchange(std::vector<Message> out);

  /// Delivers one round of 1-bit flags (counted separately from float
  /// steps). Returns per-agent inboxes.
  std::vector<std::vector<Message>> exchange_flags(std::vector<Message> out);

  const CommLedger& ledger() const { return ledger_; }
  CommLedger& ledger() { return ledger_; }

  void set_log(std::string* sink) { log_ = sink; }

 private:
  void log_message(const Message& m, long step) const;
  const ProblemGraph* graph_;
  CommLedger ledger_;
  int iter_ = -1;
  std::string* log_ = nullptr;
};

/// Closed-form expected float/step counts per iteration for the algorithm
/// variants (see verify_budget).
struct Budget {
  long steps = 0;
  long floats = 0;
};

/// Expected per-iteration budget:
///  - two-step (sensitivity + decision) exchange: 2 * sum_i n_i |N_i| floats,
///  - with correction round: + sum_i n_i |N_i| floats, 3 steps,
///  - neighbor-affine single round: sum_i (n_i + n_gi + n_hi) |N_i| floats.
Budget expected_budget(const ProblemGraph& g, bool with_correction,
                       bool neighbor_affine);

/// Checks every full iteration recorded in the ledger against the expected
/// budget; returns false (with a message) on the first mismatch.
bool verify_budget(const CommLedger& ledger, const ProblemGraph& g,
                   bool with_correction, bool neighbor_affine,
                   std::string* message = nullptr);

}  // namespace sbdp
