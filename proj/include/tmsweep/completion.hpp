#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "tmsweep/predictor.hpp"
#include "tmsweep/store.hpp"

namespace tmsweep {

enum class Pass { First, Second };
enum class VerdictKind { Unresolved, Confirmed, Contradicted };
enum class Outcome { FullyCorrect, Failed, Incorrect, Pending };

// Step-by-step evidence gathered for one originally-divergent input. budget 0
// means the slot has not been rerun beyond the base sweep.
struct SlotObservation {
  std::uint64_t budget = 0;
  bool halted = false;
  std::uint64_t runtime = 0;
  std::uint64_t space = 0;
  mpz_class output;
  friend bool operator==(const SlotObservation& a, const SlotObservation& b) {
    return a.budget == b.budget && a.halted == b.halted &&
           (!a.halted || (a.runtime == b.runtime && a.space == b.space && a.output == b.output));
  }
};

struct Verdict {
  VerdictKind kind = VerdictKind::Unresolved;
  std::uint64_t budget = 0;
  bool consistent = false;  // Unresolved: the predicted runtime exceeds the budget
};

// One candidate machine with fitted models for its three sequences, the slots
// that were divergent at the base budget, and the verification evidence per
// slot. Slots of a modelled sequence are filled completely or not at all.
struct CompletionRecord {
  MachineIndex machine{0, 1};
  Pass pass = Pass::First;
  std::uint64_t base_budget = kDefaultBudget;
  int inputs = kProfileInputs;
  std::optional<SequenceModel> outputs_model;
  std::optional<SequenceModel> runtimes_model;
  std::optional<SequenceModel> spaces_model;
  std::map<int, SlotObservation> observations;  // keyed by originally-divergent slot

  bool all_sequences_filled() const {
    return outputs_model && runtimes_model && spaces_model;
  }
  bool any_sequence_filled() const {
    return outputs_model || runtimes_model || spaces_model;
  }

  std::optional<mpz_class> predicted_output(int slot) const {
    if (!outputs_model) return std::nullopt;
    return outputs_model->eval(slot);
  }
  std::optional<mpz_class> predicted_runtime(int slot) const {
    if (!runtimes_model) return std::nullopt;
    return runtimes_model->eval(slot);
  }
  std::optional<mpz_class> predicted_space(int slot) const {
    if (!spaces_model) return std::nullopt;
    return spaces_model->eval(slot);
  }

  bool verified() const {
    for (const auto& [slot, obs] : observations)
      if (obs.budget > 0) return true;
    return false;
  }
};

// Machines worth attempting to complete: at least one divergent slot, at
// least one convergent runtime at or above min_runtime, canonical twin
// representatives only.
inline std::vector<MachineIndex> select_candidates(StoreReader& store,
                                                   std::uint64_t min_runtime = 480) {
  std::vector<MachineIndex> out;
  store.for_each([&](const FunctionProfile& p) {
    if (!p.has_divergence()) return;
    bool slow = false;
    for (const auto& r : p.runtimes)
      if (r && *r >= min_runtime) {
        slow = true;
        break;
      }
    if (!slow) return;
    if (!is_canonical(p.machine)) return;
    out.push_back(p.machine);
  });
  return out;
}

// Fits the three sequences independently (whole-history in the first pass,
// tail-windowed in the second) and fills the divergent slots of each sequence
// that obtained a model. A tail model that cannot reach every divergent slot
// of its sequence counts as no model, keeping completion all-or-nothing.
inline CompletionRecord complete_profile(const FunctionProfile& p, const PredictorConfig& cfg,
                                         Pass pass) {
  if (!p.has_divergence())
    throw std::invalid_argument("complete_profile: profile has no divergent slot");
  CompletionRecord rec;
  rec.machine = p.machine;
  rec.pass = pass;
  rec.base_budget = p.budget;
  rec.inputs = p.inputs();
  for (int x = 0; x < p.inputs(); ++x)
    if (p.divergent_at(x)) rec.observations.emplace(x, SlotObservation{});

  const auto fit_one = [&](const KnownPoints& pts) -> std::optional<SequenceModel> {
    if (pts.size() < 2) return std::nullopt;
    auto model = pass == Pass::First ? find_model(pts, cfg) : fit_tail(pts, cfg);
    if (model && model->family() == ModelFamily::TailWindowed) {
      for (const auto& [slot, obs] : rec.observations)
        if (slot < model->window_start()) return std::nullopt;
    }
    return model;
  };
  rec.outputs_model = fit_one(known_points(p.outputs));
  rec.runtimes_model = fit_one(known_points(p.runtimes));
  rec.spaces_model = fit_one(known_points(p.spaces));
  return rec;
}

// Verdicts derive from the observations, so they stay consistent with the
// evidence by construction. Confirmed and Contradicted are final; Unresolved
// slots may still flip at a larger budget.
inline Verdict slot_verdict(const CompletionRecord& rec, int slot) {
  const auto it = rec.observations.find(slot);
  if (it == rec.observations.end())
    throw std::invalid_argument("slot_verdict: not an originally-divergent slot");
  const SlotObservation& obs = it->second;
  if (obs.budget == 0) return Verdict{VerdictKind::Unresolved, 0, false};
  if (!obs.halted) {
    const auto pr = rec.predicted_runtime(slot);
    const bool consistent = pr.has_value() && *pr > obs.budget;
    return Verdict{VerdictKind::Unresolved, obs.budget, consistent};
  }
  bool all_match = true;
  if (const auto po = rec.predicted_output(slot); po && *po != obs.output) all_match = false;
  if (const auto pr = rec.predicted_runtime(slot); pr && *pr != obs.runtime) all_match = false;
  if (const auto ps = rec.predicted_space(slot); ps && *ps != obs.space) all_match = false;
  if (!rec.any_sequence_filled()) all_match = false;  // nothing was predicted at all
  return Verdict{all_match ? VerdictKind::Confirmed : VerdictKind::Contradicted, obs.budget,
                 false};
}

// Reruns originally-divergent inputs at the new budget and updates the
// evidence. Halted observations are final; determinism makes a rerun at a
// larger budget provably identical.
inline void verify(CompletionRecord& rec, std::uint64_t budget) {
  if (budget <= rec.base_budget)
    throw std::invalid_argument("verify: budget must exceed the base budget");
  const MachineSpec spec = decode_machine(rec.machine);
  const detail::CompiledTable ct(spec);
  Tape tape;
  for (auto& [slot, obs] : rec.observations) {
    if (obs.halted || obs.budget >= budget) continue;
    const RunResult r = detail::run_compiled(ct, static_cast<std::uint64_t>(slot), budget, tape);
    obs.budget = budget;
    obs.halted = r.halted;
    if (r.halted) {
      obs.runtime = r.steps;
      obs.space = r.space;
      obs.output = r.output;
    }
  }
}

enum class Projection3 { Outputs, Runtimes, Spaces };

// True when some halted observation disagrees with this sequence's
// prediction, i.e. the model is already disproved by evidence.
inline bool sequence_contradicted(const CompletionRecord& rec, Projection3 which) {
  for (const auto& [slot, obs] : rec.observations) {
    if (!obs.halted) continue;
    switch (which) {
      case Projection3::Outputs:
        if (const auto v = rec.predicted_output(slot); v && *v != obs.output) return true;
        break;
      case Projection3::Runtimes:
        if (const auto v = rec.predicted_runtime(slot); v && *v != obs.runtime) return true;
        break;
      case Projection3::Spaces:
        if (const auto v = rec.predicted_space(slot); v && *v != obs.space) return true;
        break;
    }
  }
  return false;
}

// Combines a second-pass (tail) refit with its first-pass record: a sequence
// keeps its first-pass model while the evidence supports it, switches to the
// tail model where the first pass came up empty or was disproved, and retains
// a disproved first-pass model rather than dropping to no model, so the
// incorrectness stays visible in the outcome.
inline CompletionRecord merge_second_pass(const CompletionRecord& first,
                                          CompletionRecord second) {
  second.observations = first.observations;
  const auto choose = [&](const std::optional<SequenceModel>& f, std::optional<SequenceModel>& s,
                          Projection3 which) {
    if (f && !sequence_contradicted(first, which)) {
      s = *f;
      return;
    }
    if (!s) s = f;
  };
  choose(first.outputs_model, second.outputs_model, Projection3::Outputs);
  choose(first.runtimes_model, second.runtimes_model, Projection3::Runtimes);
  choose(first.spaces_model, second.spaces_model, Projection3::Spaces);
  return second;
}

inline Outcome judge(const CompletionRecord& rec) {
  if (!rec.verified()) throw std::invalid_argument("judge: no verify pass applied");
  if (!rec.all_sequences_filled()) return Outcome::Failed;
  bool all_ok = true;
  for (const auto& [slot, obs] : rec.observations) {
    const Verdict v = slot_verdict(rec, slot);
    if (v.kind == VerdictKind::Contradicted) return Outcome::Incorrect;
    if (!(v.kind == VerdictKind::Confirmed ||
          (v.kind == VerdictKind::Unresolved && v.consistent)))
      all_ok = false;
  }
  return all_ok ? Outcome::FullyCorrect : Outcome::Pending;
}

inline std::string outcome_name(Outcome o) {
  switch (o) {
    case Outcome::FullyCorrect: return "fully-correct";
    case Outcome::Failed: return "failed";
    case Outcome::Incorrect: return "incorrect";
    case Outcome::Pending: return "pending";
  }
  return "?";
}

// One ladder step over many records. Records not yet judged fully correct
// rerun every unresolved slot; fully correct records only rerun slots whose
// predicted runtime has come within reach of the new budget (a prediction
// that was untestable at the previous rung must still be tested, a consistent
// beyond-budget prediction keeps its standing without a blind scan).
inline void verify_at(std::vector<CompletionRecord>& recs, std::uint64_t budget, int workers = 1) {
  const auto due = [&](CompletionRecord& rec) {
    bool settled = rec.verified() && judge(rec) == Outcome::FullyCorrect;
    if (!settled) {
      verify(rec, budget);
      return;
    }
    const MachineSpec spec = decode_machine(rec.machine);
    const detail::CompiledTable ct(spec);
    Tape tape;
    for (auto& [slot, obs] : rec.observations) {
      if (obs.halted || obs.budget >= budget) continue;
      const auto pr = rec.predicted_runtime(slot);
      if (!pr || *pr > budget) continue;
      const RunResult r = detail::run_compiled(ct, static_cast<std::uint64_t>(slot), budget, tape);
      obs.budget = budget;
      obs.halted = r.halted;
      if (r.halted) {
        obs.runtime = r.steps;
        obs.space = r.space;
        obs.output = r.output;
      }
    }
  };
  if (workers <= 1) {
    for (auto& rec : recs) due(rec);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (int i = 0; i < workers; ++i)
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t j = next.fetch_add(1);
        if (j >= recs.size()) return;
        due(recs[j]);
      }
    });
  for (auto& t : pool) t.join();
}

// --- completion log ----------------------------------------------------------
//
// One line per record state, append-only across passes and budgets; the last
// line per machine is its current state.
//   rec m=<index> s=<states> pass=<1|2> budget=<b> inputs=<n>
//     out=(<model>|none) run=(<model>|none) spc=(<model>|none)
//     obs <slot>:<obs> ... outcome=<name>
// with <obs> one of `?`, `D@<budget>`, `H@<budget>:<runtime>:<space>:<output>`.
// Verdicts and the outcome re-derive from models plus evidence on load; the
// trailing outcome field is for the audit trail.

inline std::string format_record_line(const CompletionRecord& rec) {
  std::string s = "rec m=" + std::to_string(rec.machine.value) +
                  " s=" + std::to_string(rec.machine.states) +
                  " pass=" + std::to_string(rec.pass == Pass::First ? 1 : 2) +
                  " budget=" + std::to_string(rec.base_budget) +
                  " inputs=" + std::to_string(rec.inputs);
  const auto model_text = [](const std::optional<SequenceModel>& m) {
    return m ? "(" + m->to_text() + ")" : std::string("none");
  };
  s += " out=" + model_text(rec.outputs_model);
  s += " run=" + model_text(rec.runtimes_model);
  s += " spc=" + model_text(rec.spaces_model);
  s += " obs";
  for (const auto& [slot, obs] : rec.observations) {
    s += ' ' + std::to_string(slot) + ':';
    if (obs.budget == 0)
      s += '?';
    else if (!obs.halted)
      s += "D@" + std::to_string(obs.budget);
    else
      s += "H@" + std::to_string(obs.budget) + ':' + std::to_string(obs.runtime) + ':' +
           std::to_string(obs.space) + ':' + obs.output.get_str();
  }
  s += " outcome=" + (rec.verified() ? outcome_name(judge(rec)) : std::string("unverified"));
  return s;
}

inline CompletionRecord parse_record_line(std::string_view line) {
  const auto fail = [&](const std::string& why) -> std::runtime_error {
    return std::runtime_error("completion log: " + why);
  };
  if (!line.starts_with("rec m=")) throw fail("missing record marker");
  CompletionRecord rec;
  std::string_view s = line.substr(6);
  const auto take_u64 = [&](std::string_view key) -> std::uint64_t {
    std::uint64_t v = 0;
    if (!key.empty()) {
      if (!s.starts_with(key)) throw fail("expected " + std::string(key));
      s.remove_prefix(key.size());
    }
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc()) throw fail("bad number");
    s.remove_prefix(static_cast<std::size_t>(p - s.data()));
    return v;
  };
  rec.machine.value = take_u64("");
  rec.machine.states = static_cast<int>(take_u64(" s="));
  const std::uint64_t pass = take_u64(" pass=");
  if (pass != 1 && pass != 2) throw fail("bad pass");
  rec.pass = pass == 1 ? Pass::First : Pass::Second;
  rec.base_budget = take_u64(" budget=");
  rec.inputs = static_cast<int>(take_u64(" inputs="));
  const auto take_model = [&](std::string_view key) -> std::optional<SequenceModel> {
    if (!s.starts_with(key)) throw fail("expected " + std::string(key));
    s.remove_prefix(key.size());
    if (s.starts_with("none")) {
      s.remove_prefix(4);
      return std::nullopt;
    }
    if (!s.starts_with("(")) throw fail("expected model");
    int depth = 0;
    std::size_t i = 0;
    for (; i < s.size(); ++i) {
      if (s[i] == '(') ++depth;
      if (s[i] == ')' && --depth == 0) break;
    }
    if (depth != 0) throw fail("unbalanced model");
    auto m = SequenceModel::parse(s.substr(1, i - 1));
    if (!m) throw fail("unparsable model");
    s.remove_prefix(i + 1);
    return m;
  };
  rec.outputs_model = take_model(" out=");
  rec.runtimes_model = take_model(" run=");
  rec.spaces_model = take_model(" spc=");
  if (!s.starts_with(" obs")) throw fail("expected observations");
  s.remove_prefix(4);
  while (!s.empty()) {
    if (!s.starts_with(" ")) throw fail("expected observation separator");
    s.remove_prefix(1);
    if (s.starts_with("outcome=")) break;  // derived trailer, re-checked by judge()
    const int slot = static_cast<int>(take_u64(""));
    if (!s.starts_with(":")) throw fail("expected slot colon");
    s.remove_prefix(1);
    SlotObservation obs;
    if (s.starts_with("?")) {
      s.remove_prefix(1);
    } else if (s.starts_with("D@")) {
      s.remove_prefix(2);
      obs.budget = take_u64("");
    } else if (s.starts_with("H@")) {
      s.remove_prefix(2);
      obs.budget = take_u64("");
      obs.halted = true;
      obs.runtime = take_u64(":");
      obs.space = take_u64(":");
      if (!s.starts_with(":")) throw fail("expected output");
      s.remove_prefix(1);
      std::size_t end = s.find(' ');
      if (end == std::string_view::npos) end = s.size();
      if (end == 0 || !detail::is_decimal(s.substr(0, end))) throw fail("bad output value");
      obs.output = mpz_class(std::string(s.substr(0, end)), 10);
      s.remove_prefix(end);
    } else {
      throw fail("bad observation");
    }
    rec.observations[slot] = std::move(obs);
  }
  if (rec.observations.empty()) throw fail("record has no divergent slots");
  return rec;
}

inline void append_records(const std::filesystem::path& path,
                           const std::vector<CompletionRecord>& recs) {
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("completion log: cannot open " + path.string());
  for (const auto& r : recs) out << format_record_line(r) << '\n';
  out.flush();
  if (!out) throw std::runtime_error("completion log: write failure on " + path.string());
}

inline std::vector<CompletionRecord> read_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("completion log: cannot open " + path.string());
  std::vector<CompletionRecord> out;
  std::string line;
  std::uint64_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      out.push_back(parse_record_line(line));
    } catch (const std::exception& e) {
      throw std::runtime_error(path.string() + ": line " + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

// Last state per machine, in machine order.
inline std::vector<CompletionRecord> latest_records(std::vector<CompletionRecord> all) {
  std::map<std::uint64_t, CompletionRecord> latest;
  for (auto& r : all) latest.insert_or_assign(r.machine.value, std::move(r));
  std::vector<CompletionRecord> out;
  out.reserve(latest.size());
  for (auto& [idx, r] : latest) out.push_back(std::move(r));
  return out;
}

}  // namespace tmsweep
