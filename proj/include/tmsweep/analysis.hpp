#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tmsweep/completion.hpp"
#include "tmsweep/store.hpp"

namespace tmsweep {

enum class ClassLabel {
  AllConvergent,
  TailDivergent,
  AlternatingMixed,
  PeriodicAlternating,
  HasNonGenuine,
  PresumedGenuine,
  Indeterminate
};

using ClassLabelSet = std::set<ClassLabel>;

inline std::string class_label_name(ClassLabel l) {
  switch (l) {
    case ClassLabel::AllConvergent: return "all-convergent";
    case ClassLabel::TailDivergent: return "tail-divergent";
    case ClassLabel::AlternatingMixed: return "alternating-mixed";
    case ClassLabel::PeriodicAlternating: return "periodic-alternating";
    case ClassLabel::HasNonGenuine: return "has-non-genuine";
    case ClassLabel::PresumedGenuine: return "presumed-genuine";
    case ClassLabel::Indeterminate: return "indeterminate";
  }
  return "?";
}

// Later-budget evidence for the divergent slots of one profile.
struct ExtendedDivergenceInfo {
  bool any_halted_later = false;      // some divergent slot halted at a larger budget
  bool any_still_divergent = false;   // some slot survived its largest applied budget
};

inline ExtendedDivergenceInfo extended_info(const CompletionRecord& rec) {
  ExtendedDivergenceInfo info;
  for (const auto& [slot, obs] : rec.observations) {
    if (obs.budget == 0) continue;
    if (obs.halted)
      info.any_halted_later = true;
    else
      info.any_still_divergent = true;
  }
  return info;
}

// Structural labels come from the divergence pattern alone; the divergence
// labels refine with verification evidence. Labels are not mutually
// exclusive, but every profile receives at least one.
inline ClassLabelSet classify_pattern(const std::vector<bool>& divergent,
                                      const std::optional<ExtendedDivergenceInfo>& ext) {
  ClassLabelSet labels;
  const int n = static_cast<int>(divergent.size());
  std::vector<int> div_at;
  for (int i = 0; i < n; ++i)
    if (divergent[static_cast<std::size_t>(i)]) div_at.push_back(i);
  if (div_at.empty()) {
    labels.insert(ClassLabel::AllConvergent);
    return labels;
  }
  const bool is_suffix = div_at.back() == n - 1 &&
                         static_cast<int>(div_at.size()) == n - div_at.front();
  const bool has_convergent = static_cast<int>(div_at.size()) < n;
  if (is_suffix && div_at.front() >= 1) labels.insert(ClassLabel::TailDivergent);
  if (has_convergent && !is_suffix) {
    labels.insert(ClassLabel::AlternatingMixed);
    bool ap = true;
    if (div_at.size() >= 3) {
      const int step = div_at[1] - div_at[0];
      for (std::size_t i = 2; i < div_at.size() && ap; ++i)
        ap = div_at[i] - div_at[i - 1] == step;
    }
    if (ap) labels.insert(ClassLabel::PeriodicAlternating);
  }
  if (ext) {
    if (ext->any_halted_later) labels.insert(ClassLabel::HasNonGenuine);
    if (ext->any_still_divergent) labels.insert(ClassLabel::PresumedGenuine);
  }
  if (labels.empty()) labels.insert(ClassLabel::Indeterminate);
  return labels;
}

inline ClassLabelSet classify(const FunctionProfile& p,
                              const std::optional<ExtendedDivergenceInfo>& ext = std::nullopt) {
  std::vector<bool> divergent;
  for (int i = 0; i < p.inputs(); ++i) divergent.push_back(p.divergent_at(i));
  return classify_pattern(divergent, ext);
}

enum class Projection { Outputs, Runtimes, Spaces, AllThree };

inline std::string projection_name(Projection p) {
  switch (p) {
    case Projection::Outputs: return "functions";
    case Projection::Runtimes: return "runtimes";
    case Projection::Spaces: return "spaces";
    case Projection::AllThree: return "all";
  }
  return "?";
}

using TokenSequence = std::vector<std::string>;

namespace detail {

// per-projection token sequence from one raw store record line
inline TokenSequence project_line(std::string_view line, int inputs, Projection proj) {
  const auto fields = split_fields(line);
  TokenSequence seq;
  seq.reserve(static_cast<std::size_t>(inputs));
  for (int x = 0; x < inputs; ++x) {
    const auto o = fields[static_cast<std::size_t>(1 + 3 * x)];
    const auto r = fields[static_cast<std::size_t>(2 + 3 * x)];
    const auto s = fields[static_cast<std::size_t>(3 + 3 * x)];
    switch (proj) {
      case Projection::Outputs: seq.emplace_back(o); break;
      case Projection::Runtimes: seq.emplace_back(r); break;
      case Projection::Spaces: seq.emplace_back(s); break;
      case Projection::AllThree:
        seq.push_back(std::string(o) + ',' + std::string(r) + ',' + std::string(s));
        break;
    }
  }
  return seq;
}

}  // namespace detail

// Minimal prefix length at which all distinct members are already pairwise
// distinct; 0 for at most one member.
inline int decidability_threshold(const std::set<TokenSequence>& seqs) {
  if (seqs.size() <= 1) return 0;
  const int n = static_cast<int>(seqs.begin()->size());
  for (int len = 1; len <= n; ++len) {
    std::set<TokenSequence> prefixes;
    for (const auto& s : seqs) prefixes.insert(TokenSequence(s.begin(), s.begin() + len));
    if (prefixes.size() == seqs.size()) return len;
  }
  return n;
}

inline std::set<TokenSequence> distinct_sequences(StoreReader& store, Projection proj) {
  std::set<TokenSequence> out;
  const int inputs = store.header().inputs;
  store.for_each_line([&](std::uint64_t rec, std::string_view line) {
    const auto fields = detail::split_fields(line);
    if (fields.size() != 1 + 3 * static_cast<std::size_t>(inputs))
      throw std::runtime_error(store.path().string() + ": record " + std::to_string(rec) +
                               ": wrong field count");
    out.insert(detail::project_line(line, inputs, proj));
  });
  return out;
}

inline std::uint64_t distinct_count(StoreReader& store, Projection proj) {
  return distinct_sequences(store, proj).size();
}

struct DecidabilityRow {
  Projection projection;
  std::uint64_t distinct = 0;
  int threshold = 0;
};

struct DecidabilityReport {
  std::vector<DecidabilityRow> rows;  // functions, runtimes, spaces, all
};

inline DecidabilityReport analyze_decidability(StoreReader& store) {
  DecidabilityReport rep;
  for (Projection proj : {Projection::Outputs, Projection::Runtimes, Projection::Spaces,
                          Projection::AllThree}) {
    const auto seqs = distinct_sequences(store, proj);
    rep.rows.push_back({proj, seqs.size(), decidability_threshold(seqs)});
  }
  return rep;
}

// How known values are fed to the predictor when completing a sequence:
// InitialSegment passes only the values before the first divergence (the
// completion the decidability tables are built on), WholeHistory passes every
// known value.
enum class CompletionStyle { InitialSegment, WholeHistory };

// The same rows computed after completing every distinct sequence with the
// predictor: divergent slots are filled where a model exists, so two machines
// count as computing the same function when their completed sequences agree.
inline DecidabilityReport analyze_decidability_completed(
    StoreReader& store, const PredictorConfig& cfg = {},
    CompletionStyle style = CompletionStyle::InitialSegment) {
  std::map<TokenSequence, TokenSequence> cache;
  const auto complete = [&](const TokenSequence& raw) -> const TokenSequence& {
    const auto it = cache.find(raw);
    if (it != cache.end()) return it->second;
    KnownPoints pts;
    bool div = false;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] == "-1") {
        div = true;
        if (style == CompletionStyle::InitialSegment) break;
        continue;
      }
      pts.push_back({static_cast<int>(i), mpz_class(raw[i], 10)});
    }
    TokenSequence done = raw;
    if (div && pts.size() >= 2 && pts.size() < raw.size()) {
      PredictorConfig c = cfg;
      c.indices = static_cast<int>(raw.size());
      if (const auto model = find_model(pts, c))
        for (std::size_t i = 0; i < done.size(); ++i)
          if (done[i] == "-1") done[i] = model->eval(static_cast<int>(i)).get_str();
    }
    return cache.emplace(raw, std::move(done)).first->second;
  };

  std::set<TokenSequence> fo, fr, fs, fa;
  const int inputs = store.header().inputs;
  store.for_each_line([&](std::uint64_t, std::string_view line) {
    const TokenSequence o = complete(detail::project_line(line, inputs, Projection::Outputs));
    const TokenSequence r = complete(detail::project_line(line, inputs, Projection::Runtimes));
    const TokenSequence s = complete(detail::project_line(line, inputs, Projection::Spaces));
    TokenSequence all;
    all.reserve(static_cast<std::size_t>(inputs));
    for (int x = 0; x < inputs; ++x)
      all.push_back(o[static_cast<std::size_t>(x)] + ',' + r[static_cast<std::size_t>(x)] + ',' +
                    s[static_cast<std::size_t>(x)]);
    fo.insert(o);
    fr.insert(r);
    fs.insert(s);
    fa.insert(std::move(all));
  });
  DecidabilityReport rep;
  rep.rows.push_back({Projection::Outputs, fo.size(), decidability_threshold(fo)});
  rep.rows.push_back({Projection::Runtimes, fr.size(), decidability_threshold(fr)});
  rep.rows.push_back({Projection::Spaces, fs.size(), decidability_threshold(fs)});
  rep.rows.push_back({Projection::AllThree, fa.size(), decidability_threshold(fa)});
  return rep;
}

// Distinct output sequences serialized one per line, usable as a reference
// set for sample filtering.
inline std::vector<std::string> distinct_output_sequences(StoreReader& store) {
  std::vector<std::string> out;
  for (const auto& seq : distinct_sequences(store, Projection::Outputs)) {
    std::string line;
    for (std::size_t i = 0; i < seq.size(); ++i) {
      if (i) line += ' ';
      line += seq[i];
    }
    out.push_back(std::move(line));
  }
  return out;
}

struct ExtremeEntry {
  MachineIndex machine;
  std::uint64_t max_runtime = 0;
  std::uint64_t space_at_max = 0;
};

// Top-k canonical machines by maximum runtime across the inputs, with the
// space of that run. Verified observations extend runtimes beyond the base
// budget; twins are collapsed by keeping canonical representatives.
inline std::vector<ExtremeEntry> extremes(StoreReader& store,
                                          const std::vector<CompletionRecord>& records, int k) {
  if (k <= 0) return {};
  std::map<std::uint64_t, const CompletionRecord*> by_machine;
  for (const auto& r : records) by_machine.emplace(r.machine.value, &r);
  // ordered by (runtime, space, index) so the cut is deterministic
  using Key = std::tuple<std::uint64_t, std::uint64_t, std::uint64_t>;
  std::set<Key> top;
  store.for_each([&](const FunctionProfile& p) {
    if (!is_canonical(p.machine)) return;
    std::uint64_t rt = 0, sp = 0;
    bool any = false;
    for (int x = 0; x < p.inputs(); ++x)
      if (p.runtimes[static_cast<std::size_t>(x)]) {
        any = true;
        if (*p.runtimes[static_cast<std::size_t>(x)] > rt) {
          rt = *p.runtimes[static_cast<std::size_t>(x)];
          sp = *p.spaces[static_cast<std::size_t>(x)];
        }
      }
    if (const auto it = by_machine.find(p.machine.value); it != by_machine.end()) {
      for (const auto& [slot, obs] : it->second->observations)
        if (obs.halted && obs.runtime > rt) {
          any = true;
          rt = obs.runtime;
          sp = obs.space;
        }
    }
    if (!any) return;
    top.insert({rt, sp, p.machine.value});
    if (static_cast<int>(top.size()) > k) top.erase(top.begin());
  });
  std::vector<ExtremeEntry> out;
  for (auto it = top.rbegin(); it != top.rend(); ++it)
    out.push_back({MachineIndex{std::get<2>(*it), store.header().states}, std::get<0>(*it),
                   std::get<1>(*it)});
  return out;
}

struct ClassSummaryRow {
  ClassLabel label;
  std::uint64_t count = 0;
  double fraction = 0.0;
};

struct ClassSummary {
  std::string population;  // printed with the table
  std::uint64_t population_size = 0;
  std::vector<ClassSummaryRow> rows;
};

// Label counts over the distinct output sequences of the store. Verification
// evidence, where available for a machine computing the sequence, refines the
// divergence labels.
inline ClassSummary class_summary(StoreReader& store,
                                  const std::vector<CompletionRecord>& records) {
  std::map<std::uint64_t, ExtendedDivergenceInfo> ext_by_machine;
  for (const auto& r : records) ext_by_machine.emplace(r.machine.value, extended_info(r));

  struct SeqInfo {
    bool any_ext = false;
    ExtendedDivergenceInfo ext;
  };
  std::map<TokenSequence, SeqInfo> seqs;
  const int inputs = store.header().inputs;
  store.for_each_line([&](std::uint64_t, std::string_view line) {
    const auto fields = detail::split_fields(line);
    std::uint64_t idx = 0;
    detail::parse_u64(fields[0], idx);
    auto& info = seqs[detail::project_line(line, inputs, Projection::Outputs)];
    if (const auto it = ext_by_machine.find(idx); it != ext_by_machine.end()) {
      info.any_ext = true;
      info.ext.any_halted_later |= it->second.any_halted_later;
      info.ext.any_still_divergent |= it->second.any_still_divergent;
    }
  });

  std::map<ClassLabel, std::uint64_t> counts;
  for (const auto& [seq, info] : seqs) {
    std::vector<bool> divergent;
    divergent.reserve(seq.size());
    for (const auto& tok : seq) divergent.push_back(tok == "-1");
    const auto labels = classify_pattern(
        divergent, info.any_ext ? std::optional<ExtendedDivergenceInfo>(info.ext) : std::nullopt);
    for (const auto l : labels) ++counts[l];
  }

  ClassSummary sum;
  sum.population = "distinct output sequences";
  sum.population_size = seqs.size();
  for (const auto& [label, count] : counts)
    sum.rows.push_back({label, count,
                        sum.population_size ? static_cast<double>(count) /
                                                  static_cast<double>(sum.population_size)
                                            : 0.0});
  return sum;
}

struct HaltingHistogram {
  std::vector<std::uint64_t> bins;  // bin k counts halting runs with runtime in [2^k, 2^(k+1))
  std::uint64_t total = 0;
};

inline HaltingHistogram halting_histogram(StoreReader& store) {
  HaltingHistogram h;
  store.for_each([&](const FunctionProfile& p) {
    for (const auto& r : p.runtimes) {
      if (!r) continue;
      const int bin = 63 - static_cast<int>(__builtin_clzll(*r));
      if (static_cast<std::size_t>(bin) >= h.bins.size()) h.bins.resize(static_cast<std::size_t>(bin) + 1, 0);
      ++h.bins[static_cast<std::size_t>(bin)];
      ++h.total;
    }
  });
  return h;
}

}  // namespace tmsweep
