#pragma once

#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tmsweep/analysis.hpp"

namespace tmsweep {

// Plain-text (aligned) or markdown table rendering.
class TextTable {
 public:
  explicit TextTable(std::vector<std::string> headers) : headers_(std::move(headers)) {}

  void add_row(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

  std::string render(bool markdown) const {
    std::vector<std::size_t> width(headers_.size(), 0);
    const auto widen = [&](const std::vector<std::string>& row) {
      for (std::size_t i = 0; i < row.size() && i < width.size(); ++i)
        width[i] = std::max(width[i], row[i].size());
    };
    widen(headers_);
    for (const auto& r : rows_) widen(r);
    std::ostringstream os;
    const auto emit = [&](const std::vector<std::string>& row) {
      if (markdown) os << "| ";
      for (std::size_t i = 0; i < row.size(); ++i) {
        os << std::left << std::setw(static_cast<int>(width[i])) << row[i];
        if (i + 1 < row.size()) os << (markdown ? " | " : "  ");
      }
      if (markdown) os << " |";
      os << '\n';
    };
    emit(headers_);
    if (markdown) {
      os << "|";
      for (std::size_t i = 0; i < headers_.size(); ++i)
        os << ' ' << std::string(width[i], '-') << " |";
      os << '\n';
    } else {
      std::size_t total = width.empty() ? 0 : (headers_.size() - 1) * 2;
      for (const auto w : width) total += w;
      os << std::string(total, '-') << '\n';
    }
    for (const auto& r : rows_) emit(r);
    return os.str();
  }

 private:
  std::vector<std::string> headers_;
  std::vector<std::vector<std::string>> rows_;
};

inline std::string render_decidability(const DecidabilityReport& raw,
                                       const DecidabilityReport* completed, bool markdown) {
  TextTable t(completed
                  ? std::vector<std::string>{"sequence type", "total cases", "decidable by",
                                             "completed cases", "completed decidable by"}
                  : std::vector<std::string>{"sequence type", "total cases", "decidable by"});
  for (std::size_t i = 0; i < raw.rows.size(); ++i) {
    std::vector<std::string> row{projection_name(raw.rows[i].projection),
                                 std::to_string(raw.rows[i].distinct),
                                 std::to_string(raw.rows[i].threshold)};
    if (completed) {
      row.push_back(std::to_string(completed->rows[i].distinct));
      row.push_back(std::to_string(completed->rows[i].threshold));
    }
    t.add_row(std::move(row));
  }
  return t.render(markdown);
}

inline std::string render_extremes(const std::vector<ExtremeEntry>& entries, bool markdown) {
  TextTable t({"machine", "max runtime", "space"});
  for (const auto& e : entries)
    t.add_row({std::to_string(e.machine.value), std::to_string(e.max_runtime),
               std::to_string(e.space_at_max)});
  return t.render(markdown);
}

inline std::string render_class_summary(const ClassSummary& sum, bool markdown) {
  std::ostringstream os;
  os << "population: " << sum.population << " (" << sum.population_size << ")\n";
  TextTable t({"computation type", "cases", "fraction"});
  for (const auto& row : sum.rows) {
    std::ostringstream frac;
    frac << std::fixed << std::setprecision(3) << row.fraction;
    t.add_row({class_label_name(row.label), std::to_string(row.count), frac.str()});
  }
  os << t.render(markdown);
  return os.str();
}

inline std::string render_histogram(const HaltingHistogram& h, bool markdown) {
  TextTable t({"runtime bin", "halting runs"});
  for (std::size_t k = 0; k < h.bins.size(); ++k) {
    if (h.bins[k] == 0) continue;
    const std::uint64_t lo = 1ull << k;
    const std::uint64_t hi = (1ull << (k + 1)) - 1;
    t.add_row({"[" + std::to_string(lo) + ".." + std::to_string(hi) + "]",
               std::to_string(h.bins[k])});
  }
  std::ostringstream os;
  os << t.render(markdown);
  os << "total halting runs: " << h.total << '\n';
  return os.str();
}

struct CompletionSummary {
  std::uint64_t records = 0;
  std::uint64_t first_pass = 0;
  std::uint64_t second_pass = 0;
  std::map<std::string, std::uint64_t> outcomes;            // canonical representatives
  std::map<std::string, std::uint64_t> outcomes_with_twins;  // pairs counted twice
  std::uint64_t slots = 0;
  std::uint64_t slots_resolved = 0;                          // halted at some larger budget
  std::map<std::uint64_t, std::uint64_t> resolved_by_budget; // halting time <= rung
};

inline CompletionSummary summarize_completions(const std::vector<CompletionRecord>& latest,
                                               const std::vector<std::uint64_t>& rungs) {
  CompletionSummary s;
  for (const auto& rec : latest) {
    ++s.records;
    if (rec.pass == Pass::First)
      ++s.first_pass;
    else
      ++s.second_pass;
    const std::uint64_t weight =
        canonical_index(rec.machine) == rec.machine &&
                encode_machine(twin_of(decode_machine(rec.machine))).value != rec.machine.value
            ? 2
            : 1;
    const std::string outcome = rec.verified() ? outcome_name(judge(rec)) : "unverified";
    ++s.outcomes[outcome];
    s.outcomes_with_twins[outcome] += weight;
    for (const auto& [slot, obs] : rec.observations) {
      ++s.slots;
      if (obs.halted) {
        ++s.slots_resolved;
        for (const auto rung : rungs)
          if (obs.runtime <= rung) ++s.resolved_by_budget[rung];
      }
    }
  }
  return s;
}

inline std::string render_completion_summary(const CompletionSummary& s, bool markdown) {
  std::ostringstream os;
  os << "completion records: " << s.records << " (first pass " << s.first_pass
     << ", second pass " << s.second_pass << ")\n";
  TextTable t({"outcome", "records", "with twins"});
  for (const auto& [name, count] : s.outcomes) {
    const auto it = s.outcomes_with_twins.find(name);
    t.add_row({name, std::to_string(count),
               std::to_string(it == s.outcomes_with_twins.end() ? count : it->second)});
  }
  os << t.render(markdown);
  os << "divergent slots: " << s.slots << ", resolved by longer runs: " << s.slots_resolved
     << '\n';
  for (const auto& [rung, count] : s.resolved_by_budget)
    os << "  halted within " << rung << " steps: " << count << " ("
       << (s.slots ? 100.0 * static_cast<double>(count) / static_cast<double>(s.slots) : 0.0)
       << "% of divergent slots)\n";
  return os.str();
}

inline nlohmann::json summary_json(const StoreHeader& header, const DecidabilityReport& raw,
                                   const DecidabilityReport* completed,
                                   const std::vector<ExtremeEntry>& extremes_table,
                                   const ClassSummary& classes, const HaltingHistogram& hist,
                                   const CompletionSummary* completions) {
  nlohmann::json j;
  j["space"] = {{"states", header.states}, {"budget", header.budget}, {"inputs", header.inputs}};
  auto rows = nlohmann::json::array();
  for (const auto& r : raw.rows)
    rows.push_back({{"projection", projection_name(r.projection)},
                    {"distinct", r.distinct},
                    {"threshold", r.threshold}});
  j["decidability"]["raw"] = rows;
  if (completed) {
    auto crows = nlohmann::json::array();
    for (const auto& r : completed->rows)
      crows.push_back({{"projection", projection_name(r.projection)},
                       {"distinct", r.distinct},
                       {"threshold", r.threshold}});
    j["decidability"]["completed"] = crows;
  }
  auto ext = nlohmann::json::array();
  for (const auto& e : extremes_table)
    ext.push_back({{"machine", e.machine.value},
                   {"max_runtime", e.max_runtime},
                   {"space", e.space_at_max}});
  j["extremes"] = ext;
  auto cls = nlohmann::json::array();
  for (const auto& row : classes.rows)
    cls.push_back({{"label", class_label_name(row.label)},
                   {"count", row.count},
                   {"fraction", row.fraction}});
  j["classes"] = {{"population", classes.population},
                  {"population_size", classes.population_size},
                  {"rows", cls}};
  j["halting_histogram"] = {{"bins", hist.bins}, {"total", hist.total}};
  if (completions) {
    j["completions"] = {{"records", completions->records},
                        {"first_pass", completions->first_pass},
                        {"second_pass", completions->second_pass},
                        {"outcomes", completions->outcomes},
                        {"outcomes_with_twins", completions->outcomes_with_twins},
                        {"divergent_slots", completions->slots},
                        {"slots_resolved", completions->slots_resolved}};
  }
  return j;
}

}  // namespace tmsweep
