// Command-line surface for the sweep -> complete -> verify -> analyze ->
// report pipeline.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tmsweep/analysis.hpp"
#include "tmsweep/completion.hpp"
#include "tmsweep/report.hpp"
#include "tmsweep/sweep.hpp"

namespace {

using namespace tmsweep;

void banner(const std::string& text) { std::cerr << "# tmsweep " << text << '\n'; }

std::map<std::uint64_t, FunctionProfile> load_profiles(const std::filesystem::path& store_path,
                                                       const std::set<std::uint64_t>& want) {
  std::map<std::uint64_t, FunctionProfile> out;
  StoreReader store(store_path);
  store.for_each([&](const FunctionProfile& p) {
    if (want.contains(p.machine.value)) out.emplace(p.machine.value, p);
  });
  return out;
}

int run_sweep_command(const SweepConfig& cfg, bool sampled) {
  std::uint64_t blocks_seen = 0;
  SweepConfig run = cfg;
  run.progress = [&](std::uint64_t done, std::uint64_t total) {
    blocks_seen = done;
    if (done == total || done % 64 == 0)
      std::cerr << "# block " << done << "/" << total << '\n';
    return true;
  };
  const std::uint64_t records = sampled ? sample_space(run) : sweep_space(run);
  std::cout << records << " records -> " << cfg.out.string() << '\n';
  return 0;
}

int cmd_complete(const std::filesystem::path& store_path, const std::filesystem::path& log_path,
                 std::uint64_t min_runtime, bool second, const PredictorConfig& pcfg) {
  StoreReader store(store_path);
  std::vector<CompletionRecord> out;
  if (!second) {
    const auto candidates = select_candidates(store, min_runtime);
    std::set<std::uint64_t> want;
    for (const auto& c : candidates) want.insert(c.value);
    auto profiles = load_profiles(store_path, want);
    for (const auto& c : candidates)
      out.push_back(complete_profile(profiles.at(c.value), pcfg, Pass::First));
    std::cout << "pass 1: " << out.size() << " candidate records -> " << log_path.string()
              << '\n';
  } else {
    auto latest = latest_records(read_log(log_path));
    std::set<std::uint64_t> want;
    for (const auto& r : latest)
      if (!r.verified() || judge(r) != Outcome::FullyCorrect) want.insert(r.machine.value);
    auto profiles = load_profiles(store_path, want);
    for (const auto& r : latest) {
      if (!want.contains(r.machine.value)) continue;
      out.push_back(merge_second_pass(
          r, complete_profile(profiles.at(r.machine.value), pcfg, Pass::Second)));
    }
    std::cout << "pass 2: refitted " << out.size() << " records -> " << log_path.string() << '\n';
  }
  append_records(log_path, out);
  return 0;
}

int cmd_verify(const std::filesystem::path& log_path, std::uint64_t budget, int workers) {
  auto latest = latest_records(read_log(log_path));
  verify_at(latest, budget, resolve_workers(workers));
  append_records(log_path, latest);
  std::map<std::string, int> counts;
  for (const auto& r : latest) counts[outcome_name(judge(r))]++;
  std::cout << "verified " << latest.size() << " records at budget " << budget << ":";
  for (const auto& [k, v] : counts) std::cout << ' ' << k << '=' << v;
  std::cout << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exhaustive Turing machine sweeps with sequence prediction"};
  app.require_subcommand(1);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "exhaustively sweep an (s,2) space");
  SweepConfig sweep_cfg;
  std::string sweep_out;
  sweep->add_option("--states", sweep_cfg.states, "state count")->required()->check(CLI::Range(1, kMaxStates));
  sweep->add_option("--budget", sweep_cfg.budget, "step budget")->check(CLI::PositiveNumber)->default_val(kDefaultBudget);
  sweep->add_option("--inputs", sweep_cfg.inputs, "number of unary inputs")->check(CLI::PositiveNumber)->default_val(kProfileInputs);
  sweep->add_option("--out", sweep_out, "store path")->required();
  sweep->add_option("--workers", sweep_cfg.workers, "worker threads (0 = auto)");
  sweep->add_option("--block", sweep_cfg.block_size, "machines per checkpoint block")->check(CLI::PositiveNumber);
  sweep->add_flag("--resume", sweep_cfg.resume, "resume from a checkpoint");

  // sample
  auto* sample = app.add_subcommand("sample", "seeded random sample of an (s,2) space");
  SweepConfig sample_cfg;
  SampleConfig sample_sub;
  std::string sample_out, sample_filter;
  sample->add_option("--states", sample_cfg.states, "state count")->required()->check(CLI::Range(1, kMaxStates));
  sample->add_option("--size", sample_sub.size, "sample size")->required()->check(CLI::PositiveNumber);
  sample->add_option("--seed", sample_sub.seed, "sample seed")->required();
  sample->add_option("--budget", sample_cfg.budget, "step budget")->check(CLI::PositiveNumber)->default_val(kDefaultBudget);
  sample->add_option("--inputs", sample_cfg.inputs, "number of unary inputs")->check(CLI::PositiveNumber)->default_val(kProfileInputs);
  sample->add_option("--out", sample_out, "store path")->required();
  sample->add_option("--filter", sample_filter, "reference output sequence file");
  sample->add_option("--workers", sample_cfg.workers, "worker threads (0 = auto)");

  // complete
  auto* complete = app.add_subcommand("complete", "fit models for divergent candidate profiles");
  std::string complete_store, complete_log, complete_pass = "first";
  std::uint64_t min_runtime = 480;
  PredictorConfig pcfg;
  complete->add_option("--store", complete_store, "swept store")->required();
  complete->add_option("--log", complete_log, "completion log (appended)")->required();
  complete->add_option("--min-runtime", min_runtime, "candidate runtime threshold")->default_val(480);
  complete->add_option("--pass", complete_pass, "first | second")->check(CLI::IsMember({"first", "second"}));
  complete->add_option("--max-poly-degree", pcfg.max_poly_degree)->check(CLI::PositiveNumber);
  complete->add_option("--max-order", pcfg.max_recurrence_order)->check(CLI::PositiveNumber);
  complete->add_option("--min-validation", pcfg.min_validation_points)->check(CLI::PositiveNumber);
  complete->add_option("--tail-window", pcfg.tail_window)->check(CLI::PositiveNumber);

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "rerun divergent slots at a larger budget");
  std::string verify_log;
  std::uint64_t verify_budget = 0;
  int verify_workers = 0;
  verify_cmd->add_option("--log", verify_log, "completion log")->required();
  verify_cmd->add_option("--budget", verify_budget, "verification budget")->required()->check(CLI::PositiveNumber);
  verify_cmd->add_option("--workers", verify_workers, "worker threads (0 = auto)");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "aggregate statistics over a store");
  std::string analyze_mode, analyze_store, analyze_log, analyze_out;
  int analyze_top = 8;
  bool analyze_md = false;
  analyze->add_option("mode", analyze_mode, "decidability | classes | extremes | histogram | functions")
      ->required()
      ->check(CLI::IsMember({"decidability", "classes", "extremes", "histogram", "functions"}));
  analyze->add_option("--store", analyze_store, "swept store")->required();
  analyze->add_option("--log", analyze_log, "completion log (extremes, classes)");
  analyze->add_option("--top", analyze_top, "entries in the extremes table")->default_val(8);
  analyze->add_option("--out", analyze_out, "output file (functions mode)");
  analyze->add_flag("--markdown", analyze_md, "emit markdown tables");

  // report
  auto* report = app.add_subcommand("report", "regenerate every table for a store");
  std::string report_store, report_log, report_json;
  bool report_md = false;
  report->add_option("--store", report_store, "swept store")->required();
  report->add_option("--log", report_log, "completion log");
  report->add_option("--json", report_json, "machine-readable summary path");
  report->add_flag("--markdown", report_md, "emit markdown tables");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (sweep->parsed()) {
      sweep_cfg.out = sweep_out;
      banner("sweep states=" + std::to_string(sweep_cfg.states) +
             " budget=" + std::to_string(sweep_cfg.budget) +
             " inputs=" + std::to_string(sweep_cfg.inputs) +
             " workers=" + std::to_string(resolve_workers(sweep_cfg.workers)) +
             " block=" + std::to_string(sweep_cfg.block_size) +
             (sweep_cfg.resume ? " resume" : ""));
      return run_sweep_command(sweep_cfg, false);
    }
    if (sample->parsed()) {
      sample_cfg.out = sample_out;
      if (!sample_filter.empty()) sample_sub.filter = sample_filter;
      sample_cfg.sample = sample_sub;
      banner("sample states=" + std::to_string(sample_cfg.states) +
             " size=" + std::to_string(sample_sub.size) + " seed=" + std::to_string(sample_sub.seed) +
             " budget=" + std::to_string(sample_cfg.budget) +
             (sample_filter.empty() ? "" : " filter=" + sample_filter));
      return run_sweep_command(sample_cfg, true);
    }
    if (complete->parsed()) {
      banner("complete store=" + complete_store + " log=" + complete_log +
             " min-runtime=" + std::to_string(min_runtime) + " pass=" + complete_pass);
      return cmd_complete(complete_store, complete_log, min_runtime, complete_pass == "second",
                          pcfg);
    }
    if (verify_cmd->parsed()) {
      banner("verify log=" + verify_log + " budget=" + std::to_string(verify_budget) +
             " workers=" + std::to_string(resolve_workers(verify_workers)));
      return cmd_verify(verify_log, verify_budget, verify_workers);
    }
    if (analyze->parsed()) {
      banner("analyze " + analyze_mode + " store=" + analyze_store +
             (analyze_log.empty() ? "" : " log=" + analyze_log));
      StoreReader store(analyze_store);
      std::vector<CompletionRecord> records;
      if (!analyze_log.empty()) records = latest_records(read_log(analyze_log));
      if (analyze_mode == "decidability") {
        StoreReader raw_store(analyze_store);
        const auto raw = analyze_decidability(raw_store);
        StoreReader done_store(analyze_store);
        const auto done = analyze_decidability_completed(done_store);
        std::cout << render_decidability(raw, &done, analyze_md);
      } else if (analyze_mode == "classes") {
        std::cout << render_class_summary(class_summary(store, records), analyze_md);
      } else if (analyze_mode == "extremes") {
        std::cout << render_extremes(extremes(store, records, analyze_top), analyze_md);
      } else if (analyze_mode == "histogram") {
        std::cout << render_histogram(halting_histogram(store), analyze_md);
      } else {  // functions
        const auto fns = distinct_output_sequences(store);
        if (analyze_out.empty()) {
          for (const auto& f : fns) std::cout << f << '\n';
        } else {
          std::ofstream out(analyze_out);
          if (!out) throw std::runtime_error("cannot open " + analyze_out);
          for (const auto& f : fns) out << f << '\n';
          std::cout << fns.size() << " functions -> " << analyze_out << '\n';
        }
      }
      return 0;
    }
    if (report->parsed()) {
      banner("report store=" + report_store + (report_log.empty() ? "" : " log=" + report_log));
      std::vector<CompletionRecord> records;
      if (!report_log.empty()) records = latest_records(read_log(report_log));
      StoreReader store(report_store);
      const StoreHeader header = store.header();
      std::cout << "space (" << header.states << ",2), budget " << header.budget << ", "
                << header.inputs << " inputs\n\n";
      StoreReader raw_store(report_store);
      const auto raw = analyze_decidability(raw_store);
      StoreReader done_store(report_store);
      const auto done = analyze_decidability_completed(done_store);
      std::cout << "decidable sets (raw and after initial-segment completion)\n"
                << render_decidability(raw, &done, report_md) << '\n';
      StoreReader cls_store(report_store);
      const auto classes = class_summary(cls_store, records);
      std::cout << "sequence classes\n" << render_class_summary(classes, report_md) << '\n';
      StoreReader ext_store(report_store);
      const auto top = extremes(ext_store, records, 8);
      std::cout << "maximum verified runtimes\n" << render_extremes(top, report_md) << '\n';
      StoreReader hist_store(report_store);
      const auto hist = halting_histogram(hist_store);
      std::cout << "halting times\n" << render_histogram(hist, report_md) << '\n';
      CompletionSummary completions;
      if (!records.empty()) {
        completions = summarize_completions(records, {20000, 2000000, 1000000000});
        std::cout << "completion pipeline\n" << render_completion_summary(completions, report_md);
      }
      if (!report_json.empty()) {
        const auto j = summary_json(header, raw, &done, top, classes, hist,
                                    records.empty() ? nullptr : &completions);
        std::ofstream out(report_json);
        if (!out) throw std::runtime_error("cannot open " + report_json);
        out << j.dump(2) << '\n';
        std::cout << "\nsummary -> " << report_json << '\n';
      }
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
