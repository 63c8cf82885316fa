#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include "tmsweep/store.hpp"

namespace tmsweep {

// Aborted on request of the progress callback; the checkpoint stays intact so
// the sweep can be resumed.
struct SweepAborted : std::runtime_error {
  SweepAborted() : std::runtime_error("sweep aborted") {}
};

struct SampleConfig {
  std::uint64_t size = 0;
  std::uint64_t seed = 0;
  std::optional<std::filesystem::path> filter;  // reference output sequences
};

struct SweepConfig {
  int states = 2;
  std::uint64_t budget = kDefaultBudget;
  int inputs = kProfileInputs;
  int workers = 0;  // 0: TMSWEEP_WORKERS env var, else hardware_concurrency
  std::filesystem::path out;
  bool resume = false;
  std::optional<SampleConfig> sample;
  std::uint64_t block_size = 4096;
  // called after each durable block; returning false aborts the sweep
  std::function<bool(std::uint64_t done_blocks, std::uint64_t total_blocks)> progress;
};

inline int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("TMSWEEP_WORKERS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

// SplitMix64 (Steele, Lea, Flood). Fixed here so that seeded samples are
// reproducible across platforms and standard-library versions.
struct SplitMix64 {
  std::uint64_t state;
  explicit SplitMix64(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  // unbiased draw in [0, bound) by multiply-shift with rejection (Lemire)
  std::uint64_t below(std::uint64_t bound) {
    std::uint64_t x = next();
    unsigned __int128 m = static_cast<unsigned __int128>(x) * bound;
    std::uint64_t lo = static_cast<std::uint64_t>(m);
    if (lo < bound) {
      const std::uint64_t t = (0 - bound) % bound;
      while (lo < t) {
        x = next();
        m = static_cast<unsigned __int128>(x) * bound;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }
};

// size distinct machine indices, sorted ascending.
inline std::vector<std::uint64_t> sample_indices(std::uint64_t space, std::uint64_t size,
                                                 std::uint64_t seed) {
  if (size > space) throw std::invalid_argument("sample: size exceeds space size");
  SplitMix64 rng(seed);
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(static_cast<std::size_t>(size * 2));
  std::vector<std::uint64_t> out;
  out.reserve(static_cast<std::size_t>(size));
  while (out.size() < size) {
    const std::uint64_t v = rng.below(space);
    if (seen.insert(v).second) out.push_back(v);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Reference-function filter: a machine passes when its convergent initial
// segment (outputs before the first divergence, the whole sequence if none)
// is nonempty and equals the same-length prefix of some reference sequence.
class FunctionFilter {
 public:
  FunctionFilter() = default;

  // file format: one sequence per line, `inputs` space-separated values,
  // divergent slots as -1
  static FunctionFilter load(const std::filesystem::path& path, int inputs) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("filter: cannot open " + path.string());
    FunctionFilter f;
    std::string line;
    std::uint64_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      const auto fields = detail::split_fields(line);
      if (fields.size() != static_cast<std::size_t>(inputs))
        throw std::runtime_error("filter: line " + std::to_string(lineno) + ": expected " +
                                 std::to_string(inputs) + " values");
      std::string key;
      for (const auto fv : fields) {
        if (fv == "-1") break;  // longer prefixes of this reference are unmatchable
        if (!detail::is_decimal(fv))
          throw std::runtime_error("filter: line " + std::to_string(lineno) + ": bad value");
        key += fv;
        key += ' ';
        f.prefixes_.insert(key);
      }
    }
    return f;
  }

  bool admits(const FunctionProfile& p) const {
    std::string key;
    for (int x = 0; x < p.inputs(); ++x) {
      if (p.divergent_at(x)) break;
      key += p.outputs[static_cast<std::size_t>(x)]->get_str();
      key += ' ';
    }
    if (key.empty()) return false;  // no convergent initial segment
    return prefixes_.contains(key);
  }

  std::size_t prefix_count() const { return prefixes_.size(); }

 private:
  std::unordered_set<std::string> prefixes_;
};

namespace detail {

struct Checkpoint {
  std::uint64_t blocks_done = 0;
  std::uint64_t byte_offset = 0;
};

inline std::filesystem::path checkpoint_path(const std::filesystem::path& out) {
  std::filesystem::path p = out;
  p += ".ckpt";
  return p;
}

inline void write_checkpoint(const std::filesystem::path& out, const StoreHeader& h,
                             const Checkpoint& c) {
  const std::filesystem::path path = checkpoint_path(out);
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::trunc);
    f << format_header(h) << '\n' << c.blocks_done << ' ' << c.byte_offset << '\n';
    f.flush();
    if (!f) throw std::runtime_error("sweep: cannot write checkpoint " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline std::optional<Checkpoint> read_checkpoint(const std::filesystem::path& out,
                                                 const StoreHeader& expect) {
  std::ifstream f(checkpoint_path(out));
  if (!f) return std::nullopt;
  std::string header_line;
  if (!std::getline(f, header_line)) return std::nullopt;
  const auto h = parse_header(header_line);
  if (!h || !(*h == expect))
    throw std::runtime_error("sweep: checkpoint header mismatch for " + out.string());
  Checkpoint c;
  if (!(f >> c.blocks_done >> c.byte_offset))
    throw std::runtime_error("sweep: corrupt checkpoint for " + out.string());
  return c;
}

// Simulates a contiguous slice of the index list into store lines.
inline std::string render_block(const std::vector<std::uint64_t>* indices, std::uint64_t lo,
                                std::uint64_t hi, const SweepConfig& cfg,
                                const FunctionFilter* filter, Tape& scratch) {
  std::string out;
  for (std::uint64_t i = lo; i < hi; ++i) {
    const std::uint64_t index = indices ? (*indices)[static_cast<std::size_t>(i)] : i;
    const MachineSpec spec = decode_machine({index, cfg.states});
    const FunctionProfile p = profile(spec, cfg.budget, cfg.inputs, &scratch);
    if (filter && !filter->admits(p)) continue;
    format_record({index, cfg.states}, p, out);
  }
  return out;
}

inline std::uint64_t run_sweep(const SweepConfig& cfg, const std::vector<std::uint64_t>* indices,
                               const FunctionFilter* filter) {
  if (cfg.budget < 1) throw std::invalid_argument("sweep: budget must be >= 1");
  if (cfg.inputs < 1) throw std::invalid_argument("sweep: inputs must be >= 1");
  if (cfg.block_size < 1) throw std::invalid_argument("sweep: block size must be >= 1");
  if (cfg.out.empty()) throw std::invalid_argument("sweep: output path required");

  const StoreHeader header{cfg.states, cfg.budget, cfg.inputs};
  const std::uint64_t total =
      indices ? static_cast<std::uint64_t>(indices->size()) : space_size(cfg.states);
  const std::uint64_t total_blocks = (total + cfg.block_size - 1) / cfg.block_size;

  Checkpoint ckpt;
  std::ofstream out;
  if (cfg.resume) {
    const auto existing = read_checkpoint(cfg.out, header);
    if (existing) {
      // verify the store on disk matches before continuing after its prefix
      {
        std::ifstream f(cfg.out);
        std::string line;
        if (!f || !std::getline(f, line)) throw std::runtime_error("sweep: resume: store missing");
        const auto h = parse_header(line);
        if (!h || !(*h == header)) throw std::runtime_error("sweep: resume: store header mismatch");
      }
      ckpt = *existing;
      std::filesystem::resize_file(cfg.out, ckpt.byte_offset);
      out.open(cfg.out, std::ios::in | std::ios::out | std::ios::ate);
    }
  }
  if (!out.is_open()) {
    ckpt = Checkpoint{};
    out.open(cfg.out, std::ios::trunc);
    if (!out) throw std::runtime_error("sweep: cannot open " + cfg.out.string());
    out << format_header(header) << '\n';
    out.flush();
    if (!out) throw std::runtime_error("sweep: write failure on " + cfg.out.string());
    ckpt.byte_offset = static_cast<std::uint64_t>(out.tellp());
    write_checkpoint(cfg.out, header, ckpt);
  }

  const int workers = resolve_workers(cfg.workers);
  std::mutex mu;
  std::condition_variable cv_data, cv_space;
  std::map<std::uint64_t, std::string> pending;
  std::atomic<std::uint64_t> next_claim{ckpt.blocks_done};
  std::uint64_t next_write = ckpt.blocks_done;
  bool abort = false;
  std::exception_ptr worker_error;
  const std::uint64_t window = static_cast<std::uint64_t>(workers) * 4 + 4;

  auto worker = [&] {
    Tape scratch;
    for (;;) {
      const std::uint64_t b = next_claim.fetch_add(1);
      if (b >= total_blocks) return;
      const std::uint64_t lo = b * cfg.block_size;
      const std::uint64_t hi = std::min(total, lo + cfg.block_size);
      std::string lines;
      try {
        lines = render_block(indices, lo, hi, cfg, filter, scratch);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        worker_error = std::current_exception();
        abort = true;
        cv_data.notify_all();
        cv_space.notify_all();
        return;
      }
      std::unique_lock<std::mutex> lock(mu);
      cv_space.wait(lock, [&] { return abort || b < next_write + window; });
      if (abort) return;
      pending.emplace(b, std::move(lines));
      cv_data.notify_all();
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int i = 0; i < workers; ++i) pool.emplace_back(worker);

  std::uint64_t written_records = 0;
  try {
    while (next_write < total_blocks) {
      std::string lines;
      {
        std::unique_lock<std::mutex> lock(mu);
        cv_data.wait(lock, [&] { return abort || pending.contains(next_write); });
        if (abort && !pending.contains(next_write)) break;
        lines = std::move(pending.at(next_write));
        pending.erase(next_write);
      }
      out << lines;
      out.flush();
      if (!out) throw std::runtime_error("sweep: write failure on " + cfg.out.string());
      for (char c : lines)
        if (c == '\n') ++written_records;
      ++next_write;
      ckpt.blocks_done = next_write;
      ckpt.byte_offset = static_cast<std::uint64_t>(out.tellp());
      write_checkpoint(cfg.out, header, ckpt);
      {
        std::lock_guard<std::mutex> lock(mu);
        cv_space.notify_all();
      }
      if (cfg.progress && !cfg.progress(next_write, total_blocks)) {
        std::lock_guard<std::mutex> lock(mu);
        abort = true;
        cv_data.notify_all();
        cv_space.notify_all();
        break;
      }
    }
  } catch (...) {
    {
      std::lock_guard<std::mutex> lock(mu);
      abort = true;
      cv_data.notify_all();
      cv_space.notify_all();
    }
    for (auto& t : pool) t.join();
    throw;
  }
  for (auto& t : pool) t.join();
  if (worker_error) std::rethrow_exception(worker_error);
  if (next_write < total_blocks) throw SweepAborted();
  return written_records;
}

}  // namespace detail

// Exhaustive sweep of the whole (s,2) space. The store content is a pure
// function of (states, budget, inputs) regardless of worker count; an
// interrupted sweep resumes from its last durable block.
inline std::uint64_t sweep_space(const SweepConfig& cfg) {
  if (cfg.sample) throw std::invalid_argument("sweep_space: config carries a sample field");
  return detail::run_sweep(cfg, nullptr, nullptr);
}

// Seeded sample of the (s,2) space, optionally filtered against reference
// output sequences; records stay sorted by machine index.
inline std::uint64_t sample_space(const SweepConfig& cfg) {
  if (!cfg.sample) throw std::invalid_argument("sample_space: sample field required");
  const auto indices = sample_indices(space_size(cfg.states), cfg.sample->size, cfg.sample->seed);
  std::optional<FunctionFilter> filter;
  if (cfg.sample->filter) filter = FunctionFilter::load(*cfg.sample->filter, cfg.inputs);
  return detail::run_sweep(cfg, &indices, filter ? &*filter : nullptr);
}

}  // namespace tmsweep
