#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include <gmpxx.h>

#include "tmsweep/machine.hpp"

namespace tmsweep {

inline constexpr int kProfileInputs = 21;
inline constexpr std::uint64_t kDefaultBudget = 1000;

// One-sided tape, bit-packed into 64-bit words. Cell 1 is the rightmost cell;
// the tape grows without bound to the left (increasing cell numbers). Cell i
// maps to bit (i-1) of the word array, so the tape content read as a binary
// number has cell 1 as the least significant bit.
//
// content_cells is an upper bound on the highest possibly-nonzero cell; reuse
// of a tape across runs only has to clear up to that bound.
class Tape {
 public:
  Tape() = default;

  // Unary input: the number x is x+1 consecutive 1s on cells 1..x+1.
  void reset(std::uint64_t input) {
    const std::uint64_t ones = input + 1;
    const std::size_t need = static_cast<std::size_t>(ones / 64 + 1);
    const std::size_t dirty =
        std::min(words_.size(), static_cast<std::size_t>(content_cells_ / 64 + 1));
    std::fill(words_.begin(), words_.begin() + dirty, 0ull);
    if (words_.size() < need) words_.resize(need, 0ull);
    for (std::uint64_t w = 0; w < ones / 64; ++w) words_[w] = ~0ull;
    if (ones % 64) words_[ones / 64] = (1ull << (ones % 64)) - 1;
    content_cells_ = ones;
  }

  int cell(std::uint64_t i) const {  // 1-based
    if (i == 0) throw std::out_of_range("Tape::cell: cells are numbered from 1");
    const std::uint64_t b = i - 1;
    if ((b >> 6) >= words_.size()) return 0;
    return static_cast<int>((words_[b >> 6] >> (b & 63)) & 1);
  }

  void set_cell(std::uint64_t i, int v) {  // 1-based
    if (i == 0) throw std::out_of_range("Tape::set_cell: cells are numbered from 1");
    const std::uint64_t b = i - 1;
    while ((b >> 6) >= words_.size()) words_.push_back(0);
    if (v)
      words_[b >> 6] |= 1ull << (b & 63);
    else
      words_[b >> 6] &= ~(1ull << (b & 63));
    content_cells_ = std::max(content_cells_, i);
  }

  std::uint64_t content_cells() const { return content_cells_; }
  void note_content(std::uint64_t cells) { content_cells_ = std::max(content_cells_, cells); }

  std::vector<std::uint64_t>& words() { return words_; }
  const std::vector<std::uint64_t>& words() const { return words_; }

 private:
  std::vector<std::uint64_t> words_;
  std::uint64_t content_cells_ = 0;
};

inline Tape encode_input(std::uint64_t x) {
  Tape t;
  t.reset(x);
  return t;
}

// Tape content as a binary number, cell 1 the least significant bit.
inline mpz_class decode_output(const Tape& tape) {
  if (tape.content_cells() == 0) return mpz_class(0);
  const std::size_t nwords =
      std::min(tape.words().size(), static_cast<std::size_t>((tape.content_cells() - 1) / 64 + 1));
  mpz_class out;
  mpz_import(out.get_mpz_t(), nwords, -1, sizeof(std::uint64_t), 0, 0, tape.words().data());
  return out;
}

// Outcome of one bounded run. steps counts executed transitions (equal to the
// budget when the run diverged); space counts distinct visited cells including
// the start cell; output is meaningful only when halted.
struct RunResult {
  bool halted = false;
  std::uint64_t steps = 0;
  std::uint64_t space = 0;
  mpz_class output;

  friend bool operator==(const RunResult& a, const RunResult& b) {
    return a.halted == b.halted && a.steps == b.steps && a.space == b.space &&
           (!a.halted || a.output == b.output);
  }
};

namespace detail {

// Transition table flattened for the stepping loop: dmove is over the 0-based
// cell axis (left = +1, right = -1), row is (next_state-1)*2.
struct CompiledTable {
  struct Op {
    std::uint8_t write;
    std::int8_t dmove;
    std::uint8_t row;
  };
  std::array<Op, 2 * kMaxStates> op{};

  explicit CompiledTable(const MachineSpec& m) {
    for (int q = 1; q <= m.states; ++q)
      for (int sym = 0; sym < 2; ++sym) {
        const Action& a = m.entry(q, sym);
        op[(q - 1) * 2 + sym] =
            Op{a.write, static_cast<std::int8_t>(a.dir == Dir::Left ? +1 : -1),
               static_cast<std::uint8_t>((a.next - 1) * 2)};
      }
  }
};

inline RunResult run_compiled(const CompiledTable& ct, std::uint64_t x, std::uint64_t budget,
                              Tape& tape) {
  tape.reset(x);
  auto& w = tape.words();
  std::uint64_t pos = 0;      // 0-based cell under the head; starts on cell 1
  std::uint64_t max_pos = 0;  // deepest cell visited
  std::uint64_t steps = 0;
  int row = 0;  // (state-1)*2, state 1 is the start state
  bool halted = false;
  while (steps < budget) {
    const std::size_t wi = static_cast<std::size_t>(pos >> 6);
    const unsigned bi = static_cast<unsigned>(pos & 63);
    const std::uint64_t word = w[wi];
    const int sym = static_cast<int>((word >> bi) & 1);
    const CompiledTable::Op op = ct.op[row + sym];
    w[wi] = (word & ~(1ull << bi)) | (static_cast<std::uint64_t>(op.write) << bi);
    ++steps;
    row = op.row;
    if (op.dmove < 0) {
      // toward the right edge; the halting step's write has already landed
      if (pos == 0) {
        halted = true;
        break;
      }
      --pos;
    } else {
      ++pos;
      if (pos > max_pos) {
        max_pos = pos;
        if ((pos >> 6) >= w.size()) w.push_back(0);
      }
    }
  }
  tape.note_content(max_pos + 1);  // writes may have landed anywhere visited
  RunResult r;
  r.halted = halted;
  r.steps = steps;
  r.space = max_pos + 1;
  if (halted) r.output = decode_output(tape);
  return r;
}

}  // namespace detail

// One bounded run. The head starts on cell 1 (the rightmost cell) and the
// machine halts when it moves right off that cell; moving left onto an
// unvisited cell reads 0. If budget steps elapse without halting the run is
// divergent at that budget.
inline RunResult run(const MachineSpec& spec, std::uint64_t x, std::uint64_t budget, Tape& tape) {
  if (budget == 0) throw std::invalid_argument("run: budget must be >= 1");
  validate(spec);
  return detail::run_compiled(detail::CompiledTable(spec), x, budget, tape);
}

inline RunResult run(const MachineSpec& spec, std::uint64_t x, std::uint64_t budget) {
  Tape tape;
  return run(spec, x, budget, tape);
}

// The triple of sequences a machine produces on unary inputs 0..inputs-1.
// A slot is divergent (disengaged optional) in all three sequences or none.
struct FunctionProfile {
  MachineIndex machine{0, 1};
  std::uint64_t budget = 0;
  std::vector<std::optional<mpz_class>> outputs;
  std::vector<std::optional<std::uint64_t>> runtimes;
  std::vector<std::optional<std::uint64_t>> spaces;

  int inputs() const { return static_cast<int>(outputs.size()); }
  bool divergent_at(int i) const { return !outputs[static_cast<std::size_t>(i)].has_value(); }
  bool has_divergence() const {
    for (const auto& o : outputs)
      if (!o.has_value()) return true;
    return false;
  }
};

inline FunctionProfile profile(const MachineSpec& spec, std::uint64_t budget,
                               int inputs = kProfileInputs, Tape* scratch = nullptr) {
  if (budget == 0) throw std::invalid_argument("profile: budget must be >= 1");
  if (inputs < 1) throw std::invalid_argument("profile: inputs must be >= 1");
  validate(spec);
  const detail::CompiledTable ct(spec);
  Tape local;
  Tape& tape = scratch ? *scratch : local;
  FunctionProfile p;
  p.machine = encode_machine(spec);
  p.budget = budget;
  p.outputs.resize(static_cast<std::size_t>(inputs));
  p.runtimes.resize(static_cast<std::size_t>(inputs));
  p.spaces.resize(static_cast<std::size_t>(inputs));
  for (int x = 0; x < inputs; ++x) {
    RunResult r = detail::run_compiled(ct, static_cast<std::uint64_t>(x), budget, tape);
    if (r.halted) {
      p.outputs[static_cast<std::size_t>(x)] = std::move(r.output);
      p.runtimes[static_cast<std::size_t>(x)] = r.steps;
      p.spaces[static_cast<std::size_t>(x)] = r.space;
    }
  }
  return p;
}

}  // namespace tmsweep
