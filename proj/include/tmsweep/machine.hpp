#pragma once

#include <array>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>

namespace tmsweep {

inline constexpr int kMaxStates = 6;

enum class Dir : std::uint8_t { Left = 0, Right = 1 };

// One transition-table entry: write a symbol, move the head, enter a state.
struct Action {
  std::uint8_t write = 0;
  Dir dir = Dir::Left;
  std::uint8_t next = 1;
  friend bool operator==(const Action&, const Action&) = default;
};

// Transition table of an s-state 2-symbol one-sided machine. State 1 is the
// start state; there is no halt state (a run halts by dropping off the right
// edge of the tape, see simulator.hpp).
struct MachineSpec {
  int states = 1;
  std::array<Action, 2 * kMaxStates> table{};  // row-major: entry(q,sym) at (q-1)*2+sym

  Action& entry(int state, int symbol) { return table[(state - 1) * 2 + symbol]; }
  const Action& entry(int state, int symbol) const { return table[(state - 1) * 2 + symbol]; }

  friend bool operator==(const MachineSpec& a, const MachineSpec& b) {
    if (a.states != b.states) return false;
    for (int i = 0; i < 2 * a.states; ++i)
      if (!(a.table[i] == b.table[i])) return false;
    return true;
  }
};

// Position of a machine in the enumeration of its space.
struct MachineIndex {
  std::uint64_t value = 0;
  int states = 1;
  friend bool operator==(const MachineIndex&, const MachineIndex&) = default;
};

// (4s)^(2s) machines per space: 4096 in (2,2), 2985984 in (3,2), 2^32 in (4,2).
inline std::uint64_t space_size(int states) {
  if (states < 1 || states > kMaxStates)
    throw std::out_of_range("space_size: states must be in 1.." + std::to_string(kMaxStates));
  const std::uint64_t base = 4ull * static_cast<std::uint64_t>(states);
  std::uint64_t n = 1;
  for (int i = 0; i < 2 * states; ++i) n *= base;
  return n;
}

inline void validate(const MachineSpec& spec) {
  if (spec.states < 1 || spec.states > kMaxStates)
    throw std::invalid_argument("machine: states must be in 1.." + std::to_string(kMaxStates));
  for (int i = 0; i < 2 * spec.states; ++i) {
    const Action& a = spec.table[i];
    if (a.write > 1) throw std::invalid_argument("machine: written symbol must be 0 or 1");
    if (a.next < 1 || a.next > spec.states)
      throw std::invalid_argument("machine: next state out of range");
  }
}

// Mixed-radix decoding. Entries are ordered (1,0),(1,1),(2,0),(2,1),...,(s,1);
// digit i of the index (little-endian, base 4s) is the entry value
// e in [0,4s) with next state e/4+1, written symbol e mod 2, and direction
// bit (e mod 4)/2 (0 = left).
inline MachineSpec decode_machine(MachineIndex index) {
  const std::uint64_t size = space_size(index.states);
  if (index.value >= size)
    throw std::out_of_range("decode_machine: index " + std::to_string(index.value) +
                            " out of range for " + std::to_string(index.states) + " states");
  MachineSpec spec;
  spec.states = index.states;
  const std::uint64_t radix = 4ull * static_cast<std::uint64_t>(index.states);
  std::uint64_t v = index.value;
  for (int i = 0; i < 2 * index.states; ++i) {
    const std::uint64_t e = v % radix;
    v /= radix;
    spec.table[i] = Action{static_cast<std::uint8_t>(e & 1),
                           ((e >> 1) & 1) ? Dir::Right : Dir::Left,
                           static_cast<std::uint8_t>(e / 4 + 1)};
  }
  return spec;
}

inline MachineIndex encode_machine(const MachineSpec& spec) {
  validate(spec);
  const std::uint64_t radix = 4ull * static_cast<std::uint64_t>(spec.states);
  std::uint64_t v = 0;
  for (int i = 2 * spec.states - 1; i >= 0; --i) {
    const Action& a = spec.table[i];
    const std::uint64_t e = static_cast<std::uint64_t>(a.next - 1) * 4 +
                            (a.dir == Dir::Right ? 2u : 0u) + a.write;
    v = v * radix + e;
  }
  return MachineIndex{v, spec.states};
}

// The twin of a machine: relabel non-start states by the fixed involution that
// swaps states 2 and 3 (identity for s < 3). Twins start in the same state on
// the same tape, so they perform the same computation step for step.
inline MachineSpec twin_of(const MachineSpec& spec) {
  validate(spec);
  const auto perm = [&](int q) {
    if (spec.states < 3) return q;
    if (q == 2) return 3;
    if (q == 3) return 2;
    return q;
  };
  MachineSpec twin;
  twin.states = spec.states;
  for (int q = 1; q <= spec.states; ++q)
    for (int sym = 0; sym < 2; ++sym) {
      const Action& a = spec.entry(q, sym);
      twin.entry(perm(q), sym) = Action{a.write, a.dir, static_cast<std::uint8_t>(perm(a.next))};
    }
  return twin;
}

// Smaller of a machine's own index and its twin's. Keeping indices with
// canonical_index(i) == i selects exactly one machine per twin pair.
inline MachineIndex canonical_index(MachineIndex index) {
  const MachineIndex twin = encode_machine(twin_of(decode_machine(index)));
  return twin.value < index.value ? twin : index;
}

inline bool is_canonical(MachineIndex index) { return canonical_index(index) == index; }

// One `(q,sym) -> (w,d,q')` line per entry, for debugging.
inline std::string pretty_print(const MachineSpec& spec) {
  std::ostringstream os;
  for (int q = 1; q <= spec.states; ++q)
    for (int sym = 0; sym < 2; ++sym) {
      const Action& a = spec.entry(q, sym);
      os << '(' << q << ',' << sym << ") -> (" << int(a.write) << ','
         << (a.dir == Dir::Left ? 'L' : 'R') << ',' << int(a.next) << ")\n";
    }
  return os.str();
}

}  // namespace tmsweep
