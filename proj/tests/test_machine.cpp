#include "tmsweep/machine.hpp"

#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "tmsweep/simulator.hpp"

using namespace tmsweep;

TEST_CASE("space sizes match (4s)^(2s)") {
  CHECK(space_size(2) == 4096ull);
  CHECK(space_size(3) == 2985984ull);
  CHECK(space_size(4) == 4294967296ull);
}

TEST_CASE("index 0 decodes to the all-(0,L,1) table") {
  const MachineSpec m = decode_machine({0, 2});
  for (int q = 1; q <= 2; ++q)
    for (int sym = 0; sym < 2; ++sym) {
      CHECK(m.entry(q, sym).write == 0);
      CHECK(m.entry(q, sym).dir == Dir::Left);
      CHECK(m.entry(q, sym).next == 1);
    }
  CHECK(encode_machine(m).value == 0);
}

TEST_CASE("round trips at range edges") {
  CHECK(encode_machine(decode_machine({4095, 2})).value == 4095ull);
  CHECK(encode_machine(decode_machine({123456, 3})).value == 123456ull);
}

TEST_CASE("decode rejects out-of-range indices") {
  CHECK_THROWS_AS(decode_machine({4096, 2}), std::out_of_range);
  CHECK_THROWS_AS(decode_machine({space_size(3), 3}), std::out_of_range);
}

TEST_CASE("encode rejects malformed tables") {
  MachineSpec m = decode_machine({17, 2});
  m.entry(1, 0).next = 3;  // state out of range for s=2
  CHECK_THROWS_AS(encode_machine(m), std::invalid_argument);
}

TEST_CASE("encode/decode round trip on random indices") {
  std::mt19937_64 rng(42);
  for (int s = 2; s <= 4; ++s) {
    const std::uint64_t size = space_size(s);
    for (int i = 0; i < 1000; ++i) {
      const std::uint64_t v = rng() % size;
      CHECK(encode_machine(decode_machine({v, s})).value == v);
    }
  }
}

TEST_CASE("twin is the identity for s=2") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 100; ++i) {
    const MachineSpec m = decode_machine({rng() % space_size(2), 2});
    CHECK(twin_of(m) == m);
  }
}

TEST_CASE("twin is an involution") {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 300; ++i) {
    const MachineSpec m = decode_machine({rng() % space_size(3), 3});
    CHECK(twin_of(twin_of(m)) == m);
  }
}

TEST_CASE("twins compute identical profiles") {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 50; ++i) {
    const MachineSpec m = decode_machine({rng() % space_size(3), 3});
    const MachineSpec t = twin_of(m);
    const FunctionProfile pm = profile(m, 1000, 6);
    const FunctionProfile pt = profile(t, 1000, 6);
    REQUIRE(pm.inputs() == pt.inputs());
    for (int x = 0; x < 6; ++x) {
      CHECK(pm.outputs[x] == pt.outputs[x]);
      CHECK(pm.runtimes[x] == pt.runtimes[x]);
      CHECK(pm.spaces[x] == pt.spaces[x]);
    }
  }
}

TEST_CASE("canonical_index is idempotent and minimal") {
  CHECK(canonical_index({0, 3}).value == 0);
  std::mt19937_64 rng(10);
  for (int i = 0; i < 300; ++i) {
    const MachineIndex idx{rng() % space_size(3), 3};
    const MachineIndex c = canonical_index(idx);
    CHECK(canonical_index(c) == c);
    CHECK(c.value <= idx.value);
  }
}

TEST_CASE("twin pairing partitions (3,2)") {
  // Brute force over the whole space: every machine is either its own twin or
  // one half of a distinct pair, so self-twins + 2*pairs = (4*3)^6.
  std::uint64_t self = 0, pairs = 0;
  const std::uint64_t size = space_size(3);
  for (std::uint64_t v = 0; v < size; ++v) {
    const MachineSpec m = decode_machine({v, 3});
    const std::uint64_t t = encode_machine(twin_of(m)).value;
    if (t == v)
      ++self;
    else if (t > v)
      ++pairs;
  }
  CHECK(self + 2 * pairs == size);
  // canonical representatives = self-twins + one per pair
  CHECK(self + pairs > 0);
}

TEST_CASE("pretty printer emits one line per entry") {
  const std::string s = pretty_print(decode_machine({0, 2}));
  CHECK(s == "(1,0) -> (0,L,1)\n(1,1) -> (0,L,1)\n(2,0) -> (0,L,1)\n(2,1) -> (0,L,1)\n");
}
