#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tmsweep/simulator.hpp"

namespace tmsweep {

// Line-delimited result store. Header line, then one record per machine:
//   index output0 runtime0 space0 ... outputN runtimeN spaceN
// with single ASCII space separators, `\n` line ends, naturals as decimal
// strings and divergent slots as -1 in all three positions.
struct StoreHeader {
  int states = 0;
  std::uint64_t budget = 0;
  int inputs = 0;
  friend bool operator==(const StoreHeader&, const StoreHeader&) = default;
};

inline constexpr std::string_view kStoreMagic = "tmsweep v1";

inline std::string format_header(const StoreHeader& h) {
  return std::string(kStoreMagic) + " s=" + std::to_string(h.states) +
         " budget=" + std::to_string(h.budget) + " inputs=" + std::to_string(h.inputs);
}

inline std::optional<StoreHeader> parse_header(std::string_view line) {
  StoreHeader h;
  if (!line.starts_with(kStoreMagic)) return std::nullopt;
  line.remove_prefix(kStoreMagic.size());
  const auto take = [&](std::string_view key) -> std::optional<std::uint64_t> {
    if (!line.starts_with(key)) return std::nullopt;
    line.remove_prefix(key.size());
    std::uint64_t v = 0;
    const auto [p, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
    if (ec != std::errc()) return std::nullopt;
    line.remove_prefix(static_cast<std::size_t>(p - line.data()));
    return v;
  };
  const auto s = take(" s=");
  const auto b = take(" budget=");
  const auto n = take(" inputs=");
  if (!s || !b || !n || !line.empty()) return std::nullopt;
  h.states = static_cast<int>(*s);
  h.budget = *b;
  h.inputs = static_cast<int>(*n);
  if (h.states < 1 || h.inputs < 1 || h.budget < 1) return std::nullopt;
  return h;
}

inline void format_record(const MachineIndex& index, const FunctionProfile& p, std::string& out) {
  out += std::to_string(index.value);
  const int n = p.inputs();
  for (int x = 0; x < n; ++x) {
    if (p.divergent_at(x)) {
      out += " -1 -1 -1";
    } else {
      out += ' ';
      out += p.outputs[static_cast<std::size_t>(x)]->get_str();
      out += ' ';
      out += std::to_string(*p.runtimes[static_cast<std::size_t>(x)]);
      out += ' ';
      out += std::to_string(*p.spaces[static_cast<std::size_t>(x)]);
    }
  }
  out += '\n';
}

inline std::string format_record(const MachineIndex& index, const FunctionProfile& p) {
  std::string out;
  format_record(index, p, out);
  return out;
}

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (start <= line.size()) {
    const std::size_t sp = line.find(' ', start);
    if (sp == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, sp - start));
    start = sp + 1;
  }
  return fields;
}

inline bool parse_u64(std::string_view f, std::uint64_t& v) {
  const auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
  return ec == std::errc() && p == f.data() + f.size();
}

inline bool is_decimal(std::string_view f) {
  if (f.empty()) return false;
  for (char c : f)
    if (c < '0' || c > '9') return false;
  return true;
}

}  // namespace detail

inline FunctionProfile parse_record(std::string_view line, const StoreHeader& h) {
  const auto fields = detail::split_fields(line);
  if (fields.size() != 1 + 3 * static_cast<std::size_t>(h.inputs))
    throw std::runtime_error("store record: expected " +
                             std::to_string(1 + 3 * static_cast<std::size_t>(h.inputs)) +
                             " fields, got " + std::to_string(fields.size()));
  FunctionProfile p;
  std::uint64_t idx = 0;
  if (!detail::parse_u64(fields[0], idx)) throw std::runtime_error("store record: bad index");
  if (idx >= space_size(h.states)) throw std::runtime_error("store record: index out of range");
  p.machine = MachineIndex{idx, h.states};
  p.budget = h.budget;
  p.outputs.resize(static_cast<std::size_t>(h.inputs));
  p.runtimes.resize(static_cast<std::size_t>(h.inputs));
  p.spaces.resize(static_cast<std::size_t>(h.inputs));
  for (int x = 0; x < h.inputs; ++x) {
    const auto o = fields[static_cast<std::size_t>(1 + 3 * x)];
    const auto r = fields[static_cast<std::size_t>(2 + 3 * x)];
    const auto s = fields[static_cast<std::size_t>(3 + 3 * x)];
    const bool div = o == "-1";
    if (div) {
      if (r != "-1" || s != "-1")
        throw std::runtime_error("store record: divergent slot must be -1 in all three positions");
      continue;
    }
    if (!detail::is_decimal(o)) throw std::runtime_error("store record: bad output field");
    std::uint64_t rv = 0, sv = 0;
    if (!detail::parse_u64(r, rv) || !detail::parse_u64(s, sv))
      throw std::runtime_error("store record: bad runtime/space field");
    p.outputs[static_cast<std::size_t>(x)] = mpz_class(std::string(o), 10);
    p.runtimes[static_cast<std::size_t>(x)] = rv;
    p.spaces[static_cast<std::size_t>(x)] = sv;
  }
  return p;
}

// Streams a store file record by record; parse errors name the offending
// record number. Records must appear in strictly increasing index order.
class StoreReader {
 public:
  explicit StoreReader(const std::filesystem::path& path) : path_(path), in_(path) {
    if (!in_) throw std::runtime_error("store: cannot open " + path.string());
    std::string line;
    if (!std::getline(in_, line)) throw std::runtime_error("store: missing header in " + path.string());
    const auto h = parse_header(line);
    if (!h) throw std::runtime_error("store: bad header in " + path.string());
    header_ = *h;
  }

  const StoreHeader& header() const { return header_; }
  const std::filesystem::path& path() const { return path_; }

  // fn(record_number, line) over raw record lines, 1-based record numbers.
  template <class Fn>
  void for_each_line(Fn&& fn) {
    in_.clear();
    in_.seekg(0);
    std::string line;
    std::getline(in_, line);  // header
    std::uint64_t rec = 0;
    while (std::getline(in_, line)) {
      ++rec;
      fn(rec, std::string_view(line));
    }
    if (in_.bad()) throw std::runtime_error("store: read failure in " + path_.string());
  }

  template <class Fn>
  void for_each(Fn&& fn) {
    std::uint64_t prev_index = 0;
    bool first = true;
    for_each_line([&](std::uint64_t rec, std::string_view line) {
      FunctionProfile p;
      try {
        p = parse_record(line, header_);
      } catch (const std::exception& e) {
        throw std::runtime_error(path_.string() + ": record " + std::to_string(rec) + ": " +
                                 e.what());
      }
      if (!first && p.machine.value <= prev_index)
        throw std::runtime_error(path_.string() + ": record " + std::to_string(rec) +
                                 ": indices not in increasing order");
      first = false;
      prev_index = p.machine.value;
      fn(p);
    });
  }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  StoreHeader header_;
};

}  // namespace tmsweep
