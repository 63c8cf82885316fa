#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

#include "tmsweep/simulator.hpp"

namespace tmsweep {

// The known slots of one integer sequence: strictly increasing indices with
// nonnegative values. The complement of the divergence markers of a profile
// sequence.
struct KnownPoint {
  int index = 0;
  mpz_class value;
  friend bool operator==(const KnownPoint&, const KnownPoint&) = default;
};
using KnownPoints = std::vector<KnownPoint>;

inline KnownPoints known_points(const std::vector<std::optional<mpz_class>>& seq) {
  KnownPoints pts;
  for (std::size_t i = 0; i < seq.size(); ++i)
    if (seq[i]) pts.push_back({static_cast<int>(i), *seq[i]});
  return pts;
}

inline KnownPoints known_points(const std::vector<std::optional<std::uint64_t>>& seq) {
  KnownPoints pts;
  for (std::size_t i = 0; i < seq.size(); ++i)
    if (seq[i]) pts.push_back({static_cast<int>(i), mpz_class(static_cast<unsigned long>(*seq[i]))});
  return pts;
}

struct PredictorConfig {
  int max_poly_degree = 6;
  int max_recurrence_order = 5;
  int min_validation_points = 3;
  int tail_window = 10;       // second-pass mode only
  bool allow_parity_split = true;
  int indices = kProfileInputs;  // models must evaluate on 0..indices-1
};

enum class ModelFamily { Constant, Polynomial, CFiniteRecurrence, ParitySplit, TailWindowed };

// A closed-form generator fitted to a partial integer sequence. Every
// accepted model evaluates to an exact nonnegative integer on each index of
// the range it was certified for; there is no partially-evaluating state.
class SequenceModel {
 public:
  static SequenceModel constant(mpz_class v) {
    SequenceModel m(ModelFamily::Constant);
    m.z_.push_back(std::move(v));
    return m;
  }

  // coefficients in ascending powers
  static SequenceModel polynomial(std::vector<mpq_class> coeffs) {
    SequenceModel m(ModelFamily::Polynomial);
    m.q_ = std::move(coeffs);
    for (auto& c : m.q_) c.canonicalize();
    return m;
  }

  // a(n) = coeffs[0]*a(n-1) + ... + coeffs[r-1]*a(n-r) + add, anchored by
  // initial terms at indices base..base+r-1
  static SequenceModel recurrence(int base, std::vector<mpz_class> initials,
                                  std::vector<mpq_class> coeffs, mpq_class add) {
    if (initials.size() != coeffs.size() || coeffs.empty())
      throw std::invalid_argument("recurrence: order mismatch");
    SequenceModel m(ModelFamily::CFiniteRecurrence);
    m.base_ = base;
    m.z_ = std::move(initials);
    m.q_ = std::move(coeffs);
    for (auto& c : m.q_) c.canonicalize();
    add.canonicalize();
    m.q_.push_back(std::move(add));
    return m;
  }

  static SequenceModel parity_split(SequenceModel even, SequenceModel odd) {
    SequenceModel m(ModelFamily::ParitySplit);
    m.kids_.push_back(std::make_shared<SequenceModel>(std::move(even)));
    m.kids_.push_back(std::make_shared<SequenceModel>(std::move(odd)));
    return m;
  }

  static SequenceModel tail_windowed(SequenceModel inner, int window_start) {
    SequenceModel m(ModelFamily::TailWindowed);
    m.base_ = window_start;
    m.kids_.push_back(std::make_shared<SequenceModel>(std::move(inner)));
    return m;
  }

  ModelFamily family() const { return family_; }
  int window_start() const { return base_; }  // TailWindowed
  int order() const {                         // CFiniteRecurrence
    return static_cast<int>(z_.size());
  }

  // Exact value at index n (of the original sequence). Throws
  // std::domain_error where the model is undefined; fit-time certification
  // rules that out inside the certified range.
  mpz_class eval(int n) const {
    const mpq_class q = eval_rational(n);
    if (q.get_den() != 1) throw std::domain_error("model value is not an integer");
    return q.get_num();
  }

  mpq_class eval_rational(int n) const {
    switch (family_) {
      case ModelFamily::Constant:
        return mpq_class(z_[0]);
      case ModelFamily::Polynomial: {
        mpq_class acc = 0;
        const mpq_class x(n);
        for (std::size_t i = q_.size(); i-- > 0;) acc = acc * x + q_[i];
        return acc;
      }
      case ModelFamily::CFiniteRecurrence:
        return eval_recurrence(n);
      case ModelFamily::ParitySplit:
        return n % 2 == 0 ? kids_[0]->eval_rational(n / 2) : kids_[1]->eval_rational((n - 1) / 2);
      case ModelFamily::TailWindowed:
        return kids_[0]->eval_rational(n);
    }
    throw std::logic_error("unreachable");
  }

  std::string to_text() const {
    switch (family_) {
      case ModelFamily::Constant:
        return "const " + z_[0].get_str();
      case ModelFamily::Polynomial: {
        std::string s = "poly";
        for (const auto& c : q_) s += ' ' + c.get_str();
        return s;
      }
      case ModelFamily::CFiniteRecurrence: {
        const int r = order();
        std::string s = "rec base=" + std::to_string(base_);
        s += " add=" + q_[static_cast<std::size_t>(r)].get_str();
        s += " coeffs=";
        for (int i = 0; i < r; ++i) s += (i ? "," : "") + q_[static_cast<std::size_t>(i)].get_str();
        s += " init=";
        for (int i = 0; i < r; ++i) s += (i ? "," : "") + z_[static_cast<std::size_t>(i)].get_str();
        return s;
      }
      case ModelFamily::ParitySplit:
        return "parity even=(" + kids_[0]->to_text() + ") odd=(" + kids_[1]->to_text() + ")";
      case ModelFamily::TailWindowed:
        return "tail start=" + std::to_string(base_) + " inner=(" + kids_[0]->to_text() + ")";
    }
    throw std::logic_error("unreachable");
  }

  static std::optional<SequenceModel> parse(std::string_view text);

  friend bool operator==(const SequenceModel& a, const SequenceModel& b) {
    if (a.family_ != b.family_ || a.base_ != b.base_ || a.q_ != b.q_ || a.z_ != b.z_ ||
        a.kids_.size() != b.kids_.size())
      return false;
    for (std::size_t i = 0; i < a.kids_.size(); ++i)
      if (!(*a.kids_[i] == *b.kids_[i])) return false;
    return true;
  }

 private:
  explicit SequenceModel(ModelFamily f) : family_(f) {}

  mpq_class eval_recurrence(int n) const {
    const int r = order();
    const mpq_class& add = q_[static_cast<std::size_t>(r)];
    if (n >= base_ && n < base_ + r) return mpq_class(z_[static_cast<std::size_t>(n - base_)]);
    std::vector<mpq_class> win;
    win.reserve(static_cast<std::size_t>(r));
    for (const auto& t : z_) win.emplace_back(t);
    if (n >= base_ + r) {
      // forward unroll: win holds a(m-r..m-1)
      for (int m = base_ + r; m <= n; ++m) {
        mpq_class v = add;
        for (int j = 1; j <= r; ++j) v += q_[static_cast<std::size_t>(j - 1)] * win[static_cast<std::size_t>(r - j)];
        win.erase(win.begin());
        win.push_back(std::move(v));
      }
      return win.back();
    }
    // backward unroll: a(m) = (a(m+r) - add - sum_{j<r} c_j a(m+r-j)) / c_r
    const mpq_class& cr = q_[static_cast<std::size_t>(r - 1)];
    if (cr == 0) throw std::domain_error("recurrence does not extend backward");
    for (int m = base_ - 1; m >= n; --m) {
      // win holds a(m+1..m+r)
      mpq_class v = win[static_cast<std::size_t>(r - 1)];  // a(m+r)
      v -= add;
      for (int j = 1; j < r; ++j) v -= q_[static_cast<std::size_t>(j - 1)] * win[static_cast<std::size_t>(r - 1 - j)];
      v /= cr;
      win.pop_back();
      win.insert(win.begin(), std::move(v));
    }
    return win.front();
  }

  ModelFamily family_;
  std::vector<mpq_class> q_;
  std::vector<mpz_class> z_;
  int base_ = 0;
  std::vector<std::shared_ptr<const SequenceModel>> kids_;
};

namespace detail {

// Gaussian elimination over exact rationals; false when singular.
inline bool solve_exact(std::vector<std::vector<mpq_class>> a, std::vector<mpq_class> y,
                        std::vector<mpq_class>& x) {
  const std::size_t n = a.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && a[pivot][col] == 0) ++pivot;
    if (pivot == n) return false;
    std::swap(a[pivot], a[col]);
    std::swap(y[pivot], y[col]);
    for (std::size_t row = col + 1; row < n; ++row) {
      if (a[row][col] == 0) continue;
      const mpq_class f = a[row][col] / a[col][col];
      for (std::size_t k = col; k < n; ++k) a[row][k] -= f * a[col][k];
      y[row] -= f * y[col];
    }
  }
  x.assign(n, mpq_class(0));
  for (std::size_t row = n; row-- > 0;) {
    mpq_class acc = y[row];
    for (std::size_t k = row + 1; k < n; ++k) acc -= a[row][k] * x[k];
    x[row] = acc / a[row][row];
    x[row].canonicalize();
  }
  return true;
}

struct FitResult {
  SequenceModel model;
  int points_used;
};

// Accepts a candidate iff it reproduces every known point exactly and yields a
// nonnegative integer on every index of [lo, hi].
inline bool certify(const SequenceModel& m, const KnownPoints& pts, int lo, int hi) {
  std::size_t next = 0;
  for (int n = lo; n <= hi; ++n) {
    mpq_class v;
    try {
      v = m.eval_rational(n);
    } catch (const std::domain_error&) {
      return false;
    }
    v.canonicalize();
    if (v.get_den() != 1 || v < 0) return false;
    if (next < pts.size() && pts[next].index == n) {
      if (v.get_num() != pts[next].value) return false;
      ++next;
    }
  }
  return next == pts.size();  // every known point lay inside [lo, hi]
}

inline int leading_run_length(const KnownPoints& pts) {
  int len = 1;
  while (len < static_cast<int>(pts.size()) && pts[static_cast<std::size_t>(len)].index == pts[0].index + len)
    ++len;
  return len;
}

inline std::optional<FitResult> fit_lattice(const KnownPoints& pts, const PredictorConfig& cfg,
                                            int lo, int hi, bool allow_parity, int min_spare);

inline std::optional<FitResult> fit_parity(const KnownPoints& pts, const PredictorConfig& cfg,
                                           int lo, int hi) {
  KnownPoints even, odd;
  for (const auto& p : pts) {
    if (p.index % 2 == 0)
      even.push_back({p.index / 2, p.value});
    else
      odd.push_back({(p.index - 1) / 2, p.value});
  }
  if (even.size() < 2 || odd.size() < 2) return std::nullopt;
  // branch index ranges covering the even/odd indices of [lo, hi]
  const int even_lo = (lo + 1) / 2, even_hi = hi / 2;
  const int odd_lo = lo / 2, odd_hi = (hi - 1) / 2;
  if (even_lo > even_hi || odd_lo > odd_hi) return std::nullopt;
  const auto fe = fit_lattice(even, cfg, even_lo, even_hi, false, 1);
  if (!fe) return std::nullopt;
  const auto fo = fit_lattice(odd, cfg, odd_lo, odd_hi, false, 1);
  if (!fo) return std::nullopt;
  // validation points are pooled across the two branches
  const int spare = static_cast<int>(even.size()) - fe->points_used +
                    static_cast<int>(odd.size()) - fo->points_used;
  if (spare < cfg.min_validation_points) return std::nullopt;
  return FitResult{SequenceModel::parity_split(fe->model, fo->model),
                   fe->points_used + fo->points_used};
}

// Families in fixed order: constant, polynomial of rising degree, linear
// recurrence of rising order (homogeneous before affine), then parity split.
// Each candidate is fitted on the minimal prefix of known points that
// determines its parameters and must leave at least min_spare known points
// for validation. The first certified candidate wins.
inline std::optional<FitResult> fit_lattice(const KnownPoints& pts, const PredictorConfig& cfg,
                                            int lo, int hi, bool allow_parity, int min_spare) {
  const int k = static_cast<int>(pts.size());

  if (k - 1 >= min_spare && pts[0].value >= 0) {
    SequenceModel m = SequenceModel::constant(pts[0].value);
    if (certify(m, pts, lo, hi)) return FitResult{std::move(m), 1};
  }

  for (int d = 1; d <= cfg.max_poly_degree; ++d) {
    const int used = d + 1;
    if (k - used < min_spare || used > k) continue;
    // Newton divided differences on the first d+1 points, expanded to
    // monomial coefficients
    std::vector<mpq_class> xs, dd;
    for (int i = 0; i < used; ++i) {
      xs.emplace_back(pts[static_cast<std::size_t>(i)].index);
      dd.emplace_back(pts[static_cast<std::size_t>(i)].value);
    }
    for (int level = 1; level < used; ++level)
      for (int i = used - 1; i >= level; --i) {
        const mpq_class den = xs[static_cast<std::size_t>(i)] - xs[static_cast<std::size_t>(i - level)];
        dd[static_cast<std::size_t>(i)] = (dd[static_cast<std::size_t>(i)] - dd[static_cast<std::size_t>(i - 1)]) / den;
      }
    std::vector<mpq_class> coeffs{dd[0]};
    std::vector<mpq_class> basis{mpq_class(1)};  // prod (x - xs[j]) in monomial form
    for (int i = 1; i < used; ++i) {
      basis.push_back(mpq_class(0));
      for (std::size_t j = basis.size() - 1; j > 0; --j)
        basis[j] = basis[j - 1] - xs[static_cast<std::size_t>(i - 1)] * basis[j];
      basis[0] = -xs[static_cast<std::size_t>(i - 1)] * basis[0];
      if (coeffs.size() < basis.size()) coeffs.resize(basis.size(), mpq_class(0));
      for (std::size_t j = 0; j < basis.size(); ++j) coeffs[j] += dd[static_cast<std::size_t>(i)] * basis[j];
    }
    for (auto& c : coeffs) c.canonicalize();
    SequenceModel m = SequenceModel::polynomial(std::move(coeffs));
    if (certify(m, pts, lo, hi)) return FitResult{std::move(m), used};
  }

  const int run = leading_run_length(pts);
  const int base = pts[0].index;
  for (int r = 1; r <= cfg.max_recurrence_order; ++r) {
    for (int affine = 0; affine <= 1; ++affine) {
      const int unknowns = r + affine;
      const int used = r + unknowns;  // r initial terms + one equation per unknown
      if (used > run || k - used < min_spare) continue;
      std::vector<std::vector<mpq_class>> a;
      std::vector<mpq_class> y;
      for (int t = 0; t < unknowns; ++t) {
        std::vector<mpq_class> row;
        for (int j = 1; j <= r; ++j)
          row.emplace_back(pts[static_cast<std::size_t>(r + t - j)].value);
        if (affine) row.emplace_back(1);
        a.push_back(std::move(row));
        y.emplace_back(pts[static_cast<std::size_t>(r + t)].value);
      }
      std::vector<mpq_class> sol;
      if (!solve_exact(std::move(a), std::move(y), sol)) continue;
      std::vector<mpq_class> coeffs(sol.begin(), sol.begin() + r);
      const mpq_class add = affine ? sol[static_cast<std::size_t>(r)] : mpq_class(0);
      std::vector<mpz_class> initials;
      for (int i = 0; i < r; ++i) initials.push_back(pts[static_cast<std::size_t>(i)].value);
      SequenceModel m = SequenceModel::recurrence(base, std::move(initials), std::move(coeffs), add);
      if (certify(m, pts, lo, hi)) return FitResult{std::move(m), used};
    }
  }

  if (allow_parity && cfg.allow_parity_split) return fit_parity(pts, cfg, lo, hi);
  return std::nullopt;
}

}  // namespace detail

// Fit-then-validate over the whole sequence history. NoModel (nullopt) is a
// value, not an error.
inline std::optional<SequenceModel> find_model(const KnownPoints& pts,
                                               const PredictorConfig& cfg = {}) {
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].value < 0) throw std::invalid_argument("known points: negative value");
    if (i > 0 && pts[i].index <= pts[i - 1].index)
      throw std::invalid_argument("known points: indices must be strictly increasing");
  }
  if (pts.size() < 2) return std::nullopt;
  auto fit = detail::fit_lattice(pts, cfg, 0, cfg.indices - 1, cfg.allow_parity_split,
                                 cfg.min_validation_points);
  if (!fit) return std::nullopt;
  return std::move(fit->model);
}

// Second-pass mode: find_model restricted to the last tail_window known
// points. The result is only certified for indices at or beyond the window
// start and must only be used to complete slots there.
inline std::optional<SequenceModel> fit_tail(const KnownPoints& pts,
                                             const PredictorConfig& cfg = {}) {
  if (pts.size() < 2) return std::nullopt;
  const std::size_t w = std::min(pts.size(), static_cast<std::size_t>(cfg.tail_window));
  const KnownPoints window(pts.end() - static_cast<std::ptrdiff_t>(w), pts.end());
  const int start = window.front().index;
  auto fit = detail::fit_lattice(window, cfg, start, cfg.indices - 1, cfg.allow_parity_split,
                                 cfg.min_validation_points);
  if (!fit) return std::nullopt;
  return SequenceModel::tail_windowed(std::move(fit->model), start);
}

// --- canonical text form ----------------------------------------------------

namespace detail {

inline std::optional<std::string_view> paren_group(std::string_view s, std::string_view key,
                                                   std::size_t& after) {
  const std::size_t at = s.find(key);
  if (at == std::string_view::npos) return std::nullopt;
  std::size_t i = at + key.size();
  int depth = 1;
  const std::size_t start = i;
  while (i < s.size() && depth > 0) {
    if (s[i] == '(') ++depth;
    if (s[i] == ')') --depth;
    ++i;
  }
  if (depth != 0) return std::nullopt;
  after = i;
  return s.substr(start, i - 1 - start);
}

inline std::vector<std::string> split_list(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t at = s.find(sep, start);
    if (at == std::string_view::npos) {
      out.emplace_back(s.substr(start));
      break;
    }
    out.emplace_back(s.substr(start, at - start));
    start = at + 1;
  }
  return out;
}

}  // namespace detail

inline std::optional<SequenceModel> SequenceModel::parse(std::string_view text) {
  try {
    if (text.starts_with("const ")) {
      return SequenceModel::constant(mpz_class(std::string(text.substr(6)), 10));
    }
    if (text.starts_with("poly ")) {
      std::vector<mpq_class> coeffs;
      for (const auto& tok : detail::split_list(text.substr(5), ' ')) {
        if (tok.empty()) return std::nullopt;
        mpq_class c(tok, 10);
        c.canonicalize();
        coeffs.push_back(std::move(c));
      }
      if (coeffs.empty()) return std::nullopt;
      return SequenceModel::polynomial(std::move(coeffs));
    }
    if (text.starts_with("rec ")) {
      std::string_view s = text.substr(4);
      if (!s.starts_with("base=")) return std::nullopt;
      std::size_t sp = s.find(' ');
      const int base = std::stoi(std::string(s.substr(5, sp - 5)));
      s.remove_prefix(sp + 1);
      if (!s.starts_with("add=")) return std::nullopt;
      sp = s.find(' ');
      mpq_class add(std::string(s.substr(4, sp - 4)), 10);
      add.canonicalize();
      s.remove_prefix(sp + 1);
      if (!s.starts_with("coeffs=")) return std::nullopt;
      sp = s.find(' ');
      std::vector<mpq_class> coeffs;
      for (const auto& tok : detail::split_list(s.substr(7, sp - 7), ',')) {
        mpq_class c(tok, 10);
        c.canonicalize();
        coeffs.push_back(std::move(c));
      }
      s.remove_prefix(sp + 1);
      if (!s.starts_with("init=")) return std::nullopt;
      std::vector<mpz_class> init;
      for (const auto& tok : detail::split_list(s.substr(5), ','))
        init.emplace_back(tok, 10);
      if (init.size() != coeffs.size()) return std::nullopt;
      return SequenceModel::recurrence(base, std::move(init), std::move(coeffs), add);
    }
    if (text.starts_with("parity ")) {
      std::size_t after = 0;
      const auto even = detail::paren_group(text, "even=(", after);
      if (!even) return std::nullopt;
      const auto odd = detail::paren_group(text.substr(after), "odd=(", after);
      if (!odd) return std::nullopt;
      auto me = parse(*even);
      auto mo = parse(*odd);
      if (!me || !mo) return std::nullopt;
      return SequenceModel::parity_split(std::move(*me), std::move(*mo));
    }
    if (text.starts_with("tail ")) {
      std::string_view s = text.substr(5);
      if (!s.starts_with("start=")) return std::nullopt;
      const std::size_t sp = s.find(' ');
      const int start = std::stoi(std::string(s.substr(6, sp - 6)));
      std::size_t after = 0;
      const auto inner = detail::paren_group(s, "inner=(", after);
      if (!inner) return std::nullopt;
      auto mi = parse(*inner);
      if (!mi) return std::nullopt;
      return SequenceModel::tail_windowed(std::move(*mi), start);
    }
  } catch (const std::exception&) {
    return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace tmsweep
