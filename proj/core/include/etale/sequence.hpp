#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace etale {

using Symbol = int;
using Word = std::vector<Symbol>;

// A bi-infinite eventually periodic sequence x: Z -> {0..k-1}, in canonical
// form. Left of `lo` it follows the periodic word `left` (x_n = left[n mod |left|]),
// from max(lo, hi) on it follows `right`, and `core` covers [lo, hi) in between.
// Tails are primitive and the core is minimal, so equal sequences have equal
// representations. Globally periodic sequences have left == right, lo == hi == 0.
class SequencePoint {
 public:
  SequencePoint() : left_{0}, right_{0} {}

  // x_n = word[n mod |word|]
  static SequencePoint periodic(const Word& word);
  // x_n = core[n - start] on [start, start + |core|), left/right tails as above.
  static SequencePoint from_parts(const Word& left, std::int64_t start, const Word& core, const Word& right);

  Symbol at(std::int64_t n) const;
  // The sequence n -> x_{n+k}.
  SequencePoint shifted(std::int64_t k) const;

  bool is_periodic() const noexcept { return left_ == right_ && core_.empty() && lo_ == 0 && hi_ == 0; }
  // Smallest p > 0 with x shifted by p equal to x, if any.
  std::optional<std::int64_t> period() const;

  const Word& left() const noexcept { return left_; }
  const Word& right() const noexcept { return right_; }
  const Word& core() const noexcept { return core_; }
  std::int64_t lo() const noexcept { return lo_; }
  std::int64_t hi() const noexcept { return hi_; }
  // Smallest window [first, last] outside which x agrees with its tails.
  std::int64_t window_begin() const noexcept { return std::min(lo_, hi_); }
  std::int64_t window_end() const noexcept { return std::max(lo_, hi_); }

  std::string to_string() const;

  friend bool operator==(const SequencePoint&, const SequencePoint&) = default;
  friend auto operator<=>(const SequencePoint&, const SequencePoint&) = default;

 private:
  Word left_;
  Word right_;
  std::int64_t lo_ = 0;
  std::int64_t hi_ = 0;
  Word core_;
};

// Finite set of coordinate constraints {position -> symbol}; denotes the
// cylinder set of all sequences matching it.
struct Cylinder {
  std::map<std::int64_t, Symbol> symbols;

  bool empty() const noexcept { return symbols.empty(); }
  bool matches(const SequencePoint& x) const;
  // Positions move by +k: x matches translated(k) exactly when x.shifted(k)
  // matches this cylinder.
  Cylinder translated(std::int64_t k) const;
  std::optional<Cylinder> intersect(const Cylinder& other) const;
  std::int64_t min_position() const { return symbols.begin()->first; }
  std::int64_t max_position() const { return symbols.rbegin()->first; }
  std::string to_string() const;

  friend bool operator==(const Cylinder&, const Cylinder&) = default;
  friend auto operator<=>(const Cylinder&, const Cylinder&) = default;
};

// A shift of finite type over {0..k-1} given by forbidden words. Legality of
// words, points and cylinders is decided exactly on the de Bruijn graph of
// allowed blocks.
class Subshift {
 public:
  Subshift(int alphabet, std::vector<Word> forbidden);

  int alphabet() const noexcept { return alphabet_; }
  const std::vector<Word>& forbidden() const noexcept { return forbidden_; }
  bool is_full_shift() const noexcept { return forbidden_.empty(); }

  bool word_is_legal(const Word& w) const;
  bool point_is_legal(const SequencePoint& x) const;
  // The subshift has at least one point (the block graph has a cycle).
  bool is_nonempty() const;

  // A point of the subshift matching every constraint in `fixed` on the
  // window [from, to] (unconstrained positions are filled), or nullopt.
  std::optional<SequencePoint> complete(const Cylinder& fixed, std::int64_t from, std::int64_t to) const;
  bool is_consistent(const Cylinder& c) const;

  // All fillings of [from, to] that agree with `fixed` and extend to points of
  // the subshift, in lexicographic order; stops after `limit` words.
  std::vector<Word> legal_fillings(const Cylinder& fixed, std::int64_t from, std::int64_t to,
                                   std::size_t limit) const;

  // Periodic orbits consisting of isolated points, one primitive word per
  // orbit. Empty exactly when the subshift has no isolated points.
  const std::vector<Word>& isolated_orbits() const noexcept { return isolated_; }

 private:
  std::size_t block_length() const noexcept { return block_; }
  std::size_t state_of(const Word& w, std::size_t end) const;
  bool edge_allowed(std::size_t from, Symbol s) const;
  std::size_t next_state(std::size_t from, Symbol s) const;
  std::optional<SequencePoint> build_point(const Word& w, std::int64_t from) const;

  int alphabet_;
  std::vector<Word> forbidden_;
  std::size_t block_ = 1;  // state = last `block_` symbols
  std::size_t states_ = 1;
  std::vector<bool> state_legal_;
  std::vector<bool> reaches_cycle_;    // forward infinite path exists
  std::vector<bool> reached_by_cycle_; // backward infinite path exists
  std::vector<Word> isolated_;
};

}  // namespace etale
