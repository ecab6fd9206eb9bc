#include "etale/sequence.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>

#include "etale/error.hpp"

namespace etale {

namespace {

std::int64_t floor_mod(std::int64_t a, std::int64_t n) {
  const std::int64_t r = a % n;
  return r < 0 ? r + n : r;
}

Word primitive_root(const Word& w) {
  const std::size_t n = w.size();
  for (std::size_t p = 1; p < n; ++p) {
    if (n % p != 0) continue;
    bool ok = true;
    for (std::size_t i = p; i < n && ok; ++i) ok = w[i] == w[i % p];
    if (ok) return Word(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(p));
  }
  return w;
}

Symbol periodic_at(const Word& w, std::int64_t n) {
  return w[static_cast<std::size_t>(floor_mod(n, static_cast<std::int64_t>(w.size())))];
}

Word rotated(const Word& w, std::int64_t k) {
  Word out(w.size());
  for (std::size_t j = 0; j < w.size(); ++j) out[j] = periodic_at(w, static_cast<std::int64_t>(j) + k);
  return out;
}

std::string word_string(const Word& w) {
  std::string s;
  for (auto c : w) s += std::to_string(c) + (c > 9 ? "," : "");
  return s;
}

}  // namespace

SequencePoint SequencePoint::periodic(const Word& word) {
  if (word.empty()) throw Error(ErrorKind::InvalidArgument, "periodic word must be nonempty");
  SequencePoint x;
  x.left_ = primitive_root(word);
  x.right_ = x.left_;
  x.lo_ = x.hi_ = 0;
  x.core_.clear();
  return x;
}

SequencePoint SequencePoint::from_parts(const Word& left_in, std::int64_t start, const Word& core_in,
                                        const Word& right_in) {
  if (left_in.empty() || right_in.empty()) {
    throw Error(ErrorKind::InvalidArgument, "sequence tails must be nonempty");
  }
  const Word left = primitive_root(left_in);
  const Word right = primitive_root(right_in);
  const auto end = start + static_cast<std::int64_t>(core_in.size());
  auto raw = [&](std::int64_t n) -> Symbol {
    if (n < start) return periodic_at(left, n);
    if (n < end) return core_in[static_cast<std::size_t>(n - start)];
    return periodic_at(right, n);
  };
  SequencePoint x;
  x.left_ = left;
  x.right_ = right;
  if (left == right) {
    std::int64_t first = 0, last = -1;
    bool any = false;
    for (std::int64_t n = start; n < end; ++n) {
      if (raw(n) != periodic_at(left, n)) {
        if (!any) first = n;
        last = n;
        any = true;
      }
    }
    if (!any) return periodic(left);
    x.lo_ = first;
    x.hi_ = last + 1;
  } else {
    const std::int64_t span =
        std::lcm(static_cast<std::int64_t>(left.size()), static_cast<std::int64_t>(right.size()));
    std::int64_t a = end + span;
    for (std::int64_t n = start; n < end + span; ++n) {
      if (raw(n) != periodic_at(left, n)) {
        a = n;
        break;
      }
    }
    std::int64_t b = start - span;
    for (std::int64_t n = end - 1; n >= start - span; --n) {
      if (raw(n) != periodic_at(right, n)) {
        b = n + 1;
        break;
      }
    }
    x.lo_ = a;
    x.hi_ = b;
  }
  for (std::int64_t n = x.lo_; n < x.hi_; ++n) x.core_.push_back(raw(n));
  return x;
}

Symbol SequencePoint::at(std::int64_t n) const {
  if (n < lo_) return periodic_at(left_, n);
  if (n >= std::max(lo_, hi_)) return periodic_at(right_, n);
  return core_[static_cast<std::size_t>(n - lo_)];
}

SequencePoint SequencePoint::shifted(std::int64_t k) const {
  if (is_periodic()) return periodic(rotated(left_, k));
  return from_parts(rotated(left_, k), lo_ - k, core_, rotated(right_, k));
}

std::optional<std::int64_t> SequencePoint::period() const {
  if (is_periodic()) return static_cast<std::int64_t>(left_.size());
  return std::nullopt;
}

std::string SequencePoint::to_string() const {
  std::ostringstream os;
  if (is_periodic()) {
    os << "(" << word_string(left_) << ")^Z";
    return os.str();
  }
  os << "(" << word_string(left_) << ")^-|" << lo_ << ":" << word_string(core_) << "|" << hi_ << ":("
     << word_string(right_) << ")^+";
  return os.str();
}

bool Cylinder::matches(const SequencePoint& x) const {
  for (const auto& [p, s] : symbols) {
    if (x.at(p) != s) return false;
  }
  return true;
}

Cylinder Cylinder::translated(std::int64_t k) const {
  Cylinder out;
  for (const auto& [p, s] : symbols) out.symbols.emplace(p + k, s);
  return out;
}

std::optional<Cylinder> Cylinder::intersect(const Cylinder& other) const {
  Cylinder out = *this;
  for (const auto& [p, s] : other.symbols) {
    auto [it, inserted] = out.symbols.emplace(p, s);
    if (!inserted && it->second != s) return std::nullopt;
  }
  return out;
}

std::string Cylinder::to_string() const {
  std::ostringstream os;
  os << "[";
  bool first = true;
  for (const auto& [p, s] : symbols) {
    os << (first ? "" : ",") << p << ":" << s;
    first = false;
  }
  os << "]";
  return os.str();
}

// ---------------------------------------------------------------------------

Subshift::Subshift(int alphabet, std::vector<Word> forbidden) : alphabet_(alphabet), forbidden_(std::move(forbidden)) {
  if (alphabet_ < 1) throw Error(ErrorKind::MalformedSpec, "alphabet size must be >= 1");
  std::size_t longest = 1;
  for (const auto& w : forbidden_) {
    if (w.empty()) throw Error(ErrorKind::MalformedSpec, "forbidden words must be nonempty");
    for (auto s : w) {
      if (s < 0 || s >= alphabet_) throw Error(ErrorKind::MalformedSpec, "forbidden word uses a symbol outside the alphabet");
    }
    longest = std::max(longest, w.size());
  }
  block_ = std::max<std::size_t>(longest - 1, 1);
  states_ = 1;
  for (std::size_t i = 0; i < block_; ++i) {
    states_ *= static_cast<std::size_t>(alphabet_);
    if (states_ > (std::size_t{1} << 22)) {
      throw Error(ErrorKind::MalformedSpec, "subshift block graph too large (alphabet^(L-1) > 2^22)");
    }
  }
  state_legal_.assign(states_, false);
  for (std::size_t s = 0; s < states_; ++s) {
    Word w(block_);
    std::size_t v = s;
    for (std::size_t i = block_; i-- > 0;) {
      w[i] = static_cast<Symbol>(v % static_cast<std::size_t>(alphabet_));
      v /= static_cast<std::size_t>(alphabet_);
    }
    state_legal_[s] = word_is_legal(w);
  }
  // prune to states on bi-infinite paths
  reaches_cycle_ = state_legal_;
  reached_by_cycle_ = state_legal_;
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t s = 0; s < states_; ++s) {
      if (!reaches_cycle_[s]) continue;
      bool any = false;
      for (Symbol a = 0; a < alphabet_ && !any; ++a) any = edge_allowed(s, a) && reaches_cycle_[next_state(s, a)];
      if (!any) {
        reaches_cycle_[s] = false;
        changed = true;
      }
    }
  }
  for (bool changed = true; changed;) {
    changed = false;
    std::vector<bool> has_pred(states_, false);
    for (std::size_t s = 0; s < states_; ++s) {
      if (!reached_by_cycle_[s]) continue;
      for (Symbol a = 0; a < alphabet_; ++a) {
        if (edge_allowed(s, a)) has_pred[next_state(s, a)] = true;
      }
    }
    for (std::size_t s = 0; s < states_; ++s) {
      if (reached_by_cycle_[s] && !has_pred[s]) {
        reached_by_cycle_[s] = false;
        changed = true;
      }
    }
  }
  // A point is isolated exactly when its path runs around an essential cycle
  // with no essential edge entering or leaving it.
  std::vector<bool> essential(states_);
  for (std::size_t s = 0; s < states_; ++s) essential[s] = reaches_cycle_[s] && reached_by_cycle_[s];
  std::vector<int> out_degree(states_, 0), in_degree(states_, 0);
  std::vector<Symbol> only_symbol(states_, 0);
  for (std::size_t s = 0; s < states_; ++s) {
    if (!essential[s]) continue;
    for (Symbol a = 0; a < alphabet_; ++a) {
      if (!edge_allowed(s, a) || !essential[next_state(s, a)]) continue;
      ++out_degree[s];
      ++in_degree[next_state(s, a)];
      only_symbol[s] = a;
    }
  }
  std::vector<bool> seen(states_, false);
  for (std::size_t s0 = 0; s0 < states_; ++s0) {
    if (!essential[s0] || seen[s0] || out_degree[s0] != 1 || in_degree[s0] != 1) continue;
    Word w;
    std::vector<std::size_t> path;
    std::size_t s = s0;
    bool ok = true;
    do {
      if (seen[s] || out_degree[s] != 1 || in_degree[s] != 1) {
        ok = false;
        break;
      }
      seen[s] = true;
      path.push_back(s);
      w.push_back(only_symbol[s]);
      s = next_state(s, only_symbol[s]);
    } while (s != s0);
    if (!ok) {
      for (auto t : path) seen[t] = false;
      seen[s0] = true;
      continue;
    }
    isolated_.push_back(w);
  }
}

bool Subshift::word_is_legal(const Word& w) const {
  for (const auto& f : forbidden_) {
    if (f.size() > w.size()) continue;
    if (std::search(w.begin(), w.end(), f.begin(), f.end()) != w.end()) return false;
  }
  for (auto s : w) {
    if (s < 0 || s >= alphabet_) return false;
  }
  return true;
}

std::size_t Subshift::state_of(const Word& w, std::size_t end) const {
  std::size_t v = 0;
  for (std::size_t i = end - block_; i < end; ++i) v = v * static_cast<std::size_t>(alphabet_) + static_cast<std::size_t>(w[i]);
  return v;
}

std::size_t Subshift::next_state(std::size_t from, Symbol s) const {
  return (from * static_cast<std::size_t>(alphabet_) + static_cast<std::size_t>(s)) % states_;
}

bool Subshift::edge_allowed(std::size_t from, Symbol s) const {
  if (!state_legal_[from]) return false;
  const std::size_t to = next_state(from, s);
  if (!state_legal_[to]) return false;
  Word w(block_ + 1);
  std::size_t v = from;
  for (std::size_t i = block_; i-- > 0;) {
    w[i] = static_cast<Symbol>(v % static_cast<std::size_t>(alphabet_));
    v /= static_cast<std::size_t>(alphabet_);
  }
  w[block_] = s;
  return word_is_legal(w);
}

bool Subshift::is_nonempty() const {
  for (std::size_t s = 0; s < states_; ++s) {
    if (reaches_cycle_[s] && reached_by_cycle_[s]) return true;
  }
  return false;
}

bool Subshift::point_is_legal(const SequencePoint& x) const {
  for (auto s : x.left()) {
    if (s < 0 || s >= alphabet_) return false;
  }
  for (auto s : x.right()) {
    if (s < 0 || s >= alphabet_) return false;
  }
  for (auto s : x.core()) {
    if (s < 0 || s >= alphabet_) return false;
  }
  std::int64_t longest = 1;
  for (const auto& f : forbidden_) longest = std::max<std::int64_t>(longest, static_cast<std::int64_t>(f.size()));
  const std::int64_t from = x.window_begin() - longest - static_cast<std::int64_t>(x.left().size());
  const std::int64_t to = x.window_end() + longest + static_cast<std::int64_t>(x.right().size());
  Word w;
  for (std::int64_t n = from; n <= to; ++n) w.push_back(x.at(n));
  return word_is_legal(w);
}

std::optional<SequencePoint> Subshift::build_point(const Word& w, std::int64_t from) const {
  // w has length >= block_, its first state is reached by a cycle and its last
  // state reaches one.
  const std::int64_t to = from + static_cast<std::int64_t>(w.size()) - 1;
  // right extension
  std::vector<Symbol> right_syms;
  std::vector<std::int64_t> seen(states_, -1);
  std::size_t s = state_of(w, w.size());
  seen[s] = 0;
  std::int64_t cycle_start = -1;
  for (std::int64_t step = 1; cycle_start < 0; ++step) {
    bool moved = false;
    for (Symbol a = 0; a < alphabet_; ++a) {
      if (edge_allowed(s, a) && reaches_cycle_[next_state(s, a)]) {
        s = next_state(s, a);
        right_syms.push_back(a);
        moved = true;
        break;
      }
    }
    if (!moved) return std::nullopt;
    if (seen[s] >= 0) {
      cycle_start = seen[s];
    } else {
      seen[s] = step;
    }
  }
  // symbols right_syms[cycle_start..] repeat from position to + cycle_start + 1
  const Word right_cycle(right_syms.begin() + cycle_start, right_syms.end());
  const std::int64_t right_origin = to + cycle_start + 1;
  Word right_tail(right_cycle.size());
  for (std::size_t j = 0; j < right_cycle.size(); ++j) {
    right_tail[static_cast<std::size_t>(floor_mod(right_origin + static_cast<std::int64_t>(j),
                                                  static_cast<std::int64_t>(right_cycle.size())))] = right_cycle[j];
  }
  // left extension: prepend symbols, tracking the first-block state
  std::vector<Symbol> left_syms;  // left_syms[0] is the symbol at from-1
  std::fill(seen.begin(), seen.end(), -1);
  Word head(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(block_));
  s = state_of(head, head.size());
  seen[s] = 0;
  cycle_start = -1;
  for (std::int64_t step = 1; cycle_start < 0; ++step) {
    bool moved = false;
    for (Symbol b = 0; b < alphabet_; ++b) {
      // predecessor state: b followed by the first block_-1 symbols of s
      const std::size_t pred = (s / static_cast<std::size_t>(alphabet_)) +
                               static_cast<std::size_t>(b) * (states_ / static_cast<std::size_t>(alphabet_));
      const Symbol last = static_cast<Symbol>(s % static_cast<std::size_t>(alphabet_));
      if (reached_by_cycle_[pred] && edge_allowed(pred, last) && next_state(pred, last) == s) {
        s = pred;
        left_syms.push_back(b);
        moved = true;
        break;
      }
    }
    if (!moved) return std::nullopt;
    if (seen[s] >= 0) {
      cycle_start = seen[s];
    } else {
      seen[s] = step;
    }
  }
  // left_syms[cycle_start..] repeat going left from position from - cycle_start - 1
  const Word left_cycle(left_syms.begin() + cycle_start, left_syms.end());
  const std::int64_t left_origin = from - cycle_start - 1;
  Word left_tail(left_cycle.size());
  for (std::size_t j = 0; j < left_cycle.size(); ++j) {
    left_tail[static_cast<std::size_t>(floor_mod(left_origin - static_cast<std::int64_t>(j),
                                                 static_cast<std::int64_t>(left_cycle.size())))] = left_cycle[j];
  }
  Word core;
  for (std::int64_t j = cycle_start - 1; j >= 0; --j) core.push_back(left_syms[static_cast<std::size_t>(j)]);
  const std::int64_t start = from - cycle_start;
  core.insert(core.end(), w.begin(), w.end());
  for (std::int64_t j = 0; j <= static_cast<std::int64_t>(right_syms.size()) - 1 && j < right_origin - to - 1; ++j) {
    core.push_back(right_syms[static_cast<std::size_t>(j)]);
  }
  return SequencePoint::from_parts(left_tail, start, core, right_tail);
}

std::optional<SequencePoint> Subshift::complete(const Cylinder& fixed, std::int64_t from, std::int64_t to) const {
  if (!fixed.empty()) {
    from = std::min(from, fixed.min_position());
    to = std::max(to, fixed.max_position());
  }
  if (to < from) to = from;
  while (to - from + 1 < static_cast<std::int64_t>(block_)) ++to;
  const auto len = static_cast<std::size_t>(to - from + 1);
  Word w(len);
  std::set<std::pair<std::size_t, std::size_t>> dead;
  std::function<bool(std::size_t)> dfs = [&](std::size_t i) -> bool {
    if (i >= block_) {
      const std::size_t st = state_of(w, i);
      if (i == block_ && !reached_by_cycle_[st]) return false;
      if (i == len) return reaches_cycle_[st];
      if (dead.count({i, st})) return false;
    }
    const std::int64_t pos = from + static_cast<std::int64_t>(i);
    auto it = fixed.symbols.find(pos);
    for (Symbol a = 0; a < alphabet_; ++a) {
      if (it != fixed.symbols.end() && it->second != a) continue;
      if (i >= block_ && !edge_allowed(state_of(w, i), a)) continue;
      w[i] = a;
      if (i + 1 <= block_) {
        Word prefix(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(i + 1));
        if (!word_is_legal(prefix)) continue;
      }
      if (dfs(i + 1)) return true;
    }
    if (i >= block_) dead.insert({i, state_of(w, i)});
    return false;
  };
  if (!dfs(0)) return std::nullopt;
  return build_point(w, from);
}

bool Subshift::is_consistent(const Cylinder& c) const {
  const std::int64_t at = c.empty() ? 0 : c.min_position();
  return complete(c, at, at).has_value();
}

std::vector<Word> Subshift::legal_fillings(const Cylinder& fixed, std::int64_t from, std::int64_t to,
                                           std::size_t limit) const {
  std::vector<Word> out;
  if (to < from) {
    if (is_consistent(fixed)) out.emplace_back();
    return out;
  }
  const auto len = static_cast<std::size_t>(to - from + 1);
  Word w(len);
  std::function<void(std::size_t)> dfs = [&](std::size_t i) {
    if (out.size() >= limit) return;
    if (i == len) {
      Cylinder c = fixed;
      for (std::size_t j = 0; j < len; ++j) c.symbols[from + static_cast<std::int64_t>(j)] = w[j];
      if (complete(c, from, to)) out.push_back(w);
      return;
    }
    const std::int64_t pos = from + static_cast<std::int64_t>(i);
    auto it = fixed.symbols.find(pos);
    for (Symbol a = 0; a < alphabet_; ++a) {
      if (it != fixed.symbols.end() && it->second != a) continue;
      w[i] = a;
      Word prefix(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(i + 1));
      if (!word_is_legal(prefix)) continue;
      dfs(i + 1);
    }
  };
  dfs(0);
  return out;
}

}  // namespace etale
