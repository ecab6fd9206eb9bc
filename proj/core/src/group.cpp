#include "etale/group.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "etale/error.hpp"

namespace etale {

namespace {

std::int64_t mod(std::int64_t a, std::int64_t n) {
  const std::int64_t r = a % n;
  return r < 0 ? r + n : r;
}

using LampConfig = std::map<std::int64_t, std::int64_t>;

LampConfig lamps_of(const GroupElement& g) {
  LampConfig c;
  for (std::size_t i = 1; i + 1 < g.v.size(); i += 2) c[g.v[i]] = g.v[i + 1];
  return c;
}

GroupElement lamplighter_element(std::int64_t t, const LampConfig& lamps, std::int64_t m) {
  GroupElement g;
  g.v.push_back(t);
  for (const auto& [p, val] : lamps) {
    const std::int64_t r = mod(val, m);
    if (r != 0) {
      g.v.push_back(p);
      g.v.push_back(r);
    }
  }
  return g;
}

// Appends all integer vectors in [-r, r]^d whose sup-norm is exactly r, lexicographically.
void sphere(std::size_t d, std::int64_t r, std::vector<std::vector<std::int64_t>>& out) {
  std::vector<std::int64_t> cur(d, -r);
  if (d == 0) {
    if (r == 0) out.emplace_back();
    return;
  }
  for (;;) {
    std::int64_t norm = 0;
    for (auto c : cur) norm = std::max(norm, c < 0 ? -c : c);
    if (norm == r) out.push_back(cur);
    std::size_t i = d;
    while (i > 0) {
      --i;
      if (cur[i] < r) {
        ++cur[i];
        for (std::size_t j = i + 1; j < d; ++j) cur[j] = -r;
        break;
      }
      if (i == 0) return;
    }
  }
}

}  // namespace

std::string to_string(GroupFamily family) {
  switch (family) {
    case GroupFamily::Zd: return "zd";
    case GroupFamily::Cyclic: return "cyclic";
    case GroupFamily::ProductOfCyclics: return "product_of_cyclics";
    case GroupFamily::Table: return "table";
    case GroupFamily::Lamplighter: return "lamplighter";
  }
  return "?";
}

Group Group::zd(std::size_t dimension) {
  Group g;
  g.family_ = GroupFamily::Zd;
  g.dimension_ = dimension;
  return g;
}

Group Group::cyclic(std::int64_t order) {
  if (order < 1) throw Error(ErrorKind::MalformedSpec, "cyclic group order must be >= 1");
  Group g;
  g.family_ = GroupFamily::Cyclic;
  g.orders_ = {order};
  g.dimension_ = 1;
  return g;
}

Group Group::product_of_cyclics(std::vector<std::int64_t> orders) {
  for (auto n : orders) {
    if (n < 1) throw Error(ErrorKind::MalformedSpec, "cyclic factor order must be >= 1");
  }
  Group g;
  g.family_ = GroupFamily::ProductOfCyclics;
  g.dimension_ = orders.size();
  g.orders_ = std::move(orders);
  return g;
}

Group Group::table(std::vector<std::vector<std::int64_t>> table) {
  const auto n = static_cast<std::int64_t>(table.size());
  if (n == 0) throw Error(ErrorKind::MalformedSpec, "group table is empty");
  for (const auto& row : table) {
    if (static_cast<std::int64_t>(row.size()) != n) throw Error(ErrorKind::MalformedSpec, "group table is not square");
    for (auto e : row) {
      if (e < 0 || e >= n) throw Error(ErrorKind::MalformedSpec, "group table entry out of range");
    }
  }
  std::int64_t e = -1;
  for (std::int64_t a = 0; a < n && e < 0; ++a) {
    bool ok = true;
    for (std::int64_t b = 0; b < n && ok; ++b) ok = table[a][b] == b && table[b][a] == b;
    if (ok) e = a;
  }
  if (e < 0) throw Error(ErrorKind::StructureError, "group table has no identity");
  for (std::int64_t a = 0; a < n; ++a) {
    for (std::int64_t b = 0; b < n; ++b) {
      for (std::int64_t c = 0; c < n; ++c) {
        if (table[table[a][b]][c] != table[a][table[b][c]]) {
          throw Error(ErrorKind::StructureError, "group table is not associative",
                      "(" + std::to_string(a) + "," + std::to_string(b) + "," + std::to_string(c) + ")");
        }
      }
    }
  }
  std::vector<std::int64_t> inv(static_cast<std::size_t>(n), -1);
  for (std::int64_t a = 0; a < n; ++a) {
    for (std::int64_t b = 0; b < n; ++b) {
      if (table[a][b] == e) inv[a] = b;
    }
    if (inv[a] < 0 || table[inv[a]][a] != e) {
      throw Error(ErrorKind::StructureError, "group table element without inverse", std::to_string(a));
    }
  }
  Group g;
  g.family_ = GroupFamily::Table;
  g.table_ = std::move(table);
  g.identity_index_ = e;
  g.table_inverse_ = std::move(inv);
  g.dimension_ = 1;
  return g;
}

Group Group::lamplighter(std::int64_t base) {
  if (base < 2) throw Error(ErrorKind::MalformedSpec, "lamplighter base must be >= 2");
  Group g;
  g.family_ = GroupFamily::Lamplighter;
  g.base_ = base;
  return g;
}

bool Group::is_finite() const noexcept {
  switch (family_) {
    case GroupFamily::Zd: return dimension_ == 0;
    case GroupFamily::Lamplighter: return false;
    default: return true;
  }
}

std::optional<std::int64_t> Group::order() const {
  switch (family_) {
    case GroupFamily::Zd: return dimension_ == 0 ? std::optional<std::int64_t>(1) : std::nullopt;
    case GroupFamily::Cyclic:
    case GroupFamily::ProductOfCyclics: {
      std::int64_t n = 1;
      for (auto k : orders_) n *= k;
      return n;
    }
    case GroupFamily::Table: return static_cast<std::int64_t>(table_.size());
    case GroupFamily::Lamplighter: return std::nullopt;
  }
  return std::nullopt;
}

bool Group::is_abelian() const {
  switch (family_) {
    case GroupFamily::Table: {
      const auto n = table_.size();
      for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
          if (table_[a][b] != table_[b][a]) return false;
        }
      }
      return true;
    }
    case GroupFamily::Lamplighter: return false;
    default: return true;
  }
}

GroupElement Group::identity() const {
  switch (family_) {
    case GroupFamily::Zd: return {std::vector<std::int64_t>(dimension_, 0)};
    case GroupFamily::Cyclic:
    case GroupFamily::ProductOfCyclics: return {std::vector<std::int64_t>(orders_.size(), 0)};
    case GroupFamily::Table: return {{identity_index_}};
    case GroupFamily::Lamplighter: return {{0}};
  }
  return {};
}

bool Group::contains(const GroupElement& a) const {
  switch (family_) {
    case GroupFamily::Zd: return a.v.size() == dimension_;
    case GroupFamily::Cyclic:
    case GroupFamily::ProductOfCyclics:
      if (a.v.size() != orders_.size()) return false;
      for (std::size_t i = 0; i < orders_.size(); ++i) {
        if (a.v[i] < 0 || a.v[i] >= orders_[i]) return false;
      }
      return true;
    case GroupFamily::Table:
      return a.v.size() == 1 && a.v[0] >= 0 && a.v[0] < static_cast<std::int64_t>(table_.size());
    case GroupFamily::Lamplighter: {
      if (a.v.empty() || a.v.size() % 2 == 0) return false;
      for (std::size_t i = 1; i + 1 < a.v.size(); i += 2) {
        if (a.v[i + 1] <= 0 || a.v[i + 1] >= base_) return false;
        if (i > 1 && a.v[i] <= a.v[i - 2]) return false;
      }
      return true;
    }
  }
  return false;
}

void Group::check(const GroupElement& a) const {
  if (!contains(a)) {
    throw Error(ErrorKind::UnknownArrow, "not a canonical element of " + describe(), element_to_string(a));
  }
}

GroupElement Group::multiply(const GroupElement& a, const GroupElement& b) const {
  switch (family_) {
    case GroupFamily::Zd: {
      GroupElement c = a;
      for (std::size_t i = 0; i < dimension_; ++i) c.v[i] += b.v[i];
      return c;
    }
    case GroupFamily::Cyclic:
    case GroupFamily::ProductOfCyclics: {
      GroupElement c = a;
      for (std::size_t i = 0; i < orders_.size(); ++i) c.v[i] = mod(a.v[i] + b.v[i], orders_[i]);
      return c;
    }
    case GroupFamily::Table: return {{table_[a.v[0]][b.v[0]]}};
    case GroupFamily::Lamplighter: {
      const std::int64_t t = a.v[0];
      LampConfig f = lamps_of(a);
      for (const auto& [p, val] : lamps_of(b)) f[p + t] += val;
      return lamplighter_element(t + b.v[0], f, base_);
    }
  }
  return {};
}

GroupElement Group::inverse(const GroupElement& a) const {
  switch (family_) {
    case GroupFamily::Zd: {
      GroupElement c = a;
      for (auto& x : c.v) x = -x;
      return c;
    }
    case GroupFamily::Cyclic:
    case GroupFamily::ProductOfCyclics: {
      GroupElement c = a;
      for (std::size_t i = 0; i < orders_.size(); ++i) c.v[i] = mod(-a.v[i], orders_[i]);
      return c;
    }
    case GroupFamily::Table: return {{table_inverse_[a.v[0]]}};
    case GroupFamily::Lamplighter: {
      const std::int64_t t = a.v[0];
      LampConfig f;
      for (const auto& [p, val] : lamps_of(a)) f[p - t] = -val;
      return lamplighter_element(-t, f, base_);
    }
  }
  return {};
}

GroupElement Group::power(const GroupElement& a, std::int64_t k) const {
  GroupElement base = k < 0 ? inverse(a) : a;
  std::int64_t e = k < 0 ? -k : k;
  GroupElement acc = identity();
  while (e > 0) {
    if (e & 1) acc = multiply(acc, base);
    base = multiply(base, base);
    e >>= 1;
  }
  return acc;
}

std::vector<GroupElement> Group::generators() const {
  std::vector<GroupElement> gens;
  switch (family_) {
    case GroupFamily::Zd:
      for (std::size_t i = 0; i < dimension_; ++i) {
        GroupElement g = identity();
        g.v[i] = 1;
        gens.push_back(g);
      }
      break;
    case GroupFamily::Cyclic:
    case GroupFamily::ProductOfCyclics:
      for (std::size_t i = 0; i < orders_.size(); ++i) {
        if (orders_[i] == 1) continue;
        GroupElement g = identity();
        g.v[i] = 1;
        gens.push_back(g);
      }
      break;
    case GroupFamily::Table:
      for (std::int64_t a = 0; a < static_cast<std::int64_t>(table_.size()); ++a) {
        if (a != identity_index_) gens.push_back({{a}});
      }
      break;
    case GroupFamily::Lamplighter:
      gens.push_back(lamp(0, 1));
      gens.push_back(shift(1));
      break;
  }
  return gens;
}

std::vector<GroupElement> Group::enumerate(std::size_t bound) const {
  std::vector<GroupElement> out;
  if (bound == 0) return out;
  switch (family_) {
    case GroupFamily::Zd: {
      for (std::int64_t r = 0; out.size() < bound; ++r) {
        std::vector<std::vector<std::int64_t>> shell;
        sphere(dimension_, r, shell);
        if (shell.empty()) break;
        for (auto& v : shell) {
          if (out.size() == bound) break;
          out.push_back({std::move(v)});
        }
        if (dimension_ == 0) break;
      }
      return out;
    }
    case GroupFamily::Lamplighter: {
      for (std::int64_t r = 0; out.size() < bound; ++r) {
        const std::int64_t width = 2 * r + 1;
        std::vector<std::int64_t> config(static_cast<std::size_t>(width), 0);
        std::vector<GroupElement> shell;
        for (std::int64_t t = -r; t <= r; ++t) {
          std::fill(config.begin(), config.end(), 0);
          for (;;) {
            std::int64_t radius = t < 0 ? -t : t;
            LampConfig f;
            for (std::int64_t i = 0; i < width; ++i) {
              if (config[i] != 0) {
                f[i - r] = config[i];
                radius = std::max(radius, (i - r) < 0 ? r - i : i - r);
              }
            }
            if (radius == r) shell.push_back(lamplighter_element(t, f, base_));
            std::int64_t i = width - 1;
            while (i >= 0 && config[i] == base_ - 1) config[i--] = 0;
            if (i < 0) break;
            ++config[i];
          }
        }
        std::sort(shell.begin(), shell.end());
        for (auto& g : shell) {
          if (out.size() == bound) break;
          out.push_back(std::move(g));
        }
      }
      return out;
    }
    default: {
      auto all = elements();
      if (all.size() > bound) all.resize(bound);
      return all;
    }
  }
}

std::vector<GroupElement> Group::elements() const {
  if (!is_finite()) throw Error(ErrorKind::UnsupportedModel, "cannot list the elements of infinite group " + describe());
  std::vector<GroupElement> out;
  switch (family_) {
    case GroupFamily::Zd: out.push_back(identity()); break;
    case GroupFamily::Cyclic:
    case GroupFamily::ProductOfCyclics: {
      GroupElement g = identity();
      for (;;) {
        out.push_back(g);
        std::size_t i = orders_.size();
        bool carry = true;
        while (carry && i > 0) {
          --i;
          if (++g.v[i] == orders_[i]) {
            g.v[i] = 0;
          } else {
            carry = false;
          }
        }
        if (carry) break;
      }
      break;
    }
    case GroupFamily::Table:
      out.push_back({{identity_index_}});
      for (std::int64_t a = 0; a < static_cast<std::int64_t>(table_.size()); ++a) {
        if (a != identity_index_) out.push_back({{a}});
      }
      break;
    case GroupFamily::Lamplighter: break;
  }
  return out;
}

std::size_t Group::index_of(const GroupElement& a) const {
  check(a);
  switch (family_) {
    case GroupFamily::Zd: return 0;
    case GroupFamily::Cyclic:
    case GroupFamily::ProductOfCyclics: {
      std::size_t idx = 0;
      for (std::size_t i = 0; i < orders_.size(); ++i) idx = idx * static_cast<std::size_t>(orders_[i]) + static_cast<std::size_t>(a.v[i]);
      return idx;
    }
    case GroupFamily::Table: {
      const auto k = a.v[0];
      if (k == identity_index_) return 0;
      return static_cast<std::size_t>(k < identity_index_ ? k + 1 : k);
    }
    case GroupFamily::Lamplighter: break;
  }
  throw Error(ErrorKind::UnsupportedModel, "index_of on infinite group");
}

GroupElement Group::lamp(std::int64_t position, std::int64_t value) const {
  LampConfig f;
  f[position] = value;
  return lamplighter_element(0, f, base_);
}

GroupElement Group::shift(std::int64_t t) const { return {{t}}; }

std::string Group::describe() const {
  std::ostringstream os;
  switch (family_) {
    case GroupFamily::Zd: os << "Z^" << dimension_; break;
    case GroupFamily::Cyclic: os << "Z_" << orders_[0]; break;
    case GroupFamily::ProductOfCyclics:
      for (std::size_t i = 0; i < orders_.size(); ++i) os << (i ? " x " : "") << "Z_" << orders_[i];
      if (orders_.empty()) os << "1";
      break;
    case GroupFamily::Table: os << "table group of order " << table_.size(); break;
    case GroupFamily::Lamplighter: os << "Z_" << base_ << " wr Z"; break;
  }
  return os.str();
}

std::string Group::element_to_string(const GroupElement& a) const {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < a.v.size(); ++i) os << (i ? "," : "") << a.v[i];
  os << ")";
  return os.str();
}

}  // namespace etale
