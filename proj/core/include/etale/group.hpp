#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace etale {

// Group element in canonical normal form. The meaning of the coordinates is
// fixed by the owning Group's family:
//   Zd               (a_1, ..., a_d)
//   Cyclic           (k), 0 <= k < n
//   ProductOfCyclics (k_1, ..., k_r), 0 <= k_i < n_i
//   Table            (index)
//   Lamplighter      (t, p_1, v_1, p_2, v_2, ...): shift t, lamp value v_j at
//                    position p_j, positions strictly increasing, 0 < v_j < m
struct GroupElement {
  std::vector<std::int64_t> v;

  friend bool operator==(const GroupElement&, const GroupElement&) = default;
  friend auto operator<=>(const GroupElement&, const GroupElement&) = default;
};

enum class GroupFamily { Zd, Cyclic, ProductOfCyclics, Table, Lamplighter };

std::string to_string(GroupFamily family);

// Discrete groups available to the constructors. All families are amenable.
// Lamplighter(m) is (sum over Z of Z_m) semidirect Z with
//   (f, t)(f', t') = (f + shift_t f', t + t'),  (shift_t f)(n) = f(n - t).
class Group {
 public:
  static Group zd(std::size_t dimension);
  static Group cyclic(std::int64_t order);
  static Group product_of_cyclics(std::vector<std::int64_t> orders);
  // table[a][b] = a*b; validated exhaustively.
  static Group table(std::vector<std::vector<std::int64_t>> table);
  static Group lamplighter(std::int64_t base);

  GroupFamily family() const noexcept { return family_; }
  std::size_t dimension() const noexcept { return dimension_; }
  const std::vector<std::int64_t>& orders() const noexcept { return orders_; }
  const std::vector<std::vector<std::int64_t>>& table_entries() const noexcept { return table_; }
  std::int64_t lamplighter_base() const noexcept { return base_; }

  bool is_finite() const noexcept;
  std::optional<std::int64_t> order() const;
  bool is_abelian() const;

  GroupElement identity() const;
  GroupElement multiply(const GroupElement& a, const GroupElement& b) const;
  GroupElement inverse(const GroupElement& a) const;
  GroupElement power(const GroupElement& a, std::int64_t k) const;
  bool is_identity(const GroupElement& a) const { return a == identity(); }
  // Throws UnknownArrow when `a` is not a canonical element of this group.
  void check(const GroupElement& a) const;
  bool contains(const GroupElement& a) const;

  std::vector<GroupElement> generators() const;
  // The first `bound` elements in the canonical enumeration order (identity
  // first, then growing balls). Nested: enumerate(k) is a prefix of
  // enumerate(k+1).
  std::vector<GroupElement> enumerate(std::size_t bound) const;
  // All elements; finite groups only.
  std::vector<GroupElement> elements() const;
  // Position of `a` in elements(); finite groups only.
  std::size_t index_of(const GroupElement& a) const;

  // Lamplighter helpers.
  GroupElement lamp(std::int64_t position, std::int64_t value) const;
  GroupElement shift(std::int64_t t) const;

  std::string describe() const;
  std::string element_to_string(const GroupElement& a) const;

  friend bool operator==(const Group&, const Group&) = default;

 private:
  Group() = default;

  GroupFamily family_ = GroupFamily::Zd;
  std::size_t dimension_ = 0;
  std::vector<std::int64_t> orders_;
  std::vector<std::vector<std::int64_t>> table_;
  std::int64_t identity_index_ = 0;
  std::vector<std::int64_t> table_inverse_;
  std::int64_t base_ = 0;
};

}  // namespace etale
