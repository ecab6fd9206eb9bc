#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "etale/group.hpp"
#include "etale/sequence.hpp"

namespace etale {

// ---------------------------------------------------------------------------
// Units and arrows

// Finite unit spaces are indexed 0..n-1; cylinder models use sequence points.
using Unit = std::variant<std::int64_t, SequencePoint>;

struct FiniteArrow {
  std::int64_t id = 0;
  friend auto operator<=>(const FiniteArrow&, const FiniteArrow&) = default;
};
// (i, j): range i, source j.
struct PairArrow {
  std::int64_t range = 0;
  std::int64_t source = 0;
  friend auto operator<=>(const PairArrow&, const PairArrow&) = default;
};
struct GroupArrow {
  GroupElement g;
  friend auto operator<=>(const GroupArrow&, const GroupArrow&) = default;
};
// g in the group sitting over `unit`.
struct BundleArrow {
  std::int64_t unit = 0;
  GroupElement g;
  friend auto operator<=>(const BundleArrow&, const BundleArrow&) = default;
};
// (x, g) with range x and source x.g
struct ActionArrow {
  std::int64_t point = 0;
  GroupElement g;
  friend auto operator<=>(const ActionArrow&, const ActionArrow&) = default;
};
// (x, n) with range x and source x shifted by n
struct ShiftArrow {
  SequencePoint point;
  std::int64_t shift = 0;
  friend auto operator<=>(const ShiftArrow&, const ShiftArrow&) = default;
};

using Arrow = std::variant<FiniteArrow, PairArrow, GroupArrow, BundleArrow, ActionArrow, ShiftArrow>;

// Compact open bisection {(x, shift) : x in constraint} of a cylinder model.
struct ArrowBundle {
  Cylinder constraint;
  std::int64_t shift = 0;
  friend auto operator<=>(const ArrowBundle&, const ArrowBundle&) = default;
};

// Support entry of an element: a single arrow (discrete models) or a bundle
// (cylinder models).
using Support = std::variant<Arrow, ArrowBundle>;

std::string to_string(const Unit& u);
std::string to_string(const Arrow& a);
std::string to_string(const ArrowBundle& b);
std::string to_string(const Support& s);

enum class ModelKind { FiniteExplicit, Group, Pair, GroupBundle, TransformationFinite, CylinderShift };
std::string to_string(ModelKind kind);

enum class FiberDirection { Source, Range };

struct FiberEnumeration {
  std::vector<Arrow> arrows;
  bool truncated = false;  // bound reached before the fiber was exhausted
};

// How weak containment may be established for a model.
//   Derive   - from the constructor (all constructors here are amenable)
//   Asserted - the user asserts it
//   Withheld - the constructor certificate is not to be used
enum class AmenabilityMode { Derive, Asserted, Withheld };

// ---------------------------------------------------------------------------

// Dense indexing of the arrows of a finite model.
struct FiniteIndex {
  std::vector<Arrow> arrows;
  std::map<Arrow, std::size_t> position;
  std::vector<std::size_t> inverse;
  std::vector<std::size_t> range_unit;   // index into units()
  std::vector<std::size_t> source_unit;
  std::vector<std::size_t> unit_arrow;   // unit index -> arrow index

  std::size_t size() const noexcept { return arrows.size(); }
  std::size_t at(const Arrow& a) const;
};

class GroupoidModel {
 public:
  virtual ~GroupoidModel() = default;

  virtual ModelKind kind() const = 0;
  virtual std::string describe() const = 0;
  // Arrow set is finite.
  virtual bool is_finite() const = 0;
  virtual bool has_finite_unit_space() const = 0;
  // Every singleton is open; false only for cylinder models.
  virtual bool is_discrete() const { return true; }

  // Finite unit spaces only.
  virtual std::vector<Unit> units() const = 0;
  // Finite models only.
  virtual std::vector<Arrow> arrows() const;

  virtual void check_unit(const Unit& x) const = 0;
  virtual void check_arrow(const Arrow& a) const = 0;

  virtual Unit range(const Arrow& a) const = 0;
  virtual Unit source(const Arrow& a) const = 0;
  // Throws NotComposable unless source(a) == range(b).
  virtual Arrow compose(const Arrow& a, const Arrow& b) const = 0;
  virtual Arrow invert(const Arrow& a) const = 0;
  virtual Arrow unit_arrow(const Unit& x) const = 0;
  // G_x (source) or G^x (range), first `bound` arrows in the canonical order.
  virtual FiberEnumeration fiber(const Unit& x, FiberDirection direction, std::size_t bound) const = 0;

  bool composable(const Arrow& a, const Arrow& b) const { return source(a) == range(b); }
  bool is_unit(const Arrow& a) const { return unit_arrow(range(a)) == a; }
  bool is_isotropy(const Arrow& a) const { return range(a) == source(a); }

  AmenabilityMode amenability() const noexcept { return amenability_; }
  void set_amenability(AmenabilityMode mode) noexcept { amenability_ = mode; }

  // Non-null exactly for finite models.
  const FiniteIndex* finite_index() const noexcept { return index_.get(); }

 protected:
  void build_index();
  [[noreturn]] void not_composable(const Arrow& a, const Arrow& b) const;

 private:
  AmenabilityMode amenability_ = AmenabilityMode::Derive;
  std::shared_ptr<const FiniteIndex> index_;
};

using ModelPtr = std::shared_ptr<const GroupoidModel>;

// ---------------------------------------------------------------------------
// Constructors

struct CompositionEntry {
  std::int64_t left = 0;
  std::int64_t right = 0;
  std::int64_t product = 0;
};

// Arbitrary finite groupoid given by tables. Arrow ids are 0..n-1; `unit_ids`
// lists the ids of unit arrows; range/source/inverse map arrow id -> arrow id.
// Validated exhaustively (StructureError carries a witness).
class FiniteExplicitGroupoid final : public GroupoidModel {
 public:
  FiniteExplicitGroupoid(std::vector<std::int64_t> unit_ids, std::vector<std::int64_t> range,
                         std::vector<std::int64_t> source, const std::vector<CompositionEntry>& composition,
                         std::vector<std::int64_t> inverse);

  ModelKind kind() const override { return ModelKind::FiniteExplicit; }
  std::string describe() const override;
  bool is_finite() const override { return true; }
  bool has_finite_unit_space() const override { return true; }
  std::vector<Unit> units() const override;
  std::vector<Arrow> arrows() const override;
  void check_unit(const Unit& x) const override;
  void check_arrow(const Arrow& a) const override;
  Unit range(const Arrow& a) const override;
  Unit source(const Arrow& a) const override;
  Arrow compose(const Arrow& a, const Arrow& b) const override;
  Arrow invert(const Arrow& a) const override;
  Arrow unit_arrow(const Unit& x) const override;
  FiberEnumeration fiber(const Unit& x, FiberDirection direction, std::size_t bound) const override;

  std::size_t arrow_count() const noexcept { return range_.size(); }
  const std::vector<std::int64_t>& unit_ids() const noexcept { return unit_ids_; }
  const std::vector<std::int64_t>& range_table() const noexcept { return range_; }
  const std::vector<std::int64_t>& source_table() const noexcept { return source_; }
  const std::vector<std::int64_t>& inverse_table() const noexcept { return inverse_; }
  std::vector<CompositionEntry> composition_entries() const;

 private:
  std::int64_t id_of(const Arrow& a) const;
  std::int64_t unit_index_of_arrow(std::int64_t id) const;

  std::vector<std::int64_t> unit_ids_;
  std::vector<std::int64_t> unit_index_;  // arrow id -> unit index or -1
  std::vector<std::int64_t> range_;
  std::vector<std::int64_t> source_;
  std::vector<std::int64_t> inverse_;
  std::vector<std::int32_t> product_;  // n x n, -1 where undefined
};

class PairGroupoid final : public GroupoidModel {
 public:
  explicit PairGroupoid(std::int64_t n);

  ModelKind kind() const override { return ModelKind::Pair; }
  std::string describe() const override;
  bool is_finite() const override { return true; }
  bool has_finite_unit_space() const override { return true; }
  std::vector<Unit> units() const override;
  std::vector<Arrow> arrows() const override;
  void check_unit(const Unit& x) const override;
  void check_arrow(const Arrow& a) const override;
  Unit range(const Arrow& a) const override;
  Unit source(const Arrow& a) const override;
  Arrow compose(const Arrow& a, const Arrow& b) const override;
  Arrow invert(const Arrow& a) const override;
  Arrow unit_arrow(const Unit& x) const override;
  FiberEnumeration fiber(const Unit& x, FiberDirection direction, std::size_t bound) const override;

  std::int64_t size() const noexcept { return n_; }

 private:
  std::int64_t n_;
};

// A group viewed as a groupoid with one unit (index 0).
class GroupGroupoid final : public GroupoidModel {
 public:
  explicit GroupGroupoid(Group group);

  ModelKind kind() const override { return ModelKind::Group; }
  std::string describe() const override;
  bool is_finite() const override { return group_.is_finite(); }
  bool has_finite_unit_space() const override { return true; }
  std::vector<Unit> units() const override;
  std::vector<Arrow> arrows() const override;
  void check_unit(const Unit& x) const override;
  void check_arrow(const Arrow& a) const override;
  Unit range(const Arrow& a) const override;
  Unit source(const Arrow& a) const override;
  Arrow compose(const Arrow& a, const Arrow& b) const override;
  Arrow invert(const Arrow& a) const override;
  Arrow unit_arrow(const Unit& x) const override;
  FiberEnumeration fiber(const Unit& x, FiberDirection direction, std::size_t bound) const override;

  const Group& group() const noexcept { return group_; }

 private:
  Group group_;
};

class GroupBundleGroupoid final : public GroupoidModel {
 public:
  explicit GroupBundleGroupoid(std::vector<Group> groups);

  ModelKind kind() const override { return ModelKind::GroupBundle; }
  std::string describe() const override;
  bool is_finite() const override;
  bool has_finite_unit_space() const override { return true; }
  std::vector<Unit> units() const override;
  std::vector<Arrow> arrows() const override;
  void check_unit(const Unit& x) const override;
  void check_arrow(const Arrow& a) const override;
  Unit range(const Arrow& a) const override;
  Unit source(const Arrow& a) const override;
  Arrow compose(const Arrow& a, const Arrow& b) const override;
  Arrow invert(const Arrow& a) const override;
  Arrow unit_arrow(const Unit& x) const override;
  FiberEnumeration fiber(const Unit& x, FiberDirection direction, std::size_t bound) const override;

  const std::vector<Group>& groups() const noexcept { return groups_; }

 private:
  std::vector<Group> groups_;
};

// Right action of a group on {0..n-1}, specified by one permutation per
// generator: Zd -> e_1..e_d, Cyclic/ProductOfCyclics -> each factor generator,
// Table -> every element (by table index), Lamplighter -> (lamp at 0, shift 1).
class TransformationGroupoid final : public GroupoidModel {
 public:
  TransformationGroupoid(std::int64_t points, Group group, std::vector<std::vector<std::int64_t>> generator_action,
                         std::vector<std::string> labels = {});

  ModelKind kind() const override { return ModelKind::TransformationFinite; }
  std::string describe() const override;
  bool is_finite() const override { return group_.is_finite(); }
  bool has_finite_unit_space() const override { return true; }
  std::vector<Unit> units() const override;
  std::vector<Arrow> arrows() const override;
  void check_unit(const Unit& x) const override;
  void check_arrow(const Arrow& a) const override;
  Unit range(const Arrow& a) const override;
  Unit source(const Arrow& a) const override;
  Arrow compose(const Arrow& a, const Arrow& b) const override;
  Arrow invert(const Arrow& a) const override;
  Arrow unit_arrow(const Unit& x) const override;
  FiberEnumeration fiber(const Unit& x, FiberDirection direction, std::size_t bound) const override;

  const Group& group() const noexcept { return group_; }
  std::int64_t point_count() const noexcept { return points_; }
  const std::vector<std::vector<std::int64_t>>& generator_action() const noexcept { return action_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  // x . g
  std::int64_t act(std::int64_t x, const GroupElement& g) const;

 private:
  std::int64_t apply_power(std::size_t generator, std::int64_t x, std::int64_t k) const;

  std::int64_t points_;
  Group group_;
  std::vector<std::vector<std::int64_t>> action_;
  std::vector<std::string> labels_;
  // cycle decomposition of each generator permutation for O(1) powers
  std::vector<std::vector<std::int64_t>> cycle_of_;
  std::vector<std::vector<std::int64_t>> pos_in_cycle_;
  std::vector<std::vector<std::vector<std::int64_t>>> cycles_;
};

// Z acting by the left shift (x.n)_k = x_{k+n} on a shift of finite type,
// with the product (cylinder) topology. Units are eventually periodic points.
class CylinderShiftGroupoid final : public GroupoidModel {
 public:
  // `depth` bounds validation and interior searches; `max_window` bounds the
  // span of bundle constraints produced by products.
  CylinderShiftGroupoid(Subshift subshift, std::size_t depth = 8, std::size_t max_window = 24);

  ModelKind kind() const override { return ModelKind::CylinderShift; }
  std::string describe() const override;
  bool is_finite() const override { return false; }
  bool has_finite_unit_space() const override { return false; }
  bool is_discrete() const override { return false; }
  std::vector<Unit> units() const override;
  void check_unit(const Unit& x) const override;
  void check_arrow(const Arrow& a) const override;
  Unit range(const Arrow& a) const override;
  Unit source(const Arrow& a) const override;
  Arrow compose(const Arrow& a, const Arrow& b) const override;
  Arrow invert(const Arrow& a) const override;
  Arrow unit_arrow(const Unit& x) const override;
  FiberEnumeration fiber(const Unit& x, FiberDirection direction, std::size_t bound) const override;

  const Subshift& subshift() const noexcept { return subshift_; }
  std::size_t depth() const noexcept { return depth_; }
  std::size_t max_window() const noexcept { return max_window_; }

  void check_bundle(const ArrowBundle& b) const;
  // The arrow of `b` with the given source (resp. range), if it exists.
  std::optional<Arrow> bundle_arrow_with_source(const ArrowBundle& b, const SequencePoint& x) const;
  std::optional<Arrow> bundle_arrow_with_range(const ArrowBundle& b, const SequencePoint& x) const;
  bool bundle_contains(const ArrowBundle& b, const Arrow& a) const;
  // Product set b1 * b2 (a bundle or empty); BundleIncompatible when the
  // resulting window exceeds max_window.
  std::optional<ArrowBundle> bundle_product(const ArrowBundle& b1, const ArrowBundle& b2) const;
  ArrowBundle bundle_inverse(const ArrowBundle& b) const;

 private:
  Subshift subshift_;
  std::size_t depth_;
  std::size_t max_window_;
};

// Unit index for finite unit spaces; throws on sequence points.
std::int64_t unit_index(const Unit& x);
const SequencePoint& unit_point(const Unit& x);

}  // namespace etale
