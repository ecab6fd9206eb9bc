#include "etale/groupoid.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "etale/error.hpp"

namespace etale {

namespace {

std::string join(const std::vector<std::int64_t>& v) {
  std::ostringstream out;
  out << "(";
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << v[i];
  out << ")";
  return out.str();
}

[[noreturn]] void wrong_arrow(const Arrow& a, const std::string& model) {
  throw Error(ErrorKind::UnknownArrow, "arrow " + to_string(a) + " does not belong to " + model, to_string(a));
}

template <class T>
const T& expect(const Arrow& a, const std::string& model) {
  const T* p = std::get_if<T>(&a);
  if (!p) wrong_arrow(a, model);
  return *p;
}

std::int64_t checked_index(const Unit& x, std::int64_t n, const std::string& model) {
  const auto* i = std::get_if<std::int64_t>(&x);
  if (!i || *i < 0 || *i >= n) {
    throw Error(ErrorKind::UnknownArrow, "unit " + to_string(x) + " does not belong to " + model, to_string(x));
  }
  return *i;
}

// Z enumerated as 0, -1, 1, -2, 2, ...
std::int64_t integer_at(std::size_t i) {
  const auto k = static_cast<std::int64_t>((i + 1) / 2);
  return (i % 2 == 1) ? -k : k;
}

}  // namespace

std::int64_t unit_index(const Unit& x) {
  const auto* i = std::get_if<std::int64_t>(&x);
  if (!i) throw Error(ErrorKind::InvalidArgument, "expected a unit index, got " + to_string(x));
  return *i;
}

const SequencePoint& unit_point(const Unit& x) {
  const auto* p = std::get_if<SequencePoint>(&x);
  if (!p) throw Error(ErrorKind::InvalidArgument, "expected a sequence point, got " + to_string(x));
  return *p;
}

std::string to_string(const Unit& u) {
  if (const auto* i = std::get_if<std::int64_t>(&u)) return std::to_string(*i);
  return std::get<SequencePoint>(u).to_string();
}

std::string to_string(const Arrow& a) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, FiniteArrow>) {
          return "#" + std::to_string(x.id);
        } else if constexpr (std::is_same_v<T, PairArrow>) {
          return "(" + std::to_string(x.range) + "," + std::to_string(x.source) + ")";
        } else if constexpr (std::is_same_v<T, GroupArrow>) {
          return join(x.g.v);
        } else if constexpr (std::is_same_v<T, BundleArrow>) {
          return "[" + std::to_string(x.unit) + ":" + join(x.g.v) + "]";
        } else if constexpr (std::is_same_v<T, ActionArrow>) {
          return "(" + std::to_string(x.point) + "," + join(x.g.v) + ")";
        } else {
          return "(" + x.point.to_string() + "," + std::to_string(x.shift) + ")";
        }
      },
      a);
}

std::string to_string(const ArrowBundle& b) {
  return "{" + b.constraint.to_string() + " shift " + std::to_string(b.shift) + "}";
}

std::string to_string(const Support& s) {
  if (const auto* a = std::get_if<Arrow>(&s)) return to_string(*a);
  return to_string(std::get<ArrowBundle>(s));
}

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::FiniteExplicit: return "finite";
    case ModelKind::Group: return "group";
    case ModelKind::Pair: return "pair";
    case ModelKind::GroupBundle: return "group_bundle";
    case ModelKind::TransformationFinite: return "transformation";
    case ModelKind::CylinderShift: return "cylinder_shift";
  }
  return "unknown";
}

std::size_t FiniteIndex::at(const Arrow& a) const {
  auto it = position.find(a);
  if (it == position.end()) throw Error(ErrorKind::UnknownArrow, "unknown arrow " + to_string(a), to_string(a));
  return it->second;
}

std::vector<Arrow> GroupoidModel::arrows() const {
  throw Error(ErrorKind::UnsupportedModel, "arrow set of " + describe() + " is infinite");
}

void GroupoidModel::not_composable(const Arrow& a, const Arrow& b) const {
  throw Error(ErrorKind::NotComposable,
              "arrows " + to_string(a) + " and " + to_string(b) + " are not composable: source " +
                  to_string(source(a)) + " differs from range " + to_string(range(b)),
              to_string(a) + " " + to_string(b));
}

void GroupoidModel::build_index() {
  auto idx = std::make_shared<FiniteIndex>();
  idx->arrows = arrows();
  const auto us = units();
  std::map<Unit, std::size_t> unit_pos;
  for (std::size_t i = 0; i < us.size(); ++i) unit_pos.emplace(us[i], i);
  for (std::size_t i = 0; i < idx->arrows.size(); ++i) idx->position.emplace(idx->arrows[i], i);
  const std::size_t n = idx->arrows.size();
  idx->inverse.resize(n);
  idx->range_unit.resize(n);
  idx->source_unit.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    idx->inverse[i] = idx->position.at(invert(idx->arrows[i]));
    idx->range_unit[i] = unit_pos.at(range(idx->arrows[i]));
    idx->source_unit[i] = unit_pos.at(source(idx->arrows[i]));
  }
  idx->unit_arrow.resize(us.size());
  for (std::size_t u = 0; u < us.size(); ++u) idx->unit_arrow[u] = idx->position.at(unit_arrow(us[u]));
  index_ = std::move(idx);
}

// ---------------------------------------------------------------------------
// FiniteExplicit

FiniteExplicitGroupoid::FiniteExplicitGroupoid(std::vector<std::int64_t> unit_ids, std::vector<std::int64_t> range,
                                               std::vector<std::int64_t> source,
                                               const std::vector<CompositionEntry>& composition,
                                               std::vector<std::int64_t> inverse)
    : unit_ids_(std::move(unit_ids)), range_(std::move(range)), source_(std::move(source)), inverse_(std::move(inverse)) {
  const auto n = static_cast<std::int64_t>(range_.size());
  if (n == 0) throw Error(ErrorKind::MalformedSpec, "finite groupoid needs at least one arrow");
  if (n > 20000) throw Error(ErrorKind::MalformedSpec, "finite groupoid too large (more than 20000 arrows)");
  if (static_cast<std::int64_t>(source_.size()) != n || static_cast<std::int64_t>(inverse_.size()) != n) {
    throw Error(ErrorKind::MalformedSpec, "range, source and inverse tables must have one entry per arrow");
  }
  if (unit_ids_.empty()) throw Error(ErrorKind::MalformedSpec, "finite groupoid needs at least one unit");
  auto in_range = [n](std::int64_t a) { return a >= 0 && a < n; };
  unit_index_.assign(static_cast<std::size_t>(n), -1);
  for (std::size_t u = 0; u < unit_ids_.size(); ++u) {
    const auto id = unit_ids_[u];
    if (!in_range(id)) throw Error(ErrorKind::MalformedSpec, "unit id " + std::to_string(id) + " out of range");
    if (unit_index_[id] >= 0) throw Error(ErrorKind::MalformedSpec, "unit id " + std::to_string(id) + " repeated");
    unit_index_[id] = static_cast<std::int64_t>(u);
  }
  for (std::int64_t a = 0; a < n; ++a) {
    for (const auto* table : {&range_, &source_, &inverse_}) {
      if (!in_range((*table)[a])) {
        throw Error(ErrorKind::MalformedSpec, "table entry for arrow " + std::to_string(a) + " out of range");
      }
    }
    if (unit_index_[range_[a]] < 0 || unit_index_[source_[a]] < 0) {
      throw Error(ErrorKind::StructureError, "range/source of arrow " + std::to_string(a) + " is not a unit",
                  "arrow " + std::to_string(a));
    }
  }
  for (auto id : unit_ids_) {
    if (range_[id] != id || source_[id] != id) {
      throw Error(ErrorKind::StructureError, "unit " + std::to_string(id) + " must be its own range and source",
                  "arrow " + std::to_string(id));
    }
  }

  const auto un = static_cast<std::size_t>(n);
  product_.assign(un * un, -1);
  for (const auto& e : composition) {
    if (!in_range(e.left) || !in_range(e.right) || !in_range(e.product)) {
      throw Error(ErrorKind::MalformedSpec, "composition entry out of range");
    }
    const std::string w = "(" + std::to_string(e.left) + "," + std::to_string(e.right) + ")";
    if (source_[e.left] != range_[e.right]) {
      throw Error(ErrorKind::StructureError, "composition given for non-composable pair " + w, w);
    }
    auto& slot = product_[static_cast<std::size_t>(e.left) * un + static_cast<std::size_t>(e.right)];
    if (slot >= 0 && slot != e.product) throw Error(ErrorKind::StructureError, "conflicting composition for " + w, w);
    slot = static_cast<std::int32_t>(e.product);
  }
  // Products with units may be omitted from the table.
  for (std::int64_t a = 0; a < n; ++a) {
    auto& left_unit = product_[static_cast<std::size_t>(range_[a]) * un + static_cast<std::size_t>(a)];
    if (left_unit < 0) left_unit = static_cast<std::int32_t>(a);
    auto& right_unit = product_[static_cast<std::size_t>(a) * un + static_cast<std::size_t>(source_[a])];
    if (right_unit < 0) right_unit = static_cast<std::int32_t>(a);
  }

  auto prod = [&](std::int64_t a, std::int64_t b) {
    return static_cast<std::int64_t>(product_[static_cast<std::size_t>(a) * un + static_cast<std::size_t>(b)]);
  };
  for (std::int64_t a = 0; a < n; ++a) {
    for (std::int64_t b = 0; b < n; ++b) {
      if (source_[a] != range_[b]) continue;
      const std::string w = "(" + std::to_string(a) + "," + std::to_string(b) + ")";
      const auto c = prod(a, b);
      if (c < 0) throw Error(ErrorKind::StructureError, "composition missing for composable pair " + w, w);
      if (range_[c] != range_[a]) throw Error(ErrorKind::StructureError, "r(ab) != r(a) for pair " + w, w);
      if (source_[c] != source_[b]) throw Error(ErrorKind::StructureError, "s(ab) != s(b) for pair " + w, w);
    }
    if (prod(range_[a], a) != a || prod(a, source_[a]) != a) {
      throw Error(ErrorKind::StructureError, "units do not act trivially on arrow " + std::to_string(a),
                  "arrow " + std::to_string(a));
    }
    const auto inv = inverse_[a];
    if (range_[inv] != source_[a] || source_[inv] != range_[a] || prod(a, inv) != range_[a] ||
        prod(inv, a) != source_[a]) {
      throw Error(ErrorKind::StructureError, "inverse table wrong at arrow " + std::to_string(a),
                  "arrow " + std::to_string(a));
    }
  }
  // Associativity over all composable triples, grouped by the middle unit.
  std::vector<std::vector<std::int64_t>> by_range(unit_ids_.size()), by_source(unit_ids_.size());
  for (std::int64_t a = 0; a < n; ++a) {
    by_range[unit_index_[range_[a]]].push_back(a);
    by_source[unit_index_[source_[a]]].push_back(a);
  }
  for (std::int64_t b = 0; b < n; ++b) {
    for (auto a : by_source[unit_index_[range_[b]]]) {
      const auto ab = prod(a, b);
      for (auto c : by_range[unit_index_[source_[b]]]) {
        if (prod(ab, c) != prod(a, prod(b, c))) {
          const std::string w = "(" + std::to_string(a) + "," + std::to_string(b) + "," + std::to_string(c) + ")";
          throw Error(ErrorKind::StructureError, "composition not associative on triple " + w, w);
        }
      }
    }
  }
  build_index();
}

std::string FiniteExplicitGroupoid::describe() const {
  return "finite groupoid (" + std::to_string(range_.size()) + " arrows, " + std::to_string(unit_ids_.size()) +
         " units)";
}

std::vector<Unit> FiniteExplicitGroupoid::units() const {
  std::vector<Unit> out;
  for (std::size_t u = 0; u < unit_ids_.size(); ++u) out.emplace_back(static_cast<std::int64_t>(u));
  return out;
}

std::vector<Arrow> FiniteExplicitGroupoid::arrows() const {
  std::vector<Arrow> out;
  for (std::size_t a = 0; a < range_.size(); ++a) out.emplace_back(FiniteArrow{static_cast<std::int64_t>(a)});
  return out;
}

std::vector<CompositionEntry> FiniteExplicitGroupoid::composition_entries() const {
  std::vector<CompositionEntry> out;
  const auto n = range_.size();
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      const auto c = product_[a * n + b];
      if (c >= 0) out.push_back({static_cast<std::int64_t>(a), static_cast<std::int64_t>(b), c});
    }
  }
  return out;
}

std::int64_t FiniteExplicitGroupoid::id_of(const Arrow& a) const {
  const auto& f = expect<FiniteArrow>(a, describe());
  if (f.id < 0 || f.id >= static_cast<std::int64_t>(range_.size())) wrong_arrow(a, describe());
  return f.id;
}

std::int64_t FiniteExplicitGroupoid::unit_index_of_arrow(std::int64_t id) const { return unit_index_[id]; }

void FiniteExplicitGroupoid::check_unit(const Unit& x) const {
  checked_index(x, static_cast<std::int64_t>(unit_ids_.size()), describe());
}
void FiniteExplicitGroupoid::check_arrow(const Arrow& a) const { id_of(a); }
Unit FiniteExplicitGroupoid::range(const Arrow& a) const { return unit_index_of_arrow(range_[id_of(a)]); }
Unit FiniteExplicitGroupoid::source(const Arrow& a) const { return unit_index_of_arrow(source_[id_of(a)]); }

Arrow FiniteExplicitGroupoid::compose(const Arrow& a, const Arrow& b) const {
  const auto i = id_of(a), j = id_of(b);
  if (source_[i] != range_[j]) not_composable(a, b);
  return FiniteArrow{product_[static_cast<std::size_t>(i) * range_.size() + static_cast<std::size_t>(j)]};
}

Arrow FiniteExplicitGroupoid::invert(const Arrow& a) const { return FiniteArrow{inverse_[id_of(a)]}; }

Arrow FiniteExplicitGroupoid::unit_arrow(const Unit& x) const {
  return FiniteArrow{unit_ids_[checked_index(x, static_cast<std::int64_t>(unit_ids_.size()), describe())]};
}

FiberEnumeration FiniteExplicitGroupoid::fiber(const Unit& x, FiberDirection direction, std::size_t bound) const {
  const auto id = unit_ids_[checked_index(x, static_cast<std::int64_t>(unit_ids_.size()), describe())];
  const auto& table = direction == FiberDirection::Source ? source_ : range_;
  FiberEnumeration out;
  for (std::size_t a = 0; a < table.size(); ++a) {
    if (table[a] != id) continue;
    if (out.arrows.size() == bound) {
      out.truncated = true;
      break;
    }
    out.arrows.emplace_back(FiniteArrow{static_cast<std::int64_t>(a)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pair

PairGroupoid::PairGroupoid(std::int64_t n) : n_(n) {
  if (n < 1) throw Error(ErrorKind::MalformedSpec, "pair groupoid needs n >= 1");
  if (n > 140) throw Error(ErrorKind::MalformedSpec, "pair groupoid too large (n > 140)");
  build_index();
}

std::string PairGroupoid::describe() const { return "pair groupoid on " + std::to_string(n_) + " points"; }

std::vector<Unit> PairGroupoid::units() const {
  std::vector<Unit> out;
  for (std::int64_t i = 0; i < n_; ++i) out.emplace_back(i);
  return out;
}

std::vector<Arrow> PairGroupoid::arrows() const {
  std::vector<Arrow> out;
  for (std::int64_t i = 0; i < n_; ++i)
    for (std::int64_t j = 0; j < n_; ++j) out.emplace_back(PairArrow{i, j});
  return out;
}

void PairGroupoid::check_unit(const Unit& x) const { checked_index(x, n_, describe()); }

void PairGroupoid::check_arrow(const Arrow& a) const {
  const auto& p = expect<PairArrow>(a, describe());
  if (p.range < 0 || p.range >= n_ || p.source < 0 || p.source >= n_) wrong_arrow(a, describe());
}

Unit PairGroupoid::range(const Arrow& a) const {
  check_arrow(a);
  return std::get<PairArrow>(a).range;
}

Unit PairGroupoid::source(const Arrow& a) const {
  check_arrow(a);
  return std::get<PairArrow>(a).source;
}

Arrow PairGroupoid::compose(const Arrow& a, const Arrow& b) const {
  check_arrow(a);
  check_arrow(b);
  const auto& p = std::get<PairArrow>(a);
  const auto& q = std::get<PairArrow>(b);
  if (p.source != q.range) not_composable(a, b);
  return PairArrow{p.range, q.source};
}

Arrow PairGroupoid::invert(const Arrow& a) const {
  check_arrow(a);
  const auto& p = std::get<PairArrow>(a);
  return PairArrow{p.source, p.range};
}

Arrow PairGroupoid::unit_arrow(const Unit& x) const {
  const auto i = checked_index(x, n_, describe());
  return PairArrow{i, i};
}

FiberEnumeration PairGroupoid::fiber(const Unit& x, FiberDirection direction, std::size_t bound) const {
  const auto u = checked_index(x, n_, describe());
  FiberEnumeration out;
  for (std::int64_t i = 0; i < n_; ++i) {
    if (out.arrows.size() == bound) {
      out.truncated = true;
      break;
    }
    out.arrows.emplace_back(direction == FiberDirection::Source ? PairArrow{i, u} : PairArrow{u, i});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Group

GroupGroupoid::GroupGroupoid(Group group) : group_(std::move(group)) {
  if (group_.is_finite()) {
    if (*group_.order() > 4096) throw Error(ErrorKind::MalformedSpec, "finite group too large (order > 4096)");
    build_index();
  }
}

std::string GroupGroupoid::describe() const { return "group " + group_.describe(); }
std::vector<Unit> GroupGroupoid::units() const { return {Unit{std::int64_t{0}}}; }

std::vector<Arrow> GroupGroupoid::arrows() const {
  if (!group_.is_finite()) return GroupoidModel::arrows();
  std::vector<Arrow> out;
  for (auto& g : group_.elements()) out.emplace_back(GroupArrow{g});
  return out;
}

void GroupGroupoid::check_unit(const Unit& x) const { checked_index(x, 1, describe()); }

void GroupGroupoid::check_arrow(const Arrow& a) const {
  const auto& g = expect<GroupArrow>(a, describe());
  if (!group_.contains(g.g)) wrong_arrow(a, describe());
}

Unit GroupGroupoid::range(const Arrow& a) const {
  check_arrow(a);
  return std::int64_t{0};
}

Unit GroupGroupoid::source(const Arrow& a) const {
  check_arrow(a);
  return std::int64_t{0};
}

Arrow GroupGroupoid::compose(const Arrow& a, const Arrow& b) const {
  check_arrow(a);
  check_arrow(b);
  return GroupArrow{group_.multiply(std::get<GroupArrow>(a).g, std::get<GroupArrow>(b).g)};
}

Arrow GroupGroupoid::invert(const Arrow& a) const {
  check_arrow(a);
  return GroupArrow{group_.inverse(std::get<GroupArrow>(a).g)};
}

Arrow GroupGroupoid::unit_arrow(const Unit& x) const {
  check_unit(x);
  return GroupArrow{group_.identity()};
}

FiberEnumeration GroupGroupoid::fiber(const Unit& x, FiberDirection, std::size_t bound) const {
  check_unit(x);
  FiberEnumeration out;
  auto elems = group_.enumerate(bound + 1);
  out.truncated = elems.size() > bound;
  if (out.truncated) elems.pop_back();
  for (auto& g : elems) out.arrows.emplace_back(GroupArrow{std::move(g)});
  return out;
}

// ---------------------------------------------------------------------------
// GroupBundle

GroupBundleGroupoid::GroupBundleGroupoid(std::vector<Group> groups) : groups_(std::move(groups)) {
  if (groups_.empty()) throw Error(ErrorKind::MalformedSpec, "group bundle needs at least one unit");
  if (is_finite()) {
    std::int64_t total = 0;
    for (auto& g : groups_) total += *g.order();
    if (total > 4096) throw Error(ErrorKind::MalformedSpec, "group bundle too large (more than 4096 arrows)");
    build_index();
  }
}

bool GroupBundleGroupoid::is_finite() const {
  return std::all_of(groups_.begin(), groups_.end(), [](const Group& g) { return g.is_finite(); });
}

std::string GroupBundleGroupoid::describe() const {
  std::string s = "group bundle [";
  for (std::size_t i = 0; i < groups_.size(); ++i) s += (i ? ", " : "") + groups_[i].describe();
  return s + "]";
}

std::vector<Unit> GroupBundleGroupoid::units() const {
  std::vector<Unit> out;
  for (std::size_t i = 0; i < groups_.size(); ++i) out.emplace_back(static_cast<std::int64_t>(i));
  return out;
}

std::vector<Arrow> GroupBundleGroupoid::arrows() const {
  if (!is_finite()) return GroupoidModel::arrows();
  std::vector<Arrow> out;
  for (std::size_t i = 0; i < groups_.size(); ++i)
    for (auto& g : groups_[i].elements()) out.emplace_back(BundleArrow{static_cast<std::int64_t>(i), g});
  return out;
}

void GroupBundleGroupoid::check_unit(const Unit& x) const {
  checked_index(x, static_cast<std::int64_t>(groups_.size()), describe());
}

void GroupBundleGroupoid::check_arrow(const Arrow& a) const {
  const auto& b = expect<BundleArrow>(a, describe());
  if (b.unit < 0 || b.unit >= static_cast<std::int64_t>(groups_.size()) || !groups_[b.unit].contains(b.g)) {
    wrong_arrow(a, describe());
  }
}

Unit GroupBundleGroupoid::range(const Arrow& a) const {
  check_arrow(a);
  return std::get<BundleArrow>(a).unit;
}

Unit GroupBundleGroupoid::source(const Arrow& a) const { return range(a); }

Arrow GroupBundleGroupoid::compose(const Arrow& a, const Arrow& b) const {
  check_arrow(a);
  check_arrow(b);
  const auto& p = std::get<BundleArrow>(a);
  const auto& q = std::get<BundleArrow>(b);
  if (p.unit != q.unit) not_composable(a, b);
  return BundleArrow{p.unit, groups_[p.unit].multiply(p.g, q.g)};
}

Arrow GroupBundleGroupoid::invert(const Arrow& a) const {
  check_arrow(a);
  const auto& p = std::get<BundleArrow>(a);
  return BundleArrow{p.unit, groups_[p.unit].inverse(p.g)};
}

Arrow GroupBundleGroupoid::unit_arrow(const Unit& x) const {
  const auto i = checked_index(x, static_cast<std::int64_t>(groups_.size()), describe());
  return BundleArrow{i, groups_[i].identity()};
}

FiberEnumeration GroupBundleGroupoid::fiber(const Unit& x, FiberDirection, std::size_t bound) const {
  const auto i = checked_index(x, static_cast<std::int64_t>(groups_.size()), describe());
  FiberEnumeration out;
  auto elems = groups_[i].enumerate(bound + 1);
  out.truncated = elems.size() > bound;
  if (out.truncated) elems.pop_back();
  for (auto& g : elems) out.arrows.emplace_back(BundleArrow{i, std::move(g)});
  return out;
}

// ---------------------------------------------------------------------------
// TransformationFinite

namespace {

std::vector<std::int64_t> compose_perm(const std::vector<std::int64_t>& first, const std::vector<std::int64_t>& then) {
  std::vector<std::int64_t> out(first.size());
  for (std::size_t x = 0; x < first.size(); ++x) out[x] = then[first[x]];
  return out;
}

}  // namespace

TransformationGroupoid::TransformationGroupoid(std::int64_t points, Group group,
                                               std::vector<std::vector<std::int64_t>> generator_action,
                                               std::vector<std::string> labels)
    : points_(points), group_(std::move(group)), action_(std::move(generator_action)), labels_(std::move(labels)) {
  if (points_ < 1) throw Error(ErrorKind::MalformedSpec, "transformation groupoid needs at least one point");
  if (points_ > 4096) throw Error(ErrorKind::MalformedSpec, "too many points (more than 4096)");
  if (!labels_.empty() && static_cast<std::int64_t>(labels_.size()) != points_) {
    throw Error(ErrorKind::MalformedSpec, "labels must name every point");
  }
  std::size_t expected = 0;
  switch (group_.family()) {
    case GroupFamily::Zd: expected = group_.dimension(); break;
    case GroupFamily::Cyclic: expected = 1; break;
    case GroupFamily::ProductOfCyclics: expected = group_.orders().size(); break;
    case GroupFamily::Table: expected = group_.table_entries().size(); break;
    case GroupFamily::Lamplighter: expected = 2; break;
  }
  if (action_.size() != expected) {
    throw Error(ErrorKind::MalformedSpec, "action needs " + std::to_string(expected) + " permutations for " +
                                              group_.describe() + ", got " + std::to_string(action_.size()));
  }
  const auto n = static_cast<std::size_t>(points_);
  for (std::size_t i = 0; i < action_.size(); ++i) {
    const auto& p = action_[i];
    std::vector<bool> hit(n, false);
    if (p.size() != n) throw Error(ErrorKind::MalformedSpec, "permutation " + std::to_string(i) + " has wrong length");
    for (auto y : p) {
      if (y < 0 || y >= points_ || hit[y]) {
        throw Error(ErrorKind::StructureError, "action entry " + std::to_string(i) + " is not a permutation",
                    "generator " + std::to_string(i));
      }
      hit[y] = true;
    }
  }
  std::vector<std::int64_t> id(n);
  std::iota(id.begin(), id.end(), 0);

  auto perm_power = [&](std::vector<std::int64_t> p, std::int64_t k) {
    std::vector<std::int64_t> r = id;
    for (std::int64_t i = 0; i < k; ++i) r = compose_perm(r, p);
    return r;
  };
  auto require = [&](bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorKind::StructureError, "action is not a right action: " + what, what);
  };
  switch (group_.family()) {
    case GroupFamily::Zd:
    case GroupFamily::Cyclic:
    case GroupFamily::ProductOfCyclics:
      for (std::size_t i = 0; i < action_.size(); ++i) {
        for (std::size_t j = i + 1; j < action_.size(); ++j) {
          require(compose_perm(action_[i], action_[j]) == compose_perm(action_[j], action_[i]),
                  "generators " + std::to_string(i) + " and " + std::to_string(j) + " do not commute");
        }
        if (group_.family() != GroupFamily::Zd) {
          require(perm_power(action_[i], group_.orders()[i]) == id,
                  "generator " + std::to_string(i) + " does not have order dividing " +
                      std::to_string(group_.orders()[i]));
        }
      }
      break;
    case GroupFamily::Table: {
      const auto& t = group_.table_entries();
      const auto e = group_.elements().front().v[0];
      require(action_[e] == id, "identity does not act trivially");
      for (std::size_t g = 0; g < t.size(); ++g)
        for (std::size_t h = 0; h < t.size(); ++h)
          require(compose_perm(action_[g], action_[h]) == action_[t[g][h]],
                  "x.(gh) != (x.g).h for g=" + std::to_string(g) + ", h=" + std::to_string(h));
      break;
    }
    case GroupFamily::Lamplighter: {
      const auto& a = action_[0];
      const auto& s = action_[1];
      require(perm_power(a, group_.lamplighter_base()) == id, "lamp generator order does not divide the base");
      // conjugates s^-p a s^p for p up to the order of s must commute with a
      std::vector<std::int64_t> s_inv(n);
      for (std::size_t x = 0; x < n; ++x) s_inv[s[x]] = static_cast<std::int64_t>(x);
      std::vector<std::int64_t> sp = id, sp_inv = id;
      for (std::size_t p = 1; p <= n; ++p) {
        sp = compose_perm(sp, s);
        sp_inv = compose_perm(sp_inv, s_inv);
        if (sp == id) break;
        const auto conj = compose_perm(compose_perm(sp_inv, a), sp);
        require(compose_perm(conj, a) == compose_perm(a, conj),
                "lamps at distance " + std::to_string(p) + " do not commute");
      }
      break;
    }
  }

  cycle_of_.resize(action_.size());
  pos_in_cycle_.resize(action_.size());
  cycles_.resize(action_.size());
  for (std::size_t i = 0; i < action_.size(); ++i) {
    cycle_of_[i].assign(n, -1);
    pos_in_cycle_[i].assign(n, 0);
    for (std::size_t x = 0; x < n; ++x) {
      if (cycle_of_[i][x] >= 0) continue;
      std::vector<std::int64_t> cyc;
      auto y = static_cast<std::int64_t>(x);
      while (cycle_of_[i][y] < 0) {
        cycle_of_[i][y] = static_cast<std::int64_t>(cycles_[i].size());
        pos_in_cycle_[i][y] = static_cast<std::int64_t>(cyc.size());
        cyc.push_back(y);
        y = action_[i][y];
      }
      cycles_[i].push_back(std::move(cyc));
    }
  }
  if (group_.is_finite()) {
    if (*group_.order() * points_ > 20000) {
      throw Error(ErrorKind::MalformedSpec, "transformation groupoid too large (more than 20000 arrows)");
    }
    build_index();
  }
}

std::int64_t TransformationGroupoid::apply_power(std::size_t generator, std::int64_t x, std::int64_t k) const {
  const auto& cyc = cycles_[generator][cycle_of_[generator][x]];
  const auto len = static_cast<std::int64_t>(cyc.size());
  auto pos = (pos_in_cycle_[generator][x] + k % len) % len;
  if (pos < 0) pos += len;
  return cyc[pos];
}

std::int64_t TransformationGroupoid::act(std::int64_t x, const GroupElement& g) const {
  const auto& v = g.v;
  switch (group_.family()) {
    case GroupFamily::Zd:
    case GroupFamily::Cyclic:
    case GroupFamily::ProductOfCyclics:
      for (std::size_t i = 0; i < v.size(); ++i) x = apply_power(i, x, v[i]);
      return x;
    case GroupFamily::Table:
      return action_[v[0]][x];
    case GroupFamily::Lamplighter:
      // (f, t) = prod_p s^p a^{f(p)} s^-p  *  s^t
      for (std::size_t j = 1; j + 1 < v.size(); j += 2) {
        x = apply_power(1, x, v[j]);
        x = apply_power(0, x, v[j + 1]);
        x = apply_power(1, x, -v[j]);
      }
      return apply_power(1, x, v[0]);
  }
  return x;
}

std::string TransformationGroupoid::describe() const {
  return "transformation groupoid of " + group_.describe() + " on " + std::to_string(points_) + " points";
}

std::vector<Unit> TransformationGroupoid::units() const {
  std::vector<Unit> out;
  for (std::int64_t i = 0; i < points_; ++i) out.emplace_back(i);
  return out;
}

std::vector<Arrow> TransformationGroupoid::arrows() const {
  if (!group_.is_finite()) return GroupoidModel::arrows();
  std::vector<Arrow> out;
  const auto elems = group_.elements();
  for (std::int64_t x = 0; x < points_; ++x)
    for (auto& g : elems) out.emplace_back(ActionArrow{x, g});
  return out;
}

void TransformationGroupoid::check_unit(const Unit& x) const { checked_index(x, points_, describe()); }

void TransformationGroupoid::check_arrow(const Arrow& a) const {
  const auto& p = expect<ActionArrow>(a, describe());
  if (p.point < 0 || p.point >= points_ || !group_.contains(p.g)) wrong_arrow(a, describe());
}

Unit TransformationGroupoid::range(const Arrow& a) const {
  check_arrow(a);
  return std::get<ActionArrow>(a).point;
}

Unit TransformationGroupoid::source(const Arrow& a) const {
  check_arrow(a);
  const auto& p = std::get<ActionArrow>(a);
  return act(p.point, p.g);
}

Arrow TransformationGroupoid::compose(const Arrow& a, const Arrow& b) const {
  check_arrow(a);
  check_arrow(b);
  const auto& p = std::get<ActionArrow>(a);
  const auto& q = std::get<ActionArrow>(b);
  if (act(p.point, p.g) != q.point) not_composable(a, b);
  return ActionArrow{p.point, group_.multiply(p.g, q.g)};
}

Arrow TransformationGroupoid::invert(const Arrow& a) const {
  check_arrow(a);
  const auto& p = std::get<ActionArrow>(a);
  return ActionArrow{act(p.point, p.g), group_.inverse(p.g)};
}

Arrow TransformationGroupoid::unit_arrow(const Unit& x) const {
  return ActionArrow{checked_index(x, points_, describe()), group_.identity()};
}

FiberEnumeration TransformationGroupoid::fiber(const Unit& x, FiberDirection direction, std::size_t bound) const {
  const auto u = checked_index(x, points_, describe());
  FiberEnumeration out;
  auto elems = group_.enumerate(bound + 1);
  out.truncated = elems.size() > bound;
  if (out.truncated) elems.pop_back();
  for (auto& g : elems) {
    if (direction == FiberDirection::Range) {
      out.arrows.emplace_back(ActionArrow{u, std::move(g)});
    } else {
      out.arrows.emplace_back(ActionArrow{act(u, group_.inverse(g)), std::move(g)});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// CylinderShift

CylinderShiftGroupoid::CylinderShiftGroupoid(Subshift subshift, std::size_t depth, std::size_t max_window)
    : subshift_(std::move(subshift)), depth_(depth), max_window_(max_window) {
  if (depth_ < 1) throw Error(ErrorKind::MalformedSpec, "depth must be at least 1");
  if (max_window_ < 1) throw Error(ErrorKind::MalformedSpec, "max_window must be at least 1");
  if (!subshift_.is_nonempty()) {
    throw Error(ErrorKind::StructureError, "forbidden words leave the subshift empty", "no bi-infinite legal path");
  }
}

std::string CylinderShiftGroupoid::describe() const {
  std::string s = subshift_.is_full_shift() ? "full shift" : "subshift of finite type";
  return s + " over " + std::to_string(subshift_.alphabet()) + " letters with Z acting by shift";
}

std::vector<Unit> CylinderShiftGroupoid::units() const {
  throw Error(ErrorKind::UnsupportedModel, "unit space of " + describe() + " is infinite");
}

void CylinderShiftGroupoid::check_unit(const Unit& x) const {
  const auto* p = std::get_if<SequencePoint>(&x);
  if (!p) throw Error(ErrorKind::UnknownArrow, "unit " + to_string(x) + " is not a sequence point", to_string(x));
  if (!subshift_.point_is_legal(*p)) {
    throw Error(ErrorKind::UnknownArrow, "point " + p->to_string() + " is not in the subshift", p->to_string());
  }
}

void CylinderShiftGroupoid::check_arrow(const Arrow& a) const {
  const auto& s = expect<ShiftArrow>(a, describe());
  check_unit(s.point);
}

Unit CylinderShiftGroupoid::range(const Arrow& a) const {
  const auto& s = expect<ShiftArrow>(a, describe());
  return s.point;
}

Unit CylinderShiftGroupoid::source(const Arrow& a) const {
  const auto& s = expect<ShiftArrow>(a, describe());
  return s.point.shifted(s.shift);
}

Arrow CylinderShiftGroupoid::compose(const Arrow& a, const Arrow& b) const {
  const auto& p = expect<ShiftArrow>(a, describe());
  const auto& q = expect<ShiftArrow>(b, describe());
  if (p.point.shifted(p.shift) != q.point) not_composable(a, b);
  return ShiftArrow{p.point, p.shift + q.shift};
}

Arrow CylinderShiftGroupoid::invert(const Arrow& a) const {
  const auto& p = expect<ShiftArrow>(a, describe());
  return ShiftArrow{p.point.shifted(p.shift), -p.shift};
}

Arrow CylinderShiftGroupoid::unit_arrow(const Unit& x) const {
  check_unit(x);
  return ShiftArrow{std::get<SequencePoint>(x), 0};
}

FiberEnumeration CylinderShiftGroupoid::fiber(const Unit& x, FiberDirection direction, std::size_t bound) const {
  check_unit(x);
  const auto& p = std::get<SequencePoint>(x);
  FiberEnumeration out;
  out.truncated = true;
  for (std::size_t i = 0; i < bound; ++i) {
    const auto n = integer_at(i);
    if (direction == FiberDirection::Range) {
      out.arrows.emplace_back(ShiftArrow{p, n});
    } else {
      out.arrows.emplace_back(ShiftArrow{p.shifted(-n), n});
    }
  }
  return out;
}

void CylinderShiftGroupoid::check_bundle(const ArrowBundle& b) const {
  for (const auto& [pos, sym] : b.constraint.symbols) {
    if (sym < 0 || sym >= subshift_.alphabet()) {
      throw Error(ErrorKind::UnknownArrow, "symbol " + std::to_string(sym) + " outside the alphabet", to_string(b));
    }
  }
  if (!b.constraint.empty() &&
      static_cast<std::size_t>(b.constraint.max_position() - b.constraint.min_position() + 1) > max_window_) {
    throw Error(ErrorKind::BundleIncompatible,
                "bundle window wider than max_window " + std::to_string(max_window_), to_string(b));
  }
  if (!subshift_.is_consistent(b.constraint)) {
    throw Error(ErrorKind::UnknownArrow, "bundle constraint admits no point of the subshift", to_string(b));
  }
}

std::optional<Arrow> CylinderShiftGroupoid::bundle_arrow_with_source(const ArrowBundle& b,
                                                                     const SequencePoint& x) const {
  auto y = x.shifted(-b.shift);
  if (!b.constraint.matches(y)) return std::nullopt;
  return Arrow{ShiftArrow{std::move(y), b.shift}};
}

std::optional<Arrow> CylinderShiftGroupoid::bundle_arrow_with_range(const ArrowBundle& b,
                                                                    const SequencePoint& x) const {
  if (!b.constraint.matches(x)) return std::nullopt;
  return Arrow{ShiftArrow{x, b.shift}};
}

bool CylinderShiftGroupoid::bundle_contains(const ArrowBundle& b, const Arrow& a) const {
  const auto* s = std::get_if<ShiftArrow>(&a);
  return s && s->shift == b.shift && b.constraint.matches(s->point);
}

std::optional<ArrowBundle> CylinderShiftGroupoid::bundle_product(const ArrowBundle& b1, const ArrowBundle& b2) const {
  auto meet = b1.constraint.intersect(b2.constraint.translated(b1.shift));
  if (!meet) return std::nullopt;
  if (!meet->empty() && static_cast<std::size_t>(meet->max_position() - meet->min_position() + 1) > max_window_) {
    throw Error(ErrorKind::BundleIncompatible,
                "product window exceeds max_window " + std::to_string(max_window_),
                to_string(b1) + " * " + to_string(b2));
  }
  if (!subshift_.is_consistent(*meet)) return std::nullopt;
  return ArrowBundle{std::move(*meet), b1.shift + b2.shift};
}

ArrowBundle CylinderShiftGroupoid::bundle_inverse(const ArrowBundle& b) const {
  return ArrowBundle{b.constraint.translated(-b.shift), -b.shift};
}

}  // namespace etale
