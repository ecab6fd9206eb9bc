#include "etale/cocycle.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "etale/error.hpp"
#include "etale/integer_matrix.hpp"

namespace etale {

namespace {

constexpr std::int64_t kMaxDenominator = 2147483647;

std::int64_t checked_lcm(std::int64_t a, std::int64_t b) {
  const auto l = std::lcm(a, b);
  if (l > kMaxDenominator || l <= 0) {
    throw Error(ErrorKind::IncompatibleDenominator, "phase denominator exceeds 2^31-1");
  }
  return l;
}

const GroupElement& group_part(const Arrow& a) {
  if (const auto* p = std::get_if<ActionArrow>(&a)) return p->g;
  if (const auto* p = std::get_if<BundleArrow>(&a)) return p->g;
  if (const auto* p = std::get_if<GroupArrow>(&a)) return p->g;
  throw Error(ErrorKind::IncompatibleVariant, "arrow " + to_string(a) + " has no group component");
}

GroupElement shift_part(const Arrow& a) {
  if (const auto* p = std::get_if<ShiftArrow>(&a)) return GroupElement{{p->shift}};
  return group_part(a);
}

std::string pair_string(const Arrow& a, const Arrow& b) { return "(" + to_string(a) + ", " + to_string(b) + ")"; }

RationalMatrix congruence(const RationalMatrix& theta, const std::vector<std::vector<std::int64_t>>& basis) {
  // B^T Theta B with the basis vectors as columns of B
  const auto r = basis.size();
  const auto d = theta.size();
  RationalMatrix out(r, std::vector<mpq_class>(r, 0));
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j)
      for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b) out[i][j] += basis[i][a] * theta[a][b] * basis[j][b];
  return out;
}

}  // namespace

Phase OneCochain::at(const Arrow& a) const {
  auto it = values.find(a);
  return it == values.end() ? Phase() : it->second;
}

std::string to_string(CocycleKind kind) {
  switch (kind) {
    case CocycleKind::Trivial: return "trivial";
    case CocycleKind::FiniteTable: return "table";
    case CocycleKind::Bicharacter: return "bicharacter";
    case CocycleKind::Pullback: return "pullback";
    case CocycleKind::Restriction: return "restriction";
  }
  return "unknown";
}

TwoCocycle TwoCocycle::trivial(ModelPtr model) {
  if (!model) throw Error(ErrorKind::InvalidArgument, "cocycle needs a model");
  return TwoCocycle(std::move(model));
}

TwoCocycle TwoCocycle::finite_table(ModelPtr model, const std::map<std::pair<Arrow, Arrow>, Phase>& entries,
                                    std::int64_t denominator) {
  if (!model) throw Error(ErrorKind::InvalidArgument, "cocycle needs a model");
  const auto* idx = model->finite_index();
  if (!idx) throw Error(ErrorKind::IncompatibleVariant, "table cocycles need a finite model");
  if (denominator < 1 || denominator > kMaxDenominator) {
    throw Error(ErrorKind::IncompatibleDenominator, "table denominator must be in [1, 2^31-1]");
  }
  const auto n = idx->size();
  auto table = std::make_shared<std::vector<Phase>>(n * n);
  for (const auto& [key, value] : entries) {
    const auto& [a, b] = key;
    const auto i = idx->at(a), j = idx->at(b);
    if (idx->source_unit[i] != idx->range_unit[j]) {
      throw Error(ErrorKind::NotComposable, "table entry for non-composable pair " + pair_string(a, b),
                  pair_string(a, b));
    }
    if (denominator % value.denominator() != 0) {
      throw Error(ErrorKind::IncompatibleDenominator,
                  "entry " + value.to_string() + " at " + pair_string(a, b) + " is not a multiple of 1/" +
                      std::to_string(denominator),
                  pair_string(a, b));
    }
    (*table)[i * n + j] = value;
  }
  TwoCocycle c(std::move(model));
  c.kind_ = CocycleKind::FiniteTable;
  c.denominator_ = denominator;
  c.table_ = std::move(table);
  return c;
}

TwoCocycle TwoCocycle::bicharacter(ModelPtr model, RationalMatrix theta) {
  if (!model) throw Error(ErrorKind::InvalidArgument, "cocycle needs a model");
  const auto* gm = dynamic_cast<const GroupGroupoid*>(model.get());
  if (!gm) throw Error(ErrorKind::IncompatibleVariant, "bicharacter cocycles live on group models");
  const auto& g = gm->group();
  std::vector<std::int64_t> orders;
  switch (g.family()) {
    case GroupFamily::Zd: orders.assign(g.dimension(), 0); break;
    case GroupFamily::Cyclic:
    case GroupFamily::ProductOfCyclics: orders = g.orders(); break;
    default:
      throw Error(ErrorKind::IncompatibleVariant, "bicharacter cocycles need a Zd, cyclic or product-of-cyclics group");
  }
  const auto d = orders.size();
  if (theta.size() != d) throw Error(ErrorKind::MalformedSpec, "theta must be " + std::to_string(d) + "x" + std::to_string(d));
  std::int64_t den = 1;
  for (std::size_t i = 0; i < d; ++i) {
    if (theta[i].size() != d) throw Error(ErrorKind::MalformedSpec, "theta must be square");
    for (std::size_t j = 0; j < d; ++j) {
      theta[i][j].canonicalize();
      if (!theta[i][j].get_den().fits_slong_p()) throw Error(ErrorKind::IncompatibleDenominator, "theta denominator too large");
      den = checked_lcm(den, theta[i][j].get_den().get_si());
      for (auto n : {orders[i], orders[j]}) {
        if (n == 0) continue;
        mpq_class t = theta[i][j] * n;
        if (t.get_den() != 1) {
          throw Error(ErrorKind::IncompatibleVariant,
                      "theta[" + std::to_string(i) + "][" + std::to_string(j) + "] = " + theta[i][j].get_str() +
                          " does not descend to the finite quotient of order " + std::to_string(n));
        }
      }
    }
  }
  TwoCocycle c(std::move(model));
  c.kind_ = CocycleKind::Bicharacter;
  c.denominator_ = den;
  c.theta_ = std::move(theta);
  return c;
}

TwoCocycle TwoCocycle::pullback(ModelPtr model, TwoCocycle group_cocycle) {
  if (!model) throw Error(ErrorKind::InvalidArgument, "cocycle needs a model");
  const auto* inner_model = dynamic_cast<const GroupGroupoid*>(group_cocycle.model_.get());
  if (!inner_model) throw Error(ErrorKind::IncompatibleVariant, "pullbacks need a cocycle on a group model");
  const auto& h = inner_model->group();
  auto mismatch = [&](const Group& g) {
    if (!(g == h)) {
      throw Error(ErrorKind::IncompatibleVariant,
                  "pullback cocycle lives on " + h.describe() + " but the model acts by " + g.describe());
    }
  };
  switch (model->kind()) {
    case ModelKind::TransformationFinite: mismatch(dynamic_cast<const TransformationGroupoid&>(*model).group()); break;
    case ModelKind::Group: mismatch(dynamic_cast<const GroupGroupoid&>(*model).group()); break;
    case ModelKind::GroupBundle:
      for (const auto& g : dynamic_cast<const GroupBundleGroupoid&>(*model).groups()) mismatch(g);
      break;
    case ModelKind::CylinderShift: mismatch(Group::zd(1)); break;
    default: throw Error(ErrorKind::IncompatibleVariant, "pullbacks are not defined on " + model->describe());
  }
  TwoCocycle c(std::move(model));
  c.kind_ = CocycleKind::Pullback;
  c.denominator_ = group_cocycle.denominator_;
  c.inner_ = std::make_shared<TwoCocycle>(std::move(group_cocycle));
  return c;
}

TwoCocycle TwoCocycle::restriction(ModelPtr group_model, TwoCocycle sigma,
                                   std::function<Arrow(const GroupElement&)> embed) {
  if (!dynamic_cast<const GroupGroupoid*>(group_model.get())) {
    throw Error(ErrorKind::IncompatibleVariant, "restrictions live on group models");
  }
  TwoCocycle c(std::move(group_model));
  c.kind_ = CocycleKind::Restriction;
  c.denominator_ = sigma.denominator_;
  c.inner_ = std::make_shared<TwoCocycle>(std::move(sigma));
  c.embed_ = std::make_shared<std::function<Arrow(const GroupElement&)>>(std::move(embed));
  return c;
}

TwoCocycle TwoCocycle::tabulate(const TwoCocycle& sigma) {
  const auto* idx = sigma.model_->finite_index();
  if (!idx) throw Error(ErrorKind::UnsupportedModel, "tabulation needs a finite model");
  const auto n = idx->size();
  auto table = std::make_shared<std::vector<Phase>>(n * n);
  std::int64_t den = 1;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (idx->source_unit[i] != idx->range_unit[j]) continue;
      const auto p = sigma.eval_unchecked(idx->arrows[i], idx->arrows[j]);
      den = checked_lcm(den, p.denominator());
      (*table)[i * n + j] = p;
    }
  }
  TwoCocycle c(sigma.model_);
  c.kind_ = CocycleKind::FiniteTable;
  c.denominator_ = den;
  c.table_ = std::move(table);
  return c;
}

TwoCocycle TwoCocycle::sum(const TwoCocycle& a, const TwoCocycle& b) {
  if (a.model_ != b.model_) throw Error(ErrorKind::ModelMismatch, "cocycles live on different models");
  auto ta = tabulate(a);
  const auto tb = tabulate(b);
  auto table = std::make_shared<std::vector<Phase>>(*ta.table_);
  for (std::size_t i = 0; i < table->size(); ++i) (*table)[i] += (*tb.table_)[i];
  ta.table_ = std::move(table);
  ta.denominator_ = checked_lcm(ta.denominator_, tb.denominator_);
  return ta;
}

std::map<std::pair<Arrow, Arrow>, Phase> TwoCocycle::table_entries() const {
  std::map<std::pair<Arrow, Arrow>, Phase> out;
  if (kind_ != CocycleKind::FiniteTable) return out;
  const auto* idx = model_->finite_index();
  const auto n = idx->size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (!(*table_)[i * n + j].is_zero()) out.emplace(std::make_pair(idx->arrows[i], idx->arrows[j]), (*table_)[i * n + j]);
  return out;
}

bool TwoCocycle::is_trivial() const {
  switch (kind_) {
    case CocycleKind::Trivial: return true;
    case CocycleKind::FiniteTable:
      return std::all_of(table_->begin(), table_->end(), [](const Phase& p) { return p.is_zero(); });
    case CocycleKind::Bicharacter:
      for (const auto& row : theta_)
        for (const auto& t : row)
          if (t.get_den() != 1) return false;
      return true;
    case CocycleKind::Pullback:
    case CocycleKind::Restriction: return inner_->is_trivial();
  }
  return false;
}

Phase TwoCocycle::eval(const Arrow& a, const Arrow& b) const {
  model_->check_arrow(a);
  model_->check_arrow(b);
  if (!model_->composable(a, b)) model_->compose(a, b);
  return eval_unchecked(a, b);
}

Phase TwoCocycle::eval_unchecked(const Arrow& a, const Arrow& b) const {
  switch (kind_) {
    case CocycleKind::Trivial: return Phase();
    case CocycleKind::FiniteTable: {
      const auto* idx = model_->finite_index();
      return (*table_)[idx->at(a) * idx->size() + idx->at(b)];
    }
    case CocycleKind::Bicharacter: {
      const auto& m = std::get<GroupArrow>(a).g.v;
      const auto& n = std::get<GroupArrow>(b).g.v;
      mpq_class q = 0;
      for (std::size_t i = 0; i < m.size(); ++i) {
        if (m[i] == 0) continue;
        for (std::size_t j = 0; j < n.size(); ++j) {
          if (n[j] == 0 || sgn(theta_[i][j]) == 0) continue;
          q += theta_[i][j] * mpz_class(static_cast<long>(m[i])) * mpz_class(static_cast<long>(n[j]));
        }
      }
      return Phase::from_rational(q);
    }
    case CocycleKind::Pullback:
      return inner_->eval_unchecked(GroupArrow{shift_part(a)}, GroupArrow{shift_part(b)});
    case CocycleKind::Restriction: {
      const auto& f = *embed_;
      return inner_->eval_unchecked(f(std::get<GroupArrow>(a).g), f(std::get<GroupArrow>(b).g));
    }
  }
  return Phase();
}

std::string TwoCocycle::describe() const {
  switch (kind_) {
    case CocycleKind::Trivial: return "trivial cocycle";
    case CocycleKind::FiniteTable: return "table cocycle with values in (1/" + std::to_string(denominator_) + ")Z/Z";
    case CocycleKind::Bicharacter: {
      std::string s = "bicharacter cocycle, theta = [";
      for (std::size_t i = 0; i < theta_.size(); ++i) {
        s += i ? "; " : "";
        for (std::size_t j = 0; j < theta_[i].size(); ++j) s += (j ? " " : "") + theta_[i][j].get_str();
      }
      return s + "]";
    }
    case CocycleKind::Pullback: return "pullback of the group cocycle (" + inner_->describe() + ")";
    case CocycleKind::Restriction: return "restriction of (" + inner_->describe() + ")";
  }
  return "cocycle";
}

// ---------------------------------------------------------------------------

namespace {

struct Checker {
  const TwoCocycle& sigma;
  const GroupoidModel& m;
  CocycleReport report;

  bool normalization(const Arrow& g) {
    report.pairs_checked += 2;
    const auto r = m.unit_arrow(m.range(g));
    const auto s = m.unit_arrow(m.source(g));
    if (!sigma.eval_unchecked(r, g).is_zero()) {
      fail("sigma(r(g), g) != 1", pair_string(r, g));
      return false;
    }
    if (!sigma.eval_unchecked(g, s).is_zero()) {
      fail("sigma(g, s(g)) != 1", pair_string(g, s));
      return false;
    }
    return true;
  }

  bool identity(const Arrow& a, const Arrow& b, const Arrow& c, const Arrow& ab, const Arrow& bc) {
    ++report.triples_checked;
    const auto lhs = sigma.eval_unchecked(a, b) + sigma.eval_unchecked(ab, c);
    const auto rhs = sigma.eval_unchecked(b, c) + sigma.eval_unchecked(a, bc);
    if (lhs != rhs) {
      fail("cocycle identity fails (" + lhs.to_string() + " vs " + rhs.to_string() + ")",
           "(" + to_string(a) + ", " + to_string(b) + ", " + to_string(c) + ")");
      return false;
    }
    return true;
  }

  void fail(const std::string& msg, const std::string& witness) {
    report.valid = false;
    report.message = msg;
    report.witness = witness;
  }
};

std::vector<Unit> sample_units(const GroupoidModel& m, std::size_t depth) {
  if (m.has_finite_unit_space()) {
    auto us = m.units();
    if (us.size() > 16) us.resize(16);
    return us;
  }
  const auto& cyl = dynamic_cast<const CylinderShiftGroupoid&>(m);
  std::vector<Unit> out;
  const auto& x = cyl.subshift();
  // a few legal periodic points and one non-periodic point
  for (std::int64_t len = 1; len <= 3 && out.size() < 6; ++len) {
    for (const auto& w : x.legal_fillings(Cylinder{}, 0, len - 1, 8)) {
      auto p = SequencePoint::periodic(w);
      if (x.point_is_legal(p) && std::find(out.begin(), out.end(), Unit{p}) == out.end()) out.emplace_back(p);
    }
  }
  if (auto p = x.complete(Cylinder{}, -static_cast<std::int64_t>(depth), static_cast<std::int64_t>(depth))) {
    out.emplace_back(*p);
  }
  return out;
}

}  // namespace

CocycleReport check_cocycle(const TwoCocycle& sigma, std::size_t depth) {
  const auto& m = sigma.groupoid();
  Checker ck{sigma, m, {}};
  if (const auto* idx = m.finite_index()) {
    ck.report.exhaustive = true;
    const auto n = idx->size();
    for (const auto& g : idx->arrows)
      if (!ck.normalization(g)) return ck.report;
    std::vector<std::vector<std::size_t>> by_range(m.units().size());
    for (std::size_t i = 0; i < n; ++i) by_range[idx->range_unit[i]].push_back(i);
    std::vector<std::size_t> prod(n * n, 0);
    for (std::size_t a = 0; a < n; ++a)
      for (auto b : by_range[idx->source_unit[a]]) prod[a * n + b] = idx->at(m.compose(idx->arrows[a], idx->arrows[b]));
    for (std::size_t a = 0; a < n; ++a) {
      for (auto b : by_range[idx->source_unit[a]]) {
        ++ck.report.pairs_checked;
        for (auto c : by_range[idx->source_unit[b]]) {
          if (!ck.identity(idx->arrows[a], idx->arrows[b], idx->arrows[c], idx->arrows[prod[a * n + b]],
                           idx->arrows[prod[b * n + c]])) {
            return ck.report;
          }
        }
      }
    }
    return ck.report;
  }
  const std::size_t radius = std::min<std::size_t>(2 * std::max<std::size_t>(depth, 1) + 1, 21);
  for (const auto& x : sample_units(m, depth)) {
    for (const auto& a : m.fiber(x, FiberDirection::Range, radius).arrows) {
      if (!ck.normalization(a)) return ck.report;
      for (const auto& b : m.fiber(m.source(a), FiberDirection::Range, radius).arrows) {
        ++ck.report.pairs_checked;
        const auto ab = m.compose(a, b);
        for (const auto& c : m.fiber(m.source(b), FiberDirection::Range, radius).arrows) {
          if (!ck.identity(a, b, c, ab, m.compose(b, c))) return ck.report;
        }
      }
    }
  }
  return ck.report;
}

CocycleReport validate_cocycle(const TwoCocycle& sigma, std::size_t depth) {
  auto r = check_cocycle(sigma, depth);
  if (!r.valid) throw Error(ErrorKind::CocycleViolation, r.message + " at " + r.witness, r.witness);
  return r;
}

TwoCocycle coboundary_from(ModelPtr model, const OneCochain& b) {
  const auto* idx = model->finite_index();
  if (!idx) throw Error(ErrorKind::UnsupportedModel, "coboundaries are computed on finite models");
  for (const auto& [a, v] : b.values) {
    model->check_arrow(a);
    if (model->is_unit(a) && !v.is_zero()) {
      throw Error(ErrorKind::InvalidArgument, "1-cochain is not normalized at unit arrow " + to_string(a), to_string(a));
    }
  }
  std::map<std::pair<Arrow, Arrow>, Phase> entries;
  std::int64_t den = 1;
  const auto n = idx->size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (idx->source_unit[i] != idx->range_unit[j]) continue;
      const auto& x = idx->arrows[i];
      const auto& y = idx->arrows[j];
      const auto v = b.at(x) + b.at(y) - b.at(model->compose(x, y));
      if (v.is_zero()) continue;
      den = checked_lcm(den, v.denominator());
      entries.emplace(std::make_pair(x, y), v);
    }
  }
  if (entries.empty()) return TwoCocycle::trivial(std::move(model));
  return TwoCocycle::finite_table(std::move(model), entries, den);
}

CohomologyResult cohomologous(const TwoCocycle& sigma1, const TwoCocycle& sigma2, std::int64_t level) {
  if (sigma1.model() != sigma2.model()) throw Error(ErrorKind::ModelMismatch, "cocycles live on different models");
  if (level < 1 || level > kMaxDenominator) throw Error(ErrorKind::IncompatibleDenominator, "level must be in [1, 2^31-1]");
  const auto& m = sigma1.groupoid();
  const auto* idx = m.finite_index();
  if (!idx) throw Error(ErrorKind::UnsupportedModel, "cohomology is computed on finite models");
  const auto n = idx->size();
  std::vector<std::int64_t> var(n, -1);
  std::size_t nvars = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (!m.is_unit(idx->arrows[i])) var[i] = static_cast<std::int64_t>(nvars++);
  struct Row {
    std::map<std::size_t, std::int64_t> coeff;
    std::int64_t rhs;
  };
  std::vector<Row> rows;
  for (std::size_t i = 0; i < n; ++i) {
    if (var[i] < 0) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (var[j] < 0 || idx->source_unit[i] != idx->range_unit[j]) continue;
      const auto& a = idx->arrows[i];
      const auto& b = idx->arrows[j];
      const auto d = sigma1.eval_unchecked(a, b) - sigma2.eval_unchecked(a, b);
      if (level % d.denominator() != 0) {
        throw Error(ErrorKind::IncompatibleDenominator,
                    "difference " + d.to_string() + " at " + pair_string(a, b) + " is not a multiple of 1/" +
                        std::to_string(level),
                    pair_string(a, b));
      }
      Row r;
      r.rhs = d.numerator() * (level / d.denominator());
      r.coeff[var[i]] += 1;
      r.coeff[var[j]] += 1;
      const auto k = idx->at(m.compose(a, b));
      if (var[k] >= 0) r.coeff[var[k]] -= 1;
      rows.push_back(std::move(r));
    }
  }
  if (rows.size() > 40000 || nvars > 2000) {
    throw Error(ErrorKind::UnsupportedModel, "cohomology system too large");
  }
  CohomologyResult out;
  out.level = level;
  if (nvars == 0 || rows.empty()) {
    out.cohomologous = std::all_of(rows.begin(), rows.end(), [&](const Row& r) { return r.rhs % level == 0; });
    return out;
  }
  IntMatrix a(rows.size(), nvars);
  std::vector<std::int64_t> rhs(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (const auto& [c, v] : rows[r].coeff) a(r, c) = static_cast<long>(v);
    rhs[r] = rows[r].rhs;
  }
  auto x = solve_mod(a, rhs, level);
  if (!x) return out;
  out.cohomologous = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (var[i] < 0) continue;
    const Phase p((*x)[var[i]], level);
    if (!p.is_zero()) out.witness.values.emplace(idx->arrows[i], p);
  }
  return out;
}

// ---------------------------------------------------------------------------

FiberCocycle restrict_to_fiber(const TwoCocycle& sigma, const Unit& x, std::size_t bound) {
  const auto& m = sigma.groupoid();
  auto iso = interior_isotropy_group(m, x, bound);
  FiberCocycle out{iso, nullptr, TwoCocycle::trivial(std::make_shared<GroupGroupoid>(Group::cyclic(1))), {}, {}};
  const bool trivial = sigma.is_trivial();
  std::function<Arrow(const GroupElement&)> embed;
  std::shared_ptr<GroupGroupoid> group;
  switch (iso.shape) {
    case IsotropyShape::Trivial: {
      group = std::make_shared<GroupGroupoid>(Group::cyclic(1));
      const auto unit = m.unit_arrow(x);
      embed = [unit](const GroupElement&) { return unit; };
      break;
    }
    case IsotropyShape::Finite: {
      const auto& els = iso.elements;
      const auto k = els.size();
      std::map<Arrow, std::int64_t> pos;
      for (std::size_t i = 0; i < k; ++i) pos.emplace(els[i], static_cast<std::int64_t>(i));
      std::vector<std::vector<std::int64_t>> table(k, std::vector<std::int64_t>(k));
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) table[i][j] = pos.at(m.compose(els[i], els[j]));
      group = std::make_shared<GroupGroupoid>(Group::table(std::move(table)));
      embed = [els](const GroupElement& g) { return els.at(static_cast<std::size_t>(g.v.at(0))); };
      break;
    }
    case IsotropyShape::Lattice: {
      group = std::make_shared<GroupGroupoid>(Group::zd(iso.basis.size()));
      const ModelPtr keep = sigma.model();
      embed = [keep, iso](const GroupElement& g) { return lattice_arrow(*keep, iso, g.v); };
      break;
    }
    case IsotropyShape::LamplighterSubgroup: {
      const Group* g = nullptr;
      if (const auto* t = dynamic_cast<const TransformationGroupoid*>(&m)) g = &t->group();
      if (const auto* t = dynamic_cast<const GroupGroupoid*>(&m)) g = &t->group();
      if (const auto* t = dynamic_cast<const GroupBundleGroupoid*>(&m)) g = &t->groups()[unit_index(x)];
      group = std::make_shared<GroupGroupoid>(*g);
      const auto kind = m.kind();
      const auto u = unit_index(x);
      embed = [kind, u](const GroupElement& h) -> Arrow {
        if (kind == ModelKind::TransformationFinite) return ActionArrow{u, h};
        if (kind == ModelKind::GroupBundle) return BundleArrow{u, h};
        return GroupArrow{h};
      };
      const ModelPtr keep = sigma.model();
      out.member = [keep, embed, x](const GroupElement& h) { return keep->source(embed(h)) == x; };
      break;
    }
  }
  out.group = group;
  out.embed = embed;
  if (!out.member) out.member = [](const GroupElement&) { return true; };

  if (trivial || iso.shape == IsotropyShape::Trivial) {
    out.sigma = TwoCocycle::trivial(group);
    return out;
  }
  if (iso.shape == IsotropyShape::Finite) {
    std::map<std::pair<Arrow, Arrow>, Phase> entries;
    std::int64_t den = 1;
    const auto k = iso.elements.size();
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        const auto p = sigma.eval_unchecked(iso.elements[i], iso.elements[j]);
        if (p.is_zero()) continue;
        den = checked_lcm(den, p.denominator());
        entries.emplace(std::make_pair(Arrow{GroupArrow{{{static_cast<std::int64_t>(i)}}}},
                                       Arrow{GroupArrow{{{static_cast<std::int64_t>(j)}}}}),
                        p);
      }
    }
    out.sigma = TwoCocycle::finite_table(group, entries, den);
    return out;
  }
  if (iso.shape == IsotropyShape::Lattice) {
    const TwoCocycle* bich = nullptr;
    if (sigma.kind() == CocycleKind::Bicharacter) bich = &sigma;
    if (sigma.kind() == CocycleKind::Pullback && sigma.group_cocycle().kind() == CocycleKind::Bicharacter) {
      bich = &sigma.group_cocycle();
    }
    if (bich && dynamic_cast<const GroupGroupoid&>(bich->groupoid()).group().family() == GroupFamily::Zd) {
      out.sigma = TwoCocycle::bicharacter(group, congruence(bich->theta(), iso.basis));
      return out;
    }
  }
  if (iso.shape == IsotropyShape::LamplighterSubgroup && sigma.kind() == CocycleKind::Pullback) {
    out.sigma = sigma.group_cocycle();
    return out;
  }
  out.sigma = TwoCocycle::restriction(group, sigma, embed);
  return out;
}

MackeyGroup mackey_group(const TwoCocycle& c, std::int64_t level) {
  const auto* gm = dynamic_cast<const GroupGroupoid*>(&c.groupoid());
  if (!gm) throw Error(ErrorKind::IncompatibleVariant, "Mackey groups are built from group cocycles");
  if (level < 1 || level > kMaxDenominator) throw Error(ErrorKind::IncompatibleDenominator, "level must be in [1, 2^31-1]");
  validate_cocycle(c, 3);
  const auto& base = gm->group();
  MackeyGroup out{base, level, std::nullopt, {}, false, {}};
  if (!base.is_finite()) {
    if (level % c.denominator() != 0) {
      throw Error(ErrorKind::IncompatibleDenominator,
                  "cocycle denominator " + std::to_string(c.denominator()) + " does not divide " + std::to_string(level));
    }
    out.description = "central extension of " + base.describe() + " by Z_" + std::to_string(level);
    return out;
  }
  const auto els = base.elements();
  const auto k = els.size();
  if (static_cast<std::int64_t>(k) * level > 1024) {
    throw Error(ErrorKind::UnsupportedModel, "Mackey group too large to tabulate (order > 1024)");
  }
  std::vector<std::vector<std::int64_t>> phase(k, std::vector<std::int64_t>(k));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const auto p = c.eval_unchecked(GroupArrow{els[i]}, GroupArrow{els[j]});
      if (level % p.denominator() != 0) {
        throw Error(ErrorKind::IncompatibleDenominator,
                    "value " + p.to_string() + " is not a multiple of 1/" + std::to_string(level),
                    pair_string(GroupArrow{els[i]}, GroupArrow{els[j]}));
      }
      phase[i][j] = p.numerator() * (level / p.denominator());
    }
  }
  const auto size = k * static_cast<std::size_t>(level);
  auto id = [level](std::size_t i, std::int64_t tau) { return static_cast<std::int64_t>(i) * level + tau; };
  std::vector<std::vector<std::int64_t>> table(size, std::vector<std::int64_t>(size));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::int64_t t = 0; t < level; ++t) {
      out.elements.push_back({els[i], t});
      for (std::size_t j = 0; j < k; ++j) {
        const auto prod = base.index_of(base.multiply(els[i], els[j]));
        for (std::int64_t e = 0; e < level; ++e) {
          const auto tau = (((t + e - phase[i][j]) % level) + level) % level;
          table[id(i, t)][id(j, e)] = id(prod, tau);
        }
      }
    }
  }
  out.table = Group::table(std::move(table));
  out.abelian = out.table->is_abelian();
  out.description = "extension of " + base.describe() + " by Z_" + std::to_string(level) + " of order " +
                    std::to_string(size) + (out.abelian ? ", abelian" : ", nonabelian");
  return out;
}

}  // namespace etale
