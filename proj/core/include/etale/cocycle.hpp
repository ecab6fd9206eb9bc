#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "etale/groupoid.hpp"
#include "etale/isotropy.hpp"
#include "etale/phase.hpp"

namespace etale {

using RationalMatrix = std::vector<std::vector<mpq_class>>;

// Unit-normalized phase-valued function on arrows; arrows not listed are 0.
struct OneCochain {
  std::map<Arrow, Phase> values;
  Phase at(const Arrow& a) const;
};

enum class CocycleKind { Trivial, FiniteTable, Bicharacter, Pullback, Restriction };
std::string to_string(CocycleKind kind);

// A normalized T-valued 2-cocycle on a model, with exact phases.
//   Trivial        sigma = 1
//   FiniteTable    explicit phases on composable pairs of a finite model
//                  (pairs not listed are 0), all with denominator dividing m
//   Bicharacter    sigma(m, n) = exp(2 pi i m^T Theta n) on group models of
//                  family Zd, Cyclic or ProductOfCyclics
//   Pullback       sigma((x,g),(x.g,h)) = c(g,h) for a cocycle c on the
//                  acting group (transformation, bundle, shift and group models)
//   Restriction    sigma restricted along an embedding of a group into an
//                  isotropy fiber (produced by restrict_to_fiber)
class TwoCocycle {
 public:
  static TwoCocycle trivial(ModelPtr model);
  // entries: (left arrow, right arrow) -> phase
  static TwoCocycle finite_table(ModelPtr model, const std::map<std::pair<Arrow, Arrow>, Phase>& entries,
                                 std::int64_t denominator);
  static TwoCocycle bicharacter(ModelPtr model, RationalMatrix theta);
  // `group_cocycle` must live on a GroupGroupoid whose group is the acting group.
  static TwoCocycle pullback(ModelPtr model, TwoCocycle group_cocycle);
  // sigma pulled back along an embedding of the group of `group_model` into
  // isotropy arrows of sigma's model.
  static TwoCocycle restriction(ModelPtr group_model, TwoCocycle sigma,
                                std::function<Arrow(const GroupElement&)> embed);
  // Evaluates every composable pair of a finite model into a table.
  static TwoCocycle tabulate(const TwoCocycle& sigma);
  // Pointwise sum of phases; finite models only.
  static TwoCocycle sum(const TwoCocycle& a, const TwoCocycle& b);

  CocycleKind kind() const noexcept { return kind_; }
  const ModelPtr& model() const noexcept { return model_; }
  const GroupoidModel& groupoid() const noexcept { return *model_; }
  // lcm of the denominators of all values (exact for table and bicharacter
  // kinds; for pullbacks that of the group cocycle).
  std::int64_t denominator() const noexcept { return denominator_; }
  const RationalMatrix& theta() const noexcept { return theta_; }
  const TwoCocycle& group_cocycle() const { return *inner_; }
  // Nonzero table entries (FiniteTable only), keyed by arrow indices.
  std::map<std::pair<Arrow, Arrow>, Phase> table_entries() const;
  // Certified identically 1.
  bool is_trivial() const;

  // Throws NotComposable unless s(a) = r(b).
  Phase eval(const Arrow& a, const Arrow& b) const;
  // eval without the composability check, for hot loops over known pairs.
  Phase eval_unchecked(const Arrow& a, const Arrow& b) const;

  std::string describe() const;

 private:
  explicit TwoCocycle(ModelPtr model) : model_(std::move(model)) {}

  CocycleKind kind_ = CocycleKind::Trivial;
  ModelPtr model_;
  std::int64_t denominator_ = 1;
  // FiniteTable: index a * n + b -> phase
  std::shared_ptr<const std::vector<Phase>> table_;
  RationalMatrix theta_;
  std::shared_ptr<const TwoCocycle> inner_;
  // Restriction: fiber arrows are computed by `embed_`.
  std::shared_ptr<const std::function<Arrow(const GroupElement&)>> embed_;
};

struct CocycleReport {
  bool valid = true;
  bool exhaustive = false;
  std::size_t pairs_checked = 0;
  std::size_t triples_checked = 0;
  std::string witness;  // offending pair or triple
  std::string message;
};

// Checks normalization and the cocycle identity; exhaustive on finite models,
// otherwise over arrows of fibers of radius `depth` at sampled units.
CocycleReport check_cocycle(const TwoCocycle& sigma, std::size_t depth);
// As check_cocycle, throwing CocycleViolation with the witness on failure.
CocycleReport validate_cocycle(const TwoCocycle& sigma, std::size_t depth);

// sigma(a, b) = b(a) + b(b) - b(ab). Finite models only.
TwoCocycle coboundary_from(ModelPtr model, const OneCochain& b);

struct CohomologyResult {
  bool cohomologous = false;
  std::int64_t level = 0;
  OneCochain witness;  // sigma1 - sigma2 = coboundary(witness) when cohomologous
};

// Solves sigma1 - sigma2 = d b over Z_m by Smith normal form (finite models).
CohomologyResult cohomologous(const TwoCocycle& sigma1, const TwoCocycle& sigma2, std::int64_t level);

// The restriction of sigma to the interior isotropy fiber at x, as a cocycle
// on the fiber group presented as a group model.
struct FiberCocycle {
  IsotropyGroup iso;
  std::shared_ptr<const GroupGroupoid> group;  // the fiber group
  TwoCocycle sigma;                            // on `group`
  std::function<Arrow(const GroupElement&)> embed;
  // The fiber group is a subgroup of `group` rather than all of it
  // (lamplighter stabilizers); `member` decides membership.
  std::function<bool(const GroupElement&)> member;
};

FiberCocycle restrict_to_fiber(const TwoCocycle& sigma, const Unit& x, std::size_t bound);

struct MackeyElement {
  GroupElement base;
  std::int64_t tau = 0;  // phase tau / m
};

// (x, tau)(y, eta) = (xy, tau + eta - c(x, y)) with phases in (1/m)Z/Z.
// Finite base groups get an explicit multiplication table (validated).
struct MackeyGroup {
  Group base;
  std::int64_t level = 1;
  std::optional<Group> table;            // finite base only
  std::vector<MackeyElement> elements;   // table index -> (x, tau)
  bool abelian = false;                  // finite base only
  std::string description;
};

MackeyGroup mackey_group(const TwoCocycle& c, std::int64_t level);

}  // namespace etale
