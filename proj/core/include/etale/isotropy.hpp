#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "etale/groupoid.hpp"

namespace etale {

enum class Verdict { Yes, No, Unknown };
std::string to_string(Verdict v);

struct InteriorResult {
  Verdict verdict = Verdict::Unknown;
  std::size_t depth = 0;  // depth the answer refers to (0 when decided exactly)
  std::string witness;
};

// Does the open set denoted by `b` meet the interior of the isotropy? On
// discrete models this is membership of the arrow in Iso(G). On cylinder
// models, Yes and No are exact statements; No is only reported when every
// refinement of b inside the depth window exhibits a moved point within
// that window, otherwise Unknown(depth).
InteriorResult interior_isotropy_test(const GroupoidModel& model, const Support& b, std::size_t depth);

InteriorResult is_topologically_principal(const GroupoidModel& model, std::size_t depth);

enum class IsotropyShape {
  Trivial,
  Finite,               // elements listed completely
  Lattice,              // free abelian: basis of a sublattice of Z^d
  LamplighterSubgroup,  // subgroup of a lamplighter group
};
std::string to_string(IsotropyShape s);

struct IsotropyGroup {
  Unit unit;
  IsotropyShape shape = IsotropyShape::Trivial;
  std::vector<Arrow> elements;  // bounded enumeration, identity first
  bool truncated = false;
  std::vector<Arrow> generators;
  // Lattice shape: basis vectors in the coordinates of the ambient Z^d
  // (Z for shift models).
  std::vector<std::vector<std::int64_t>> basis;
  std::string description;
};

// G_x^x. Every listed arrow satisfies r = s = x.
IsotropyGroup isotropy_group(const GroupoidModel& model, const Unit& x, std::size_t bound);

// The fiber at x of the interior of the isotropy. Equals isotropy_group on
// discrete models; on cylinder models it is nontrivial only at isolated
// periodic points.
IsotropyGroup interior_isotropy_group(const GroupoidModel& model, const Unit& x, std::size_t bound);

// Arrow of a lattice-shaped isotropy group for coefficient vector k
// (sum k_i * basis_i).
Arrow lattice_arrow(const GroupoidModel& model, const IsotropyGroup& iso, const std::vector<std::int64_t>& k);

}  // namespace etale
