#include <cmath>

#include "doctest.h"
#include "etale/abs_sum.hpp"
#include "etale/cyclotomic.hpp"
#include "etale/error.hpp"
#include "etale/integer_matrix.hpp"
#include "etale/phase.hpp"

using namespace etale;

TEST_CASE("phase arithmetic is addition mod 1") {
  Phase a(1, 4), b(3, 4);
  CHECK((a + b).is_zero());
  CHECK(a - b == Phase(1, 2));
  CHECK(-a == Phase(3, 4));
  CHECK(Phase(-1, 3) == Phase(2, 3));
  CHECK(Phase(6, 4) == Phase(1, 2));
  CHECK(a.times(6) == Phase(1, 2));
  CHECK(Phase::parse("-5/6") == Phase(1, 6));
  CHECK(Phase::parse("3") == Phase());
  auto z = Phase(1, 4).to_complex();
  CHECK(std::abs(z - std::complex<double>(0, 1)) < 1e-12);
}

TEST_CASE("phase parse rejects garbage") {
  CHECK_THROWS_AS(Phase::parse("1/0"), Error);
  CHECK_THROWS_AS(Phase::parse("x"), Error);
}

TEST_CASE("cyclotomic roots of unity multiply like phases") {
  for (int n : {1, 2, 3, 4, 5, 6, 8, 12}) {
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        auto lhs = Cyclotomic::root_of_unity(Phase(a, n)) * Cyclotomic::root_of_unity(Phase(b, n));
        CHECK(lhs == Cyclotomic::root_of_unity(Phase(a + b, n)));
      }
    }
  }
}

TEST_CASE("cyclotomic values agree with floating point") {
  auto z = Cyclotomic::root_of_unity(Phase(1, 12)) + Cyclotomic::root_of_unity(Phase(2, 5)) * Cyclotomic(3);
  std::complex<double> expected = std::polar(1.0, 2 * M_PI / 12) + 3.0 * std::polar(1.0, 4 * M_PI / 5);
  CHECK(std::abs(z.to_complex() - expected) < 1e-12);
  CHECK(std::abs(z.conj().to_complex() - std::conj(expected)) < 1e-12);
}

TEST_CASE("cyclotomic identities across fields") {
  // zeta_3 + zeta_3^2 = -1
  auto w = Cyclotomic::root_of_unity(Phase(1, 3));
  CHECK(w + w * w == Cyclotomic(-1));
  // i^2 = -1, and the root of unity of order 4 is i
  CHECK(Cyclotomic::i() * Cyclotomic::i() == Cyclotomic(-1));
  CHECK(Cyclotomic::root_of_unity(Phase(1, 4)) == Cyclotomic::i());
  // zeta_8 * zeta_8 = i (lifting between orders 8 and 4)
  auto e = Cyclotomic::root_of_unity(Phase(1, 8));
  CHECK(e * e == Cyclotomic::i());
  CHECK((e * e - Cyclotomic::i()).is_zero());
  CHECK(Cyclotomic::gaussian(3, 4).norm_squared() == Cyclotomic(25));
  CHECK(Cyclotomic::root_of_unity(Phase(1, 2)) == Cyclotomic(-1));
}

TEST_CASE("cyclotomic polynomials and totients") {
  CHECK(euler_phi(12) == 4);
  CHECK(euler_phi(7) == 6);
  CHECK(cyclotomic_polynomial(4) == std::vector<std::int64_t>{1, 0, 1});
  CHECK(cyclotomic_polynomial(6) == std::vector<std::int64_t>{1, -1, 1});
}

TEST_CASE("cyclotomic order cap") {
  auto a = Cyclotomic::root_of_unity(Phase(1, 997));
  auto b = Cyclotomic::root_of_unity(Phase(1, 991));
  CHECK_THROWS_AS(a * b, Error);
}

TEST_CASE("abs sums compare exactly") {
  // |3+4i| = 5
  CHECK(AbsSum::of(Cyclotomic::gaussian(3, 4)) == AbsSum::of(Cyclotomic(5)));
  // sqrt2 + sqrt2 = sqrt8
  auto s2 = AbsSum::of(Cyclotomic::gaussian(1, 1));
  CHECK(s2 + s2 == AbsSum::of(Cyclotomic::gaussian(2, 2)));
  // sqrt2 * sqrt2 = 2
  CHECK(s2 * s2 == AbsSum::of(Cyclotomic(2)));
  CHECK(s2 < AbsSum::of(Cyclotomic(2)));
  CHECK(AbsSum() < s2);
  CHECK(std::abs(s2.value() - std::sqrt(2.0)) < 1e-12);
  // |1 + zeta_3| = 1
  auto w = Cyclotomic::root_of_unity(Phase(1, 3));
  CHECK(AbsSum::of(Cyclotomic(1) + w) == AbsSum::of(Cyclotomic(1)));
}

TEST_CASE("smith normal form reconstructs the matrix") {
  IntMatrix a(3, 3);
  const long vals[3][3] = {{2, 4, 4}, {-6, 6, 12}, {10, -4, -16}};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) a(r, c) = vals[r][c];
  auto s = smith_normal_form(a);
  CHECK(s.left * a * s.right == s.diagonal);
  // invariant factors of this matrix are 2, 6, 12
  CHECK(s.diagonal(0, 0) == 2);
  CHECK(s.diagonal(1, 1) == 6);
  CHECK(s.diagonal(2, 2) == 12);
  CHECK(s.rank == 3);
}

TEST_CASE("solve_mod finds solutions or proves none") {
  IntMatrix a(2, 2);
  a(0, 0) = 2; a(0, 1) = 0;
  a(1, 0) = 0; a(1, 1) = 1;
  auto x = solve_mod(a, {1, 1}, 2);
  CHECK_FALSE(x.has_value());
  auto y = solve_mod(a, {0, 1}, 4);
  REQUIRE(y.has_value());
  CHECK(((2 * (*y)[0]) % 4 + 4) % 4 == 0);
  CHECK((((*y)[1]) % 4 + 4) % 4 == 1);
}

TEST_CASE("lattice basis of a stabilizer lattice") {
  auto b = lattice_basis({{2, 0}, {0, 4}, {2, 2}}, 2);
  // spanned lattice: (2,0), (0,2)
  CHECK(b.size() == 2);
  auto det = b[0][0] * b[1][1] - b[0][1] * b[1][0];
  CHECK(std::abs(det) == 4);
}
