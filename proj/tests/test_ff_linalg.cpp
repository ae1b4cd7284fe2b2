#include "homforge/ff_linalg.hpp"

#include <random>

#include "doctest.h"

using namespace homforge;

TEST_CASE("field axioms hold exhaustively for q in {3,5,7}") {
  for (int q : {3, 5, 7}) {
    // Identities and inverses, all elements.
    for (int a = 0; a < q; ++a) {
      FieldElement x = fe(a, q);
      CHECK(ff_add(x, fe(0, q)) == x);
      CHECK(ff_mul(x, fe(1, q)) == x);
      CHECK(ff_add(x, ff_neg(x)).value == 0);
      if (a != 0) CHECK(ff_mul(x, ff_inv(x)).value == 1);
    }
    // Commutativity and pairwise checks.
    for (int a = 0; a < q; ++a)
      for (int b = 0; b < q; ++b) {
        FieldElement x = fe(a, q), y = fe(b, q);
        CHECK(ff_add(x, y) == ff_add(y, x));
        CHECK(ff_mul(x, y) == ff_mul(y, x));
      }
    // Associativity and distributivity, all triples.
    for (int a = 0; a < q; ++a)
      for (int b = 0; b < q; ++b)
        for (int c = 0; c < q; ++c) {
          FieldElement x = fe(a, q), y = fe(b, q), z = fe(c, q);
          CHECK(ff_add(ff_add(x, y), z) == ff_add(x, ff_add(y, z)));
          CHECK(ff_mul(ff_mul(x, y), z) == ff_mul(x, ff_mul(y, z)));
          CHECK(ff_mul(x, ff_add(y, z)) == ff_add(ff_mul(x, y), ff_mul(x, z)));
        }
  }
}

TEST_CASE("pinned arithmetic examples") {
  CHECK(ff_add(fe(3, 5), fe(4, 5)).value == 2);
  CHECK(ff_add(fe(6, 7), fe(1, 7)).value == 0);
  CHECK(ff_inv(fe(2, 5)).value == 3);
  CHECK(ff_inv(fe(1, 5)).value == 1);
  CHECK(ff_inv(fe(3, 7)).value == 5);
}

TEST_CASE("modulus and input validation") {
  CHECK_THROWS_AS(ff_add(fe(1, 5), fe(1, 7)), std::runtime_error);
  CHECK_THROWS_AS(ff_inv(fe(0, 5)), std::runtime_error);
  CHECK_THROWS_AS(fe(1, 4), std::runtime_error);   // composite
  CHECK_THROWS_AS(fe(1, 2), std::runtime_error);   // below the q >= 3 floor
  CHECK(fe(-3, 5).value == 2);                     // canonical residue
}

static FqMatrix random_invertible(int n, int q, std::mt19937_64& rng) {
  while (true) {
    FqMatrix g(n, n, q);
    for (int& v : g.a) v = static_cast<int>(rng() % q);
    if (fm_det(g) != 0) return g;
  }
}

TEST_CASE("rref: pinned examples") {
  CHECK(rref(FqMatrix::identity(4, 5)).rank == 4);
  CHECK(rref(FqMatrix(3, 3, 5)).rank == 0);

  FqMatrix m(2, 3, 5);
  m.at(0, 0) = 1; m.at(0, 1) = 2; m.at(0, 2) = 0;
  m.at(1, 0) = 2; m.at(1, 1) = 4; m.at(1, 2) = 0;
  CHECK(rref(m).rank == 1);
}

TEST_CASE("rref: transform correctness and idempotence") {
  std::mt19937_64 rng(20260822);
  for (int q : {3, 5, 7}) {
    for (int trial = 0; trial < 50; ++trial) {
      int r = 1 + static_cast<int>(rng() % 5);
      int c = 1 + static_cast<int>(rng() % 5);
      FqMatrix m(r, c, q);
      for (int& v : m.a) v = static_cast<int>(rng() % q);
      RrefResult res = rref(m);
      CHECK(fm_mul(res.transform, m) == res.echelon);
      CHECK(fm_det(res.transform) != 0);
      CHECK(rref(res.echelon).echelon == res.echelon);
    }
  }
}

TEST_CASE("rank is invariant under invertible row action") {
  std::mt19937_64 rng(7);
  for (int q : {3, 5, 7}) {
    for (int trial = 0; trial < 40; ++trial) {
      FqMatrix m(4, 4, q);
      for (int& v : m.a) v = static_cast<int>(rng() % q);
      FqMatrix g = random_invertible(4, q, rng);
      CHECK(fm_rank(m) == fm_rank(fm_mul(g, m)));
    }
  }
}

TEST_CASE("inverse, nullspace, solve") {
  std::mt19937_64 rng(11);
  for (int q : {3, 5, 7}) {
    FqMatrix g = random_invertible(4, q, rng);
    CHECK(fm_mul(fm_inverse(g), g) == FqMatrix::identity(4, q));

    // Rank-1 matrix: nullspace has dimension cols - 1 and is annihilated.
    FqMatrix m(3, 4, q);
    for (int j = 0; j < 4; ++j) {
      m.at(0, j) = (j + 1) % q;
      m.at(1, j) = (2 * (j + 1)) % q;
      m.at(2, j) = 0;
    }
    FqMatrix ns = fm_nullspace(m);
    CHECK(ns.cols == 4 - fm_rank(m));
    CHECK(fm_mul(m, ns) == FqMatrix(3, ns.cols, q));

    std::vector<int> b = {1, 2, 0, 1};
    std::vector<int> x = fm_solve(g, b);
    CHECK(fm_apply(g, x) == b);

    FqMatrix sing(2, 2, q);
    sing.at(0, 0) = 1;
    CHECK_THROWS_AS(fm_inverse(sing), std::runtime_error);
    std::vector<int> bad = {0, 1};
    CHECK_THROWS_AS(fm_solve(sing, bad), std::runtime_error);
  }
}
