#include <numeric>
#include <set>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "homforge/ff_linalg.hpp"
#include "homforge/milnor_k.hpp"

using namespace homforge;

namespace {

AbelianGroupStructure make_struct(long rank, std::vector<long> torsion) {
  AbelianGroupStructure s;
  s.rank = rank;
  for (long t : torsion) s.torsion.emplace_back(t);
  return s;
}

std::vector<long> dlog_table(int q) {
  int g = 2;
  for (; g < q; ++g) {
    int v = 1;
    bool full = true;
    std::vector<bool> seen(q, false);
    for (int e = 0; e < q - 1; ++e) {
      if (seen[v]) {
        full = false;
        break;
      }
      seen[v] = true;
      v = res_mul(v, g, q);
    }
    if (full) break;
  }
  std::vector<long> dlog(q, -1);
  int v = 1;
  for (int e = 0; e < q - 1; ++e) {
    dlog[v] = e;
    v = res_mul(v, g, q);
  }
  return dlog;
}

HClass add_cls(const HClass& x, const HClass& y) {
  REQUIRE(x.structure == y.structure);
  HClass out = x;
  for (size_t i = 0; i < out.coords.size(); ++i) {
    out.coords[i] += y.coords[i];
    if (i < out.structure.torsion.size()) {
      out.coords[i] %= out.structure.torsion[i];
      if (out.coords[i] < 0) out.coords[i] += out.structure.torsion[i];
    }
  }
  return out;
}

}  // namespace

TEST_CASE("milnor degree one recovers the unit group") {
  for (int q : {5, 7, 11, 13}) {
    MilnorPresentation p = milnor_group(q, 1);
    CHECK(p.q == q);
    CHECK(p.n == 1);
    CHECK(p.generator_count == q - 1);
    CHECK(p.steinberg_count == 0);
    CHECK(p.multilinearity_count == static_cast<long>(q - 1) * (q - 1));
    CHECK(p.structure == make_struct(0, {q - 1}));
  }
}

TEST_CASE("milnor degrees two and three vanish from the raw presentations") {
  for (int q : {5, 7, 11}) {
    MilnorPresentation p2 = milnor_group(q, 2);
    CHECK(p2.generator_count == static_cast<long>(q - 1) * (q - 1));
    CHECK(p2.steinberg_count == q - 2);
    CHECK(p2.multilinearity_count ==
          2L * (q - 1) * (q - 1) * (q - 1));
    CHECK(p2.structure == make_struct(0, {}));

    MilnorPresentation p3 = milnor_group(q, 3);
    CHECK(p3.generator_count ==
          static_cast<long>(q - 1) * (q - 1) * (q - 1));
    CHECK(p3.steinberg_count == 2L * (q - 2) * (q - 1));
    CHECK(p3.multilinearity_count ==
          3L * (q - 1) * (q - 1) * (q - 1) * (q - 1));
    CHECK(p3.structure == make_struct(0, {}));
  }
}

TEST_CASE("milnor input validation") {
  CHECK_THROWS_WITH_AS(milnor_group(8, 2), doctest::Contains("prime"),
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(milnor_group(7, 0), doctest::Contains("n must be"),
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(milnor_group(7, 4), doctest::Contains("n must be"),
                       std::runtime_error);
  // 28^3 formal words would pass the per-step growth but break the cap.
  CHECK_THROWS_WITH_AS(milnor_group(29, 3),
                       doctest::Contains("resource cap exceeded"),
                       std::runtime_error);
}

TEST_CASE("pre-Bloch groups are cyclic of order q plus one") {
  for (int q : {5, 7, 11, 13}) {
    PreBlochPresentation p = pre_bloch(q);
    CHECK(p.q == q);
    CHECK(p.tensor_modulus == q - 1);
    CHECK(static_cast<int>(p.generators.size()) == q - 2);
    CHECK(static_cast<long>(p.relations.size()) ==
          static_cast<long>(q - 2) * (q - 3));
    CHECK(p.discarded == 0);
    CHECK(p.structure == make_struct(0, {q + 1}));
  }
}

TEST_CASE("pre-Bloch five term instances are admissible and well formed") {
  PreBlochPresentation p = pre_bloch(7);
  std::set<std::pair<int, int>> seen;
  for (const FiveTermInstance& inst : p.relations) {
    CHECK(inst.x != inst.y);
    CHECK(seen.insert({inst.x, inst.y}).second);
    // First two arguments are x and y themselves.
    CHECK(inst.args[0] == inst.x);
    CHECK(inst.args[1] == inst.y);
    // Every argument stays inside F* minus {1}.
    for (int z : inst.args) {
      CHECK(z >= 2);
      CHECK(z <= 6);
    }
    // Third argument really is y/x.
    CHECK(res_mul(inst.args[2], inst.x, 7) == inst.y);
    // Fifth argument really is (1-x)/(1-y).
    CHECK(res_mul(inst.args[4], res_sub(1, inst.y, 7), 7) ==
          res_sub(1, inst.x, 7));
  }

  // Spot instance (x,y) = (2,3) over F_7: arguments 2,3,5,6,4.
  bool found = false;
  for (const FiveTermInstance& inst : p.relations) {
    if (inst.x == 2 && inst.y == 3) {
      found = true;
      CHECK(inst.args == std::array<int, 5>{2, 3, 5, 6, 4});
    }
  }
  CHECK(found);
}

TEST_CASE("psi descends with the one-minus-x pairing and not the variant") {
  for (int q : {5, 7, 11, 13}) {
    PreBlochPresentation p = pre_bloch(q);
    CHECK(p.symmetrizer_index == 2);
    CHECK(p.psi_descends);
    std::vector<long> dlog = dlog_table(q);
    long m = q - 1;
    for (size_t j = 0; j < p.generators.size(); ++j) {
      int x = p.generators[j];
      CHECK(p.psi[j] == (dlog[x] * dlog[res_sub(1, x, q)]) % m);
    }
    for (const FiveTermInstance& inst : p.relations) {
      CHECK(inst.psi_image % p.symmetrizer_index == 0);
      // Recompute the image independently from the argument list.
      static const int signs[5] = {1, -1, 1, -1, 1};
      long img = 0;
      for (int t = 0; t < 5; ++t) {
        int z = inst.args[t];
        img += signs[t] * ((dlog[z] * dlog[res_sub(1, z, q)]) % m);
      }
      img %= m;
      if (img < 0) img += m;
      CHECK(img == inst.psi_image);
    }
  }

  // The pairing with x-1 in place of 1-x fails the span test at q = 7:
  // the instance (2,3) maps to 1 mod 6.
  {
    int q = 7;
    std::vector<long> dlog = dlog_table(q);
    long m = q - 1;
    static const int signs[5] = {1, -1, 1, -1, 1};
    const std::array<int, 5> args{2, 3, 5, 6, 4};
    long img = 0;
    for (int t = 0; t < 5; ++t) {
      img += signs[t] * ((dlog[args[t]] * dlog[args[t] - 1]) % m);
    }
    img = ((img % m) + m) % m;
    CHECK(img == 1);
    CHECK(img % 2 != 0);
    // And across all instances the variant fails somewhere.
    PreBlochPresentation p = pre_bloch(q);
    int variantFailures = 0;
    for (const FiveTermInstance& inst : p.relations) {
      long v = 0;
      for (int t = 0; t < 5; ++t) {
        int z = inst.args[t];
        v += signs[t] * ((dlog[z] * dlog[z - 1]) % m);
      }
      v = ((v % m) + m) % m;
      if (v % 2 != 0) ++variantFailures;
    }
    CHECK(variantFailures > 0);
  }

  CHECK_THROWS_WITH_AS(pre_bloch(3), doctest::Contains("at least 5"),
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(pre_bloch(9), doctest::Contains("prime"),
                       std::runtime_error);
}

TEST_CASE("nu symbol delegates to the torus bracket") {
  // Degree one: the discrete logarithm against the least primitive root.
  CHECK(nu_symbol({2}, 5).coords == std::vector<mpz_class>{1});
  CHECK(nu_symbol({3}, 7).coords == std::vector<mpz_class>{1});
  CHECK(nu_symbol({1}, 5).is_zero());

  // Matches bracket_class on the nose.
  for (int q : {5, 7}) {
    for (int a = 1; a < q; ++a) {
      for (int b = 1; b < q; ++b) {
        CHECK(nu_symbol({a, b}, q) == bracket_class({a, b}, 2, q));
      }
    }
  }

  // Slot additivity at n = 2 over F_5, exhaustively.
  for (int a = 1; a < 5; ++a) {
    for (int b = 1; b < 5; ++b) {
      for (int c = 1; c < 5; ++c) {
        CHECK(nu_symbol({res_mul(a, b, 5), c}, 5) ==
              add_cls(nu_symbol({a, c}, 5), nu_symbol({b, c}, 5)));
      }
    }
  }

  // Swap antisymmetry in coinvariants at n = 3 over F_5.
  for (int a = 1; a < 5; ++a) {
    for (int b = 1; b < 5; ++b) {
      for (int c = 1; c < 5; ++c) {
        HClass s = add_cls(nu_symbol({a, b, c}, 5), nu_symbol({a, c, b}, 5));
        CoinvariantsResult co = sym_coinvariants(3, s);
        for (const auto& v : co.coords) CHECK(v == 0);
      }
    }
  }
}
