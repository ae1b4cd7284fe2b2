#pragma once
// Homology of finitely generated abelian groups with explicit cycles.
//
// The engine pairs two models of H_*(A) for A a product of cyclic groups:
//   - the (unnormalized) bar complex with trivial integer coefficients, where
//     the antisymmetrized cycles c(g_1,...,g_n) live, and
//   - the "small" complex: the tensor product over the cyclic factors of the
//     2-periodic resolutions, whose integer homology is H_*(A) with the
//     Kunneth structure built in.
// Explicit classical chain maps connect them in both directions: carry-
// function comparison maps bar -> periodic per factor composed with
// Alexander-Whitney on products, and a telescoping section small -> bar
// composed with Eilenberg-Zilber shuffles.  Everything is exact integer
// arithmetic; classes are coordinates in the canonical homology generator
// basis (torsion generators first, then free).

#include <gmpxx.h>

#include <map>
#include <string>
#include <vector>

#include "homforge/integer_homology.hpp"

namespace homforge {

// Element of a product of cyclic groups, as an exponent vector (one slot per
// factor, reduced mod the factor's order; order 0 means an infinite cyclic
// factor whose exponents are arbitrary integers).
using GroupElem = std::vector<long>;

struct FinAbGroup {
  std::vector<long> orders;  // per factor; each >= 0, 0 = infinite cyclic

  int factor_count() const { return static_cast<int>(orders.size()); }
  GroupElem zero() const { return GroupElem(orders.size(), 0); }
  GroupElem reduce(GroupElem v) const;
  GroupElem add(const GroupElem& a, const GroupElem& b) const;
  GroupElem neg(const GroupElem& a) const;

  bool operator==(const FinAbGroup&) const = default;
};

// Formal integer combination of degree-n bar tuples [g_1|...|g_n].
struct BarChain {
  FinAbGroup group;
  int degree = 0;
  std::map<std::vector<GroupElem>, mpz_class> terms;

  // Accumulating insertion; reduces the elements, drops zero coefficients.
  void add_term(const std::vector<GroupElem>& tuple, const mpz_class& coeff);
  bool operator==(const BarChain&) const = default;
};

// The bar differential with trivial coefficients (the two outer face maps
// drop an entry; inner faces multiply neighbors).  Degree 0 maps to the zero
// chain of degree -1 by convention (empty terms).
BarChain bar_differential(const BarChain& ch);
bool is_bar_cycle(const BarChain& ch);

// The antisymmetrized cycle c(g_1,...,g_n) = sum over permutations with sign.
BarChain cycle_c(const FinAbGroup& A, const std::vector<GroupElem>& gs);

// A degree assignment per factor; the chain basis of the small complex in
// degree n is all such words summing to n (infinite factors capped at 1).
using SmallWord = std::vector<int>;

struct SmallResolution {
  FinAbGroup group;
  int maxDeg = 0;
  // Chain data runs one degree above maxDeg so homology is available at
  // every degree up to maxDeg.
  std::vector<std::vector<SmallWord>> words;  // [0 .. maxDeg+1]
  ChainComplexZ complex;
  std::vector<HomologyResult> H;  // [0 .. maxDeg]

  long word_index(int degree, const SmallWord& w) const;  // -1 if absent

 private:
  friend SmallResolution small_resolution(const FinAbGroup&, int);
  std::vector<std::map<SmallWord, long>> index_;
};

// Builds the tensored periodic complex and its homology; maxDeg <= 6.
SmallResolution small_resolution(const FinAbGroup& A, int maxDeg);

// Independent Kunneth oracle: predicted H_n(A) by recursive pairwise
// tensor/Tor over the cyclic factors (no chain complexes involved).
AbelianGroupStructure kunneth_prediction(const FinAbGroup& A, int n);

// A homology class: coordinates in the generator basis of H_degree(A) as
// computed by small_resolution (torsion coordinates reduced mod the order).
struct HClass {
  FinAbGroup group;
  int degree = 0;
  AbelianGroupStructure structure;  // of H_degree(A)
  std::vector<mpz_class> coords;

  bool is_zero() const;
  bool operator==(const HClass&) const = default;
};

// The chain-level comparison map bar -> small complex (carry-function maps
// per cyclic factor composed with Alexander-Whitney); defined on every
// chain, commutes with the differentials.  The chain's degree must be at
// most maxDeg + 1 of the resolution.
SparseVec bar_projection(const SmallResolution& R, const BarChain& ch);

// Class of a bar cycle, via the carry-function comparison maps and
// Alexander-Whitney.  Throws if the chain is not a cycle.
HClass bar_to_small(const BarChain& ch);

// Section small -> bar (telescoping cochains composed with shuffles): a bar
// cycle representing the given chain of the small complex in the stated
// degree.
BarChain small_section(const SmallResolution& R, int degree,
                       const SparseVec& chain);

// A bar cycle representing the class (sum of coordinate multiples of the
// homology generators, pushed through the section).
BarChain class_representative(const HClass& x);

// Cross product H_p(A) x H_q(B) -> H_{p+q}(A x B) via shuffles; p + q <= 6.
// On antisymmetrized classes: class c(g...) x class c(h...) = class c(g...,h...).
HClass shuffle_product(const HClass& x, const HClass& y);

// Homomorphism between exponent-vector groups: dst exponents are
// matrix * src exponents (matrix[i][j] multiplies src factor j into dst
// factor i).  Must respect orders.
struct GroupHom {
  FinAbGroup src, dst;
  std::vector<std::vector<long>> matrix;
};

GroupElem apply_hom(const GroupHom& f, const GroupElem& g);

// Functorial induced map on homology classes.
HClass induced(const GroupHom& f, const HClass& x);

// The torus classes [a_1,...,a_n] in H_n of the diagonal torus of GL_n(F_q),
// identified with (Z/(q-1))^n by discrete logarithm: the antisymmetrized
// cycle on the determinant-one diagonal matrices
//   A_{i,n} = diag(a_i I_i, a_i^{-i}, I_{n-i-1})  (i < n),
//   A_{n,n} = diag(a_n I_{n-1}, a_n^{-(n-1)}).
// Requires n <= 4 and a_i in F_q*.
HClass bracket_class(const std::vector<int>& as, int n, int q);

// Image of a class in the coinvariants of the coordinate-permutation action
// of the symmetric group on n equal factors: the quotient of H_degree(A) by
// all differences h - sigma_* h.
struct CoinvariantsResult {
  AbelianGroupStructure structure;
  std::vector<mpz_class> coords;
};

CoinvariantsResult sym_coinvariants(int n, const HClass& x);

}  // namespace homforge
