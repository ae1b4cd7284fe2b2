#pragma once
// Brute-force presentations over small prime fields: the degree-n Milnor
// K-group as the quotient of the free abelian group on n-fold multiplicative
// words by multilinearity and adjacent Steinberg relations, the pre-Bloch
// group cut out of the free group on [x] by the five-term relation, and the
// symbol-to-torus-class map.  Structures come from exact Smith normal form
// of the raw relation lattices -- no classical shortcuts are assumed.

#include <array>
#include <vector>

#include "homforge/abelian_homology.hpp"
#include "homforge/integer_homology.hpp"

namespace homforge {

struct MilnorPresentation {
  int q = 0;
  int n = 0;
  long generator_count = 0;       // (q-1)^n formal words a_1 x ... x a_n
  long multilinearity_count = 0;  // relation columns w(..ab..)-w(..a..)-w(..b..)
  long steinberg_count = 0;       // columns killing words with an adjacent
                                  // pair (a, 1-a)
  AbelianGroupStructure structure;
};

// The quotient of the free abelian group on all n-fold words over F_q* by
// multilinearity in every slot and the Steinberg relation on every adjacent
// slot pair.  Requires prime q and 1 <= n <= 3; refuses generator spaces
// past the cap.
MilnorPresentation milnor_group(int q, int n);

// One five-term relation instance: the five bracket arguments
//   [x] - [y] + [y/x] - [(1-1/x)/(1-1/y)] + [(1-x)/(1-y)]
// (signs +,-,+,-,+), together with the image of the whole relation under
// psi[z] = z (x) (1-z) in F* (x) F* identified with Z/(q-1).  (The variant
// pairing z with z-1 differs by z (x) (-1) and fails to stay inside the
// symmetrizer span when q = 3 mod 4.)
struct FiveTermInstance {
  int x = 0;
  int y = 0;
  std::array<int, 5> args{};
  long psi_image = 0;
};

struct PreBlochPresentation {
  int q = 0;
  std::vector<int> generators;  // x with a class [x], x in F* minus {1}
  std::vector<FiveTermInstance> relations;
  long discarded = 0;  // enumerated instances with an argument outside
                       // F* minus {1} (none occur over a field; counted anyway)
  long tensor_modulus = 0;       // F* (x) F* is cyclic of this order, q - 1
  std::vector<long> psi;         // per generator: image in F* (x) F*
  long symmetrizer_index = 0;    // <a(x)b + b(x)a> is this multiple's span
  bool psi_descends = false;     // every relation image lies in that span
  AbelianGroupStructure structure;
};

// The pre-Bloch group of F_q from the raw five-term presentation, plus the
// instance-by-instance verification that psi descends to the quotient by
// the symmetrizer subgroup.  Requires prime q >= 5.
PreBlochPresentation pre_bloch(int q);

// The Steinberg-symbol image in torus homology: delegates to bracket_class.
HClass nu_symbol(const std::vector<int>& as, int q);

}  // namespace homforge
