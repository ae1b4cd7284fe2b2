#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "homforge/integer_homology.hpp"
#include "homforge/line_configs.hpp"

namespace homforge {

// Which coinvariant complex to assemble:
//   C = tuples in general position (every min(len,n)-subset independent),
//   D = tuples of pairwise distinct lines,
//   Q = quotient D/C, with basis the D-orbit labels failing C-admissibility.
enum class ComplexKind { C, D, Q };

// Resource limits for complex construction.  Enumeration refuses cleanly
// (throws) rather than thrash when a degree's basis or a boundary matrix
// would exceed these.
struct BuildCaps {
  long maxBasisPerDegree = 50000;
  long maxBoundaryNnz = 10000000;
};

// A chain complex of free Z-modules whose degree-l basis consists of
// GL_n-orbit labels of admissible length-l line tuples.  Degree 0 is the
// rank-1 augmentation term (the empty tuple), so the boundary out of
// degree 1 is the augmentation map; homology of this complex in degree l
// is the reduced/augmented homology of the underlying tuple complex.
//
// Tuples are stored packed: each line is an id in [1, q^n) encoding its
// normalized coordinates base q, and a degree-l basis element is the array
// of its l line ids (unused trailing slots are 0).
struct CoinvariantComplex {
  ComplexKind kind = ComplexKind::D;
  int n = 0;
  int q = 0;
  int maxDegree = 0;
  // tuples[l][j] = packed canonical tuple of basis element j in degree l.
  std::vector<std::vector<std::array<uint16_t, 7>>> tuples;
  // cols[l][j] = boundary of basis element j in degree l, as a sparse
  // column: (row index in degree l-1, signed multiplicity).  cols[0] is
  // empty; rows are sorted and coefficients nonzero.
  std::vector<std::vector<std::vector<std::pair<long, int>>>> cols;

  long basis_size(int l) const;
};

// Packs a normalized line into its integer id (base-q digits, most
// significant coordinate first), and back.  Id 0 is reserved for "empty".
int line_id(const Line& line, int n, int q);
Line line_from_id(int id, int n, int q);

// Decode basis element j of the given degree into its canonical tuple /
// its orbit label (family-tagged when the registry covers it).
LineTuple tuple_at(const CoinvariantComplex& cx, int degree, long index);
OrbitLabel label_at(const CoinvariantComplex& cx, int degree, long index);
std::vector<OrbitLabel> basis_labels(const CoinvariantComplex& cx, int degree);

// Index of the basis element whose orbit contains t (t is canonicalized
// first); -1 if the orbit is not part of the degree's basis.  Linear scan;
// intended for small degrees and test plumbing.
long basis_index_of(const CoinvariantComplex& cx, int degree, const LineTuple& t);

// Assemble the complex by canonical-form extension: the degree-l basis is
// found by appending one line to each degree-(l-1) canonical representative
// in every admissible way, canonicalizing and deduplicating.  shuffleSeed 0
// keeps the deterministic discovery order; a nonzero seed permutes each
// degree's basis (the complexes are equal up to that permutation).
CoinvariantComplex build_complex(ComplexKind kind, int n, int q, int maxDegree,
                                 const BuildCaps& caps = {},
                                 unsigned shuffleSeed = 0);

// The boundary C_l -> C_{l-1} as an explicit sparse integer matrix
// (rows = degree-(l-1) basis, columns = degree-l basis).  l must be in
// [1, maxDegree].
SparseIntMatrix boundary_matrix(const CoinvariantComplex& cx, int l);

// Adapter packaging all degrees for the integer homology engine.
ChainComplexZ to_chain_complex(const CoinvariantComplex& cx);

// Exact check that consecutive boundaries compose to zero, done column by
// column on the packed storage (no matrix products materialized).
bool boundary_squares_to_zero(const CoinvariantComplex& cx);

// Chain maps of the short exact sequence C -> D -> Q in one degree:
// inclusion_matrix maps each C-basis label to the equal D-basis label;
// projection_matrix kills C-admissible D-labels and is the identity on the
// rest.  Both throw if the complexes disagree on (n, q) or the degree is
// out of range for either.
SparseIntMatrix inclusion_matrix(const CoinvariantComplex& cSub,
                                 const CoinvariantComplex& dFull, int l);
SparseIntMatrix projection_matrix(const CoinvariantComplex& dFull,
                                  const CoinvariantComplex& qQuot, int l);

}  // namespace homforge
