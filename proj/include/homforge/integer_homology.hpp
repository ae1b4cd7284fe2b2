#pragma once
// Exact integer linear algebra for homology of bounded chain complexes:
// sparse integer matrices, Smith normal form with unimodular transforms,
// homology as rank + invariant factors with explicit generator cycles,
// coordinates of cycles in the homology basis, induced maps of chain maps,
// and an incremental column Hermite form for image-lattice membership with
// explicit combination certificates.
//
// All arithmetic is arbitrary precision (GMP); no modular shortcuts are used
// for reported answers.

#include <gmpxx.h>

#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace homforge {

// Sparse integer matrix as a sorted triplet map; no duplicate positions, no
// stored zeros.
struct SparseIntMatrix {
  long rows = 0;
  long cols = 0;
  std::map<std::pair<long, long>, mpz_class> entries;

  SparseIntMatrix() = default;
  SparseIntMatrix(long r, long c);

  // Accumulating insertion; entries that become zero are removed.
  void add(long i, long j, const mpz_class& v);
  void set(long i, long j, const mpz_class& v);
  mpz_class get(long i, long j) const;
  size_t nnz() const { return entries.size(); }

  bool operator==(const SparseIntMatrix&) const = default;
};

// Textual triplet format: header "rows cols nnz", then one "i j v" line per
// entry, 0-based indices.
std::string to_triplet_text(const SparseIntMatrix& m);
SparseIntMatrix from_triplet_text(const std::string& text);

struct DenseIntMatrix {
  long rows = 0;
  long cols = 0;
  std::vector<mpz_class> a;  // row-major

  DenseIntMatrix() = default;
  DenseIntMatrix(long r, long c) : rows(r), cols(c) {
    a.assign(static_cast<size_t>(r) * c, mpz_class(0));
  }
  mpz_class& at(long i, long j) { return a[static_cast<size_t>(i) * cols + j]; }
  const mpz_class& at(long i, long j) const {
    return a[static_cast<size_t>(i) * cols + j];
  }
  static DenseIntMatrix identity(long n);
  bool operator==(const DenseIntMatrix&) const = default;
};

DenseIntMatrix dense_mul(const DenseIntMatrix& x, const DenseIntMatrix& y);
DenseIntMatrix to_dense(const SparseIntMatrix& m);

struct SnfResult {
  std::vector<mpz_class> d;  // positive diagonal, divisibility chain d0|d1|...
  DenseIntMatrix U, V;       // U * m * V = diag(d), both unimodular
  DenseIntMatrix Uinv, Vinv; // tracked inverses (U*Uinv = I, V*Vinv = I)
  long rank() const { return static_cast<long>(d.size()); }
};

SnfResult snf(const SparseIntMatrix& m);
SnfResult snf_dense(DenseIntMatrix m);

// Finitely generated abelian group: free rank plus invariant factors
// d_1 | d_2 | ... , each >= 2.
struct AbelianGroupStructure {
  long rank = 0;
  std::vector<mpz_class> torsion;

  bool operator==(const AbelianGroupStructure&) const = default;
  bool trivial() const { return rank == 0 && torsion.empty(); }
  std::string to_string() const;
};

// Group structure of coker(m : Z^cols -> Z^rows) = Z^rows / column lattice.
AbelianGroupStructure cokernel_structure(const SparseIntMatrix& m);

// A bounded complex ... -> C_l -> C_{l-1} -> ... -> C_0 with integer
// boundaries; boundaries[l] maps degree l to degree l-1 (defined for
// 1 <= l <= top degree).
struct ChainComplexZ {
  std::vector<long> dims;                    // dims[l] = rank of C_l
  std::vector<SparseIntMatrix> boundaries;   // boundaries[l] : C_l -> C_{l-1}

  int top_degree() const { return static_cast<int>(dims.size()) - 1; }
};

// Sparse integer vector as (index, coefficient) pairs.
using SparseVec = std::vector<std::pair<long, mpz_class>>;

struct HomologyResult {
  AbelianGroupStructure structure;
  // One generator cycle per summand: first the torsion generators (orders
  // matching structure.torsion), then structure.rank free generators.
  std::vector<SparseVec> generators;
  std::vector<mpz_class> orders;  // per generator: torsion order, or 0 if free

  // Data for expressing arbitrary cycles in this basis (see
  // class_coordinates): kernel-coordinate projection and quotient transform.
  long degree = 0;
  long chain_dim = 0;
  long boundary_rank = 0;      // rank of the incoming boundary at this degree
  DenseIntMatrix kernel_vinv;  // Vinv of snf(boundary_in); cycles have zero
                               // components on the first boundary_rank rows
  DenseIntMatrix quotient_u;   // U of snf(image in kernel coordinates)
  std::vector<mpz_class> quotient_d;  // its diagonal (padded with 0s)
};

// ker(boundary at l) / im(boundary at l+1); requires both boundaries (the one
// at l+1 must exist in the complex unless l is the top degree and the caller
// accepts im = 0 is NOT assumed -- missing degree is an error).
HomologyResult homology(const ChainComplexZ& cx, int l);

// Coordinates of a degree-l cycle in the generator basis of h (torsion
// coordinates reduced mod the order).  Throws if z is not a cycle.
std::vector<mpz_class> class_coordinates(const HomologyResult& h,
                                         const SparseVec& z);

// A chain map f : source -> target given per degree; maps[l] has
// rows = target dims[l], cols = source dims[l].
struct ChainMapZ {
  std::vector<SparseIntMatrix> maps;
};

// Checks the chain-map property at degrees l and l+1 and returns the matrix
// of the induced map on homology: column j = coordinates of f(source
// generator j) in the target homology basis.
DenseIntMatrix induced_map(const ChainComplexZ& source,
                           const ChainComplexZ& target, const ChainMapZ& f,
                           int l);

// Incremental Hermite form of a growing column lattice in Z^rows, tracking
// each reduced column as a combination of the originally inserted columns so
// membership tests can emit certificates.
class ColumnHnf {
 public:
  explicit ColumnHnf(long rows);

  // Insert one generator column; tag is the caller's index for certificates.
  void insert(const SparseVec& col, long tag);

  // If x lies in the lattice, fills combo with (tag, coefficient) pairs such
  // that sum coeff * column_tag = x and returns true.
  bool member(const SparseVec& x, std::vector<std::pair<long, mpz_class>>* combo) const;

  long pivot_count() const { return static_cast<long>(pivots_.size()); }

 private:
  struct Col {
    std::vector<mpz_class> v;              // dense length rows_
    std::map<long, mpz_class> expr;        // combination of original tags
  };
  long rows_;
  std::map<long, Col> pivots_;             // pivot row -> echelon column
  std::vector<long> tags_;
};

}  // namespace homforge
