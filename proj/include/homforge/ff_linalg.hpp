#pragma once
// Exact arithmetic in prime fields F_q (q an odd prime >= 3) and dense linear
// algebra over them: reduced row echelon form with recorded transform, rank,
// inverse, determinant, nullspace, and linear solving.
//
// Every FieldElement carries its modulus; operations on mismatched moduli are
// errors, never coercions.  All values are immutable and all operations pure.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace homforge {

bool is_prime(int q);

struct FieldElement {
  int value = 0;    // residue in [0, q)
  int modulus = 0;  // prime q >= 3

  bool operator==(const FieldElement&) const = default;
};

// Checked constructor: validates the modulus and reduces an arbitrary integer
// to its canonical residue.
FieldElement fe(long long value, int modulus);

FieldElement ff_add(FieldElement a, FieldElement b);
FieldElement ff_sub(FieldElement a, FieldElement b);
FieldElement ff_mul(FieldElement a, FieldElement b);
FieldElement ff_neg(FieldElement a);
FieldElement ff_inv(FieldElement a);
FieldElement ff_div(FieldElement a, FieldElement b);
FieldElement ff_pow(FieldElement a, long long e);

// Residue-level helpers (used in inner loops where carrying FieldElement
// structs around would be wasteful; moduli validated by the caller once).
int res_add(int a, int b, int q);
int res_sub(int a, int b, int q);
int res_mul(int a, int b, int q);
int res_neg(int a, int q);
int res_inv(int a, int q);
int res_pow(int a, long long e, int q);

// Dense matrix over F_q, row-major residues.
struct FqMatrix {
  int rows = 0;
  int cols = 0;
  int modulus = 0;
  std::vector<int> a;  // rows*cols residues in [0, q)

  FqMatrix() = default;
  FqMatrix(int r, int c, int q);

  int at(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }
  int& at(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }

  static FqMatrix identity(int n, int q);

  bool operator==(const FqMatrix&) const = default;
};

FqMatrix fm_mul(const FqMatrix& x, const FqMatrix& y);
std::vector<int> fm_apply(const FqMatrix& x, const std::vector<int>& v);

struct RrefResult {
  int rank = 0;
  FqMatrix echelon;    // reduced row echelon form of the input
  FqMatrix transform;  // invertible; transform * input = echelon
};

RrefResult rref(const FqMatrix& m);

int fm_rank(const FqMatrix& m);
int fm_det(const FqMatrix& m);       // square only
FqMatrix fm_inverse(const FqMatrix& m);  // errors when singular

// Basis of the right nullspace {v : m v = 0}, one vector per column of the
// returned matrix (cols = nullity).
FqMatrix fm_nullspace(const FqMatrix& m);

// One solution x of m x = b, or throws when the system is inconsistent.
std::vector<int> fm_solve(const FqMatrix& m, const std::vector<int>& b);

}  // namespace homforge
