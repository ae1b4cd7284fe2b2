#include "homforge/ff_linalg.hpp"

namespace homforge {

bool is_prime(int q) {
  if (q < 2) return false;
  for (int d = 2; static_cast<long long>(d) * d <= q; ++d)
    if (q % d == 0) return false;
  return true;
}

static void check_modulus(int q) {
  if (q < 3 || !is_prime(q))
    throw std::runtime_error("modulus must be a prime >= 3, got " +
                             std::to_string(q));
}

FieldElement fe(long long value, int modulus) {
  check_modulus(modulus);
  long long v = value % modulus;
  if (v < 0) v += modulus;
  return FieldElement{static_cast<int>(v), modulus};
}

static void check_same(FieldElement a, FieldElement b) {
  if (a.modulus != b.modulus)
    throw std::runtime_error("modulus mismatch: " + std::to_string(a.modulus) +
                             " vs " + std::to_string(b.modulus));
}

int res_add(int a, int b, int q) {
  int s = a + b;
  return s >= q ? s - q : s;
}
int res_sub(int a, int b, int q) {
  int s = a - b;
  return s < 0 ? s + q : s;
}
int res_mul(int a, int b, int q) { return (a * b) % q; }
int res_neg(int a, int q) { return a == 0 ? 0 : q - a; }

int res_pow(int a, long long e, int q) {
  if (a == 0 && e <= 0)
    throw std::runtime_error("0 cannot be raised to a non-positive power");
  long long ee = e;
  if (ee < 0) {
    a = res_inv(a, q);
    ee = -ee;
  }
  int r = 1 % q, base = a;
  while (ee > 0) {
    if (ee & 1) r = res_mul(r, base, q);
    base = res_mul(base, base, q);
    ee >>= 1;
  }
  return r;
}

int res_inv(int a, int q) {
  if (a == 0) throw std::runtime_error("division by zero in F_q");
  // Fermat: a^(q-2) mod q.  q is tiny here, so this is plenty fast.
  return res_pow(a, q - 2, q);
}

FieldElement ff_add(FieldElement a, FieldElement b) {
  check_same(a, b);
  return FieldElement{res_add(a.value, b.value, a.modulus), a.modulus};
}
FieldElement ff_sub(FieldElement a, FieldElement b) {
  check_same(a, b);
  return FieldElement{res_sub(a.value, b.value, a.modulus), a.modulus};
}
FieldElement ff_mul(FieldElement a, FieldElement b) {
  check_same(a, b);
  return FieldElement{res_mul(a.value, b.value, a.modulus), a.modulus};
}
FieldElement ff_neg(FieldElement a) {
  return FieldElement{res_neg(a.value, a.modulus), a.modulus};
}
FieldElement ff_inv(FieldElement a) {
  return FieldElement{res_inv(a.value, a.modulus), a.modulus};
}
FieldElement ff_div(FieldElement a, FieldElement b) {
  check_same(a, b);
  return FieldElement{res_mul(a.value, res_inv(b.value, b.modulus), a.modulus),
                      a.modulus};
}
FieldElement ff_pow(FieldElement a, long long e) {
  return FieldElement{res_pow(a.value, e, a.modulus), a.modulus};
}

FqMatrix::FqMatrix(int r, int c, int q) : rows(r), cols(c), modulus(q) {
  check_modulus(q);
  if (r < 0 || c < 0) throw std::runtime_error("negative matrix dimension");
  a.assign(static_cast<size_t>(r) * c, 0);
}

FqMatrix FqMatrix::identity(int n, int q) {
  FqMatrix m(n, n, q);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

FqMatrix fm_mul(const FqMatrix& x, const FqMatrix& y) {
  if (x.modulus != y.modulus)
    throw std::runtime_error("modulus mismatch in matrix product");
  if (x.cols != y.rows)
    throw std::runtime_error("dimension mismatch in matrix product");
  const int q = x.modulus;
  FqMatrix z(x.rows, y.cols, q);
  for (int i = 0; i < x.rows; ++i)
    for (int k = 0; k < x.cols; ++k) {
      int xik = x.at(i, k);
      if (xik == 0) continue;
      for (int j = 0; j < y.cols; ++j)
        z.at(i, j) = (z.at(i, j) + xik * y.at(k, j)) % q;
    }
  return z;
}

std::vector<int> fm_apply(const FqMatrix& x, const std::vector<int>& v) {
  if (static_cast<int>(v.size()) != x.cols)
    throw std::runtime_error("dimension mismatch in matrix-vector product");
  std::vector<int> out(x.rows, 0);
  for (int i = 0; i < x.rows; ++i) {
    int s = 0;
    for (int k = 0; k < x.cols; ++k) s += x.at(i, k) * v[k];
    out[i] = s % x.modulus;
  }
  return out;
}

RrefResult rref(const FqMatrix& m) {
  const int q = m.modulus;
  check_modulus(q);
  RrefResult res;
  res.echelon = m;
  res.transform = FqMatrix::identity(m.rows, q);
  FqMatrix& e = res.echelon;
  FqMatrix& t = res.transform;

  int pivot_row = 0;
  for (int col = 0; col < m.cols && pivot_row < m.rows; ++col) {
    int pr = -1;
    for (int r = pivot_row; r < m.rows; ++r)
      if (e.at(r, col) != 0) {
        pr = r;
        break;
      }
    if (pr < 0) continue;
    if (pr != pivot_row) {
      for (int j = 0; j < m.cols; ++j) std::swap(e.at(pr, j), e.at(pivot_row, j));
      for (int j = 0; j < m.rows; ++j) std::swap(t.at(pr, j), t.at(pivot_row, j));
    }
    int inv = res_inv(e.at(pivot_row, col), q);
    if (inv != 1) {
      for (int j = 0; j < m.cols; ++j)
        e.at(pivot_row, j) = res_mul(e.at(pivot_row, j), inv, q);
      for (int j = 0; j < m.rows; ++j)
        t.at(pivot_row, j) = res_mul(t.at(pivot_row, j), inv, q);
    }
    for (int r = 0; r < m.rows; ++r) {
      if (r == pivot_row) continue;
      int f = e.at(r, col);
      if (f == 0) continue;
      for (int j = 0; j < m.cols; ++j)
        e.at(r, j) = res_sub(e.at(r, j), res_mul(f, e.at(pivot_row, j), q), q);
      for (int j = 0; j < m.rows; ++j)
        t.at(r, j) = res_sub(t.at(r, j), res_mul(f, t.at(pivot_row, j), q), q);
    }
    ++pivot_row;
  }
  res.rank = pivot_row;
  return res;
}

int fm_rank(const FqMatrix& m) { return rref(m).rank; }

int fm_det(const FqMatrix& m) {
  if (m.rows != m.cols) throw std::runtime_error("determinant of non-square matrix");
  const int q = m.modulus;
  FqMatrix e = m;
  int det = 1;
  int pivot_row = 0;
  for (int col = 0; col < m.cols; ++col) {
    int pr = -1;
    for (int r = pivot_row; r < m.rows; ++r)
      if (e.at(r, col) != 0) {
        pr = r;
        break;
      }
    if (pr < 0) return 0;
    if (pr != pivot_row) {
      for (int j = 0; j < m.cols; ++j) std::swap(e.at(pr, j), e.at(pivot_row, j));
      det = res_neg(det, q);
    }
    det = res_mul(det, e.at(pivot_row, col), q);
    int inv = res_inv(e.at(pivot_row, col), q);
    for (int r = pivot_row + 1; r < m.rows; ++r) {
      int f = res_mul(e.at(r, col), inv, q);
      if (f == 0) continue;
      for (int j = col; j < m.cols; ++j)
        e.at(r, j) = res_sub(e.at(r, j), res_mul(f, e.at(pivot_row, j), q), q);
    }
    ++pivot_row;
  }
  return det;
}

FqMatrix fm_inverse(const FqMatrix& m) {
  if (m.rows != m.cols) throw std::runtime_error("inverse of non-square matrix");
  RrefResult r = rref(m);
  if (r.rank != m.rows) throw std::runtime_error("matrix is singular");
  return r.transform;
}

FqMatrix fm_nullspace(const FqMatrix& m) {
  RrefResult r = rref(m);
  const int q = m.modulus;
  // Identify pivot columns.
  std::vector<int> pivot_col_of_row(r.rank, -1);
  std::vector<bool> is_pivot(m.cols, false);
  {
    int row = 0;
    for (int col = 0; col < m.cols && row < r.rank; ++col) {
      if (r.echelon.at(row, col) != 0) {
        pivot_col_of_row[row] = col;
        is_pivot[col] = true;
        ++row;
      }
    }
  }
  int nullity = m.cols - r.rank;
  FqMatrix basis(m.cols, nullity, q);
  int out = 0;
  for (int col = 0; col < m.cols; ++col) {
    if (is_pivot[col]) continue;
    basis.at(col, out) = 1;
    for (int row = 0; row < r.rank; ++row) {
      int coeff = r.echelon.at(row, col);
      if (coeff != 0) basis.at(pivot_col_of_row[row], out) = res_neg(coeff, q);
    }
    ++out;
  }
  return basis;
}

std::vector<int> fm_solve(const FqMatrix& m, const std::vector<int>& b) {
  if (static_cast<int>(b.size()) != m.rows)
    throw std::runtime_error("dimension mismatch in solve");
  const int q = m.modulus;
  FqMatrix aug(m.rows, m.cols + 1, q);
  for (int i = 0; i < m.rows; ++i) {
    for (int j = 0; j < m.cols; ++j) aug.at(i, j) = m.at(i, j);
    aug.at(i, m.cols) = ((b[i] % q) + q) % q;
  }
  RrefResult r = rref(aug);
  std::vector<int> x(m.cols, 0);
  int row = 0;
  for (int col = 0; col <= m.cols && row < r.rank; ++col) {
    if (col == m.cols && r.echelon.at(row, col) != 0)
      throw std::runtime_error("inconsistent linear system");
    if (col < m.cols && r.echelon.at(row, col) != 0) {
      x[col] = r.echelon.at(row, m.cols);
      ++row;
    }
  }
  return x;
}

}  // namespace homforge
