#include "homforge/integer_homology.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace homforge {

SparseIntMatrix::SparseIntMatrix(long r, long c) : rows(r), cols(c) {
  if (r < 0 || c < 0) throw std::runtime_error("negative matrix dimension");
}

static void check_pos(const SparseIntMatrix& m, long i, long j) {
  if (i < 0 || i >= m.rows || j < 0 || j >= m.cols)
    throw std::runtime_error("sparse entry out of range");
}

void SparseIntMatrix::add(long i, long j, const mpz_class& v) {
  check_pos(*this, i, j);
  if (v == 0) return;
  auto key = std::make_pair(i, j);
  auto it = entries.find(key);
  if (it == entries.end()) {
    entries.emplace(key, v);
  } else {
    it->second += v;
    if (it->second == 0) entries.erase(it);
  }
}

void SparseIntMatrix::set(long i, long j, const mpz_class& v) {
  check_pos(*this, i, j);
  auto key = std::make_pair(i, j);
  if (v == 0)
    entries.erase(key);
  else
    entries[key] = v;
}

mpz_class SparseIntMatrix::get(long i, long j) const {
  check_pos(*this, i, j);
  auto it = entries.find(std::make_pair(i, j));
  return it == entries.end() ? mpz_class(0) : it->second;
}

std::string to_triplet_text(const SparseIntMatrix& m) {
  std::ostringstream os;
  os << m.rows << ' ' << m.cols << ' ' << m.nnz() << '\n';
  for (const auto& [pos, v] : m.entries)
    os << pos.first << ' ' << pos.second << ' ' << v.get_str() << '\n';
  return os.str();
}

SparseIntMatrix from_triplet_text(const std::string& text) {
  std::istringstream is(text);
  long rows, cols;
  size_t nnz;
  if (!(is >> rows >> cols >> nnz))
    throw std::runtime_error("bad sparse matrix header");
  SparseIntMatrix m(rows, cols);
  for (size_t k = 0; k < nnz; ++k) {
    long i, j;
    std::string v;
    if (!(is >> i >> j >> v))
      throw std::runtime_error("bad sparse matrix triplet");
    m.add(i, j, mpz_class(v));
  }
  return m;
}

DenseIntMatrix DenseIntMatrix::identity(long n) {
  DenseIntMatrix m(n, n);
  for (long i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

DenseIntMatrix dense_mul(const DenseIntMatrix& x, const DenseIntMatrix& y) {
  if (x.cols != y.rows) throw std::runtime_error("dense product dim mismatch");
  DenseIntMatrix z(x.rows, y.cols);
  for (long i = 0; i < x.rows; ++i)
    for (long k = 0; k < x.cols; ++k) {
      const mpz_class& v = x.at(i, k);
      if (v == 0) continue;
      for (long j = 0; j < y.cols; ++j)
        if (y.at(k, j) != 0) z.at(i, j) += v * y.at(k, j);
    }
  return z;
}

DenseIntMatrix to_dense(const SparseIntMatrix& m) {
  DenseIntMatrix d(m.rows, m.cols);
  for (const auto& [pos, v] : m.entries) d.at(pos.first, pos.second) = v;
  return d;
}

// ---------------------------------------------------------------------------
// Smith normal form with all four transforms tracked.
// ---------------------------------------------------------------------------

namespace {

struct SnfWork {
  DenseIntMatrix A, U, Uinv, V, Vinv;

  void row_swap(long r1, long r2) {
    if (r1 == r2) return;
    for (long j = 0; j < A.cols; ++j) std::swap(A.at(r1, j), A.at(r2, j));
    for (long j = 0; j < U.cols; ++j) std::swap(U.at(r1, j), U.at(r2, j));
    for (long i = 0; i < Uinv.rows; ++i) std::swap(Uinv.at(i, r1), Uinv.at(i, r2));
  }
  void col_swap(long c1, long c2) {
    if (c1 == c2) return;
    for (long i = 0; i < A.rows; ++i) std::swap(A.at(i, c1), A.at(i, c2));
    for (long i = 0; i < V.rows; ++i) std::swap(V.at(i, c1), V.at(i, c2));
    for (long j = 0; j < Vinv.cols; ++j) std::swap(Vinv.at(c1, j), Vinv.at(c2, j));
  }
  // row r_dst += k * row r_src
  void row_addmul(long r_dst, long r_src, const mpz_class& k) {
    if (k == 0) return;
    for (long j = 0; j < A.cols; ++j)
      if (A.at(r_src, j) != 0) A.at(r_dst, j) += k * A.at(r_src, j);
    for (long j = 0; j < U.cols; ++j)
      if (U.at(r_src, j) != 0) U.at(r_dst, j) += k * U.at(r_src, j);
    for (long i = 0; i < Uinv.rows; ++i)
      if (Uinv.at(i, r_dst) != 0) Uinv.at(i, r_src) -= k * Uinv.at(i, r_dst);
  }
  // col c_dst += k * col c_src
  void col_addmul(long c_dst, long c_src, const mpz_class& k) {
    if (k == 0) return;
    for (long i = 0; i < A.rows; ++i)
      if (A.at(i, c_src) != 0) A.at(i, c_dst) += k * A.at(i, c_src);
    for (long i = 0; i < V.rows; ++i)
      if (V.at(i, c_src) != 0) V.at(i, c_dst) += k * V.at(i, c_src);
    for (long j = 0; j < Vinv.cols; ++j)
      if (Vinv.at(c_dst, j) != 0) Vinv.at(c_src, j) -= k * Vinv.at(c_dst, j);
  }
  void row_negate(long r) {
    for (long j = 0; j < A.cols; ++j) A.at(r, j) = -A.at(r, j);
    for (long j = 0; j < U.cols; ++j) U.at(r, j) = -U.at(r, j);
    for (long i = 0; i < Uinv.rows; ++i) Uinv.at(i, r) = -Uinv.at(i, r);
  }

  // Clear row t and column t beyond the diagonal by gcd steps; assumes a
  // nonzero pivot at (t,t) and arbitrary entries in row/column t beyond it.
  void eliminate_at(long t) {
    while (true) {
      bool dirty = false;
      // Column t below the pivot.
      for (long r = t + 1; r < A.rows; ++r) {
        while (A.at(r, t) != 0) {
          mpz_class q = A.at(r, t) / A.at(t, t);  // truncated division
          row_addmul(r, t, -q);
          if (A.at(r, t) != 0) {
            row_swap(r, t);  // strictly smaller |pivot|, gcd step
            dirty = true;
          }
        }
      }
      // Row t beyond the pivot.
      for (long c = t + 1; c < A.cols; ++c) {
        while (A.at(t, c) != 0) {
          mpz_class q = A.at(t, c) / A.at(t, t);
          col_addmul(c, t, -q);
          if (A.at(t, c) != 0) {
            col_swap(c, t);
            dirty = true;  // row ops below may now be needed again
          }
        }
      }
      if (!dirty) {
        // Column may have been disturbed by the column swaps above.
        bool col_clean = true;
        for (long r = t + 1; r < A.rows; ++r)
          if (A.at(r, t) != 0) {
            col_clean = false;
            break;
          }
        if (col_clean) return;
      }
    }
  }
};

}  // namespace

SnfResult snf_dense(DenseIntMatrix input) {
  SnfWork w;
  long R = input.rows, C = input.cols;
  w.A = std::move(input);
  w.U = DenseIntMatrix::identity(R);
  w.Uinv = DenseIntMatrix::identity(R);
  w.V = DenseIntMatrix::identity(C);
  w.Vinv = DenseIntMatrix::identity(C);

  long t = 0;
  const long tmax = std::min(R, C);
  while (t < tmax) {
    // Pivot: minimal absolute value in the remaining submatrix, with an
    // early exit on +-1 (the overwhelmingly common case for boundary data).
    long pr = -1, pc = -1;
    mpz_class best;
    for (long i = t; i < R && !(pr >= 0 && best == 1); ++i)
      for (long j = t; j < C; ++j) {
        const mpz_class& v = w.A.at(i, j);
        if (v == 0) continue;
        mpz_class av = abs(v);
        if (pr < 0 || av < best) {
          pr = i;
          pc = j;
          best = av;
          if (best == 1) break;
        }
      }
    if (pr < 0) break;
    w.row_swap(t, pr);
    w.col_swap(t, pc);
    w.eliminate_at(t);
    ++t;
  }

  // Divisibility fix-up: enforce d_i | d_j for i < j.
  bool changed = true;
  while (changed) {
    changed = false;
    for (long i = 0; i + 1 < t; ++i)
      for (long j = i + 1; j < t; ++j) {
        if (w.A.at(j, j) % w.A.at(i, i) == 0) continue;
        w.row_addmul(i, j, 1);  // brings d_j into row i at column j
        w.eliminate_at(i);
        changed = true;
      }
  }
  for (long i = 0; i < t; ++i)
    if (w.A.at(i, i) < 0) w.row_negate(i);

  SnfResult res;
  for (long i = 0; i < t; ++i) res.d.push_back(w.A.at(i, i));
  res.U = std::move(w.U);
  res.V = std::move(w.V);
  res.Uinv = std::move(w.Uinv);
  res.Vinv = std::move(w.Vinv);
  return res;
}

SnfResult snf(const SparseIntMatrix& m) { return snf_dense(to_dense(m)); }

std::string AbelianGroupStructure::to_string() const {
  if (trivial()) return "0";
  std::string s;
  if (rank > 0) {
    s = "Z";
    if (rank > 1) s += "^" + std::to_string(rank);
  }
  for (const mpz_class& d : torsion) {
    if (!s.empty()) s += " + ";
    s += "Z/" + d.get_str();
  }
  return s;
}

AbelianGroupStructure cokernel_structure(const SparseIntMatrix& m) {
  SnfResult s = snf(m);
  AbelianGroupStructure g;
  g.rank = m.rows - s.rank();
  for (const mpz_class& d : s.d)
    if (d >= 2) g.torsion.push_back(d);
  return g;
}

// ---------------------------------------------------------------------------
// Homology of a bounded integer complex.
// ---------------------------------------------------------------------------

static SparseIntMatrix sparse_mul(const SparseIntMatrix& x,
                                  const SparseIntMatrix& y) {
  if (x.cols != y.rows) throw std::runtime_error("sparse product dim mismatch");
  SparseIntMatrix z(x.rows, y.cols);
  // y column-major walk; x entries grouped by row would be better, but the
  // matrices multiplied here are small.
  for (const auto& [ypos, yv] : y.entries)
    for (const auto& [xpos, xv] : x.entries)
      if (xpos.second == ypos.first) z.add(xpos.first, ypos.second, xv * yv);
  return z;
}

HomologyResult homology(const ChainComplexZ& cx, int l) {
  if (l < 0 || l > cx.top_degree())
    throw std::runtime_error("homology degree out of range");
  if (l + 1 > cx.top_degree())
    throw std::runtime_error(
        "homology requires the boundary in degree l+1; complex is missing it");
  const long dim = cx.dims[l];

  // Incoming boundary at degree l (zero map out of degree 0).
  SparseIntMatrix a = l >= 1 ? cx.boundaries[l] : SparseIntMatrix(0, cx.dims[0]);
  const SparseIntMatrix& b = cx.boundaries[l + 1];
  if (a.cols != dim || b.rows != dim)
    throw std::runtime_error("complex dimensions inconsistent");

  SnfResult sa = snf(a);
  const long ra = sa.rank();
  const long k = dim - ra;  // kernel dimension

  // Kernel coordinates of the columns of b: y = Vinv * col; a cycle has
  // support only on the last k coordinates.
  DenseIntMatrix x(k, b.cols);
  {
    DenseIntMatrix bd = to_dense(b);
    for (long j = 0; j < b.cols; ++j) {
      for (long i = 0; i < dim; ++i) {
        mpz_class acc = 0;
        for (long s = 0; s < dim; ++s)
          if (bd.at(s, j) != 0 && sa.Vinv.at(i, s) != 0)
            acc += sa.Vinv.at(i, s) * bd.at(s, j);
        if (i < ra) {
          if (acc != 0)
            throw std::runtime_error("boundary columns are not cycles (d od != 0)");
        } else {
          x.at(i - ra, j) = acc;
        }
      }
    }
  }

  SnfResult sx = snf_dense(std::move(x));
  const long rx = sx.rank();

  HomologyResult h;
  h.degree = l;
  h.chain_dim = dim;
  h.boundary_rank = ra;
  h.kernel_vinv = sa.Vinv;
  h.quotient_u = sx.U;
  h.quotient_d.assign(static_cast<size_t>(k), mpz_class(0));
  for (long i = 0; i < rx; ++i) h.quotient_d[i] = sx.d[i];

  // Generators: kernel-coordinate vectors w_i = columns of sx.Uinv; chain
  // representative = kernel basis (last k columns of sa.V) times w_i.
  auto chain_of = [&](long gi) {
    SparseVec v;
    for (long row = 0; row < dim; ++row) {
      mpz_class acc = 0;
      for (long i = 0; i < k; ++i)
        if (sx.Uinv.at(i, gi) != 0 && sa.V.at(row, ra + i) != 0)
          acc += sa.V.at(row, ra + i) * sx.Uinv.at(i, gi);
      if (acc != 0) v.emplace_back(row, acc);
    }
    return v;
  };

  for (long i = 0; i < rx; ++i) {
    if (sx.d[i] >= 2) {
      h.structure.torsion.push_back(sx.d[i]);
      h.generators.push_back(chain_of(i));
      h.orders.push_back(sx.d[i]);
    }
  }
  for (long i = rx; i < k; ++i) {
    ++h.structure.rank;
    h.generators.push_back(chain_of(i));
    h.orders.push_back(0);
  }
  return h;
}

std::vector<mpz_class> class_coordinates(const HomologyResult& h,
                                         const SparseVec& z) {
  const long dim = h.chain_dim;
  const long ra = h.boundary_rank;
  const long k = dim - ra;
  // y = Vinv * z.
  std::vector<mpz_class> y(static_cast<size_t>(dim), mpz_class(0));
  for (long i = 0; i < dim; ++i) {
    mpz_class acc = 0;
    for (const auto& [idx, coeff] : z) {
      if (idx < 0 || idx >= dim) throw std::runtime_error("cycle index range");
      if (h.kernel_vinv.at(i, idx) != 0) acc += h.kernel_vinv.at(i, idx) * coeff;
    }
    y[static_cast<size_t>(i)] = acc;
  }
  for (long i = 0; i < ra; ++i)
    if (y[static_cast<size_t>(i)] != 0)
      throw std::runtime_error("chain is not a cycle");

  // Quotient coordinates c = U * y_tail, then keep generator slots.
  std::vector<mpz_class> coords;
  long rx = 0;
  for (size_t i = 0; i < h.quotient_d.size(); ++i)
    if (h.quotient_d[i] != 0) rx = static_cast<long>(i) + 1;
  auto slot_value = [&](long i) {
    mpz_class acc = 0;
    for (long s = 0; s < k; ++s)
      if (h.quotient_u.at(i, s) != 0)
        acc += h.quotient_u.at(i, s) * y[static_cast<size_t>(ra + s)];
    return acc;
  };
  for (long i = 0; i < rx; ++i) {
    if (h.quotient_d[static_cast<size_t>(i)] >= 2) {
      mpz_class c = slot_value(i) % h.quotient_d[static_cast<size_t>(i)];
      if (c < 0) c += h.quotient_d[static_cast<size_t>(i)];
      coords.push_back(c);
    }
  }
  for (long i = rx; i < k; ++i) coords.push_back(slot_value(i));
  return coords;
}

DenseIntMatrix induced_map(const ChainComplexZ& source,
                           const ChainComplexZ& target, const ChainMapZ& f,
                           int l) {
  const int top = std::min(source.top_degree(), target.top_degree());
  if (static_cast<int>(f.maps.size()) <= top)
    throw std::runtime_error("chain map must provide all degrees");
  for (int d = 0; d <= top; ++d) {
    if (f.maps[d].rows != target.dims[d] || f.maps[d].cols != source.dims[d])
      throw std::runtime_error("chain map dimension mismatch");
    if (d >= 1) {
      SparseIntMatrix lhs = sparse_mul(f.maps[d - 1], source.boundaries[d]);
      SparseIntMatrix rhs = sparse_mul(target.boundaries[d], f.maps[d]);
      if (!(lhs == rhs))
        throw std::runtime_error("not a chain map: square at degree " +
                                 std::to_string(d) + " does not commute");
    }
  }

  HomologyResult hs = homology(source, l);
  HomologyResult ht = homology(target, l);
  DenseIntMatrix m(static_cast<long>(ht.generators.size()),
                   static_cast<long>(hs.generators.size()));
  for (size_t j = 0; j < hs.generators.size(); ++j) {
    // Image chain f(gen_j).
    SparseIntMatrix col(target.dims[l], 1);
    for (const auto& [idx, coeff] : hs.generators[j])
      for (const auto& [pos, v] : f.maps[l].entries)
        if (pos.second == idx) col.add(pos.first, 0, v * coeff);
    SparseVec img;
    for (const auto& [pos, v] : col.entries) img.emplace_back(pos.first, v);
    std::vector<mpz_class> coords = class_coordinates(ht, img);
    for (size_t i = 0; i < coords.size(); ++i)
      m.at(static_cast<long>(i), static_cast<long>(j)) = coords[i];
  }
  return m;
}

// ---------------------------------------------------------------------------
// Incremental column Hermite form with combination certificates.
// ---------------------------------------------------------------------------

ColumnHnf::ColumnHnf(long rows) : rows_(rows) {}

void ColumnHnf::insert(const SparseVec& col, long tag) {
  Col c;
  c.v.assign(static_cast<size_t>(rows_), mpz_class(0));
  for (const auto& [i, val] : col) {
    if (i < 0 || i >= rows_) throw std::runtime_error("hnf index range");
    c.v[static_cast<size_t>(i)] = val;
  }
  c.expr[tag] = 1;
  tags_.push_back(tag);

  long r = 0;
  while (r < rows_) {
    if (c.v[static_cast<size_t>(r)] == 0) {
      ++r;
      continue;
    }
    auto it = pivots_.find(r);
    if (it == pivots_.end()) {
      // New pivot row; normalize sign.
      if (c.v[static_cast<size_t>(r)] < 0) {
        for (auto& x : c.v) x = -x;
        for (auto& [t, k] : c.expr) k = -k;
      }
      pivots_.emplace(r, std::move(c));
      return;
    }
    Col& p = it->second;
    const mpz_class& pv = p.v[static_cast<size_t>(r)];
    mpz_class cv = c.v[static_cast<size_t>(r)];
    if (cv % pv == 0) {
      mpz_class q = cv / pv;
      for (long i = r; i < rows_; ++i)
        if (p.v[static_cast<size_t>(i)] != 0)
          c.v[static_cast<size_t>(i)] -= q * p.v[static_cast<size_t>(i)];
      for (const auto& [t, k] : p.expr) {
        c.expr[t] -= q * k;
        if (c.expr[t] == 0) c.expr.erase(t);
      }
      ++r;
    } else {
      // gcd combine via the unimodular pair
      //   np = s*p + t*c,   c' = (pv/g)*c - (cv/g)*p
      // (determinant 1), so the recorded lattice is preserved exactly.
      mpz_class g, s, tco;
      mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), tco.get_mpz_t(), pv.get_mpz_t(),
                 cv.get_mpz_t());
      mpz_class pq = pv / g, cq = cv / g;
      Col np;
      np.v.assign(static_cast<size_t>(rows_), mpz_class(0));
      for (long i = r; i < rows_; ++i)
        np.v[static_cast<size_t>(i)] =
            s * p.v[static_cast<size_t>(i)] + tco * c.v[static_cast<size_t>(i)];
      for (const auto& [t, k] : p.expr) np.expr[t] += s * k;
      for (const auto& [t, k] : c.expr) np.expr[t] += tco * k;
      for (auto eit = np.expr.begin(); eit != np.expr.end();) {
        if (eit->second == 0)
          eit = np.expr.erase(eit);
        else
          ++eit;
      }
      std::vector<mpz_class> cv_new(static_cast<size_t>(rows_), mpz_class(0));
      for (long i = r; i < rows_; ++i)
        cv_new[static_cast<size_t>(i)] =
            pq * c.v[static_cast<size_t>(i)] - cq * p.v[static_cast<size_t>(i)];
      std::map<long, mpz_class> ce_new;
      for (const auto& [t, k] : c.expr) ce_new[t] += pq * k;
      for (const auto& [t, k] : p.expr) ce_new[t] -= cq * k;
      for (auto eit = ce_new.begin(); eit != ce_new.end();) {
        if (eit->second == 0)
          eit = ce_new.erase(eit);
        else
          ++eit;
      }
      c.v = std::move(cv_new);
      c.expr = std::move(ce_new);
      p = std::move(np);
      ++r;
    }
  }
  // c reduced to zero: nothing to add.
}

bool ColumnHnf::member(const SparseVec& x,
                       std::vector<std::pair<long, mpz_class>>* combo) const {
  std::vector<mpz_class> v(static_cast<size_t>(rows_), mpz_class(0));
  for (const auto& [i, val] : x) {
    if (i < 0 || i >= rows_) throw std::runtime_error("hnf index range");
    v[static_cast<size_t>(i)] = val;
  }
  std::map<long, mpz_class> expr;
  for (long r = 0; r < rows_; ++r) {
    if (v[static_cast<size_t>(r)] == 0) continue;
    auto it = pivots_.find(r);
    if (it == pivots_.end()) return false;
    const Col& p = it->second;
    const mpz_class& pv = p.v[static_cast<size_t>(r)];
    if (v[static_cast<size_t>(r)] % pv != 0) return false;
    mpz_class q = v[static_cast<size_t>(r)] / pv;
    for (long i = r; i < rows_; ++i)
      if (p.v[static_cast<size_t>(i)] != 0)
        v[static_cast<size_t>(i)] -= q * p.v[static_cast<size_t>(i)];
    for (const auto& [t, k] : p.expr) {
      expr[t] += q * k;
      if (expr[t] == 0) expr.erase(t);
    }
  }
  if (combo) {
    combo->clear();
    for (const auto& [t, k] : expr) combo->emplace_back(t, k);
  }
  return true;
}

}  // namespace homforge
