#include "homforge/line_configs.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace homforge {

namespace {

// Per-field lookup context: inverse table (q is small and prime).
struct FieldCtx {
  int q;
  std::vector<int> inv;
  explicit FieldCtx(int q_) : q(q_), inv(static_cast<size_t>(q_), 0) {
    for (int a = 1; a < q; ++a)
      for (int b = 1; b < q; ++b)
        if (a * b % q == 1) {
          inv[static_cast<size_t>(a)] = b;
          break;
        }
  }
};

const FieldCtx& field_ctx(int q) {
  static std::map<int, FieldCtx> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(q);
  if (it == cache.end()) {
    fe(0, q);  // validates that q is an admissible prime
    it = cache.emplace(q, FieldCtx(q)).first;
  }
  return it->second;
}

// Rank of a list of integer vectors mod q (vectors copied and reduced).
int rank_of(std::vector<std::vector<int>> rows, int q) {
  if (rows.empty()) return 0;
  const int n = static_cast<int>(rows[0].size());
  const FieldCtx& F = field_ctx(q);
  int rank = 0;
  std::vector<std::pair<int, std::vector<int>>> ech;  // (pivot col, row)
  for (auto& v : rows) {
    for (auto& [pc, e] : ech) {
      int c = v[static_cast<size_t>(pc)];
      if (c)
        for (int j = 0; j < n; ++j)
          v[static_cast<size_t>(j)] =
              (v[static_cast<size_t>(j)] + (q - c) * e[static_cast<size_t>(j)]) % q;
    }
    int p = -1;
    for (int j = 0; j < n; ++j)
      if (v[static_cast<size_t>(j)]) {
        p = j;
        break;
      }
    if (p < 0) continue;
    int s = F.inv[static_cast<size_t>(v[static_cast<size_t>(p)])];
    for (int j = 0; j < n; ++j)
      v[static_cast<size_t>(j)] = v[static_cast<size_t>(j)] * s % q;
    ech.emplace_back(p, v);
    ++rank;
  }
  return rank;
}

}  // namespace

Line make_line(std::vector<int> coords, int q) {
  const FieldCtx& F = field_ctx(q);
  int p = -1;
  for (size_t j = 0; j < coords.size(); ++j) {
    int v = coords[j] % q;
    if (v < 0) v += q;
    coords[j] = v;
    if (p < 0 && v != 0) p = static_cast<int>(j);
  }
  if (p < 0) throw std::runtime_error("zero vector does not span a line");
  int s = F.inv[static_cast<size_t>(coords[static_cast<size_t>(p)])];
  for (auto& v : coords) v = v * s % q;
  return Line{std::move(coords)};
}

LineTuple make_tuple(int n, int q, const std::vector<std::vector<int>>& coords) {
  LineTuple t;
  t.n = n;
  t.q = q;
  field_ctx(q);
  for (const auto& c : coords) {
    if (static_cast<int>(c.size()) != n)
      throw std::runtime_error("line coordinate count differs from ambient n");
    t.lines.push_back(make_line(c, q));
  }
  return t;
}

bool is_general_position(const LineTuple& t, TupleKind kind) {
  const int len = t.length();
  if (kind == TupleKind::D) {
    for (int i = 0; i < len; ++i)
      for (int j = i + 1; j < len; ++j)
        if (t.lines[static_cast<size_t>(i)] == t.lines[static_cast<size_t>(j)])
          return false;
    return true;
  }
  const int k = std::min(len, t.n);
  if (k <= 0) return true;
  // Every k-subset independent.
  std::vector<int> pick(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i) pick[static_cast<size_t>(i)] = i;
  while (true) {
    std::vector<std::vector<int>> rows;
    for (int i : pick) rows.push_back(t.lines[static_cast<size_t>(i)].coords);
    if (rank_of(std::move(rows), t.q) != k) return false;
    // next combination
    int pos = k - 1;
    while (pos >= 0 && pick[static_cast<size_t>(pos)] == len - k + pos) --pos;
    if (pos < 0) break;
    ++pick[static_cast<size_t>(pos)];
    for (int i = pos + 1; i < k; ++i)
      pick[static_cast<size_t>(i)] = pick[static_cast<size_t>(i - 1)] + 1;
  }
  return true;
}

int tuple_rank(const LineTuple& t) {
  std::vector<std::vector<int>> rows;
  for (const auto& l : t.lines) rows.push_back(l.coords);
  return rank_of(std::move(rows), t.q);
}

CanonicalResult canonical_form(const LineTuple& t) {
  const int n = t.n, q = t.q, len = t.length();
  const FieldCtx& F = field_ctx(q);
  for (int i = 0; i < len; ++i)
    for (int j = i + 1; j < len; ++j)
      if (t.lines[static_cast<size_t>(i)] == t.lines[static_cast<size_t>(j)])
        throw std::runtime_error("degenerate tuple: repeated line");

  // Greedy independent spanning subset in index order.
  std::vector<std::vector<int>> ech;
  std::vector<int> pivcol, basisIdx;
  for (int i = 0; i < len; ++i) {
    std::vector<int> v = t.lines[static_cast<size_t>(i)].coords;
    for (size_t k = 0; k < ech.size(); ++k) {
      int c = v[static_cast<size_t>(pivcol[k])];
      if (c)
        for (int j = 0; j < n; ++j)
          v[static_cast<size_t>(j)] =
              (v[static_cast<size_t>(j)] + (q - c) * ech[k][static_cast<size_t>(j)]) %
              q;
    }
    int p = -1;
    for (int j = 0; j < n; ++j)
      if (v[static_cast<size_t>(j)]) {
        p = j;
        break;
      }
    if (p < 0) continue;
    int s = F.inv[static_cast<size_t>(v[static_cast<size_t>(p)])];
    for (int j = 0; j < n; ++j)
      v[static_cast<size_t>(j)] = v[static_cast<size_t>(j)] * s % q;
    ech.push_back(std::move(v));
    pivcol.push_back(p);
    basisIdx.push_back(i);
  }
  const int r = static_cast<int>(basisIdx.size());

  // Change of basis sending the chosen lines to e_1..e_r; complement filled
  // with standard basis vectors (immaterial: all lines lie in the span).
  FqMatrix E(n, n, q);
  {
    std::vector<std::vector<int>> cech;
    std::vector<int> cpiv;
    auto add_col = [&](const std::vector<int>& v) -> bool {
      std::vector<int> w = v;
      for (size_t k = 0; k < cech.size(); ++k) {
        int c = w[static_cast<size_t>(cpiv[k])];
        if (c)
          for (int j = 0; j < n; ++j)
            w[static_cast<size_t>(j)] =
                (w[static_cast<size_t>(j)] +
                 (q - c) * cech[k][static_cast<size_t>(j)]) %
                q;
      }
      int p = -1;
      for (int j = 0; j < n; ++j)
        if (w[static_cast<size_t>(j)]) {
          p = j;
          break;
        }
      if (p < 0) return false;
      int s = F.inv[static_cast<size_t>(w[static_cast<size_t>(p)])];
      for (int j = 0; j < n; ++j)
        w[static_cast<size_t>(j)] = w[static_cast<size_t>(j)] * s % q;
      cech.push_back(std::move(w));
      cpiv.push_back(p);
      return true;
    };
    int col = 0;
    for (int j = 0; j < r; ++j, ++col) {
      const auto& rep = t.lines[static_cast<size_t>(basisIdx[j])].coords;
      for (int i = 0; i < n; ++i) E.at(i, col) = rep[static_cast<size_t>(i)];
      add_col(rep);
    }
    for (int cand = 0; cand < n && col < n; ++cand) {
      std::vector<int> v(static_cast<size_t>(n), 0);
      v[static_cast<size_t>(cand)] = 1;
      if (add_col(v)) {
        E.at(cand, col) = 1;
        ++col;
      }
    }
  }
  FqMatrix g0 = fm_inverse(E);

  // Torus normalization state: union-find over the r pivot slots with
  // multiplicative ratio labels (value[x] means t_x = value * t_parent).
  std::vector<int> parent(static_cast<size_t>(std::max(r, 1)));
  std::vector<int> ratio(static_cast<size_t>(std::max(r, 1)), 1);
  for (int i = 0; i < r; ++i) parent[static_cast<size_t>(i)] = i;
  auto find = [&](auto&& self, int x) -> std::pair<int, int> {
    if (parent[static_cast<size_t>(x)] == x) return {x, 1};
    auto [root, a] = self(self, parent[static_cast<size_t>(x)]);
    parent[static_cast<size_t>(x)] = root;
    ratio[static_cast<size_t>(x)] = ratio[static_cast<size_t>(x)] * a % q;
    return {root, ratio[static_cast<size_t>(x)]};
  };

  std::vector<int> posOf(static_cast<size_t>(len), -1);
  for (int j = 0; j < r; ++j) posOf[static_cast<size_t>(basisIdx[j])] = j;

  CanonicalResult res;
  res.canonical.n = n;
  res.canonical.q = q;
  for (int i = 0; i < len; ++i) {
    if (posOf[static_cast<size_t>(i)] >= 0) {
      std::vector<int> w(static_cast<size_t>(n), 0);
      w[static_cast<size_t>(posOf[static_cast<size_t>(i)])] = 1;
      res.canonical.lines.push_back(Line{std::move(w)});
      continue;
    }
    std::vector<int> w(static_cast<size_t>(n), 0);
    for (int row = 0; row < n; ++row) {
      long acc = 0;
      for (int k = 0; k < n; ++k)
        acc += static_cast<long>(g0.at(row, k)) *
               t.lines[static_cast<size_t>(i)].coords[static_cast<size_t>(k)];
      w[static_cast<size_t>(row)] = static_cast<int>(acc % q);
    }
    int p = -1;
    for (int j = 0; j < n; ++j)
      if (w[static_cast<size_t>(j)]) {
        p = j;
        break;
      }
    if (p < 0 || p >= r)
      throw std::runtime_error("internal: mapped line outside the span");
    int s = F.inv[static_cast<size_t>(w[static_cast<size_t>(p)])];
    for (int j = 0; j < n; ++j)
      w[static_cast<size_t>(j)] = w[static_cast<size_t>(j)] * s % q;
    for (int sp = p + 1; sp < r; ++sp) {
      int c = w[static_cast<size_t>(sp)];
      if (!c) continue;
      auto [rp, ap] = find(find, p);
      auto [rs, as] = find(find, sp);
      if (rp != rs) {
        parent[static_cast<size_t>(rs)] = rp;
        ratio[static_cast<size_t>(rs)] =
            ap * F.inv[static_cast<size_t>(as)] % q *
            F.inv[static_cast<size_t>(c)] % q;
        w[static_cast<size_t>(sp)] = 1;
      } else {
        w[static_cast<size_t>(sp)] =
            c * as % q * F.inv[static_cast<size_t>(ap)] % q;
      }
    }
    res.canonical.lines.push_back(Line{std::move(w)});
  }

  // g = D * g0 with the torus values read off the union-find (roots at 1).
  res.g = g0;
  for (int j = 0; j < r; ++j) {
    auto [root, a] = find(find, j);
    (void)root;
    if (a != 1)
      for (int k = 0; k < n; ++k) res.g.at(j, k) = res.g.at(j, k) * a % q;
  }
  return res;
}

mpz_class gl_order(int m, int q) {
  mpz_class total = 1;
  mpz_class qm = 1;
  for (int i = 0; i < m; ++i) qm *= q;
  mpz_class qi = 1;
  for (int i = 0; i < m; ++i) {
    total *= (qm - qi);
    qi *= q;
  }
  return total;
}

mpz_class stabilizer_order(const StabilizerDescription& s, int q) {
  mpz_class total = 1;
  for (const auto& f : s.leviFactors) {
    if (f.kind == LeviFactor::Kind::Scalar)
      total *= (q - 1);
    else
      total *= gl_order(f.size, q);
  }
  mpz_class qu = 1;
  for (long i = 0; i < s.unipotentDim; ++i) qu *= q;
  return total * qu;
}

std::string StabilizerDescription::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& f : leviFactors) {
    if (!first) os << " x ";
    first = false;
    if (f.kind == LeviFactor::Kind::Scalar) {
      if (f.size == 1)
        os << "F*";
      else
        os << "F*I_" << f.size;
    } else {
      os << "GL_" << f.size;
    }
  }
  if (first) os << "1";
  os << " | unip " << unipotentDim;
  return os.str();
}

StabilizerDescription stabilizer(const LineTuple& t) {
  const int n = t.n, q = t.q, len = t.length();
  for (int i = 0; i < len; ++i)
    for (int j = i + 1; j < len; ++j)
      if (t.lines[static_cast<size_t>(i)] == t.lines[static_cast<size_t>(j)])
        throw std::runtime_error("degenerate tuple: repeated line");

  // S = {X : X v_i in <v_i>} as the nullspace of per-line constraints
  // (Xv)_s - v_s (Xv)_p = 0 for s != p, where p is the line's pivot.
  std::vector<int> pivot(static_cast<size_t>(len));
  FqMatrix A(len * (n - 1), n * n, q);
  int row = 0;
  for (int li = 0; li < len; ++li) {
    const auto& v = t.lines[static_cast<size_t>(li)].coords;
    int p = -1;
    for (int j = 0; j < n; ++j)
      if (v[static_cast<size_t>(j)]) {
        p = j;
        break;
      }
    pivot[static_cast<size_t>(li)] = p;
    for (int s = 0; s < n; ++s) {
      if (s == p) continue;
      for (int j = 0; j < n; ++j) {
        int c = v[static_cast<size_t>(j)];
        if (!c) continue;
        A.at(row, s * n + j) = (A.at(row, s * n + j) + c) % q;
        int sub = v[static_cast<size_t>(s)] * c % q;
        A.at(row, p * n + j) = (A.at(row, p * n + j) + q - sub) % q;
      }
      ++row;
    }
  }
  FqMatrix nullsp = fm_nullspace(A);  // columns form a basis of S
  const long dimS = nullsp.cols;

  // Eigenvalue functional of basis element bcol at line li: (X v)_p.
  auto lambda = [&](int bcol, int li) {
    const auto& v = t.lines[static_cast<size_t>(li)].coords;
    int p = pivot[static_cast<size_t>(li)];
    long acc = 0;
    for (int j = 0; j < n; ++j)
      acc += static_cast<long>(nullsp.at(p * n + j, bcol)) *
             v[static_cast<size_t>(j)];
    return static_cast<int>(acc % q);
  };

  StabilizerDescription d;
  d.dimS = dimS;
  std::vector<int> cls(static_cast<size_t>(len), -1);
  for (int i = 0; i < len; ++i) {
    if (cls[static_cast<size_t>(i)] >= 0) continue;
    int id = static_cast<int>(d.tieClasses.size());
    cls[static_cast<size_t>(i)] = id;
    d.tieClasses.push_back({i});
    for (int j = i + 1; j < len; ++j) {
      if (cls[static_cast<size_t>(j)] >= 0) continue;
      bool tied = true;
      for (int b = 0; b < nullsp.cols; ++b)
        if (lambda(b, i) != lambda(b, j)) {
          tied = false;
          break;
        }
      if (tied) {
        cls[static_cast<size_t>(j)] = id;
        d.tieClasses.back().push_back(j);
      }
    }
  }

  long leviDim = 0;
  for (const auto& c : d.tieClasses) {
    std::vector<std::vector<int>> rows;
    for (int i : c) rows.push_back(t.lines[static_cast<size_t>(i)].coords);
    int span = rank_of(std::move(rows), q);
    d.leviFactors.push_back({LeviFactor::Kind::Scalar, span});
    leviDim += 1;
  }
  const int r = tuple_rank(t);
  if (n - r > 0) {
    d.leviFactors.push_back({LeviFactor::Kind::GL, n - r});
    leviDim += static_cast<long>(n - r) * (n - r);
  }
  d.unipotentDim = dimS - leviDim;
  return d;
}

LineTuple apply_face(const LineTuple& t, int i) {
  if (i < 0 || i >= t.length())
    throw std::runtime_error("face index out of range");
  LineTuple r = t;
  r.lines.erase(r.lines.begin() + i);
  return r;
}

LineTuple apply_matrix(const FqMatrix& g, const LineTuple& t) {
  if (g.rows != t.n || g.cols != t.n || g.modulus != t.q)
    throw std::runtime_error("matrix does not act on this tuple's space");
  LineTuple r;
  r.n = t.n;
  r.q = t.q;
  for (const auto& line : t.lines) {
    std::vector<int> w(static_cast<size_t>(t.n), 0);
    for (int row = 0; row < t.n; ++row) {
      long acc = 0;
      for (int k = 0; k < t.n; ++k)
        acc += static_cast<long>(g.at(row, k)) * line.coords[static_cast<size_t>(k)];
      w[static_cast<size_t>(row)] = static_cast<int>(acc % t.q);
    }
    r.lines.push_back(make_line(std::move(w), t.q));
  }
  return r;
}

std::string serialize_tuple(const LineTuple& t) {
  std::ostringstream os;
  for (int i = 0; i < t.length(); ++i) {
    if (i) os << ';';
    const auto& c = t.lines[static_cast<size_t>(i)].coords;
    for (size_t j = 0; j < c.size(); ++j) {
      if (j) os << ',';
      os << c[j];
    }
  }
  return os.str();
}

LineTuple parse_tuple(const std::string& text, int q) {
  LineTuple t;
  t.q = q;
  field_ctx(q);
  if (text.empty()) return t;
  std::vector<std::vector<int>> coords;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ';')) {
    std::vector<int> v;
    std::stringstream ls(part);
    std::string num;
    while (std::getline(ls, num, ',')) {
      size_t used = 0;
      int val = 0;
      try {
        val = std::stoi(num, &used);
      } catch (const std::exception&) {
        throw std::runtime_error("bad tuple literal");
      }
      if (used != num.size()) throw std::runtime_error("bad tuple literal");
      v.push_back(val);
    }
    if (v.empty()) throw std::runtime_error("bad tuple literal");
    coords.push_back(std::move(v));
  }
  t.n = static_cast<int>(coords[0].size());
  for (const auto& v : coords) {
    if (static_cast<int>(v.size()) != t.n)
      throw std::runtime_error("inconsistent coordinate counts");
    t.lines.push_back(make_line(v, q));
  }
  return t;
}

// ---------------------------------------------------------------------------
// Named representative families at n = 4.
// ---------------------------------------------------------------------------

namespace {

std::vector<int> unit4(int i) {  // e_i, 1-based
  std::vector<int> v(4, 0);
  v[static_cast<size_t>(i - 1)] = 1;
  return v;
}

std::vector<int> combo4(std::initializer_list<std::pair<int, int>> terms) {
  std::vector<int> v(4, 0);
  for (auto [i, c] : terms) v[static_cast<size_t>(i - 1)] = c;
  return v;
}

void push_family(std::vector<FamilyInstance>& out, int q, std::string family,
                 std::vector<int> indices, std::vector<int> params,
                 std::vector<std::vector<int>> coords) {
  FamilyInstance fi;
  fi.family = std::move(family);
  fi.indices = std::move(indices);
  fi.params = std::move(params);
  // Qualified: the unqualified name would ADL-resolve to std::make_tuple here.
  fi.rep = homforge::make_tuple(4, q, coords);
  out.push_back(std::move(fi));
}

}  // namespace

std::vector<FamilyInstance> family_representatives(int q, int length) {
  std::vector<FamilyInstance> out;
  const auto e1 = unit4(1), e2 = unit4(2), e3 = unit4(3), e4 = unit4(4);
  const auto s3 = combo4({{1, 1}, {2, 1}, {3, 1}});
  const auto e12 = combo4({{1, 1}, {2, 1}});

  if (length == 3) {
    push_family(out, q, "w_1", {}, {}, {e1, e2, e3});
    push_family(out, q, "w_2", {}, {}, {e1, e2, e12});
    return out;
  }
  if (length == 4) {
    push_family(out, q, "u_1", {}, {}, {e1, e2, e3, e4});
    push_family(out, q, "u_2", {}, {}, {e1, e2, e3, s3});
    push_family(out, q, "u_3", {}, {}, {e1, e2, e3, e12});
    push_family(out, q, "u_4", {}, {}, {e1, e2, e3, combo4({{2, 1}, {3, 1}})});
    push_family(out, q, "u_5", {}, {}, {e1, e2, e3, combo4({{1, 1}, {3, 1}})});
    push_family(out, q, "u_6", {}, {}, {e1, e2, e12, e3});
    for (int a = 2; a < q; ++a)
      push_family(out, q, "u_7", {}, {a}, {e1, e2, e12, combo4({{1, 1}, {2, a}})});
    return out;
  }
  if (length != 5)
    throw std::runtime_error("family lists cover lengths 3, 4, 5 only");

  push_family(out, q, "v_1", {}, {},
              {e1, e2, e3, e4, combo4({{1, 1}, {2, 1}, {3, 1}, {4, 1}})});
  for (int i = 1; i <= 4; ++i)
    for (int j = i + 1; j <= 4; ++j)
      for (int k = j + 1; k <= 4; ++k)
        push_family(out, q, "v_2", {i, j, k}, {},
                    {e1, e2, e3, e4, combo4({{i, 1}, {j, 1}, {k, 1}})});
  for (int i = 1; i <= 4; ++i)
    for (int j = i + 1; j <= 4; ++j)
      push_family(out, q, "v_3", {i, j}, {},
                  {e1, e2, e3, e4, combo4({{i, 1}, {j, 1}})});
  push_family(out, q, "v_4", {}, {}, {e1, e2, e3, s3, e4});
  for (int a = 1; a < q; ++a)
    for (int b = 1; b < q; ++b) {
      if (a == 1 && b == 1) continue;
      push_family(out, q, "v_5", {}, {a, b},
                  {e1, e2, e3, s3, combo4({{1, 1}, {2, a}, {3, b}})});
    }
  for (int i = 1; i <= 3; ++i)
    for (int j = i + 1; j <= 3; ++j)
      for (int a = 1; a < q; ++a)
        push_family(out, q, "v_6", {i, j}, {a},
                    {e1, e2, e3, s3, combo4({{i, 1}, {j, a}})});
  for (int i = 1; i <= 3; ++i)
    for (int j = i + 1; j <= 3; ++j)
      push_family(out, q, "v_7", {i, j}, {},
                  {e1, e2, e3, combo4({{i, 1}, {j, 1}}), e4});
  for (int i = 1; i <= 3; ++i)
    for (int j = i + 1; j <= 3; ++j)
      for (int a = 1; a < q; ++a)
        push_family(out, q, "v_8", {i, j}, {a},
                    {e1, e2, e3, combo4({{i, 1}, {j, a}}), s3});
  for (int i = 1; i <= 3; ++i)
    for (int j = i + 1; j <= 3; ++j)
      for (int a = 2; a < q; ++a)
        push_family(out, q, "v_9", {i, j}, {a},
                    {e1, e2, e3, combo4({{i, 1}, {j, 1}}),
                     combo4({{i, 1}, {j, a}})});
  const auto p12 = e12, p13 = combo4({{1, 1}, {3, 1}}), p23 = combo4({{2, 1}, {3, 1}});
  push_family(out, q, "v_10", {}, {}, {e1, e2, e3, p12, p13});
  push_family(out, q, "v_11", {}, {}, {e1, e2, e3, p13, p12});
  push_family(out, q, "v_12", {}, {}, {e1, e2, e3, p12, p23});
  push_family(out, q, "v_13", {}, {}, {e1, e2, e3, p23, p12});
  push_family(out, q, "v_14", {}, {}, {e1, e2, e3, p13, p23});
  push_family(out, q, "v_15", {}, {}, {e1, e2, e3, p23, p13});
  push_family(out, q, "v_16", {}, {}, {e1, e2, e12, e3, e4});
  for (int a = 1; a < q; ++a)
    push_family(out, q, "v_17", {}, {a},
                {e1, e2, e12, e3, combo4({{1, 1}, {2, a}, {3, 1}})});
  for (int a = 2; a < q; ++a)
    push_family(out, q, "v_18", {}, {a},
                {e1, e2, e12, e3, combo4({{1, 1}, {2, a}})});
  push_family(out, q, "v_19", {}, {}, {e1, e2, e12, e3, p13});
  push_family(out, q, "v_20", {}, {}, {e1, e2, e12, e3, p23});
  for (int a = 2; a < q; ++a)
    push_family(out, q, "v_21", {}, {a},
                {e1, e2, e12, combo4({{1, 1}, {2, a}}), e3});
  for (int a = 2; a < q; ++a)
    for (int b = 2; b < q; ++b) {
      if (a == b) continue;
      push_family(out, q, "v_22", {}, {a, b},
                  {e1, e2, e12, combo4({{1, 1}, {2, a}}),
                   combo4({{1, 1}, {2, b}})});
    }
  return out;
}

namespace {

struct Registry {
  // canonical serialization -> family data
  std::map<std::string, FamilyInstance> byCanonical;
};

const Registry& registry_for(int q) {
  static std::map<int, Registry> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(q);
  if (it != cache.end()) return it->second;
  Registry reg;
  for (int length : {3, 4, 5}) {
    for (auto& fi : family_representatives(q, length)) {
      std::string key = serialize_tuple(canonical_form(fi.rep).canonical);
      auto [pos, inserted] = reg.byCanonical.emplace(key, fi);
      if (!inserted)
        throw std::runtime_error(
            "family registry collision: " + pos->second.family + " vs " +
            fi.family + " share canonical form " + key);
    }
  }
  return cache.emplace(q, std::move(reg)).first->second;
}

}  // namespace

std::string label_text(const OrbitLabel& label) {
  if (label.family.empty()) return "[" + serialize_tuple(label.canonical) + "]";
  std::ostringstream os;
  os << label.family;
  if (!label.indices.empty()) {
    os << "^{";
    for (size_t i = 0; i < label.indices.size(); ++i) {
      if (i) os << ',';
      os << label.indices[i];
    }
    os << "}";
  }
  if (!label.params.empty()) {
    os << "(";
    static const char* names[] = {"a", "b"};
    for (size_t i = 0; i < label.params.size(); ++i) {
      if (i) os << ',';
      os << names[i] << '=' << label.params[i];
    }
    os << ")";
  }
  return os.str();
}

OrbitLabel orbit_label(const LineTuple& t) {
  OrbitLabel label;
  CanonicalResult c = canonical_form(t);
  label.canonical = std::move(c.canonical);
  label.rank = tuple_rank(label.canonical);
  if (t.n == 4 && t.length() >= 3 && t.length() <= 5) {
    const Registry& reg = registry_for(t.q);
    auto it = reg.byCanonical.find(serialize_tuple(label.canonical));
    if (it == reg.byCanonical.end())
      throw std::runtime_error("no representative family matches tuple " +
                               serialize_tuple(label.canonical));
    label.family = it->second.family;
    label.indices = it->second.indices;
    label.params = it->second.params;
  }
  return label;
}

}  // namespace homforge
