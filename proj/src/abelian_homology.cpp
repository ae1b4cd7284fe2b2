#include "homforge/abelian_homology.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

namespace homforge {

namespace {

long mod_reduce(long v, long m) {
  if (m <= 0) return v;
  long r = v % m;
  return (r < 0) ? r + m : r;
}

// All ways to write n as an ordered sum of k nonnegative parts.
std::vector<std::vector<int>> compositions(int n, int k) {
  std::vector<std::vector<int>> out;
  if (k == 0) {
    if (n == 0) out.push_back({});
    return out;
  }
  std::vector<int> cur(k, 0);
  auto rec = [&](auto&& self, int pos, int rest) -> void {
    if (pos == k - 1) {
      cur[pos] = rest;
      out.push_back(cur);
      return;
    }
    for (int v = 0; v <= rest; ++v) {
      cur[pos] = v;
      self(self, pos + 1, rest - v);
    }
  };
  rec(rec, 0, n);
  return out;
}

// The comparison map bar -> periodic for one cyclic factor of order m,
// evaluated on a block of exponents with trivial coefficients:
//   even length: product of carries c(a_1,a_2) c(a_3,a_4) ...
//   odd length:  a_1 times the carries of the remaining pairs,
// where c(a,b) = 1 if a + b wraps past m.  For an infinite factor the carry
// is 0 (H_{>=2}(Z) = 0) and the length-1 value is the exponent itself.
mpz_class comparison_value(long m, const std::vector<long>& block) {
  auto carry = [m](long a, long b) -> long {
    if (m <= 0) return 0;
    return (a + b >= m) ? 1 : 0;
  };
  mpz_class val = 1;
  size_t start = 0;
  if (block.size() % 2 == 1) {
    val = block[0];
    start = 1;
  }
  for (size_t i = start; i + 1 < block.size() && val != 0; i += 2) {
    val *= carry(block[i], block[i + 1]);
  }
  return val;
}

// The section periodic -> bar for one cyclic factor: telescoping sums
//   u_0 = [],   u_{2s+1} = sum [t|t^{j_1}|t|...|t^{j_s}|t],
//   u_{2s}   = sum [t^{j_1}|t|...|t^{j_s}|t],
// over all j in [0,m)^s, as exponent tuples.
std::vector<std::vector<long>> section_tuples(long m, int d) {
  std::vector<std::vector<long>> out;
  if (d == 0) {
    out.push_back({});
    return out;
  }
  if (m <= 0 && d > 1) {
    throw std::logic_error("section_tuples: infinite factor beyond degree 1");
  }
  int s = d / 2;
  bool odd = (d % 2 == 1);
  long span = (m <= 0) ? 1 : m;  // no free exponents when s = 0 anyway
  std::vector<long> js(s, 0);
  while (true) {
    std::vector<long> tuple;
    tuple.reserve(d);
    if (odd) tuple.push_back(1);
    for (int i = 0; i < s; ++i) {
      tuple.push_back(js[i]);
      tuple.push_back(1);
    }
    out.push_back(tuple);
    int pos = s - 1;
    while (pos >= 0 && js[pos] == span - 1) {
      js[pos] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++js[pos];
  }
  return out;
}

// Shuffle (Eilenberg-Zilber) product of two bar chains over one group.
BarChain shuffle_bar(const BarChain& x, const BarChain& y) {
  if (!(x.group == y.group)) {
    throw std::runtime_error("shuffle_bar: groups differ");
  }
  int p = x.degree, q = y.degree;
  BarChain out;
  out.group = x.group;
  out.degree = p + q;
  if (p == 0) {
    // x is a multiple of the empty tuple.
    mpz_class scale = 0;
    for (const auto& [t, c] : x.terms) scale += c;
    for (const auto& [t, c] : y.terms) out.add_term(t, c * scale);
    return out;
  }
  if (q == 0) {
    mpz_class scale = 0;
    for (const auto& [t, c] : y.terms) scale += c;
    for (const auto& [t, c] : x.terms) out.add_term(t, c * scale);
    return out;
  }
  // Choose the positions of the x-entries among 0..p+q-1.
  std::vector<int> pos(p);
  std::iota(pos.begin(), pos.end(), 0);
  std::vector<std::pair<std::vector<int>, int>> choices;  // positions, sign
  while (true) {
    long inv = 0;
    for (int k = 0; k < p; ++k) inv += pos[k] - k;
    choices.emplace_back(pos, (inv % 2 == 0) ? 1 : -1);
    int i = p - 1;
    while (i >= 0 && pos[i] == p + q - (p - i)) --i;
    if (i < 0) break;
    ++pos[i];
    for (int j = i + 1; j < p; ++j) pos[j] = pos[j - 1] + 1;
  }
  for (const auto& [xt, xc] : x.terms) {
    for (const auto& [yt, yc] : y.terms) {
      for (const auto& [ps, sign] : choices) {
        std::vector<GroupElem> tuple(p + q);
        std::vector<bool> used(p + q, false);
        for (int k = 0; k < p; ++k) {
          tuple[ps[k]] = xt[k];
          used[ps[k]] = true;
        }
        int yk = 0;
        for (int s = 0; s < p + q; ++s) {
          if (!used[s]) tuple[s] = yt[yk++];
        }
        out.add_term(tuple, xc * yc * sign);
      }
    }
  }
  return out;
}

void check_elem(const FinAbGroup& A, const GroupElem& g, const char* what) {
  if (static_cast<int>(g.size()) != A.factor_count()) {
    throw std::runtime_error(std::string(what) +
                             ": element size does not match factor count");
  }
}

}  // namespace

GroupElem FinAbGroup::reduce(GroupElem v) const {
  check_elem(*this, v, "reduce");
  for (size_t i = 0; i < v.size(); ++i) v[i] = mod_reduce(v[i], orders[i]);
  return v;
}

GroupElem FinAbGroup::add(const GroupElem& a, const GroupElem& b) const {
  check_elem(*this, a, "add");
  check_elem(*this, b, "add");
  GroupElem out(a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    out[i] = mod_reduce(a[i] + b[i], orders[i]);
  }
  return out;
}

GroupElem FinAbGroup::neg(const GroupElem& a) const {
  check_elem(*this, a, "neg");
  GroupElem out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = mod_reduce(-a[i], orders[i]);
  return out;
}

void BarChain::add_term(const std::vector<GroupElem>& tuple,
                        const mpz_class& coeff) {
  if (static_cast<int>(tuple.size()) != degree) {
    throw std::runtime_error("bar term length does not match chain degree");
  }
  std::vector<GroupElem> red;
  red.reserve(tuple.size());
  for (const auto& g : tuple) red.push_back(group.reduce(g));
  auto it = terms.find(red);
  if (it == terms.end()) {
    if (coeff != 0) terms.emplace(std::move(red), coeff);
  } else {
    it->second += coeff;
    if (it->second == 0) terms.erase(it);
  }
}

BarChain bar_differential(const BarChain& ch) {
  BarChain out;
  out.group = ch.group;
  out.degree = (ch.degree > 0) ? ch.degree - 1 : 0;
  if (ch.degree == 0) return out;
  int n = ch.degree;
  for (const auto& [tuple, coeff] : ch.terms) {
    {
      std::vector<GroupElem> face(tuple.begin() + 1, tuple.end());
      out.add_term(face, coeff);
    }
    for (int i = 1; i < n; ++i) {
      std::vector<GroupElem> face;
      face.reserve(n - 1);
      for (int s = 0; s < i - 1; ++s) face.push_back(tuple[s]);
      face.push_back(ch.group.add(tuple[i - 1], tuple[i]));
      for (int s = i + 1; s < n; ++s) face.push_back(tuple[s]);
      out.add_term(face, (i % 2 == 0) ? coeff : -coeff);
    }
    {
      std::vector<GroupElem> face(tuple.begin(), tuple.end() - 1);
      out.add_term(face, (n % 2 == 0) ? coeff : -coeff);
    }
  }
  return out;
}

bool is_bar_cycle(const BarChain& ch) {
  return bar_differential(ch).terms.empty();
}

BarChain cycle_c(const FinAbGroup& A, const std::vector<GroupElem>& gs) {
  for (const auto& g : gs) check_elem(A, g, "cycle_c");
  int n = static_cast<int>(gs.size());
  BarChain out;
  out.group = A;
  out.degree = n;
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  do {
    long inv = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (idx[i] > idx[j]) ++inv;
      }
    }
    std::vector<GroupElem> tuple;
    tuple.reserve(n);
    for (int i = 0; i < n; ++i) tuple.push_back(gs[idx[i]]);
    out.add_term(tuple, (inv % 2 == 0) ? 1 : -1);
  } while (std::next_permutation(idx.begin(), idx.end()));
  return out;
}

long SmallResolution::word_index(int degree, const SmallWord& w) const {
  if (degree < 0 || degree >= static_cast<int>(words.size())) return -1;
  auto it = index_[degree].find(w);
  return (it == index_[degree].end()) ? -1 : it->second;
}

SmallResolution small_resolution(const FinAbGroup& A, int maxDeg) {
  if (maxDeg < 0 || maxDeg > 6) {
    throw std::runtime_error("small_resolution: maxDeg must be in [0,6]");
  }
  for (long m : A.orders) {
    if (m < 0) throw std::runtime_error("small_resolution: negative order");
  }
  SmallResolution R;
  R.group = A;
  R.maxDeg = maxDeg;
  int k = A.factor_count();
  int top = maxDeg + 1;
  R.words.resize(top + 1);
  R.index_.resize(top + 1);
  for (int d = 0; d <= top; ++d) {
    for (const auto& comp : compositions(d, k)) {
      bool ok = true;
      for (int i = 0; i < k; ++i) {
        if (A.orders[i] == 0 && comp[i] > 1) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      R.index_[d].emplace(comp, static_cast<long>(R.words[d].size()));
      R.words[d].push_back(comp);
    }
  }
  R.complex.dims.resize(top + 1);
  R.complex.boundaries.resize(top + 1);
  for (int d = 0; d <= top; ++d) {
    R.complex.dims[d] = static_cast<long>(R.words[d].size());
  }
  for (int d = 1; d <= top; ++d) {
    SparseIntMatrix b(R.complex.dims[d - 1], R.complex.dims[d]);
    for (size_t j = 0; j < R.words[d].size(); ++j) {
      const SmallWord& w = R.words[d][j];
      int signExp = 0;
      for (int i = 0; i < k; ++i) {
        if (w[i] >= 1 && w[i] % 2 == 0) {
          SmallWord tgt = w;
          tgt[i] -= 1;
          long row = R.word_index(d - 1, tgt);
          mpz_class coeff = A.orders[i];
          if (signExp % 2 == 1) coeff = -coeff;
          b.add(row, static_cast<long>(j), coeff);
        }
        signExp += w[i];
      }
    }
    R.complex.boundaries[d] = std::move(b);
  }
  R.H.reserve(maxDeg + 1);
  for (int d = 0; d <= maxDeg; ++d) R.H.push_back(homology(R.complex, d));
  return R;
}

namespace {

std::vector<AbelianGroupStructure> cyclic_graded(long m, int N) {
  std::vector<AbelianGroupStructure> out(N + 1);
  out[0].rank = 1;
  for (int d = 1; d <= N; ++d) {
    if (m == 0) {
      if (d == 1) out[d].rank = 1;
    } else if (d % 2 == 1 && m >= 2) {
      out[d].torsion = {mpz_class(m)};
    }
  }
  return out;
}

AbelianGroupStructure canonical_sum(long rank,
                                    const std::vector<mpz_class>& torsion) {
  SparseIntMatrix diag(static_cast<long>(torsion.size()),
                       static_cast<long>(torsion.size()));
  for (size_t i = 0; i < torsion.size(); ++i) {
    diag.set(static_cast<long>(i), static_cast<long>(i), torsion[i]);
  }
  AbelianGroupStructure s = cokernel_structure(diag);
  s.rank += rank;
  return s;
}

void append_tensor(const AbelianGroupStructure& x,
                   const AbelianGroupStructure& y, long* rank,
                   std::vector<mpz_class>* torsion) {
  *rank += x.rank * y.rank;
  for (const auto& d : x.torsion) {
    for (long r = 0; r < y.rank; ++r) torsion->push_back(d);
  }
  for (const auto& e : y.torsion) {
    for (long r = 0; r < x.rank; ++r) torsion->push_back(e);
  }
  for (const auto& d : x.torsion) {
    for (const auto& e : y.torsion) {
      mpz_class g;
      mpz_gcd(g.get_mpz_t(), d.get_mpz_t(), e.get_mpz_t());
      if (g > 1) torsion->push_back(g);
    }
  }
}

void append_tor(const AbelianGroupStructure& x, const AbelianGroupStructure& y,
                std::vector<mpz_class>* torsion) {
  for (const auto& d : x.torsion) {
    for (const auto& e : y.torsion) {
      mpz_class g;
      mpz_gcd(g.get_mpz_t(), d.get_mpz_t(), e.get_mpz_t());
      if (g > 1) torsion->push_back(g);
    }
  }
}

std::vector<AbelianGroupStructure> kunneth_combine(
    const std::vector<AbelianGroupStructure>& X,
    const std::vector<AbelianGroupStructure>& Y, int N) {
  std::vector<AbelianGroupStructure> out(N + 1);
  for (int n = 0; n <= N; ++n) {
    long rank = 0;
    std::vector<mpz_class> torsion;
    for (int i = 0; i <= n; ++i) {
      append_tensor(X[i], Y[n - i], &rank, &torsion);
    }
    for (int i = 0; i + 1 <= n; ++i) {
      append_tor(X[i], Y[n - 1 - i], &torsion);
    }
    out[n] = canonical_sum(rank, torsion);
  }
  return out;
}

}  // namespace

AbelianGroupStructure kunneth_prediction(const FinAbGroup& A, int n) {
  std::vector<AbelianGroupStructure> acc(n + 1);
  acc[0].rank = 1;  // homology of the trivial group
  for (long m : A.orders) {
    acc = kunneth_combine(acc, cyclic_graded(m, n), n);
  }
  return acc[n];
}

bool HClass::is_zero() const {
  for (const auto& c : coords) {
    if (c != 0) return false;
  }
  return true;
}

SparseVec bar_projection(const SmallResolution& R, const BarChain& ch) {
  if (!(ch.group == R.group)) {
    throw std::runtime_error("bar_projection: groups differ");
  }
  int n = ch.degree;
  if (n < 0 || n >= static_cast<int>(R.words.size())) {
    throw std::runtime_error("bar_projection: degree out of range");
  }
  int k = ch.group.factor_count();
  std::vector<std::vector<int>> splits = compositions(n, k);
  std::map<long, mpz_class> acc;
  for (const auto& [tuple, coeff] : ch.terms) {
    for (const auto& split : splits) {
      mpz_class val = 1;
      int off = 0;
      for (int i = 0; i < k && val != 0; ++i) {
        std::vector<long> block;
        block.reserve(split[i]);
        for (int s = 0; s < split[i]; ++s) block.push_back(tuple[off + s][i]);
        off += split[i];
        val *= comparison_value(ch.group.orders[i], block);
      }
      if (val == 0) continue;
      long idx = R.word_index(n, split);
      if (idx < 0) {
        // Only degree assignments past an infinite factor's cap can be
        // absent, and those always carry a zero comparison value.
        throw std::logic_error("bar_projection: missing small-complex word");
      }
      acc[idx] += coeff * val;
    }
  }
  SparseVec z;
  for (const auto& [idx, v] : acc) {
    if (v != 0) z.emplace_back(idx, v);
  }
  return z;
}

HClass bar_to_small(const BarChain& ch) {
  if (!is_bar_cycle(ch)) {
    throw std::runtime_error("bar_to_small: chain is not a cycle");
  }
  int n = ch.degree;
  SmallResolution R = small_resolution(ch.group, n);
  SparseVec z = bar_projection(R, ch);
  HClass out;
  out.group = ch.group;
  out.degree = n;
  out.structure = R.H[n].structure;
  out.coords = class_coordinates(R.H[n], z);
  return out;
}

BarChain small_section(const SmallResolution& R, int degree,
                       const SparseVec& chain) {
  if (degree < 0 || degree >= static_cast<int>(R.words.size())) {
    throw std::runtime_error("small_section: degree out of range");
  }
  int k = R.group.factor_count();
  BarChain out;
  out.group = R.group;
  out.degree = degree;
  for (const auto& [idx, coeff] : chain) {
    if (idx < 0 || idx >= static_cast<long>(R.words[degree].size())) {
      throw std::runtime_error("small_section: chain index out of range");
    }
    const SmallWord& w = R.words[degree][idx];
    BarChain cur;
    cur.group = R.group;
    cur.degree = 0;
    cur.add_term({}, 1);
    for (int i = 0; i < k; ++i) {
      BarChain ui;
      ui.group = R.group;
      ui.degree = w[i];
      for (const auto& tup : section_tuples(R.group.orders[i], w[i])) {
        std::vector<GroupElem> embedded;
        embedded.reserve(tup.size());
        for (long e : tup) {
          GroupElem g = R.group.zero();
          g[i] = e;
          embedded.push_back(std::move(g));
        }
        ui.add_term(embedded, 1);
      }
      cur = shuffle_bar(cur, ui);
    }
    for (const auto& [t, c] : cur.terms) out.add_term(t, c * coeff);
  }
  return out;
}

BarChain class_representative(const HClass& x) {
  SmallResolution R = small_resolution(x.group, x.degree);
  if (x.coords.size() != R.H[x.degree].generators.size()) {
    throw std::runtime_error(
        "class_representative: coordinate count does not match homology");
  }
  std::map<long, mpz_class> acc;
  for (size_t i = 0; i < x.coords.size(); ++i) {
    for (const auto& [idx, v] : R.H[x.degree].generators[i]) {
      acc[idx] += x.coords[i] * v;
    }
  }
  SparseVec chain;
  for (const auto& [idx, v] : acc) {
    if (v != 0) chain.emplace_back(idx, v);
  }
  return small_section(R, x.degree, chain);
}

HClass shuffle_product(const HClass& x, const HClass& y) {
  if (x.degree + y.degree > 6) {
    throw std::runtime_error("shuffle_product: degrees sum past 6");
  }
  FinAbGroup AB;
  AB.orders = x.group.orders;
  AB.orders.insert(AB.orders.end(), y.group.orders.begin(),
                   y.group.orders.end());
  int ka = x.group.factor_count();
  int kb = y.group.factor_count();
  BarChain bx = class_representative(x);
  BarChain by = class_representative(y);
  BarChain ex, ey;
  ex.group = AB;
  ex.degree = bx.degree;
  for (const auto& [tuple, c] : bx.terms) {
    std::vector<GroupElem> emb;
    emb.reserve(tuple.size());
    for (const auto& g : tuple) {
      GroupElem h = g;
      h.resize(ka + kb, 0);
      emb.push_back(std::move(h));
    }
    ex.add_term(emb, c);
  }
  ey.group = AB;
  ey.degree = by.degree;
  for (const auto& [tuple, c] : by.terms) {
    std::vector<GroupElem> emb;
    emb.reserve(tuple.size());
    for (const auto& g : tuple) {
      GroupElem h(ka, 0);
      h.insert(h.end(), g.begin(), g.end());
      emb.push_back(std::move(h));
    }
    ey.add_term(emb, c);
  }
  return bar_to_small(shuffle_bar(ex, ey));
}

GroupElem apply_hom(const GroupHom& f, const GroupElem& g) {
  check_elem(f.src, g, "apply_hom");
  GroupElem out(f.dst.factor_count(), 0);
  for (int i = 0; i < f.dst.factor_count(); ++i) {
    long acc = 0;
    for (int j = 0; j < f.src.factor_count(); ++j) {
      acc += f.matrix[i][j] * g[j];
    }
    out[i] = mod_reduce(acc, f.dst.orders[i]);
  }
  return out;
}

namespace {

void validate_hom(const GroupHom& f) {
  if (static_cast<int>(f.matrix.size()) != f.dst.factor_count()) {
    throw std::runtime_error("induced: matrix row count mismatch");
  }
  for (const auto& row : f.matrix) {
    if (static_cast<int>(row.size()) != f.src.factor_count()) {
      throw std::runtime_error("induced: matrix column count mismatch");
    }
  }
  for (int j = 0; j < f.src.factor_count(); ++j) {
    long m = f.src.orders[j];
    if (m == 0) continue;
    for (int i = 0; i < f.dst.factor_count(); ++i) {
      long M = f.dst.orders[i];
      long v = f.matrix[i][j] * m;
      bool ok = (M == 0) ? (v == 0) : (v % M == 0);
      if (!ok) {
        throw std::runtime_error("induced: matrix is not a homomorphism");
      }
    }
  }
}

}  // namespace

HClass induced(const GroupHom& f, const HClass& x) {
  validate_hom(f);
  if (!(f.src == x.group)) {
    throw std::runtime_error("induced: class group does not match source");
  }
  BarChain rep = class_representative(x);
  BarChain mapped;
  mapped.group = f.dst;
  mapped.degree = rep.degree;
  for (const auto& [tuple, c] : rep.terms) {
    std::vector<GroupElem> img;
    img.reserve(tuple.size());
    for (const auto& g : tuple) img.push_back(apply_hom(f, g));
    mapped.add_term(img, c);
  }
  return bar_to_small(mapped);
}

namespace {

int primitive_root(int q) {
  int order = q - 1;
  std::vector<int> primes;
  int t = order;
  for (int p = 2; p * p <= t; ++p) {
    if (t % p == 0) {
      primes.push_back(p);
      while (t % p == 0) t /= p;
    }
  }
  if (t > 1) primes.push_back(t);
  for (int r = 2; r < q; ++r) {
    bool ok = true;
    for (int p : primes) {
      long v = 1;
      for (int e = 0; e < order / p; ++e) v = (v * r) % q;
      if (v == 1) {
        ok = false;
        break;
      }
    }
    if (ok) return r;
  }
  throw std::logic_error("primitive_root: none found");
}

}  // namespace

HClass bracket_class(const std::vector<int>& as, int n, int q) {
  if (n < 1 || n > 4) {
    throw std::runtime_error("bracket_class: n must be in [1,4]");
  }
  if (static_cast<int>(as.size()) != n) {
    throw std::runtime_error("bracket_class: argument count must equal n");
  }
  for (int a : as) {
    if (a <= 0 || a >= q) {
      throw std::runtime_error("bracket_class: entries must be nonzero residues");
    }
  }
  int r = primitive_root(q);
  std::vector<int> dlog(q, -1);
  long v = 1;
  for (int e = 0; e < q - 1; ++e) {
    dlog[v] = e;
    v = (v * r) % q;
  }
  FinAbGroup T;
  T.orders.assign(n, q - 1);
  std::vector<GroupElem> elems;
  elems.reserve(n);
  if (n == 1) {
    // The determinant-one normalization degenerates at n = 1 (the only
    // determinant-one diagonal is the identity); [a] is the plain class of
    // diag(a), matching H_1(F*) = F*.
    elems.push_back({dlog[as[0]]});
  } else {
    for (int i = 1; i <= n; ++i) {
      long e = dlog[as[i - 1]];
      GroupElem g(n, 0);
      if (i < n) {
        for (int s = 0; s < i; ++s) g[s] = e;
        g[i] = mod_reduce(-static_cast<long>(i) * e, q - 1);
      } else {
        for (int s = 0; s < n - 1; ++s) g[s] = e;
        g[n - 1] = mod_reduce(-static_cast<long>(n - 1) * e, q - 1);
      }
      elems.push_back(std::move(g));
    }
  }
  return bar_to_small(cycle_c(T, elems));
}

namespace {

// The relation lattice of the permutation action depends only on the group
// and the degree; it is expensive (one induced map per generator and
// transposition), so cache its Smith form.
struct CoinvCache {
  long g = 0;
  DenseIntMatrix U;
  std::vector<mpz_class> d;
  long rank = 0;
};

const CoinvCache& coinvariant_relations(int n, const FinAbGroup& A, int degree,
                                        const AbelianGroupStructure& hStruct,
                                        long g) {
  static std::map<std::pair<std::vector<long>, int>, CoinvCache> cache;
  static std::mutex mu;
  std::pair<std::vector<long>, int> key{A.orders, degree};
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  std::vector<std::vector<mpz_class>> relCols;
  for (int t = 0; t + 1 < n; ++t) {
    GroupHom sigma;
    sigma.src = A;
    sigma.dst = A;
    sigma.matrix.assign(n, std::vector<long>(n, 0));
    for (int i = 0; i < n; ++i) sigma.matrix[i][i] = 1;
    sigma.matrix[t][t] = 0;
    sigma.matrix[t + 1][t + 1] = 0;
    sigma.matrix[t][t + 1] = 1;
    sigma.matrix[t + 1][t] = 1;
    for (long i = 0; i < g; ++i) {
      HClass gen;
      gen.group = A;
      gen.degree = degree;
      gen.structure = hStruct;
      gen.coords.assign(g, 0);
      gen.coords[i] = 1;
      HClass img = induced(sigma, gen);
      std::vector<mpz_class> col(g);
      for (long s = 0; s < g; ++s) {
        col[s] = img.coords[s] - gen.coords[s];
      }
      relCols.push_back(std::move(col));
    }
  }
  for (long i = 0; i < g; ++i) {
    if (i < static_cast<long>(hStruct.torsion.size())) {
      std::vector<mpz_class> col(g, 0);
      col[i] = hStruct.torsion[i];
      relCols.push_back(std::move(col));
    }
  }
  SparseIntMatrix rel(g, static_cast<long>(relCols.size()));
  for (size_t j = 0; j < relCols.size(); ++j) {
    for (long i = 0; i < g; ++i) {
      if (relCols[j][i] != 0) rel.set(i, static_cast<long>(j), relCols[j][i]);
    }
  }
  SnfResult s = snf(rel);
  CoinvCache entry;
  entry.g = g;
  entry.U = s.U;
  entry.d = s.d;
  entry.rank = s.rank();
  std::lock_guard<std::mutex> lock(mu);
  return cache.emplace(key, std::move(entry)).first->second;
}

}  // namespace

CoinvariantsResult sym_coinvariants(int n, const HClass& x) {
  const FinAbGroup& A = x.group;
  if (A.factor_count() != n || n < 1) {
    throw std::runtime_error(
        "sym_coinvariants: group must have exactly n factors");
  }
  for (long m : A.orders) {
    if (m != A.orders[0]) {
      throw std::runtime_error(
          "sym_coinvariants: permutation action needs equal factor orders");
    }
  }
  long g = static_cast<long>(x.coords.size());
  const CoinvCache& rel =
      coinvariant_relations(n, A, x.degree, x.structure, g);
  if (rel.g != g) {
    throw std::logic_error("sym_coinvariants: coordinate count mismatch");
  }
  CoinvariantsResult out;
  std::vector<mpz_class> z(g, 0);
  for (long i = 0; i < g; ++i) {
    for (long j = 0; j < g; ++j) {
      z[i] += rel.U.at(i, j) * x.coords[j];
    }
  }
  for (long i = 0; i < rel.rank; ++i) {
    if (rel.d[i] > 1) {
      out.structure.torsion.push_back(rel.d[i]);
      mpz_class c = z[i] % rel.d[i];
      if (c < 0) c += rel.d[i];
      out.coords.push_back(c);
    }
  }
  out.structure.rank = g - rel.rank;
  for (long i = rel.rank; i < g; ++i) out.coords.push_back(z[i]);
  return out;
}

}  // namespace homforge
