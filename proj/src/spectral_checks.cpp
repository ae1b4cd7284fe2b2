#include "homforge/spectral_checks.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "homforge/milnor_k.hpp"

namespace homforge {

namespace {

// ---------------------------------------------------------------------------
// Discrete logarithms
// ---------------------------------------------------------------------------

struct DlogTable {
  int root = 0;                // least primitive root mod q
  std::vector<long> dlog;      // dlog[x] for x in [1, q); dlog[root^e] = e
};

const DlogTable& dlog_table(int q) {
  static std::map<int, DlogTable> cache;
  auto it = cache.find(q);
  if (it != cache.end()) return it->second;
  DlogTable t;
  for (int g = 2; g < q && t.root == 0; ++g) {
    std::vector<char> seen(static_cast<size_t>(q), 0);
    int x = 1;
    bool injective = true;
    for (int e = 0; e < q - 1; ++e) {
      if (seen[static_cast<size_t>(x)]) {
        injective = false;
        break;
      }
      seen[static_cast<size_t>(x)] = 1;
      x = res_mul(x, g, q);
    }
    if (injective) t.root = g;
  }
  if (t.root == 0) throw std::logic_error("dlog_table: no primitive root found");
  t.dlog.assign(static_cast<size_t>(q), 0);
  int x = 1;
  for (int e = 0; e < q - 1; ++e) {
    t.dlog[static_cast<size_t>(x)] = e;
    x = res_mul(x, t.root, q);
  }
  return cache.emplace(q, std::move(t)).first->second;
}

// ---------------------------------------------------------------------------
// Small matrix utilities over Z/m
// ---------------------------------------------------------------------------

long norm_mod(long v, long m) { return ((v % m) + m) % m; }

DenseIntMatrix from_rows(const std::vector<std::vector<long>>& rows, long m) {
  const long r = static_cast<long>(rows.size());
  const long c = r > 0 ? static_cast<long>(rows[0].size()) : 0;
  DenseIntMatrix out(r, c);
  for (long i = 0; i < r; ++i) {
    if (static_cast<long>(rows[static_cast<size_t>(i)].size()) != c)
      throw std::invalid_argument("from_rows: ragged rows");
    for (long j = 0; j < c; ++j)
      out.at(i, j) = norm_mod(rows[static_cast<size_t>(i)][static_cast<size_t>(j)], m);
  }
  return out;
}

bool mat_is_zero(const DenseIntMatrix& M) {
  for (const auto& v : M.a)
    if (v != 0) return false;
  return true;
}

DenseIntMatrix mat_negate(const DenseIntMatrix& M, long m) {
  DenseIntMatrix out(M.rows, M.cols);
  for (long i = 0; i < M.rows; ++i)
    for (long j = 0; j < M.cols; ++j) {
      long v = M.at(i, j).get_si();
      out.at(i, j) = norm_mod(-v, m);
    }
  return out;
}

// Printable form with symmetric residues (entries in (-m/2, m/2]) so that
// -1 prints as -1 rather than m-1.
std::string mat_text(const DenseIntMatrix& M, long m) {
  std::ostringstream os;
  os << "[";
  for (long i = 0; i < M.rows; ++i) {
    os << (i ? ",[" : "[");
    for (long j = 0; j < M.cols; ++j) {
      long v = norm_mod(M.at(i, j).get_si(), m);
      if (2 * v > m) v -= m;
      os << (j ? "," : "") << v;
    }
    os << "]";
  }
  os << "]";
  return os.str();
}

std::string row_text(const std::vector<OrbitLabel>& targets,
                     const std::vector<DenseIntMatrix>& blocks, long m) {
  std::ostringstream os;
  for (size_t i = 0; i < targets.size(); ++i) {
    if (i) os << "; ";
    os << label_text(targets[i]) << ": ";
    if (mat_is_zero(blocks[i]))
      os << "0";
    else
      os << mat_text(blocks[i], m);
  }
  return os.str();
}

std::string label_name(const OrbitLabel& lbl) {
  if (!lbl.family.empty()) return label_text(lbl);
  return "[" + serialize_tuple(lbl.canonical) + "]";
}

// ---------------------------------------------------------------------------
// Stabilizer of the empty tuple: all of GL_n
// ---------------------------------------------------------------------------

StabilizerDescription ambient_stabilizer(int n) {
  StabilizerDescription s;
  LeviFactor f;
  f.kind = LeviFactor::Kind::GL;
  f.size = n;
  s.leviFactors = {f};
  s.dimS = static_cast<long>(n) * n;
  s.unipotentDim = 0;
  return s;
}

int rank_of_columns(const std::vector<std::vector<int>>& cols, int n, int q) {
  if (cols.empty()) return 0;
  FqMatrix M(n, static_cast<int>(cols.size()), q);
  for (int j = 0; j < static_cast<int>(cols.size()); ++j)
    for (int i = 0; i < n; ++i) M.at(i, j) = cols[static_cast<size_t>(j)][static_cast<size_t>(i)];
  return fm_rank(M);
}

}  // namespace

// ---------------------------------------------------------------------------
// Verification records
// ---------------------------------------------------------------------------

bool VerifyReport::all_ok() const {
  for (const auto& r : records)
    if (r.status != "ok") return false;
  return true;
}

std::string VerifyReport::summary() const {
  long ok = 0, fail = 0, dev = 0, other = 0;
  for (const auto& r : records) {
    if (r.status == "ok")
      ++ok;
    else if (r.status == "fail")
      ++fail;
    else if (r.status == "deviation")
      ++dev;
    else
      ++other;
  }
  std::ostringstream os;
  os << records.size() << " checks: " << ok << " ok";
  if (fail) os << ", " << fail << " fail";
  if (dev) os << ", " << dev << " deviation";
  if (other) os << ", " << other << " other";
  return os.str();
}

void VerifyReport::add(std::string check, std::string params, std::string status,
                       std::string detail, std::string lhs, std::string rhs) {
  CheckRecord r;
  r.check = std::move(check);
  r.params = std::move(params);
  r.status = std::move(status);
  r.detail = std::move(detail);
  r.lhs = std::move(lhs);
  r.rhs = std::move(rhs);
  records.push_back(std::move(r));
}

void VerifyReport::append(const VerifyReport& other) {
  records.insert(records.end(), other.records.begin(), other.records.end());
}

// ---------------------------------------------------------------------------
// Page descriptors
// ---------------------------------------------------------------------------

PageCell page_cell(ComplexKind kind, int n, int q, int p, int qRow) {
  if (p < 0) throw std::invalid_argument("page_cell: p must be nonnegative");
  if (qRow < 0) throw std::invalid_argument("page_cell: qRow must be nonnegative");
  PageCell cell;
  cell.kind = kind;
  cell.n = n;
  cell.q = q;
  cell.p = p;
  cell.qRow = qRow;
  CoinvariantComplex cx = build_complex(kind, n, q, p);
  for (long j = 0; j < cx.basis_size(p); ++j) {
    OrbitLabel lbl = label_at(cx, p, j);
    StabilizerDescription st = lbl.canonical.length() == 0
                                   ? ambient_stabilizer(n)
                                   : stabilizer(lbl.canonical);
    cell.summands.emplace_back(std::move(lbl), std::move(st));
  }
  return cell;
}

// ---------------------------------------------------------------------------
// H_1 charts
// ---------------------------------------------------------------------------

H1Chart h1_chart(const LineTuple& t) {
  const int n = t.n;
  const int q = t.q;
  if (q < 5)
    throw std::invalid_argument(
        "h1_chart: needs q >= 5 (unipotent and special linear parts must die)");
  H1Chart ch;
  ch.tuple = t;
  ch.modulus = q - 1;
  const int zeta = dlog_table(q).root;

  if (t.length() == 0) {
    ch.stab = ambient_stabilizer(n);
    ch.coordCount = 1;
    ch.hasDetCoord = true;
    ch.basis = FqMatrix::identity(n, q);
    ch.basisInv = ch.basis;
    FqMatrix g = FqMatrix::identity(n, q);
    g.at(0, 0) = zeta;
    ch.generators = {g};
    return ch;
  }

  ch.stab = stabilizer(t);
  ch.classes = ch.stab.tieClasses;
  for (auto& c : ch.classes) std::sort(c.begin(), c.end());
  std::sort(ch.classes.begin(), ch.classes.end(),
            [](const std::vector<int>& a, const std::vector<int>& b) {
              return a.front() < b.front();
            });

  // Greedy basis: per tie class, the lines that extend the running span.
  std::vector<std::vector<int>> cols;
  std::vector<int> classStart;
  for (const auto& cls : ch.classes) {
    classStart.push_back(static_cast<int>(cols.size()));
    std::vector<std::vector<int>> alone;
    for (int li : cls) {
      const std::vector<int>& v = t.lines[static_cast<size_t>(li)].coords;
      alone.push_back(v);
      cols.push_back(v);
      if (rank_of_columns(cols, n, q) != static_cast<int>(cols.size())) cols.pop_back();
    }
    const int dim = static_cast<int>(cols.size()) - classStart.back();
    if (rank_of_columns(alone, n, q) != dim)
      throw std::logic_error("h1_chart: tie-class spans are not independent");
    ch.classDims.push_back(dim);
  }
  const int spanDim = static_cast<int>(cols.size());
  ch.hasDetCoord = spanDim < n;
  if (ch.hasDetCoord) {
    for (int i = 0; i < n && static_cast<int>(cols.size()) < n; ++i) {
      std::vector<int> e(static_cast<size_t>(n), 0);
      e[static_cast<size_t>(i)] = 1;
      cols.push_back(e);
      if (rank_of_columns(cols, n, q) != static_cast<int>(cols.size())) cols.pop_back();
    }
    if (static_cast<int>(cols.size()) != n)
      throw std::logic_error("h1_chart: failed to complete a basis");
  }
  ch.coordCount = static_cast<int>(ch.classes.size()) + (ch.hasDetCoord ? 1 : 0);

  // Cross-check the chart against the stabilizer's Levi factors.
  {
    std::vector<LeviFactor> expect;
    for (int d : ch.classDims) {
      LeviFactor f;
      f.kind = LeviFactor::Kind::Scalar;
      f.size = d;
      expect.push_back(f);
    }
    if (ch.hasDetCoord) {
      LeviFactor f;
      f.kind = LeviFactor::Kind::GL;
      f.size = n - spanDim;
      expect.push_back(f);
    }
    if (!(expect == ch.stab.leviFactors))
      throw std::logic_error("h1_chart: Levi factors do not match the tie-class spans");
  }

  ch.basis = FqMatrix(n, n, q);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) ch.basis.at(i, j) = cols[static_cast<size_t>(j)][static_cast<size_t>(i)];
  ch.basisInv = fm_inverse(ch.basis);

  auto diag_generator = [&](int lo, int hi) {
    FqMatrix d = FqMatrix::identity(n, q);
    for (int i = lo; i < hi; ++i) d.at(i, i) = zeta;
    return fm_mul(fm_mul(ch.basis, d), ch.basisInv);
  };
  for (size_t k = 0; k < ch.classes.size(); ++k)
    ch.generators.push_back(
        diag_generator(classStart[k], classStart[k] + ch.classDims[k]));
  if (ch.hasDetCoord) ch.generators.push_back(diag_generator(spanDim, spanDim + 1));
  return ch;
}

std::vector<long> h1_read(const H1Chart& ch, const FqMatrix& Z) {
  const int n = ch.tuple.n;
  const int q = ch.tuple.q;
  const long m = ch.modulus;
  if (Z.rows != n || Z.cols != n)
    throw std::invalid_argument("h1_read: matrix has the wrong shape");
  const auto& dl = dlog_table(q);
  std::vector<long> out(static_cast<size_t>(ch.coordCount), 0);
  long scaledSum = 0;
  for (size_t k = 0; k < ch.classes.size(); ++k) {
    int lambda = -1;
    for (int li : ch.classes[k]) {
      const std::vector<int>& v = ch.tuple.lines[static_cast<size_t>(li)].coords;
      std::vector<int> w = fm_apply(Z, v);
      int mu = 0;
      for (int i = 0; i < n; ++i)
        if (v[static_cast<size_t>(i)] != 0) {
          mu = res_mul(w[static_cast<size_t>(i)], res_inv(v[static_cast<size_t>(i)], q), q);
          break;
        }
      if (mu == 0)
        throw std::invalid_argument("h1_read: element kills line " + std::to_string(li));
      for (int i = 0; i < n; ++i)
        if (w[static_cast<size_t>(i)] != res_mul(mu, v[static_cast<size_t>(i)], q))
          throw std::invalid_argument("h1_read: element does not stabilize line " +
                                      std::to_string(li));
      if (lambda < 0)
        lambda = mu;
      else if (lambda != mu)
        throw std::invalid_argument("h1_read: non-scalar action on a tie class");
    }
    out[k] = dl.dlog[static_cast<size_t>(lambda)];
    scaledSum += static_cast<long>(ch.classDims[k]) * out[k];
  }
  if (ch.hasDetCoord) {
    const int det = fm_det(Z);
    if (det == 0) throw std::invalid_argument("h1_read: singular matrix");
    out[static_cast<size_t>(ch.coordCount - 1)] =
        norm_mod(dl.dlog[static_cast<size_t>(det)] - scaledSum, m);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Degree-one differential components
// ---------------------------------------------------------------------------

namespace {

// Raw block accumulators of one differential row: target index -> row-major
// tc x sc integer matrix (signed, not yet reduced).  Faces of `src.tuple`
// are canonicalized and looked up in `tindex`; Q drops faces that are in
// general position for the everything-independent kind.
std::map<long, std::vector<long>> sparse_row_blocks(
    const H1Chart& src, ComplexKind kind, const std::map<std::string, long>& tindex,
    const std::vector<H1Chart>& tcharts) {
  std::map<long, std::vector<long>> out;
  const long sc = src.coordCount;
  for (int face = 0; face < src.tuple.length(); ++face) {
    LineTuple f = apply_face(src.tuple, face);
    if (kind == ComplexKind::Q && is_general_position(f, TupleKind::C)) continue;
    CanonicalResult cr = canonical_form(f);
    auto it = tindex.find(serialize_tuple(cr.canonical));
    if (it == tindex.end())
      throw std::invalid_argument("differential row: face " + std::to_string(face) +
                                  " of [" + serialize_tuple(src.tuple) +
                                  "] lands outside the listed targets, in [" +
                                  serialize_tuple(cr.canonical) + "]");
    const H1Chart& tc = tcharts[static_cast<size_t>(it->second)];
    auto& acc = out[it->second];
    if (acc.empty()) acc.assign(static_cast<size_t>(tc.coordCount) * sc, 0);
    const long sign = (face % 2 == 0) ? 1 : -1;
    FqMatrix gi = fm_inverse(cr.g);
    for (long k = 0; k < sc; ++k) {
      FqMatrix Z = fm_mul(fm_mul(cr.g, src.generators[static_cast<size_t>(k)]), gi);
      std::vector<long> col = h1_read(tc, Z);
      for (long r = 0; r < tc.coordCount; ++r)
        acc[static_cast<size_t>(r * sc + k)] += sign * col[static_cast<size_t>(r)];
    }
  }
  return out;
}

}  // namespace

DenseIntMatrix d1_component(const OrbitLabel& source, int face,
                            const OrbitLabel& target, int degree) {
  if (degree != 1)
    throw std::invalid_argument(
        "d1_component: only the H_1 level (degree 1) is mechanized");
  const LineTuple& s = source.canonical;
  if (face < 0 || face >= s.length())
    throw std::out_of_range("d1_component: face index out of range");
  H1Chart sc = h1_chart(s);
  H1Chart tc = h1_chart(target.canonical);
  LineTuple f = apply_face(s, face);
  CanonicalResult cr = canonical_form(f);
  if (!(cr.canonical == target.canonical))
    throw std::invalid_argument("d1_component: face/orbit mismatch: face " +
                                std::to_string(face) + " of [" + serialize_tuple(s) +
                                "] lands in [" + serialize_tuple(cr.canonical) +
                                "], not in [" + serialize_tuple(target.canonical) + "]");
  const long m = sc.modulus;
  const long sign = (face % 2 == 0) ? 1 : -1;
  DenseIntMatrix out(tc.coordCount, sc.coordCount);
  FqMatrix gi = fm_inverse(cr.g);
  for (long k = 0; k < sc.coordCount; ++k) {
    FqMatrix Z = fm_mul(fm_mul(cr.g, sc.generators[static_cast<size_t>(k)]), gi);
    std::vector<long> col = h1_read(tc, Z);
    for (long r = 0; r < tc.coordCount; ++r)
      out.at(r, k) = norm_mod(sign * col[static_cast<size_t>(r)], m);
  }
  return out;
}

H1Row h1_row(ComplexKind kind, const OrbitLabel& source,
             const std::vector<OrbitLabel>& targets, int globalSign) {
  if (globalSign != 1 && globalSign != -1)
    throw std::invalid_argument("h1_row: globalSign must be +1 or -1");
  H1Row row;
  row.source = source;
  row.globalSign = globalSign;
  row.targets = targets;
  H1Chart sc = h1_chart(source.canonical);
  row.modulus = sc.modulus;
  std::map<std::string, long> tindex;
  std::vector<H1Chart> tcharts;
  for (size_t i = 0; i < targets.size(); ++i) {
    tindex[serialize_tuple(targets[i].canonical)] = static_cast<long>(i);
    tcharts.push_back(h1_chart(targets[i].canonical));
  }
  auto raw = sparse_row_blocks(sc, kind, tindex, tcharts);
  const long m = row.modulus;
  for (size_t i = 0; i < targets.size(); ++i) {
    DenseIntMatrix blk(tcharts[i].coordCount, sc.coordCount);
    auto it = raw.find(static_cast<long>(i));
    if (it != raw.end())
      for (long r = 0; r < blk.rows; ++r)
        for (long k = 0; k < blk.cols; ++k)
          blk.at(r, k) = norm_mod(
              globalSign * it->second[static_cast<size_t>(r * blk.cols + k)], m);
    row.components.push_back(std::move(blk));
  }
  return row;
}

// ---------------------------------------------------------------------------
// Coinvariant chains
// ---------------------------------------------------------------------------

void chain_add(CoinvChain& c, const LineTuple& t, long long coeff) {
  if (coeff == 0) return;
  CanonicalResult cr = canonical_form(t);
  std::string key = serialize_tuple(cr.canonical);
  auto it = c.find(key);
  if (it == c.end()) {
    c.emplace(std::move(key), coeff);
    return;
  }
  it->second += coeff;
  if (it->second == 0) c.erase(it);
}

CoinvChain boundary_chain(const LineTuple& t) {
  CoinvChain out;
  for (int i = 0; i < t.length(); ++i)
    chain_add(out, apply_face(t, i), (i % 2 == 0) ? 1 : -1);
  return out;
}

std::string chain_text(const CoinvChain& c) {
  if (c.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [key, coeff] : c) {
    if (coeff >= 0) {
      if (!first) os << " + ";
    } else {
      os << (first ? "-" : " - ");
    }
    const long long mag = std::llabs(coeff);
    if (mag != 1) os << mag << "*";
    os << "[" << key << "]";
    first = false;
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Bottom-row suite
// ---------------------------------------------------------------------------

namespace {

std::string witness_text(const CoinvariantComplex& cx, int p, const HomologyResult& h) {
  std::ostringstream os;
  os << "witnesses:";
  const size_t shown = std::min<size_t>(h.generators.size(), 2);
  for (size_t gi = 0; gi < shown; ++gi) {
    os << (gi ? " | " : " ");
    if (gi < h.orders.size())
      os << "order " << (h.orders[gi] == 0 ? std::string("infinite") : h.orders[gi].get_str())
         << ": ";
    int terms = 0;
    for (const auto& [idx, coeff] : h.generators[gi]) {
      if (terms >= 4) {
        os << " + ...";
        break;
      }
      if (terms) os << " + ";
      os << coeff.get_str() << "*[" << serialize_tuple(tuple_at(cx, p, idx)) << "]";
      ++terms;
    }
  }
  if (shown < h.generators.size()) os << " | (" << h.generators.size() - shown << " more)";
  return os.str();
}

}  // namespace

VerifyReport q0_row(int n, int q) {
  VerifyReport rep;
  if (n < 2 || n > 4) throw std::invalid_argument("q0_row: n must be 2, 3, or 4");
  if (q < 3 || !is_prime(q)) throw std::invalid_argument("q0_row: q must be a prime >= 3");
  const int maxDeg = (n == 2) ? 5 : n + 2;
  const int pMax = (n == 2) ? 4 : n + 1;
  CoinvariantComplex cx = build_complex(ComplexKind::C, n, q, maxDeg);
  ChainComplexZ cc = to_chain_complex(cx);
  for (int p = 0; p <= pMax; ++p) {
    HomologyResult h = homology(cc, p);
    std::ostringstream par;
    par << "n=" << n << "; q=" << q << "; p=" << p;
    const bool trivial = h.structure.trivial();
    if (p <= n - 1) {
      rep.add("q0row.vanishing", par.str(), trivial ? "ok" : "deviation",
              trivial ? "trivial as the pattern predicts"
                      : "nonzero homology where the pattern predicts vanishing: " +
                            h.structure.to_string() + "; " + witness_text(cx, p, h),
              h.structure.to_string(), "0");
    } else if (n == 2 && p == 4) {
      if (q >= 5) {
        PreBlochPresentation pb = pre_bloch(q);
        const bool ok = h.structure == pb.structure;
        rep.add("q0row.crossratio", par.str(), ok ? "ok" : "deviation",
                ok ? "cross-ratio column matches the symbol-presented group"
                   : "cross-ratio column differs from the symbol-presented group" +
                         (trivial ? std::string() : "; " + witness_text(cx, p, h)),
                h.structure.to_string(), pb.structure.to_string());
      } else {
        rep.add("q0row.crossratio", par.str(), "ok",
                "structure recorded (no symbol presentation available below q=5)",
                h.structure.to_string(), "");
      }
    } else {
      rep.add("q0row.tail", par.str(), trivial ? "ok" : "deviation",
              trivial ? "trivial"
                      : "nonzero homology recorded: " + h.structure.to_string() + "; " +
                            witness_text(cx, p, h),
              h.structure.to_string(), "0");
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Five-line row formulas and the degree-one component table
// ---------------------------------------------------------------------------

namespace {

struct RowCase {
  std::string name;
  OrbitLabel src;
  std::vector<DenseIntMatrix> expected;
  std::set<size_t> unpinned;  // slots compared for reporting only
};

// Shared comparison driver: computes each source's differential row under
// global sign +1, compares pinned slots against the corrected reference
// forms under both sign conventions, and appends one record per row plus a
// final sign-adjudication record.
void run_row_cases(VerifyReport& rep, ComplexKind kind, int q,
                   const std::vector<OrbitLabel>& targets,
                   const std::vector<RowCase>& cases, const std::string& signCheck) {
  const long m = q - 1;
  long discr = 0, plusHit = 0, minusHit = 0;
  for (const RowCase& rc : cases) {
    H1Row row = h1_row(kind, rc.src, targets, 1);
    bool okP = true, okM = true, hasNonzero = false;
    for (size_t i = 0; i < targets.size(); ++i) {
      if (rc.unpinned.count(i)) continue;
      if (!(row.components[i] == rc.expected[i])) okP = false;
      if (!(mat_negate(row.components[i], m) == rc.expected[i])) okM = false;
      if (!mat_is_zero(rc.expected[i])) hasNonzero = true;
    }
    if (hasNonzero) {
      ++discr;
      if (okP) ++plusHit;
      if (okM) ++minusHit;
    }
    std::ostringstream par;
    par << "q=" << q << "; source=" << label_name(rc.src);
    std::string detail = okP ? "matches the reference row under global sign +1"
                             : "differs from the reference row under global sign +1";
    if (!rc.unpinned.empty()) detail += " (unpinned slots reported, not compared)";
    rep.add(rc.name, par.str(), okP ? "ok" : "fail", detail,
            row_text(targets, row.components, m), row_text(targets, rc.expected, m));
  }
  const bool plusAll = plusHit == discr;
  const bool minusAll = minusHit == discr;
  const bool unique = plusAll != minusAll;
  std::ostringstream par, det;
  par << "q=" << q;
  det << "sign +1 matches " << plusHit << "/" << discr
      << " discriminating rows; sign -1 matches " << minusHit << "/" << discr
      << "; exactly one convention fits: " << (unique ? "yes" : "no");
  rep.add(signCheck, par.str(), unique ? "ok" : "fail", det.str(),
          plusAll ? "+1" : (minusAll ? "-1" : "none"), "+1");
}

}  // namespace

VerifyReport verify_e51_formulas(int q) {
  VerifyReport rep;
  if (q < 5 || !is_prime(q))
    throw std::invalid_argument("verify_e51_formulas: needs a prime q >= 5");
  const long m = q - 1;

  auto fams4 = family_representatives(q, 4);
  auto fams5 = family_representatives(q, 5);
  auto take4 = [&](const std::string& name) {
    std::vector<FamilyInstance> out;
    for (const auto& f : fams4)
      if (f.family == name) out.push_back(f);
    return out;
  };
  auto take5 = [&](const std::string& name, const std::vector<int>& idx) {
    std::vector<FamilyInstance> out;
    for (const auto& f : fams5)
      if (f.family == name && f.indices == idx) out.push_back(f);
    if (out.empty())
      throw std::logic_error("verify_e51_formulas: no representatives for " + name);
    return out;
  };

  // Targets: the four-line cells surviving in the quotient page, in display
  // order; parametrized instances in their registry (ascending) order.
  std::vector<OrbitLabel> targets;
  for (const char* nm : {"u_2", "u_3", "u_4", "u_5", "u_6", "u_7"})
    for (const auto& f : take4(nm)) targets.push_back(orbit_label(f.rep));
  std::vector<H1Chart> tcharts;
  std::map<std::string, size_t> slotByKey;
  for (size_t i = 0; i < targets.size(); ++i) {
    tcharts.push_back(h1_chart(targets[i].canonical));
    slotByKey[serialize_tuple(targets[i].canonical)] = i;
  }
  {
    std::ostringstream det;
    for (size_t i = 0; i < targets.size(); ++i)
      det << (i ? ", " : "") << label_text(targets[i]);
    rep.add("e51.slot_order", "q=" + std::to_string(q), "ok", det.str());
  }
  {
    // The target list must be exactly the quotient page's degree-4 basis.
    CoinvariantComplex cq = build_complex(ComplexKind::Q, 4, q, 4);
    bool ok = cq.basis_size(4) == static_cast<long>(targets.size());
    for (long j = 0; ok && j < cq.basis_size(4); ++j)
      ok = slotByKey.count(serialize_tuple(tuple_at(cq, 4, j))) > 0;
    std::ostringstream det;
    det << "quotient degree-4 basis size " << cq.basis_size(4) << ", display cells "
        << targets.size();
    rep.add("e51.cell_summands", "q=" + std::to_string(q), ok ? "ok" : "fail", det.str());
  }

  auto slot_named = [&](const std::string& fam) -> size_t {
    for (size_t i = 0; i < targets.size(); ++i)
      if (targets[i].family == fam) return i;
    throw std::logic_error("verify_e51_formulas: no target cell named " + fam);
  };
  auto slot_of_face = [&](const LineTuple& s, int face) -> size_t {
    CanonicalResult cr = canonical_form(apply_face(s, face));
    auto it = slotByKey.find(serialize_tuple(cr.canonical));
    if (it == slotByKey.end())
      throw std::logic_error(
          "verify_e51_formulas: face lands outside the four-line quotient cells");
    return it->second;
  };
  auto zero_row = [&](long srcC) {
    std::vector<DenseIntMatrix> v;
    for (const auto& tc : tcharts) v.emplace_back(tc.coordCount, srcC);
    return v;
  };

  std::vector<RowCase> cases;

  // Four plane lines plus one off-plane line, parametrized.
  for (const auto& f : take5("v_18", {})) {
    auto ex = zero_row(3);
    ex[slot_named("u_3")] = from_rows({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, m);
    ex[slot_named("u_6")] = from_rows({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, m);
    ex[slot_of_face(f.rep, 3)] = from_rows({{-1, 0, 0}, {0, -1, -1}}, m);
    cases.push_back({"e51.eq11", orbit_label(f.rep), std::move(ex), {}});
  }
  // Spanning frame with one cross line through slots 1 and 3.
  for (const auto& f : take5("v_3", {1, 3})) {
    auto ex = zero_row(3);
    ex[slot_named("u_3")] = from_rows({{-1, 0, 0}, {0, 0, -1}, {0, -1, 0}}, m);
    ex[slot_named("u_5")] = from_rows({{-1, 0, 0}, {0, -1, 0}, {0, 0, -1}}, m);
    cases.push_back(
        {"e51.eq22", orbit_label(f.rep), std::move(ex), {slot_named("u_3")}});
  }
  // Three concurrent plane lines with a second parametrized plane line.
  for (const auto& f : take5("v_9", {1, 2})) {
    auto ex = zero_row(3);
    ex[slot_of_face(f.rep, 2)] = from_rows({{1, 0, 0}, {0, 1, 1}}, m);
    cases.push_back({"e51.eq33", orbit_label(f.rep), std::move(ex), {}});
  }
  // Spanning frame with one cross line through slots 2 and 3.
  for (const auto& f : take5("v_3", {2, 3})) {
    auto ex = zero_row(3);
    ex[slot_named("u_3")] = from_rows({{0, 1, 0}, {0, 0, 1}, {1, 0, 0}}, m);
    ex[slot_named("u_4")] = from_rows({{-1, 0, 0}, {0, -1, 0}, {0, 0, -1}}, m);
    cases.push_back(
        {"e51.eq44", orbit_label(f.rep), std::move(ex), {slot_named("u_4")}});
  }
  // Frame plus the all-ones hyperplane line.
  for (const auto& f : take5("v_4", {})) {
    auto ex = zero_row(2);
    ex[slot_named("u_2")] = from_rows({{1, 0}, {0, 1}}, m);
    cases.push_back({"e51.eq55", orbit_label(f.rep), std::move(ex), {}});
  }
  // Spanning frame with one cross line through slots 3 and 4.
  for (const auto& f : take5("v_3", {3, 4})) {
    auto ex = zero_row(3);
    ex[slot_named("u_4")] = from_rows({{-1, 1, 0}, {0, 0, 0}, {1, -1, 0}}, m);
    cases.push_back({"e51.eq66", orbit_label(f.rep), std::move(ex), {}});
  }

  run_row_cases(rep, ComplexKind::Q, q, targets, cases, "e51.sign_convention");
  return rep;
}

namespace {

// Independent model for the torus rows of the component table: dropping the
// i-th of p scalar coordinates alternates in sign and pushes the dropped
// eigenvalue into the block determinant (together with the source block
// determinant when one exists, i.e. when p < n).
DenseIntMatrix torus_pushdown_formula(int p, int n, long m) {
  const long srcC = p + (p < n ? 1 : 0);
  const long tgtC = p;  // p-1 scalar coordinates and one determinant coordinate
  std::vector<std::vector<long>> rows(static_cast<size_t>(tgtC),
                                      std::vector<long>(static_cast<size_t>(srcC), 0));
  for (int i = 1; i <= p; ++i) {
    const long sign = (i % 2 == 1) ? 1 : -1;
    long r = 0;
    for (int j = 1; j <= p; ++j) {
      if (j == i) continue;
      rows[static_cast<size_t>(r)][static_cast<size_t>(j - 1)] += sign;
      ++r;
    }
    rows[static_cast<size_t>(tgtC - 1)][static_cast<size_t>(i - 1)] += sign;
    if (p < n) rows[static_cast<size_t>(tgtC - 1)][static_cast<size_t>(srcC - 1)] += sign;
  }
  return from_rows(rows, m);
}

}  // namespace

VerifyReport verify_d1_table(int q) {
  VerifyReport rep;
  if (q < 5 || !is_prime(q))
    throw std::invalid_argument("verify_d1_table: needs a prime q >= 5");
  const long m = q - 1;

  const OrbitLabel w1 =
      orbit_label(make_tuple(4, q, {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}}));
  const OrbitLabel w2 =
      orbit_label(make_tuple(4, q, {{1, 0, 0, 0}, {0, 1, 0, 0}, {1, 1, 0, 0}}));
  const OrbitLabel pairCell = orbit_label(make_tuple(4, q, {{1, 0, 0, 0}, {0, 1, 0, 0}}));
  const OrbitLabel singleCell = orbit_label(make_tuple(4, q, {{1, 0, 0, 0}}));
  const OrbitLabel emptyCell = orbit_label(make_tuple(4, q, {}));

  {
    // The distinct-line page's low columns must consist of exactly these cells.
    CoinvariantComplex cd = build_complex(ComplexKind::D, 4, q, 3);
    bool ok = cd.basis_size(0) == 1 && cd.basis_size(1) == 1 && cd.basis_size(2) == 1 &&
              cd.basis_size(3) == 2;
    std::set<std::string> deg3;
    for (long j = 0; ok && j < cd.basis_size(3); ++j)
      deg3.insert(serialize_tuple(tuple_at(cd, 3, j)));
    if (ok)
      ok = deg3.count(serialize_tuple(w1.canonical)) > 0 &&
           deg3.count(serialize_tuple(w2.canonical)) > 0;
    std::ostringstream det;
    det << "degree sizes " << cd.basis_size(0) << "," << cd.basis_size(1) << ","
        << cd.basis_size(2) << "," << cd.basis_size(3);
    rep.add("table.cell_summands", "q=" + std::to_string(q), ok ? "ok" : "fail",
            det.str());
  }

  std::vector<RowCase> cases;
  const std::vector<OrbitLabel> t3 = {w1, w2};
  auto zero_pair3 = [&](long srcC) {
    std::vector<DenseIntMatrix> v;
    v.emplace_back(4, srcC);  // three scalar coordinates and a determinant
    v.emplace_back(2, srcC);  // one plane coordinate and a block determinant
    return v;
  };

  for (const auto& f : family_representatives(q, 4)) {
    if (f.family == "u_1") {
      auto ex = zero_pair3(4);
      ex[0] = from_rows({{-1, 1, 0, 0}, {0, 0, 0, 0}, {0, 0, -1, 1}, {1, -1, 1, -1}}, m);
      cases.push_back({"table.row", orbit_label(f.rep), std::move(ex), {}});
    } else if (f.family == "u_2") {
      cases.push_back({"table.row", orbit_label(f.rep), zero_pair3(2), {}});
    } else if (f.family == "u_3") {
      auto ex = zero_pair3(3);
      ex[0] = from_rows({{-1, 0, 0}, {-1, 0, 0}, {0, -1, 0}, {0, 0, -1}}, m);
      ex[1] = from_rows({{1, 0, 0}, {0, 1, 1}}, m);
      cases.push_back({"table.row", orbit_label(f.rep), std::move(ex), {}});
    } else if (f.family == "u_4") {
      auto ex = zero_pair3(3);
      ex[0] = from_rows({{-1, 0, 0}, {0, -1, 0}, {0, -1, 0}, {0, 0, -1}}, m);
      ex[1] = from_rows({{0, 1, 0}, {1, 0, 1}}, m);
      cases.push_back({"table.row", orbit_label(f.rep), std::move(ex), {}});
    } else if (f.family == "u_5") {
      auto ex = zero_pair3(3);
      ex[0] = from_rows({{0, 1, 0}, {1, 0, 0}, {1, 0, 0}, {0, 0, 1}}, m);
      ex[1] = from_rows({{-1, 0, 0}, {0, -1, -1}}, m);
      cases.push_back({"table.row", orbit_label(f.rep), std::move(ex), {}});
    } else if (f.family == "u_6") {
      auto ex = zero_pair3(3);
      ex[0] = from_rows({{1, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, m);
      ex[1] = from_rows({{-1, 0, 0}, {0, -1, -1}}, m);
      cases.push_back({"table.row", orbit_label(f.rep), std::move(ex), {}});
    } else if (f.family == "u_7") {
      cases.push_back({"table.row", orbit_label(f.rep), zero_pair3(2), {}});
    }
  }

  run_row_cases(rep, ComplexKind::D, q, t3, cases, "table.sign_convention");

  // The lower rows, one target each.
  {
    std::vector<RowCase> lower;
    {
      auto ex = std::vector<DenseIntMatrix>{
          from_rows({{0, 1, 0, 0}, {0, 1, 0, 0}, {1, -1, 1, 1}}, m)};
      lower.push_back({"table.row", w1, std::move(ex), {}});
    }
    run_row_cases(rep, ComplexKind::D, q, {pairCell}, lower, "table.sign_w1");
  }
  {
    std::vector<RowCase> lower;
    {
      auto ex = std::vector<DenseIntMatrix>{from_rows({{1, 0}, {1, 0}, {0, 1}}, m)};
      lower.push_back({"table.row", w2, std::move(ex), {}});
    }
    run_row_cases(rep, ComplexKind::D, q, {pairCell}, lower, "table.sign_w2");
  }
  {
    std::vector<RowCase> lower;
    {
      auto ex = std::vector<DenseIntMatrix>{from_rows({{-1, 1, 0}, {1, -1, 0}}, m)};
      lower.push_back({"table.row", pairCell, std::move(ex), {}});
    }
    run_row_cases(rep, ComplexKind::D, q, {singleCell}, lower, "table.sign_pair");
  }
  {
    std::vector<RowCase> lower;
    {
      auto ex = std::vector<DenseIntMatrix>{from_rows({{1, 1}}, m)};
      lower.push_back({"table.row", singleCell, std::move(ex), {}});
    }
    run_row_cases(rep, ComplexKind::D, q, {emptyCell}, lower, "table.sign_single");
  }

  // Torus rows against the independent push-into-the-block formula.
  {
    struct TorusCheck {
      int p;
      OrbitLabel src;
      std::vector<OrbitLabel> tgts;
      size_t slot;
    };
    OrbitLabel u1;
    for (const auto& f : family_representatives(q, 4))
      if (f.family == "u_1") u1 = orbit_label(f.rep);
    std::vector<TorusCheck> checks = {{4, u1, t3, 0},
                                      {3, w1, {pairCell}, 0},
                                      {2, pairCell, {singleCell}, 0},
                                      {1, singleCell, {emptyCell}, 0}};
    for (const auto& tc : checks) {
      H1Row row = h1_row(ComplexKind::D, tc.src, tc.tgts, 1);
      DenseIntMatrix want = torus_pushdown_formula(tc.p, 4, m);
      const bool ok = row.components[tc.slot] == want;
      std::ostringstream par;
      par << "q=" << q << "; p=" << tc.p;
      rep.add("table.pushdown_formula", par.str(), ok ? "ok" : "fail",
              ok ? "torus row matches the independent formula"
                 : "torus row differs from the independent formula",
              mat_text(row.components[tc.slot], m), mat_text(want, m));
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Seven-line boundary identities
// ---------------------------------------------------------------------------

namespace {

// Shared tuple builders for the seven-line identity families (n = 4).
struct Step3Tuples {
  int q;
  std::vector<std::vector<int>> E4 = {
      {1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}};
  std::vector<int> s4 = {1, 1, 1, 1};

  explicit Step3Tuples(int q_) : q(q_) {}

  LineTuple tup(const std::vector<std::vector<int>>& extra) const {
    std::vector<std::vector<int>> cs = E4;
    for (const auto& e : extra) cs.push_back(e);
    return homforge::make_tuple(4, q, cs);
  }

  int inv(int a) const { return res_inv(a, q); }
  int dv(int a, int b) const { return res_mul(a, res_inv(b, q), q); }
  int sb(int a, int b) const { return res_sub(a, b, q); }

  LineTuple x(int a, int b, int c) const { return tup({s4, {1, a, b, c}}); }
  LineTuple X(int a, int b, int c) const { return tup({s4, {1, a, b, c}, {1, 1, 0, 0}}); }
  LineTuple v(int g, int h) const { return tup({s4, {0, 1, g, h}}); }
  LineTuple u_tuple(int l) const { return tup({s4, {1, l, 0, 0}}); }
  CoinvChain u_chain(int l) const {
    CoinvChain c;
    chain_add(c, u_tuple(l), 1);
    chain_add(c, u_tuple(1), -1);
    return c;
  }
  LineTuple U(int l) const { return tup({s4, {1, 1, 0, 0}, {1, l, 0, 0}}); }
  LineTuple V(int l) const { return tup({{1, 1, 0, 0}, {1, l, 0, 0}, {0, 0, 1, 1}}); }
  LineTuple T(int g, int h) const { return tup({s4, {0, 1, g, h}, {0, 1, 1, 0}}); }
  LineTuple s_tuple(int a) const { return tup({s4, {1, 0, a, 1}}); }
  CoinvChain z_chain(int a) const {
    CoinvChain c;
    chain_add(c, tup({s4, {0, 1, a, 0}}), 1);
    chain_add(c, tup({s4, {0, 1, 1, 0}}), -1);
    return c;
  }
  CoinvChain y_chain(int a) const {
    CoinvChain c;
    chain_add(c, tup({{1, 1, 1, 0}, {1, a, 0, 0}}), 1);
    chain_add(c, tup({{0, 1, 1, 1}, {0, 1, a, 0}}), 1);
    chain_add(c, tup({{1, 1, 1, 0}, {1, 1, 0, 0}}), -1);
    chain_add(c, tup({{0, 1, 1, 1}, {0, 1, 1, 0}}), -1);
    return c;
  }
  LineTuple Y(int a) const { return tup({{1, 1, 1, 0}, {1, a, 0, 0}, {1, 1, 0, 0}}); }
  LineTuple Yp(int a) const { return tup({{0, 1, 1, 1}, {0, 1, a, 0}, {0, 1, 1, 0}}); }
  LineTuple Z(int a) const { return tup({s4, {0, 1, 1, 0}, {0, 1, a, 0}}); }
  LineTuple S(int a) const { return tup({s4, {1, 0, a, 1}, {1, 0, 0, 1}}); }
  CoinvChain R_chain(int a, int b) const {
    CoinvChain c;
    chain_add(c, tup({{1, 1, 0, 1}, {1, a, 0, 1}}), 1);
    chain_add(c, tup({{1, 1, 0, 1}, {1, b, 0, 1}}), -1);
    chain_add(c, tup({{0, 1, 1, 1}, {0, 1, a, 1}}), -1);
    chain_add(c, tup({{0, 1, 1, 1}, {0, 1, b, 1}}), 1);
    return c;
  }
  CoinvChain Q_boundary(int a) const {
    CoinvChain c = boundary_chain(tup({{1, 1, 0, 1}, {1, a, 0, 1}, {1, 0, 0, 1}}));
    CoinvChain d = boundary_chain(tup({{0, 1, 1, 1}, {0, 1, a, 1}, {1, 0, 0, 1}}));
    for (const auto& [k, v] : d) {
      c[k] -= v;
      if (c[k] == 0) c.erase(k);
    }
    return c;
  }
  CoinvChain N_chain(int a, int b) const {
    CoinvChain c;
    chain_add(c, tup({{1, 0, 0, 1}, {1, 0, 0, a}}), 1);
    chain_add(c, tup({{1, 0, 0, 1}, {1, 0, 0, b}}), -1);
    return c;
  }
  LineTuple P_tuple(int a) const { return tup({{0, 0, 1, 1}, {0, 0, a, 1}}); }
  CoinvChain O_boundary(int a, int b) const {
    CoinvChain c = boundary_chain(tup({{1, 0, 0, 1}, {1, 0, 0, a}, {0, 1, 1, 0}}));
    CoinvChain d = boundary_chain(tup({{1, 0, 0, 1}, {1, 0, 0, b}, {0, 1, 1, 0}}));
    for (const auto& [k, v] : d) {
      c[k] -= v;
      if (c[k] == 0) c.erase(k);
    }
    return c;
  }
  LineTuple M(int a) const { return tup({{0, 0, 1, 1}, {0, 0, a, 1}, {1, 1, 0, 0}}); }
};

CoinvChain chain_sum(std::initializer_list<std::pair<const CoinvChain*, long long>> parts) {
  CoinvChain out;
  for (const auto& [c, w] : parts)
    for (const auto& [k, v] : *c) {
      out[k] += w * v;
      if (out[k] == 0) out.erase(k);
    }
  return out;
}

void add_tuple_class(CoinvChain& c, const LineTuple& t, long long w) { chain_add(c, t, w); }

void record_chain_check(VerifyReport& rep, const std::string& name,
                        const std::string& params, const CoinvChain& lhs,
                        const CoinvChain& rhs, const std::string& okDetail) {
  const bool ok = lhs == rhs;
  if (ok) {
    rep.add(name, params, "ok", okDetail);
  } else {
    rep.add(name, params, "fail", "exact chain equality fails", chain_text(lhs),
            chain_text(rhs));
  }
}

}  // namespace

VerifyReport step3_verify(int q) {
  VerifyReport rep;
  if (q < 7 || !is_prime(q))
    throw std::invalid_argument("step3_verify: needs a prime q >= 7");
  Step3Tuples tp(q);

  // Extended six-line cycle: boundary of the eight-line-minus-one extension
  // against the five-term correction.  The reference display carries a-b in
  // the second five-line slot where the computed faces force (a-b)/a; the two
  // readings coincide exactly on the a=1 slice.  The check verifies the
  // computed form and a trailing record adjudicates the two readings.
  auto x_identity_rhs = [&](int a, int b, int c, bool displayedSlot) {
    CoinvChain r;
    add_tuple_class(r, tp.v(tp.dv(tp.sb(1, b), tp.sb(1, c)), tp.sb(1, b)), 1);
    const int slot = displayedSlot ? tp.sb(a, b) : tp.dv(tp.sb(a, b), a);
    add_tuple_class(r, tp.v(tp.dv(tp.sb(a, b), tp.sb(a, c)), slot), -1);
    CoinvChain u1 = tp.u_chain(tp.dv(tp.sb(1, b), tp.sb(a, b)));
    CoinvChain u2 = tp.u_chain(tp.dv(tp.sb(1, c), tp.sb(a, c)));
    CoinvChain u3 = tp.u_chain(tp.inv(a));
    CoinvChain r2 = chain_sum({{&r, 1}, {&u1, 1}, {&u2, -1}, {&u3, 1}});
    add_tuple_class(r2, tp.x(a, b, c), 1);
    return r2;
  };
  {
    long xTotal = 0, xComputed = 0, xDisplayed = 0;
    for (int a = 2; a < q; ++a)
      for (int b = 2; b < q; ++b)
        for (int c = 2; c < q; ++c) {
          if (a == b || a == c || b == c) continue;
          ++xTotal;
          const CoinvChain lhs = boundary_chain(tp.X(a, b, c));
          if (lhs == x_identity_rhs(a, b, c, true)) ++xDisplayed;
          if (lhs == x_identity_rhs(a, b, c, false)) ++xComputed;
          std::ostringstream par;
          par << "q=" << q << "; a=" << a << "; b=" << b << "; c=" << c;
          record_chain_check(rep, "step3.X", par.str(), lhs,
                             x_identity_rhs(a, b, c, false), "exact chain equality");
        }
    std::ostringstream det;
    det << "second five-line slot over " << xTotal
        << " admissible triples: displayed parameter a-b holds for " << xDisplayed
        << ", computed parameter (a-b)/a holds for " << xComputed
        << "; the readings coincide exactly on the a=1 slice";
    rep.add("step3.X_display", "q=" + std::to_string(q),
            (xComputed == xTotal && xDisplayed == 0) ? "ok" : "fail", det.str());
  }
  // The a=1 slice extends the identity to the degenerate locus where the
  // plane terms cancel pairwise and the corrections vanish.
  for (int b = 2; b < q; ++b)
    for (int c = 2; c < q; ++c) {
      if (b == c) continue;
      std::ostringstream par;
      par << "q=" << q << "; a=1; b=" << b << "; c=" << c;
      record_chain_check(rep, "step3.X_ext", par.str(), boundary_chain(tp.X(1, b, c)),
                         x_identity_rhs(1, b, c, false), "exact chain equality");
    }

  // u_l as a boundary.
  for (int l = 2; l < q; ++l) {
    CoinvChain bv = boundary_chain(tp.V(l));
    CoinvChain bu = boundary_chain(tp.U(l));
    CoinvChain lhs = chain_sum({{&bv, 1}, {&bu, -1}});
    std::ostringstream par;
    par << "q=" << q << "; l=" << l;
    record_chain_check(rep, "step3.VU", par.str(), lhs, tp.u_chain(l),
                       "exact chain equality");
  }

  // Plane-pair differences, anchored at the base pair (2,3); arbitrary pairs
  // of pairs follow by adding two anchored instances.
  auto rhs_T = [&](int g, int h) {
    CoinvChain r;
    add_tuple_class(r, tp.s_tuple(tp.inv(tp.sb(1, h))), -1);
    add_tuple_class(r, tp.s_tuple(tp.dv(g, tp.sb(g, h))), 1);
    CoinvChain z = tp.z_chain(tp.dv(tp.sb(1, h), tp.sb(g, h)));
    CoinvChain y = tp.y_chain(tp.inv(g));
    CoinvChain out = chain_sum({{&r, 1}, {&z, -1}, {&y, 1}});
    add_tuple_class(out, tp.v(g, h), 1);
    return out;
  };
  {
    const int g0 = 2, h0 = 3;
    CoinvChain baseB = boundary_chain(tp.T(g0, h0));
    CoinvChain baseR = rhs_T(g0, h0);
    for (int g = 2; g < q; ++g)
      for (int h = 2; h < q; ++h) {
        if (g == h) continue;
        CoinvChain bT = boundary_chain(tp.T(g, h));
        CoinvChain lhs = chain_sum({{&bT, 1}, {&baseB, -1}});
        CoinvChain r = rhs_T(g, h);
        CoinvChain rhs = chain_sum({{&r, 1}, {&baseR, -1}});
        std::ostringstream par;
        par << "q=" << q << "; g=" << g << "; h=" << h << "; base=(2,3)";
        record_chain_check(rep, "step3.T", par.str(), lhs, rhs, "exact chain equality");
      }
  }

  // y_a from the two hyperplane families.
  for (int a = 2; a < q; ++a) {
    CoinvChain bY = boundary_chain(tp.Y(a));
    CoinvChain bYp = boundary_chain(tp.Yp(a));
    CoinvChain bV = boundary_chain(tp.V(tp.inv(a)));
    CoinvChain rhs = chain_sum({{&bY, 1}, {&bYp, 1}, {&bV, -2}});
    std::ostringstream par;
    par << "q=" << q << "; a=" << a;
    record_chain_check(rep, "step3.Y", par.str(), tp.y_chain(a), rhs,
                       "exact chain equality");
  }

  // z_a from the hyperplane family against the plane family.
  for (int a = 2; a < q; ++a) {
    CoinvChain bV = boundary_chain(tp.V(a));
    CoinvChain bZ = boundary_chain(tp.Z(a));
    CoinvChain rhs = chain_sum({{&bV, 1}, {&bZ, -1}});
    std::ostringstream par;
    par << "q=" << q << "; a=" << a;
    record_chain_check(rep, "step3.Z", par.str(), tp.z_chain(a), rhs,
                       "exact chain equality");
  }

  // s-differences against the double-plane correction.
  for (int a = 2; a < q; ++a)
    for (int b = 2; b < q; ++b) {
      if (a == b) continue;
      CoinvChain bSa = boundary_chain(tp.S(a));
      CoinvChain bSb = boundary_chain(tp.S(b));
      CoinvChain lhs = chain_sum({{&bSa, 1}, {&bSb, -1}});
      CoinvChain rhs = tp.R_chain(tp.inv(tp.sb(1, a)), tp.inv(tp.sb(1, b)));
      add_tuple_class(rhs, tp.s_tuple(a), 1);
      add_tuple_class(rhs, tp.s_tuple(b), -1);
      std::ostringstream par;
      par << "q=" << q << "; a=" << a << "; b=" << b;
      record_chain_check(rep, "step3.S", par.str(), lhs, rhs, "exact chain equality");
    }

  // The double-plane correction as a boundary.  The reference display closes
  // the decomposition with a symmetric pair of single-plane terms at
  // reciprocal parameters 1/(1-a), 1/(1-b); the left side is antisymmetric
  // under swapping the pair, so no symmetric closing pair can hold for every
  // ordered pair.  The check verifies the computed decomposition — the
  // rank-two family at parameters 1-a, 1-b plus an antisymmetric four-class
  // correction pinned by face-by-face canonicalization — and a trailing
  // record adjudicates it against the displayed form and its sign variants.
  {
    const int signPairs[4][2] = {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
    long variantHits[4] = {0, 0, 0, 0};
    long corrected = 0;
    long total = 0;
    auto phi = [&](int x) {
      const int ox = tp.sb(1, x);
      CoinvChain c;
      add_tuple_class(c, tp.tup({{0, 0, 1, 1}, {1, 1, 1, ox}}), 1);
      add_tuple_class(c, tp.tup({{0, 1, 0, 1}, {0, 1, 0, ox}}), -1);
      add_tuple_class(c,
                      homforge::make_tuple(4, q,
                                           {{1, 0, 0, 0},
                                            {0, 1, 0, 0},
                                            {0, 0, 1, 0},
                                            {1, 1, 1, 0},
                                            {1, x, 1, 0},
                                            {0, 0, 0, 1}}),
                      -1);
      add_tuple_class(c,
                      homforge::make_tuple(4, q,
                                           {{1, 0, 0, 0},
                                            {0, 1, 0, 0},
                                            {0, 0, 1, 0},
                                            {1, 1, 1, 0},
                                            {1, x, 1, 0},
                                            {1, 0, 1, 0}}),
                      1);
      return c;
    };
    for (int a = 2; a < q; ++a)
      for (int b = 2; b < q; ++b) {
        if (a == b) continue;
        ++total;
        CoinvChain lhs = tp.Q_boundary(a);
        CoinvChain qb = tp.Q_boundary(b);
        lhs = chain_sum({{&lhs, 1}, {&qb, -1}});
        const int ia = tp.inv(tp.sb(1, a));
        const int ib = tp.inv(tp.sb(1, b));
        for (int vi = 0; vi < 4; ++vi) {
          CoinvChain rhs = tp.N_chain(ia, ib);
          add_tuple_class(rhs, tp.P_tuple(ia), signPairs[vi][0]);
          add_tuple_class(rhs, tp.P_tuple(ib), signPairs[vi][1]);
          CoinvChain r2 = tp.R_chain(a, b);
          rhs = chain_sum({{&rhs, 1}, {&r2, 1}});
          if (lhs == rhs) ++variantHits[vi];
        }
        CoinvChain rhs = tp.N_chain(tp.sb(1, a), tp.sb(1, b));
        CoinvChain pa = phi(a);
        CoinvChain pb = phi(b);
        CoinvChain r2 = tp.R_chain(a, b);
        rhs = chain_sum({{&rhs, 1}, {&pa, 1}, {&pb, -1}, {&r2, 1}});
        if (lhs == rhs) ++corrected;
        std::ostringstream par;
        par << "q=" << q << "; a=" << a << "; b=" << b;
        record_chain_check(rep, "step3.Q", par.str(), lhs, rhs,
                           "exact chain equality");
      }
    std::ostringstream det;
    det << "closing terms over " << total
        << " ordered pairs: displayed symmetric single-plane pair at reciprocal "
           "parameters holds for "
        << variantHits[0] << ", its sign variants for " << variantHits[1] << "/"
        << variantHits[2] << "/" << variantHits[3]
        << "; computed decomposition (rank-two family at 1-a,1-b plus "
           "antisymmetric four-class correction) holds for "
        << corrected << "; a symmetric closing pair cannot match the "
        << "swap-antisymmetric left side";
    bool adjOk = corrected == total;
    for (long h : variantHits) adjOk = adjOk && h == 0;
    rep.add("step3.Q_display", "q=" + std::to_string(q), adjOk ? "ok" : "fail",
            det.str());
  }

  // N and P as boundaries.
  for (int a = 2; a < q; ++a)
    for (int b = 2; b < q; ++b) {
      if (a == b) continue;
      std::ostringstream par;
      par << "q=" << q << "; a=" << a << "; b=" << b;
      record_chain_check(rep, "step3.O", par.str(), tp.O_boundary(a, b),
                         tp.N_chain(a, b), "exact chain equality");
    }
  for (int a = 2; a < q; ++a) {
    CoinvChain rhs;
    add_tuple_class(rhs, tp.P_tuple(a), 1);
    std::ostringstream par;
    par << "q=" << q << "; a=" << a;
    record_chain_check(rep, "step3.M", par.str(), boundary_chain(tp.M(a)), rhs,
                       "exact chain equality");
  }

  return rep;
}

// ---------------------------------------------------------------------------
// The six-line cycles as boundaries
// ---------------------------------------------------------------------------

namespace {

// Exact integer span of a set of sparse columns, maintained as an
// incremental column Hermite form that is kept fully reduced: every stored
// entry at a pivot row is floor-reduced modulo that pivot's leading value.
// Reductions run in a dense reusable carrier driven by a min-heap of
// candidate rows, so each operation costs work proportional to actual
// fill-in.  Arbitrary-precision scalars absorb the transient coefficient
// swell while the form approaches full rank; once the leading values settle
// (almost all become 1), renormalize() collapses the stored entries back to
// a few bits, so bulk insertion streams stay cheap.
class LatticeSpan {
 public:
  explicit LatticeSpan(long rows)
      : rows_(rows), carrier_(static_cast<size_t>(rows)) {}

  // Extends the span by one generator column.
  void insert(const std::vector<std::pair<long, int>>& col) {
    load(col);
    reduce(true);
  }

  // Decides membership of x in the current span without changing it.
  bool member(const std::vector<std::pair<long, long>>& x) {
    load(x);
    return reduce(false);
  }

  // Re-reduces every pivot tail against the current leading values.
  void renormalize() {
    for (auto& [r, p] : pivots_) tail_reduce(p);
  }

  long pivot_count() const { return static_cast<long>(pivots_.size()); }

  // Hermite diagonal entries other than 1: the invariant content of the
  // quotient by the span along pivot rows.
  std::vector<std::string> nonunit_pivots() const {
    std::vector<std::string> out;
    for (const auto& [r, p] : pivots_)
      if (p.front().second != 1) out.push_back(p.front().second.get_str());
    return out;
  }

 private:
  using Sparse = std::vector<std::pair<long, mpz_class>>;
  using MinHeap =
      std::priority_queue<long, std::vector<long>, std::greater<long>>;

  static mpz_class fdiv(const mpz_class& a, const mpz_class& b) {
    mpz_class qq;
    mpz_fdiv_q(qq.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return qq;
  }

  template <class V>
  void load(const std::vector<std::pair<long, V>>& col) {
    for (const auto& [r, v] : col) {
      if (r < 0 || r >= rows_) throw std::runtime_error("lattice index range");
      if (v == 0) continue;
      mpz_class& cr = carrier_[static_cast<size_t>(r)];
      if (sgn(cr) == 0) heap_.push(r);
      cr += v;
    }
  }

  // Drains the heap into a sorted deduplicated row list.
  std::vector<long> drain() {
    std::vector<long> rows;
    while (!heap_.empty()) {
      rows.push_back(heap_.top());
      heap_.pop();
    }
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    return rows;
  }

  void clear_pending(long r) {
    carrier_[static_cast<size_t>(r)] = 0;
    for (long i : drain()) carrier_[static_cast<size_t>(i)] = 0;
  }

  // Floor-reduces every tail entry of np that sits at a pivot row, cascading
  // through those pivots' own tails.  Map keys only grow during the sweep,
  // so one ordered pass suffices.
  void tail_reduce(Sparse& np) {
    if (np.size() <= 1) return;
    std::map<long, mpz_class> m(np.begin() + 1, np.end());
    for (auto it = m.begin(); it != m.end(); ++it) {
      mpz_class& v = it->second;
      if (sgn(v) == 0) continue;
      auto pit = pivots_.find(it->first);
      if (pit == pivots_.end()) continue;
      const Sparse& p = pit->second;
      const mpz_class k = fdiv(v, p.front().second);
      if (sgn(k) == 0) continue;
      v -= k * p.front().second;
      for (size_t ei = 1; ei < p.size(); ++ei)
        m[p[ei].first] -= k * p[ei].second;
    }
    Sparse out;
    out.push_back(np.front());
    for (auto& [i, v] : m)
      if (sgn(v) != 0) out.emplace_back(i, std::move(v));
    np = std::move(out);
  }

  bool reduce(bool extend) {
    while (!heap_.empty()) {
      const long r = heap_.top();
      heap_.pop();
      while (!heap_.empty() && heap_.top() == r) heap_.pop();
      mpz_class& cr = carrier_[static_cast<size_t>(r)];
      if (sgn(cr) == 0) continue;
      auto it = pivots_.find(r);
      if (it == pivots_.end()) {
        if (!extend) {
          clear_pending(r);
          return false;
        }
        Sparse np;
        np.emplace_back(r, cr);
        cr = 0;
        for (long i : drain()) {
          mpz_class& ci = carrier_[static_cast<size_t>(i)];
          if (sgn(ci) == 0) continue;
          np.emplace_back(i, ci);
          ci = 0;
        }
        if (sgn(np.front().second) < 0)
          for (auto& [i, v] : np) v = -v;
        tail_reduce(np);
        pivots_.emplace(r, std::move(np));
        return true;
      }
      Sparse& p = it->second;
      const mpz_class lead = p.front().second;
      const mpz_class k = fdiv(cr, lead);
      if (sgn(k) != 0) {
        cr -= k * lead;
        for (size_t ei = 1; ei < p.size(); ++ei) {
          mpz_class& ci = carrier_[static_cast<size_t>(p[ei].first)];
          if (sgn(ci) == 0) heap_.push(p[ei].first);
          ci -= k * p[ei].second;
        }
      }
      if (sgn(cr) == 0) continue;
      // Remainder in (0, lead): replace the pivot so its leading value
      // becomes gcd(lead, remainder).
      if (!extend) {
        clear_pending(r);
        return false;
      }
      const mpz_class pv = lead;
      const mpz_class cv = cr;
      mpz_class g, s, t;
      mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), pv.get_mpz_t(),
                 cv.get_mpz_t());
      const mpz_class pq = pv / g, cq = cv / g;
      // np = s*p + t*c together with c' = (pv/g)*c - (cv/g)*p spans the
      // same lattice (the transform is unimodular); c' clears row r.
      std::vector<long> rest = drain();
      rest.insert(rest.begin(), r);
      std::vector<long> unionRows(rest.size() + p.size());
      {
        std::vector<long> pr;
        pr.reserve(p.size());
        for (const auto& [i, v] : p) pr.push_back(i);
        auto end = std::set_union(rest.begin(), rest.end(), pr.begin(),
                                  pr.end(), unionRows.begin());
        unionRows.resize(static_cast<size_t>(end - unionRows.begin()));
      }
      Sparse np;
      size_t pi = 0;
      for (long i : unionRows) {
        while (pi < p.size() && p[pi].first < i) ++pi;
        const bool hasP = pi < p.size() && p[pi].first == i;
        const mpz_class& pvI = hasP ? p[pi].second : zero_;
        mpz_class& ci = carrier_[static_cast<size_t>(i)];
        const mpz_class nv = s * pvI + t * ci;
        ci = pq * ci - cq * pvI;
        if (sgn(nv) != 0) np.emplace_back(i, nv);
        if (i != r && sgn(ci) != 0) heap_.push(i);
      }
      carrier_[static_cast<size_t>(r)] = 0;
      tail_reduce(np);
      p = std::move(np);
    }
    return true;
  }

  long rows_;
  std::vector<mpz_class> carrier_;
  MinHeap heap_;
  std::map<long, Sparse> pivots_;
  const mpz_class zero_{};
};

}  // namespace

VerifyReport step3_zero_map(int q) {
  if (q < 5 || !is_prime(q))
    throw std::invalid_argument("step3_zero_map: needs a prime q >= 5");
  Step3Tuples tp(q);
  VerifyReport rep;

  // Full boundary image: every seven-line orbit of the pairwise-distinct
  // complex contributes its boundary column, so membership certifies
  // vanishing of the class in degree-six homology rather than membership in
  // a curated sublattice.
  BuildCaps caps;
  caps.maxBasisPerDegree = 1000000;
  caps.maxBoundaryNnz = 100000000;
  const CoinvariantComplex cx = build_complex(ComplexKind::D, 4, q, 7, caps);
  const long rows = cx.basis_size(6);
  const long cols = cx.basis_size(7);

  struct XRef {
    int a, b, c;
    long idx;
  };
  std::vector<XRef> xs;
  std::vector<long> want;
  for (int a = 2; a < q; ++a)
    for (int b = 2; b < q; ++b)
      for (int c = 2; c < q; ++c) {
        if (a == b || a == c || b == c) continue;
        xs.push_back({a, b, c, basis_index_of(cx, 6, tp.x(a, b, c))});
      }
  for (const XRef& xr : xs)
    if (xr.idx >= 0) want.push_back(xr.idx);
  std::sort(want.begin(), want.end());
  want.erase(std::unique(want.begin(), want.end()), want.end());

  // Insert boundary columns in a fixed shuffled order and stop as soon as
  // the partial span contains every x class: membership in a sublattice of
  // the boundary image certifies membership in the image.  The shuffle
  // spreads independent columns evenly, which keeps the transient
  // coefficient swell short.
  LatticeSpan span(rows);
  std::vector<long> order(static_cast<size_t>(cols));
  for (long j = 0; j < cols; ++j) order[static_cast<size_t>(j)] = j;
  {
    std::mt19937 rng(12345);
    std::shuffle(order.begin(), order.end(), rng);
  }
  long used = 0;
  bool allIn = want.empty();
  for (long j = 0; j < cols && !allIn; ++j) {
    span.insert(cx.cols[7][order[static_cast<size_t>(j)]]);
    ++used;
    if (used % 200 == 0) span.renormalize();
    if (used % 1000 == 0 || used == cols) {
      bool in = true;
      for (long xi : want)
        if (!span.member({{xi, 1}})) {
          in = false;
          break;
        }
      allIn = in;
    }
  }

  {
    std::ostringstream det;
    det << "span of " << used << " of " << cols
        << " seven-line orbit boundaries in " << rows
        << " six-line classes; lattice rank " << span.pivot_count();
    const auto nu = span.nonunit_pivots();
    det << "; non-unit Hermite diagonal entries " << nu.size();
    if (!nu.empty()) {
      det << " (";
      for (size_t i = 0; i < nu.size(); ++i) det << (i ? " " : "") << nu[i];
      det << ")";
    }
    rep.add("step3.zero_pool", "q=" + std::to_string(q), "ok", det.str());
  }

  for (const XRef& xr : xs) {
    std::ostringstream par;
    par << "q=" << q << "; a=" << xr.a << "; b=" << xr.b << "; c=" << xr.c;
    // The cycle condition itself: all faces cancel in the coinvariants.
    CoinvChain bx = boundary_chain(tp.x(xr.a, xr.b, xr.c));
    rep.add("step3.x_cycle", par.str(), bx.empty() ? "ok" : "fail",
            bx.empty() ? "boundary vanishes in the coinvariants"
                       : "boundary does not vanish: " + chain_text(bx));
    if (xr.idx < 0) {
      rep.add("step3.zero_map", par.str(), "fail",
              "orbit missing from the degree-six basis");
      continue;
    }
    const bool in = allIn || span.member({{xr.idx, 1}});
    rep.add("step3.zero_map", par.str(), in ? "ok" : "fail",
            in ? "class lies in the boundary image of the seven-line chain "
                 "group"
               : "class not in the boundary image even with every column "
                 "inserted");
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Differential squares on the H_1 rows
// ---------------------------------------------------------------------------

VerifyReport h1_row_squares(int q) {
  VerifyReport rep;
  if (q < 5 || !is_prime(q))
    throw std::invalid_argument("h1_row_squares: needs a prime q >= 5");
  const long m = q - 1;
  BuildCaps caps;
  caps.maxBasisPerDegree = 200000;
  caps.maxBoundaryNnz = 20000000;
  for (ComplexKind kind : {ComplexKind::D, ComplexKind::Q}) {
    CoinvariantComplex cx = build_complex(kind, 4, q, 6, caps);
    for (int p = 4; p <= 6; ++p) {
      // Charts and indices for the two lower columns.
      std::vector<H1Chart> midCharts, lowCharts;
      std::map<std::string, long> midIndex, lowIndex;
      for (long j = 0; j < cx.basis_size(p - 1); ++j) {
        LineTuple t = tuple_at(cx, p - 1, j);
        midIndex[serialize_tuple(t)] = j;
        midCharts.push_back(h1_chart(t));
      }
      for (long j = 0; j < cx.basis_size(p - 2); ++j) {
        LineTuple t = tuple_at(cx, p - 2, j);
        lowIndex[serialize_tuple(t)] = j;
        lowCharts.push_back(h1_chart(t));
      }
      std::vector<std::map<long, std::vector<long>>> midBlocks(
          static_cast<size_t>(cx.basis_size(p - 1)));
      for (long j = 0; j < cx.basis_size(p - 1); ++j)
        midBlocks[static_cast<size_t>(j)] =
            sparse_row_blocks(midCharts[static_cast<size_t>(j)], kind, lowIndex, lowCharts);

      long bad = 0;
      std::string firstBad;
      for (long j = 0; j < cx.basis_size(p); ++j) {
        H1Chart sc = h1_chart(tuple_at(cx, p, j));
        auto row = sparse_row_blocks(sc, kind, midIndex, midCharts);
        const long srcC = sc.coordCount;
        std::map<long, std::vector<long>> comp;
        for (const auto& [mi, m1] : row) {
          const long midC = midCharts[static_cast<size_t>(mi)].coordCount;
          for (const auto& [li, m2] : midBlocks[static_cast<size_t>(mi)]) {
            const long lowC = lowCharts[static_cast<size_t>(li)].coordCount;
            auto& acc = comp[li];
            if (acc.empty()) acc.assign(static_cast<size_t>(lowC * srcC), 0);
            for (long r = 0; r < lowC; ++r)
              for (long k = 0; k < srcC; ++k) {
                long sum = 0;
                for (long t = 0; t < midC; ++t)
                  sum += m2[static_cast<size_t>(r * midC + t)] *
                         m1[static_cast<size_t>(t * srcC + k)];
                acc[static_cast<size_t>(r * srcC + k)] += sum;
              }
          }
        }
        bool okj = true;
        for (const auto& [li, acc] : comp)
          for (long v : acc)
            if (norm_mod(v, m) != 0) {
              okj = false;
              break;
            }
        if (!okj) {
          ++bad;
          if (firstBad.empty()) firstBad = serialize_tuple(sc.tuple);
        }
      }
      std::ostringstream par, det;
      par << "q=" << q << "; kind=" << (kind == ComplexKind::D ? "D" : "Q")
          << "; p=" << p;
      det << "checked " << cx.basis_size(p) << " sources";
      if (bad)
        det << "; " << bad << " with nonvanishing composite, first [" << firstBad << "]";
      else
        det << ", all composites vanish mod " << m;
      rep.add("d1sq.composite", par.str(), bad == 0 ? "ok" : "fail", det.str());
    }
  }
  return rep;
}

}  // namespace homforge
