#include "homforge/orbit_complexes.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace homforge {

namespace {

using PackedTuple = std::array<uint16_t, 7>;

struct PackedTupleHash {
  size_t operator()(const PackedTuple& a) const {
    // FNV-1a over the 14 bytes.
    size_t h = 1469598103934665603ull;
    for (uint16_t x : a) {
      h ^= static_cast<size_t>(x & 0xff);
      h *= 1099511628211ull;
      h ^= static_cast<size_t>(x >> 8);
      h *= 1099511628211ull;
    }
    return h;
  }
};

using TupleIndex = std::unordered_map<PackedTuple, long, PackedTupleHash>;

void check_build_args(int n, int q, int maxDegree) {
  if (n < 2 || n > 4) {
    throw std::runtime_error("build_complex: n must be in {2,3,4}");
  }
  if (q != 3 && q != 5 && q != 7 && q != 11 && q != 13) {
    throw std::runtime_error("build_complex: q must be in {3,5,7,11,13}");
  }
  if (maxDegree < 0 || maxDegree > 7) {
    throw std::runtime_error("build_complex: maxDegree must be in [0,7]");
  }
}

PackedTuple pack_tuple(const LineTuple& t) {
  PackedTuple a{};
  for (size_t k = 0; k < t.lines.size(); ++k) {
    a[k] = static_cast<uint16_t>(line_id(t.lines[k], t.n, t.q));
  }
  return a;
}

LineTuple unpack_tuple(const PackedTuple& a, int len, int n, int q) {
  LineTuple t;
  t.n = n;
  t.q = q;
  t.lines.reserve(len);
  for (int k = 0; k < len; ++k) {
    t.lines.push_back(line_from_id(a[k], n, q));
  }
  return t;
}

std::vector<int> decode_digits(int id, int n, int q) {
  std::vector<int> digits(n, 0);
  for (int k = n - 1; k >= 0; --k) {
    digits[k] = id % q;
    id /= q;
  }
  return digits;
}

std::vector<int> normalized_line_ids(int n, int q) {
  // All ids whose base-q digits have first nonzero entry 1, i.e. the
  // normalized representatives of the q^{n-1}+...+q+1 projective lines.
  std::vector<int> ids;
  int total = 1;
  for (int k = 0; k < n; ++k) total *= q;
  for (int id = 1; id < total; ++id) {
    std::vector<int> digits = decode_digits(id, n, q);
    int first = 0;
    for (int c : digits) {
      if (c != 0) {
        first = c;
        break;
      }
    }
    if (first == 1) ids.push_back(id);
  }
  return ids;
}

}  // namespace

int line_id(const Line& line, int n, int q) {
  if (static_cast<int>(line.coords.size()) != n) {
    throw std::runtime_error("line_id: coordinate count does not match n");
  }
  int id = 0;
  for (int k = 0; k < n; ++k) {
    int c = line.coords[k];
    if (c < 0 || c >= q) {
      throw std::runtime_error("line_id: coordinate out of range for q");
    }
    id = id * q + c;
  }
  return id;
}

Line line_from_id(int id, int n, int q) {
  int total = 1;
  for (int k = 0; k < n; ++k) total *= q;
  if (id <= 0 || id >= total) {
    throw std::runtime_error("line_from_id: id out of range");
  }
  std::vector<int> coords = decode_digits(id, n, q);
  Line line = make_line(coords, q);
  if (line.coords != coords) {
    // make_line rescales to leading coefficient 1; an id that changes under
    // that is not the encoding of a normalized line.
    throw std::runtime_error("line_from_id: id is not a normalized line");
  }
  return line;
}

long CoinvariantComplex::basis_size(int l) const {
  if (l < 0 || l > maxDegree) return 0;
  return static_cast<long>(tuples[l].size());
}

LineTuple tuple_at(const CoinvariantComplex& cx, int degree, long index) {
  if (degree < 0 || degree > cx.maxDegree) {
    throw std::runtime_error("tuple_at: degree out of range");
  }
  if (index < 0 || index >= cx.basis_size(degree)) {
    throw std::runtime_error("tuple_at: index out of range");
  }
  return unpack_tuple(cx.tuples[degree][index], degree, cx.n, cx.q);
}

OrbitLabel label_at(const CoinvariantComplex& cx, int degree, long index) {
  return orbit_label(tuple_at(cx, degree, index));
}

std::vector<OrbitLabel> basis_labels(const CoinvariantComplex& cx, int degree) {
  std::vector<OrbitLabel> out;
  long m = cx.basis_size(degree);
  out.reserve(m);
  for (long j = 0; j < m; ++j) out.push_back(label_at(cx, degree, j));
  return out;
}

long basis_index_of(const CoinvariantComplex& cx, int degree,
                    const LineTuple& t) {
  if (degree < 0 || degree > cx.maxDegree) {
    throw std::runtime_error("basis_index_of: degree out of range");
  }
  if (static_cast<int>(t.lines.size()) != degree || t.n != cx.n ||
      t.q != cx.q) {
    throw std::runtime_error("basis_index_of: tuple does not match complex");
  }
  PackedTuple key = pack_tuple(canonical_form(t).canonical);
  const auto& deg = cx.tuples[degree];
  for (size_t j = 0; j < deg.size(); ++j) {
    if (deg[j] == key) return static_cast<long>(j);
  }
  return -1;
}

CoinvariantComplex build_complex(ComplexKind kind, int n, int q, int maxDegree,
                                 const BuildCaps& caps, unsigned shuffleSeed) {
  check_build_args(n, q, maxDegree);

  // The quotient complex's basis is carved out of the D enumeration; C and D
  // enumerate directly.
  const TupleKind enumKind =
      (kind == ComplexKind::C) ? TupleKind::C : TupleKind::D;

  const std::vector<int> lineIds = normalized_line_ids(n, q);

  // Enumerate canonical representatives degree by degree: each degree-l
  // orbit's representative arises by appending some line to the canonical
  // form of its length-(l-1) prefix (faces of admissible tuples are
  // admissible), so extending every canonical representative by every
  // admissible line and canonicalizing finds every orbit.
  std::vector<std::vector<PackedTuple>> enumerated(maxDegree + 1);
  enumerated[0].push_back(PackedTuple{});  // the empty tuple
  for (int l = 1; l <= maxDegree; ++l) {
    TupleIndex seen;
    for (const PackedTuple& parent : enumerated[l - 1]) {
      LineTuple pt = unpack_tuple(parent, l - 1, n, q);
      std::set<int> parentIds(parent.begin(), parent.begin() + (l - 1));
      for (int id : lineIds) {
        if (parentIds.count(id)) continue;  // repeated line: admissible never
        LineTuple candidate = pt;
        candidate.lines.push_back(line_from_id(id, n, q));
        if (enumKind == TupleKind::C &&
            !is_general_position(candidate, TupleKind::C)) {
          continue;
        }
        PackedTuple key = pack_tuple(canonical_form(candidate).canonical);
        bool fresh = seen.emplace(key, static_cast<long>(enumerated[l].size())).second;
        if (fresh) {
          enumerated[l].push_back(key);
          if (static_cast<long>(enumerated[l].size()) > caps.maxBasisPerDegree) {
            throw std::runtime_error(
                "resource cap exceeded: degree " + std::to_string(l) +
                " basis would pass " + std::to_string(caps.maxBasisPerDegree) +
                " elements");
          }
        }
      }
    }
  }

  CoinvariantComplex cx;
  cx.kind = kind;
  cx.n = n;
  cx.q = q;
  cx.maxDegree = maxDegree;
  cx.tuples.resize(maxDegree + 1);
  cx.cols.resize(maxDegree + 1);

  if (kind == ComplexKind::Q) {
    // Keep exactly the D-orbits failing C-general-position.  The empty tuple
    // and every tuple of length <= 2 are C-admissible, so low degrees are
    // empty, as the quotient demands.
    for (int l = 0; l <= maxDegree; ++l) {
      for (const PackedTuple& key : enumerated[l]) {
        LineTuple t = unpack_tuple(key, l, n, q);
        if (!is_general_position(t, TupleKind::C)) {
          cx.tuples[l].push_back(key);
        }
      }
    }
  } else {
    cx.tuples = std::move(enumerated);
  }

  if (shuffleSeed != 0) {
    for (int l = 0; l <= maxDegree; ++l) {
      std::mt19937 rng(shuffleSeed + static_cast<unsigned>(l));
      std::shuffle(cx.tuples[l].begin(), cx.tuples[l].end(), rng);
    }
  }

  // Index the final bases, then assemble boundaries: the column of a basis
  // element is the signed sum over its faces of the face's orbit row.  For
  // the quotient kind a face whose orbit is C-admissible is absent from the
  // index and contributes nothing.
  std::vector<TupleIndex> index(maxDegree + 1);
  for (int l = 0; l <= maxDegree; ++l) {
    for (size_t j = 0; j < cx.tuples[l].size(); ++j) {
      index[l].emplace(cx.tuples[l][j], static_cast<long>(j));
    }
  }

  long nnzTotal = 0;
  for (int l = 1; l <= maxDegree; ++l) {
    cx.cols[l].resize(cx.tuples[l].size());
    for (size_t j = 0; j < cx.tuples[l].size(); ++j) {
      LineTuple t = unpack_tuple(cx.tuples[l][j], l, n, q);
      std::map<long, int> acc;
      for (int i = 0; i < l; ++i) {
        PackedTuple faceKey =
            pack_tuple(canonical_form(apply_face(t, i)).canonical);
        auto it = index[l - 1].find(faceKey);
        if (it == index[l - 1].end()) {
          if (kind == ComplexKind::Q) {
            LineTuple face = unpack_tuple(faceKey, l - 1, n, q);
            if (is_general_position(face, TupleKind::C)) continue;
          }
          throw std::logic_error(
              "build_complex: face orbit missing from the previous degree");
        }
        acc[it->second] += (i % 2 == 0) ? 1 : -1;
      }
      auto& col = cx.cols[l][j];
      for (const auto& [row, coeff] : acc) {
        if (coeff != 0) col.emplace_back(row, coeff);
      }
      nnzTotal += static_cast<long>(col.size());
      if (nnzTotal > caps.maxBoundaryNnz) {
        throw std::runtime_error(
            "resource cap exceeded: boundary entries would pass " +
            std::to_string(caps.maxBoundaryNnz));
      }
    }
  }
  return cx;
}

SparseIntMatrix boundary_matrix(const CoinvariantComplex& cx, int l) {
  if (l < 1 || l > cx.maxDegree) {
    throw std::runtime_error("boundary_matrix: degree out of range");
  }
  SparseIntMatrix m(cx.basis_size(l - 1), cx.basis_size(l));
  for (size_t j = 0; j < cx.cols[l].size(); ++j) {
    for (const auto& [row, coeff] : cx.cols[l][j]) {
      m.set(row, static_cast<long>(j), coeff);
    }
  }
  return m;
}

ChainComplexZ to_chain_complex(const CoinvariantComplex& cx) {
  ChainComplexZ out;
  out.dims.resize(cx.maxDegree + 1);
  out.boundaries.resize(cx.maxDegree + 1);
  for (int l = 0; l <= cx.maxDegree; ++l) out.dims[l] = cx.basis_size(l);
  for (int l = 1; l <= cx.maxDegree; ++l) {
    out.boundaries[l] = boundary_matrix(cx, l);
  }
  return out;
}

bool boundary_squares_to_zero(const CoinvariantComplex& cx) {
  for (int l = 2; l <= cx.maxDegree; ++l) {
    for (const auto& col : cx.cols[l]) {
      std::map<long, long> acc;
      for (const auto& [mid, s] : col) {
        for (const auto& [row, s2] : cx.cols[l - 1][mid]) {
          acc[row] += static_cast<long>(s) * s2;
        }
      }
      for (const auto& [row, v] : acc) {
        (void)row;
        if (v != 0) return false;
      }
    }
  }
  return true;
}

namespace {

void check_ses_pair(const CoinvariantComplex& a, const CoinvariantComplex& b,
                    int l, const char* what) {
  if (a.n != b.n || a.q != b.q) {
    throw std::runtime_error(std::string(what) +
                             ": complexes disagree on (n, q)");
  }
  if (l < 0 || l > a.maxDegree || l > b.maxDegree) {
    throw std::runtime_error(std::string(what) + ": degree out of range");
  }
}

}  // namespace

SparseIntMatrix inclusion_matrix(const CoinvariantComplex& cSub,
                                 const CoinvariantComplex& dFull, int l) {
  check_ses_pair(cSub, dFull, l, "inclusion_matrix");
  if (cSub.kind != ComplexKind::C || dFull.kind != ComplexKind::D) {
    throw std::runtime_error("inclusion_matrix: expects a C and a D complex");
  }
  TupleIndex dIndex;
  for (size_t j = 0; j < dFull.tuples[l].size(); ++j) {
    dIndex.emplace(dFull.tuples[l][j], static_cast<long>(j));
  }
  SparseIntMatrix m(dFull.basis_size(l), cSub.basis_size(l));
  for (size_t j = 0; j < cSub.tuples[l].size(); ++j) {
    auto it = dIndex.find(cSub.tuples[l][j]);
    if (it == dIndex.end()) {
      throw std::runtime_error(
          "inclusion_matrix: C-basis orbit missing from the D basis");
    }
    m.set(it->second, static_cast<long>(j), 1);
  }
  return m;
}

SparseIntMatrix projection_matrix(const CoinvariantComplex& dFull,
                                  const CoinvariantComplex& qQuot, int l) {
  check_ses_pair(dFull, qQuot, l, "projection_matrix");
  if (dFull.kind != ComplexKind::D || qQuot.kind != ComplexKind::Q) {
    throw std::runtime_error("projection_matrix: expects a D and a Q complex");
  }
  TupleIndex qIndex;
  for (size_t j = 0; j < qQuot.tuples[l].size(); ++j) {
    qIndex.emplace(qQuot.tuples[l][j], static_cast<long>(j));
  }
  SparseIntMatrix m(qQuot.basis_size(l), dFull.basis_size(l));
  for (size_t j = 0; j < dFull.tuples[l].size(); ++j) {
    auto it = qIndex.find(dFull.tuples[l][j]);
    if (it != qIndex.end()) {
      m.set(it->second, static_cast<long>(j), 1);
    }
  }
  return m;
}

}  // namespace homforge
