#pragma once
// First-page bookkeeping for the orbit complexes: cell descriptors listing
// stabilizer summands, degree-one differential components on H_1 in Levi
// coordinates, and the verification suites built on top of them (the H_1-row
// component formulas, the degree-one component table, the bottom row of the
// first page, and the seven-line boundary identities with their consequence
// that the generic six-line cycles die in the distinct-line complex).

#include <array>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "homforge/ff_linalg.hpp"
#include "homforge/integer_homology.hpp"
#include "homforge/line_configs.hpp"
#include "homforge/orbit_complexes.hpp"

namespace homforge {

// ---------------------------------------------------------------------------
// Verification records
// ---------------------------------------------------------------------------

// One verification outcome.  status is "ok", "fail", or "deviation"; a
// deviation means the computation completed cleanly but the result differs
// from the reference pattern in a place where recording the difference is the
// point of the run.  Identity checks carry printable left/right sides.
struct CheckRecord {
  std::string check;
  std::string params;
  std::string status;
  std::string detail;
  std::string lhs;
  std::string rhs;
};

struct VerifyReport {
  std::vector<CheckRecord> records;

  // True when every record has status "ok".
  bool all_ok() const;
  // Counts by status, e.g. "34 checks: 34 ok" or "12 checks: 10 ok, 2 fail".
  std::string summary() const;

  void add(std::string check, std::string params, std::string status,
           std::string detail = "", std::string lhs = "", std::string rhs = "");
  void append(const VerifyReport& other);
};

// ---------------------------------------------------------------------------
// Page descriptors
// ---------------------------------------------------------------------------

// One cell of a first page: column p (number of lines), row qRow, and the
// direct-sum decomposition into one summand per orbit, each labelled by its
// canonical representative and stabilizer shape.  Summands appear in the
// basis order of the coinvariant complex at degree p.
struct PageCell {
  ComplexKind kind = ComplexKind::C;
  int n = 0;
  int q = 0;
  int p = 0;
  int qRow = 0;
  std::vector<std::pair<OrbitLabel, StabilizerDescription>> summands;
};

PageCell page_cell(ComplexKind kind, int n, int q, int p, int qRow);

// ---------------------------------------------------------------------------
// H_1 coordinates of stabilizers
// ---------------------------------------------------------------------------
//
// For a tuple whose stabilizer has Levi quotient F*^k x GL_m, H_1 of the
// stabilizer is (Z/(q-1))^{k + [m > 0]}: one coordinate per scalar block
// (tie class of lines sharing their eigenvalue), ordered by the smallest
// member line of the class, followed by one determinant coordinate for the
// GL block when the lines do not span.  Values are discrete logarithms with
// respect to the least primitive root mod q.  This needs q >= 5 so that the
// unipotent radical and the special linear part both die in H_1.

struct H1Chart {
  LineTuple tuple;  // canonical representative the chart is attached to
  StabilizerDescription stab;
  int coordCount = 0;
  long modulus = 0;  // q - 1
  // Tie classes sorted by smallest member line, the charting order.
  std::vector<std::vector<int>> classes;
  std::vector<int> classDims;  // dimension of each tie-class span
  bool hasDetCoord = false;    // GL block present (lines do not span)
  // One stabilizer element per coordinate reading as the corresponding unit
  // vector: scalar zeta on one tie-class span (identity elsewhere), or zeta
  // on one complement direction for the determinant coordinate.
  std::vector<FqMatrix> generators;
  FqMatrix basis;     // columns: tie-class span bases, then a complement basis
  FqMatrix basisInv;
};

// Builds the chart for a canonical tuple (any tuple with pairwise distinct
// lines works; the chart lives on its own canonical form's stabilizer, so
// callers normally pass canonical representatives).  Handles the empty tuple
// (stabilizer all of GL_n, one determinant coordinate).
H1Chart h1_chart(const LineTuple& t);

// Coordinates of a stabilizer element in the chart.  Throws when Z fails to
// stabilize the tuple's lines or acts on some tie-class span by a non-scalar.
std::vector<long> h1_read(const H1Chart& chart, const FqMatrix& Z);

// ---------------------------------------------------------------------------
// Degree-one differential components on H_1
// ---------------------------------------------------------------------------

// The component of the degree-one differential from `source` through `face`
// into `target` on H_1: delete the face-th line, carry the stabilizer into
// the target's canonical position by the canonicalizing conjugation, include,
// and read off in Levi coordinates; sign (-1)^face.  Entries are reduced mod
// q-1.  Throws "face/orbit mismatch" when the face of source's canonical
// tuple is not in target's orbit, and rejects degree != 1 (only the H_1 level
// is mechanized).
DenseIntMatrix d1_component(const OrbitLabel& source, int face,
                            const OrbitLabel& target, int degree = 1);

// Full block row of the degree-one differential leaving one source summand:
// for each target, the sum of d1_component over all faces of the source
// landing in that target's orbit, scaled by globalSign.  The kind decides
// which faces survive: Q drops faces in general position, C and D keep all.
struct H1Row {
  OrbitLabel source;
  int globalSign = 1;
  long modulus = 0;
  std::vector<OrbitLabel> targets;
  std::vector<DenseIntMatrix> components;  // aligned with targets
};

H1Row h1_row(ComplexKind kind, const OrbitLabel& source,
             const std::vector<OrbitLabel>& targets, int globalSign = 1);

// ---------------------------------------------------------------------------
// Coinvariant chains keyed by canonical form (distinct-line kind)
// ---------------------------------------------------------------------------

// A chain in the coinvariant complex, keyed by serialized canonical
// representative.  Zero coefficients are erased eagerly, so an empty map is
// the zero chain.
using CoinvChain = std::map<std::string, long long>;

// Adds coeff times the class of t (canonicalized first).
void chain_add(CoinvChain& c, const LineTuple& t, long long coeff);

// Alternating-sign boundary: sum over faces of (-1)^i times the class of the
// tuple with line i deleted.
CoinvChain boundary_chain(const LineTuple& t);

// Deterministic printable form, e.g. "[e1;e2;e1+e2] - 2*[e1;e2;e3]" with
// serialized tuples as keys in map order.
std::string chain_text(const CoinvChain& c);

// ---------------------------------------------------------------------------
// Verification suites
// ---------------------------------------------------------------------------

// Bottom row of the first page for the general-position complex: computes
// the homology of the augmented coinvariant complex through column n+1
// (n = 2 goes one step further, to the column carrying the cross-ratio
// orbits, and cross-checks its structure against the symbol-presented group
// from pre_bloch).  Columns p <= n-1 must vanish; nonzero answers there are
// reported as deviations with generator witnesses.  n in {2,3,4}, q >= 3.
VerifyReport q0_row(int n, int q);

// Recomputes the six displayed H_1-row component formulas out of the
// five-line cells from d1_component and compares them coordinate-wise
// against the corrected reference forms, under both global sign conventions;
// exactly one convention must match (q >= 5).
VerifyReport verify_e51_formulas(int q);

// Recomputes the degree-one component table out of the one- to four-line
// cells of the distinct-line page (targets: the three- and two-line cells,
// down to the empty tuple) and compares against the corrected reference
// forms; the torus rows are cross-checked against the independent
// push-one-coordinate-into-the-block formula (q >= 5).
VerifyReport verify_d1_table(int q);

// Verifies every displayed seven-line boundary identity over F_q: the
// extended-cycle identity and the eight auxiliary family identities, each
// for every admissible parameter assignment, as exact chain equalities in
// the distinct-line coinvariants (q >= 7).
VerifyReport step3_verify(int q);

// Certifies that each generic six-line cycle x_{a,b,c} is a boundary in the
// distinct-line coinvariant complex: exact integer lattice membership of x
// in the span of the seven-line orbit boundary columns, built incrementally
// with early exit (membership in a partial span already certifies
// membership in the boundary image).  q >= 5 prime.
VerifyReport step3_zero_map(int q);

// Composes the H_1-row block matrices across two consecutive columns and
// checks the composite vanishes mod q-1, for sources in columns 4..6 of the
// distinct-line and quotient pages (q in {5,7}).
VerifyReport h1_row_squares(int q);

}  // namespace homforge
