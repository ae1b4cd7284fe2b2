#pragma once

// Lines in F_q^n (one-dimensional subspaces), ordered tuples of lines, the
// general-position predicates for the two flavors of configuration complex,
// canonical forms under the GL_n action, classification against the named
// representative families at n = 4, face maps, and stabilizer structure.

#include <gmpxx.h>

#include <string>
#include <vector>

#include "homforge/ff_linalg.hpp"

namespace homforge {

// A line through the origin, stored as its unique representative vector whose
// first nonzero coordinate is 1.
struct Line {
  std::vector<int> coords;
  friend bool operator==(const Line&, const Line&) = default;
  friend auto operator<=>(const Line&, const Line&) = default;
};

// Normalizes a representative vector; rejects the zero vector.
Line make_line(std::vector<int> coords, int q);

struct LineTuple {
  int n = 0;  // ambient dimension
  int q = 0;  // field size (prime)
  std::vector<Line> lines;
  int length() const { return static_cast<int>(lines.size()); }
  friend bool operator==(const LineTuple&, const LineTuple&) = default;
};

LineTuple make_tuple(int n, int q, const std::vector<std::vector<int>>& coords);

// C-kind: every subset of size min(length, n) is linearly independent.
// D-kind: every subset of size min(length, 2) is independent, i.e. the lines
// are pairwise distinct.
enum class TupleKind { C, D };

bool is_general_position(const LineTuple& t, TupleKind kind);

// Rank of the span of all lines of the tuple.
int tuple_rank(const LineTuple& t);

struct CanonicalResult {
  LineTuple canonical;
  FqMatrix g;  // invertible; g maps line i of the input onto line i of canonical
};

// Canonical representative of the GL_n-orbit of t (pairwise distinct lines
// required).  Algorithm: (1) the lexicographically first subset of indices
// whose lines greedily form an independent spanning set of the tuple's span,
// say of size r; (2) the change of basis sending those lines to e_1..e_r;
// (3) residual torus freedom killed deterministically: remaining lines are
// processed in index order, coordinates left to right; a coordinate whose
// torus ratio (tracked by a union-find over the r pivot slots with ratio
// labels) is still free relative to the line's own pivot slot is fixed to 1;
// already-tied coordinates keep their forced field value.  Those forced
// values are exactly the residual parameters of the named families.
CanonicalResult canonical_form(const LineTuple& t);

struct LeviFactor {
  enum class Kind { Scalar, GL };
  Kind kind = Kind::Scalar;
  int size = 0;  // Scalar: elements act as c*I_size; GL: a full GL_size factor
  friend bool operator==(const LeviFactor&, const LeviFactor&) = default;
};

struct StabilizerDescription {
  // Scalar blocks ordered by smallest line index of their tie class, then the
  // GL block on the unconstrained quotient (omitted when the lines span).
  std::vector<LeviFactor> leviFactors;
  // Partition of line indices: lines forced to share a stabilizer eigenvalue.
  std::vector<std::vector<int>> tieClasses;
  long dimS = 0;          // dimension of S = {X : X v_i in <v_i> for all i}
  long unipotentDim = 0;  // dimS minus the Levi dimension
  std::string to_string() const;
  friend bool operator==(const StabilizerDescription&,
                         const StabilizerDescription&) = default;
};

StabilizerDescription stabilizer(const LineTuple& t);

// Order of GL_m(F_q).
mpz_class gl_order(int m, int q);

// Group order of the stabilizer over F_q from its structure description.
mpz_class stabilizer_order(const StabilizerDescription& s, int q);

struct OrbitLabel {
  LineTuple canonical;
  std::string family;        // e.g. "w_2", "u_7", "v_9"; empty when untagged
  std::vector<int> indices;  // superscript indices (i, j[, k]) when present
  std::vector<int> params;   // residual field parameters (a[, b]) when present
  int rank = 0;
  friend bool operator==(const OrbitLabel&, const OrbitLabel&) = default;
};

// Display form, e.g. "v_9^{1,2}(a=3)".
std::string label_text(const OrbitLabel& label);

// Canonical form plus, for n = 4 and lengths 3..5, the unique matching family
// tag with extracted parameters.  A D-admissible tuple in that range that
// matches no family (or several) raises an error: the representative lists
// are asserted to be complete and irredundant, and a violation must surface.
OrbitLabel orbit_label(const LineTuple& t);

// Removes the i-th line (0-indexed).
LineTuple apply_face(const LineTuple& t, int i);

// Image tuple (g v_0, ..., g v_l), renormalized; g must be n x n over the
// same field.
LineTuple apply_matrix(const FqMatrix& g, const LineTuple& t);

// "1,0,0,0;0,1,0,0;1,1,0,0" — lines separated by ';', coordinates by ','.
std::string serialize_tuple(const LineTuple& t);
LineTuple parse_tuple(const std::string& text, int q);

struct FamilyInstance {
  std::string family;
  std::vector<int> indices;
  std::vector<int> params;
  LineTuple rep;
};

// All named-family representatives over F_q of the given length (3, 4, or 5)
// at n = 4, parameters expanded over their admissible field values.
std::vector<FamilyInstance> family_representatives(int q, int length);

}  // namespace homforge
