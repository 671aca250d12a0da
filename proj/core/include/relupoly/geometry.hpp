#pragma once

#include <optional>
#include <string>
#include <vector>

#include "relupoly/linalg.hpp"
#include "relupoly/rational.hpp"
#include "relupoly/simplex.hpp"

namespace relupoly {

// Affine expression a.x + b.
struct LinExpr {
  RatVec a;
  Rat b;

  Rat eval(const RatVec& x) const { return dot(a, x) + b; }
  bool operator==(const LinExpr& o) const { return a == o.a && b == o.b; }
};

// Canonical hyperplane {x : normal.x + offset = 0}: normal is a primitive
// integer vector with positive first nonzero entry, so equality of hyperplanes
// is plain equality of the representation.
struct Hyperplane {
  RatVec normal;
  Rat offset;

  static Hyperplane canonical(const RatVec& normal, const Rat& offset);
  LinExpr expr() const { return {normal, offset}; }
  bool operator==(const Hyperplane& o) const { return normal == o.normal && offset == o.offset; }
  bool operator<(const Hyperplane& o) const;
  std::string to_string() const;
};

// H-description: {x : a.x + b >= 0 for all ineqs, a.x + b = 0 for all eqs}.
// Redundant constraints are allowed.
struct Polyhedron {
  std::size_t dim = 0;
  std::vector<LinExpr> ineqs;
  std::vector<LinExpr> eqs;

  static Polyhedron box(std::size_t dim, const Rat& radius);
  static Polyhedron whole_space(std::size_t dim) { return Polyhedron{dim, {}, {}}; }

  Polyhedron intersect(const Polyhedron& other) const;
  Polyhedron with_inequality(const LinExpr& e) const;
  Polyhedron with_equality(const LinExpr& e) const;
  bool contains(const RatVec& x) const;
};

// --- LP-backed queries (all exact) ---

// Witness point or nullopt when empty.
std::optional<RatVec> lp_feasible(const Polyhedron& p);

// maximize c.x over p.
LpResult lp_maximize(const Polyhedron& p, const RatVec& c);

// -1 iff empty, else the dimension of the affine hull.
int polyhedron_dim(const Polyhedron& p);

// Point with every inequality strictly positive (max-slack LP), or nullopt.
std::optional<RatVec> strictly_feasible_point(const Polyhedron& p);

// Point in the relative interior (strict on all non-implicit inequalities).
std::optional<RatVec> relint_point(const Polyhedron& p);

// Indices of inequalities that hold with equality on all of p.
std::vector<std::size_t> implicit_equalities(const Polyhedron& p);

struct AffineHull {
  RatVec point;                 // some point of p
  std::vector<RatVec> basis;    // directions spanning the hull
  std::vector<LinExpr> equations;  // hull = {x : all equations vanish}
};
std::optional<AffineHull> affine_hull(const Polyhedron& p);

// All vertices (0-faces). Supported for ambient dimension <= 3.
std::vector<RatVec> enumerate_vertices(const Polyhedron& p);

// True iff relint(p) intersects q's interior region given by strict inequalities:
// exists x in p with every inequality of q strictly positive.
bool meets_relative_interior(const Polyhedron& p, const Polyhedron& q);

// Image {Mx + c : x in p}; requires rank(M) = p.dim (injective affine map).
Polyhedron affine_image(const Polyhedron& p, const RatMat& m, const RatVec& c);

// Is hyperplane h "inside" p: relint(p) meets h and dim(p cap h) = dim(p)-1.
bool hyperplane_inside(const Hyperplane& h, const Polyhedron& p);

}  // namespace relupoly
