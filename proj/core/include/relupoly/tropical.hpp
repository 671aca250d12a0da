#pragma once

#include <optional>
#include <string>
#include <vector>

#include "relupoly/complex.hpp"

namespace relupoly {

// Unnormalized tropical weight of a facet relative to the canonical normal of
// its affine hull: w = (A_pos - A_neg) . normal, where "pos" is the adjacent
// region on the positive side of the hull. The true weight is w / |normal|,
// so w = 0 iff the facet is invisible, and weights on a shared hull compare
// exactly through w.
struct FacetWeight {
  RatVec w;        // one entry per output coordinate
  RatVec normal;   // canonical primitive integer normal of aff(sigma)
  Rat norm2;       // |normal|^2

  bool is_zero() const { return is_zero_vec(w); }
};

// Closed-form weight carried as (direction, squared scale):
// c = direction * sqrt(scale2).
struct ClosedFormWeight {
  RatVec direction;
  Rat scale2;

  bool is_zero() const { return sgn(scale2) == 0 || is_zero_vec(direction); }
};

// (A_P - A_Q) e for a supplied normal direction e (exact when e is rational).
RatVec weight_from_pieces(const RatMat& a_p, const RatMat& a_q, const RatVec& e);

FacetWeight facet_weight(const CanonicalComplex& c, std::size_t facet);

// Prop-7 route: requires a unique incident bent hyperplane on the facet.
ClosedFormWeight facet_weight_closed_form(const CanonicalComplex& c, std::size_t facet);

// Exact equality of w/|normal| against direction*sqrt(scale2), cross-multiplied.
bool weights_agree(const FacetWeight& fw, const ClosedFormWeight& cf);

// One-hidden-layer weight of a full hyperplane: sum over the neurons lying on
// it of |row scale| * outgoing column, carried against the canonical normal.
ClosedFormWeight one_layer_weight(const Parameter& p, const Hyperplane& h);

struct BreakpointComplex {
  std::vector<FacetWeight> weights;   // per canonical facet
  std::vector<bool> visible;          // weight nonzero
  std::vector<std::size_t> facets;    // visible facet ids
  std::vector<std::size_t> ridges;    // ridges incident to a visible facet

  std::vector<std::size_t> star(const CanonicalComplex& c, std::size_t ridge) const;
};

BreakpointComplex breakpoint_complex(const CanonicalComplex& c);

struct LraResult {
  bool ok = true;
  std::vector<std::size_t> offending;  // invisible facets meeting relint(X)
};
LraResult lra_check(const CanonicalComplex& c, const BreakpointComplex& b, const Polyhedron& x);

struct TransparencyResult {
  bool transparent = true;
  RatVec witness;           // point where the whole layer is strictly negative
  std::size_t region = 0;   // offending stage region
};
// Layer l on the image of X: decided by per-region strict LPs in input space.
TransparencyResult transparency_check(const CanonicalComplex& c, std::size_t l, const Polyhedron& x);

std::string weight_table_json(const CanonicalComplex& c, const BreakpointComplex& b);

}  // namespace relupoly
