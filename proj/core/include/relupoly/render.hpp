#pragma once

#include <optional>
#include <string>

#include "relupoly/tropical.hpp"

namespace relupoly {

// 2D affine slice x = origin + basis0*u + basis1*v for rendering nets with
// input dimension above 2.
struct SliceSpec {
  RatVec origin;
  RatVec basis0;
  RatVec basis1;
};

// Restrict a network to a 2D slice: a new network on (u, v).
Parameter slice_network(const Parameter& p, const SliceSpec& slice);

// SVG of the canonical complex: facets as layer-colored segments, dashed when
// invisible; ridges as dots. Only input dimension 2.
std::string render_svg(const CanonicalComplex& c, const BreakpointComplex& b);

}  // namespace relupoly
