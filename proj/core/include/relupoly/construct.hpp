#pragma once

#include <optional>
#include <string>
#include <vector>

#include "relupoly/checks.hpp"
#include "relupoly/rng.hpp"

namespace relupoly {

class ConstructionFailure : public std::runtime_error {
 public:
  explicit ConstructionFailure(const std::string& what) : std::runtime_error(what) {}
};

// X given as a union of affine images of polytopes (never materialized):
// X = union of map(piece).
struct ImagePiece {
  Polyhedron domain;
  AffinePiece map;
};

struct SlabLayer {
  RatMat W;
  RatVec b;
  Polyhedron target;                   // the polytope P the slab lives on
  std::vector<Hyperplane> hyperplanes; // ordered H_1 .. H_n
  std::vector<std::vector<std::size_t>> region_active;  // S(R_0) .. S(R_n), 0-based
  std::vector<Polyhedron> regions;     // R_0 .. R_n inside P
  Rat eps_used;
};

// Oriented slab layer on P, eps-close to H, transparent on X, with pairwise
// hyperplane intersections outside X. Retries with eps/2 up to 20 times.
SlabLayer make_slab_layer(const std::vector<ImagePiece>& x, const Polyhedron& p,
                          const Hyperplane& h, std::size_t n, const Rat& eps, Rng& rng);

struct PivotResult {
  Hyperplane pivot;        // H' in the image space
  Polyhedron region;       // R = R_{n-1}, the fully active slab region
  Polyhedron image;        // f(R), the next target polytope Q
  AffinePiece region_map;  // affine map of the slab on R
};

// Lemma-21 pivot: the affine hull of the images of points on the slab
// hyperplanes; certified transverse to every slab hyperplane with a connected
// pullback in P.
PivotResult pivot_hyperplane(const SlabLayer& slab, const Polyhedron& p);

struct ConstructionStage {
  std::size_t layer = 0;
  Polyhedron target;            // polytope the slab was built on (image space)
  std::optional<Hyperplane> pivot;
  Rat eps_used;
  std::vector<std::vector<std::size_t>> region_active;
};

struct ConstructionTrail {
  std::vector<ConstructionStage> stages;
  std::uint64_t seed = 0;
  std::size_t output_resamples = 0;
  std::size_t stage_rebuilds = 0;
  std::vector<Polyhedron> pullback_polytopes;  // in input space, for checks
};

struct IdentifiableBuild {
  Parameter param;
  ConstructionTrail trail;
};

// Thm-24 induction: a chain of slab layers pulled along pivots, then a random
// output layer resampled until every verdict passes on the box.
IdentifiableBuild build_identifiable(const Architecture& arch, const WorkingBox& box,
                                     const Rat& eps, std::uint64_t seed);

struct LinearBlockHandle {
  std::vector<std::size_t> neurons;  // the two always-active neurons of layer L
  RatMat w_lin;                      // 2 x (n_{L-1}+1), rows are (weights | bias)
  RatMat v_lin;                      // n_{L+1} x 2 output block
};

struct MinimalNonidentifiableBuild {
  Parameter param;
  LinearBlockHandle handle;
  ConstructionTrail trail;
};

// Identifiable prefix + a bending slab + a strictly positive rank-2 linear
// block: an open-set family with a GL2 fiber.
MinimalNonidentifiableBuild build_minimal_nonidentifiable(const Architecture& arch,
                                                          const WorkingBox& box,
                                                          std::uint64_t seed);

// Moves along the GL2 fiber: W' = M W_lin, V' = V_lin M^{-1}; rejected when
// M W_lin loses strict positivity or M is singular.
Parameter gl2_fiber_walk(const Parameter& p, const LinearBlockHandle& handle, const RatMat& m);

struct CompressedLayer {
  Parameter param;
  std::size_t visible = 0;  // number of visible neurons (one per hyperplane)
};

// Appendix-B compression: one neuron per visible hyperplane, the leftover
// affine map realized by neurons whose hyperplanes avoid P.
CompressedLayer compress_one_layer(const Parameter& p, const Polyhedron& poly);

// Appendix-B signature: alpha with linear(f_theta - f_eta) =
// sum alpha_i col_i row_i; errors when the weights along a hyperplane differ.
std::vector<int> affine_difference_signature(const Parameter& theta, const Parameter& eta,
                                             const Polyhedron& poly);

std::string trail_to_json(const ConstructionTrail& t);

}  // namespace relupoly
