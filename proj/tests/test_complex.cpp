#include <doctest.h>

#include <set>
#include <string>

#include "fixtures.hpp"
#include "relupoly/complex.hpp"

using namespace relupoly;
using fixtures::q;
using fixtures::vec;

namespace {

// Independent oracle: enumerate all {+,-} sign assignments over every hidden
// neuron, build the constraint system directly from the pattern, and keep the
// full-dimensional feasible ones.
std::set<std::string> brute_force_region_signs(const Parameter& p, const Rat& radius) {
  const std::size_t L = p.arch.depth();
  std::size_t total = p.arch.hidden_neuron_count();
  std::set<std::string> out;
  for (std::size_t mask = 0; mask < (std::size_t{1} << total); ++mask) {
    SignPattern signs;
    std::size_t bit = 0;
    for (std::size_t l = 1; l <= L; ++l) {
      LayerSigns ls;
      for (std::size_t j = 0; j < p.arch.width(l); ++j)
        ls.push_back((mask >> bit++) & 1 ? 1 : -1);
      signs.push_back(ls);
    }
    ActiveSets act = active_sets_from_signs(signs);
    Polyhedron poly = Polyhedron::box(p.arch.input_dim(), radius);
    bool consistent = true;
    for (std::size_t l = 1; l <= L && consistent; ++l)
      for (std::size_t j = 0; j < p.arch.width(l) && consistent; ++j) {
        auto e = preactivation_affine(p, act, l, j);
        int want = signs[l - 1][j];
        if (is_zero_vec(e.a)) {
          if (sgn(e.b) != want) consistent = false;
          continue;
        }
        if (want < 0) {
          for (auto& v : e.a) v = -v;
          e.b = -e.b;
        }
        poly.ineqs.push_back(e);
      }
    if (!consistent) continue;
    if (!strictly_feasible_point(poly)) continue;
    out.insert(sign_pattern_to_string(signs));
  }
  return out;
}

std::set<std::string> complex_region_signs(const CanonicalComplex& c) {
  std::set<std::string> out;
  for (const auto& r : c.regions) out.insert(sign_pattern_to_string(r.signs));
  return out;
}

Parameter axes_net() {
  Parameter p;
  p.arch.widths = {2, 2, 1};
  p.layers.push_back({fixtures::mat({{1, 0}, {0, 1}}), vec({0, 0})});
  p.layers.push_back({fixtures::mat({{1, 1}}), vec({0})});
  p.validate();
  return p;
}

}  // namespace

TEST_CASE("coordinate axes net: 4 regions, 4 facets, 1 ridge") {
  auto c = build_complex(axes_net(), {2, q(1)});
  CHECK(c.regions.size() == 4);
  CHECK(c.facets.size() == 4);
  REQUIRE(c.ridges.size() == 1);
  CHECK(c.ridges[0].witness == vec({0, 0}));
  CHECK(c.ridge_facets[0].size() == 4);
  CHECK(c.ridge_regions[0].size() == 4);
  // every facet lies on a single first-layer line and is box-clipped
  for (const auto& f : c.facets) {
    CHECK(f.incident.size() == 1);
    CHECK(f.box_clipped);
  }
  CHECK(c.boundary_warning);
}

TEST_CASE("single-neuron net: 1 facet, 0 ridges") {
  Parameter p;
  p.arch.widths = {2, 1, 1};
  p.layers.push_back({fixtures::mat({{1, 0}}), vec({0})});
  p.layers.push_back({fixtures::mat({{1}}), vec({0})});
  p.validate();
  auto c = build_complex(p, {2, q(1)});
  CHECK(c.regions.size() == 2);
  CHECK(c.facets.size() == 1);
  CHECK(c.ridges.empty());
}

TEST_CASE("fig-1b style net has 7 regions and a three-piece bent hyperplane") {
  auto c = build_complex(fixtures::fig1b_net(), {2, q(8)});
  CHECK(c.regions.size() == 7);
  CHECK(complex_region_signs(c) == brute_force_region_signs(fixtures::fig1b_net(), q(8)));

  auto red = bent_hyperplane_facets(c, {2, 0});
  CHECK(red.size() == 3);
  // first-layer pieces are flat: every facet of neuron (1,0) shares one hull
  auto black = bent_hyperplane_facets(c, {1, 0});
  REQUIRE(!black.empty());
  for (auto i : black) CHECK(c.facets[i].hull == c.facets[black[0]].hull);
}

TEST_CASE("zero-row neuron has an empty bent hyperplane") {
  auto p = fixtures::fig1b_net();
  p.layers[0].W(1, 0) = 0;
  p.layers[0].W(1, 1) = 0;
  p.layers[0].b[1] = q(3);  // constant positive preactivation
  auto c = build_complex(p, {2, q(8)});
  CHECK(bent_hyperplane_facets(c, {1, 1}).empty());
}

TEST_CASE("worked-example realizations match the brute-force oracle") {
  for (int k = 1; k <= 3; ++k) {
    auto p = fixtures::sec6_realization(k);
    auto c = build_complex(p, {2, q(5)});
    auto oracle = brute_force_region_signs(p, q(5));
    CHECK(complex_region_signs(c) == oracle);
    CHECK(c.regions.size() == oracle.size());
  }
  // frozen from the oracle: realization 1 in box radius 5
  auto c1 = build_complex(fixtures::sec6_realization(1), {2, q(5)});
  CHECK(c1.regions.size() == brute_force_region_signs(fixtures::sec6_realization(1), q(5)).size());
}

TEST_CASE("random small nets match the brute-force oracle") {
  std::mt19937_64 rng(17);
  Architecture a1;
  a1.widths = {2, 2, 1};
  Architecture a2;
  a2.widths = {2, 2, 2, 1};
  for (int t = 0; t < 6; ++t) {
    for (const Architecture& arch : {a1, a2}) {
      auto p = fixtures::random_net(arch, rng);
      auto c = build_complex(p, {2, q(4)});
      CHECK(complex_region_signs(c) == brute_force_region_signs(p, q(4)));
    }
  }
}

TEST_CASE("facet adjacency: one sign flip and four-corner ridges on a supertransversal net") {
  auto c = build_complex(fixtures::fig1b_net(), {2, q(8)});
  // supertransversality here: every facet on 1 bent hyperplane, ridge on 2
  for (const auto& f : c.facets) CHECK(f.incident.size() == 1);
  for (std::size_t t = 0; t < c.ridges.size(); ++t) {
    if (c.ridges[t].box_clipped) continue;
    CHECK(c.ridges[t].incident.size() == 2);
    CHECK(c.ridge_regions[t].size() == 4);
    CHECK(c.ridge_facets[t].size() == 4);
  }
  // adjacent regions differ in exactly one neuron's sign
  for (std::size_t i = 0; i < c.facets.size(); ++i) {
    const auto& P = c.regions[c.facet_regions[i][0]];
    const auto& Q = c.regions[c.facet_regions[i][1]];
    int diff = 0;
    for (std::size_t l = 0; l < P.signs.size(); ++l)
      for (std::size_t j = 0; j < P.signs[l].size(); ++j)
        if (P.signs[l][j] != Q.signs[l][j]) ++diff;
    CHECK(diff == 1);
  }
}

TEST_CASE("local_complex restricted to the box is the identity") {
  auto c = build_complex(fixtures::fig1b_net(), {2, q(8)});
  auto lc = local_complex(c, c.box.polyhedron());
  CHECK(lc.regions.size() == c.regions.size());
  CHECK(lc.facets.size() == c.facets.size());
  CHECK(lc.ridges.size() == c.ridges.size());
}

TEST_CASE("local_complex on one region keeps that region and its boundary") {
  auto c = build_complex(axes_net(), {2, q(1)});
  // restrict to the closed positive quadrant region
  std::size_t target = SIZE_MAX;
  for (std::size_t i = 0; i < c.regions.size(); ++i)
    if (c.regions[i].signs[0] == LayerSigns{1, 1}) target = i;
  REQUIRE(target != SIZE_MAX);
  auto lc = local_complex(c, c.regions[target].poly);
  CHECK(lc.regions.size() == 1);
  CHECK(lc.facets.empty());  // boundary facets lose their two-region adjacency
  CHECK(lc.ridges.size() == 1);
}

TEST_CASE("restricting the build domain equals intersecting the complex") {
  auto p = fixtures::fig1b_net();
  Polyhedron half = Polyhedron::box(2, q(8)).with_inequality({vec({1, 0}), q(1)});  // x >= -1
  auto direct = build_complex(p, {2, q(8)}, &half);
  auto c = build_complex(p, {2, q(8)});
  auto lc = local_complex(c, half);
  CHECK(direct.regions.size() == lc.regions.size());
  std::set<std::string> a, b;
  for (const auto& r : direct.regions) a.insert(sign_pattern_to_string(r.signs));
  for (const auto& r : lc.regions) b.insert(sign_pattern_to_string(r.signs));
  CHECK(a == b);
}

TEST_CASE("degenerate constant-zero preactivation is flagged") {
  Parameter p;
  p.arch.widths = {2, 2, 1, 1};
  p.layers.push_back({fixtures::mat({{1, 0}, {0, 1}}), vec({0, 0})});
  p.layers.push_back({fixtures::mat({{0, 0}}), vec({0})});  // identically zero
  p.layers.push_back({fixtures::mat({{1}}), vec({0})});
  p.validate();
  auto c = build_complex(p, {2, q(2)});
  CHECK(c.has_degenerate);
}

TEST_CASE("complex JSON dump carries faces and adjacency") {
  auto c = build_complex(fixtures::fig1b_net(), {2, q(8)});
  auto text = complex_to_json(c);
  CHECK(text.find("\"facets\"") != std::string::npos);
  CHECK(text.find("\"adjacent_regions\"") != std::string::npos);
  CHECK(text.find("\"ridges\"") != std::string::npos);
}
