#include <doctest.h>

#include "fixtures.hpp"
#include "relupoly/construct.hpp"
#include "relupoly/fiber.hpp"

using namespace relupoly;
using fixtures::q;
using fixtures::vec;

namespace {

DependencyGraph chain_graph(std::size_t n) {
  DependencyGraph g;
  g.vertex_count = n;
  for (std::size_t i = 0; i + 1 < n; ++i) g.edges.push_back({i, i + 1, {}});
  return g;
}

}  // namespace

TEST_CASE("enumerate_configurations counts order-respecting injective maps") {
  // chain of 3 into 3 width-1 layers: exactly one map
  Architecture three;
  three.widths = {2, 1, 1, 1, 1};
  auto a = enumerate_configurations(chain_graph(3), three, 100);
  CHECK(a.configurations.size() == 1);
  CHECK_FALSE(a.truncated);

  // chain of 3 into 2 layers: none
  Architecture two;
  two.widths = {2, 1, 1, 1};
  CHECK(enumerate_configurations(chain_graph(3), two, 100).configurations.empty());

  // 2 incomparable candidates into 2 width-1 layers: two maps
  DependencyGraph free2;
  free2.vertex_count = 2;
  auto b = enumerate_configurations(free2, two, 100);
  CHECK(b.configurations.size() == 2);

  // cap truncation
  auto t = enumerate_configurations(free2, two, 1);
  CHECK(t.configurations.size() == 1);
  CHECK(t.truncated);
}

TEST_CASE("constraint counts match facets x (d + 1 + m) plus one nonzero each") {
  auto c = build_complex(fixtures::fig4b_net(), {2, q(8)});
  auto b = breakpoint_complex(c);
  auto data = ground_truth_fiber_data(c, b);
  auto sys = emit_configuration_system(data);
  const std::size_t d = 2, m = 1;
  CHECK(sys.constraints.size() == data.facets.size() * (d + 1 + m + 1));
  std::size_t nonzero = 0, alignment = 0, weight = 0, offset = 0;
  for (const auto& pc : sys.constraints) {
    if (pc.type == "nonzero") ++nonzero;
    if (pc.type == "alignment") ++alignment;
    if (pc.type == "weight") ++weight;
    if (pc.type == "offset") ++offset;
  }
  CHECK(nonzero == data.facets.size());
  CHECK(alignment == data.facets.size() * d);
  CHECK(offset == data.facets.size());
  CHECK(weight == data.facets.size() * m);
}

TEST_CASE("emission is deterministic") {
  auto c = build_complex(fixtures::fig4b_net(), {2, q(8)});
  auto b = breakpoint_complex(c);
  auto data = ground_truth_fiber_data(c, b);
  CHECK(system_to_json(emit_configuration_system(data)) ==
        system_to_json(emit_configuration_system(data)));
}

TEST_CASE("the parameter satisfies its own ground-truth system") {
  for (auto net : {fixtures::fig4b_net(), fixtures::fig1b_net()}) {
    auto c = build_complex(net, {2, q(8)});
    auto b = breakpoint_complex(c);
    auto data = ground_truth_fiber_data(c, b);
    CHECK(verify_membership(net, data));

    // a one-coordinate perturbation violates an alignment row
    auto perturbed = net;
    perturbed.layers[0].W(0, 0) += q(1, 7);
    CHECK_FALSE(verify_membership(perturbed, data));
  }
}

TEST_CASE("membership is invariant along the GL2 fiber walk") {
  Architecture arch;
  arch.widths = {2, 2, 4, 2};
  auto built = build_minimal_nonidentifiable(arch, {2, q(8)}, 4);
  auto c = build_complex(built.param, {2, q(8)});
  auto b = breakpoint_complex(c);
  auto data = ground_truth_fiber_data(c, b);
  REQUIRE(verify_membership(built.param, data));

  RatMat shear = RatMat::identity(2);
  shear(1, 0) = q(1, 16);
  auto walked = gl2_fiber_walk(built.param, built.handle, shear);
  // the walk moves only the invisible block parameters
  CHECK(verify_membership(walked, data));
}

TEST_CASE("assignment violating an edge order is rejected before emission") {
  auto c = build_complex(fixtures::fig4b_net(), {2, q(8)});
  auto b = breakpoint_complex(c);
  auto part = candidate_bent_hyperplanes(c, b);
  auto g = dependency_graph(c, b, part);
  REQUIRE(!g.edges.empty());
  CandidateAssignment bad;
  // everything into layer 1: any edge breaks
  for (std::size_t i = 0; i < part.classes.size(); ++i) bad.neuron_of_candidate.push_back({1, i});
  Architecture wide;
  wide.widths = {2, 4, 4, 1};
  CHECK_THROWS_AS(fiber_data_for_assignment(c, b, part, g, wide, bad), PreconditionViolation);
}

TEST_CASE("text rendering lists the constraints") {
  auto c = build_complex(fixtures::fig1b_net(), {2, q(8)});
  auto b = breakpoint_complex(c);
  auto data = ground_truth_fiber_data(c, b);
  auto text = system_to_text(emit_configuration_system(data));
  CHECK(text.find("alignment") != std::string::npos);
  CHECK(text.find("mu[") != std::string::npos);
  CHECK(text.find("!= 0") != std::string::npos);
}
