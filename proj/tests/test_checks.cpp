#include <doctest.h>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <climits>
#include <random>

#include "fixtures.hpp"
#include "relupoly/checks.hpp"

using namespace relupoly;
using fixtures::q;
using fixtures::vec;

namespace {

struct Built {
  CanonicalComplex c;
  BreakpointComplex b;
};

Built analyze(const Parameter& p, const Rat& radius = Rat(8)) {
  Built out{build_complex(p, {p.arch.input_dim(), radius}), {}};
  out.b = breakpoint_complex(out.c);
  return out;
}

// independent finite-difference Jacobian rank oracle
int fd_jacobian_rank(const Parameter& p, const WorkingBox& box, std::size_t samples,
                     std::uint64_t seed) {
  Rng rng = Rng(seed).split(0xfd);
  const std::size_t m = p.arch.output_dim();
  const std::size_t n_params = p.arch.parameter_count();
  const double h = 1e-6;

  std::vector<RatVec> xs;
  for (std::size_t s = 0; s < samples; ++s) {
    for (int attempt = 0; attempt < 100; ++attempt) {
      RatVec x = rng.rational_vector(p.arch.input_dim(), box.radius);
      auto t = eval_trace(p, x);
      bool ok = true;
      for (const auto& z : t.pre)
        for (const auto& v : z)
          if (std::abs(rat_to_double(v)) < 1e-5) ok = false;
      if (ok) {
        xs.push_back(x);
        break;
      }
    }
  }
  REQUIRE(xs.size() == samples);

  auto eval_all = [&](const Parameter& pp) {
    std::vector<double> out;
    for (const auto& x : xs)
      for (const auto& v : eval(pp, x)) out.push_back(rat_to_double(v));
    return out;
  };

  Eigen::MatrixXd jac(samples * m, n_params);
  std::size_t col = 0;
  Rat hr = parse_rational("1/1000000");
  for (std::size_t l = 1; l <= p.arch.depth() + 1; ++l) {
    for (std::size_t i = 0; i < p.arch.width(l); ++i)
      for (std::size_t j = 0; j < p.arch.width(l - 1); ++j) {
        Parameter pp = p;
        pp.layer(l).W(i, j) += hr;
        auto plus = eval_all(pp);
        pp.layer(l).W(i, j) -= 2 * hr;
        auto minus = eval_all(pp);
        for (std::size_t r = 0; r < plus.size(); ++r)
          jac(r, col) = (plus[r] - minus[r]) / (2 * h);
        ++col;
      }
    for (std::size_t i = 0; i < p.arch.width(l); ++i) {
      Parameter pp = p;
      pp.layer(l).b[i] += hr;
      auto plus = eval_all(pp);
      pp.layer(l).b[i] -= 2 * hr;
      auto minus = eval_all(pp);
      for (std::size_t r = 0; r < plus.size(); ++r) jac(r, col) = (plus[r] - minus[r]) / (2 * h);
      ++col;
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac);
  auto sv = svd.singularValues();
  int rank = 0;
  while (rank < sv.size() && sv(rank) >= 1e-5 * sv(0)) ++rank;
  return rank;
}

}  // namespace

TEST_CASE("genericity fails for duplicated first-layer neurons") {
  Parameter p;
  p.arch.widths = {2, 2, 1};
  p.layers.push_back({fixtures::mat({{1, 2}, {1, 2}}), vec({1, 1})});
  p.layers.push_back({fixtures::mat({{1, 1}}), vec({0})});
  p.validate();
  auto a = analyze(p);
  auto v = genericity_check(a.c);
  CHECK(v.status == VerdictStatus::Fail);
}

TEST_CASE("genericity fails for the worked example (condition 1)") {
  auto a = analyze(fixtures::sec6_realization(1));
  auto v = genericity_check(a.c);
  CHECK(v.status == VerdictStatus::Fail);
  // the two second-layer zero sets coincide on the lower-right quadrant
  CHECK(v.notes.find("arrangement") != std::string::npos);
}

TEST_CASE("genericity passes on the transparent two-layer fixture") {
  auto a = analyze(fixtures::fig4b_net());
  auto v = genericity_check(a.c);
  CHECK(v.status == VerdictStatus::Pass);
}

TEST_CASE("supertransversality verdicts") {
  auto bad = analyze(fixtures::fig4c_net());
  auto v = supertransversality_check(bad.c);
  CHECK(v.status == VerdictStatus::Fail);

  Parameter axes;
  axes.arch.widths = {2, 2, 1};
  axes.layers.push_back({fixtures::mat({{1, 0}, {0, 1}}), vec({0, 0})});
  axes.layers.push_back({fixtures::mat({{1, 2}}), vec({0})});
  axes.validate();
  CHECK(supertransversality_check(analyze(axes).c).status == VerdictStatus::Pass);
  CHECK(supertransversality_check(analyze(fixtures::fig4b_net()).c).status == VerdictStatus::Pass);
}

TEST_CASE("cancellation-freeness verdicts") {
  // two exactly-cancelling coincident neurons: zero weight without a dead layer
  Parameter p;
  p.arch.widths = {2, 2, 1};
  p.layers.push_back({fixtures::mat({{1, 0}, {1, 0}}), vec({0, 0})});
  p.layers.push_back({fixtures::mat({{3, -3}}), vec({0})});
  p.validate();
  auto a = analyze(p);
  auto v = cancellation_free_check(a.c, a.b);
  CHECK(v.status == VerdictStatus::Fail);
  CHECK(v.notes.find("without a fully inactive layer") != std::string::npos);

  // dead-layer zero weights are accepted
  auto ok = analyze(fixtures::fig1b_net());
  CHECK(cancellation_free_check(ok.c, ok.b).status == VerdictStatus::Pass);
  auto ok2 = analyze(fixtures::fig4b_net());
  CHECK(cancellation_free_check(ok2.c, ok2.b).status == VerdictStatus::Pass);
}

TEST_CASE("cTPIC verdicts") {
  auto good = analyze(fixtures::fig4b_net());
  auto res = ctpic_check(good.c, good.b, good.c.box.polyhedron());
  CHECK(res.verdict.status == VerdictStatus::Pass);
  CHECK(res.chosen.size() == 4);

  // single hidden layer: vacuous
  Parameter one;
  one.arch.widths = {2, 3, 1};
  one.layers.push_back({fixtures::mat({{1, 0}, {0, 1}, {1, 1}}), vec({0, 0, -1})});
  one.layers.push_back({fixtures::mat({{1, 2, 3}}), vec({0})});
  one.validate();
  auto a1 = analyze(one);
  CHECK(ctpic_check(a1.c, a1.b, a1.c.box.polyhedron()).verdict.status == VerdictStatus::Pass);

  // translate a second-layer zero set so it misses one first-layer line inside
  // the box: the missing pair is the witness
  auto miss = fixtures::fig4b_net();
  miss.layers[1].W(1, 1) = q(1, 100);  // z = a1 + a2/100 - 4 misses the y-axis
  miss.layers[1].b[1] = q(-4);
  auto am = analyze(miss);
  auto rm = ctpic_check(am.c, am.b, am.c.box.polyhedron());
  CHECK(rm.verdict.status == VerdictStatus::Fail);
  // the translated zero set now misses the y-axis, which is neuron (1,0)
  bool mentions_pair = false;
  for (const auto& w : rm.verdict.witnesses)
    if (w.find("(1,0) x (2,1)") != std::string::npos) mentions_pair = true;
  CHECK(mentions_pair);
}

TEST_CASE("identifiability verdict aggregates the premises") {
  auto good = analyze(fixtures::fig4b_net());
  auto rep = identifiability_verdict(good.c, good.b);
  CHECK(rep.identifiable_among_generic);
  CHECK(rep.polytope == "working box");

  auto sec6 = analyze(fixtures::sec6_realization(1));
  auto bad = identifiability_verdict(sec6.c, sec6.b);
  CHECK_FALSE(bad.identifiable_among_generic);
  bool nongeneric = false;
  for (const auto& f : bad.failed_premises) nongeneric |= f == "genericity";
  CHECK(nongeneric);
}

TEST_CASE("functional dimension of a one-hidden-layer net") {
  std::mt19937_64 gen(99);
  Architecture arch;
  arch.widths = {2, 2, 1};
  CHECK(arch.expected_functional_dimension() == 7);
  bool tested = false;
  for (int t = 0; t < 5 && !tested; ++t) {
    auto p = fixtures::random_net(arch, gen);
    auto fd = functional_dimension_estimate(p, {2, q(8)}, 12, 7 + t);
    if (fd.rank != 7) continue;  // degenerate random draw
    CHECK(fd_jacobian_rank(p, {2, q(8)}, 12, 7 + t) == 7);
    tested = true;
  }
  CHECK(tested);
}

TEST_CASE("functional dimension drops for a duplicated hidden neuron") {
  std::mt19937_64 gen(5);
  Architecture arch;
  arch.widths = {2, 3, 1};
  auto p = fixtures::random_net(arch, gen);
  for (std::size_t j = 0; j < 2; ++j) p.layers[0].W(1, j) = p.layers[0].W(0, j);
  p.layers[0].b[1] = p.layers[0].b[0];
  auto fd = functional_dimension_estimate(p, {2, q(8)}, 16, 3);
  CHECK(fd.rank < static_cast<int>(arch.expected_functional_dimension()));
}

TEST_CASE("functional dimension is invariant under trivial symmetries and reseeding") {
  std::mt19937_64 gen(13);
  Architecture arch;
  arch.widths = {2, 2, 1};
  auto p = fixtures::random_net(arch, gen);
  auto base = functional_dimension_estimate(p, {2, q(8)}, 12, 1);
  auto scaled = scale_neuron(p, 1, 0, q(5, 3));
  CHECK(functional_dimension_estimate(scaled, {2, q(8)}, 12, 1).rank == base.rank);
  for (std::uint64_t s = 2; s < 6; ++s)
    CHECK(functional_dimension_estimate(p, {2, q(8)}, 12, s).rank == base.rank);
}

TEST_CASE("rank kernel dimension is at least the number of hidden neurons") {
  std::mt19937_64 gen(21);
  for (auto widths : {std::vector<std::size_t>{2, 2, 1}, {2, 3, 2}, {2, 2, 2, 1}}) {
    Architecture arch;
    arch.widths = widths;
    auto p = fixtures::random_net(arch, gen);
    auto fd = functional_dimension_estimate(p, {2, q(8)}, 16, 3);
    CHECK(static_cast<std::size_t>(fd.rank) + arch.hidden_neuron_count() <=
          arch.parameter_count());
  }
}

TEST_CASE("min_width_lower_bound") {
  // single neuron on x = 0 inside the square, output column (1,0)
  Parameter p;
  p.arch.widths = {2, 1, 2};
  p.layers.push_back({fixtures::mat({{1, 0}}), vec({0})});
  p.layers.push_back({fixtures::mat({{1}, {0}}), vec({0, 0})});
  p.validate();
  Polyhedron box = Polyhedron::box(2, q(1));

  // A = 0: the alpha = 0 term already gives rank 0, bound n
  CHECK(min_width_lower_bound(p, RatMat::zero(2, 2), box) == 1);

  // A of rank 2 that stays rank 2 under every correction: bound n + 2
  RatMat a = fixtures::mat({{0, 1}, {1, 0}});
  CHECK(min_width_lower_bound(p, a, box) == 3);

  // exhaustive-scan cross-check on a 2-neuron net with orthogonal corrections
  Parameter p2;
  p2.arch.widths = {2, 2, 2};
  p2.layers.push_back({fixtures::mat({{1, 0}, {0, 1}}), vec({0, 0})});
  p2.layers.push_back({fixtures::mat({{1, 0}, {0, 1}}), vec({0, 0})});
  p2.validate();
  RatMat g = fixtures::mat({{3, 1}, {1, 2}});
  int got = min_width_lower_bound(p2, g, box);
  int best = INT_MAX;
  for (int a0 : {-1, 0, 1})
    for (int a1 : {-1, 0, 1}) {
      RatMat sum = g;
      sum(0, 0) += a0;
      sum(1, 1) += a1;
      best = std::min(best, exact_rank(sum));
    }
  CHECK(got == 2 + best);

  // hyperplane outside the polytope is rejected
  Parameter far = p;
  far.layers[0].b[0] = q(10);
  CHECK_THROWS_AS(min_width_lower_bound(far, RatMat::zero(2, 2), box), PreconditionViolation);
}

TEST_CASE("verdict rendering") {
  Verdict v;
  v.property = "demo";
  v.status = VerdictStatus::ProbabilisticPass;
  v.notes = "sampled";
  CHECK(verdict_to_string(v) == "demo: probabilistic-pass (sampled)");
}
