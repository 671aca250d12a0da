#include "relupoly/report.hpp"

#include <chrono>
#include <cmath>

#include <json.hpp>

namespace relupoly {

std::uint64_t input_digest(const Parameter& p) {
  // FNV-1a over the canonical JSON emission
  std::string text = emit_network_json(p);
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

namespace {

nlohmann::json verdict_json(const Verdict& v) {
  nlohmann::json j;
  j["property"] = v.property;
  j["status"] = v.status == VerdictStatus::Pass              ? "pass"
                : v.status == VerdictStatus::ProbabilisticPass ? "probabilistic-pass"
                                                               : "fail";
  if (!v.notes.empty()) j["notes"] = v.notes;
  if (!v.witness_faces.empty()) j["witness_faces"] = v.witness_faces;
  if (!v.witnesses.empty()) j["witnesses"] = v.witnesses;
  return j;
}

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace

std::string analysis_report_json(const Parameter& p, const ReportOptions& opt) {
  p.validate();
  nlohmann::json j;
  j["input_digest"] = input_digest(p);
  j["architecture"] = p.arch.widths;
  j["seed"] = opt.seed;
  j["box_radius"] = rat_to_string(opt.box_radius);

  double t0 = now_ms();
  WorkingBox box{p.arch.input_dim(), opt.box_radius};
  CanonicalComplex c = build_complex(p, box);
  BreakpointComplex b = breakpoint_complex(c);
  double t_complex = now_ms() - t0;

  j["complex"] = {{"regions", c.regions.size()},
                  {"facets", c.facets.size()},
                  {"ridges", c.ridges.size()},
                  {"lp_calls", c.lp_calls},
                  {"box_truncation_warning", c.boundary_warning},
                  {"degenerate", c.has_degenerate}};

  std::size_t visible = b.facets.size();
  j["weights"] = {{"visible_facets", visible}, {"invisible_facets", c.facets.size() - visible}};

  t0 = now_ms();
  auto rep = identifiability_verdict(c, b, opt.seed, opt.extra_polytopes);
  double t_checks = now_ms() - t0;
  nlohmann::json verdicts;
  verdicts["genericity"] = verdict_json(rep.genericity);
  verdicts["supertransversality"] = verdict_json(rep.supertransversality);
  verdicts["cancellation_free"] = verdict_json(rep.cancellation_free);
  nlohmann::json transparency = nlohmann::json::array();
  for (const auto& t : rep.transparency) transparency.push_back(verdict_json(t));
  verdicts["transparency"] = transparency;
  verdicts["lra"] = verdict_json(rep.lra);
  verdicts["ctpic"] = verdict_json(rep.ctpic);
  j["verdicts"] = verdicts;
  j["identifiable_among_generic"] = rep.identifiable_among_generic;
  if (rep.identifiable_among_generic) j["identifiability_polytope"] = rep.polytope;
  if (!rep.failed_premises.empty()) j["failed_premises"] = rep.failed_premises;

  t0 = now_ms();
  auto part = candidate_bent_hyperplanes(c, b);
  auto g = dependency_graph(c, b, part);
  double t_graph = now_ms() - t0;
  nlohmann::json graph;
  graph["candidates"] = part.classes.size();
  graph["edges"] = g.edges.size();
  graph["ambiguous"] = part.had_ambiguous;
  nlohmann::json attribution = nlohmann::json::array();
  for (std::size_t v = 0; v < part.classes.size(); ++v) {
    nlohmann::json a;
    a["candidate"] = v;
    a["facets"] = part.classes[v].size();
    if (auto n = part.attribution(c, v))
      a["neuron"] = {{"layer", n->layer}, {"index", n->neuron}};
    attribution.push_back(a);
  }
  graph["attribution"] = attribution;
  j["dependency_graph"] = graph;

  nlohmann::json depth;
  if (part.had_ambiguous) {
    depth["status"] = "skipped: attribution ambiguous for a non-generic input";
  } else {
    auto chain = longest_chain(g);
    depth["longest_chain"] = chain.size();
    auto own = depth_certificate(g, p.arch.depth());
    depth["accepts_own_depth"] = own.accepted;
    if (p.arch.depth() >= 2) {
      auto shallower = depth_certificate(g, p.arch.depth() - 1);
      depth["rejects_depth_minus_one"] = !shallower.accepted;
    }
  }
  j["depth_certificate"] = depth;

  t0 = now_ms();
  auto fd = functional_dimension_estimate(p, box, opt.funcdim_samples, opt.seed);
  double t_fd = now_ms() - t0;
  nlohmann::json fdj;
  fdj["rank"] = fd.rank;
  fdj["expected"] = p.arch.expected_functional_dimension();
  fdj["samples"] = fd.samples;
  fdj["cutoff"] = fd.cutoff;
  fdj["gap"] = std::isfinite(fd.gap) ? fd.gap : -1.0;
  nlohmann::json sv = nlohmann::json::array();
  for (double v : fd.singular_values) sv.push_back(v);
  fdj["singular_values"] = sv;
  j["functional_dimension"] = fdj;

  if (opt.with_timings)
    j["timings_ms"] = {{"complex", t_complex},
                       {"checks", t_checks},
                       {"dependency_graph", t_graph},
                       {"functional_dimension", t_fd}};
  else
    j["timings_ms"] = nullptr;  // stable placeholder; enable with --timings

  return j.dump(2);
}

std::string checks_report_json(const Parameter& p, const ReportOptions& opt, bool* all_passed) {
  p.validate();
  WorkingBox box{p.arch.input_dim(), opt.box_radius};
  CanonicalComplex c = build_complex(p, box);
  BreakpointComplex b = breakpoint_complex(c);
  auto rep = identifiability_verdict(c, b, opt.seed, opt.extra_polytopes);

  nlohmann::json j;
  j["input_digest"] = input_digest(p);
  j["seed"] = opt.seed;
  j["box_radius"] = rat_to_string(opt.box_radius);
  j["verdicts"] = {{"genericity", verdict_json(rep.genericity)},
                   {"supertransversality", verdict_json(rep.supertransversality)},
                   {"cancellation_free", verdict_json(rep.cancellation_free)},
                   {"lra", verdict_json(rep.lra)},
                   {"ctpic", verdict_json(rep.ctpic)}};
  nlohmann::json transparency = nlohmann::json::array();
  bool transparent_ok = true;
  for (const auto& t : rep.transparency) {
    transparency.push_back(verdict_json(t));
    transparent_ok = transparent_ok && t.passed();
  }
  j["verdicts"]["transparency"] = transparency;
  j["identifiable_among_generic"] = rep.identifiable_among_generic;
  if (rep.identifiable_among_generic)
    j["identifiability_polytope"] = rep.polytope;
  else
    j["failed_premises"] = rep.failed_premises;

  if (all_passed)
    *all_passed = rep.genericity.passed() && rep.supertransversality.passed() &&
                  rep.cancellation_free.passed() && transparent_ok && rep.lra.passed() &&
                  rep.ctpic.passed() && rep.identifiable_among_generic;
  return j.dump(2);
}

}  // namespace relupoly
