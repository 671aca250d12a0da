#pragma once

#include <string>

#include "relupoly/checks.hpp"
#include "relupoly/construct.hpp"
#include "relupoly/depgraph.hpp"

namespace relupoly {

struct ReportOptions {
  Rat box_radius = Rat(8);
  std::uint64_t seed = 0;
  std::size_t funcdim_samples = 48;
  bool with_timings = false;  // off by default so reports are byte-identical
  const std::vector<Polyhedron>* extra_polytopes = nullptr;
};

std::uint64_t input_digest(const Parameter& p);

// Aggregate analysis: digest, complex statistics, weight table summary,
// verdicts, dependency-graph summary, depth certificate, functional dimension.
std::string analysis_report_json(const Parameter& p, const ReportOptions& opt);

std::string checks_report_json(const Parameter& p, const ReportOptions& opt, bool* all_passed);

}  // namespace relupoly
