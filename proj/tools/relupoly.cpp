#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "relupoly/construct.hpp"
#include "relupoly/fiber.hpp"
#include "relupoly/render.hpp"
#include "relupoly/report.hpp"

using namespace relupoly;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerdictFail = 1;
constexpr int kExitInputError = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// atomic write: temp file in the same directory, then rename
void write_file(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw InvalidInput("cannot write " + tmp);
    out << content;
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw InvalidInput("cannot rename into " + path);
}

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty())
    std::cout << content << (content.empty() || content.back() == '\n' ? "" : "\n");
  else
    write_file(out_path, content);
}

Parameter load_net(const std::string& path) { return parse_network_json(read_file(path)); }

RatVec parse_point(const std::string& text) {
  RatVec x;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) x.push_back(parse_rational(tok));
  return x;
}

struct Common {
  std::string net_path;
  std::string out_path;
  std::string box = "8";
  std::uint64_t seed = 0;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact polyhedral analysis of ReLU networks"};
  app.require_subcommand(1);

  auto* cmd_eval = app.add_subcommand("eval", "evaluate the network at a rational point");
  Common ev;
  std::string point;
  cmd_eval->add_option("net", ev.net_path, "network JSON")->required();
  cmd_eval->add_option("--x", point, "comma-separated rational input")->required();
  cmd_eval->add_option("--out", ev.out_path, "output file");

  auto* cmd_complex = app.add_subcommand("complex", "canonical polyhedral complex dump");
  Common cx;
  cmd_complex->add_option("net", cx.net_path)->required();
  cmd_complex->add_option("--box", cx.box, "working box radius");
  cmd_complex->add_option("--out", cx.out_path);

  auto* cmd_weights = app.add_subcommand("weights", "tropical weight table");
  Common wt;
  cmd_weights->add_option("net", wt.net_path)->required();
  cmd_weights->add_option("--box", wt.box);
  cmd_weights->add_option("--out", wt.out_path);

  auto* cmd_break = app.add_subcommand("breakpoints", "breakpoint complex summary");
  Common bp;
  cmd_break->add_option("net", bp.net_path)->required();
  cmd_break->add_option("--box", bp.box);
  cmd_break->add_option("--out", bp.out_path);

  auto* cmd_dep = app.add_subcommand("depgraph", "candidate bent hyperplanes and dependency graph");
  Common dg;
  std::string dg_format = "dot";
  cmd_dep->add_option("net", dg.net_path)->required();
  cmd_dep->add_option("--box", dg.box);
  cmd_dep->add_option("--format", dg_format, "dot|json");
  cmd_dep->add_option("--out", dg.out_path);

  auto* cmd_check = app.add_subcommand("check", "parameter-class verdicts");
  Common ck;
  bool strict = false, check_all = true;
  cmd_check->add_option("net", ck.net_path)->required();
  cmd_check->add_option("--box", ck.box);
  cmd_check->add_option("--seed", ck.seed);
  cmd_check->add_flag("--all", check_all, "run every verdict (default)");
  cmd_check->add_flag("--strict", strict, "exit 1 when a verdict fails");
  cmd_check->add_option("--out", ck.out_path);

  auto* cmd_construct = app.add_subcommand("construct", "parameter constructions");
  std::string kind, arch_text, trail_path, construct_in;
  Common cs;
  std::string eps_text = "1/10";
  cmd_construct->add_option("kind", kind, "identifiable | minimal-nonidentifiable | compress")
      ->required();
  cmd_construct->add_option("--arch", arch_text, "architecture, e.g. 2,2,2,1");
  cmd_construct->add_option("--net", construct_in, "input network (compress)");
  cmd_construct->add_option("--box", cs.box);
  cmd_construct->add_option("--seed", cs.seed);
  cmd_construct->add_option("--eps", eps_text, "slab closeness parameter");
  cmd_construct->add_option("--out", cs.out_path, "output network JSON");
  cmd_construct->add_option("--trail", trail_path, "construction trail JSON");

  auto* cmd_fd = app.add_subcommand("funcdim", "numeric functional-dimension estimate");
  Common fd;
  std::size_t samples = 48;
  cmd_fd->add_option("net", fd.net_path)->required();
  cmd_fd->add_option("--box", fd.box);
  cmd_fd->add_option("--seed", fd.seed);
  cmd_fd->add_option("--samples", samples);
  cmd_fd->add_option("--out", fd.out_path);

  auto* cmd_fiber = app.add_subcommand("fiber", "configuration-variety emission and membership");
  Common fb;
  std::string fiber_format = "json", candidate_path;
  std::size_t cap = 64;
  bool enumerate_only = false;
  cmd_fiber->add_option("net", fb.net_path)->required();
  cmd_fiber->add_option("--box", fb.box);
  cmd_fiber->add_option("--format", fiber_format, "json|txt");
  cmd_fiber->add_option("--verify", candidate_path, "check membership of another parameter");
  cmd_fiber->add_flag("--enumerate", enumerate_only, "count order-respecting configurations");
  cmd_fiber->add_option("--cap", cap, "enumeration cap");
  cmd_fiber->add_option("--out", fb.out_path);

  auto* cmd_render = app.add_subcommand("render", "SVG of the complex (input dimension 2)");
  Common rd;
  std::string slice_text;
  cmd_render->add_option("net", rd.net_path)->required();
  cmd_render->add_option("--box", rd.box);
  cmd_render->add_option("--slice", slice_text,
                         "origin;u;v for higher-dimensional nets, e.g. 0,0,0;1,0,0;0,1,0");
  cmd_render->add_option("--out", rd.out_path);

  auto* cmd_report = app.add_subcommand("report", "aggregate analysis report");
  Common rp;
  std::size_t rp_samples = 48;
  bool with_timings = false;
  cmd_report->add_option("net", rp.net_path)->required();
  cmd_report->add_option("--box", rp.box);
  cmd_report->add_option("--seed", rp.seed);
  cmd_report->add_option("--samples", rp_samples);
  cmd_report->add_flag("--timings", with_timings, "include wall-clock timings (non-reproducible)");
  cmd_report->add_option("--out", rp.out_path);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cmd_eval) {
      auto p = load_net(ev.net_path);
      RatVec x = parse_point(point);
      RatVec y = eval(p, x);
      std::string s;
      for (std::size_t i = 0; i < y.size(); ++i) s += (i ? "," : "") + rat_to_string(y[i]);
      emit(ev.out_path, s);
      return kExitOk;
    }
    if (*cmd_complex) {
      auto p = load_net(cx.net_path);
      auto c = build_complex(p, {p.arch.input_dim(), parse_rational(cx.box)});
      emit(cx.out_path, complex_to_json(c));
      return kExitOk;
    }
    if (*cmd_weights) {
      auto p = load_net(wt.net_path);
      auto c = build_complex(p, {p.arch.input_dim(), parse_rational(wt.box)});
      auto b = breakpoint_complex(c);
      emit(wt.out_path, weight_table_json(c, b));
      return kExitOk;
    }
    if (*cmd_break) {
      auto p = load_net(bp.net_path);
      auto c = build_complex(p, {p.arch.input_dim(), parse_rational(bp.box)});
      auto b = breakpoint_complex(c);
      nlohmann::json j;
      j["visible_facets"] = b.facets;
      j["ridges"] = b.ridges;
      nlohmann::json hulls = nlohmann::json::array();
      for (auto fi : b.facets) hulls.push_back(c.facets[fi].hull.to_string());
      j["hulls"] = hulls;
      emit(bp.out_path, j.dump(2));
      return kExitOk;
    }
    if (*cmd_dep) {
      auto p = load_net(dg.net_path);
      auto c = build_complex(p, {p.arch.input_dim(), parse_rational(dg.box)});
      auto b = breakpoint_complex(c);
      auto part = candidate_bent_hyperplanes(c, b);
      auto g = dependency_graph(c, b, part);
      if (dg_format == "dot") {
        emit(dg.out_path, depgraph_to_dot(c, part, g));
      } else if (dg_format == "json") {
        nlohmann::json j;
        j["candidates"] = part.classes.size();
        j["ambiguous"] = part.had_ambiguous;
        nlohmann::json edges = nlohmann::json::array();
        for (const auto& e : g.edges)
          edges.push_back({{"from", e.from}, {"to", e.to}, {"ridges", e.witness_ridges}});
        j["edges"] = edges;
        emit(dg.out_path, j.dump(2));
      } else {
        throw InvalidInput("unknown depgraph format: " + dg_format);
      }
      return kExitOk;
    }
    if (*cmd_check) {
      auto p = load_net(ck.net_path);
      ReportOptions opt;
      opt.box_radius = parse_rational(ck.box);
      opt.seed = ck.seed;
      bool all_passed = false;
      emit(ck.out_path, checks_report_json(p, opt, &all_passed));
      return strict && !all_passed ? kExitVerdictFail : kExitOk;
    }
    if (*cmd_construct) {
      Rat radius = parse_rational(cs.box);
      if (kind == "identifiable") {
        Architecture arch = Architecture::parse(arch_text);
        WorkingBox box{arch.input_dim(), radius};
        auto built = build_identifiable(arch, box, parse_rational(eps_text), cs.seed);
        emit(cs.out_path, emit_network_json(built.param));
        if (!trail_path.empty()) write_file(trail_path, trail_to_json(built.trail));
      } else if (kind == "minimal-nonidentifiable") {
        Architecture arch = Architecture::parse(arch_text);
        WorkingBox box{arch.input_dim(), radius};
        auto built = build_minimal_nonidentifiable(arch, box, cs.seed);
        emit(cs.out_path, emit_network_json(built.param));
        if (!trail_path.empty()) write_file(trail_path, trail_to_json(built.trail));
      } else if (kind == "compress") {
        if (construct_in.empty()) throw InvalidInput("compress needs --net");
        auto p = load_net(construct_in);
        auto res = compress_one_layer(p, Polyhedron::box(p.arch.input_dim(), radius));
        emit(cs.out_path, emit_network_json(res.param));
      } else {
        throw InvalidInput("unknown construction kind: " + kind);
      }
      return kExitOk;
    }
    if (*cmd_fd) {
      auto p = load_net(fd.net_path);
      auto res = functional_dimension_estimate(p, {p.arch.input_dim(), parse_rational(fd.box)},
                                               samples, fd.seed);
      nlohmann::json j;
      j["rank"] = res.rank;
      j["expected"] = p.arch.expected_functional_dimension();
      j["samples"] = res.samples;
      j["cutoff"] = res.cutoff;
      nlohmann::json sv = nlohmann::json::array();
      for (double v : res.singular_values) sv.push_back(v);
      j["singular_values"] = sv;
      emit(fd.out_path, j.dump(2));
      return kExitOk;
    }
    if (*cmd_fiber) {
      auto p = load_net(fb.net_path);
      auto c = build_complex(p, {p.arch.input_dim(), parse_rational(fb.box)});
      auto b = breakpoint_complex(c);
      if (enumerate_only) {
        auto part = candidate_bent_hyperplanes(c, b);
        auto g = dependency_graph(c, b, part);
        auto list = enumerate_configurations(g, p.arch, cap);
        nlohmann::json j;
        j["configurations"] = list.configurations.size();
        j["truncated"] = list.truncated;
        emit(fb.out_path, j.dump(2));
        return kExitOk;
      }
      auto data = ground_truth_fiber_data(c, b);
      if (!candidate_path.empty()) {
        auto eta = load_net(candidate_path);
        nlohmann::json j;
        j["member"] = verify_membership(eta, data);
        emit(fb.out_path, j.dump(2));
        return kExitOk;
      }
      auto sys = emit_configuration_system(data);
      emit(fb.out_path, fiber_format == "txt" ? system_to_text(sys) : system_to_json(sys));
      return kExitOk;
    }
    if (*cmd_render) {
      auto p = load_net(rd.net_path);
      if (p.arch.input_dim() != 2) {
        if (slice_text.empty())
          throw InvalidInput("input dimension above 2: supply --slice origin;u;v");
        std::stringstream ss(slice_text);
        std::string part;
        std::vector<RatVec> parts;
        while (std::getline(ss, part, ';')) parts.push_back(parse_point(part));
        if (parts.size() != 3) throw InvalidInput("slice needs origin;u;v");
        p = slice_network(p, {parts[0], parts[1], parts[2]});
      }
      auto c = build_complex(p, {2, parse_rational(rd.box)});
      auto b = breakpoint_complex(c);
      emit(rd.out_path, render_svg(c, b));
      return kExitOk;
    }
    if (*cmd_report) {
      auto p = load_net(rp.net_path);
      ReportOptions opt;
      opt.box_radius = parse_rational(rp.box);
      opt.seed = rp.seed;
      opt.funcdim_samples = rp_samples;
      opt.with_timings = with_timings;
      emit(rp.out_path, analysis_report_json(p, opt));
      return kExitOk;
    }
  } catch (const InvalidInput& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const PreconditionViolation& e) {
    std::cerr << "precondition violated: " << e.what() << "\n";
    return kExitInputError;
  } catch (const ConstructionFailure& e) {
    std::cerr << "construction failed: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitOk;
}
