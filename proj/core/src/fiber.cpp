#include "relupoly/fiber.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include <json.hpp>

namespace relupoly {

ConfigurationList enumerate_configurations(const DependencyGraph& g, const Architecture& arch,
                                           std::size_t cap) {
  const std::size_t L = arch.depth();
  const std::size_t v = g.vertex_count;
  ConfigurationList out;

  std::vector<std::size_t> layer_of(v, 0);
  std::vector<std::size_t> used(L + 1, 0);  // 1-based layers

  std::function<void(std::size_t)> rec = [&](std::size_t at) {
    if (out.truncated) return;
    if (at == v) {
      // edges must strictly increase
      for (const auto& e : g.edges)
        if (layer_of[e.from] >= layer_of[e.to]) return;
      if (out.configurations.size() >= cap) {
        out.truncated = true;
        return;
      }
      CandidateAssignment a;
      std::vector<std::size_t> next_neuron(L + 1, 0);
      for (std::size_t c = 0; c < v; ++c) {
        std::size_t l = layer_of[c];
        a.neuron_of_candidate.push_back({l, next_neuron[l]++});
      }
      out.configurations.push_back(std::move(a));
      return;
    }
    for (std::size_t l = 1; l <= L; ++l) {
      if (used[l] == arch.width(l)) continue;
      layer_of[at] = l;
      ++used[l];
      rec(at + 1);
      --used[l];
    }
  };
  rec(0);
  return out;
}

FiberData ground_truth_fiber_data(const CanonicalComplex& c, const BreakpointComplex& b) {
  FiberData data;
  data.target = c.param.arch;
  for (auto fi : b.facets) {
    const Face& f = c.facets[fi];
    if (f.incident.size() != 1)
      throw PreconditionViolation(
          "ground-truth configuration needs a unique incident neuron per facet");
    FiberFacetData d;
    d.facet = fi;
    d.abar = f.hull.normal;
    d.bbar = f.hull.offset;
    d.w = b.weights[fi].w;
    d.norm2 = b.weights[fi].norm2;
    d.signs = f.signs;
    d.neuron = f.incident[0];
    data.facets.push_back(std::move(d));
  }
  return data;
}

FiberData fiber_data_for_assignment(const CanonicalComplex& c, const BreakpointComplex& b,
                                    const CandidatePartition& part, const DependencyGraph& g,
                                    const Architecture& target, const CandidateAssignment& phi) {
  if (phi.neuron_of_candidate.size() != part.classes.size())
    throw PreconditionViolation("assignment size does not match the candidate count");
  for (const auto& e : g.edges) {
    if (phi.neuron_of_candidate[e.from].layer >= phi.neuron_of_candidate[e.to].layer)
      throw PreconditionViolation("assignment violates a dependency edge order");
  }
  for (const auto& n : phi.neuron_of_candidate) {
    if (n.layer < 1 || n.layer > target.depth() || n.neuron >= target.width(n.layer))
      throw PreconditionViolation("assignment references a neuron outside the target architecture");
  }
  FiberData data;
  data.target = target;
  for (auto fi : b.facets) {
    const Face& f = c.facets[fi];
    std::size_t cls = part.facet_class[fi];
    if (cls == SIZE_MAX) throw InternalError("visible facet without a candidate class");
    FiberFacetData d;
    d.facet = fi;
    d.abar = f.hull.normal;
    d.bbar = f.hull.offset;
    d.w = b.weights[fi].w;
    d.norm2 = b.weights[fi].norm2;
    d.signs = f.signs;
    d.neuron = phi.neuron_of_candidate[cls];
    data.facets.push_back(std::move(d));
  }
  return data;
}

namespace {

// all monomials of (W^(l) D_{S_{l-1}} ... D_{S_1} W^(1))_{j,t}: one per path
void gradient_monomials(const Architecture& arch, const std::vector<std::vector<std::size_t>>& s,
                        std::size_t l, std::size_t j, std::size_t t,
                        std::vector<Monomial>& out, const Rat& coeff) {
  // path indices i_{l-1} in S_{l-1}, ..., i_1 in S_1
  std::vector<std::size_t> path(l - 1);
  std::function<void(std::size_t)> rec = [&](std::size_t depth) {
    if (depth == l - 1) {
      Monomial m;
      m.coeff = coeff;
      std::size_t upper = j;
      for (std::size_t k = l; k >= 2; --k) {
        std::size_t lower = path[k - 2];
        m.w_refs.push_back({k, upper, lower});
        upper = lower;
      }
      m.w_refs.push_back({1, upper, t});
      out.push_back(std::move(m));
      return;
    }
    // depth counts layers below l: fill path for layer l-1-depth
    std::size_t layer = l - 1 - depth;
    for (std::size_t idx : s[layer - 1]) {
      path[layer - 1] = idx;
      rec(depth + 1);
    }
  };
  if (l == 1) {
    Monomial m;
    m.coeff = coeff;
    m.w_refs.push_back({1, j, t});
    out.push_back(std::move(m));
    return;
  }
  (void)arch;
  rec(0);
}

// monomials of t_sigma: b^(l)_j + sum_k (W^(l) D ... D W^(k+1) D b^(k))_j
void offset_monomials(const std::vector<std::vector<std::size_t>>& s, std::size_t l,
                      std::size_t j, std::vector<Monomial>& out) {
  {
    Monomial m;
    m.coeff = 1;
    m.b_refs.push_back({l, j});
    out.push_back(std::move(m));
  }
  for (std::size_t k = 1; k < l; ++k) {
    // paths i_t in S_t for t = k..l-1, stored at path[t-k]; the monomial is
    // W^(l)_{j,i_{l-1}} ... W^(k+1)_{i_{k+1},i_k} b^(k)_{i_k}
    std::vector<std::size_t> path(l - k);
    std::function<void(std::size_t)> rec = [&](std::size_t depth) {
      if (depth == l - k) {
        Monomial m;
        m.coeff = 1;
        std::size_t upper = j;
        for (std::size_t t = l; t > k; --t) {
          std::size_t lower = path[t - 1 - k];
          m.w_refs.push_back({t, upper, lower});
          upper = lower;
        }
        m.b_refs.push_back({k, upper});
        out.push_back(std::move(m));
        return;
      }
      std::size_t layer = l - 1 - depth;  // chosen from l-1 down to k
      for (std::size_t idx : s[layer - 1]) {
        path[layer - k] = idx;
        rec(depth + 1);
      }
    };
    rec(0);
  }
}

// monomials of v_sigma(eta)_r = (W^(L+1) D_{S_L} ... W^(l+1))_{r,j}
void forward_monomials(const Architecture& arch, const std::vector<std::vector<std::size_t>>& s,
                       std::size_t l, std::size_t j, std::size_t r, std::vector<Monomial>& out) {
  const std::size_t L = arch.depth();
  std::vector<std::size_t> path(L - l);  // indices i_{l+1} in S_{l+1}.. i_L in S_L
  std::function<void(std::size_t)> rec = [&](std::size_t depth) {
    if (depth == L - l) {
      Monomial m;
      m.coeff = 1;
      std::size_t lower = j;
      for (std::size_t t = l + 1; t <= L; ++t) {
        std::size_t upper = path[t - l - 1];
        m.w_refs.push_back({t, upper, lower});
        lower = upper;
      }
      m.w_refs.push_back({L + 1, r, lower});
      out.push_back(std::move(m));
      return;
    }
    std::size_t layer = l + 1 + depth;
    for (std::size_t idx : s[layer - 1]) {
      path[layer - l - 1] = idx;
      rec(depth + 1);
    }
  };
  rec(0);
}

Monomial mu_monomial(std::size_t facet, const Rat& coeff, std::size_t power = 1) {
  Monomial m;
  m.coeff = coeff;
  m.mu_power = power;
  m.mu_facet = facet;
  return m;
}

Monomial product(const Monomial& a, const Monomial& b) {
  Monomial m;
  m.coeff = a.coeff * b.coeff;
  m.w_refs = a.w_refs;
  m.w_refs.insert(m.w_refs.end(), b.w_refs.begin(), b.w_refs.end());
  m.b_refs = a.b_refs;
  m.b_refs.insert(m.b_refs.end(), b.b_refs.begin(), b.b_refs.end());
  m.mu_power = a.mu_power + b.mu_power;
  m.mu_facet = std::max(a.mu_facet, b.mu_facet);
  return m;
}

}  // namespace

ConfigurationSystem emit_configuration_system(const FiberData& data) {
  ConfigurationSystem sys;
  sys.target = data.target;
  sys.facets = data.facets;
  const std::size_t d = data.target.input_dim();
  const std::size_t m = data.target.output_dim();

  for (const auto& f : data.facets) {
    auto s = active_sets_from_signs(f.signs);
    const std::size_t l = f.neuron.layer, j = f.neuron.neuron;

    // geometric alignment: g_sigma(eta)_t - mu * abar_t = 0
    for (std::size_t t = 0; t < d; ++t) {
      PolyConstraint pc;
      pc.type = "alignment";
      pc.facet = f.facet;
      pc.row = t;
      gradient_monomials(data.target, s, l, j, t, pc.poly, Rat(1));
      if (sgn(f.abar[t]) != 0) pc.poly.push_back(mu_monomial(f.facet, -f.abar[t]));
      sys.constraints.push_back(std::move(pc));
    }
    // offset: t_sigma(eta) - mu * bbar = 0
    {
      PolyConstraint pc;
      pc.type = "offset";
      pc.facet = f.facet;
      pc.row = 0;
      offset_monomials(s, l, j, pc.poly);
      if (sgn(f.bbar) != 0) pc.poly.push_back(mu_monomial(f.facet, -f.bbar));
      sys.constraints.push_back(std::move(pc));
    }
    // weight matching, cross-multiplied squared:
    // mu^2 |abar|^4 v_r(eta)^2 - w_r^2 = 0
    for (std::size_t r = 0; r < m; ++r) {
      PolyConstraint pc;
      pc.type = "weight";
      pc.facet = f.facet;
      pc.row = r;
      std::vector<Monomial> v;
      forward_monomials(data.target, s, l, j, r, v);
      Rat lead = f.norm2 * f.norm2;
      for (std::size_t a = 0; a < v.size(); ++a)
        for (std::size_t b2 = 0; b2 < v.size(); ++b2) {
          Monomial prod = product(v[a], v[b2]);
          prod.coeff *= lead;
          prod = product(prod, mu_monomial(f.facet, Rat(1), 2));
          pc.poly.push_back(std::move(prod));
        }
      if (sgn(f.w[r]) != 0) {
        Monomial cst;
        cst.coeff = -f.w[r] * f.w[r];
        pc.poly.push_back(std::move(cst));
      }
      sys.constraints.push_back(std::move(pc));
    }
    // nonvanishing scalar
    {
      PolyConstraint pc;
      pc.type = "nonzero";
      pc.facet = f.facet;
      pc.row = 0;
      pc.poly.push_back(mu_monomial(f.facet, Rat(1)));
      sys.constraints.push_back(std::move(pc));
    }
  }
  return sys;
}

bool verify_membership(const Parameter& eta, const FiberData& data) {
  if (!(eta.arch == data.target)) return false;
  const std::size_t L = eta.arch.depth();
  for (const auto& f : data.facets) {
    auto s = active_sets_from_signs(f.signs);
    const std::size_t l = f.neuron.layer, j = f.neuron.neuron;

    LinExpr pre = preactivation_affine(eta, s, l, j);
    // solve mu from the first nonzero abar coordinate
    std::size_t t = 0;
    while (t < f.abar.size() && sgn(f.abar[t]) == 0) ++t;
    if (t == f.abar.size()) return false;
    Rat mu = pre.a[t] / f.abar[t];
    if (sgn(mu) == 0) return false;
    for (std::size_t k = 0; k < f.abar.size(); ++k)
      if (pre.a[k] != mu * f.abar[k]) return false;
    if (pre.b != mu * f.bbar) return false;

    // forward vector v through the assigned pattern
    RatVec v(eta.arch.width(l), Rat(0));
    v[j] = 1;
    for (std::size_t k = l + 1; k <= L; ++k) {
      v = eta.layer(k).W * v;
      std::vector<bool> act(eta.arch.width(k), false);
      for (auto idx : s[k - 1]) act[idx] = true;
      for (std::size_t idx = 0; idx < v.size(); ++idx)
        if (!act[idx]) v[idx] = 0;
    }
    v = eta.layer(L + 1).W * v;

    // pairwise weight coherence: mu^2 |abar|^4 v_r v_s = w_r w_s
    Rat lead = mu * mu * f.norm2 * f.norm2;
    for (std::size_t r = 0; r < v.size(); ++r)
      for (std::size_t s2 = r; s2 < v.size(); ++s2)
        if (lead * v[r] * v[s2] != f.w[r] * f.w[s2]) return false;
  }
  return true;
}

namespace {

nlohmann::json monomial_json(const Monomial& m) {
  nlohmann::json j;
  j["coeff"] = rat_to_string(m.coeff);
  nlohmann::json vars = nlohmann::json::array();
  for (const auto& w : m.w_refs) vars.push_back({{"var", "W"}, {"l", w[0]}, {"i", w[1]}, {"j", w[2]}});
  for (const auto& b : m.b_refs) vars.push_back({{"var", "b"}, {"l", b.first}, {"i", b.second}});
  for (std::size_t k = 0; k < m.mu_power; ++k)
    vars.push_back({{"var", "mu"}, {"facet", m.mu_facet}});
  j["vars"] = vars;
  return j;
}

std::string monomial_text(const Monomial& m) {
  std::ostringstream os;
  os << rat_to_string(m.coeff);
  for (const auto& w : m.w_refs) os << "*W[" << w[0] << "][" << w[1] << "][" << w[2] << "]";
  for (const auto& b : m.b_refs) os << "*b[" << b.first << "][" << b.second << "]";
  for (std::size_t k = 0; k < m.mu_power; ++k) os << "*mu[" << m.mu_facet << "]";
  return os.str();
}

}  // namespace

std::string system_to_json(const ConfigurationSystem& sys) {
  nlohmann::json j;
  j["architecture"] = sys.target.widths;
  nlohmann::json facets = nlohmann::json::array();
  for (const auto& f : sys.facets) {
    nlohmann::json jf;
    jf["facet"] = f.facet;
    nlohmann::json a = nlohmann::json::array();
    for (const auto& v : f.abar) a.push_back(rat_to_string(v));
    jf["abar"] = a;
    jf["bbar"] = rat_to_string(f.bbar);
    nlohmann::json w = nlohmann::json::array();
    for (const auto& v : f.w) w.push_back(rat_to_string(v));
    jf["w"] = w;
    jf["norm2"] = rat_to_string(f.norm2);
    jf["neuron"] = {{"layer", f.neuron.layer}, {"index", f.neuron.neuron}};
    nlohmann::json signs = nlohmann::json::array();
    for (const auto& layer : f.signs) {
      std::string t;
      for (int v : layer) t += v > 0 ? '+' : (v < 0 ? '-' : '0');
      signs.push_back(t);
    }
    jf["signs"] = signs;
    facets.push_back(jf);
  }
  j["facets"] = facets;
  nlohmann::json cons = nlohmann::json::array();
  for (const auto& pc : sys.constraints) {
    nlohmann::json jc;
    jc["type"] = pc.type;
    jc["facet"] = pc.facet;
    jc["row"] = pc.row;
    nlohmann::json poly = nlohmann::json::array();
    for (const auto& m : pc.poly) poly.push_back(monomial_json(m));
    jc["poly"] = poly;
    cons.push_back(jc);
  }
  j["constraints"] = cons;
  return j.dump(2);
}

std::string system_to_text(const ConfigurationSystem& sys) {
  std::ostringstream os;
  os << "configuration system for architecture " << sys.target.to_string() << "\n";
  for (const auto& pc : sys.constraints) {
    os << "[" << pc.type << " facet " << pc.facet << " row " << pc.row << "] ";
    for (std::size_t i = 0; i < pc.poly.size(); ++i)
      os << (i ? " + " : "") << monomial_text(pc.poly[i]);
    os << (pc.type == "nonzero" ? " != 0" : " = 0") << "\n";
  }
  return os.str();
}

}  // namespace relupoly
