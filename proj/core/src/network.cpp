#include "relupoly/network.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace relupoly {

std::size_t Architecture::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 1; l < widths.size(); ++l) n += widths[l] * widths[l - 1] + widths[l];
  return n;
}

std::size_t Architecture::hidden_neuron_count() const {
  std::size_t n = 0;
  for (std::size_t l = 1; l + 1 < widths.size(); ++l) n += widths[l];
  return n;
}

std::size_t Architecture::expected_functional_dimension() const {
  std::size_t n = 0;
  for (std::size_t l = 1; l < widths.size(); ++l) n += widths[l] * widths[l - 1];
  return n + widths.back();
}

void Architecture::validate() const {
  if (widths.size() < 3) throw InvalidInput("architecture needs at least one hidden layer");
  for (auto w : widths)
    if (w < 1) throw InvalidInput("architecture widths must be positive");
}

Architecture Architecture::parse(const std::string& text) {
  Architecture a;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    long v = std::stol(tok);
    if (v < 1) throw InvalidInput("architecture widths must be positive");
    a.widths.push_back(static_cast<std::size_t>(v));
  }
  a.validate();
  return a;
}

std::string Architecture::to_string() const {
  std::string s;
  for (std::size_t i = 0; i < widths.size(); ++i) s += (i ? "," : "") + std::to_string(widths[i]);
  return s;
}

void Parameter::validate() const {
  arch.validate();
  if (layers.size() != arch.widths.size() - 1) throw InvalidInput("layer count does not match architecture");
  for (std::size_t l = 1; l < arch.widths.size(); ++l) {
    const Layer& lay = layers[l - 1];
    if (lay.W.rows() != arch.widths[l] || lay.W.cols() != arch.widths[l - 1] ||
        lay.b.size() != arch.widths[l])
      throw InvalidInput("weight/bias shape mismatch at layer " + std::to_string(l));
  }
}

ActiveSets active_sets_from_signs(const SignPattern& s) {
  ActiveSets out(s.size());
  for (std::size_t l = 0; l < s.size(); ++l)
    for (std::size_t j = 0; j < s[l].size(); ++j)
      if (s[l][j] > 0) out[l].push_back(j);
  return out;
}

std::string sign_pattern_to_string(const SignPattern& s) {
  std::string out;
  for (std::size_t l = 0; l < s.size(); ++l) {
    if (l) out += "|";
    for (int v : s[l]) out += v > 0 ? '+' : (v < 0 ? '-' : '0');
  }
  return out;
}

EvalTrace eval_trace(const Parameter& p, const RatVec& x) {
  if (x.size() != p.arch.input_dim()) throw InvalidInput("input dimension mismatch");
  EvalTrace t;
  t.act.push_back(x);
  RatVec a = x;
  const std::size_t L = p.arch.depth();
  for (std::size_t l = 1; l <= L; ++l) {
    RatVec z = vec_add(p.layer(l).W * a, p.layer(l).b);
    t.pre.push_back(z);
    for (auto& v : z)
      if (sgn(v) < 0) v = 0;
    t.act.push_back(z);
    a = z;
  }
  t.out = vec_add(p.layer(L + 1).W * a, p.layer(L + 1).b);
  return t;
}

RatVec eval(const Parameter& p, const RatVec& x) { return eval_trace(p, x).out; }

SignPattern activation_pattern(const Parameter& p, const RatVec& x) {
  EvalTrace t = eval_trace(p, x);
  SignPattern s;
  for (const auto& z : t.pre) {
    LayerSigns ls;
    for (const auto& v : z) ls.push_back(sgn(v));
    s.push_back(std::move(ls));
  }
  return s;
}

AffinePiece hidden_activation_map(const Parameter& p, const ActiveSets& s, std::size_t upto) {
  const std::size_t d = p.arch.input_dim();
  AffinePiece cur{RatMat::identity(d), RatVec(d, Rat(0))};
  for (std::size_t l = 1; l <= upto; ++l) {
    RatMat A = p.layer(l).W * cur.A;
    RatVec b = vec_add(p.layer(l).W * cur.b, p.layer(l).b);
    // apply the selector: inactive rows become zero
    std::vector<bool> active(p.arch.width(l), false);
    for (auto j : s.at(l - 1)) active.at(j) = true;
    for (std::size_t i = 0; i < A.rows(); ++i) {
      if (active[i]) continue;
      for (std::size_t j = 0; j < A.cols(); ++j) A(i, j) = 0;
      b[i] = 0;
    }
    cur = {std::move(A), std::move(b)};
  }
  return cur;
}

AffinePiece affine_map_for_pattern(const Parameter& p, const ActiveSets& s) {
  const std::size_t L = p.arch.depth();
  if (s.size() != L) throw PreconditionViolation("active sets must cover every hidden layer");
  AffinePiece hidden = hidden_activation_map(p, s, L);
  return {p.layer(L + 1).W * hidden.A, vec_add(p.layer(L + 1).W * hidden.b, p.layer(L + 1).b)};
}

LinExpr preactivation_affine(const Parameter& p, const ActiveSets& s, std::size_t l, std::size_t j) {
  AffinePiece below = hidden_activation_map(p, s, l - 1);
  RatVec w = p.layer(l).W.row(j);
  RatVec grad = below.A.transposed() * w;
  Rat off = dot(w, below.b) + p.layer(l).b[j];
  return {std::move(grad), std::move(off)};
}

Parameter permute_layer(const Parameter& p, std::size_t hidden_layer, const std::vector<std::size_t>& perm) {
  if (hidden_layer < 1 || hidden_layer > p.arch.depth()) throw PreconditionViolation("not a hidden layer");
  const std::size_t n = p.arch.width(hidden_layer);
  if (perm.size() != n) throw PreconditionViolation("permutation size mismatch");
  Parameter q = p;
  Layer& cur = q.layer(hidden_layer);
  Layer& next = q.layer(hidden_layer + 1);
  const Layer& cur0 = p.layer(hidden_layer);
  const Layer& next0 = p.layer(hidden_layer + 1);
  for (std::size_t i = 0; i < n; ++i) {
    cur.W.set_row(i, cur0.W.row(perm[i]));
    cur.b[i] = cur0.b[perm[i]];
    next.W.set_col(i, next0.W.col(perm[i]));
  }
  return q;
}

Parameter scale_neuron(const Parameter& p, std::size_t hidden_layer, std::size_t neuron, const Rat& lambda) {
  if (sgn(lambda) <= 0) throw PreconditionViolation("scaling factor must be positive");
  if (hidden_layer < 1 || hidden_layer > p.arch.depth()) throw PreconditionViolation("not a hidden layer");
  Parameter q = p;
  Layer& cur = q.layer(hidden_layer);
  Layer& next = q.layer(hidden_layer + 1);
  for (std::size_t j = 0; j < cur.W.cols(); ++j) cur.W(neuron, j) *= lambda;
  cur.b[neuron] *= lambda;
  Rat inv = Rat(1) / lambda;
  for (std::size_t i = 0; i < next.W.rows(); ++i) next.W(i, neuron) *= inv;
  return q;
}

Parameter canonicalize(const Parameter& p) {
  Parameter q = p;
  const std::size_t L = q.arch.depth();
  for (std::size_t l = 1; l <= L; ++l) {
    Layer& cur = q.layer(l);
    Layer& next = q.layer(l + 1);
    const std::size_t n = q.arch.width(l);
    // positive scaling to primitive integer incoming (row, bias)
    for (std::size_t i = 0; i < n; ++i) {
      RatVec rb = cur.W.row(i);
      rb.push_back(cur.b[i]);
      if (is_zero_vec(rb)) {
        // zero incoming data: normalize the outgoing column instead
        RatVec col = next.W.col(i);
        if (is_zero_vec(col)) continue;
        RatVec prim = primitive_integer_vector(col);
        // the neuron outputs 0 identically, so rescaling its column is free
        next.W.set_col(i, prim);
        continue;
      }
      RatVec prim = primitive_integer_vector(rb);
      std::size_t t = 0;
      while (sgn(rb[t]) == 0) ++t;
      Rat lambda = prim[t] / rb[t];  // > 0: primitive keeps signs
      for (std::size_t j = 0; j < cur.W.cols(); ++j) cur.W(i, j) *= lambda;
      cur.b[i] *= lambda;
      Rat inv = Rat(1) / lambda;
      for (std::size_t r = 0; r < next.W.rows(); ++r) next.W(r, i) *= inv;
    }
  }
  // sort neurons per layer after all scalings are fixed
  for (std::size_t l = 1; l <= L; ++l) {
    const std::size_t n = q.arch.width(l);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    auto key = [&](std::size_t i) {
      RatVec k = q.layer(l).W.row(i);
      k.push_back(q.layer(l).b[i]);
      RatVec col = q.layer(l + 1).W.col(i);
      k.insert(k.end(), col.begin(), col.end());
      return k;
    };
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
      RatVec kx = key(x), ky = key(y);
      return std::lexicographical_compare(kx.begin(), kx.end(), ky.begin(), ky.end(),
                                          [](const Rat& a, const Rat& b) { return a < b; });
    });
    q = permute_layer(q, l, order);
  }
  return q;
}

bool equivalent_mod_symmetries(const Parameter& a, const Parameter& b) {
  if (!(a.arch == b.arch)) return false;
  Parameter ca = canonicalize(a), cb = canonicalize(b);
  for (std::size_t l = 0; l < ca.layers.size(); ++l)
    if (!(ca.layers[l].W == cb.layers[l].W) || ca.layers[l].b != cb.layers[l].b) return false;
  return true;
}

Parameter parse_network_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidInput(std::string("malformed JSON: ") + e.what());
  }
  auto to_rat = [](const nlohmann::json& v) -> Rat {
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number_integer()) return Rat(static_cast<long>(v.get<std::int64_t>()));
    throw InvalidInput("numeric entries must be exact: use integers or strings like \"3/4\" or \"0.25\"");
  };
  Parameter p;
  if (!j.contains("architecture") || !j.contains("layers")) throw InvalidInput("missing architecture/layers");
  for (const auto& w : j["architecture"]) p.arch.widths.push_back(w.get<std::size_t>());
  p.arch.validate();
  for (const auto& layer : j["layers"]) {
    Layer lay;
    const auto& W = layer.at("W");
    lay.W = RatMat(W.size(), W.empty() ? 0 : W[0].size());
    for (std::size_t i = 0; i < W.size(); ++i) {
      if (W[i].size() != lay.W.cols()) throw InvalidInput("ragged weight matrix");
      for (std::size_t k = 0; k < lay.W.cols(); ++k) lay.W(i, k) = to_rat(W[i][k]);
    }
    for (const auto& v : layer.at("b")) lay.b.push_back(to_rat(v));
    p.layers.push_back(std::move(lay));
  }
  p.validate();
  return p;
}

std::string emit_network_json(const Parameter& p) {
  nlohmann::json j;
  j["architecture"] = p.arch.widths;
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& lay : p.layers) {
    nlohmann::json jl;
    nlohmann::json W = nlohmann::json::array();
    for (std::size_t i = 0; i < lay.W.rows(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (std::size_t k = 0; k < lay.W.cols(); ++k) row.push_back(rat_to_string(lay.W(i, k)));
      W.push_back(row);
    }
    jl["W"] = W;
    nlohmann::json b = nlohmann::json::array();
    for (const auto& v : lay.b) b.push_back(rat_to_string(v));
    jl["b"] = b;
    layers.push_back(jl);
  }
  j["layers"] = layers;
  return j.dump(2);
}

}  // namespace relupoly
