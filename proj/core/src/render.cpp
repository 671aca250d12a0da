#include "relupoly/render.hpp"

#include <sstream>

namespace relupoly {

Parameter slice_network(const Parameter& p, const SliceSpec& slice) {
  p.validate();
  const std::size_t d = p.arch.input_dim();
  if (slice.origin.size() != d || slice.basis0.size() != d || slice.basis1.size() != d)
    throw InvalidInput("slice dimensions do not match the network input");
  RatMat basis(d, 2);
  basis.set_col(0, slice.basis0);
  basis.set_col(1, slice.basis1);
  if (exact_rank(basis) != 2) throw InvalidInput("slice directions are dependent");

  Parameter out = p;
  out.arch.widths[0] = 2;
  Layer& first = out.layers[0];
  RatMat w2 = p.layers[0].W * basis;
  RatVec b2 = vec_add(p.layers[0].W * slice.origin, p.layers[0].b);
  first.W = std::move(w2);
  first.b = std::move(b2);
  out.validate();
  return out;
}

namespace {

const char* layer_color(std::size_t layer) {
  static const char* palette[] = {"#111111", "#bb2222", "#2244bb", "#11882a",
                                  "#aa22aa", "#bb7722"};
  return palette[(layer - 1) % 6];
}

struct Pt {
  double x, y;
};

}  // namespace

std::string render_svg(const CanonicalComplex& c, const BreakpointComplex& b) {
  if (c.box.dim != 2)
    throw PreconditionViolation("SVG rendering is planar; use a slice for higher dimensions");
  const double R = rat_to_double(c.box.radius);
  const double size = 640.0, margin = 20.0;
  auto to_px = [&](double x, double y) {
    Pt p;
    p.x = margin + (x + R) / (2 * R) * (size - 2 * margin);
    p.y = size - (margin + (y + R) / (2 * R) * (size - 2 * margin));
    return p;
  };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
     << "\" viewBox=\"0 0 " << size << " " << size << "\">\n";
  os << "  <rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << size - 2 * margin
     << "\" height=\"" << size - 2 * margin << "\" fill=\"white\" stroke=\"#888888\"/>\n";

  for (std::size_t i = 0; i < c.facets.size(); ++i) {
    const Face& f = c.facets[i];
    // endpoints: extremes along the hull direction
    RatVec dir{-f.hull.normal[1], f.hull.normal[0]};
    auto hi = lp_maximize(f.poly, dir);
    RatVec neg{f.hull.normal[1], -f.hull.normal[0]};
    auto lo = lp_maximize(f.poly, neg);
    if (hi.status != LpStatus::Optimal || lo.status != LpStatus::Optimal) continue;
    Pt a = to_px(rat_to_double(hi.x[0]), rat_to_double(hi.x[1]));
    Pt z = to_px(rat_to_double(lo.x[0]), rat_to_double(lo.x[1]));
    std::size_t layer = f.incident.empty() ? 1 : f.incident[0].layer;
    bool visible = i < b.visible.size() && b.visible[i];
    os << "  <line x1=\"" << a.x << "\" y1=\"" << a.y << "\" x2=\"" << z.x << "\" y2=\"" << z.y
       << "\" stroke=\"" << layer_color(layer) << "\" stroke-width=\"" << (visible ? 2.2 : 1.2)
       << "\"";
    if (!visible) os << " stroke-dasharray=\"6,5\"";
    os << "/>\n";
  }
  for (const auto& ridge : c.ridges) {
    Pt p = to_px(rat_to_double(ridge.witness[0]), rat_to_double(ridge.witness[1]));
    os << "  <circle cx=\"" << p.x << "\" cy=\"" << p.y << "\" r=\"3\" fill=\"#222222\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace relupoly
