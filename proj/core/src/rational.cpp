#include "relupoly/rational.hpp"

#include <cctype>
#include <cstdlib>

namespace relupoly {

Rat rat_from_long(long n, long d) {
  Rat q(n, d);
  q.canonicalize();
  return q;
}

namespace {

bool all_digits(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

}  // namespace

Rat parse_rational(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.empty()) throw InvalidInput("empty rational literal");

  auto slash = s.find('/');
  if (slash != std::string::npos) {
    std::string num = s.substr(0, slash), den = s.substr(slash + 1);
    if (num.empty() || den.empty()) throw InvalidInput("malformed fraction: " + text);
    try {
      mpz_class n(num), d(den);
      if (d == 0) throw InvalidInput("zero denominator: " + text);
      Rat q(n, d);
      q.canonicalize();
      return q;
    } catch (const std::invalid_argument&) {
      throw InvalidInput("malformed fraction: " + text);
    }
  }

  bool neg = false;
  std::size_t i = 0;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
    neg = (s[i] == '-');
    ++i;
  }
  std::string int_part, frac_part, exp_part;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) int_part.push_back(s[i++]);
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) frac_part.push_back(s[i++]);
  }
  long expo = 0;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    std::string es;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) es.push_back(s[i++]);
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) es.push_back(s[i++]);
    if (es.empty() || (es.size() == 1 && !std::isdigit(static_cast<unsigned char>(es[0]))))
      throw InvalidInput("malformed exponent: " + text);
    expo = std::strtol(es.c_str(), nullptr, 10);
    exp_part = es;
  }
  if (i != s.size() || (int_part.empty() && frac_part.empty()))
    throw InvalidInput("malformed rational literal: " + text);
  if (!int_part.empty() && !all_digits(int_part)) throw InvalidInput("malformed literal: " + text);

  mpz_class digits(int_part.empty() ? std::string("0") + frac_part : int_part + frac_part,
                   10);
  long scale = static_cast<long>(frac_part.size()) - expo;
  Rat q(digits);
  if (scale > 0) {
    mpz_class den(1);
    mpz_ui_pow_ui(den.get_mpz_t(), 10, static_cast<unsigned long>(scale));
    q = Rat(digits, den);
  } else if (scale < 0) {
    mpz_class mul(1);
    mpz_ui_pow_ui(mul.get_mpz_t(), 10, static_cast<unsigned long>(-scale));
    q = Rat(digits * mul);
  }
  q.canonicalize();
  if (neg) q = -q;
  return q;
}

std::string rat_to_string(const Rat& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

double rat_to_double(const Rat& q) { return q.get_d(); }

RatVec parse_rational_vector(const std::vector<std::string>& items) {
  RatVec v;
  v.reserve(items.size());
  for (const auto& s : items) v.push_back(parse_rational(s));
  return v;
}

bool is_zero_vec(const RatVec& v) {
  for (const auto& q : v)
    if (sgn(q) != 0) return false;
  return true;
}

Rat dot(const RatVec& a, const RatVec& b) {
  if (a.size() != b.size()) throw InternalError("dot: size mismatch");
  Rat s(0);
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

RatVec vec_sub(const RatVec& a, const RatVec& b) {
  if (a.size() != b.size()) throw InternalError("vec_sub: size mismatch");
  RatVec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

RatVec vec_add(const RatVec& a, const RatVec& b) {
  if (a.size() != b.size()) throw InternalError("vec_add: size mismatch");
  RatVec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

RatVec vec_scale(const Rat& s, const RatVec& v) {
  RatVec r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) r[i] = s * v[i];
  return r;
}

Rat norm2_squared(const RatVec& v) {
  Rat s(0);
  for (const auto& q : v) s += q * q;
  return s;
}

RatVec primitive_integer_vector(const RatVec& v) {
  if (is_zero_vec(v)) return v;
  mpz_class den_lcm(1);
  for (const auto& q : v) mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), q.get_den().get_mpz_t());
  mpz_class g(0);
  std::vector<mpz_class> ints(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    ints[i] = v[i].get_num() * (den_lcm / v[i].get_den());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), ints[i].get_mpz_t());
  }
  RatVec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = Rat(ints[i] / g);
  return out;
}

bool proportional(const RatVec& a, const RatVec& b) {
  if (a.size() != b.size()) return false;
  if (is_zero_vec(a) || is_zero_vec(b)) return false;
  std::size_t p = 0;
  while (p < b.size() && sgn(b[p]) == 0) ++p;
  if (p == b.size()) return false;
  if (sgn(a[p]) == 0) return false;
  Rat lambda = a[p] / b[p];
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != lambda * b[i]) return false;
  return true;
}

bool positively_proportional(const RatVec& a, const RatVec& b) {
  if (!proportional(a, b)) return false;
  std::size_t p = 0;
  while (p < b.size() && sgn(b[p]) == 0) ++p;
  return sgn(a[p]) * sgn(b[p]) > 0;
}

bool radical_diff_below(const Rat& p, const Rat& s, const Rat& q, const Rat& t, const Rat& eps) {
  if (sgn(eps) <= 0) return false;
  if (sgn(s) <= 0 || sgn(t) <= 0) throw PreconditionViolation("radical_diff_below: radicands must be positive");
  // D = p/sqrt(s) - q/sqrt(t). Since eps > 0, |D| < eps <=> D^2 < eps^2, i.e.
  //   L := p^2/s + q^2/t - eps^2 < 2pq/sqrt(st) =: R, with sign(R) = sign(pq).
  Rat L = p * p / s + q * q / t - eps * eps;
  int rsign = sgn(p) * sgn(q);
  int lsign = sgn(L);
  if (lsign < 0) {
    if (rsign >= 0) return true;
    return cmp(L * L, Rat(4) * p * p * q * q / (s * t)) > 0;  // both negative: flip
  }
  if (lsign == 0) return rsign > 0;
  if (rsign <= 0) return false;
  return cmp(L * L, Rat(4) * p * p * q * q / (s * t)) < 0;
}

}  // namespace relupoly
