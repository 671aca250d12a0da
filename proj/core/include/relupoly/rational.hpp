#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace relupoly {

// Exact rational scalar. mpq_class keeps values reduced with a positive
// denominator, which is exactly the invariant the rest of the library relies on.
using Rat = mpq_class;
using RatVec = std::vector<Rat>;

class InvalidInput : public std::runtime_error {
 public:
  explicit InvalidInput(const std::string& what) : std::runtime_error(what) {}
};

class PreconditionViolation : public std::runtime_error {
 public:
  explicit PreconditionViolation(const std::string& what) : std::runtime_error(what) {}
};

class InternalError : public std::runtime_error {
 public:
  explicit InternalError(const std::string& what) : std::runtime_error(what) {}
};

inline int sign(const Rat& q) { return sgn(q); }

Rat rat_from_long(long n, long d = 1);

// Parses "p/q", integers, and decimal strings ("-0.45", "1.25e-3") exactly.
Rat parse_rational(const std::string& text);

// Canonical emission: "p" when the denominator is 1, else "p/q".
std::string rat_to_string(const Rat& q);

double rat_to_double(const Rat& q);

RatVec parse_rational_vector(const std::vector<std::string>& items);

bool is_zero_vec(const RatVec& v);
Rat dot(const RatVec& a, const RatVec& b);
RatVec vec_sub(const RatVec& a, const RatVec& b);
RatVec vec_add(const RatVec& a, const RatVec& b);
RatVec vec_scale(const Rat& s, const RatVec& v);
Rat norm2_squared(const RatVec& v);

// Divides by the gcd of all numerators after clearing denominators; result is
// an integer vector. Returns the zero vector unchanged.
RatVec primitive_integer_vector(const RatVec& v);

// True iff a = lambda*b for some lambda > 0 (both nonzero).
bool positively_proportional(const RatVec& a, const RatVec& b);
// True iff a = lambda*b for some lambda != 0.
bool proportional(const RatVec& a, const RatVec& b);

// Decides |p/sqrt(s) - q/sqrt(t)| < eps exactly for rational p, q, eps and
// positive rational s, t. Used for the normalized hyperplane-closeness metric.
bool radical_diff_below(const Rat& p, const Rat& s, const Rat& q, const Rat& t, const Rat& eps);

}  // namespace relupoly
