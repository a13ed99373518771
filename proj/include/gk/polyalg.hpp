#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gk/multipoly.hpp"

namespace gk {

inline MultiPoly monomial(const std::string& var, unsigned k) {
  MultiPoly::Terms t;
  t[Exponents{k}] = 1;
  return MultiPoly({var}, std::move(t));
}

inline double type_of(const MultiPoly& p) {
  require(!p.is_zero(), ErrorKind::undefined_type, "type of the zero polynomial");
  return static_cast<double>(p.total_degree()) + std::log(p.height().get_d());
}

// Exact quotient in Z[vars]; nullopt when b does not divide a.
inline std::optional<MultiPoly> try_divide(const MultiPoly& a, const MultiPoly& b) {
  require(!b.is_zero(), ErrorKind::domain, "division by the zero polynomial");
  auto u = MultiPoly::merged_vars(a, b);
  if (a.is_zero()) return MultiPoly::constant(0, u);
  if (b.is_constant()) {
    mpz_class k = b.constant_value();
    for (const auto& [e, c] : a.terms())
      if (!mpz_divisible_p(c.get_mpz_t(), k.get_mpz_t())) return std::nullopt;
    return a.divide_exact(k).with_vars(u);
  }
  std::string v = b.support_vars().front();
  unsigned db = b.degree(v);
  MultiPoly lb = b.leading_coefficient(v);
  MultiPoly rem = a.with_vars(u);
  MultiPoly quot = MultiPoly::constant(0, u);
  while (!rem.is_zero()) {
    unsigned dr = rem.degree(v);
    if (dr < db) return std::nullopt;
    auto q = try_divide(rem.leading_coefficient(v), lb);
    if (!q) return std::nullopt;
    MultiPoly term = *q * monomial(v, dr - db);
    quot += term;
    rem -= term * b;
  }
  return quot.with_vars(u);
}

inline MultiPoly divide_exact(const MultiPoly& a, const MultiPoly& b) {
  auto q = try_divide(a, b);
  require(q.has_value(), ErrorKind::domain, "inexact polynomial division");
  return *q;
}

// Pseudo-remainder of a by b in var (no final multiplier).
inline MultiPoly prem(const MultiPoly& a, const MultiPoly& b, const std::string& v) {
  unsigned db = b.degree(v);
  MultiPoly lb = b.leading_coefficient(v);
  MultiPoly r = a;
  while (!r.is_zero() && r.degree(v) >= db) {
    unsigned dr = r.degree(v);
    MultiPoly lr = r.leading_coefficient(v);
    r = lb * r - lr * monomial(v, dr - db) * b;
  }
  return r;
}

inline MultiPoly normalize_sign(const MultiPoly& p) { return p.leading_sign() < 0 ? -p : p; }

inline MultiPoly poly_gcd(const MultiPoly& a, const MultiPoly& b);

// gcd of the coefficients of p viewed in var, sign-normalized.
inline MultiPoly content_in(const MultiPoly& p, const std::string& v) {
  if (p.is_zero()) return p;
  MultiPoly g = MultiPoly::constant(0, p.vars());
  for (const auto& c : p.coefficients_in(v)) {
    if (c.is_zero()) continue;
    g = poly_gcd(g, c);
    if (g.is_constant() && abs(g.constant_value()) == 1) break;
  }
  return normalize_sign(g).with_vars(p.vars());
}

inline MultiPoly primitive_part_in(const MultiPoly& p, const std::string& v) {
  if (p.is_zero()) return p;
  return divide_exact(p, content_in(p, v));
}

inline MultiPoly poly_gcd(const MultiPoly& a0, const MultiPoly& b0) {
  auto u = MultiPoly::merged_vars(a0, b0);
  MultiPoly a = a0.with_vars(u), b = b0.with_vars(u);
  if (a.is_zero()) return normalize_sign(b);
  if (b.is_zero()) return normalize_sign(a);
  std::string v;
  for (const auto& name : u)
    if (a.degree(name) > 0 || b.degree(name) > 0) {
      v = name;
      break;
    }
  if (v.empty()) {
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), a.constant_value().get_mpz_t(), b.constant_value().get_mpz_t());
    return MultiPoly::constant(g, u);
  }
  if (a.degree(v) == 0) return poly_gcd(a, content_in(b, v));
  if (b.degree(v) == 0) return poly_gcd(content_in(a, v), b);
  MultiPoly ca = content_in(a, v), cb = content_in(b, v);
  MultiPoly pa = divide_exact(a, ca), pb = divide_exact(b, cb);
  MultiPoly gc = poly_gcd(ca, cb);
  if (pa.degree(v) < pb.degree(v)) std::swap(pa, pb);
  MultiPoly g;
  for (;;) {
    MultiPoly r = prem(pa, pb, v);
    if (r.is_zero()) {
      g = pb;
      break;
    }
    if (r.degree(v) == 0) {
      g = MultiPoly::constant(1, u);
      break;
    }
    pa = pb;
    pb = primitive_part_in(r, v);
  }
  return normalize_sign(gc * primitive_part_in(g, v)).with_vars(u);
}

inline bool is_coprime(const MultiPoly& a, const MultiPoly& b) { return poly_gcd(a, b).is_constant(); }

// Yun square-free decomposition in var: returns (factor, multiplicity) with deg_var factor >= 1.
inline std::vector<std::pair<MultiPoly, unsigned>> squarefree_decomposition(const MultiPoly& f, const std::string& v) {
  std::vector<std::pair<MultiPoly, unsigned>> out;
  if (f.degree(v) == 0) return out;
  MultiPoly p = primitive_part_in(f, v);
  MultiPoly dp = p.derivative(v);
  MultiPoly a = poly_gcd(p, dp);
  MultiPoly b = divide_exact(p, a);
  MultiPoly c = divide_exact(dp, a);
  MultiPoly d = c - b.derivative(v);
  for (unsigned i = 1; b.degree(v) > 0; ++i) {
    MultiPoly ai = poly_gcd(b, d);
    MultiPoly bn = divide_exact(b, ai);
    MultiPoly cn = divide_exact(d, ai);
    if (ai.degree(v) > 0) out.emplace_back(primitive_part_in(ai, v), i);
    b = bn;
    d = cn - b.derivative(v);
  }
  return out;
}

// Product of the distinct irreducible factors in var (up to content).
inline MultiPoly squarefree_part(const MultiPoly& f, const std::string& v) {
  if (f.degree(v) == 0) return f;
  MultiPoly p = primitive_part_in(f, v);
  return primitive_part_in(divide_exact(p, poly_gcd(p, p.derivative(v))), v);
}

}  // namespace gk
