#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gk/elimination.hpp"
#include "gk/io.hpp"
#include "gk/roots.hpp"

namespace gk {

struct Box {
  mpq_class re_lo, re_hi, im_lo, im_hi;
};

// Algebraic number: primitive minimal polynomial in y plus a box isolating the chosen root.
class AlgebraicNumber {
 public:
  AlgebraicNumber() : AlgebraicNumber(rational(0)) {}

  static AlgebraicNumber rational(const mpq_class& q0) {
    mpq_class q = q0;
    q.canonicalize();
    AlgebraicNumber a(MultiPoly::univariate("y", {mpz_class(-q.get_num()), mpz_class(q.get_den())}), {q, q, 0, 0});
    return a;
  }

  // Validates irreducibility (degree <= factor cap) and that the box holds exactly one root.
  static AlgebraicNumber from_minpoly(const std::vector<mpz_class>& low_to_high, const Box& box) {
    MultiPoly p = MultiPoly::univariate("y", low_to_high);
    require(!p.is_zero() && p.degree("y") >= 1, ErrorKind::invalid_argument, "minimal polynomial must have degree >= 1");
    require(box.re_lo <= box.re_hi && box.im_lo <= box.im_hi, ErrorKind::invalid_argument, "empty isolating box");
    mpz_class cont = p.content();
    if (sgn(p.coefficients_in("y").back().constant_value()) < 0) cont = -cont;
    p = p.divide_exact(cont);
    if (p.degree("y") <= kFactorCap) {
      std::size_t nontrivial = 0;
      for (auto& [f, m] : kronecker_factor(p))
        if (!f.is_constant()) nontrivial += m;
      require(nontrivial == 1, ErrorKind::invalid_argument, "minimal polynomial " + p.to_string() + " is reducible");
    }
    AlgebraicNumber a(p, box);
    unsigned inside = a.count_roots_in_box();
    require(inside == 1, ErrorKind::invalid_argument,
            "isolating box contains " + std::to_string(inside) + " roots of " + p.to_string());
    return a;
  }

  const MultiPoly& minpoly() const { return minpoly_; }
  const Box& box() const { return box_; }
  unsigned degree() const { return minpoly_.degree("y"); }
  std::optional<mpq_class> as_rational() const {
    if (degree() != 1) return std::nullopt;
    auto c = detail::coeffs_low_high(minpoly_, "y");
    mpq_class q(-c[0], c[1]);
    q.canonicalize();
    return q;
  }
  bool is_zero() const { return degree() == 1 && minpoly_.constant_value() == 0; }
  bool is_one() const {
    auto q = as_rational();
    return q && *q == 1;
  }

  // Certified enclosure of the root at (at least) the requested precision.
  Ball ball(mpfr_prec_t prec) const {
    if (auto q = as_rational()) return Ball::from_mpq(*q, prec);
    return with_precision_escalation(prec, kDefaultPrecisionCap, [&](long p, bool) {
      auto roots = isolate_roots(exact_coefficients(minpoly_, p), p);
      std::optional<Ball> hit;
      for (const auto& r : roots) {
        int cls = classify(r);
        require(cls >= 0, ErrorKind::refine_precision, "root enclosure straddles the box");
        if (cls == 1) hit = r.disc;
      }
      require(hit.has_value(), ErrorKind::domain, "no root in the isolating box");
      return hit->with_prec(prec);
    });
  }

  json to_json() const {
    json c = json::array();
    for (auto& v : detail::coeffs_low_high(minpoly_, "y")) c.push_back(v.get_str());
    return {{"minpoly", c},
            {"box",
             {{"re", {rational_to_string(box_.re_lo), rational_to_string(box_.re_hi)}},
              {"im", {rational_to_string(box_.im_lo), rational_to_string(box_.im_hi)}}}}};
  }

  static AlgebraicNumber from_json(const json& j) {
    if (j.is_number_integer() || j.is_string()) return rational(j.is_string() ? parse_rational(j.get<std::string>())
                                                                              : mpq_class(parse_integer(j)));
    require(j.is_object() && j.contains("minpoly"), ErrorKind::parse, "algebraic number needs 'minpoly'");
    require(j["minpoly"].is_array() && !j["minpoly"].empty(), ErrorKind::parse, "'minpoly' must be a nonempty array");
    std::vector<mpq_class> qs;
    mpz_class den = 1;
    for (const auto& c : j["minpoly"]) {
      mpq_class q = c.is_string() ? parse_rational(c.get<std::string>()) : mpq_class(parse_integer(c));
      mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), q.get_den().get_mpz_t());
      qs.push_back(q);
    }
    std::vector<mpz_class> zs;
    for (auto& q : qs) zs.push_back(mpq_class(q * den).get_num());
    if (qs.size() == 2 && !j.contains("box")) {
      require(zs[1] != 0, ErrorKind::parse, "degenerate linear minpoly");
      return rational(mpq_class(-zs[0], zs[1]));
    }
    require(j.contains("box") && j["box"].is_object(), ErrorKind::parse, "algebraic number needs 'box'");
    auto range = [&](const char* key) {
      const json& b = j["box"];
      require(b.contains(key) && b[key].is_array() && b[key].size() == 2, ErrorKind::parse,
              std::string("box.") + key + " must be [lo, hi]");
      auto get = [](const json& v) {
        return v.is_string() ? parse_rational(v.get<std::string>()) : mpq_class(parse_integer(v));
      };
      return std::pair<mpq_class, mpq_class>(get(b[key][0]), get(b[key][1]));
    };
    auto [rl, rh] = range("re");
    auto [il, ih] = range("im");
    return from_minpoly(zs, {rl, rh, il, ih});
  }

 private:
  AlgebraicNumber(MultiPoly p, Box b) : minpoly_(std::move(p)), box_(std::move(b)) {}

  // 1 inside the box, 0 outside, -1 undecided.
  int classify(const RootEnclosure& r) const {
    mpq_class cr = r.disc.re_q(), ci = r.real ? mpq_class(0) : r.disc.im_q(), rad = r.disc.rad_q();
    mpq_class rl = cr - rad, rh = cr + rad, il = r.real ? ci : ci - rad, ih = r.real ? ci : ci + rad;
    if (rl >= box_.re_lo && rh <= box_.re_hi && il >= box_.im_lo && ih <= box_.im_hi) return 1;
    if (rh < box_.re_lo || rl > box_.re_hi || ih < box_.im_lo || il > box_.im_hi) return 0;
    return -1;
  }

  unsigned count_roots_in_box() const {
    if (auto q = as_rational()) return (*q >= box_.re_lo && *q <= box_.re_hi && 0 >= box_.im_lo && 0 <= box_.im_hi) ? 1 : 0;
    return with_precision_escalation(64, 8192, [&](long p, bool) {
      unsigned n = 0;
      for (const auto& r : isolate_roots(exact_coefficients(minpoly_, p), p)) {
        int cls = classify(r);
        require(cls >= 0, ErrorKind::refine_precision, "cannot decide whether a root lies in the box");
        n += static_cast<unsigned>(cls);
      }
      return n;
    });
  }

  MultiPoly minpoly_;
  Box box_;
};

struct QuadraticData {
  mpz_class d, b0, b1;
};

// Smallest d with d*beta integral, and (d beta)^2 = b0 + b1 (d beta).
inline QuadraticData quadratic_data(const AlgebraicNumber& beta) {
  require(beta.degree() == 2, ErrorKind::not_quadratic,
          "beta has degree " + std::to_string(beta.degree()) + ", expected 2");
  auto c = detail::coeffs_low_high(beta.minpoly(), "y");
  const mpz_class &a = c[2], &b = c[1], &cc = c[0];
  for (mpz_class d = 1;; ++d) {
    mpz_class nb = d * b, nc = d * d * cc;
    if (mpz_divisible_p(nb.get_mpz_t(), a.get_mpz_t()) && mpz_divisible_p(nc.get_mpz_t(), a.get_mpz_t()))
      return {d, mpz_class(-nc / a), mpz_class(-nb / a)};
  }
}

struct TranscendentalTriple {
  Ball L, tau1, tau2;
  Ball log_a1, log_a2, beta;
  long precision_bits = 0;
};

inline TranscendentalTriple eval_triple(const AlgebraicNumber& a1, const AlgebraicNumber& a2, const AlgebraicNumber& beta,
                                        long precision_bits) {
  clamp_precision(precision_bits);
  require(!a1.is_zero() && !a2.is_zero(), ErrorKind::domain, "log undefined: alpha is zero");
  require(!a1.is_one(), ErrorKind::domain, "zero divisor: log alpha1 = 0");
  mpfr_prec_t p = precision_bits;
  TranscendentalTriple t;
  t.precision_bits = precision_bits;
  t.log_a1 = a1.ball(p).log();
  t.log_a2 = a2.ball(p).log();
  t.beta = beta.ball(p);
  require(t.log_a1.excludes_zero(), ErrorKind::refine_precision, "log alpha1 not certified nonzero");
  t.L = t.log_a2 / t.log_a1;
  t.tau1 = (t.beta * t.log_a1).exp();
  t.tau2 = (t.beta * t.log_a2).exp();
  return t;
}

// Variables x, y, z are bound to L, tau1, tau2.
inline Ball eval_poly_at_triple(const MultiPoly& P, const TranscendentalTriple& T) {
  for (const auto& v : P.support_vars())
    require(v == "x" || v == "y" || v == "z", ErrorKind::unknown_variable,
            "variable '" + v + "' is not one of x, y, z");
  return eval_poly(P, {{"x", T.L}, {"y", T.tau1}, {"z", T.tau2}}, T.precision_bits);
}

struct IndependenceVerdict {
  bool independent = true;
  long m = 0, n = 0;
  unsigned bound = 0;
};

namespace detail {

// Polynomial in y vanishing at a^k (k may be negative).
inline MultiPoly power_annihilator(const MultiPoly& f, long k) {
  MultiPoly g = f;
  if (k < 0) {
    auto c = coeffs_low_high(f, "y");
    std::reverse(c.begin(), c.end());
    g = MultiPoly::univariate("y", c);
    k = -k;
  }
  if (k == 1) return g;
  MultiPoly gt = g.compose("y", MultiPoly::variable("t"));
  MultiPoly rel = MultiPoly::variable("y") - MultiPoly::variable("t").pow(static_cast<unsigned>(k));
  return resultant(gt, rel, "t");
}

// Polynomial in y vanishing at u*v given annihilators of u and v.
inline MultiPoly product_annihilator(const MultiPoly& U, const MultiPoly& V) {
  MultiPoly ut = U.compose("y", MultiPoly::variable("t"));
  auto c = coeffs_low_high(V, "y");
  unsigned d = static_cast<unsigned>(c.size() - 1);
  MultiPoly hom;
  for (unsigned i = 0; i <= d; ++i)
    hom += c[i] * MultiPoly::variable("y").pow(i) * MultiPoly::variable("t").pow(d - i);
  return resultant(ut, hom, "t");
}

inline bool exact_rational_relation(const mpq_class& a, const mpq_class& b, long m, long n) {
  auto pw = [](const mpq_class& q, long e) {
    mpq_class base = e < 0 ? mpq_class(1) / q : q;
    mpq_class r = 1;
    for (long i = 0; i < (e < 0 ? -e : e); ++i) r *= base;
    return r;
  };
  return pw(a, m) * pw(b, n) == 1;
}

// Decides a1^m a2^n == 1 for algebraic inputs via screening and exact confirmation.
inline bool algebraic_relation(const AlgebraicNumber& a1, const AlgebraicNumber& a2, long m, long n) {
  return with_precision_escalation(128, 4096, [&](long p, bool) {
    Ball g = a1.ball(p).pow(static_cast<unsigned long>(m < 0 ? -m : m));
    if (m < 0) g = g.inv();
    Ball h = a2.ball(p).pow(static_cast<unsigned long>(n < 0 ? -n : n));
    if (n < 0) h = h.inv();
    Ball prod = g * h;
    if (!prod.contains_point(1, 0)) return false;
    MultiPoly ann = product_annihilator(power_annihilator(a1.minpoly(), m), power_annihilator(a2.minpoly(), n));
    if (ann.is_zero()) fail(ErrorKind::domain, "degenerate annihilator");
    if (ann.substitute("y", 1).constant_value() != 0) return false;
    MultiPoly sq = squarefree_part(ann.drop_unused_vars(), "y");
    for (const auto& r : isolate_roots(exact_coefficients(sq, p), p))
      if (!r.disc.contains_point(1, 0) && r.disc.overlaps(prod)) fail(ErrorKind::refine_precision, "root 1 not isolated");
    return true;
  });
}

}  // namespace detail

// Exhaustive search for a1^m a2^n = 1 with 0 < max(|m|, |n|) <= bound; (m, n) normalized with m > 0 or m = 0 < n.
inline IndependenceVerdict mult_independence_check(const AlgebraicNumber& a1, const AlgebraicNumber& a2, unsigned bound) {
  require(!a1.is_zero() && !a2.is_zero(), ErrorKind::domain, "alpha must be nonzero");
  IndependenceVerdict v;
  v.bound = bound;
  auto q1 = a1.as_rational(), q2 = a2.as_rational();
  for (long s = 1; s <= static_cast<long>(bound); ++s) {
    for (long m = s; m >= 0; --m) {
      for (long n = -s; n <= s; ++n) {
        if (std::max(m, n < 0 ? -n : n) != s) continue;
        if (m == 0 && n <= 0) continue;
        bool rel = (q1 && q2) ? detail::exact_rational_relation(*q1, *q2, m, n) : detail::algebraic_relation(a1, a2, m, n);
        if (rel) {
          v.independent = false;
          v.m = m;
          v.n = n;
          return v;
        }
      }
    }
  }
  return v;
}

// log a2 / log a1 = p/q with 0 < max(|p|, q) <= bound, principal logs; returns (q, -p) as (m, n) when found.
inline IndependenceVerdict log_ratio_rational_check(const AlgebraicNumber& a1, const AlgebraicNumber& a2, unsigned bound) {
  require(!a1.is_one(), ErrorKind::domain, "zero divisor: log alpha1 = 0");
  IndependenceVerdict v = mult_independence_check(a1, a2, bound);
  if (v.independent) return v;
  // The relation a1^m a2^n = 1 gives m log a1 + n log a2 in 2 pi i Z; the ratio is rational iff that multiple is 0.
  Ball s = with_precision_escalation(128, 4096, [&](long p, bool) {
    Ball val = a1.ball(p).log().mul_mpz(v.m) + a2.ball(p).log().mul_mpz(v.n);
    require(val.rad() < Mag::from_d(1.0), ErrorKind::refine_precision, "log combination too wide");
    return val;
  });
  if (!s.contains_point(0, 0)) v.independent = true;
  return v;
}

inline AlgebraicNumber algebraic_from_text(const std::string& text) {
  std::string t = text;
  while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.pop_back();
  if (!t.empty() && (t[0] == '{' || t[0] == '"')) return AlgebraicNumber::from_json(parse_json_text(t, "algebraic number"));
  return AlgebraicNumber::rational(parse_rational(t));
}

}  // namespace gk
