#pragma once

#include <algorithm>
#include <complex>
#include <vector>

#include "gk/polyeval.hpp"

namespace gk {

// Certified enclosure of one root; `real` means the root is known to be real.
struct RootEnclosure {
  Ball disc;
  bool real = false;
};

namespace detail {

inline Ball midpoint(const Ball& b) { return Ball::from_parts(b.mid_re(), b.mid_im(), Mag()); }

inline std::pair<Ball, Ball> horner_with_derivative(const std::vector<Ball>& c, const Ball& z) {
  Ball p = c.back(), dp = Ball::from_si(0, z.prec());
  for (std::size_t k = c.size() - 1; k-- > 0;) {
    dp = dp * z + p;
    p = p * z + c[k];
  }
  return {p, dp};
}

// Double-precision Aberth warm start.
inline std::vector<std::complex<double>> aberth_double(const std::vector<std::complex<double>>& c) {
  std::size_t n = c.size() - 1;
  double rad = 0;
  for (std::size_t k = 0; k < n; ++k) rad = std::max(rad, std::abs(c[k] / c[n]));
  rad = 1 + rad;
  std::vector<std::complex<double>> z(n);
  for (std::size_t j = 0; j < n; ++j) z[j] = std::polar(rad, 6.283185307179586 * static_cast<double>(j) / n + 0.4);
  for (int it = 0; it < 500; ++it) {
    double worst = 0;
    for (std::size_t i = 0; i < n; ++i) {
      std::complex<double> p = c[n], dp = 0;
      for (std::size_t k = n; k-- > 0;) {
        dp = dp * z[i] + p;
        p = p * z[i] + c[k];
      }
      if (p == 0.0) continue;
      std::complex<double> ratio = p / dp, s = 0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) s += 1.0 / (z[i] - z[j]);
      std::complex<double> w = ratio / (1.0 - ratio * s);
      if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) continue;
      z[i] -= w;
      worst = std::max(worst, std::abs(w) / std::max(1.0, std::abs(z[i])));
    }
    if (worst < 1e-14) break;
  }
  return z;
}

}  // namespace detail

// Isolating discs for all roots of sum c_k y^k (ball coefficients); throws refine_precision when
// the discs cannot be certified pairwise disjoint.
inline std::vector<RootEnclosure> isolate_roots(const std::vector<Ball>& coeffs, mpfr_prec_t prec) {
  require(coeffs.size() >= 2, ErrorKind::no_roots, "constant polynomial has no roots");
  std::vector<Ball> c;
  for (const auto& b : coeffs) c.push_back(b.with_prec(prec));
  require(c.back().excludes_zero(), ErrorKind::refine_precision, "leading coefficient not certified nonzero");
  const std::size_t n = c.size() - 1;
  bool real_coeffs = true;
  for (const auto& b : c) real_coeffs = real_coeffs && b.mid_im().is_zero();

  std::vector<std::complex<double>> cd;
  for (const auto& b : c) cd.emplace_back(b.mid_re().to_double(), b.mid_im().to_double());
  bool finite = true;
  for (auto& v : cd) finite = finite && std::isfinite(v.real()) && std::isfinite(v.imag());
  std::vector<Ball> z(n);
  if (finite && cd.back() != 0.0) {
    auto zd = detail::aberth_double(cd);
    for (std::size_t i = 0; i < n; ++i) z[i] = Ball::from_parts(Real::from_d(zd[i].real(), prec), Real::from_d(zd[i].imag(), prec), Mag());
  } else {
    for (std::size_t i = 0; i < n; ++i)
      z[i] = Ball::from_parts(Real::from_d(std::cos(0.4 + 6.283185307179586 * i / n) * 2, prec),
                              Real::from_d(std::sin(0.4 + 6.283185307179586 * i / n) * 2, prec), Mag());
  }
  std::vector<Ball> cm;
  for (const auto& b : c) cm.push_back(detail::midpoint(b));
  Mag tol = Mag::pow2(-static_cast<long>(prec) + 6);
  for (int it = 0; it < 200; ++it) {
    bool done = true;
    for (std::size_t i = 0; i < n; ++i) {
      auto [p, dp] = detail::horner_with_derivative(cm, z[i]);
      p = detail::midpoint(p);
      if (p.mid_re().is_zero() && p.mid_im().is_zero()) continue;
      dp = detail::midpoint(dp);
      if (!dp.excludes_zero()) {
        done = false;
        continue;
      }
      Ball ratio = detail::midpoint(p / dp), s = Ball::from_si(0, prec);
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        Ball d = detail::midpoint(z[i] - z[j]);
        if (d.excludes_zero()) s = s + detail::midpoint(d.inv());
      }
      Ball den = detail::midpoint(Ball::from_si(1, prec) - ratio * s);
      if (!den.excludes_zero()) {
        done = false;
        continue;
      }
      Ball w = detail::midpoint(ratio / den);
      z[i] = detail::midpoint(z[i] - w);
      Mag scale = Mag::max(Mag::from_d(1.0), z[i].abs_upper());
      if (!(w.abs_upper() <= tol * scale)) done = false;
    }
    if (done) break;
  }

  std::vector<RootEnclosure> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    Ball den = c.back();
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) den = den * (z[i] - z[j]);
    require(den.excludes_zero(), ErrorKind::refine_precision, "root approximations collide");
    Ball w = horner(c, z[i]) / den;
    Ball center = z[i] - w;
    Mag r = w.abs_upper().mul_ui(n - 1) + center.rad();
    out[i].disc = Ball::from_parts(center.mid_re(), center.mid_im(), r);
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      require(!out[i].disc.overlaps(out[j].disc), ErrorKind::refine_precision, "root discs overlap");
  if (real_coeffs) {
    for (std::size_t i = 0; i < n; ++i) {
      const Ball& d = out[i].disc;
      mpq_class im = d.im_q(), r = d.rad_q();
      if (abs(im) > r) continue;
      bool alone = true;
      for (std::size_t j = 0; j < n && alone; ++j)
        if (j != i) alone = !d.overlaps(out[j].disc.conj());
      if (alone) {
        out[i].disc = Ball::from_parts(d.mid_re(), Real(prec), d.rad());
        out[i].real = true;
      }
    }
  }
  return out;
}

inline std::vector<Ball> exact_coefficients(const MultiPoly& p, mpfr_prec_t prec) {
  auto sv = p.support_vars();
  require(sv.size() <= 1, ErrorKind::invalid_argument, "expected a univariate polynomial");
  std::vector<Ball> c;
  if (sv.empty()) {
    c.push_back(Ball::from_mpz(p.constant_value(), prec));
    return c;
  }
  for (const auto& k : p.drop_unused_vars().coefficients_in(sv[0])) c.push_back(Ball::from_mpz(k.constant_value(), prec));
  return c;
}

struct NearestRoot {
  Ball xi;
  Mag gap;  // certified upper bound on |target - xi|
  bool tie_broken = false;
};

// Root nearest to target; ties that cannot be separated break lexicographically on (Re, Im)
// when allowed, otherwise refine_precision is raised.
inline NearestRoot nearest_root(const std::vector<Ball>& coeffs, const Ball& target, mpfr_prec_t prec,
                                bool allow_tie_break = false) {
  std::size_t top = coeffs.size();
  while (top > 0 && coeffs[top - 1].is_exact() && coeffs[top - 1].mid_re().is_zero() && coeffs[top - 1].mid_im().is_zero())
    --top;
  require(top >= 2, ErrorKind::no_roots, "polynomial is constant in the root variable");
  std::vector<Ball> c(coeffs.begin(), coeffs.begin() + top);
  auto roots = isolate_roots(c, prec);
  std::vector<Mag> upper;
  std::vector<Real> lower;
  for (const auto& r : roots) {
    Ball d = r.disc - target.with_prec(prec);
    upper.push_back(d.abs_upper());
    lower.push_back(d.abs_lower());
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < roots.size(); ++i)
    if (upper[i] < upper[best]) best = i;
  bool certified = true;
  for (std::size_t j = 0; j < roots.size(); ++j)
    if (j != best && !(mpfr_less_p(upper[best].get(), lower[j].get()) != 0)) certified = false;
  NearestRoot out;
  if (!certified) {
    require(allow_tie_break, ErrorKind::refine_precision, "nearest root not separated at this precision");
    std::size_t pick = best;
    for (std::size_t j = 0; j < roots.size(); ++j) {
      if (mpfr_lessequal_p(lower[j].get(), upper[best].get()) == 0) continue;
      int cr = mpfr_cmp(roots[j].disc.mid_re().get(), roots[pick].disc.mid_re().get());
      int ci = mpfr_cmp(roots[j].disc.mid_im().get(), roots[pick].disc.mid_im().get());
      if (cr < 0 || (cr == 0 && ci < 0)) pick = j;
    }
    best = pick;
    out.tie_broken = true;
  }
  out.xi = roots[best].disc;
  out.gap = upper[best];
  return out;
}

inline NearestRoot nearest_root(const MultiPoly& p, const Ball& target, mpfr_prec_t prec, bool allow_tie_break = false) {
  require(!p.is_constant(), ErrorKind::no_roots, "constant polynomial has no roots");
  return nearest_root(exact_coefficients(p, prec), target, prec, allow_tie_break);
}

constexpr long kDefaultStartPrecision = 128;
constexpr long kDefaultPrecisionCap = 65536;

// Runs f(prec, at_cap) with doubling precision until it stops raising refine_precision.
template <class F>
auto with_precision_escalation(long start, long cap, F&& f) {
  for (long p = start;; p = std::min(2 * p, cap)) {
    try {
      return f(p, p >= cap);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::refine_precision || p >= cap) throw;
    }
  }
}

}  // namespace gk
