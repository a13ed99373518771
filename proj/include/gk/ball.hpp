#pragma once

#include <algorithm>
#include <string>

#include "gk/real.hpp"

namespace gk {

// Closed complex disc: center (re, im) at working precision, radius rad.
class Ball {
 public:
  explicit Ball(mpfr_prec_t prec = 128) : re_(prec), im_(prec) {}

  static Ball from_si(long v, mpfr_prec_t prec) {
    Ball b(prec);
    Mag e;
    charge(e, b.re_.get(), mpfr_set_si(b.re_.get(), v, MPFR_RNDN));
    b.rad_ = e;
    return b;
  }
  static Ball from_mpz(const mpz_class& v, mpfr_prec_t prec) {
    Ball b(prec);
    Mag e;
    charge(e, b.re_.get(), mpfr_set_z(b.re_.get(), v.get_mpz_t(), MPFR_RNDN));
    b.rad_ = e;
    return b;
  }
  static Ball from_mpq(const mpq_class& re, const mpq_class& im, mpfr_prec_t prec) {
    Ball b(prec);
    Mag e;
    charge(e, b.re_.get(), mpfr_set_q(b.re_.get(), re.get_mpq_t(), MPFR_RNDN));
    charge(e, b.im_.get(), mpfr_set_q(b.im_.get(), im.get_mpq_t(), MPFR_RNDN));
    b.rad_ = e;
    return b;
  }
  static Ball from_mpq(const mpq_class& re, mpfr_prec_t prec) { return from_mpq(re, mpq_class(0), prec); }
  static Ball from_parts(const Real& re, const Real& im, const Mag& rad) {
    mpfr_prec_t p = std::max(re.prec(), im.prec());
    Ball b(p);
    Mag e = rad;
    charge(e, b.re_.get(), mpfr_set(b.re_.get(), re.get(), MPFR_RNDN));
    charge(e, b.im_.get(), mpfr_set(b.im_.get(), im.get(), MPFR_RNDN));
    b.rad_ = e;
    return b;
  }
  static Ball pi(mpfr_prec_t prec) {
    Ball b(prec);
    Mag e;
    charge(e, b.re_.get(), mpfr_const_pi(b.re_.get(), MPFR_RNDN));
    b.rad_ = e;
    return b;
  }
  static Ball imag_unit(mpfr_prec_t prec) {
    Ball b(prec);
    mpfr_set_ui(b.im_.get(), 1, MPFR_RNDN);
    return b;
  }

  mpfr_prec_t prec() const { return re_.prec(); }
  const Real& mid_re() const { return re_; }
  const Real& mid_im() const { return im_; }
  const Mag& rad() const { return rad_; }
  Real& mid_re_mut() { return re_; }
  Real& mid_im_mut() { return im_; }
  bool is_exact() const { return rad_.is_zero(); }
  bool is_finite() const { return re_.is_finite() && im_.is_finite() && rad_.is_finite(); }
  void add_error(const Mag& e) { rad_ += e; }

  Ball with_prec(mpfr_prec_t p) const {
    Ball b(p);
    Mag e = rad_;
    charge(e, b.re_.get(), mpfr_set(b.re_.get(), re_.get(), MPFR_RNDN));
    charge(e, b.im_.get(), mpfr_set(b.im_.get(), im_.get(), MPFR_RNDN));
    b.rad_ = e;
    return b;
  }

  Ball conj() const {
    Ball b = *this;
    mpfr_neg(b.im_.get(), b.im_.get(), MPFR_RNDN);
    return b;
  }

  // Upper bound on |z| over the disc.
  Mag abs_upper() const {
    Mag m;
    mpfr_hypot(m.raw(), re_.get(), im_.get(), MPFR_RNDU);
    return m + rad_;
  }
  // Lower bound on |z| over the disc (zero when the disc may contain 0).
  Real abs_lower() const {
    Real h(std::max<mpfr_prec_t>(prec(), kMagPrec));
    mpfr_hypot(h.get(), re_.get(), im_.get(), MPFR_RNDD);
    mpfr_sub(h.get(), h.get(), rad_.get(), MPFR_RNDD);
    if (h.sign() < 0) mpfr_set_zero(h.get(), 1);
    return h;
  }
  bool excludes_zero() const { return abs_lower().sign() > 0; }

  // Center as exact rationals.
  mpq_class re_q() const { return re_.to_mpq(); }
  mpq_class im_q() const { return im_.to_mpq(); }
  mpq_class rad_q() const {
    mpq_class q;
    mpfr_get_q(q.get_mpq_t(), rad_.get());
    return q;
  }

  bool contains_point(const mpq_class& re, const mpq_class& im) const {
    mpq_class dx = re - re_q(), dy = im - im_q(), r = rad_q();
    return dx * dx + dy * dy <= r * r;
  }
  bool contains(const Ball& inner) const {
    mpq_class dx = inner.re_q() - re_q(), dy = inner.im_q() - im_q();
    mpq_class slack = rad_q() - inner.rad_q();
    if (slack < 0) return false;
    return dx * dx + dy * dy <= slack * slack;
  }
  bool overlaps(const Ball& o) const {
    mpq_class dx = o.re_q() - re_q(), dy = o.im_q() - im_q();
    mpq_class s = rad_q() + o.rad_q();
    return dx * dx + dy * dy <= s * s;
  }

  // Decimal rendering whose printed radius covers the decimal rounding of the center.
  std::string mid_re_str() const { return re_.str(digits()); }
  std::string mid_im_str() const { return im_.str(digits()); }
  std::string rad_str() const {
    Mag r = rad_;
    if (!re_.is_zero() || !im_.is_zero()) {
      Mag scale;
      mpfr_hypot(scale.raw(), re_.get(), im_.get(), MPFR_RNDU);
      Mag dec;
      mpfr_set_d(dec.raw(), 1.0, MPFR_RNDU);
      mpfr_div_ui(dec.raw(), dec.get(), 10, MPFR_RNDU);
      mpfr_pow_si(dec.raw(), dec.get(), digits() - 1, MPFR_RNDU);
      if (!exact_decimal()) r += scale * dec.mul_ui(2);
    }
    return r.str(6);
  }
  int digits() const { return static_cast<int>(static_cast<double>(prec()) * 0.30103) + 3; }

  friend Ball operator-(const Ball& a) {
    Ball b = a;
    mpfr_neg(b.re_.get(), b.re_.get(), MPFR_RNDN);
    mpfr_neg(b.im_.get(), b.im_.get(), MPFR_RNDN);
    return b;
  }
  friend Ball operator+(const Ball& a, const Ball& b) { return addsub(a, b, false); }
  friend Ball operator-(const Ball& a, const Ball& b) { return addsub(a, b, true); }
  friend Ball operator*(const Ball& a, const Ball& b) {
    mpfr_prec_t p = std::max(a.prec(), b.prec());
    Ball c(p);
    Mag e;
    Real t1(p), t2(p);
    charge(e, t1.get(), mpfr_mul(t1.get(), a.re_.get(), b.re_.get(), MPFR_RNDN));
    charge(e, t2.get(), mpfr_mul(t2.get(), a.im_.get(), b.im_.get(), MPFR_RNDN));
    charge(e, c.re_.get(), mpfr_sub(c.re_.get(), t1.get(), t2.get(), MPFR_RNDN));
    charge(e, t1.get(), mpfr_mul(t1.get(), a.re_.get(), b.im_.get(), MPFR_RNDN));
    charge(e, t2.get(), mpfr_mul(t2.get(), a.im_.get(), b.re_.get(), MPFR_RNDN));
    charge(e, c.im_.get(), mpfr_add(c.im_.get(), t1.get(), t2.get(), MPFR_RNDN));
    if (!a.rad_.is_zero() || !b.rad_.is_zero()) {
      Mag ma, mb;
      mpfr_hypot(ma.raw(), a.re_.get(), a.im_.get(), MPFR_RNDU);
      mpfr_hypot(mb.raw(), b.re_.get(), b.im_.get(), MPFR_RNDU);
      e += ma * b.rad_ + mb * a.rad_ + a.rad_ * b.rad_;
    }
    c.rad_ = e;
    return c;
  }
  Ball& operator+=(const Ball& o) { return *this = *this + o; }
  Ball& operator-=(const Ball& o) { return *this = *this - o; }
  Ball& operator*=(const Ball& o) { return *this = *this * o; }

  Ball mul_mpz(const mpz_class& k) const { return *this * from_mpz(k, prec()); }

  Ball inv() const {
    mpfr_prec_t p = prec();
    Real lo = abs_lower();
    require(lo.sign() > 0, ErrorKind::domain, "zero divisor");
    Real n2(p + 16), v_re(p), v_im(p), t(p + 16);
    mpfr_sqr(n2.get(), re_.get(), MPFR_RNDN);
    mpfr_sqr(t.get(), im_.get(), MPFR_RNDN);
    mpfr_add(n2.get(), n2.get(), t.get(), MPFR_RNDN);
    mpfr_div(v_re.get(), re_.get(), n2.get(), MPFR_RNDN);
    mpfr_div(v_im.get(), im_.get(), n2.get(), MPFR_RNDN);
    mpfr_neg(v_im.get(), v_im.get(), MPFR_RNDN);
    Ball v = from_parts(v_re, v_im, Mag());
    Ball c = from_parts(re_, im_, Mag());
    Ball resid = from_si(1, p) - v * c;
    // |1/c - v| <= |1 - v c| / |c|
    Real clo(kMagPrec);
    mpfr_hypot(clo.get(), re_.get(), im_.get(), MPFR_RNDD);
    Mag err;
    mpfr_div(err.raw(), resid.abs_upper().get(), clo.get(), MPFR_RNDU);
    if (!rad_.is_zero()) {
      Real den(kMagPrec);
      mpfr_mul(den.get(), clo.get(), lo.get(), MPFR_RNDD);
      Mag in;
      mpfr_div(in.raw(), rad_.get(), den.get(), MPFR_RNDU);
      err += in;
    }
    v.rad_ = err;
    return v;
  }
  friend Ball operator/(const Ball& a, const Ball& b) { return a * b.inv(); }

  Ball pow(unsigned long n) const {
    Ball result = from_si(1, prec());
    Ball base = *this;
    while (n) {
      if (n & 1) result = result * base;
      n >>= 1;
      if (n) base = base * base;
    }
    return result;
  }

  Ball exp() const {
    mpfr_prec_t p = prec();
    Real er(p), cs(p), sn(p);
    Mag e1, e2;
    charge(e1, er.get(), mpfr_exp(er.get(), re_.get(), MPFR_RNDN));
    charge(e2, cs.get(), mpfr_cos(cs.get(), im_.get(), MPFR_RNDN));
    charge(e2, sn.get(), mpfr_sin(sn.get(), im_.get(), MPFR_RNDN));
    Ball out = from_parts(er, Real(p), e1) * from_parts(cs, sn, e2);
    if (!rad_.is_zero()) {
      Mag big, grow;
      mpfr_exp(big.raw(), re_.get(), MPFR_RNDU);
      mpfr_expm1(grow.raw(), rad_.get(), MPFR_RNDU);
      out.rad_ += big * grow;
    }
    return out;
  }

  // Principal branch; a disc meeting the cut with positive radius is rejected.
  Ball log() const {
    mpfr_prec_t p = prec();
    Real lo = abs_lower();
    require(lo.sign() > 0, ErrorKind::domain, "log undefined at zero");
    if (!rad_.is_zero() && re_.sign() <= 0) {
      Real ai(kMagPrec);
      mpfr_abs(ai.get(), im_.get(), MPFR_RNDD);
      require(mpfr_greater_p(ai.get(), rad_.get()) != 0, ErrorKind::domain,
              "ball crosses the branch cut of log");
    }
    Ball out(p);
    Real m(p), mlo(kMagPrec);
    Mag e;
    mpfr_hypot(m.get(), re_.get(), im_.get(), MPFR_RNDN);
    mpfr_hypot(mlo.get(), re_.get(), im_.get(), MPFR_RNDD);
    Mag um = ulp_of(m.get());
    Mag q;
    mpfr_div(q.raw(), um.get(), mlo.get(), MPFR_RNDU);
    e += q.mul_ui(2);
    charge(e, out.re_.get(), mpfr_log(out.re_.get(), m.get(), MPFR_RNDN));
    charge(e, out.im_.get(), mpfr_atan2(out.im_.get(), im_.get(), re_.get(), MPFR_RNDN));
    if (!rad_.is_zero()) {
      Real ratio(kMagPrec);
      mpfr_div(ratio.get(), rad_.get(), mlo.get(), MPFR_RNDU);
      mpfr_neg(ratio.get(), ratio.get(), MPFR_RNDD);
      Real l1(kMagPrec);
      mpfr_log1p(l1.get(), ratio.get(), MPFR_RNDD);
      Mag grow;
      mpfr_neg(grow.raw(), l1.get(), MPFR_RNDU);
      e += grow;
    }
    out.rad_ = e;
    return out;
  }

  // Bounds on log|z|: lower may be -inf when the disc meets zero.
  Real log_abs_upper() const {
    Real r(kMagPrec);
    mpfr_log(r.get(), abs_upper().get(), MPFR_RNDU);
    return r;
  }
  Real log_abs_lower() const {
    Real lo = abs_lower();
    Real r(kMagPrec);
    if (lo.sign() <= 0) {
      mpfr_set_inf(r.get(), -1);
      return r;
    }
    mpfr_log(r.get(), lo.get(), MPFR_RNDD);
    return r;
  }

 private:
  static Ball addsub(const Ball& a, const Ball& b, bool sub) {
    mpfr_prec_t p = std::max(a.prec(), b.prec());
    Ball c(p);
    Mag e = a.rad_ + b.rad_;
    if (sub) {
      charge(e, c.re_.get(), mpfr_sub(c.re_.get(), a.re_.get(), b.re_.get(), MPFR_RNDN));
      charge(e, c.im_.get(), mpfr_sub(c.im_.get(), a.im_.get(), b.im_.get(), MPFR_RNDN));
    } else {
      charge(e, c.re_.get(), mpfr_add(c.re_.get(), a.re_.get(), b.re_.get(), MPFR_RNDN));
      charge(e, c.im_.get(), mpfr_add(c.im_.get(), a.im_.get(), b.im_.get(), MPFR_RNDN));
    }
    c.rad_ = e;
    return c;
  }
  bool exact_decimal() const {
    return mpfr_integer_p(re_.get()) && mpfr_integer_p(im_.get()) &&
           mpfr_cmpabs_ui(re_.get(), 1000000000UL) < 0 && mpfr_cmpabs_ui(im_.get(), 1000000000UL) < 0;
  }

  Real re_, im_;
  Mag rad_;
};

inline Ball exp(const Ball& b) { return b.exp(); }
inline Ball log(const Ball& b) { return b.log(); }

}  // namespace gk
