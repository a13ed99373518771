#pragma once

#include <mpfr.h>
#include <gmpxx.h>

#include <cstdlib>
#include <string>
#include <utility>

#include "gk/error.hpp"

namespace gk {

constexpr mpfr_prec_t kMagPrec = 64;
constexpr long kMinPrecision = 64;
constexpr long kMaxPrecision = 65536;

// RAII wrapper; precision travels with the value.
class Real {
 public:
  explicit Real(mpfr_prec_t prec = 128) {
    mpfr_init2(v_, prec);
    mpfr_set_zero(v_, 1);
  }
  Real(const Real& o) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  Real(Real&& o) noexcept {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_swap(v_, o.v_);
  }
  Real& operator=(const Real& o) {
    if (this != &o) {
      mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  Real& operator=(Real&& o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }
  ~Real() { mpfr_clear(v_); }

  static Real from_si(long x, mpfr_prec_t prec = kMagPrec) {
    Real r(prec);
    mpfr_set_si(r.v_, x, MPFR_RNDN);
    return r;
  }
  static Real from_d(double x, mpfr_prec_t prec = 64) {
    Real r(prec);
    mpfr_set_d(r.v_, x, MPFR_RNDN);
    return r;
  }

  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }
  mpfr_prec_t prec() const { return mpfr_get_prec(v_); }
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  bool is_finite() const { return mpfr_number_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }

  mpq_class to_mpq() const {
    require(is_finite(), ErrorKind::domain, "non-finite value has no rational form");
    mpq_class q;
    mpfr_get_q(q.get_mpq_t(), v_);
    return q;
  }

  std::string str(int digits = 20, char rnd = 'N') const {
    char* buf = nullptr;
    std::string fmt = std::string("%.*R") + rnd + "g";
    mpfr_asprintf(&buf, fmt.c_str(), digits, v_);
    std::string s(buf);
    mpfr_free_str(buf);
    return s;
  }

 private:
  mpfr_t v_;
};

// Nonnegative magnitude; every operation rounds up.
class Mag {
 public:
  Mag() : v_(kMagPrec) {}
  static Mag from_real_abs(mpfr_srcptr x) {
    Mag m;
    mpfr_abs(m.v_.get(), x, MPFR_RNDU);
    return m;
  }
  static Mag pow2(long e) {
    Mag m;
    mpfr_set_ui_2exp(m.v_.get(), 1, e, MPFR_RNDU);
    return m;
  }
  static Mag from_d(double x) {
    Mag m;
    mpfr_set_d(m.v_.get(), x < 0 ? -x : x, MPFR_RNDU);
    return m;
  }
  static Mag from_mpq(const mpq_class& q) {
    Mag m;
    mpq_class a = abs(q);
    mpfr_set_q(m.v_.get(), a.get_mpq_t(), MPFR_RNDU);
    return m;
  }
  static Mag inf() {
    Mag m;
    mpfr_set_inf(m.v_.get(), 1);
    return m;
  }

  mpfr_srcptr get() const { return v_.get(); }
  mpfr_ptr raw() { return v_.get(); }
  bool is_zero() const { return v_.is_zero(); }
  bool is_finite() const { return v_.is_finite(); }
  double to_double() const { return mpfr_get_d(v_.get(), MPFR_RNDU); }
  std::string str(int digits = 6) const { return v_.str(digits, 'U'); }

  Mag& operator+=(const Mag& o) {
    mpfr_add(v_.get(), v_.get(), o.v_.get(), MPFR_RNDU);
    return *this;
  }
  Mag& operator*=(const Mag& o) {
    mpfr_mul(v_.get(), v_.get(), o.v_.get(), MPFR_RNDU);
    return *this;
  }
  friend Mag operator+(Mag a, const Mag& b) { return a += b; }
  friend Mag operator*(Mag a, const Mag& b) { return a *= b; }
  Mag mul_2exp(long e) const {
    Mag m;
    mpfr_mul_2si(m.v_.get(), v_.get(), e, MPFR_RNDU);
    return m;
  }
  Mag mul_ui(unsigned long k) const {
    Mag m;
    mpfr_mul_ui(m.v_.get(), v_.get(), k, MPFR_RNDU);
    return m;
  }
  friend bool operator<(const Mag& a, const Mag& b) { return mpfr_less_p(a.get(), b.get()) != 0; }
  friend bool operator<=(const Mag& a, const Mag& b) { return mpfr_lessequal_p(a.get(), b.get()) != 0; }
  static Mag max(const Mag& a, const Mag& b) { return a < b ? b : a; }

 private:
  Real v_;
};

// Unit in the last place of x at its own precision; zero for exact zero.
inline Mag ulp_of(mpfr_srcptr x) {
  if (mpfr_zero_p(x)) return Mag();
  require(mpfr_number_p(x) != 0, ErrorKind::domain, "non-finite intermediate value");
  return Mag::pow2(mpfr_get_exp(x) - static_cast<long>(mpfr_get_prec(x)));
}

// Accumulates the rounding error of an MPFR call with ternary value t.
inline void charge(Mag& err, mpfr_srcptr result, int t) {
  if (t != 0) {
    require(!mpfr_zero_p(result), ErrorKind::refine_precision, "underflow in ball arithmetic");
    err += ulp_of(result);
  }
}

inline long clamp_precision(long bits) {
  require(bits >= kMinPrecision && bits <= kMaxPrecision, ErrorKind::invalid_argument,
          "precision_bits must lie in [64, 65536], got " + std::to_string(bits));
  return bits;
}

}  // namespace gk
