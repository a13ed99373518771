#pragma once

#include <array>
#include <cmath>
#include <functional>

#include "gk/algnum.hpp"
#include "gk/polyeval.hpp"
#include "gk/siegel.hpp"

namespace gk {

struct AuxParams {
  long N = 1;
  long N0 = 0, N1 = 0;
  long D1 = 1, D2 = 5;
  double K = 1.0;
  double C = 1.0, C1 = 1.0;
  double eps = 0.5;
  long k_mult = 0;  // 0 selects the smallest k satisfying the grid inequality
};

using Mu = std::array<long, 4>;
using Lambda = std::array<long, 3>;

struct GridPoint {
  Mu mu{};
  Ball value;
};

struct InequalityCheck {
  std::string name;
  bool holds = false;
  bool enforced = false;
};

inline long aux_unknowns(const AuxParams& p) { return (p.D1 + 1) * (p.D2 + 1) * (p.D2 + 1); }
inline long aux_equations(const AuxParams& p) { return (p.N + 1) * (p.N + 1) * (p.N + 1) * (p.N + 1); }

inline mpz_class pow4(long v) {
  mpz_class r = v;
  return r * r * r * r;
}

inline long default_k_mult(const AuxParams& p) {
  if (p.N <= 0) return 0;
  mpz_class need = 2 * mpz_class(aux_unknowns(p));
  for (long k = 1;; ++k)
    if (pow4(k * p.N + 1) >= need) return k;
}

inline long resolved_k_mult(const AuxParams& p) { return p.k_mult > 0 ? p.k_mult : default_k_mult(p); }

inline std::vector<InequalityCheck> check_params(const AuxParams& p) {
  require(p.N >= 0 && p.D1 >= 0 && p.D2 >= 0, ErrorKind::invalid_argument, "N, D1, D2 must be nonnegative");
  require(p.eps > 0 && p.eps <= 0.5, ErrorKind::invalid_argument, "eps must lie in (0, 1/2]");
  std::vector<InequalityCheck> out;
  mpz_class unk = aux_unknowns(p), eq = aux_equations(p);
  out.push_back({"unknowns > equations", unk > eq, true});
  out.push_back({"2^6 (N+1)^4 < (D1+1)(D2+1)^2", 64 * eq < unk, false});
  long k = resolved_k_mult(p);
  out.push_back({"(kN+1)^4 >= 2 (D1+1)(D2+1)^2", k > 0 && pow4(k * p.N + 1) >= 2 * unk, true});
  out.push_back({"D1 < N^4", mpz_class(p.D1) < pow4(p.N), false});
  out.push_back({"D2 < N^(3-eps)", static_cast<double>(p.D2) < std::pow(static_cast<double>(p.N), 3.0 - p.eps), false});
  return out;
}

inline json checks_to_json(const std::vector<InequalityCheck>& c) {
  json a = json::array();
  for (const auto& x : c) a.push_back({{"inequality", x.name}, {"holds", x.holds}, {"status", x.holds ? "ok" : (x.enforced ? "violated" : "waived")}});
  return a;
}

// z_mu = mu0 + mu1 d^2 beta + mu2 L + mu3 L d^2 beta.
inline Ball grid_value(const Mu& mu, const QuadraticData& qd, const TranscendentalTriple& T) {
  long prec = T.precision_bits;
  Ball d2b = T.beta * Ball::from_mpz(qd.d * qd.d, prec);
  return Ball::from_si(mu[0], prec) + d2b * Ball::from_si(mu[1], prec) + T.L * Ball::from_si(mu[2], prec) +
         T.L * d2b * Ball::from_si(mu[3], prec);
}

inline std::vector<Mu> grid_indices(long hi) {
  std::vector<Mu> out;
  for (long a = 0; a <= hi; ++a)
    for (long b = 0; b <= hi; ++b)
      for (long c = 0; c <= hi; ++c)
        for (long e = 0; e <= hi; ++e) out.push_back({a, b, c, e});
  return out;
}

inline std::vector<GridPoint> grid_points(long N, const QuadraticData& qd, const TranscendentalTriple& T) {
  std::vector<GridPoint> out;
  for (const auto& mu : grid_indices(N)) out.push_back({mu, grid_value(mu, qd, T)});
  return out;
}

inline std::array<mpz_class, 4> clearing_exponents(const Mu& mu, long D2, const QuadraticData& qd) {
  auto mx = [&](const mpz_class& v) { return v > 0 ? mpz_class(D2 * v) : mpz_class(0); };
  mpz_class d2 = qd.d * qd.d;
  return {mx(-mu[0] - qd.b0 * mu[1]), mx(-mu[0] - d2 * mu[1] - mu[1] * qd.b1 * qd.d), mx(-mu[2] - qd.b0 * mu[3]),
          mx(-mu[2] - d2 * mu[3] - mu[3] * qd.b1 * qd.d)};
}

namespace detail {

// Folds w^k with w^2 = b0 + b1 w.
inline MultiPoly reduce_quadratic(const MultiPoly& p, const QuadraticData& q, const std::string& v = "w") {
  if (p.degree(v) < 2) return p;
  auto c = p.coefficients_in(v);
  MultiPoly lo, hi;
  mpz_class A = 1, B = 0;
  for (const auto& ck : c) {
    if (A != 0) lo += A * ck;
    if (B != 0) hi += B * ck;
    mpz_class nA = B * q.b0, nB = A + B * q.b1;
    A = nA;
    B = nB;
  }
  return lo + hi * MultiPoly::variable(v);
}

// c * alpha1^a1 * alpha2^a2 * y^ey * z^ez with rational alphas folded into c.
struct LaurentTerm {
  mpq_class c = 1;
  mpz_class a1 = 0, a2 = 0, ey = 0, ez = 0;

  LaurentTerm pow(long k) const {
    LaurentTerm r;
    mpz_class num, den;
    mpz_pow_ui(num.get_mpz_t(), c.get_num_mpz_t(), static_cast<unsigned long>(k));
    mpz_pow_ui(den.get_mpz_t(), c.get_den_mpz_t(), static_cast<unsigned long>(k));
    r.c = mpq_class(num, den);
    r.a1 = a1 * k;
    r.a2 = a2 * k;
    r.ey = ey * k;
    r.ez = ez * k;
    return r;
  }
  friend LaurentTerm operator*(const LaurentTerm& a, const LaurentTerm& b) {
    LaurentTerm r;
    r.c = a.c * b.c;
    r.a1 = a.a1 + b.a1;
    r.a2 = a.a2 + b.a2;
    r.ey = a.ey + b.ey;
    r.ez = a.ez + b.ez;
    return r;
  }
};

inline mpq_class qpow(const mpq_class& q, const mpz_class& e) {
  require(mpz_class(abs(e)).fits_ulong_p(), ErrorKind::invalid_argument, "exponent too large");
  bool neg = e < 0;
  unsigned long k = neg ? mpz_class(-e).get_ui() : e.get_ui();
  mpz_class num, den;
  mpz_pow_ui(num.get_mpz_t(), q.get_num_mpz_t(), k);
  mpz_pow_ui(den.get_mpz_t(), q.get_den_mpz_t(), k);
  mpq_class r(num, den);
  r.canonicalize();
  return neg ? mpq_class(1 / r) : r;
}

// Point (s, X, Y) at which G(s, X, Y) = sum psi s^l1 X^l2 Y^l3 must vanish.
struct FormalPoint {
  Mu mu{};
  MultiPoly s;
  LaurentTerm X, Y;
};

inline FormalPoint formal_point(const Mu& mu, const QuadraticData& qd) {
  FormalPoint p;
  p.mu = mu;
  MultiPoly w = MultiPoly::variable("w"), x = MultiPoly::variable("x");
  p.s = MultiPoly::constant(mu[0]) + mpz_class(mu[1] * qd.d) * w + mpz_class(mu[2]) * x + mpz_class(mu[3] * qd.d) * x * w;
  mpz_class d2 = qd.d * qd.d;
  p.X.a1 = mu[0];
  p.X.a2 = mu[2];
  p.X.ey = d2 * mu[1];
  p.X.ez = d2 * mu[3];
  p.Y.a1 = qd.b0 * mu[1];
  p.Y.a2 = qd.b0 * mu[3];
  p.Y.ey = mu[0] + mu[1] * qd.b1 * qd.d;
  p.Y.ez = mu[2] + mu[3] * qd.b1 * qd.d;
  return p;
}

struct RowEntry {
  MultiPoly poly;  // polynomial part in w, x
  LaurentTerm mono;
};

// Clears negative exponents and denominators of a row; shift gives the exponents multiplied in for (alpha1, y, alpha2, z).
inline std::vector<MultiPoly> clear_row(const std::vector<RowEntry>& row, const mpq_class& a1, const mpq_class& a2,
                                        std::array<mpz_class, 4> shift, mpz_class* scale_out = nullptr) {
  for (const auto& e : row) {
    if (e.poly.is_zero()) continue;
    shift[0] = std::max(shift[0], mpz_class(-e.mono.a1));
    shift[1] = std::max(shift[1], mpz_class(-e.mono.ey));
    shift[2] = std::max(shift[2], mpz_class(-e.mono.a2));
    shift[3] = std::max(shift[3], mpz_class(-e.mono.ez));
  }
  std::vector<mpq_class> coef(row.size());
  mpz_class den = 1;
  for (std::size_t j = 0; j < row.size(); ++j) {
    if (row[j].poly.is_zero()) continue;
    coef[j] = row[j].mono.c * qpow(a1, row[j].mono.a1 + shift[0]) * qpow(a2, row[j].mono.a2 + shift[2]);
    mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), coef[j].get_den_mpz_t());
  }
  std::vector<MultiPoly> out(row.size());
  for (std::size_t j = 0; j < row.size(); ++j) {
    if (row[j].poly.is_zero()) continue;
    mpz_class k(coef[j] * den);
    mpz_class ey = row[j].mono.ey + shift[1], ez = row[j].mono.ez + shift[3];
    out[j] = k * row[j].poly * MultiPoly::variable("y").pow(static_cast<unsigned>(ey.get_ui())) *
             MultiPoly::variable("z").pow(static_cast<unsigned>(ez.get_ui()));
  }
  if (scale_out) *scale_out = den;
  return out;
}

inline RowEntry monomial_at(const FormalPoint& p, const Lambda& l, std::vector<MultiPoly>& s_pows) {
  while (static_cast<long>(s_pows.size()) <= l[0]) s_pows.push_back(s_pows.empty() ? MultiPoly::constant(1) : s_pows.back() * p.s);
  return {s_pows[l[0]], p.X.pow(l[1]) * p.Y.pow(l[2])};
}

inline std::vector<Lambda> lambda_indices(long e, long a, long b) {
  std::vector<Lambda> out;
  for (long l1 = 0; l1 <= e; ++l1)
    for (long l2 = 0; l2 <= a; ++l2)
      for (long l3 = 0; l3 <= b; ++l3) out.push_back({l1, l2, l3});
  return out;
}

struct FactorShape {
  long e = 0, a = 0, b = 0;
  std::size_t points = 0;
};

// Greedy split: as many (0,1,1) factors (three points each) as leave enough room for the rest.
inline std::vector<FactorShape> factor_plan(const AuxParams& p) {
  const long pts = aux_equations(p);
  for (long k = std::min(p.D2, (pts + 2) / 3); k >= 0; --k) {
    long rest = std::max<long>(0, pts - 3 * k);
    long e = p.D1, a = p.D2 - k, b = p.D2 - k;
    long cap = (e + 1) * (a + 1) * (b + 1) - 1;
    if (rest > cap) continue;
    std::vector<FactorShape> out;
    long left = pts;
    for (long i = 0; i < k; ++i) {
      std::size_t take = static_cast<std::size_t>(std::min<long>(3, left));
      out.push_back({0, 1, 1, take});
      left -= static_cast<long>(take);
    }
    if (left > 0 || k == 0) out.push_back({e, a, b, static_cast<std::size_t>(left)});
    return out;
  }
  fail(ErrorKind::hypothesis_violated, "unknowns do not exceed equations");
}

// Nonzero G_f(s, X, Y) with coefficients in Z[w,x,y,z] vanishing at the given points.
inline std::map<Lambda, MultiPoly> interpolating_factor(const FactorShape& f, const std::vector<FormalPoint>& pts,
                                                        const mpq_class& a1, const mpq_class& a2, const QuadraticData& qd) {
  auto mons = lambda_indices(f.e, f.a, f.b);
  const std::size_t p = pts.size();
  std::map<Lambda, MultiPoly> best;
  if (p == 0) {
    best[{0, 0, 0}] = MultiPoly::constant(1);
    return best;
  }
  std::vector<std::vector<MultiPoly>> rows;
  for (const auto& pt : pts) {
    std::vector<MultiPoly> sp;
    std::vector<RowEntry> row;
    for (const auto& m : mons) row.push_back(monomial_at(pt, m, sp));
    rows.push_back(clear_row(row, a1, a2, {0, 0, 0, 0}));
  }
  bool found = false;
  for_each_subset(mons.size(), p + 1, [&](const std::vector<std::size_t>& cols) {
    std::map<Lambda, MultiPoly> g;
    bool any = false;
    for (std::size_t drop = 0; drop <= p; ++drop) {
      std::vector<MultiPoly> m;
      for (std::size_t i = 0; i < p; ++i)
        for (std::size_t c = 0; c <= p; ++c)
          if (c != drop) m.push_back(rows[i][cols[c]]);
      MultiPoly det = reduce_quadratic(bareiss_det(m, p), qd);
      if (det.is_zero()) continue;
      g[mons[cols[drop]]] = drop % 2 == 0 ? det : -det;
      any = true;
    }
    if (!any) return false;
    mpz_class ct = 0;
    for (const auto& [l, q] : g) ct = gcd(ct, q.content());
    for (auto& [l, q] : g) q = q.divide_exact(ct);
    best = std::move(g);
    found = true;
    return true;
  });
  require(found, ErrorKind::bound_not_met, "no interpolating factor for the assigned points");
  return best;
}

inline std::map<Lambda, MultiPoly> multiply_factors(const std::map<Lambda, MultiPoly>& a, const std::map<Lambda, MultiPoly>& b,
                                                    const QuadraticData& qd) {
  std::map<Lambda, MultiPoly> out;
  for (const auto& [la, pa] : a)
    for (const auto& [lb, pb] : b) out[{la[0] + lb[0], la[1] + lb[1], la[2] + lb[2]}] += pa * pb;
  for (auto it = out.begin(); it != out.end();) {
    it->second = reduce_quadratic(it->second, qd);
    if (it->second.is_zero())
      it = out.erase(it);
    else
      ++it;
  }
  return out;
}

}  // namespace detail

// Row mu of the vanishing system: coefficients C_mu a_{lambda mu} (cleared) as polynomials in w, x, y, z.
struct AssembledSystem {
  std::vector<Mu> mu;
  std::vector<Lambda> lambda;
  std::vector<std::vector<MultiPoly>> rows;
  std::vector<std::array<mpz_class, 4>> clearing;  // exponents actually used on alpha1, alpha1^beta, alpha2, alpha2^beta
  unsigned max_degree = 0;
  mpz_class max_height = 0;
  mpz_class degree_bound = 0;

  PolyLinearSystem as_linear_system() const {
    PolyLinearSystem s;
    s.M = rows.size();
    s.N = lambda.size();
    s.d = max_degree;
    s.A = max_height > 0 ? max_height : mpz_class(1);
    s.u = rows;
    return s;
  }
};

inline std::pair<mpq_class, mpq_class> rational_alphas(const AlgebraicNumber& a1, const AlgebraicNumber& a2) {
  auto q1 = a1.as_rational(), q2 = a2.as_rational();
  require(q1 && q2, ErrorKind::undefined_type, "auxiliary construction supports rational alpha1, alpha2 only");
  require(*q1 != 0 && *q2 != 0, ErrorKind::domain, "alpha must be nonzero");
  return {*q1, *q2};
}

inline mpz_class aux_degree_bound(const AuxParams& p, const QuadraticData& qd) {
  return p.D1 + mpz_class(p.D2 * p.N) * (4 + 2 * abs(qd.b0) + 2 * qd.d * abs(qd.b1) + 2 * qd.d * qd.d);
}

inline AssembledSystem assemble_system(const AuxParams& p, const QuadraticData& qd, const AlgebraicNumber& alpha1,
                                       const AlgebraicNumber& alpha2) {
  for (const auto& c : check_params(p))
    if (c.enforced && !c.holds && c.name == "unknowns > equations")
      fail(ErrorKind::hypothesis_violated, "violated: " + c.name);
  auto [a1, a2] = rational_alphas(alpha1, alpha2);
  AssembledSystem s;
  s.lambda = detail::lambda_indices(p.D1, p.D2, p.D2);
  s.degree_bound = aux_degree_bound(p, qd);
  for (const auto& mu : grid_indices(p.N)) {
    auto fp = detail::formal_point(mu, qd);
    std::vector<MultiPoly> sp;
    std::vector<detail::RowEntry> row;
    for (const auto& l : s.lambda) row.push_back(detail::monomial_at(fp, l, sp));
    auto base = clearing_exponents(mu, p.D2, qd);
    std::array<mpz_class, 4> used = base;
    for (const auto& e : row) {
      used[0] = std::max(used[0], mpz_class(-e.mono.a1));
      used[1] = std::max(used[1], mpz_class(-e.mono.ey));
      used[2] = std::max(used[2], mpz_class(-e.mono.a2));
      used[3] = std::max(used[3], mpz_class(-e.mono.ez));
    }
    auto cleared = detail::clear_row(row, a1, a2, base);
    for (auto& q : cleared) {
      s.max_degree = std::max(s.max_degree, q.total_degree());
      if (q.height() > s.max_height) s.max_height = q.height();
    }
    s.mu.push_back(mu);
    s.rows.push_back(std::move(cleared));
    s.clearing.push_back(used);
  }
  return s;
}

struct AuxFunction {
  long D1 = 0, D2 = 0, N = 0;
  QuadraticData qd;
  std::map<Lambda, MultiPoly> psi;  // polynomials in w = d beta, x = L, y = alpha1^beta, z = alpha2^beta
  std::vector<detail::FactorShape> factors;
  unsigned max_degree = 0;
  mpz_class max_height = 0;
  bool verified_exact = false;
  std::optional<double> c1, c2;

  MultiPoly psi_at(const Lambda& l) const {
    auto it = psi.find(l);
    return it == psi.end() ? MultiPoly() : it->second;
  }
};

inline bool verify_vanishing_exact(const AuxFunction& F, const AssembledSystem& s) {
  bool any = false;
  for (const auto& [l, q] : F.psi) any = any || !q.is_zero();
  if (!any) return false;
  for (const auto& row : s.rows) {
    MultiPoly acc;
    for (std::size_t j = 0; j < s.lambda.size(); ++j) {
      auto it = F.psi.find(s.lambda[j]);
      if (it != F.psi.end() && !row[j].is_zero()) acc += it->second * row[j];
    }
    if (!detail::reduce_quadratic(acc, F.qd).is_zero()) return false;
  }
  return true;
}

inline AuxFunction construct_aux(const AuxParams& p, const QuadraticData& qd, const AlgebraicNumber& alpha1,
                                 const AlgebraicNumber& alpha2) {
  auto sys = assemble_system(p, qd, alpha1, alpha2);
  auto [a1, a2] = rational_alphas(alpha1, alpha2);
  AuxFunction F;
  F.D1 = p.D1;
  F.D2 = p.D2;
  F.N = p.N;
  F.qd = qd;
  F.factors = detail::factor_plan(p);
  std::vector<detail::FormalPoint> pts;
  for (const auto& mu : sys.mu) pts.push_back(detail::formal_point(mu, qd));
  std::size_t next = 0;
  std::map<Lambda, MultiPoly> G{{Lambda{0, 0, 0}, MultiPoly::constant(1)}};
  for (const auto& f : F.factors) {
    std::vector<detail::FormalPoint> mine(pts.begin() + static_cast<long>(next), pts.begin() + static_cast<long>(next + f.points));
    next += f.points;
    G = detail::multiply_factors(G, detail::interpolating_factor(f, mine, a1, a2, qd), qd);
  }
  require(next == pts.size(), ErrorKind::bound_not_met, "factor plan does not cover the grid");
  mpz_class ct = 0;
  for (const auto& [l, q] : G) ct = gcd(ct, q.content());
  for (auto& [l, q] : G) q = q.divide_exact(ct);
  F.psi = std::move(G);
  for (const auto& [l, q] : F.psi) {
    F.max_degree = std::max(F.max_degree, q.total_degree());
    if (q.height() > F.max_height) F.max_height = q.height();
  }
  F.verified_exact = verify_vanishing_exact(F, sys);
  require(F.verified_exact, ErrorKind::lemma_violation, "constructed coefficients fail the exact vanishing check");
  double scale = static_cast<double>(p.D1 + p.D2 * p.N);
  if (scale > 0) F.c1 = F.max_degree / scale;
  if (p.N > 1 && p.D1 > 0) F.c2 = std::log(F.max_height.get_d()) / (p.D1 * std::log(static_cast<double>(p.N)));
  return F;
}

// Psi_lambda evaluated at (w, x, y, z) = (d beta, L, tau1, tau2), in lambda order.
inline std::vector<std::pair<Lambda, Ball>> psi_values(const AuxFunction& F, const TranscendentalTriple& T) {
  long prec = T.precision_bits;
  BallEnv env{{"w", T.beta * Ball::from_mpz(F.qd.d, prec)}, {"x", T.L}, {"y", T.tau1}, {"z", T.tau2}};
  std::vector<std::pair<Lambda, Ball>> out;
  for (const auto& [l, q] : F.psi) out.emplace_back(l, eval_poly(q, env, prec));
  return out;
}

inline Ball eval_aux_values(const AuxFunction& F, const std::vector<std::pair<Lambda, Ball>>& vals, const Ball& z,
                            const TranscendentalTriple& T) {
  long prec = T.precision_bits;
  Ball zl = z.with_prec(prec) * T.log_a1;
  Ball e2 = zl.exp(), e3 = (zl * T.beta).exp();
  std::vector<Ball> zp{Ball::from_si(1, prec)}, p2{Ball::from_si(1, prec)}, p3{Ball::from_si(1, prec)};
  for (long i = 0; i < F.D1; ++i) zp.push_back(zp.back() * z.with_prec(prec));
  for (long i = 0; i < F.D2; ++i) {
    p2.push_back(p2.back() * e2);
    p3.push_back(p3.back() * e3);
  }
  Ball acc = Ball::from_si(0, prec);
  for (const auto& [l, v] : vals) acc += v * zp[l[0]] * p2[l[1]] * p3[l[2]];
  return acc;
}

inline Ball eval_aux(const AuxFunction& F, const Ball& z, const TranscendentalTriple& T) {
  return eval_aux_values(F, psi_values(F, T), z, T);
}

// Upper bound for |F| on |t| <= r.
inline Mag aux_modulus_bound(const AuxFunction& F, const std::vector<std::pair<Lambda, Ball>>& vals, const Mag& r,
                             const TranscendentalTriple& T) {
  long prec = T.precision_bits;
  Real rr(kMagPrec);
  mpfr_set(rr.get(), r.get(), MPFR_RNDN);
  Ball R = Ball::from_parts(rr, Real(kMagPrec), Mag()).with_prec(prec);
  Real lau(kMagPrec);
  mpfr_set(lau.get(), T.log_a1.abs_upper().get(), MPFR_RNDU);
  Real bu(kMagPrec);
  mpfr_set(bu.get(), T.beta.abs_upper().get(), MPFR_RNDU);
  Ball LA = Ball::from_parts(lau, Real(kMagPrec), Mag()).with_prec(prec);
  Ball BU = Ball::from_parts(bu, Real(kMagPrec), Mag()).with_prec(prec);
  Mag total;
  for (const auto& [l, v] : vals) {
    Ball g = (Ball::from_si(l[1], prec) + Ball::from_si(l[2], prec) * BU) * LA * R;
    Ball term = R.pow(static_cast<unsigned long>(l[0])) * g.exp();
    total += v.abs_upper() * term.abs_upper();
  }
  return total;
}

inline Mag circle_max(const AuxFunction& F, const std::vector<std::pair<Lambda, Ball>>& vals, const mpq_class& radius,
                      unsigned samples, const TranscendentalTriple& T, bool upper) {
  long prec = T.precision_bits;
  Ball two_pi = Ball::pi(prec) * Ball::from_si(2, prec);
  Ball r = Ball::from_mpq(radius, prec);
  Mag best;
  for (unsigned k = 0; k < samples; ++k) {
    Ball th = two_pi * Ball::from_mpq(mpq_class(k, samples), prec);
    Ball t = r * (Ball::imag_unit(prec) * th).exp();
    Ball v = eval_aux_values(F, vals, t, T);
    Mag m;
    if (upper) {
      m = v.abs_upper();
    } else {
      Real lo = v.abs_lower();
      mpfr_set(m.raw(), lo.get(), MPFR_RNDD);
    }
    best = Mag::max(best, m);
  }
  return best;
}

inline Mag schwarz_bound(const Mag& max_rho1, unsigned long n, const mpq_class& rho1, const mpq_class& rho2) {
  require(rho1 > 0 && rho2 > 0 && 3 * rho2 < rho1, ErrorKind::invalid_argument, "Schwarz lemma needs rho2 < rho1 / 3");
  mpq_class q = 3 * rho2 / rho1;
  Real f(kMagPrec);
  mpfr_set_q(f.get(), q.get_mpq_t(), MPFR_RNDU);
  mpfr_pow_ui(f.get(), f.get(), n, MPFR_RNDU);
  Mag m;
  mpfr_set(m.raw(), f.get(), MPFR_RNDU);
  return m * max_rho1;
}

struct TijdemanInputs {
  double E = 0;        // max over the k-grid of |F(z_mu)|
  double a0 = 1, b0 = 1;
  std::optional<double> c1, c2;  // defaults: a / D2 and b / (kR)
};

struct TijdemanReport {
  double log_bound = 0;  // natural log of the right side; -inf when E = 0
  double a = 0, b = 0, c1 = 0, c2 = 0;
  long k = 0, R = 0;
};

// Bound on max |psi| in log form.
inline TijdemanReport tijdeman_coefficient_bound(const AuxParams& p, const QuadraticData& qd, const TranscendentalTriple& T,
                                                 const TijdemanInputs& in) {
  TijdemanReport r;
  r.k = resolved_k_mult(p);
  r.R = p.N;
  require(r.k > 0 && pow4(r.k * r.R + 1) >= 2 * mpz_class(aux_unknowns(p)), ErrorKind::hypothesis_violated,
          "grid inequality (kR+1)^4 >= 2 (D1+1)(D2+1)^2 fails");
  require(in.a0 > 0 && in.b0 > 0 && in.E >= 0, ErrorKind::invalid_argument, "a0, b0 must be positive and E nonnegative");
  double la = T.log_a1.abs_upper().to_double(), be = T.beta.abs_upper().to_double();
  r.a = 1;
  for (long l2 = 0; l2 <= p.D2; ++l2)
    for (long l3 = 0; l3 <= p.D2; ++l3) r.a = std::max(r.a, std::abs(static_cast<double>(l2) + l3 * be) * la);
  double d2b = mpz_class(qd.d * qd.d).get_d() * be, L = T.L.abs_upper().to_double();
  long kr = r.k * r.R;
  r.b = std::max(1.0, kr * (1 + d2b + L + L * d2b));
  r.c1 = in.c1 ? *in.c1 : (p.D2 > 0 ? r.a / p.D2 : r.a);
  r.c2 = in.c2 ? *in.c2 : r.b / kr;
  if (in.E == 0) {
    r.log_bound = -INFINITY;
    return r;
  }
  double m = static_cast<double>(aux_unknowns(p));
  double s = std::pow(kr + 1.0, 4);
  r.log_bound = 4 * std::log(kr + 1.0) +
                m * std::log(6 * r.c1 * p.D1 / (in.a0 * (p.D2 + 1)) * m / r.b) +
                s * std::log(72 * r.c2 * kr / (in.b0 * (kr + 1.0) * (kr + 1.0))) + std::log(in.E);
  return r;
}

inline json tijdeman_to_json(const TijdemanReport& r) {
  return {{"k", r.k}, {"R", r.R}, {"a", r.a}, {"b", r.b}, {"c1", r.c1}, {"c2", r.c2},
          {"log_bound", std::isfinite(r.log_bound) ? json(r.log_bound) : json(nullptr)}};
}

using BallFn = std::function<Ball(const Ball&)>;

namespace detail {

inline Ball mag_ball(const Mag& m, mpfr_prec_t prec) {
  Real r(kMagPrec);
  mpfr_set(r.get(), m.get(), MPFR_RNDU);
  return Ball::from_parts(r, Real(kMagPrec), Mag()).with_prec(prec);
}

inline Real mag_real(const Mag& m) {
  Real r(kMagPrec);
  mpfr_set(r.get(), m.get(), MPFR_RNDU);
  return r;
}

inline Ball unit_root(const mpq_class& frac, mpfr_prec_t prec) {
  return (Ball::imag_unit(prec) * Ball::pi(prec) * Ball::from_si(2, prec) * Ball::from_mpq(frac, prec)).exp();
}

inline Mag arc_bound(const BallFn& g, const Ball& c, const mpq_class& r, const mpq_class& lo, const mpq_class& hi,
                     mpfr_prec_t prec, int depth) {
  mpq_class half = (hi - lo) / 2;
  Ball t = c + Ball::from_mpq(r, prec) * unit_root(lo + half, prec);
  t.add_error(Mag::from_mpq(r * half * mpq_class(2 * 355, 113)) * Mag::from_d(1.01));
  try {
    Ball v = g(t);
    if (v.is_finite()) return v.abs_upper();
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::domain) throw;
  }
  if (depth == 0) return Mag::inf();
  return Mag::max(arc_bound(g, c, r, lo, lo + half, prec, depth - 1), arc_bound(g, c, r, lo + half, hi, prec, depth - 1));
}

// Upper bound for |g| on the circle |t - c| = r, covering arcs by balls and splitting arcs where needed.
inline Mag circle_cover_bound(const BallFn& g, const Ball& c, const mpq_class& r, unsigned pieces, mpfr_prec_t prec) {
  Mag best;
  for (unsigned j = 0; j < pieces; ++j)
    best = Mag::max(best, arc_bound(g, c, r, mpq_class(j, pieces), mpq_class(j + 1, pieces), prec, 10));
  return best;
}

struct Contour {
  Ball center;
  mpq_class rho, inner, outer;
};

inline Ball trapezoid(const BallFn& g, const Contour& C, unsigned n, mpfr_prec_t prec) {
  Ball acc = Ball::from_si(0, prec);
  Ball r = Ball::from_mpq(C.rho, prec);
  for (unsigned j = 0; j < n; ++j) {
    Ball e = r * unit_root(mpq_class(j, n), prec);
    acc += g(C.center + e) * e;
  }
  return acc / Ball::from_si(static_cast<long>(n), prec);
}

inline Mag geometric_tail(const Mag& M, const mpq_class& r, const mpq_class& q, unsigned n) {
  Real qn(kMagPrec);
  mpfr_set_q(qn.get(), q.get_mpq_t(), MPFR_RNDU);
  mpfr_pow_ui(qn.get(), qn.get(), n, MPFR_RNDU);
  Real den(kMagPrec);
  mpfr_ui_sub(den.get(), 1, qn.get(), MPFR_RNDD);
  if (mpfr_sgn(den.get()) <= 0) return Mag::inf();
  mpfr_div(qn.get(), qn.get(), den.get(), MPFR_RNDU);
  Mag f;
  mpfr_set(f.raw(), qn.get(), MPFR_RNDU);
  return M * Mag::from_mpq(r) * f;
}

inline mpq_class upper_q(const Mag& m) { return mag_real(m).to_mpq(); }

}  // namespace detail

struct HermiteResult {
  Ball value;
  unsigned nodes = 0;
  Mag truncation;
};

// G(z) = I_Gamma - sum I_gamma_mu with kernel G(t) W(z) / ((t - z) W(t)), W(t) = prod (t - z_mu).
// Certified mode doubles the nodes per contour until its truncation bound is below 2^(-prec/2) max(1, |I_Gamma|) / #contours.
inline HermiteResult hermite_eval(const BallFn& G, const std::vector<Ball>& grid, const Ball& z, const mpq_class& rho,
                                  mpfr_prec_t prec, std::optional<unsigned> fixed_nodes = std::nullopt) {
  require(rho > 0, ErrorKind::invalid_argument, "contour radius must be positive");
  std::vector<Ball> pts;
  for (const auto& p : grid) pts.push_back(p.with_prec(prec));
  Ball zz = z.with_prec(prec);
  Ball Wz = Ball::from_si(1, prec);
  for (const auto& p : pts) Wz *= zz - p;
  BallFn g = [&](const Ball& t) {
    Ball Wt = Ball::from_si(1, prec);
    for (const auto& p : pts) Wt *= t - p;
    return G(t) * Wz / ((t - zz) * Wt);
  };
  std::vector<detail::Contour> contours;
  mpq_class inner = detail::upper_q(zz.abs_upper());
  for (const auto& p : pts) inner = std::max(inner, detail::upper_q(p.abs_upper()));
  require(inner < rho, ErrorKind::invalid_argument, "contour must enclose z and every grid point");
  contours.push_back({Ball::from_si(0, prec), rho, (rho + inner) / 2, 2 * rho});
  for (std::size_t i = 0; i < pts.size(); ++i) {
    Ball c = Ball::from_parts(pts[i].mid_re(), pts[i].mid_im(), Mag());
    mpq_class delta = -1;
    auto consider = [&](const Ball& q) {
      Real lo = (q - c).abs_lower();
      mpq_class d = lo.sign() > 0 ? lo.to_mpq() : mpq_class(0);
      delta = delta < 0 ? d : std::min(delta, d);
    };
    consider(zz);
    for (std::size_t j = 0; j < pts.size(); ++j)
      if (j != i) consider(pts[j]);
    require(delta > 0 && detail::upper_q(pts[i].rad()) < delta / 8, ErrorKind::refine_precision,
            "grid point not separated from other poles");
    contours.push_back({c, delta / 2, delta / 4, 3 * delta / 4});
  }
  std::vector<std::pair<Mag, Mag>> M;
  for (const auto& C : contours)
    M.emplace_back(detail::circle_cover_bound(g, C.center, C.inner, 128, prec),
                   detail::circle_cover_bound(g, C.center, C.outer, 128, prec));
  const unsigned cap = 1u << 16;
  auto tail = [&](std::size_t k, unsigned n) {
    const auto& C = contours[k];
    return detail::geometric_tail(M[k].second, C.outer, C.rho / C.outer, n) +
           detail::geometric_tail(M[k].first, C.inner, C.inner / C.rho, n);
  };
  HermiteResult r{Ball::from_si(0, prec), 0, Mag()};
  if (fixed_nodes) {
    require(*fixed_nodes >= 1, ErrorKind::invalid_argument, "node count must be positive");
    for (std::size_t k = 0; k < contours.size(); ++k) {
      Ball I = detail::trapezoid(g, contours[k], *fixed_nodes, prec);
      r.value = k == 0 ? I : r.value - I;
      r.truncation += tail(k, *fixed_nodes);
    }
    r.nodes = *fixed_nodes;
    return r;
  }
  Mag tol;
  for (std::size_t k = 0; k < contours.size(); ++k) {
    const auto& C = contours[k];
    Ball rr = Ball::from_mpq(C.rho, prec);
    auto node = [&](unsigned j, unsigned n) {
      Ball e = rr * detail::unit_root(mpq_class(j, n), prec);
      return g(C.center + e) * e;
    };
    unsigned n = 16;
    Ball S = Ball::from_si(0, prec);
    for (unsigned j = 0; j < n; ++j) S += node(j, n);
    for (;;) {
      Ball I = S / Ball::from_si(static_cast<long>(n), prec);
      Mag t = tail(k, n);
      if (k == 0) tol = Mag::pow2(-static_cast<long>(prec / 2)) * Mag::max(Mag::from_d(1), I.abs_upper()) *
                        Mag::from_mpq(mpq_class(1, static_cast<long>(contours.size())));
      if (t <= tol) {
        r.value = k == 0 ? I : r.value - I;
        r.truncation += t;
        r.nodes = std::max(r.nodes, n);
        break;
      }
      require(n < cap, ErrorKind::refine_precision, "trapezoid rule did not reach the truncation tolerance");
      for (unsigned j = 1; j < 2 * n; j += 2) S += node(j, 2 * n);
      n *= 2;
    }
  }
  r.value.add_error(r.truncation);
  return r;
}

struct AuxVerification {
  double tolerance = 1e-40;
  Mag grid_max;
  bool grid_ok = false;
  mpq_class R1 = 20, R2 = 5;
  unsigned samples = 720;
  unsigned long zeros_inside = 0;
  Mag M_R1_lower, M_R2_upper, schwarz_rhs;
  bool schwarz_ok = false;
  TijdemanReport tijdeman;
  Mag E_lower, A_upper;
  bool tijdeman_ok = false;

  bool ok() const { return grid_ok && schwarz_ok && tijdeman_ok; }
};

inline AuxVerification verify_aux(const AuxFunction& F, const AuxParams& p, const TranscendentalTriple& T, double tolerance,
                                  const mpq_class& R1, const mpq_class& R2, unsigned samples) {
  AuxVerification v;
  v.tolerance = tolerance;
  v.R1 = R1;
  v.R2 = R2;
  v.samples = samples;
  auto vals = psi_values(F, T);
  for (const auto& g : grid_points(p.N, F.qd, T)) {
    Ball val = eval_aux_values(F, vals, g.value, T);
    v.grid_max = Mag::max(v.grid_max, val.abs_upper());
    if (detail::mag_real(g.value.abs_upper()).to_mpq() < R2) ++v.zeros_inside;
  }
  v.grid_ok = v.grid_max.to_double() <= tolerance;
  v.M_R1_lower = circle_max(F, vals, R1, samples, T, false);
  v.M_R2_upper = circle_max(F, vals, R2, samples, T, true);
  v.schwarz_rhs = schwarz_bound(v.M_R1_lower, v.zeros_inside, R1, R2);
  v.schwarz_ok = v.M_R2_upper <= v.schwarz_rhs;
  for (const auto& [l, b] : vals) v.A_upper = Mag::max(v.A_upper, b.abs_upper());
  long k = resolved_k_mult(p);
  double e_lo = 0;
  if (k > 0)
    for (const auto& mu : grid_indices(k * p.N)) {
      Real lo = eval_aux_values(F, vals, grid_value(mu, F.qd, T), T).abs_lower();
      if (lo.sign() > 0) e_lo = std::max(e_lo, mpfr_get_d(lo.get(), MPFR_RNDD));
    }
  mpfr_set_d(v.E_lower.raw(), e_lo, MPFR_RNDD);
  TijdemanInputs in;
  in.E = e_lo;
  v.tijdeman = tijdeman_coefficient_bound(p, F.qd, T, in);
  double la = std::log(v.A_upper.to_double());
  v.tijdeman_ok = v.A_upper.is_zero() || la <= v.tijdeman.log_bound;
  return v;
}

inline json verification_to_json(const AuxVerification& v) {
  auto q = [](const mpq_class& x) { return x.get_str(); };
  return {{"grid", {{"max_abs", v.grid_max.str(6)}, {"tolerance", v.tolerance}, {"ok", v.grid_ok}}},
          {"schwarz",
           {{"R1", q(v.R1)}, {"R2", q(v.R2)}, {"samples", v.samples}, {"zeros_inside", v.zeros_inside},
            {"max_R1_lower", v.M_R1_lower.str(6)}, {"max_R2_upper", v.M_R2_upper.str(6)}, {"bound", v.schwarz_rhs.str(6)},
            {"ok", v.schwarz_ok}}},
          {"tijdeman",
           {{"E_lower", v.E_lower.str(6)}, {"A_upper", v.A_upper.str(6)}, {"report", tijdeman_to_json(v.tijdeman)},
            {"ok", v.tijdeman_ok}}}};
}

inline json aux_to_json(const AuxFunction& F) {
  json table = json::array();
  for (const auto& [l, q] : F.psi) table.push_back({{"lambda", l}, {"psi", q.to_string()}});
  json shapes = json::array();
  for (const auto& f : F.factors) shapes.push_back({{"shape", {f.e, f.a, f.b}}, {"points", f.points}});
  auto opt = [](const std::optional<double>& x) { return x ? json(*x) : json(nullptr); };
  return {{"N", F.N},
          {"D1", F.D1},
          {"D2", F.D2},
          {"quadratic", {{"d", F.qd.d.get_str()}, {"b0", F.qd.b0.get_str()}, {"b1", F.qd.b1.get_str()}}},
          {"variables", {"w", "x", "y", "z"}},
          {"factors", shapes},
          {"max_degree", F.max_degree},
          {"max_height", F.max_height.get_str()},
          {"c1", opt(F.c1)},
          {"c2", opt(F.c2)},
          {"verified_exact", F.verified_exact},
          {"psi", table}};
}

inline AuxFunction aux_from_json(const json& j) {
  require(j.is_object() && j.contains("psi") && j.contains("quadratic") && j.contains("D1") && j.contains("D2") && j.contains("N"),
          ErrorKind::parse, "auxiliary function JSON needs N, D1, D2, quadratic, psi");
  AuxFunction F;
  F.N = j["N"].get<long>();
  F.D1 = j["D1"].get<long>();
  F.D2 = j["D2"].get<long>();
  F.qd = {parse_integer(j["quadratic"]["d"]), parse_integer(j["quadratic"]["b0"]), parse_integer(j["quadratic"]["b1"])};
  for (const auto& e : j["psi"]) {
    require(e.contains("lambda") && e["lambda"].is_array() && e["lambda"].size() == 3, ErrorKind::parse, "bad psi entry");
    Lambda l{e["lambda"][0].get<long>(), e["lambda"][1].get<long>(), e["lambda"][2].get<long>()};
    require(l[0] >= 0 && l[0] <= F.D1 && l[1] >= 0 && l[1] <= F.D2 && l[2] >= 0 && l[2] <= F.D2, ErrorKind::parse,
            "lambda out of range");
    F.psi[l] = poly_from_json(e["psi"]);
  }
  for (const auto& [l, q] : F.psi) {
    F.max_degree = std::max(F.max_degree, q.total_degree());
    if (q.height() > F.max_height) F.max_height = q.height();
  }
  F.verified_exact = j.value("verified_exact", false);
  return F;
}

}  // namespace gk
