#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gk/polyalg.hpp"
#include "gk/polyeval.hpp"

namespace gk {

// Fraction-free determinant of a row-major n x n integer matrix.
inline mpz_class bareiss_det(std::vector<mpz_class> a, std::size_t n) {
  if (n == 0) return 1;
  mpz_class prev = 1, t;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a[k * n + k] == 0) {
      std::size_t r = k + 1;
      while (r < n && a[r * n + k] == 0) ++r;
      if (r == n) return 0;
      for (std::size_t j = 0; j < n; ++j) std::swap(a[k * n + j], a[r * n + j]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        t = a[i * n + j] * a[k * n + k] - a[i * n + k] * a[k * n + j];
        mpz_divexact(a[i * n + j].get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
      }
      a[i * n + k] = 0;
    }
    prev = a[k * n + k];
  }
  return sign * a[n * n - 1];
}

inline MultiPoly bareiss_det(std::vector<MultiPoly> a, std::size_t n) {
  if (n == 0) return MultiPoly::constant(1);
  MultiPoly prev = MultiPoly::constant(1);
  bool neg = false;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a[k * n + k].is_zero()) {
      std::size_t r = k + 1;
      while (r < n && a[r * n + k].is_zero()) ++r;
      if (r == n) return MultiPoly();
      for (std::size_t j = 0; j < n; ++j) std::swap(a[k * n + j], a[r * n + j]);
      neg = !neg;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j)
        a[i * n + j] = divide_exact(a[i * n + j] * a[k * n + k] - a[i * n + k] * a[k * n + j], prev);
      a[i * n + k] = MultiPoly();
    }
    prev = a[k * n + k];
  }
  return neg ? -a[n * n - 1] : a[n * n - 1];
}

namespace detail {

// Coefficient polynomial flattened over a fixed list of coefficient variables.
struct FlatPoly {
  std::vector<std::pair<std::vector<unsigned>, mpz_class>> terms;

  FlatPoly(const MultiPoly& p, const std::vector<std::string>& cvars) {
    std::vector<int> idx;
    for (const auto& v : cvars) idx.push_back(p.var_index(v));
    for (const auto& [e, c] : p.terms()) {
      std::vector<unsigned> f(cvars.size(), 0);
      for (std::size_t i = 0; i < cvars.size(); ++i)
        if (idx[i] >= 0) f[i] = e[idx[i]];
      terms.emplace_back(std::move(f), c);
    }
  }
  mpz_class eval(const std::vector<std::vector<mpz_class>>& pw) const {
    mpz_class s = 0, t;
    for (const auto& [e, c] : terms) {
      t = c;
      for (std::size_t i = 0; i < e.size(); ++i)
        if (e[i]) t *= pw[i][e[i]];
      s += t;
    }
    return s;
  }
};

inline long interp_node(std::size_t i) {
  long k = static_cast<long>((i + 1) / 2);
  return (i % 2 == 1) ? k : -k;
}

// Newton interpolation at nodes 0, 1, -1, 2, ... returning monomial coefficients.
inline std::vector<mpq_class> newton_to_monomial(std::vector<mpq_class> c) {
  std::size_t n = c.size();
  for (std::size_t j = 1; j < n; ++j)
    for (std::size_t i = n - 1; i >= j; --i) {
      c[i] = (c[i] - c[i - 1]) / mpq_class(interp_node(i) - interp_node(i - j));
      if (i == j) break;
    }
  std::vector<mpq_class> poly(n, 0);
  poly[0] = c[n - 1];
  std::size_t len = 1;
  for (std::size_t i = n - 1; i-- > 0;) {
    // poly <- poly * (X - x_i) + c_i
    mpq_class xi = interp_node(i);
    for (std::size_t k = len; k-- > 0;) {
      poly[k + 1] += poly[k];
      poly[k] *= -xi;
    }
    ++len;
    poly[0] += c[i];
  }
  return poly;
}

inline std::vector<mpz_class> sylvester_row_major(const std::vector<mpz_class>& pc, const std::vector<mpz_class>& qc) {
  std::size_t m = pc.size() - 1, n = qc.size() - 1, s = m + n;
  std::vector<mpz_class> a(s * s, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k <= m; ++k) a[i * s + i + k] = pc[m - k];
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = 0; k <= n; ++k) a[(n + i) * s + i + k] = qc[n - k];
  return a;
}

constexpr std::size_t kInterpolationGridLimit = 200000;

}  // namespace detail

// Sylvester determinant in var with P rows first; result lives in the remaining variables.
inline MultiPoly resultant(const MultiPoly& P0, const MultiPoly& Q0, const std::string& var) {
  auto u = MultiPoly::merged_vars(P0, Q0);
  if (!std::binary_search(u.begin(), u.end(), var)) {
    u.push_back(var);
    std::sort(u.begin(), u.end());
  }
  MultiPoly P = P0.with_vars(u), Q = Q0.with_vars(u);
  require(!P.is_zero() && !Q.is_zero(), ErrorKind::domain, "resultant of the zero polynomial");
  unsigned m = P.degree(var), n = Q.degree(var);
  require(m > 0 || n > 0, ErrorKind::domain, "both polynomials are constant in " + var);
  std::vector<std::string> rest;
  for (const auto& v : u)
    if (v != var) rest.push_back(v);
  std::vector<std::string> cvars;
  for (const auto& v : rest)
    if (P.degree(v) > 0 || Q.degree(v) > 0) cvars.push_back(v);
  auto pcs = P.coefficients_in(var), qcs = Q.coefficients_in(var);
  std::size_t s = m + n;

  if (cvars.empty()) {
    std::vector<mpz_class> pc, qc;
    for (auto& c : pcs) pc.push_back(c.constant_value());
    for (auto& c : qcs) qc.push_back(c.constant_value());
    return MultiPoly::constant(bareiss_det(detail::sylvester_row_major(pc, qc), s), rest);
  }

  std::vector<std::size_t> dims;
  std::size_t grid = 1;
  for (const auto& v : cvars) {
    dims.push_back(static_cast<std::size_t>(n) * P.degree(v) + static_cast<std::size_t>(m) * Q.degree(v) + 2);
    grid = grid > detail::kInterpolationGridLimit ? grid : grid * dims.back();
  }

  if (grid > detail::kInterpolationGridLimit) {
    std::vector<MultiPoly> a(s * s, MultiPoly::constant(0, u));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k <= m; ++k) a[i * s + i + k] = pcs[m - k];
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t k = 0; k <= n; ++k) a[(n + i) * s + i + k] = qcs[n - k];
    return bareiss_det(std::move(a), s).with_vars(rest);
  }

  std::vector<detail::FlatPoly> pf, qf;
  for (auto& c : pcs) pf.emplace_back(c, cvars);
  for (auto& c : qcs) qf.emplace_back(c, cvars);
  const std::size_t k = cvars.size();
  std::vector<std::size_t> stride(k, 1);
  for (std::size_t i = k; i-- > 1;) stride[i - 1] = stride[i] * dims[i];

  std::vector<mpq_class> values(grid);
  std::vector<std::size_t> pos(k, 0);
  std::vector<std::vector<mpz_class>> pw(k);
  std::vector<mpz_class> pc(m + 1), qc(n + 1);
  for (std::size_t flat = 0; flat < grid; ++flat) {
    for (std::size_t i = 0; i < k; ++i) {
      unsigned dmax = std::max(P.degree(cvars[i]), Q.degree(cvars[i]));
      pw[i].assign(dmax + 1, 1);
      mpz_class x = detail::interp_node(pos[i]);
      for (unsigned e = 1; e <= dmax; ++e) pw[i][e] = pw[i][e - 1] * x;
    }
    for (std::size_t j = 0; j <= m; ++j) pc[j] = pf[j].eval(pw);
    for (std::size_t j = 0; j <= n; ++j) qc[j] = qf[j].eval(pw);
    values[flat] = bareiss_det(detail::sylvester_row_major(pc, qc), s);
    for (std::size_t i = k; i-- > 0;) {
      if (++pos[i] < dims[i]) break;
      pos[i] = 0;
    }
  }

  for (std::size_t axis = 0; axis < k; ++axis) {
    std::size_t len = dims[axis], st = stride[axis];
    std::vector<mpq_class> fiber(len);
    for (std::size_t base = 0; base < grid; ++base) {
      if ((base / st) % len != 0) continue;
      for (std::size_t t = 0; t < len; ++t) fiber[t] = values[base + t * st];
      auto coeffs = detail::newton_to_monomial(fiber);
      for (std::size_t t = 0; t < len; ++t) values[base + t * st] = coeffs[t];
    }
  }

  MultiPoly::Terms terms;
  std::fill(pos.begin(), pos.end(), 0);
  for (std::size_t flat = 0; flat < grid; ++flat) {
    const mpq_class& c = values[flat];
    if (c != 0) {
      require(c.get_den() == 1, ErrorKind::domain, "non-integral resultant coefficient");
      terms.emplace(Exponents(pos.begin(), pos.end()), c.get_num());
    }
    for (std::size_t i = k; i-- > 0;) {
      if (++pos[i] < dims[i]) break;
      pos[i] = 0;
    }
  }
  return MultiPoly(cvars, std::move(terms)).with_vars(rest);
}

namespace detail {

// Splits p = coprime * shared where shared collects every root of p that is a root of g.
inline std::pair<MultiPoly, MultiPoly> split_by_roots(const MultiPoly& p, const MultiPoly& g, const std::string& v) {
  MultiPoly rest = p, shared = MultiPoly::constant(1, p.vars());
  if (g.degree(v) == 0) return {rest, shared};
  for (;;) {
    MultiPoly h = poly_gcd(rest, g);
    if (h.degree(v) == 0) break;
    h = primitive_part_in(h, v);
    shared *= h;
    rest = divide_exact(rest, h);
  }
  return {rest, shared};
}

struct RootProduct {
  MultiPoly num, den;
  // Multiplies in (prod over roots a of A, b of B of (a - b))^e.
  void pair(const MultiPoly& a, const MultiPoly& b, const std::string& v, unsigned e) {
    unsigned da = a.degree(v), db = b.degree(v);
    if (da == 0 || db == 0 || e == 0) return;
    num *= resultant(a, b, v).pow(e);
    den *= (a.leading_coefficient(v).pow(db) * b.leading_coefficient(v).pow(da)).pow(e);
  }
  // Multiplies in (prod over ordered distinct root pairs of squarefree G)^e.
  void self(const MultiPoly& g, const std::string& v, unsigned e) {
    unsigned k = g.degree(v);
    if (k < 2 || e == 0) return;
    num *= resultant(g, g.derivative(v), v).pow(e);
    den *= g.leading_coefficient(v).pow((2 * k - 1) * e);
  }
};

}  // namespace detail

// Root-pair product p0^n q0^m prod_{s != t} (s - t); a side of degree 0 contributes no roots.
inline MultiPoly semi_resultant_general(const MultiPoly& P0, const MultiPoly& Q0, const std::string& v) {
  auto u = MultiPoly::merged_vars(P0, Q0);
  if (!std::binary_search(u.begin(), u.end(), v)) {
    u.push_back(v);
    std::sort(u.begin(), u.end());
  }
  MultiPoly P = P0.with_vars(u), Q = Q0.with_vars(u);
  require(!P.is_zero() && !Q.is_zero(), ErrorKind::domain, "semi-resultant of the zero polynomial");
  unsigned m = P.degree(v), n = Q.degree(v);
  std::vector<std::string> rest;
  for (const auto& x : u)
    if (x != v) rest.push_back(x);
  MultiPoly lead = P.leading_coefficient(v).pow(n) * Q.leading_coefficient(v).pow(m);
  if (m == 0 || n == 0) return lead.with_vars(rest);

  bool univariate = P.support_vars().size() <= 1 && Q.support_vars().size() <= 1;
  if (!univariate) {
    MultiPoly r = resultant(P, Q, v);
    if (!r.is_zero()) return r;
  }

  MultiPoly g = poly_gcd(P, Q);
  if (g.degree(v) > 0) g = primitive_part_in(g, v);
  auto [Pn, Pc] = detail::split_by_roots(P, g, v);
  auto [Qn, Qc] = detail::split_by_roots(Q, g, v);

  detail::RootProduct acc{lead, MultiPoly::constant(1, u)};
  acc.pair(Pn, Q, v, 1);
  acc.pair(Pc, Qn, v, 1);
  if (Pc.degree(v) > 0) {
    struct Group {
      MultiPoly g;
      unsigned a, b;
    };
    std::vector<Group> groups;
    auto sp = squarefree_decomposition(Pc, v), sq = squarefree_decomposition(Qc, v);
    for (const auto& [A, a] : sp)
      for (const auto& [B, b] : sq) {
        MultiPoly h = poly_gcd(A, B);
        if (h.degree(v) > 0) groups.push_back({primitive_part_in(h, v), a, b});
      }
    for (std::size_t i = 0; i < groups.size(); ++i)
      for (std::size_t j = 0; j < groups.size(); ++j) {
        if (i == j)
          acc.self(groups[i].g, v, groups[i].a * groups[i].b);
        else
          acc.pair(groups[i].g, groups[j].g, v, groups[i].a * groups[j].b);
      }
  }
  auto q = try_divide(acc.num, acc.den);
  require(q.has_value(), ErrorKind::domain, "semi-resultant is not a polynomial");
  return q->with_vars(rest);
}

inline MultiPoly semi_resultant(const MultiPoly& P, const MultiPoly& Q, const std::string& v) {
  require(P.degree(v) > 0 && Q.degree(v) > 0, ErrorKind::domain, "semi-resultant needs both inputs non-constant in " + v);
  return semi_resultant_general(P, Q, v);
}

struct VarDegreeCheck {
  std::string var;
  unsigned claimed = 0, computed = 0;
};

struct SemiResCertificate {
  std::string var;
  unsigned m = 0, n = 0, k = 0;
  std::vector<VarDegreeCheck> degrees;
  unsigned deg_x_p = 0, deg_x_q = 0;
  mpz_class height_claimed, height_computed;
  MultiPoly r;
  bool ok = false;
};

// Degree and height certificate for r = sres_v(P, Q).
inline SemiResCertificate certify_semiresultant(const MultiPoly& P, const MultiPoly& Q, const std::string& v) {
  SemiResCertificate c;
  c.var = v;
  c.r = semi_resultant(P, Q, v);
  c.m = P.degree(v);
  c.n = Q.degree(v);
  std::vector<std::string> cv;
  for (const auto& x : MultiPoly::merged_vars(P, Q))
    if (x != v && (P.degree(x) > 0 || Q.degree(x) > 0)) cv.push_back(x);
  c.k = static_cast<unsigned>(cv.size());
  bool ok = true;
  for (const auto& x : cv) {
    VarDegreeCheck d{x, c.n * P.degree(x) + c.m * Q.degree(x), c.r.degree(x)};
    ok = ok && d.computed <= d.claimed;
    c.degrees.push_back(d);
    c.deg_x_p = std::max(c.deg_x_p, P.degree(x));
    c.deg_x_q = std::max(c.deg_x_q, Q.degree(x));
  }
  mpz_class b81, b2, hp, hq;
  mpz_ui_pow_ui(b81.get_mpz_t(), 81, static_cast<unsigned long>(c.m) * c.n);
  mpz_ui_pow_ui(b2.get_mpz_t(), 2, static_cast<unsigned long>(c.k) * (c.n * c.deg_x_p + c.m * c.deg_x_q));
  mpz_pow_ui(hp.get_mpz_t(), P.height().get_mpz_t(), c.n);
  mpz_pow_ui(hq.get_mpz_t(), Q.height().get_mpz_t(), c.m);
  c.height_claimed = b81 * b2 * hp * hq;
  c.height_computed = c.r.height();
  c.ok = ok && c.height_computed <= c.height_claimed;
  return c;
}

constexpr double kDefaultK0 = 2.0;

// val * max(1,|theta|)^(p1deg q1deg) * H(P)^n * H(Q)^m * e^(m n k0), in log scale.
inline double smallness_transfer_log(const MultiPoly& P, const MultiPoly& Q, const std::string& v, const Ball& theta,
                                     unsigned p1deg, unsigned q1deg, double val, double k0 = kDefaultK0) {
  require(val < 1.0, ErrorKind::hypothesis_violated, "max{|P1(theta)|, |Q1(theta)|} must be < 1");
  require(val >= 0.0, ErrorKind::invalid_argument, "val must be nonnegative");
  double m = P.degree(v), n = Q.degree(v);
  double lt = std::max(0.0, theta.log_abs_upper().to_double());
  return std::log(val) + static_cast<double>(p1deg) * q1deg * lt + n * std::log(P.height().get_d()) +
         m * std::log(Q.height().get_d()) + m * n * k0;
}

inline double smallness_transfer(const MultiPoly& P, const MultiPoly& Q, const std::string& v, const Ball& theta,
                                 unsigned p1deg, unsigned q1deg, double val, double k0 = kDefaultK0) {
  if (val == 0.0) {
    require(!P.is_zero() && !Q.is_zero(), ErrorKind::invalid_argument, "zero input polynomial");
    return 0.0;
  }
  return std::exp(smallness_transfer_log(P, Q, v, theta, p1deg, q1deg, val, k0));
}

constexpr unsigned kFactorCap = 10;

namespace detail {

inline std::vector<mpz_class> coeffs_low_high(const MultiPoly& p, const std::string& v) {
  std::vector<mpz_class> out;
  for (const auto& c : p.coefficients_in(v)) out.push_back(c.constant_value());
  return out;
}

inline mpz_class eval_int(const std::vector<mpz_class>& c, long x) {
  mpz_class acc = 0;
  for (std::size_t k = c.size(); k-- > 0;) acc = acc * x + c[k];
  return acc;
}

inline std::vector<mpz_class> positive_divisors(mpz_class n) {
  n = abs(n);
  std::vector<mpz_class> out{1};
  mpz_class p = 2;
  while (p * p <= n) {
    unsigned e = 0;
    while (mpz_divisible_p(n.get_mpz_t(), p.get_mpz_t())) {
      n /= p;
      ++e;
    }
    if (e) {
      std::size_t base = out.size();
      mpz_class pk = 1;
      for (unsigned i = 0; i < e; ++i) {
        pk *= p;
        for (std::size_t j = 0; j < base; ++j) out.push_back(out[j] * pk);
      }
    }
    p += (p == 2) ? 1 : 2;
  }
  if (n > 1) {
    std::size_t base = out.size();
    for (std::size_t j = 0; j < base; ++j) out.push_back(out[j] * n);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Smallest-degree nontrivial factor of a squarefree primitive polynomial, if any.
inline std::optional<MultiPoly> kronecker_find(const MultiPoly& f, const std::string& v) {
  auto c = coeffs_low_high(f, v);
  unsigned deg = f.degree(v);
  if (c[0] == 0) return monomial(v, 1).with_vars(f.vars());
  if (deg < 2) return std::nullopt;
  struct Node {
    long x;
    mpz_class val;
    std::size_t ndiv;
  };
  std::vector<Node> nodes;
  for (std::size_t i = 0; nodes.size() < 4 * deg + 8 && i < 200; ++i) {
    long x = interp_node(i);
    mpz_class y = eval_int(c, x);
    if (y == 0) return (monomial(v, 1) - MultiPoly::constant(x)).with_vars(f.vars());
    nodes.push_back({x, y, 0});
  }
  for (auto& nd : nodes) nd.ndiv = positive_divisors(nd.val).size();
  std::stable_sort(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) { return a.ndiv < b.ndiv; });
  for (unsigned s = 1; s <= deg / 2; ++s) {
    std::vector<Node> pts(nodes.begin(), nodes.begin() + s + 1);
    // Lagrange basis polynomials for the chosen nodes.
    std::vector<std::vector<mpq_class>> basis(s + 1, std::vector<mpq_class>(s + 1, 0));
    for (unsigned i = 0; i <= s; ++i) {
      std::vector<mpq_class> poly{1};
      mpq_class denom = 1;
      for (unsigned j = 0; j <= s; ++j) {
        if (j == i) continue;
        std::vector<mpq_class> next(poly.size() + 1, 0);
        for (std::size_t t = 0; t < poly.size(); ++t) {
          next[t + 1] += poly[t];
          next[t] -= poly[t] * pts[j].x;
        }
        poly = next;
        denom *= pts[i].x - pts[j].x;
      }
      for (unsigned t = 0; t <= s; ++t) basis[i][t] = poly[t] / denom;
    }
    std::vector<std::vector<mpz_class>> choices(s + 1);
    for (unsigned i = 0; i <= s; ++i) {
      for (const auto& d : positive_divisors(pts[i].val)) {
        choices[i].push_back(d);
        if (i > 0) choices[i].push_back(-d);
      }
    }
    std::vector<std::size_t> idx(s + 1, 0);
    for (;;) {
      std::vector<mpq_class> g(s + 1, 0);
      for (unsigned i = 0; i <= s; ++i)
        for (unsigned t = 0; t <= s; ++t) g[t] += basis[i][t] * choices[i][idx[i]];
      bool integral = g[s] != 0;
      for (unsigned t = 0; t <= s && integral; ++t) integral = g[t].get_den() == 1;
      if (integral) {
        std::vector<mpz_class> gz;
        for (auto& q : g) gz.push_back(q.get_num());
        MultiPoly cand = normalize_sign(MultiPoly::univariate(v, gz));
        if (try_divide(f, cand).has_value()) return cand.with_vars(f.vars());
      }
      std::size_t i = 0;
      while (i <= s && ++idx[i] == choices[i].size()) idx[i++] = 0;
      if (i > s) break;
    }
  }
  return std::nullopt;
}

}  // namespace detail

// Complete factorization over Z; a nontrivial content (with sign) is listed first as a constant.
inline std::vector<std::pair<MultiPoly, unsigned>> kronecker_factor(const MultiPoly& P) {
  require(!P.is_zero(), ErrorKind::domain, "cannot factor the zero polynomial");
  auto sv = P.support_vars();
  require(sv.size() <= 1, ErrorKind::invalid_argument, "kronecker_factor expects a univariate polynomial");
  std::vector<std::pair<MultiPoly, unsigned>> out;
  if (sv.empty()) {
    if (P.constant_value() != 1) out.emplace_back(MultiPoly::constant(P.constant_value()), 1);
    return out;
  }
  const std::string v = sv[0];
  MultiPoly p = P.drop_unused_vars();
  require(p.degree(v) <= kFactorCap, ErrorKind::factor_cap,
          "degree " + std::to_string(p.degree(v)) + " exceeds the cap " + std::to_string(kFactorCap));
  mpz_class cont = p.content();
  if (sgn(p.coefficients_in(v).back().constant_value()) < 0) cont = -cont;
  if (cont != 1) out.emplace_back(MultiPoly::constant(cont), 1);
  p = p.divide_exact(cont);
  std::vector<std::pair<MultiPoly, unsigned>> facs;
  for (auto& [a, mult] : squarefree_decomposition(p, v)) {
    MultiPoly rest = normalize_sign(a);
    while (rest.degree(v) > 0) {
      auto f = detail::kronecker_find(rest, v);
      if (!f) {
        facs.emplace_back(rest, mult);
        break;
      }
      facs.emplace_back(*f, mult);
      rest = divide_exact(rest, *f);
    }
  }
  std::sort(facs.begin(), facs.end(), [&](const auto& a, const auto& b) {
    if (a.first.degree(v) != b.first.degree(v)) return a.first.degree(v) < b.first.degree(v);
    return detail::coeffs_low_high(a.first, v) < detail::coeffs_low_high(b.first, v);
  });
  out.insert(out.end(), facs.begin(), facs.end());
  return out;
}

struct FactorBudget {
  double lambda = 4.0;
  unsigned d = 0;
  double h = 0.0;
};

struct FactorPower {
  MultiPoly u;
  unsigned v = 0;
  double log_value_upper = 0.0;  // certified upper bound on log|u(w)^v|
  double log_p_upper = 0.0;      // certified upper bound on log|P(w)|
  double pre_threshold = 0.0;    // -lambda d (h + d)
  double post_threshold = 0.0;   // -(lambda - 1) d (h + d)
  bool height_flag = true;       // e^h >= H(P)
};

inline void validate_budget(const FactorBudget& b, const MultiPoly& P) {
  require(b.lambda > 3.0, ErrorKind::invalid_argument, "lambda must exceed 3");
  require(b.d >= P.total_degree(), ErrorKind::invalid_argument, "d must be at least deg P");
  require(std::isfinite(b.h) && b.h >= 0.0, ErrorKind::invalid_argument, "h must be a nonnegative real");
}

// Irreducible-power factor u^v of P that is small at w.
inline FactorPower factor_small_at_point(const MultiPoly& P, const Ball& w, const FactorBudget& budget) {
  require(!P.is_zero(), ErrorKind::domain, "zero polynomial");
  validate_budget(budget, P);
  FactorPower out;
  double scale = budget.d * (budget.h + budget.d);
  out.pre_threshold = -budget.lambda * scale;
  out.post_threshold = -(budget.lambda - 1.0) * scale;
  out.height_flag = budget.h + 1e-12 >= std::log(P.height().get_d());
  mpfr_prec_t prec = w.prec();
  Ball pw = eval_univariate(P, w, prec);
  out.log_p_upper = pw.log_abs_upper().to_double();
  if (!(out.log_p_upper < out.pre_threshold)) {
    double lo = pw.log_abs_lower().to_double();
    require(!(lo >= out.pre_threshold), ErrorKind::hypothesis_violated, "log|P(w)| is not below -lambda d (h + d)");
    fail(ErrorKind::refine_precision, "cannot certify log|P(w)| < -lambda d (h + d) at this precision");
  }
  bool found = false;
  for (const auto& [f, mult] : kronecker_factor(P)) {
    if (f.is_constant()) continue;
    Ball fw = eval_univariate(f, w, prec).pow(mult);
    double ub = fw.log_abs_upper().to_double();
    if (!found || ub < out.log_value_upper) {
      out.u = f;
      out.v = mult;
      out.log_value_upper = ub;
      found = true;
    }
  }
  require(found && out.log_value_upper < out.post_threshold, ErrorKind::lemma_violation,
          "no irreducible power satisfies log|u(w)^v| < -(lambda - 1) d (h + d)");
  return out;
}

}  // namespace gk
