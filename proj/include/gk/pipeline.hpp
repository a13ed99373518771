#pragma once

#include <cmath>
#include <cstdio>
#include <thread>

#include "gk/algnum.hpp"
#include "gk/elimination.hpp"
#include "gk/polyeval.hpp"

namespace gk {

inline std::string fmt_real(double x, int digits = 12) {
  if (std::isnan(x)) return "NA";
  if (std::isinf(x)) return x < 0 ? "-inf" : "inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

inline json real_json(double x) { return std::isfinite(x) ? json(x) : json(fmt_real(x)); }

inline double log_height(const MultiPoly& p) {
  if (p.is_zero()) return 0.0;
  long e = 0;
  double m = mpz_get_d_2exp(&e, p.height().get_mpz_t());
  return std::log(m) + static_cast<double>(e) * std::log(2.0);
}

struct BudgetInputs {
  long dxP = 0, dyP = 0;
  long dxQ = 0, dyQ = 0, dzQ = 0, degQ = 0;
  double logHP = 0, logHQ = 0;
};

struct SmallnessBudget {
  BudgetInputs in;
  mpz_class A = 0;
  double B = 0;
  double log_r = 0;
  double C = 1, C1 = 1, C2 = 1;

  double r() const { return std::exp(log_r); }
};

inline BudgetInputs budget_inputs(const MultiPoly& P, const MultiPoly& Q) {
  return {P.degree("x"), P.degree("y"), Q.degree("x"), Q.degree("y"), Q.degree("z"),
          static_cast<long>(Q.total_degree()), log_height(P), log_height(Q)};
}

inline SmallnessBudget budget_unchecked(const BudgetInputs& in, double C = 1, double C1 = 1) {
  SmallnessBudget b;
  b.in = in;
  b.C = C;
  b.C1 = C1;
  b.A = mpz_class(in.dyP) * (in.dxQ + in.dzQ) + mpz_class(in.dxP) * (in.dyQ + in.dzQ);
  b.B = static_cast<double>((in.dyQ + in.dzQ) * (in.dyP + in.dxP)) +
        in.dyP * (static_cast<double>(in.dxQ + in.dzQ + in.degQ) + in.logHQ) + in.logHP * (in.dyQ + in.dzQ);
  double A = b.A.get_d();
  b.log_r = A * A * b.B * static_cast<double>(in.dyP) * static_cast<double>(in.dzQ);
  return b;
}

inline SmallnessBudget budget_from_degrees(const BudgetInputs& in, double C = 1, double C1 = 1) {
  require(in.dxP >= 0 && in.dyP >= 0 && in.dxQ >= 0 && in.dyQ >= 0 && in.dzQ >= 0 && in.degQ >= 0 && in.logHP >= 0 &&
              in.logHQ >= 0,
          ErrorKind::invalid_argument, "degrees and log heights must be nonnegative");
  auto b = budget_unchecked(in, C, C1);
  require(b.log_r > 0, ErrorKind::degenerate_budget, "degenerate budget: log r = 0 (deg_y P, deg_z Q, A or B vanishes)");
  return b;
}

inline SmallnessBudget budget(const MultiPoly& P, const MultiPoly& Q, double C = 1, double C1 = 1) {
  for (const auto& v : P.support_vars())
    require(v == "x" || v == "y", ErrorKind::unknown_variable, "P must be a polynomial in x, y");
  for (const auto& v : Q.support_vars())
    require(v == "x" || v == "y" || v == "z", ErrorKind::unknown_variable, "Q must be a polynomial in x, y, z");
  return budget_from_degrees(budget_inputs(P, Q), C, C1);
}

inline json budget_to_json(const SmallnessBudget& b) {
  return {{"A", b.A.get_str()},
          {"B", b.B},
          {"log_r", b.log_r},
          {"r", fmt_real(b.r())},
          {"C", b.C},
          {"C1", b.C1},
          {"inputs",
           {{"deg_x_P", b.in.dxP}, {"deg_y_P", b.in.dyP}, {"deg_x_Q", b.in.dxQ}, {"deg_y_Q", b.in.dyQ}, {"deg_z_Q", b.in.dzQ},
            {"deg_Q", b.in.degQ}, {"log_H_P", b.in.logHP}, {"log_H_Q", b.in.logHQ}}}};
}

// Coefficients of p in var as balls, other variables bound by env.
inline std::vector<Ball> ball_coefficients(const MultiPoly& p, const std::string& var, const BallEnv& env, mpfr_prec_t prec) {
  std::vector<Ball> out;
  for (const auto& c : p.coefficients_in(var)) out.push_back(eval_poly(c, env, prec));
  return out;
}

struct Step0Result {
  NearestRoot xi1;
  std::optional<NearestRoot> xi2;  // empty: Q(L, xi1, z) is constant, resultant path
  unsigned dropped_leading = 0;    // leading z-coefficients numerically zero at xi1
  double log_gap1 = 0, log_gap2 = 0;
};

inline Step0Result step0_nearest_roots(const MultiPoly& P, const MultiPoly& Q, const TranscendentalTriple& T) {
  mpfr_prec_t prec = T.precision_bits;
  require(P.degree("y") > 0, ErrorKind::no_roots, "P(L, y) is constant in y");
  Step0Result r;
  r.xi1 = nearest_root(ball_coefficients(P, "y", {{"x", T.L}}, prec), T.tau1, prec);
  r.log_gap1 = r.xi1.gap.is_zero() ? -INFINITY : std::log(r.xi1.gap.to_double());
  auto qc = ball_coefficients(Q, "z", {{"x", T.L}, {"y", r.xi1.xi}}, prec);
  Mag tiny = Mag::pow2(-static_cast<long>(prec / 2));
  while (qc.size() > 1 && !qc.back().excludes_zero() && qc.back().abs_upper() <= tiny) {
    qc.pop_back();
    ++r.dropped_leading;
  }
  if (qc.size() <= 1) return r;
  require(qc.back().excludes_zero(), ErrorKind::refine_precision, "leading z-coefficient of Q(L, xi1, z) not certified nonzero");
  r.xi2 = nearest_root(qc, T.tau2, prec);
  r.log_gap2 = r.xi2->gap.is_zero() ? -INFINITY : std::log(r.xi2->gap.to_double());
  return r;
}

inline json step0_to_json(const Step0Result& r) {
  json j = {{"xi1", ball_to_json(r.xi1.xi)}, {"log_gap1", real_json(r.log_gap1)}};
  if (r.xi2) {
    j["xi2"] = ball_to_json(r.xi2->xi);
    j["log_gap2"] = real_json(r.log_gap2);
    j["path"] = "nearest_root";
  } else {
    j["xi2"] = nullptr;
    j["path"] = "resultant";
  }
  j["dropped_leading"] = r.dropped_leading;
  return j;
}

struct ChainStep {
  std::string op;
  std::vector<std::string> inputs;
  std::string output;
  MultiPoly result;
  std::vector<VarDegreeCheck> degrees;
  mpz_class height_claimed = 0, height_computed = 0;
  double log_mod_upper = 0, log_mod_lower = 0;
  bool pass = true;
};

struct EliminationCertificate {
  std::vector<ChainStep> steps;
  std::string branch;  // "leading_coefficient" or "semi_resultant"
  double threshold = 0;
  double contract_A3 = 0, contract_A4 = 0;
  bool pass = false;
};

struct ChainOptions {
  double eps = 0.5;
  long N = 2;
};

namespace detail {

inline void set_modulus(ChainStep& s, const Ball& v) {
  s.log_mod_upper = v.log_abs_upper().to_double();
  s.log_mod_lower = v.log_abs_lower().to_double();
}

inline ChainStep semires_step(const std::string& name, const MultiPoly& A, const std::string& an, const MultiPoly& B,
                              const std::string& bn, const std::string& v) {
  ChainStep s;
  s.output = name;
  s.inputs = {an, bn};
  if (A.degree(v) == 0 || B.degree(v) == 0) {
    s.op = "power";
    const MultiPoly& base = A.degree(v) == 0 ? A : B;
    unsigned e = A.degree(v) == 0 ? B.degree(v) : A.degree(v);
    s.result = base.pow(e);
    s.height_claimed = s.height_computed = s.result.height();
    return s;
  }
  s.op = "semi_resultant_" + v;
  auto c = certify_semiresultant(A, B, v);
  s.result = c.r;
  s.degrees = c.degrees;
  s.height_claimed = c.height_claimed;
  s.height_computed = c.height_computed;
  s.pass = c.ok;
  return s;
}

}  // namespace detail

inline std::pair<MultiPoly, EliminationCertificate> eliminate_chain(const MultiPoly& A1, const MultiPoly& P, const MultiPoly& Q,
                                                                    const Ball& xi1, const TranscendentalTriple& T,
                                                                    const ChainOptions& opt = {}) {
  require(!A1.is_zero(), ErrorKind::chain_degenerate, "A1 is the zero polynomial");
  require(opt.N >= 1 && opt.eps > 0, ErrorKind::invalid_argument, "chain needs N >= 1 and eps > 0");
  mpfr_prec_t prec = T.precision_bits;
  EliminationCertificate cert;
  double n4 = std::pow(static_cast<double>(opt.N), 4) * std::log(static_cast<double>(opt.N));
  cert.threshold = -opt.eps / 10 * n4;
  cert.contract_A3 = -opt.eps / 11 * n4;
  cert.contract_A4 = -opt.eps / 12 * n4;
  BallEnv env{{"x", T.L}, {"y", xi1}, {"z", T.tau2}};

  ChainStep s2;
  s2.op = "norm";
  s2.inputs = {"A1"};
  s2.output = "A2";
  s2.result = A1;
  s2.height_claimed = s2.height_computed = A1.height();
  detail::set_modulus(s2, eval_poly(A1, env, prec));
  cert.steps.push_back(s2);

  MultiPoly w = A1.degree("z") == 0 ? A1 : A1.leading_coefficient("z");
  ChainStep sw;
  sw.op = "leading_coefficient_z";
  sw.inputs = {"A2"};
  sw.output = "w";
  sw.result = w;
  sw.height_claimed = sw.height_computed = w.height();
  detail::set_modulus(sw, eval_poly(w, env, prec));
  cert.steps.push_back(sw);

  MultiPoly A3;
  if (A1.degree("z") == 0 || sw.log_mod_upper <= cert.threshold) {
    cert.branch = "leading_coefficient";
    A3 = w;
  } else {
    cert.branch = "semi_resultant";
    auto s3 = detail::semires_step("A3", A1, "A2", Q, "Q", "z");
    A3 = s3.result;
    require(!A3.is_zero(), ErrorKind::chain_degenerate, "A3 vanishes: A2 and Q are not coprime in z");
    detail::set_modulus(s3, eval_poly(A3, env, prec));
    cert.steps.push_back(s3);
  }
  require(!A3.is_zero(), ErrorKind::chain_degenerate, "A3 is the zero polynomial");
  auto s4 = detail::semires_step("A4", A3, "A3", P, "P", "y");
  require(!s4.result.is_zero(), ErrorKind::chain_degenerate, "A4 vanishes: A3 and P are not coprime in y");
  require(s4.result.degree("y") == 0 && s4.result.degree("z") == 0, ErrorKind::chain_degenerate,
          "A4 still depends on y or z");
  detail::set_modulus(s4, eval_poly(s4.result, env, prec));
  cert.steps.push_back(s4);
  cert.pass = true;
  for (const auto& s : cert.steps) cert.pass = cert.pass && s.pass;
  return {s4.result, cert};
}

inline json certificate_to_json(const EliminationCertificate& c) {
  json steps = json::array();
  for (const auto& s : c.steps) {
    json deg = json::array();
    for (const auto& d : s.degrees) deg.push_back({{"var", d.var}, {"claimed", d.claimed}, {"computed", d.computed}});
    steps.push_back({{"op", s.op},
                     {"inputs", s.inputs},
                     {"output", s.output},
                     {"result", s.result.to_string()},
                     {"degrees", deg},
                     {"height_claimed", s.height_claimed.get_str()},
                     {"height_computed", s.height_computed.get_str()},
                     {"log_modulus_upper", real_json(s.log_mod_upper)},
                     {"log_modulus_lower", real_json(s.log_mod_lower)},
                     {"pass", s.pass}});
  }
  return {{"branch", c.branch},
          {"threshold", c.threshold},
          {"contract_A3", c.contract_A3},
          {"contract_A4", c.contract_A4},
          {"steps", steps},
          {"pass", c.pass}};
}

struct StabilizationEntry {
  FactorPower t;
  MultiPoly tN;
  std::optional<mpz_class> r;  // resultant with the previous t
  bool u_divides_prev = false, u_divides_cur = false;
};

struct StabilizationReport {
  std::vector<StabilizationEntry> entries;
  bool stable = false;
  std::size_t stable_from = 0;
  MultiPoly u;
  std::string error;
};

inline StabilizationReport irreducible_stabilize(const std::vector<MultiPoly>& s, const Ball& w,
                                                 const std::vector<FactorBudget>& budgets) {
  require(!s.empty(), ErrorKind::invalid_argument, "empty list of s_N");
  require(budgets.size() == s.size() || budgets.size() == 1, ErrorKind::invalid_argument,
          "need one budget per s_N or a single shared budget");
  StabilizationReport rep;
  for (std::size_t i = 0; i < s.size(); ++i) {
    StabilizationEntry e;
    e.t = factor_small_at_point(s[i], w, budgets.size() == 1 ? budgets[0] : budgets[i]);
    e.tN = e.t.u.pow(e.t.v);
    if (i > 0) {
      const auto& prev = rep.entries.back();
      std::string v = e.tN.support_vars().empty() ? "x" : e.tN.support_vars()[0];
      e.r = resultant(prev.tN.with_vars({v}), e.tN.with_vars({v}), v).constant_value();
      if (*e.r == 0) {
        e.u_divides_prev = try_divide(prev.tN, e.t.u).has_value();
        e.u_divides_cur = try_divide(e.tN, e.t.u).has_value();
      }
    }
    rep.entries.push_back(std::move(e));
  }
  auto same = [](const MultiPoly& a, const MultiPoly& b) { return a == b || a == -b; };
  std::size_t n = rep.entries.size();
  if (n == 1 || same(rep.entries[n - 1].t.u, rep.entries[n - 2].t.u)) {
    rep.stable = true;
    rep.u = rep.entries.back().t.u;
    rep.stable_from = n;
    while (rep.stable_from > 1 && same(rep.entries[rep.stable_from - 2].t.u, rep.u)) --rep.stable_from;
  } else {
    rep.error = "no stable factor";
  }
  return rep;
}

inline json stabilization_to_json(const StabilizationReport& r) {
  json entries = json::array();
  for (const auto& e : r.entries)
    entries.push_back({{"u", e.t.u.to_string()},
                       {"v", e.t.v},
                       {"log_t_upper", real_json(e.t.log_value_upper)},
                       {"threshold", e.t.post_threshold},
                       {"r", e.r ? json(e.r->get_str()) : json(nullptr)},
                       {"u_divides_prev", e.u_divides_prev},
                       {"u_divides_cur", e.u_divides_cur}});
  json j = {{"entries", entries}, {"stable", r.stable}};
  if (r.stable) {
    j["u"] = r.u.to_string();
    j["stable_from"] = r.stable_from;
  } else {
    j["error"] = r.error;
  }
  return j;
}

// Primitive nonconstant polynomials in vars with total degree <= deg_cap and coefficients in [-H, H],
// positive leading coefficient, ordered by (total degree, height, coefficient tuple).
inline std::vector<MultiPoly> enumerate_polys(const std::vector<std::string>& vars, unsigned deg_cap, long H) {
  require(deg_cap >= 1 && H >= 1, ErrorKind::invalid_argument, "caps must be positive");
  std::vector<Exponents> mons;
  std::function<void(std::size_t, Exponents&, unsigned)> gen = [&](std::size_t i, Exponents& e, unsigned left) {
    if (i == vars.size()) {
      mons.push_back(e);
      return;
    }
    for (unsigned k = 0; k <= left; ++k) {
      e[i] = k;
      gen(i + 1, e, left - k);
    }
    e[i] = 0;
  };
  Exponents e(vars.size());
  gen(0, e, deg_cap);
  require(mons.size() <= 12, ErrorKind::invalid_argument, "enumeration too large for the given caps");
  struct Item {
    unsigned deg;
    long height;
    std::vector<long> coef;
    MultiPoly p;
  };
  std::vector<Item> items;
  std::vector<long> c(mons.size(), -H);
  for (;;) {
    MultiPoly::Terms t;
    for (std::size_t i = 0; i < mons.size(); ++i)
      if (c[i] != 0) t[mons[i]] = c[i];
    MultiPoly p(vars, t);
    if (!p.is_zero() && !p.is_constant() && p.leading_sign() > 0 && p.content() == 1)
      items.push_back({p.total_degree(), p.height().get_si(), c, p});
    std::size_t k = 0;
    while (k < c.size() && c[k] == H) c[k++] = -H;
    if (k == c.size()) break;
    ++c[k];
  }
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
    return std::tie(a.deg, a.height, a.coef) < std::tie(b.deg, b.height, b.coef);
  });
  std::vector<MultiPoly> out;
  for (auto& it : items) out.push_back(std::move(it.p));
  return out;
}

struct ScanRow {
  MultiPoly P, Q;
  double log_max = 0, log_r = 0, fitted = NAN;
  bool resolved = false;
};

struct ScanResult {
  std::vector<ScanRow> rows;
  std::size_t unresolved = 0;
};

inline ScanResult pair_scan(unsigned deg_cap, long height_cap, const TranscendentalTriple& T, unsigned jobs = 1) {
  require(jobs >= 1, ErrorKind::invalid_argument, "jobs must be at least 1");
  auto Ps = enumerate_polys({"x", "y"}, deg_cap, height_cap);
  auto Qs = enumerate_polys({"x", "y", "z"}, deg_cap, height_cap);
  auto logs = [&](const std::vector<MultiPoly>& v) {
    std::vector<std::pair<double, double>> out;
    for (const auto& p : v) {
      Ball b = eval_poly_at_triple(p, T);
      out.emplace_back(b.log_abs_lower().to_double(), b.log_abs_upper().to_double());
    }
    return out;
  };
  auto lp = logs(Ps), lq = logs(Qs);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < Ps.size(); ++i)
    for (std::size_t j = 0; j < Qs.size(); ++j) pairs.emplace_back(i, j);
  std::vector<std::optional<ScanRow>> rows(pairs.size());
  auto work = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t k = lo; k < hi; ++k) {
      auto [i, j] = pairs[k];
      if (!poly_gcd(Ps[i], Qs[j]).is_constant()) continue;
      ScanRow r;
      r.P = Ps[i];
      r.Q = Qs[j];
      double lo_max = std::max(lp[i].first, lq[j].first), hi_max = std::max(lp[i].second, lq[j].second);
      r.resolved = std::isfinite(lo_max);
      r.log_max = r.resolved ? (lo_max + hi_max) / 2 : hi_max;
      r.log_r = budget_unchecked(budget_inputs(Ps[i], Qs[j])).log_r;
      if (r.resolved && r.log_max < 0 && r.log_r > 0) r.fitted = std::log(-r.log_max) / r.log_r;
      rows[k] = std::move(r);
    }
  };
  unsigned nt = std::min<std::size_t>(jobs, std::max<std::size_t>(1, pairs.size()));
  std::vector<std::thread> pool;
  std::size_t chunk = (pairs.size() + nt - 1) / nt;
  for (unsigned t = 0; t < nt; ++t) {
    std::size_t lo = t * chunk, hi = std::min(pairs.size(), lo + chunk);
    if (lo < hi) pool.emplace_back(work, lo, hi);
  }
  for (auto& th : pool) th.join();
  ScanResult out;
  for (auto& r : rows)
    if (r) {
      if (!r->resolved) ++out.unresolved;
      out.rows.push_back(std::move(*r));
    }
  return out;
}

inline std::string scan_to_csv(const ScanResult& s, const std::string& header_comment = "") {
  std::string out;
  if (!header_comment.empty()) out += "# " + header_comment + "\n";
  out += "P,Q,log_max,log_r,fitted_exponent,status\n";
  for (const auto& r : s.rows) {
    out += r.P.to_string() + "," + r.Q.to_string() + "," + fmt_real(r.log_max, 15) + "," + fmt_real(r.log_r, 15) + "," +
           fmt_real(r.fitted, 15) + "," + (r.resolved ? "ok" : "unresolved") + "\n";
  }
  return out;
}

enum class WaldschmidtForm { power, logratio };

// log^+ convention: log log H is read as log max(log H, 1).
inline double waldschmidt_bound(long N, double H, WaldschmidtForm which, double C2c, double C3c) {
  require(N >= 1, ErrorKind::invalid_argument, "N must be at least 1");
  require(H >= 1, ErrorKind::invalid_argument, "H must be at least 1");
  double n = static_cast<double>(N), lN = std::log(n), lH = std::log(H);
  double den = (1 + lN) * (1 + lN);
  if (which == WaldschmidtForm::power) return -C2c * n * n * n * (lH + lN) * (std::log(std::max(lH, 1.0)) + lN) / den;
  return -2 * C3c * n * n * n * (lH + n * lN) / den;
}

inline double corollary_bound(const MultiPoly& P, double Cc) {
  require(!P.is_zero(), ErrorKind::invalid_argument, "P must be nonzero");
  double dy = P.degree("y"), dx = P.degree("x");
  return -Cc * dy * (dy + dx) * (dy + dx) * (2 * dy + dx + log_height(P));
}

}  // namespace gk
