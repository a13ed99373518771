#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <random>
#include <sstream>

#include "gk/auxfn.hpp"
#include "gk/pipeline.hpp"
#include "gk/siegel.hpp"

namespace gk {

struct CriterionResult {
  int id = 0;
  std::string suite;
  std::string name;
  bool pass = false;
  std::string measured;
  double seconds = 0;
};

struct SuiteOptions {
  std::uint64_t seed = 1;
  std::vector<std::string> filter;
  bool inject_fault = false;
  unsigned jobs = 1;
};

namespace accept {

using Clock = std::chrono::steady_clock;

inline double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

inline std::mt19937_64 rng_for(std::uint64_t seed, int id) {
  std::seed_seq s{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), static_cast<std::uint32_t>(id)};
  return std::mt19937_64(s);
}

inline std::string num(double x, int digits = 4) {
  std::ostringstream o;
  o.precision(digits);
  o << x;
  return o.str();
}

inline MultiPoly random_poly(std::mt19937_64& rng, const std::vector<std::string>& vars, const std::vector<unsigned>& max_deg,
                             long max_coeff, int max_terms) {
  std::uniform_int_distribution<long> coeff(-max_coeff, max_coeff);
  std::uniform_int_distribution<int> nterms(1, max_terms);
  MultiPoly::Terms t;
  int n = nterms(rng);
  for (int i = 0; i < n; ++i) {
    Exponents e(vars.size());
    for (std::size_t k = 0; k < vars.size(); ++k) e[k] = std::uniform_int_distribution<unsigned>(0, max_deg[k])(rng);
    t[e] = coeff(rng);
  }
  return MultiPoly(vars, t);
}

inline AlgebraicNumber sqrt2() { return AlgebraicNumber::from_minpoly({-2, 0, 1}, {1, 2, 0, 0}); }

inline AuxParams desk_params() {
  AuxParams p;
  p.N = 1;
  p.D1 = 1;
  p.D2 = 5;
  return p;
}

inline CriterionResult semires_certificates(const SuiteOptions& o) {
  CriterionResult r{1, "semires", "semi-resultant certificates (500 pairs)"};
  auto t0 = Clock::now();
  auto rng = rng_for(o.seed, 1);
  const std::vector<std::string> vars{"x1", "x2", "y"};
  int done = 0, failed = 0;
  double worst = -std::numeric_limits<double>::infinity();
  while (done < 500) {
    auto p = random_poly(rng, vars, {3, 3, 4}, 10, 6);
    auto q = random_poly(rng, vars, {3, 3, 4}, 10, 6);
    if (p.degree("y") == 0 || q.degree("y") == 0) continue;
    auto c = certify_semiresultant(p, q, "y");
    if (!c.ok) ++failed;
    if (c.height_computed > 0) {
      double ratio = std::log(mpz_class(c.height_computed).get_d()) - std::log(mpz_class(c.height_claimed).get_d());
      worst = std::max(worst, ratio);
    }
    ++done;
  }
  r.seconds = since(t0);
  r.pass = failed == 0 && r.seconds < 60;
  r.measured = "pairs=" + std::to_string(done) + " failures=" + std::to_string(failed) +
               " max_log_height_slack=" + num(worst);
  return r;
}

inline CriterionResult semires_oracle(const SuiteOptions& o) {
  CriterionResult r{2, "semires", "semi-resultant equals resultant (exhaustive univariate)"};
  auto t0 = Clock::now();
  std::vector<MultiPoly> polys;
  for (int a = -2; a <= 2; ++a)
    for (int b = -2; b <= 2; ++b)
      for (int c = -2; c <= 2; ++c)
        for (int d = -2; d <= 2; ++d) {
          MultiPoly p = MultiPoly::univariate("y", {d, c, b, a});
          if (p.degree("y") >= 1 && squarefree_part(p, "y").degree("y") == p.degree("y")) polys.push_back(p);
        }
  long checked = 0, mismatches = 0;
  for (const auto& p : polys)
    for (const auto& q : polys) {
      if (poly_gcd(p, q).degree("y") > 0) continue;
      auto s = semi_resultant(p, q, "y"), res = resultant(p, q, "y");
      if (o.inject_fault) s = s + MultiPoly::constant(1);
      if (!(s == res || s == -res)) ++mismatches;
      ++checked;
    }
  r.seconds = since(t0);
  r.pass = mismatches == 0 && checked > 0;
  r.measured = "pairs=" + std::to_string(checked) + " mismatches=" + std::to_string(mismatches);
  return r;
}

inline CriterionResult siegel_suite(const SuiteOptions& o) {
  CriterionResult r{3, "siegel", "Siegel systems (100 seeded)"};
  auto t0 = Clock::now();
  auto rng = rng_for(o.seed, 3);
  int failed = 0;
  for (int i = 0; i < 100; ++i) {
    std::size_t M = 1 + rng() % 3, k = 1 + rng() % 6;
    unsigned d = static_cast<unsigned>(rng() % 3);
    long A = 1 + static_cast<long>(rng() % 5);
    auto s = random_system(rng, M, d, A, k);
    try {
      if (!verify_solution(s, siegel_solve(s)).ok()) ++failed;
    } catch (const Error&) {
      ++failed;
    }
  }
  r.seconds = since(t0);
  r.pass = failed == 0 && r.seconds < 120;
  r.measured = "systems=100 failures=" + std::to_string(failed);
  return r;
}

inline CriterionResult aux_desk(const SuiteOptions&) {
  CriterionResult r{4, "aux", "auxiliary function at desk scale"};
  auto t0 = Clock::now();
  auto p = desk_params();
  auto F = construct_aux(p, quadratic_data(sqrt2()), AlgebraicNumber::rational(2), AlgebraicNumber::rational(3));
  auto T = eval_triple(AlgebraicNumber::rational(2), AlgebraicNumber::rational(3), sqrt2(), 512);
  auto v = verify_aux(F, p, T, 1e-40, 20, 5, 720);
  r.seconds = since(t0);
  r.pass = v.grid_ok && v.schwarz_ok && v.tijdeman_ok && r.seconds < 300;
  r.measured = "grid_max=" + v.grid_max.str() + " zeros_inside=" + std::to_string(v.zeros_inside) +
               " schwarz=" + (v.schwarz_ok ? "ok" : "fail") + " tijdeman=" + (v.tijdeman_ok ? "ok" : "fail");
  return r;
}

inline CriterionResult hermite_points(const SuiteOptions& o) {
  CriterionResult r{5, "hermite", "Hermite reconstruction (10 points)"};
  auto t0 = Clock::now();
  const mpfr_prec_t prec = 256;
  auto F = construct_aux(desk_params(), quadratic_data(sqrt2()), AlgebraicNumber::rational(2), AlgebraicNumber::rational(3));
  auto T = eval_triple(AlgebraicNumber::rational(2), AlgebraicNumber::rational(3), sqrt2(), prec);
  auto vals = psi_values(F, T);
  std::vector<Ball> grid;
  for (const auto& g : grid_points(1, F.qd, T)) grid.push_back(g.value);
  BallFn G = [&](const Ball& t) { return eval_aux_values(F, vals, t, T); };
  auto rng = rng_for(o.seed, 5);
  std::uniform_int_distribution<long> coord(-192, 192);
  double worst_rel = 0, worst_order = std::numeric_limits<double>::infinity();
  int points = 0;
  bool ok = true;
  while (points < 10) {
    Ball z = Ball::from_mpq(mpq_class(coord(rng), 64), mpq_class(coord(rng), 64), prec);
    bool clear = true;
    for (const auto& g : grid) clear = clear && (z - g).abs_lower().to_double() > 0.25;
    if (!clear) continue;
    ++points;
    Ball direct = G(z);
    auto h = hermite_eval(G, grid, z, 10, prec);
    double rel = (h.value - direct).abs_upper().to_double() / direct.abs_upper().to_double();
    worst_rel = std::max(worst_rel, rel);
    std::vector<double> err;
    for (unsigned n : {128u, 256u, 512u})
      err.push_back((hermite_eval(G, grid, z, 10, prec, n).value - direct).abs_upper().to_double());
    double order = std::min(std::log2(err[0] / err[1]), std::log2(err[1] / err[2]));
    worst_order = std::min(worst_order, order);
    ok = ok && rel <= 1e-20 && order >= 2;
  }
  r.seconds = since(t0);
  r.pass = ok;
  r.measured = "points=10 max_rel_error=" + num(worst_rel) + " min_observed_order=" + num(worst_order);
  return r;
}

inline CriterionResult scan_repro(const SuiteOptions& o) {
  CriterionResult r{6, "scan", "coprime pair scan (deg 1, height 2, 256 bits)"};
  auto t0 = Clock::now();
  auto T = eval_triple(AlgebraicNumber::rational(2), AlgebraicNumber::rational(3), sqrt2(), 256);
  auto first = pair_scan(1, 2, T, 1);
  double first_seconds = since(t0);
  std::size_t infinite = 0;
  for (const auto& row : first.rows)
    if (!std::isfinite(row.log_max)) ++infinite;
  std::string a = scan_to_csv(first, "acceptance");
  std::string b = scan_to_csv(pair_scan(1, 2, T, 1), "acceptance");
  std::string c = scan_to_csv(pair_scan(1, 2, T, std::max(2u, o.jobs)), "acceptance");
  r.seconds = since(t0);
  bool identical = a == b && a == c;
  r.pass = first.unresolved == 0 && infinite == 0 && identical && first_seconds < 600;
  r.measured = "pairs=" + std::to_string(first.rows.size()) + " unresolved=" + std::to_string(first.unresolved) +
               " identical=" + (identical ? "yes" : "no") + " first_run_seconds_under_600=" + (first_seconds < 600 ? "yes" : "no");
  return r;
}

inline CriterionResult budget_examples(const SuiteOptions& o) {
  CriterionResult r{7, "budget", "budget worked examples"};
  auto t0 = Clock::now();
  auto in = budget_inputs("x*y"_mp, "x*y*z"_mp);
  if (o.inject_fault) ++in.dyP;
  auto a = budget_from_degrees(in);
  in.logHQ = 1.0;
  auto b = budget_from_degrees(in);
  r.seconds = since(t0);
  r.pass = a.A == 4 && a.B == 9.0 && a.log_r == 144.0 && b.B == 10.0 && b.log_r == 160.0;
  r.measured = "A=" + a.A.get_str() + " B=" + num(a.B, 17) + " log_r=" + num(a.log_r, 17) + "; B=" + num(b.B, 17) +
               " log_r=" + num(b.log_r, 17);
  return r;
}

inline Ball near_one(mpfr_prec_t prec = 512) {
  mpz_class ten50;
  mpz_ui_pow_ui(ten50.get_mpz_t(), 10, 50);
  return Ball::from_mpq(mpq_class(ten50 + 1, ten50), prec);
}

inline CriterionResult small_factor_path(const SuiteOptions&) {
  CriterionResult r{8, "smallfactor", "small-value factor extraction"};
  auto t0 = Clock::now();
  const double lambda = 4, d = 3, h = std::log(5.0);
  auto f = factor_small_at_point("(x-1)^2*(x-5)"_mp, near_one(), {lambda, 3, h});
  double rhs = -(lambda - 1) * d * (h + d);
  r.seconds = since(t0);
  r.pass = f.u == "x-1"_mp && f.v == 2 && f.log_value_upper < rhs;
  r.measured = "u=" + f.u.to_string() + " v=" + std::to_string(f.v) + " log_upper=" + num(f.log_value_upper, 8) +
               " rhs=" + num(rhs, 8);
  return r;
}

inline CriterionResult stabilization(const SuiteOptions&) {
  CriterionResult r{9, "stabilize", "irreducible stabilization"};
  auto t0 = Clock::now();
  std::vector<MultiPoly> s;
  std::vector<FactorBudget> budgets;
  for (unsigned N = 1; N <= 5; ++N) {
    MultiPoly p = "x-1"_mp.pow(N) * (MultiPoly::variable("x") + MultiPoly::constant(N));
    s.push_back(p);
    budgets.push_back({4.0, p.total_degree(), log_height(p)});
  }
  auto rep = irreducible_stabilize(s, near_one(), budgets);
  bool all_zero = true, divides = rep.stable;
  for (std::size_t i = 0; i < rep.entries.size(); ++i) {
    const auto& e = rep.entries[i];
    if (i > 0) all_zero = all_zero && e.r && *e.r == 0;
    divides = divides && try_divide(e.tN, rep.u).has_value();
  }
  r.seconds = since(t0);
  r.pass = rep.stable && all_zero && divides;
  r.measured = "u=" + (rep.stable ? rep.u.to_string() : std::string("none")) + " all_r_zero=" + (all_zero ? "yes" : "no") +
               " divides_all=" + (divides ? "yes" : "no");
  return r;
}

inline CriterionResult ball_fuzz(const SuiteOptions& o) {
  CriterionResult r{10, "ball", "ball arithmetic containment fuzz"};
  auto t0 = Clock::now();
  auto rng = rng_for(o.seed, 10);
  const mpfr_prec_t p = 96, hp = 4 * p;
  auto rq = [&](long range, long den) { return mpq_class(std::uniform_int_distribution<long>(-range, range)(rng), den); };
  struct Sample {
    Ball ball;
    Ball point;
  };
  auto sample = [&]() {
    Ball b = Ball::from_mpq(rq(4000, 997), rq(4000, 991), p);
    b.add_error(Mag::pow2(-std::uniform_int_distribution<int>(8, 40)(rng)));
    mpq_class rad = b.rad_q();
    mpq_class a = rq(70, 100), c = rq(70, 100);
    return Sample{b, Ball::from_mpq(b.re_q() + rad * a, b.im_q() + rad * c, hp)};
  };
  long checks = 0, violations = 0;
  auto check = [&](const Ball& out, const Ball& truth) {
    ++checks;
    if (!out.contains(truth)) ++violations;
  };
  const Ball milli = Ball::from_mpq(mpq_class(1, 1000), p), milli_hp = Ball::from_mpq(mpq_class(1, 1000), hp);
  for (int i = 0; i < 10000; ++i) {
    auto s = sample(), t = sample();
    const Ball &x = s.point, &y = t.point;
    check(s.ball + t.ball, x + y);
    check(s.ball - t.ball, x - y);
    check(s.ball * t.ball, x * y);
    check(s.ball.pow(3), x.pow(3));
    if (t.ball.excludes_zero()) {
      check(s.ball / t.ball, x / y);
      check(t.ball.inv(), y.inv());
    }
    check((s.ball * milli).exp(), (x * milli_hp).exp());
    if (s.ball.excludes_zero() && s.ball.mid_re().sign() > 0) check(s.ball.log(), x.log());
  }
  r.seconds = since(t0);
  r.pass = violations == 0;
  r.measured = "points=10000 checks=" + std::to_string(checks) + " violations=" + std::to_string(violations);
  return r;
}

struct Criterion {
  int id;
  std::string suite;
  std::function<CriterionResult(const SuiteOptions&)> run;
};

inline const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {1, "semires", semires_certificates}, {2, "semires", semires_oracle},    {3, "siegel", siegel_suite},
      {4, "aux", aux_desk},                 {5, "hermite", hermite_points},    {6, "scan", scan_repro},
      {7, "budget", budget_examples},       {8, "smallfactor", small_factor_path},        {9, "stabilize", stabilization},
      {10, "ball", ball_fuzz}};
  return all;
}

}  // namespace accept

inline std::vector<std::string> suite_names() {
  std::vector<std::string> out;
  for (const auto& c : accept::criteria())
    if (std::find(out.begin(), out.end(), c.suite) == out.end()) out.push_back(c.suite);
  return out;
}

inline bool suite_selected(const SuiteOptions& o, const std::string& suite) {
  return o.filter.empty() || std::find(o.filter.begin(), o.filter.end(), suite) != o.filter.end();
}

// Runs the selected criteria in order, calling on_result after each.
inline std::vector<CriterionResult> run_suite(const SuiteOptions& o,
                                              const std::function<void(const CriterionResult&)>& on_result = {}) {
  const auto names = suite_names();
  for (const auto& f : o.filter)
    require(std::find(names.begin(), names.end(), f) != names.end(), ErrorKind::invalid_argument, "unknown suite: " + f);
  std::vector<CriterionResult> out;
  for (const auto& c : accept::criteria()) {
    if (!suite_selected(o, c.suite)) continue;
    CriterionResult r;
    try {
      r = c.run(o);
    } catch (const Error& e) {
      r = {c.id, c.suite, "criterion " + std::to_string(c.id), false, std::string("error: ") + e.what(), 0};
    }
    if (on_result) on_result(r);
    out.push_back(r);
  }
  return out;
}

inline std::string format_result(const CriterionResult& r) {
  return std::string(r.pass ? "PASS" : "FAIL") + " [" + std::to_string(r.id) + "] " + r.name + ": " + r.measured + " (" + accept::num(r.seconds, 3) + " s)";
}

inline json results_to_json(const std::vector<CriterionResult>& rs) {
  json a = json::array();
  for (const auto& r : rs)
    a.push_back({{"id", r.id}, {"suite", r.suite}, {"name", r.name}, {"pass", r.pass}, {"measured", r.measured}});
  return a;
}

}  // namespace gk
