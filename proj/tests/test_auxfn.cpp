#include <gtest/gtest.h>

#include <random>

#include "gk/auxfn.hpp"

using namespace gk;

namespace {

AlgebraicNumber sqrt2() { return AlgebraicNumber::from_minpoly({-2, 0, 1}, {1, 2, 0, 0}); }
AlgebraicNumber golden() { return AlgebraicNumber::from_minpoly({-1, -1, 1}, {1, 2, 0, 0}); }

AuxParams desk() {
  AuxParams p;
  p.N = 1;
  p.D1 = 1;
  p.D2 = 5;
  return p;
}

const AuxFunction& desk_aux() {
  static const AuxFunction F =
      construct_aux(desk(), quadratic_data(sqrt2()), AlgebraicNumber::rational(2), AlgebraicNumber::rational(3));
  return F;
}

double mpfr_value(const std::function<void(mpfr_t)>& f) {
  mpfr_t v;
  mpfr_init2(v, 256);
  f(v);
  double d = mpfr_get_d(v, MPFR_RNDN);
  mpfr_clear(v);
  return d;
}

AuxFunction single_term(const Lambda& l) {
  AuxFunction F;
  F.D1 = std::max<long>(1, l[0]);
  F.D2 = std::max<long>(1, std::max(l[1], l[2]));
  F.qd = {1, 2, 0};
  F.psi[l] = MultiPoly::constant(1);
  return F;
}

}  // namespace

TEST(Grid, Examples) {
  auto T = eval_triple(AlgebraicNumber::rational(2), AlgebraicNumber::rational(3), sqrt2(), 256);
  auto qd = quadratic_data(sqrt2());
  auto g0 = grid_points(0, qd, T);
  ASSERT_EQ(g0.size(), 1u);
  EXPECT_TRUE(g0[0].value.contains_point(0, 0));
  EXPECT_EQ(grid_points(1, qd, T).size(), 16u);
  double s2 = mpfr_value([](mpfr_t v) { mpfr_sqrt_ui(v, 2, MPFR_RNDN); });
  double l32 = mpfr_value([](mpfr_t v) {
    mpfr_set_ui(v, 3, MPFR_RNDN);
    mpfr_log2(v, v, MPFR_RNDN);
  });
  EXPECT_NEAR(grid_value({1, 1, 0, 0}, qd, T).mid_re().to_double(), 1 + s2, 1e-15);
  EXPECT_NEAR(grid_value({1, 1, 0, 0}, qd, T).mid_re().to_double(), 2.41421356, 1e-8);
  EXPECT_NEAR(grid_value({0, 0, 1, 0}, qd, T).mid_re().to_double(), l32, 1e-15);
  EXPECT_NEAR(grid_value({0, 0, 1, 0}, qd, T).mid_re().to_double(), 1.58496250, 1e-8);
  EXPECT_NEAR(grid_value({0, 0, 0, 1}, qd, T).mid_re().to_double(), l32 * s2, 1e-14);
  EXPECT_LT(grid_value({1, 1, 1, 1}, qd, T).rad().to_double(), 1e-60);
}

TEST(Clearing, Examples) {
  auto c = clearing_exponents({0, 1, 0, 0}, 3, {1, -2, 0});
  EXPECT_EQ(c[0], 6);
  EXPECT_EQ(c[1], 0);
  EXPECT_EQ(c[2], 0);
  EXPECT_EQ(c[3], 0);
  auto z = clearing_exponents({0, 0, 0, 1}, 2, {1, 2, 1});
  for (const auto& e : z) EXPECT_EQ(e, 0);
  for (const auto& mu : grid_indices(2))
    for (const auto& e : clearing_exponents(mu, 4, {2, 3, 1})) EXPECT_EQ(e, 0);
}

TEST(Quadratic, ReductionPreservesValue) {
  std::mt19937_64 rng(4);
  for (auto beta : {sqrt2(), golden(), AlgebraicNumber::from_minpoly({-1, 0, 2}, {0, 1, 0, 0})}) {
    auto qd = quadratic_data(beta);
    Ball w = beta.ball(256) * Ball::from_mpz(qd.d, 256);
    for (int t = 0; t < 10; ++t) {
      MultiPoly p;
      for (unsigned k = 0; k < 7; ++k)
        p += mpz_class(static_cast<long>(rng() % 9) - 4) * MultiPoly::variable("w").pow(k) *
             MultiPoly::variable("x").pow(static_cast<unsigned>(rng() % 2));
      auto r = detail::reduce_quadratic(p, qd);
      EXPECT_LE(r.degree("w"), 1u);
      BallEnv env{{"w", w}, {"x", Ball::from_mpq(mpq_class(3, 7), 256)}};
      Ball diff = eval_poly(p, env, 256) - eval_poly(r, env, 256);
      EXPECT_TRUE(diff.contains_point(0, 0));
      EXPECT_LT(diff.abs_upper().to_double(), 1e-50);
    }
  }
}

TEST(Assemble, TrivialInstance) {
  AuxParams p;
  p.N = 0;
  p.D1 = 0;
  p.D2 = 1;
  auto s = assemble_system(p, quadratic_data(sqrt2()), AlgebraicNumber::rational(2), AlgebraicNumber::rational(3));
  ASSERT_EQ(s.rows.size(), 1u);
  EXPECT_EQ(s.lambda.size(), 4u);
  for (const auto& e : s.rows[0]) EXPECT_EQ(e, MultiPoly::constant(1));
  auto F = construct_aux(p, quadratic_data(sqrt2()), AlgebraicNumber::rational(2), AlgebraicNumber::rational(3));
  EXPECT_TRUE(F.verified_exact);
  MultiPoly sum;
  for (const auto& [l, q] : F.psi) sum += q;
  EXPECT_TRUE(sum.is_zero());
}

TEST(Assemble, DeskRowsMatchDirectEvaluation) {
  auto a1 = AlgebraicNumber::rational(2), a2 = AlgebraicNumber::rational(3);
  auto qd = quadratic_data(sqrt2());
  auto s = assemble_system(desk(), qd, a1, a2);
  EXPECT_EQ(s.rows.size(), 16u);
  EXPECT_EQ(s.lambda.size(), 72u);
  EXPECT_LE(mpz_class(s.max_degree), s.degree_bound);
  auto T = eval_triple(a1, a2, sqrt2(), 256);
  BallEnv env{{"w", T.beta}, {"x", T.L}, {"y", T.tau1}, {"z", T.tau2}};
  for (std::size_t i = 0; i < s.rows.size(); ++i) {
    Ball z = grid_value(s.mu[i], qd, T);
    std::optional<Ball> ratio;
    for (std::size_t j = 0; j < s.lambda.size(); ++j) {
      const auto& l = s.lambda[j];
      Ball a = z.pow(static_cast<unsigned long>(l[0])) *
               ((Ball::from_si(l[1], 256) + Ball::from_si(l[2], 256) * T.beta) * z * T.log_a1).exp();
      if (s.rows[i][j].is_zero()) {
        EXPECT_TRUE(a.contains_point(0, 0));
        continue;
      }
      Ball r = eval_poly(s.rows[i][j], env, 256) / a;
      if (!ratio) {
        ratio = r;
        EXPECT_TRUE(r.excludes_zero());
      } else {
        EXPECT_LT((r - *ratio).abs_upper().to_double(), 1e-40 * ratio->abs_upper().to_double()) << i << " " << j;
      }
    }
  }
}

TEST(Assemble, NegativeB0IsCleared) {
  auto beta = AlgebraicNumber::from_minpoly({2, 0, 1}, {-1, 1, 1, 2});
  auto qd = quadratic_data(beta);
  EXPECT_EQ(qd.b0, -2);
  AuxParams p;
  p.N = 1;
  p.D1 = 1;
  p.D2 = 5;
  auto s = assemble_system(p, qd, AlgebraicNumber::rational(2), AlgebraicNumber::rational(3));
  auto c = clearing_exponents({0, 1, 0, 0}, 5, qd);
  EXPECT_EQ(c[0], 10);
  for (std::size_t i = 0; i < s.mu.size(); ++i) {
    auto base = clearing_exponents(s.mu[i], 5, qd);
    for (int k = 0; k < 4; ++k) EXPECT_GE(s.clearing[i][k], base[k]);
  }
  EXPECT_LE(mpz_class(s.max_degree), s.degree_bound);
}

TEST(Construct, RejectsTooFewUnknowns) {
  AuxParams p;
  p.N = 1;
  p.D1 = 0;
  p.D2 = 2;
  EXPECT_THROW(assemble_system(p, quadratic_data(sqrt2()), AlgebraicNumber::rational(2), AlgebraicNumber::rational(3)), Error);
  EXPECT_THROW(assemble_system(desk(), quadratic_data(sqrt2()), AlgebraicNumber::from_minpoly({-2, 0, 1}, {1, 2, 0, 0}),
                               AlgebraicNumber::rational(3)),
               Error);
}

TEST(Construct, DeskVanishes) {
  const auto& F = desk_aux();
  EXPECT_TRUE(F.verified_exact);
  EXPECT_FALSE(F.psi.empty());
  for (const auto& [l, q] : F.psi) {
    EXPECT_LE(l[0], 1);
    EXPECT_LE(l[1], 5);
    EXPECT_LE(l[2], 5);
    EXPECT_LE(q.degree("w"), 1u);
  }
  ASSERT_TRUE(F.c1.has_value());
  EXPECT_LE(*F.c1, 6.0);
  EXPECT_LE(F.max_degree, 6u * (1 + 5));
  EXPECT_FALSE(F.c2.has_value());
  auto T = eval_triple(AlgebraicNumber::rational(2), AlgebraicNumber::rational(3), sqrt2(), 512);
  auto vals = psi_values(F, T);
  for (const auto& g : grid_points(1, F.qd, T)) EXPECT_LE(eval_aux_values(F, vals, g.value, T).abs_upper().to_double(), 1e-40);
  Ball off = eval_aux(F, Ball::from_mpq(mpq_class(1, 3), 512), T);
  EXPECT_TRUE(off.excludes_zero());
}

TEST(Construct, ExactCheckCatchesPerturbation) {
  auto F = desk_aux();
  auto s = assemble_system(desk(), F.qd, AlgebraicNumber::rational(2), AlgebraicNumber::rational(3));
  EXPECT_TRUE(verify_vanishing_exact(F, s));
  F.psi.begin()->second += MultiPoly::constant(1);
  EXPECT_FALSE(verify_vanishing_exact(F, s));
  AuxFunction zero = desk_aux();
  for (auto& [l, q] : zero.psi) q = MultiPoly();
  EXPECT_FALSE(verify_vanishing_exact(zero, s));
}

TEST(Construct, OtherQuadraticFields) {
  for (auto beta : {golden(), AlgebraicNumber::from_minpoly({-1, 0, 2}, {0, 1, 0, 0})}) {
    auto qd = quadratic_data(beta);
    auto F = construct_aux(desk(), qd, AlgebraicNumber::rational(2), AlgebraicNumber::rational(5));
    auto T = eval_triple(AlgebraicNumber::rational(2), AlgebraicNumber::rational(5), beta, 512);
    auto vals = psi_values(F, T);
    for (const auto& g : grid_points(1, qd, T)) EXPECT_LE(eval_aux_values(F, vals, g.value, T).abs_upper().to_double(), 1e-40);
  }
}

TEST(Construct, JsonRoundTrip) {
  const auto& F = desk_aux();
  auto j = aux_to_json(F);
  auto G = aux_from_json(json::parse(j.dump()));
  EXPECT_EQ(aux_to_json(G)["psi"].dump(), j["psi"].dump());
  EXPECT_THROW(aux_from_json(json::parse(R"({"N":1})")), Error);
}

TEST(EvalAux, Examples) {
  auto T = eval_triple(AlgebraicNumber::rational(2), AlgebraicNumber::rational(3), sqrt2(), 256);
  auto one = single_term({0, 0, 0});
  EXPECT_TRUE(eval_aux(one, Ball::from_mpq(mpq_class(7, 3), mpq_class(1), 256), T).contains_point(1, 0));
  auto z = single_term({1, 0, 0});
  Ball v = eval_aux(z, Ball::from_si(2, 256), T);
  EXPECT_TRUE(v.contains_point(2, 0));
  auto e = single_term({0, 1, 0});
  EXPECT_NEAR(eval_aux(e, Ball::from_si(3, 256), T).mid_re().to_double(), 8.0, 1e-12);
}

TEST(Schwarz, Examples) {
  Mag b = schwarz_bound(Mag::from_d(16), 2, 4, 1);
  EXPECT_NEAR(b.to_double(), 9.0, 1e-12);
  EXPECT_NEAR(schwarz_bound(Mag::from_d(16), 0, 4, 1).to_double(), 16.0, 1e-12);
  EXPECT_THROW(schwarz_bound(Mag::from_d(1), 1, 3, 1), Error);
}

TEST(Schwarz, MonomialProperty) {
  for (unsigned n = 0; n <= 6; ++n)
    for (int r1 = 4; r1 <= 12; r1 += 4) {
      mpq_class rho1 = r1, rho2 = mpq_class(r1, 4);
      double mr1 = std::pow(static_cast<double>(r1), n), mr2 = std::pow(r1 / 4.0, n);
      EXPECT_LE(mr2, schwarz_bound(Mag::from_d(mr1), n, rho1, rho2).to_double() * (1 + 1e-12));
    }
}

TEST(Tijdeman, FormulaAndScaling) {
  auto T = eval_triple(AlgebraicNumber::rational(2), AlgebraicNumber::rational(3), sqrt2(), 256);
  auto qd = quadratic_data(sqrt2());
  AuxParams p = desk();
  TijdemanInputs in;
  in.E = 1;
  auto r = tijdeman_coefficient_bound(p, qd, T, in);
  EXPECT_EQ(r.k, 3);
  double la = std::log(2.0), be = std::sqrt(2.0), L = std::log(3.0) / std::log(2.0);
  double a = (5 + 5 * be) * la;
  double b = 3 * (1 + be + L + L * be);
  EXPECT_NEAR(r.a, a, 1e-9);
  EXPECT_NEAR(r.b, b, 1e-9);
  double m = 72, s = 256, c1 = a / 5, c2 = b / 3;
  double oracle = 4 * std::log(4.0) + m * std::log(6 * c1 * 1 / 6.0 * m / b) + s * std::log(72 * c2 * 3 / 16.0);
  EXPECT_NEAR(r.log_bound, oracle, 1e-9 * std::abs(oracle));
  EXPECT_TRUE(std::isfinite(r.log_bound));
  in.E = 2;
  EXPECT_NEAR(tijdeman_coefficient_bound(p, qd, T, in).log_bound - r.log_bound, std::log(2.0), 1e-9);
  in.E = 0;
  EXPECT_TRUE(std::isinf(tijdeman_coefficient_bound(p, qd, T, in).log_bound));
  AuxParams bad = desk();
  bad.k_mult = 1;
  EXPECT_THROW(tijdeman_coefficient_bound(bad, qd, T, in), Error);
  EXPECT_EQ(default_k_mult(bad), 3);
  AuxParams none = desk();
  none.N = 0;
  EXPECT_EQ(default_k_mult(none), 0);
}

TEST(Verification, DeskChecksHold) {
  const auto& F = desk_aux();
  auto T = eval_triple(AlgebraicNumber::rational(2), AlgebraicNumber::rational(3), sqrt2(), 512);
  auto v = verify_aux(F, desk(), T, 1e-40, 20, 5, 720);
  EXPECT_TRUE(v.grid_ok);
  EXPECT_TRUE(v.schwarz_ok);
  EXPECT_TRUE(v.tijdeman_ok);
  EXPECT_GT(v.zeros_inside, 0u);
  auto j = verification_to_json(v);
  EXPECT_TRUE(j["schwarz"]["ok"].get<bool>());
}

TEST(Hermite, Examples) {
  BallFn one = [](const Ball& t) { return Ball::from_si(1, t.prec()); };
  auto h = hermite_eval(one, {}, Ball::from_mpq(mpq_class(1, 2), 256), 2, 256);
  EXPECT_TRUE(h.value.contains_point(1, 0));
  EXPECT_LT(h.value.rad().to_double(), 1e-30);
  BallFn id = [](const Ball& t) { return t; };
  auto g = hermite_eval(id, {Ball::from_si(0, 256)}, Ball::from_si(1, 256), 4, 256);
  EXPECT_LT((g.value - Ball::from_si(1, 256)).abs_upper().to_double(), 1e-20);
  EXPECT_THROW(hermite_eval(id, {Ball::from_si(0, 256)}, Ball::from_si(5, 256), 4, 256), Error);
  EXPECT_THROW(hermite_eval(id, {Ball::from_si(1, 256)}, Ball::from_si(1, 256), 4, 256), Error);
}

TEST(Hermite, PolynomialOracle) {
  BallFn cube = [](const Ball& t) { return t * t * t - Ball::from_si(2, t.prec()) * t; };
  std::vector<Ball> grid{Ball::from_si(0, 256), Ball::from_si(1, 256), Ball::from_mpq(mpq_class(-1, 2), mpq_class(1, 3), 256)};
  Ball z = Ball::from_mpq(mpq_class(3, 5), mpq_class(-1, 4), 256);
  auto h = hermite_eval(cube, grid, z, 3, 256);
  EXPECT_LT((h.value - cube(z)).abs_upper().to_double(), 1e-30);
}

TEST(Hermite, DeskReconstruction) {
  const auto& F = desk_aux();
  auto T = eval_triple(AlgebraicNumber::rational(2), AlgebraicNumber::rational(3), sqrt2(), 256);
  auto vals = psi_values(F, T);
  std::vector<Ball> grid;
  for (const auto& g : grid_points(1, F.qd, T)) grid.push_back(g.value);
  BallFn G = [&](const Ball& t) { return eval_aux_values(F, vals, t, T); };
  Ball z = Ball::from_mpq(mpq_class(7, 4), mpq_class(1, 2), 256);
  Ball direct = G(z);
  auto h = hermite_eval(G, grid, z, 10, 256);
  EXPECT_LE((h.value - direct).abs_upper().to_double(), 1e-20 * direct.abs_upper().to_double());
  std::vector<double> err;
  for (unsigned n : {128u, 256u, 512u}) err.push_back((hermite_eval(G, grid, z, 10, 256, n).value - direct).abs_upper().to_double());
  EXPECT_GE(std::log2(err[0] / err[1]), 2.0);
  EXPECT_GE(std::log2(err[1] / err[2]), 2.0);
}
