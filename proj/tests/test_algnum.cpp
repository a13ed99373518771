#include <gtest/gtest.h>

#include <random>

#include "gk/algnum.hpp"

using namespace gk;

namespace {

AlgebraicNumber sqrt2() { return AlgebraicNumber::from_minpoly({-2, 0, 1}, {1, 2, 0, 0}); }

// Independent MPFR oracle value as a tiny exact-center ball.
Ball oracle(const std::function<void(mpfr_t)>& f) {
  mpfr_t v;
  mpfr_init2(v, 1024);
  f(v);
  Real r(1024);
  mpfr_set(r.get(), v, MPFR_RNDN);
  mpfr_clear(v);
  Ball b = Ball::from_parts(r, Real(1024), Mag::pow2(-1000));
  return b;
}

Ball oracle_L() {
  return oracle([](mpfr_t v) {
    mpfr_t t;
    mpfr_init2(t, 1024);
    mpfr_set_ui(v, 3, MPFR_RNDN);
    mpfr_log(v, v, MPFR_RNDN);
    mpfr_set_ui(t, 2, MPFR_RNDN);
    mpfr_log(t, t, MPFR_RNDN);
    mpfr_div(v, v, t, MPFR_RNDN);
    mpfr_clear(t);
  });
}

Ball oracle_tau(unsigned a) {
  return oracle([a](mpfr_t v) {
    mpfr_t t;
    mpfr_init2(t, 1024);
    mpfr_set_ui(v, a, MPFR_RNDN);
    mpfr_log(v, v, MPFR_RNDN);
    mpfr_sqrt_ui(t, 2, MPFR_RNDN);
    mpfr_mul(v, v, t, MPFR_RNDN);
    mpfr_exp(v, v, MPFR_RNDN);
    mpfr_clear(t);
  });
}

}  // namespace

TEST(AlgebraicNumber, ParsesAndValidates) {
  auto j = json::parse(R"({"minpoly":["-2","0","1"],"box":{"re":["1","2"],"im":["0","0"]}})");
  auto b = AlgebraicNumber::from_json(j);
  EXPECT_EQ(b.degree(), 2u);
  Ball v = b.ball(256);
  EXPECT_NEAR(v.mid_re().to_double(), 1.4142135623730951, 1e-15);
  EXPECT_LT(v.rad().to_double(), 1e-60);
  auto round = AlgebraicNumber::from_json(b.to_json());
  EXPECT_EQ(round.minpoly(), b.minpoly());
  EXPECT_THROW(AlgebraicNumber::from_minpoly({-2, 0, 1}, {-2, 2, 0, 0}), Error);  // two roots
  EXPECT_THROW(AlgebraicNumber::from_minpoly({-1, 0, 1}, {0, 2, 0, 0}), Error);   // reducible
  EXPECT_THROW(AlgebraicNumber::from_minpoly({-2, 0, 1}, {2, 3, 0, 0}), Error);   // no root
  EXPECT_THROW(AlgebraicNumber::from_json(json::parse(R"({"box":{}})")), Error);
  auto i = AlgebraicNumber::from_minpoly({1, 0, 1}, {-1, 1, mpq_class(1, 2), 2});
  EXPECT_NEAR(i.ball(128).mid_im().to_double(), 1.0, 1e-30);
  EXPECT_EQ(*algebraic_from_text("3/4").as_rational(), mpq_class(3, 4));
}

TEST(QuadraticData, Examples) {
  auto q = quadratic_data(sqrt2());
  EXPECT_EQ(q.d, 1);
  EXPECT_EQ(q.b0, 2);
  EXPECT_EQ(q.b1, 0);
  auto g = quadratic_data(AlgebraicNumber::from_minpoly({-1, -1, 1}, {1, 2, 0, 0}));
  EXPECT_EQ(g.d, 1);
  EXPECT_EQ(g.b0, 1);
  EXPECT_EQ(g.b1, 1);
  auto h = quadratic_data(AlgebraicNumber::from_minpoly({-1, 0, 2}, {0, 1, 0, 0}));
  EXPECT_EQ(h.d, 2);
  EXPECT_EQ(h.b0, 2);
  EXPECT_EQ(h.b1, 0);
  EXPECT_THROW(quadratic_data(AlgebraicNumber::rational(3)), Error);
}

TEST(QuadraticData, RelationHoldsExactly) {
  for (int a = 1; a <= 6; ++a)
    for (int b = -4; b <= 4; ++b)
      for (int c = -4; c <= 4; ++c) {
        if (c == 0) continue;
        MultiPoly p = MultiPoly::univariate("y", {c, b, a});
        if (p.content() != 1 || kronecker_factor(p).size() != 1) continue;
        mpz_class disc = b * b - 4 * a * c;
        if (disc <= 0) continue;
        // Real root above the midpoint; the box is a wide interval around it.
        auto beta = AlgebraicNumber::from_minpoly({c, b, a}, {mpq_class(-b, 2 * a), 100, 0, 0});
        auto q = quadratic_data(beta);
        // (d beta)^2 - b1 (d beta) - b0 must be d^2/a times the minpoly.
        MultiPoly w = MultiPoly::univariate("y", {0, q.d});
        MultiPoly rel = w * w - q.b1 * w - MultiPoly::constant(q.b0);
        ASSERT_EQ(mpz_class(a) * rel, mpz_class(q.d * q.d) * p);
        for (mpz_class d = 1; d < q.d; ++d)
          ASSERT_FALSE(mpz_divisible_p(mpz_class(d * b).get_mpz_t(), mpz_class(a).get_mpz_t()) &&
                       mpz_divisible_p(mpz_class(d * d * c).get_mpz_t(), mpz_class(a).get_mpz_t()));
      }
}

TEST(Triple, MatchesOracle) {
  auto T = eval_triple(AlgebraicNumber::rational(2), AlgebraicNumber::rational(3), sqrt2(), 128);
  EXPECT_TRUE(T.L.overlaps(oracle_L()));
  EXPECT_TRUE(T.tau1.overlaps(oracle_tau(2)));
  EXPECT_TRUE(T.tau2.overlaps(oracle_tau(3)));
  EXPECT_LT(T.L.rad().to_double(), std::ldexp(1.0, -100));
  EXPECT_LT(T.tau1.rad().to_double(), std::ldexp(1.0, -100));
  EXPECT_LT(T.tau2.rad().to_double(), std::ldexp(1.0, -100));
  EXPECT_NEAR(T.L.mid_re().to_double(), 1.5849625007, 1e-10);
  EXPECT_NEAR(T.tau1.mid_re().to_double(), 2.6651441426, 1e-10);
  EXPECT_NEAR(T.tau2.mid_re().to_double(), 4.7288043878, 1e-10);
  auto same = eval_triple(AlgebraicNumber::rational(2), AlgebraicNumber::rational(2), sqrt2(), 200);
  EXPECT_TRUE(same.L.contains_point(1, 0));
  auto four = eval_triple(AlgebraicNumber::rational(2), AlgebraicNumber::rational(4), sqrt2(), 64);
  EXPECT_TRUE(four.L.contains_point(2, 0));
  EXPECT_THROW(eval_triple(AlgebraicNumber::rational(1), AlgebraicNumber::rational(3), sqrt2(), 128), Error);
  EXPECT_THROW(eval_triple(AlgebraicNumber::rational(2), AlgebraicNumber::rational(0), sqrt2(), 128), Error);
  EXPECT_THROW(eval_triple(AlgebraicNumber::rational(2), AlgebraicNumber::rational(3), sqrt2(), 32), Error);
}

TEST(Triple, SelfConsistencyAndMonotonicity) {
  Mag prev = Mag::inf();
  for (long p : {64L, 128L, 256L, 512L}) {
    auto T = eval_triple(AlgebraicNumber::rational(2), AlgebraicNumber::rational(3), sqrt2(), p);
    Ball back = (T.L * T.log_a1).exp();
    EXPECT_TRUE(back.contains_point(3, 0));
    EXPECT_LE(T.tau2.rad(), prev);
    prev = T.tau2.rad();
  }
}

TEST(Triple, PolynomialValues) {
  auto T = eval_triple(AlgebraicNumber::rational(2), AlgebraicNumber::rational(3), sqrt2(), 256);
  EXPECT_TRUE(eval_poly_at_triple("x"_mp, T).overlaps(oracle_L()));
  Ball one = eval_poly_at_triple(MultiPoly::constant(1), T);
  EXPECT_TRUE(one.is_exact());
  EXPECT_TRUE(one.contains_point(1, 0));
  Ball v = eval_poly_at_triple("y*z - x"_mp, T);
  EXPECT_TRUE(v.overlaps(oracle_tau(2) * oracle_tau(3) - oracle_L()));
  EXPECT_NEAR(v.mid_re().to_double(), 11.0180, 1e-3);
  EXPECT_THROW(eval_poly_at_triple("w + 1"_mp, T), Error);
}

TEST(NearestRoot, Examples) {
  Ball t = Ball::from_mpq(mpq_class(26651, 10000), 128);
  auto r = nearest_root("y-2"_mp, t, 128);
  EXPECT_TRUE(r.xi.contains_point(2, 0));
  EXPECT_NEAR(r.gap.to_double(), 0.6651, 1e-9);
  auto s = nearest_root("y^2-2"_mp, Ball::from_mpq(mpq_class(14, 10), 128), 128);
  EXPECT_NEAR(s.xi.mid_re().to_double(), 1.41421356, 1e-8);
  auto u = nearest_root("(y-1)*(y-3)"_mp, Ball::from_mpq(mpq_class(19, 10), 128), 128);
  EXPECT_TRUE(u.xi.contains_point(1, 0));
  EXPECT_THROW(nearest_root(MultiPoly::constant(3), t, 128), Error);
  EXPECT_THROW(nearest_root("(y-1)*(y-3)"_mp, Ball::from_si(2, 128), 128), Error);
  auto tie = nearest_root("(y-1)*(y-3)"_mp, Ball::from_si(2, 128), 128, true);
  EXPECT_TRUE(tie.xi.contains_point(1, 0));
  EXPECT_TRUE(tie.tie_broken);
}

TEST(NearestRoot, GapDominatesTrueDistance) {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<long> num(-9, 9), den(1, 4), cnt(1, 4), tq(-40, 40);
  for (int i = 0; i < 300; ++i) {
    std::vector<mpq_class> roots;
    MultiPoly p = MultiPoly::constant(1);
    for (long k = cnt(rng); k > 0; --k) {
      mpq_class q(num(rng), den(rng));
      q.canonicalize();
      if (std::find(roots.begin(), roots.end(), q) != roots.end()) continue;
      roots.push_back(q);
      p *= MultiPoly::univariate("y", {mpz_class(-q.get_num()), mpz_class(q.get_den())});
    }
    mpq_class tr(tq(rng), 7), ti(tq(rng), 11);
    Ball target = Ball::from_mpq(tr, ti, 128);
    auto dist2 = [&](const mpq_class& q) -> mpq_class { return (q - tr) * (q - tr) + ti * ti; };
    auto res = with_precision_escalation(128, 1024, [&](long prec, bool cap) { return nearest_root(p, target, prec, cap); });
    const mpq_class* hit = nullptr;
    for (auto& q : roots)
      if (res.xi.contains_point(q, 0)) hit = &q;
    ASSERT_NE(hit, nullptr);
    for (auto& q : roots) ASSERT_LE(dist2(*hit), dist2(q));
    mpq_class gap = Ball::from_parts(Real(64), Real(64), res.gap).rad_q();
    ASSERT_LE(dist2(*hit), gap * gap);
  }
}

TEST(NearestRoot, BallCoefficients) {
  auto T = eval_triple(AlgebraicNumber::rational(2), AlgebraicNumber::rational(3), sqrt2(), 256);
  // y^2 - x y - 1 at x = L, root near 2.16.
  std::vector<Ball> c{Ball::from_si(-1, 256), -T.L, Ball::from_si(1, 256)};
  auto r = nearest_root(c, T.tau1, 256);
  double L = T.L.mid_re().to_double();
  EXPECT_NEAR(r.xi.mid_re().to_double(), (L + std::sqrt(L * L + 4)) / 2, 1e-12);
}

TEST(Independence, Examples) {
  auto v = mult_independence_check(AlgebraicNumber::rational(2), AlgebraicNumber::rational(3), 20);
  EXPECT_TRUE(v.independent);
  auto d = mult_independence_check(AlgebraicNumber::rational(2), AlgebraicNumber::rational(4), 5);
  EXPECT_FALSE(d.independent);
  EXPECT_EQ(d.m, 2);
  EXPECT_EQ(d.n, -1);
  auto h = mult_independence_check(AlgebraicNumber::rational(2), AlgebraicNumber::rational(mpq_class(1, 2)), 5);
  EXPECT_FALSE(h.independent);
  EXPECT_EQ(h.m, 1);
  EXPECT_EQ(h.n, 1);
}

TEST(Independence, ExhaustiveOracle) {
  for (int a = 2; a <= 6; ++a)
    for (int b = 2; b <= 9; ++b) {
      bool dep = false;
      for (long m = 1; m <= 4 && !dep; ++m)
        for (long n = 1; n <= 4 && !dep; ++n) {
          mpz_class x, y;
          mpz_ui_pow_ui(x.get_mpz_t(), a, m);
          mpz_ui_pow_ui(y.get_mpz_t(), b, n);
          dep = x == y;
        }
      auto v = mult_independence_check(AlgebraicNumber::rational(a), AlgebraicNumber::rational(b), 4);
      ASSERT_EQ(v.independent, !dep) << a << " " << b;
    }
}

TEST(Independence, AlgebraicInputs) {
  auto s = sqrt2();
  auto v = mult_independence_check(s, AlgebraicNumber::rational(2), 3);
  EXPECT_FALSE(v.independent);
  EXPECT_EQ(v.m, 2);
  EXPECT_EQ(v.n, -1);
  auto w = mult_independence_check(s, AlgebraicNumber::rational(3), 3);
  EXPECT_TRUE(w.independent);
  auto lr = log_ratio_rational_check(AlgebraicNumber::rational(2), AlgebraicNumber::rational(8), 4);
  EXPECT_FALSE(lr.independent);
  auto neg = log_ratio_rational_check(AlgebraicNumber::rational(2), AlgebraicNumber::rational(3), 4);
  EXPECT_TRUE(neg.independent);
}
