#include <gtest/gtest.h>

#include <random>

#include "gk/io.hpp"
#include "gk/polyalg.hpp"

using namespace gk;

namespace {

MultiPoly random_poly(std::mt19937_64& rng, std::vector<std::string> vars, unsigned max_deg, int max_coeff,
                      int max_terms) {
  std::uniform_int_distribution<int> deg(0, static_cast<int>(max_deg));
  std::uniform_int_distribution<int> coeff(-max_coeff, max_coeff);
  std::uniform_int_distribution<int> nterms(1, max_terms);
  MultiPoly::Terms t;
  int n = nterms(rng);
  for (int i = 0; i < n; ++i) {
    Exponents e(vars.size());
    for (auto& x : e) x = static_cast<std::uint32_t>(deg(rng));
    t[e] += coeff(rng);
  }
  return MultiPoly(vars, t);
}

}  // namespace

TEST(MultiPoly, AddCancels) {
  EXPECT_EQ("x+1"_mp + "-x"_mp, MultiPoly::constant(1));
  auto p = "3*x*y^2 + 2"_mp;
  EXPECT_EQ(p + MultiPoly(), p);
  auto s = "3*x*y^2"_mp + "4*x*y^2"_mp;
  EXPECT_EQ(s, "7*x*y^2"_mp);
  EXPECT_EQ(s.height(), 7);
}

TEST(MultiPoly, MulExamples) {
  EXPECT_EQ("y+1"_mp * "y-1"_mp, "y^2-1"_mp);
  auto p = "2*x+3"_mp * "5*x+7"_mp;
  EXPECT_EQ(p, "10*x^2+29*x+21"_mp);
  EXPECT_EQ(p.height(), 29);
  EXPECT_EQ(p * MultiPoly::constant(1), p);
}

TEST(MultiPoly, HeightAndType) {
  EXPECT_EQ("y^2-1"_mp.height(), 1);
  EXPECT_EQ(MultiPoly().height(), 0);
  EXPECT_EQ(MultiPoly().total_degree(), 0u);
  EXPECT_DOUBLE_EQ(type_of("y-1"_mp), 1.0);
  EXPECT_DOUBLE_EQ(type_of(MultiPoly::constant(1)), 0.0);
  EXPECT_NEAR(type_of("10*x^2+29*x+21"_mp), 2.0 + std::log(29.0), 1e-12);
  EXPECT_NEAR(type_of("10*x^2+29*x+21"_mp), 5.3673, 1e-4);
  try {
    type_of(MultiPoly());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::undefined_type);
  }
}

TEST(MultiPoly, GelfondBoundExamples) {
  EXPECT_EQ(gelfond_product_bound({"y+1"_mp, "y+1"_mp}), 4);
  EXPECT_EQ(gelfond_product_bound({MultiPoly::constant(3)}), 3);
  EXPECT_EQ(gelfond_product_bound({"2*x+3"_mp, "5*x+7"_mp}), 84);
}

TEST(MultiPoly, GelfondBoundDominatesProductHeight) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 10000; ++i) {
    auto a = random_poly(rng, {"x", "y"}, 3, 9, 5);
    auto b = random_poly(rng, {"y", "z"}, 3, 9, 5);
    auto prod = a * b;
    ASSERT_LE(prod.height(), gelfond_product_bound({a, b})) << a.to_string() << " | " << b.to_string();
  }
}

TEST(MultiPoly, DegreesAddUnderProduct) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 500; ++i) {
    auto a = random_poly(rng, {"x", "y", "z"}, 4, 5, 6);
    auto b = random_poly(rng, {"x", "y", "z"}, 4, 5, 6);
    if (a.is_zero() || b.is_zero()) continue;
    auto p = a * b;
    for (const auto& v : {"x", "y", "z"}) ASSERT_EQ(p.degree(v), a.degree(v) + b.degree(v));
  }
}

TEST(MultiPoly, RingLaws) {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 300; ++i) {
    auto a = random_poly(rng, {"x", "y"}, 3, 7, 4);
    auto b = random_poly(rng, {"y", "z"}, 3, 7, 4);
    auto c = random_poly(rng, {"x", "z"}, 3, 7, 4);
    ASSERT_EQ(a + b, b + a);
    ASSERT_EQ(a * b, b * a);
    ASSERT_EQ((a + b) + c, a + (b + c));
    ASSERT_EQ((a * b) * c, a * (b * c));
    ASSERT_EQ(a * (b + c), a * b + a * c);
  }
}

TEST(MultiPoly, CachesMatchRecomputation) {
  std::mt19937_64 rng(14);
  for (int i = 0; i < 300; ++i) {
    auto p = random_poly(rng, {"a", "b", "c"}, 3, 20, 6) * random_poly(rng, {"b", "d"}, 2, 20, 4) -
             random_poly(rng, {"a", "d"}, 5, 20, 4);
    MultiPoly fresh(p.vars(), p.terms());
    ASSERT_EQ(fresh.degrees(), p.degrees());
    ASSERT_EQ(fresh.total_degree(), p.total_degree());
    ASSERT_EQ(fresh.height(), p.height());
    for (const auto& [e, c] : p.terms()) ASSERT_NE(c, 0);
  }
}

TEST(MultiPoly, VariablesSortedAndValidated) {
  MultiPoly::Terms t;
  t[{1, 2}] = 5;
  MultiPoly p({"z", "a"}, t);
  EXPECT_EQ(p.vars(), (std::vector<std::string>{"a", "z"}));
  EXPECT_EQ(p.degree("a"), 2u);
  EXPECT_EQ(p.degree("z"), 1u);
  EXPECT_THROW(MultiPoly({"x", "x"}, {}), Error);
  MultiPoly::Terms bad;
  bad[{1}] = 1;
  EXPECT_THROW(MultiPoly({"x", "y"}, bad), Error);
}

TEST(MultiPoly, TextRoundTrip) {
  std::mt19937_64 rng(15);
  for (int i = 0; i < 500; ++i) {
    auto p = random_poly(rng, {"x", "y", "z"}, 4, 1000, 6);
    std::string s = p.to_string();
    auto q = MultiPoly::parse(s);
    ASSERT_EQ(q, p);
    ASSERT_EQ(q.to_string(), s);
  }
  EXPECT_EQ("10*x^2+29*x+21"_mp.to_string(), "10*x^2 + 29*x + 21");
  EXPECT_EQ("-x*y + 3*x^2 - 1"_mp.to_string(), "3*x^2 - 1*x*y - 1");
  EXPECT_EQ(MultiPoly().to_string(), "0");
  EXPECT_THROW(MultiPoly::parse("x +* y"), Error);
  EXPECT_THROW(MultiPoly::parse("2^"), Error);
}

TEST(MultiPoly, JsonRoundTrip) {
  std::mt19937_64 rng(16);
  for (int i = 0; i < 200; ++i) {
    auto p = random_poly(rng, {"x", "y", "q"}, 3, 1000000, 5) * MultiPoly::constant(mpz_class("123456789012345678901"));
    auto j = poly_to_json(p);
    auto q = poly_from_json(j);
    ASSERT_EQ(q, p);
    ASSERT_EQ(q.vars(), p.vars());
    ASSERT_EQ(poly_to_json(q).dump(), j.dump());
  }
  EXPECT_THROW(poly_from_json(json::parse(R"({"vars":["x"],"terms":[{"e":[1,2],"c":"3"}]})")), Error);
  EXPECT_THROW(poly_from_json(json::parse(R"({"vars":["x"],"terms":[{"e":[1],"c":"3.5"}]})")), Error);
}

TEST(PolyAlg, ExactDivisionAndGcd) {
  auto a = "x*y - 1"_mp, b = "x + y^2"_mp, c = "x - y + 2"_mp;
  EXPECT_EQ(divide_exact(a * b, b), a);
  EXPECT_FALSE(try_divide(a * b + MultiPoly::constant(1), b).has_value());
  EXPECT_EQ(poly_gcd(a * c, b * c), c);
  EXPECT_EQ(poly_gcd(MultiPoly::constant(6) * a, MultiPoly::constant(4) * a * b), MultiPoly::constant(2) * a);
  EXPECT_TRUE(poly_gcd(a, b).is_constant());
}

TEST(PolyAlg, RandomGcdRecoversCommonFactor) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 60; ++i) {
    auto g = random_poly(rng, {"x", "y"}, 2, 4, 3);
    auto a = random_poly(rng, {"x", "y"}, 2, 4, 3);
    auto b = random_poly(rng, {"x", "y"}, 2, 4, 3);
    if (g.is_zero() || a.is_zero() || b.is_zero()) continue;
    auto h = poly_gcd(a * g, b * g);
    ASSERT_TRUE(try_divide(a * g, h).has_value());
    ASSERT_TRUE(try_divide(b * g, h).has_value());
    ASSERT_TRUE(try_divide(h, g).has_value()) << g.to_string() << " vs " << h.to_string();
  }
}

TEST(PolyAlg, SquarefreeDecomposition) {
  auto f = "(y-1)^3*(y+2)^2*(y^2+1)"_mp;
  auto sq = squarefree_decomposition(f, "y");
  MultiPoly prod = MultiPoly::constant(1);
  for (auto& [p, m] : sq) prod *= p.pow(m);
  EXPECT_EQ(prod, f);
  ASSERT_EQ(sq.size(), 3u);
  EXPECT_EQ(sq[0].second, 1u);
  EXPECT_EQ(sq[2].second, 3u);
  EXPECT_EQ(squarefree_part(f, "y"), "(y-1)*(y+2)*(y^2+1)"_mp);
}
