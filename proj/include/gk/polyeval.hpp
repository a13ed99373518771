#pragma once

#include <map>
#include <string>
#include <vector>

#include "gk/ball.hpp"
#include "gk/multipoly.hpp"

namespace gk {

using BallEnv = std::map<std::string, Ball>;

// Ball enclosure of P at the given variable values.
inline Ball eval_poly(const MultiPoly& p, const BallEnv& env, mpfr_prec_t prec) {
  const auto& vars = p.vars();
  std::vector<std::vector<Ball>> powers(vars.size());
  for (std::size_t i = 0; i < vars.size(); ++i) {
    unsigned d = p.degrees()[i];
    if (d == 0) continue;
    auto it = env.find(vars[i]);
    require(it != env.end(), ErrorKind::unknown_variable, "no value for variable '" + vars[i] + "'");
    powers[i].push_back(Ball::from_si(1, prec));
    for (unsigned k = 1; k <= d; ++k) powers[i].push_back(powers[i].back() * it->second);
  }
  Ball acc = Ball::from_si(0, prec);
  for (const auto& [e, c] : p.terms()) {
    Ball t = Ball::from_mpz(c, prec);
    for (std::size_t i = 0; i < e.size(); ++i)
      if (e[i] > 0) t = t * powers[i][e[i]];
    acc = acc + t;
  }
  return acc;
}

// Univariate Horner evaluation with ball coefficients (index = power).
inline Ball horner(const std::vector<Ball>& coeffs, const Ball& z) {
  require(!coeffs.empty(), ErrorKind::invalid_argument, "empty coefficient list");
  Ball acc = coeffs.back();
  for (std::size_t k = coeffs.size() - 1; k-- > 0;) acc = acc * z + coeffs[k];
  return acc;
}

inline Ball eval_univariate(const MultiPoly& p, const Ball& z, mpfr_prec_t prec) {
  auto sv = p.support_vars();
  require(sv.size() <= 1, ErrorKind::invalid_argument, "expected a univariate polynomial");
  if (sv.empty()) return Ball::from_mpz(p.constant_value(), prec);
  std::vector<Ball> c;
  for (const auto& k : p.drop_unused_vars().coefficients_in(sv[0])) c.push_back(Ball::from_mpz(k.constant_value(), prec));
  return horner(c, z);
}

}  // namespace gk
