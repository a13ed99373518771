#pragma once

#include <cctype>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "gk/ball.hpp"
#include "gk/multipoly.hpp"

namespace gk {

using json = nlohmann::ordered_json;

// Accepts "12", "-3/4", "1.25", "2.5e-3".
inline mpq_class parse_rational(const std::string& s0) {
  std::string s;
  for (char c : s0)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  require(!s.empty(), ErrorKind::parse, "empty rational literal");
  auto slash = s.find('/');
  try {
    if (slash != std::string::npos) {
      mpz_class num(s.substr(0, slash)), den(s.substr(slash + 1));
      require(den != 0, ErrorKind::parse, "zero denominator in '" + s0 + "'");
      mpq_class q(num, den);
      q.canonicalize();
      return q;
    }
    std::size_t i = 0;
    bool neg = false;
    if (s[i] == '+' || s[i] == '-') neg = s[i++] == '-';
    std::string digits;
    long scale = 0;
    bool seen_dot = false, any = false;
    for (; i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.'); ++i) {
      if (s[i] == '.') {
        require(!seen_dot, ErrorKind::parse, "bad rational literal '" + s0 + "'");
        seen_dot = true;
        continue;
      }
      any = true;
      digits += s[i];
      if (seen_dot) --scale;
    }
    require(any, ErrorKind::parse, "bad rational literal '" + s0 + "'");
    if (i < s.size()) {
      require(s[i] == 'e' || s[i] == 'E', ErrorKind::parse, "bad rational literal '" + s0 + "'");
      std::string ex = s.substr(i + 1);
      require(!ex.empty() && ex.size() < 8, ErrorKind::parse, "bad exponent in '" + s0 + "'");
      std::size_t used = 0;
      long e = std::stol(ex, &used);
      require(used == ex.size(), ErrorKind::parse, "bad exponent in '" + s0 + "'");
      scale += e;
    }
    mpz_class num(digits), pw;
    mpz_ui_pow_ui(pw.get_mpz_t(), 10, static_cast<unsigned long>(scale < 0 ? -scale : scale));
    mpq_class q = scale >= 0 ? mpq_class(num * pw) : mpq_class(num, pw);
    q.canonicalize();
    return neg ? mpq_class(-q) : q;
  } catch (const std::invalid_argument&) {
    fail(ErrorKind::parse, "bad rational literal '" + s0 + "'");
  }
}

inline std::string rational_to_string(const mpq_class& q) {
  mpz_class den = q.get_den();
  unsigned long twos = 0, fives = 0;
  while (mpz_divisible_ui_p(den.get_mpz_t(), 2)) {
    den /= 2;
    ++twos;
  }
  while (mpz_divisible_ui_p(den.get_mpz_t(), 5)) {
    den /= 5;
    ++fives;
  }
  if (den != 1) return q.get_str();
  if (q.get_den() == 1) return q.get_num().get_str();
  unsigned long k = std::max(twos, fives);
  mpz_class pw;
  mpz_ui_pow_ui(pw.get_mpz_t(), 10, k);
  mpz_class scaled = q.get_num() * (pw / q.get_den());
  bool neg = scaled < 0;
  std::string digits = mpz_class(abs(scaled)).get_str();
  if (digits.size() <= k) digits = std::string(k - digits.size() + 1, '0') + digits;
  digits.insert(digits.size() - k, ".");
  return (neg ? "-" : "") + digits;
}

inline mpz_class parse_integer(const json& j) {
  if (j.is_number_integer()) return mpz_class(std::to_string(j.get<long long>()));
  require(j.is_string(), ErrorKind::parse, "expected an integer or decimal string");
  const std::string s = j.get<std::string>();
  std::size_t i = (s.size() > 0 && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
  require(i < s.size(), ErrorKind::parse, "bad integer '" + s + "'");
  for (std::size_t k = i; k < s.size(); ++k)
    require(std::isdigit(static_cast<unsigned char>(s[k])) != 0, ErrorKind::parse, "bad integer '" + s + "'");
  return mpz_class(s[0] == '+' ? s.substr(1) : s);
}

inline json poly_to_json(const MultiPoly& p) {
  json terms = json::array();
  for (const auto& [e, c] : p.terms()) terms.push_back({{"e", e}, {"c", c.get_str()}});
  return {{"vars", p.vars()}, {"terms", terms}};
}

inline MultiPoly poly_from_json(const json& j) {
  if (j.is_string()) return MultiPoly::parse(j.get<std::string>());
  require(j.is_object() && j.contains("vars") && j.contains("terms"), ErrorKind::parse,
          "polynomial JSON needs 'vars' and 'terms'");
  require(j["vars"].is_array() && j["terms"].is_array(), ErrorKind::parse, "polynomial JSON fields must be arrays");
  std::vector<std::string> vars;
  for (const auto& v : j["vars"]) {
    require(v.is_string(), ErrorKind::parse, "variable names must be strings");
    vars.push_back(v.get<std::string>());
  }
  MultiPoly::Terms terms;
  for (const auto& t : j["terms"]) {
    require(t.is_object() && t.contains("e") && t.contains("c") && t["e"].is_array(), ErrorKind::parse,
            "term needs 'e' array and 'c'");
    Exponents e;
    for (const auto& x : t["e"]) {
      require(x.is_number_unsigned() || (x.is_number_integer() && x.get<long long>() >= 0), ErrorKind::parse,
              "exponents must be nonnegative integers");
      e.push_back(x.get<std::uint32_t>());
    }
    require(e.size() == vars.size(), ErrorKind::parse, "exponent arity does not match variables");
    terms[e] += parse_integer(t["c"]);
  }
  return MultiPoly(vars, terms);
}

inline json ball_to_json(const Ball& b) {
  return {{"re", b.mid_re_str()}, {"im", b.mid_im_str()}, {"rad", b.rad_str()}};
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::parse, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::parse, "malformed JSON in " + origin + ": " + e.what());
  }
}

}  // namespace gk
