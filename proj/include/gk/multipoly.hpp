#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "gk/error.hpp"

namespace gk {

using Exponents = std::vector<std::uint32_t>;

// Sparse polynomial over Z; variables kept sorted and duplicate-free.
class MultiPoly {
 public:
  using Terms = std::map<Exponents, mpz_class>;

  MultiPoly() { refresh(); }

  MultiPoly(std::vector<std::string> vars, Terms terms) {
    for (const auto& v : vars)
      require(valid_name(v), ErrorKind::invalid_argument, "bad variable name '" + v + "'");
    std::vector<std::size_t> order(vars.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vars[a] < vars[b]; });
    for (std::size_t i = 1; i < order.size(); ++i)
      require(vars[order[i]] != vars[order[i - 1]], ErrorKind::invalid_argument,
              "duplicate variable '" + vars[order[i]] + "'");
    vars_.reserve(vars.size());
    for (auto i : order) vars_.push_back(vars[i]);
    for (auto& [e, c] : terms) {
      require(e.size() == vars.size(), ErrorKind::invalid_argument, "exponent arity does not match variables");
      if (c == 0) continue;
      Exponents f(e.size());
      for (std::size_t i = 0; i < order.size(); ++i) f[i] = e[order[i]];
      terms_[std::move(f)] += c;
    }
    prune();
    refresh();
  }

  static MultiPoly constant(const mpz_class& c, std::vector<std::string> vars = {}) {
    std::sort(vars.begin(), vars.end());
    Terms t;
    if (c != 0) t[Exponents(vars.size(), 0)] = c;
    return MultiPoly(vars, std::move(t));
  }
  static MultiPoly variable(const std::string& name) {
    Terms t;
    t[Exponents{1}] = 1;
    return MultiPoly({name}, std::move(t));
  }
  static MultiPoly univariate(const std::string& var, const std::vector<mpz_class>& low_to_high) {
    Terms t;
    for (std::size_t k = 0; k < low_to_high.size(); ++k)
      if (low_to_high[k] != 0) t[Exponents{static_cast<std::uint32_t>(k)}] = low_to_high[k];
    return MultiPoly({var}, std::move(t));
  }
  static MultiPoly parse(const std::string& text);

  const std::vector<std::string>& vars() const { return vars_; }
  const Terms& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const { return total_degree_ == 0; }
  mpz_class constant_value() const {
    auto it = terms_.find(Exponents(vars_.size(), 0));
    return it == terms_.end() ? mpz_class(0) : it->second;
  }

  int var_index(const std::string& v) const {
    auto it = std::lower_bound(vars_.begin(), vars_.end(), v);
    if (it == vars_.end() || *it != v) return -1;
    return static_cast<int>(it - vars_.begin());
  }
  bool has_var(const std::string& v) const { return var_index(v) >= 0; }
  unsigned degree(const std::string& v) const {
    int i = var_index(v);
    return i < 0 ? 0u : degrees_[i];
  }
  const std::vector<unsigned>& degrees() const { return degrees_; }
  unsigned total_degree() const { return total_degree_; }
  // Maximum over variables of the per-variable degree.
  unsigned max_var_degree() const {
    unsigned m = 0;
    for (auto d : degrees_) m = std::max(m, d);
    return m;
  }
  const mpz_class& height() const { return height_; }
  // Variables of positive degree.
  std::vector<std::string> support_vars() const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < vars_.size(); ++i)
      if (degrees_[i] > 0) out.push_back(vars_[i]);
    return out;
  }

  MultiPoly with_vars(std::vector<std::string> superset) const {
    std::sort(superset.begin(), superset.end());
    superset.erase(std::unique(superset.begin(), superset.end()), superset.end());
    if (superset == vars_) return *this;
    std::vector<int> where(vars_.size());
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      auto it = std::lower_bound(superset.begin(), superset.end(), vars_[i]);
      if (it == superset.end() || *it != vars_[i]) {
        require(degrees_[i] == 0, ErrorKind::unknown_variable, "variable '" + vars_[i] + "' cannot be dropped");
        where[i] = -1;
      } else {
        where[i] = static_cast<int>(it - superset.begin());
      }
    }
    MultiPoly r;
    r.vars_ = superset;
    for (const auto& [e, c] : terms_) {
      Exponents f(superset.size(), 0);
      for (std::size_t i = 0; i < e.size(); ++i)
        if (where[i] >= 0) f[where[i]] = e[i];
      r.terms_.emplace(std::move(f), c);
    }
    r.refresh();
    return r;
  }
  MultiPoly drop_unused_vars() const { return with_vars(support_vars()); }

  static std::vector<std::string> merged_vars(const MultiPoly& a, const MultiPoly& b) {
    std::vector<std::string> u;
    std::set_union(a.vars_.begin(), a.vars_.end(), b.vars_.begin(), b.vars_.end(), std::back_inserter(u));
    return u;
  }

  // Coefficient of var^k at index k, each carrying the same variable list.
  std::vector<MultiPoly> coefficients_in(const std::string& var) const {
    int i = var_index(var);
    if (i < 0) return {*this};
    std::vector<MultiPoly> out(degrees_[i] + 1);
    for (auto& c : out) c.vars_ = vars_;
    for (const auto& [e, c] : terms_) {
      Exponents f = e;
      unsigned k = f[i];
      f[i] = 0;
      out[k].terms_.emplace(std::move(f), c);
    }
    for (auto& c : out) c.refresh();
    return out;
  }
  static MultiPoly from_coefficients(const std::string& var, const std::vector<MultiPoly>& coeffs) {
    std::vector<std::string> vars{var};
    for (const auto& c : coeffs) vars = merge_names(vars, c.vars_);
    MultiPoly r;
    r.vars_ = vars;
    std::size_t vi = std::lower_bound(vars.begin(), vars.end(), var) - vars.begin();
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
      MultiPoly c = coeffs[k].with_vars(vars);
      for (const auto& [e, v] : c.terms_) {
        require(e[vi] == 0, ErrorKind::invalid_argument, "coefficient involves the main variable");
        Exponents f = e;
        f[vi] = static_cast<std::uint32_t>(k);
        r.terms_[f] += v;
      }
    }
    r.prune();
    r.refresh();
    return r;
  }
  MultiPoly leading_coefficient(const std::string& var) const {
    if (is_zero()) return *this;
    return coefficients_in(var).back();
  }

  mpz_class content() const {
    mpz_class g = 0;
    for (const auto& [e, c] : terms_) {
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
      if (g == 1) break;
    }
    return g;
  }
  // Leading term in graded-lex order (total degree, then exponents descending).
  std::pair<Exponents, mpz_class> leading_term() const {
    require(!is_zero(), ErrorKind::domain, "zero polynomial has no leading term");
    auto best = terms_.begin();
    for (auto it = terms_.begin(); it != terms_.end(); ++it)
      if (graded_greater(it->first, best->first)) best = it;
    return *best;
  }
  int leading_sign() const { return is_zero() ? 0 : sgn(leading_term().second); }

  MultiPoly divide_exact(const mpz_class& k) const {
    require(k != 0, ErrorKind::domain, "division by zero");
    MultiPoly r = *this;
    for (auto& [e, c] : r.terms_) {
      require(mpz_divisible_p(c.get_mpz_t(), k.get_mpz_t()) != 0, ErrorKind::domain, "inexact integer division");
      mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), k.get_mpz_t());
    }
    r.refresh();
    return r;
  }

  MultiPoly operator-() const {
    MultiPoly r = *this;
    for (auto& [e, c] : r.terms_) c = -c;
    return r;
  }
  friend MultiPoly operator+(const MultiPoly& a, const MultiPoly& b) { return combine(a, b, 1); }
  friend MultiPoly operator-(const MultiPoly& a, const MultiPoly& b) { return combine(a, b, -1); }
  friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
    if (a.is_zero() || b.is_zero()) {
      MultiPoly z;
      z.vars_ = merged_vars(a, b);
      z.refresh();
      return z;
    }
    if (a.vars_ != b.vars_) {
      auto u = merged_vars(a, b);
      return a.with_vars(u) * b.with_vars(u);
    }
    MultiPoly r;
    r.vars_ = a.vars_;
    const std::size_t n = a.vars_.size();
    Exponents f(n);
    mpz_class t;
    for (const auto& [ea, ca] : a.terms_) {
      for (const auto& [eb, cb] : b.terms_) {
        for (std::size_t i = 0; i < n; ++i) f[i] = ea[i] + eb[i];
        mpz_mul(t.get_mpz_t(), ca.get_mpz_t(), cb.get_mpz_t());
        auto it = r.terms_.find(f);
        if (it == r.terms_.end())
          r.terms_.emplace(f, t);
        else
          it->second += t;
      }
    }
    r.prune();
    r.refresh();
    return r;
  }
  friend MultiPoly operator*(const mpz_class& k, const MultiPoly& p) {
    if (k == 0) return constant(0, p.vars_);
    MultiPoly r = p;
    for (auto& [e, c] : r.terms_) c *= k;
    r.refresh();
    return r;
  }
  MultiPoly& operator+=(const MultiPoly& o) { return *this = *this + o; }
  MultiPoly& operator-=(const MultiPoly& o) { return *this = *this - o; }
  MultiPoly& operator*=(const MultiPoly& o) { return *this = *this * o; }

  MultiPoly pow(unsigned n) const {
    MultiPoly result = constant(1, vars_);
    MultiPoly base = *this;
    while (n) {
      if (n & 1) result = result * base;
      n >>= 1;
      if (n) base = base * base;
    }
    return result;
  }

  MultiPoly derivative(const std::string& var) const {
    int i = var_index(var);
    if (i < 0) return constant(0, vars_);
    MultiPoly r;
    r.vars_ = vars_;
    for (const auto& [e, c] : terms_) {
      if (e[i] == 0) continue;
      Exponents f = e;
      f[i] -= 1;
      r.terms_.emplace(std::move(f), c * e[i]);
    }
    r.refresh();
    return r;
  }

  // Replaces var by an integer; the variable stays in the list with degree 0.
  MultiPoly substitute(const std::string& var, const mpz_class& value) const {
    int i = var_index(var);
    if (i < 0) return *this;
    MultiPoly r;
    r.vars_ = vars_;
    mpz_class pw;
    for (const auto& [e, c] : terms_) {
      Exponents f = e;
      mpz_pow_ui(pw.get_mpz_t(), value.get_mpz_t(), e[i]);
      f[i] = 0;
      r.terms_[f] += c * pw;
    }
    r.prune();
    r.refresh();
    return r;
  }

  // Replaces var by a polynomial.
  MultiPoly compose(const std::string& var, const MultiPoly& value) const {
    int i = var_index(var);
    if (i < 0) return *this;
    auto coeffs = coefficients_in(var);
    MultiPoly acc = constant(0, vars_);
    for (std::size_t k = coeffs.size(); k-- > 0;) acc = acc * value + coeffs[k];
    return acc;
  }

  friend bool operator==(const MultiPoly& a, const MultiPoly& b) {
    if (a.vars_ == b.vars_) return a.terms_ == b.terms_;
    auto u = merged_vars(a, b);
    return a.with_vars(u).terms_ == b.with_vars(u).terms_;
  }
  friend bool operator!=(const MultiPoly& a, const MultiPoly& b) { return !(a == b); }

  // Canonical sparse text: terms in descending graded order, coefficient always written.
  std::string to_string() const {
    if (is_zero()) return "0";
    std::vector<const Terms::value_type*> order;
    for (const auto& t : terms_) order.push_back(&t);
    std::sort(order.begin(), order.end(),
              [](const auto* a, const auto* b) { return graded_greater(a->first, b->first); });
    std::string s;
    bool first = true;
    for (const auto* t : order) {
      mpz_class c = t->second;
      if (first) {
        if (c < 0) s += "-";
      } else {
        s += c < 0 ? " - " : " + ";
      }
      first = false;
      s += mpz_class(abs(c)).get_str();
      for (std::size_t i = 0; i < vars_.size(); ++i) {
        if (t->first[i] == 0) continue;
        s += "*" + vars_[i];
        if (t->first[i] > 1) s += "^" + std::to_string(t->first[i]);
      }
    }
    return s;
  }

  static bool graded_greater(const Exponents& a, const Exponents& b) {
    std::uint64_t da = 0, db = 0;
    for (auto x : a) da += x;
    for (auto x : b) db += x;
    if (da != db) return da > db;
    return a > b;
  }

  static bool valid_name(const std::string& v) {
    if (v.empty() || !(std::isalpha(static_cast<unsigned char>(v[0])) || v[0] == '_')) return false;
    for (char ch : v)
      if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_')) return false;
    return true;
  }

 private:
  static std::vector<std::string> merge_names(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::vector<std::string> sa = a, sb = b, u;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    std::set_union(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(u));
    return u;
  }

  static MultiPoly combine(const MultiPoly& a, const MultiPoly& b, int sign) {
    if (a.vars_ != b.vars_) {
      auto u = merged_vars(a, b);
      return combine(a.with_vars(u), b.with_vars(u), sign);
    }
    MultiPoly r = a;
    for (const auto& [e, c] : b.terms_) {
      auto it = r.terms_.find(e);
      if (it == r.terms_.end())
        r.terms_.emplace(e, sign > 0 ? c : mpz_class(-c));
      else if (sign > 0)
        it->second += c;
      else
        it->second -= c;
    }
    r.prune();
    r.refresh();
    return r;
  }

  void prune() {
    for (auto it = terms_.begin(); it != terms_.end();) {
      if (it->second == 0)
        it = terms_.erase(it);
      else
        ++it;
    }
  }

  void refresh() {
    degrees_.assign(vars_.size(), 0);
    total_degree_ = 0;
    height_ = 0;
    for (const auto& [e, c] : terms_) {
      unsigned td = 0;
      for (std::size_t i = 0; i < e.size(); ++i) {
        degrees_[i] = std::max<unsigned>(degrees_[i], e[i]);
        td += e[i];
      }
      total_degree_ = std::max(total_degree_, td);
      if (mpz_cmpabs(c.get_mpz_t(), height_.get_mpz_t()) > 0) height_ = abs(c);
    }
  }

  std::vector<std::string> vars_;
  Terms terms_;
  std::vector<unsigned> degrees_;
  unsigned total_degree_ = 0;
  mpz_class height_ = 0;
};

namespace detail {

class PolyParser {
 public:
  explicit PolyParser(const std::string& s) : s_(s) {}

  MultiPoly run() {
    MultiPoly p = expr();
    skip();
    if (pos_ != s_.size()) error("unexpected character '" + std::string(1, s_[pos_]) + "'");
    return p;
  }

 private:
  [[noreturn]] void error(const std::string& what) const {
    fail(ErrorKind::parse, what + " at offset " + std::to_string(pos_) + " in \"" + s_ + "\"");
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  MultiPoly expr() {
    MultiPoly acc;
    bool neg = false;
    if (eat('-'))
      neg = true;
    else
      eat('+');
    acc = term();
    if (neg) acc = -acc;
    for (;;) {
      if (eat('+'))
        acc = acc + term();
      else if (eat('-'))
        acc = acc - term();
      else
        break;
    }
    return acc;
  }
  MultiPoly term() {
    MultiPoly acc = factor();
    while (eat('*')) acc = acc * factor();
    return acc;
  }
  MultiPoly factor() {
    MultiPoly b = base();
    if (eat('^')) {
      skip();
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) error("expected exponent");
      std::string digits = s_.substr(start, pos_ - start);
      if (digits.size() > 9) error("exponent too large");
      b = b.pow(static_cast<unsigned>(std::stoul(digits)));
    }
    return b;
  }
  MultiPoly base() {
    skip();
    if (pos_ >= s_.size()) error("unexpected end of input");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      MultiPoly inner = expr();
      if (!eat(')')) error("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      return MultiPoly::constant(mpz_class(s_.substr(start, pos_ - start)));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      return MultiPoly::variable(s_.substr(start, pos_ - start));
    }
    error("unexpected character '" + std::string(1, c) + "'");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline MultiPoly MultiPoly::parse(const std::string& text) { return detail::PolyParser(text).run(); }

inline MultiPoly operator""_mp(const char* s, std::size_t n) { return MultiPoly::parse(std::string(s, n)); }

// 2^d * prod H(f_i), with d the sum of all per-variable degrees of the factors.
inline mpz_class gelfond_product_bound(const std::vector<MultiPoly>& factors) {
  unsigned long d = 0;
  mpz_class prod = 1;
  for (const auto& f : factors) {
    for (auto x : f.degrees()) d += x;
    prod *= f.height();
  }
  mpz_class two;
  mpz_ui_pow_ui(two.get_mpz_t(), 2, d);
  return two * prod;
}

}  // namespace gk
