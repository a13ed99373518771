#pragma once

#include <set>

#include "gk/elimination.hpp"
#include "gk/io.hpp"

namespace gk {

constexpr std::size_t kMaxArity = 6;

// Homogeneous system sum_j u[i][j] x_j = 0 with polynomial coefficients.
struct PolyLinearSystem {
  std::size_t M = 0, N = 0;
  unsigned d = 0;
  mpz_class A = 1;
  std::vector<std::vector<MultiPoly>> u;

  std::vector<std::string> variables() const {
    std::set<std::string> s;
    for (const auto& row : u)
      for (const auto& p : row)
        for (const auto& v : p.support_vars()) s.insert(v);
    return {s.begin(), s.end()};
  }
};

struct SiegelSolution {
  std::vector<MultiPoly> x;
  bool nonzero = false;
  std::string method;
};

struct SiegelReport {
  bool residuals_zero = false;
  bool deg_ok = false;
  bool height_ok = false;
  bool nontrivial = false;
  bool ok() const { return residuals_zero && deg_ok && height_ok && nontrivial; }
};

inline mpz_class siegel_height_bound(const PolyLinearSystem& s) {
  mpz_class b;
  mpz_ui_pow_ui(b.get_mpz_t(), 1 + s.d, 6);
  return b * s.A * static_cast<unsigned long>(s.N);
}

inline void validate_system(const PolyLinearSystem& s) {
  require(s.M >= 1, ErrorKind::invalid_argument, "system needs at least one equation");
  require(s.A >= 1, ErrorKind::invalid_argument, "A must be at least 1");
  require(s.N >= 16 * s.M, ErrorKind::hypothesis_violated,
          "need N >= 16M (N=" + std::to_string(s.N) + ", M=" + std::to_string(s.M) + ")");
  require(s.u.size() == s.M, ErrorKind::invalid_argument, "coefficient rows do not match M");
  for (std::size_t i = 0; i < s.M; ++i) {
    require(s.u[i].size() == s.N, ErrorKind::invalid_argument, "coefficient row " + std::to_string(i) + " does not match N");
    for (std::size_t j = 0; j < s.N; ++j) {
      require(s.u[i][j].total_degree() <= s.d, ErrorKind::hypothesis_violated,
              "deg u[" + std::to_string(i) + "][" + std::to_string(j) + "] exceeds d");
      require(s.u[i][j].height() <= s.A, ErrorKind::hypothesis_violated,
              "H(u[" + std::to_string(i) + "][" + std::to_string(j) + "]) exceeds A");
    }
  }
  require(s.variables().size() <= kMaxArity, ErrorKind::invalid_argument, "at most 6 variables are supported");
}

inline SiegelReport verify_solution(const PolyLinearSystem& s, const SiegelSolution& sol) {
  SiegelReport r;
  if (sol.x.size() != s.N) return r;
  r.residuals_zero = true;
  for (std::size_t i = 0; i < s.M && i < s.u.size(); ++i) {
    MultiPoly acc;
    for (std::size_t j = 0; j < s.N && j < s.u[i].size(); ++j) acc += s.u[i][j] * sol.x[j];
    if (!acc.is_zero()) r.residuals_zero = false;
  }
  r.deg_ok = true;
  r.height_ok = true;
  mpz_class hb = siegel_height_bound(s);
  for (const auto& p : sol.x) {
    r.nontrivial = r.nontrivial || !p.is_zero();
    r.deg_ok = r.deg_ok && p.total_degree() <= 3 * s.d;
    r.height_ok = r.height_ok && p.height() <= hb;
  }
  return r;
}

namespace detail {

using IntMatrix = std::vector<std::vector<mpz_class>>;

// Monomials in k variables of total degree <= e, graded then lexicographic.
inline std::vector<Exponents> monomials_upto(std::size_t k, unsigned e) {
  std::vector<Exponents> out;
  Exponents cur(k, 0);
  std::function<void(std::size_t, unsigned)> rec = [&](std::size_t i, unsigned left) {
    if (i == k) {
      out.push_back(cur);
      return;
    }
    for (unsigned a = 0; a <= left; ++a) {
      cur[i] = a;
      rec(i + 1, left - a);
    }
    cur[i] = 0;
  };
  rec(0, e);
  std::stable_sort(out.begin(), out.end(), [](const Exponents& a, const Exponents& b) {
    return MultiPoly::graded_greater(b, a);
  });
  return out;
}

inline std::size_t monomial_count(std::size_t k, unsigned e) {
  mpz_class c;
  mpz_bin_uiui(c.get_mpz_t(), k + e, e);
  return c.fits_ulong_p() ? c.get_ui() : static_cast<std::size_t>(-1);
}

// Integer kernel vectors of A (rows x cols) from its exact reduced row echelon form, one per free column.
inline IntMatrix integer_kernel(const IntMatrix& a, std::size_t cols) {
  std::vector<std::vector<mpq_class>> m;
  for (const auto& row : a) m.emplace_back(row.begin(), row.end());
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < m.size(); ++c) {
    std::size_t piv = m.size();
    for (std::size_t k = r; k < m.size(); ++k)
      if (m[k][c] != 0) {
        piv = k;
        break;
      }
    if (piv == m.size()) continue;
    std::swap(m[r], m[piv]);
    mpq_class inv = 1 / m[r][c];
    for (std::size_t x = c; x < cols; ++x) m[r][x] *= inv;
    for (std::size_t k = 0; k < m.size(); ++k) {
      if (k == r || m[k][c] == 0) continue;
      mpq_class f = m[k][c];
      for (std::size_t x = c; x < cols; ++x)
        if (m[r][x] != 0) m[k][x] -= f * m[r][x];
    }
    pivots.push_back(c);
    ++r;
  }
  IntMatrix ker;
  std::vector<bool> is_pivot(cols, false);
  for (auto c : pivots) is_pivot[c] = true;
  for (std::size_t f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    std::vector<mpq_class> v(cols);
    v[f] = 1;
    for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = -m[i][f];
    mpz_class l = 1;
    for (const auto& q : v) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), q.get_den_mpz_t());
    std::vector<mpz_class> w(cols);
    for (std::size_t x = 0; x < cols; ++x) w[x] = mpz_class(v[x] * l);
    ker.push_back(std::move(w));
  }
  return ker;
}

inline mpz_class dot(const std::vector<mpz_class>& a, const std::vector<mpz_class>& b) {
  mpz_class s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Integral LLL (delta = 3/4) on linearly independent rows; exact arithmetic throughout.
inline IntMatrix lll_reduce(IntMatrix b) {
  const std::size_t n = b.size();
  if (n < 2) return b;
  std::vector<mpz_class> dd(n + 1);
  std::vector<std::vector<mpz_class>> lam(n + 1, std::vector<mpz_class>(n + 1));
  auto B = [&](std::size_t i) -> std::vector<mpz_class>& { return b[i - 1]; };
  dd[0] = 1;
  dd[1] = dot(B(1), B(1));
  std::size_t k = 2, kmax = 1;
  auto redi = [&](std::size_t kk, std::size_t l) {
    mpz_class twice = 2 * lam[kk][l];
    if (abs(twice) <= dd[l]) return;
    mpz_class q;
    mpz_class num = 2 * lam[kk][l] + dd[l], den = 2 * dd[l];
    mpz_fdiv_q(q.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    for (std::size_t x = 0; x < B(kk).size(); ++x) B(kk)[x] -= q * B(l)[x];
    lam[kk][l] -= q * dd[l];
    for (std::size_t i = 1; i < l; ++i) lam[kk][i] -= q * lam[l][i];
  };
  auto swapi = [&](std::size_t kk) {
    std::swap(B(kk), B(kk - 1));
    for (std::size_t j = 1; j + 1 < kk; ++j) std::swap(lam[kk][j], lam[kk - 1][j]);
    mpz_class l = lam[kk][kk - 1];
    mpz_class nb = (dd[kk - 2] * dd[kk] + l * l) / dd[kk - 1];
    for (std::size_t i = kk + 1; i <= kmax; ++i) {
      mpz_class t = lam[i][kk];
      lam[i][kk] = (dd[kk] * lam[i][kk - 1] - l * t) / dd[kk - 1];
      lam[i][kk - 1] = (nb * t + l * lam[i][kk]) / dd[kk];
    }
    dd[kk - 1] = nb;
  };
  while (k <= n) {
    if (k > kmax) {
      kmax = k;
      for (std::size_t j = 1; j <= k; ++j) {
        mpz_class u = dot(B(k), B(j));
        for (std::size_t i = 1; i < j; ++i) u = (dd[i] * u - lam[k][i] * lam[j][i]) / dd[i - 1];
        if (j < k)
          lam[k][j] = u;
        else
          dd[k] = u;
      }
      require(dd[k] != 0, ErrorKind::invalid_argument, "LLL input rows are dependent");
    }
    redi(k, k - 1);
    if (4 * dd[k] * dd[k - 2] < 3 * dd[k - 1] * dd[k - 1] - 4 * lam[k][k - 1] * lam[k][k - 1]) {
      swapi(k);
      k = std::max<std::size_t>(2, k - 1);
    } else {
      for (std::size_t l = k - 1; l-- > 1;) redi(k, l);
      ++k;
    }
  }
  return b;
}

inline mpz_class max_norm(const std::vector<mpz_class>& v) {
  mpz_class m = 0;
  for (const auto& x : v)
    if (abs(x) > m) m = abs(x);
  return m;
}

struct Candidate {
  std::vector<MultiPoly> x;
  std::string method;
};

inline std::pair<mpz_class, unsigned> candidate_key(const std::vector<MultiPoly>& x) {
  mpz_class h = 0;
  unsigned d = 0;
  for (const auto& p : x) {
    if (p.height() > h) h = p.height();
    d = std::max(d, p.total_degree());
  }
  return {h, d};
}

// Divides by the common integer content and fixes the sign of the first nonzero entry.
inline std::vector<MultiPoly> normalize_solution(std::vector<MultiPoly> x) {
  mpz_class g = 0;
  for (const auto& p : x)
    if (!p.is_zero()) g = gcd(g, p.content());
  if (g == 0) return x;
  for (auto& p : x)
    if (!p.is_zero()) p = p.divide_exact(g);
  for (const auto& p : x)
    if (!p.is_zero()) {
      if (p.leading_sign() < 0)
        for (auto& q : x) q = -q;
      break;
    }
  return x;
}

// Kernel vectors of the system with unknowns expanded to total degree e.
inline std::vector<Candidate> lattice_candidates(const PolyLinearSystem& s, const std::vector<std::string>& vars, unsigned e) {
  const std::size_t k = vars.size();
  auto xmon = monomials_upto(k, e);
  unsigned dmax = 0;
  for (const auto& row : s.u)
    for (const auto& p : row) dmax = std::max(dmax, p.total_degree());
  auto rmon = monomials_upto(k, dmax + e);
  std::map<Exponents, std::size_t> ridx;
  for (std::size_t i = 0; i < rmon.size(); ++i) ridx[rmon[i]] = i;
  const std::size_t cols = s.N * xmon.size();
  IntMatrix a(s.M * rmon.size(), std::vector<mpz_class>(cols));
  for (std::size_t i = 0; i < s.M; ++i)
    for (std::size_t j = 0; j < s.N; ++j) {
      MultiPoly p = s.u[i][j].with_vars(vars);
      for (const auto& [ex, c] : p.terms())
        for (std::size_t al = 0; al < xmon.size(); ++al) {
          Exponents sum = ex;
          for (std::size_t v = 0; v < k; ++v) sum[v] += xmon[al][v];
          a[i * rmon.size() + ridx.at(sum)][j * xmon.size() + al] += c;
        }
    }
  IntMatrix nz;
  for (auto& row : a) {
    bool any = false;
    for (const auto& x : row) any = any || x != 0;
    if (any) nz.push_back(std::move(row));
  }
  IntMatrix ker = integer_kernel(nz, cols);
  if (ker.empty()) return {};
  ker = lll_reduce(std::move(ker));
  std::vector<Candidate> out;
  for (const auto& v : ker) {
    std::vector<MultiPoly> x(s.N);
    for (std::size_t j = 0; j < s.N; ++j) {
      MultiPoly::Terms t;
      for (std::size_t al = 0; al < xmon.size(); ++al)
        if (v[j * xmon.size() + al] != 0) t[xmon[al]] = v[j * xmon.size() + al];
      x[j] = MultiPoly(vars, t);
    }
    out.push_back({normalize_solution(std::move(x)), "lattice(e=" + std::to_string(e) + ")"});
  }
  return out;
}

inline void for_each_subset(std::size_t n, std::size_t r, const std::function<bool(const std::vector<std::size_t>&)>& f) {
  std::vector<std::size_t> pick(r);
  for (std::size_t i = 0; i < r; ++i) pick[i] = i;
  if (r > n) return;
  while (true) {
    if (f(pick)) return;
    std::size_t i = r;
    while (i > 0 && pick[i - 1] == n - r + i - 1) --i;
    if (i == 0) return;
    ++pick[i - 1];
    for (std::size_t j = i; j < r; ++j) pick[j] = pick[j - 1] + 1;
  }
}

// Cofactor solution supported on cols (size r+1) from an r x r row block; checked against all equations.
inline std::optional<std::vector<MultiPoly>> cramer_on(const PolyLinearSystem& s, const std::vector<std::size_t>& cols) {
  const std::size_t r = cols.size() - 1;
  std::optional<std::vector<MultiPoly>> found;
  for_each_subset(s.M, r, [&](const std::vector<std::size_t>& rows) {
    std::vector<MultiPoly> x(s.N);
    bool any = false;
    for (std::size_t drop = 0; drop <= r; ++drop) {
      std::vector<MultiPoly> m;
      for (std::size_t i : rows)
        for (std::size_t c = 0; c <= r; ++c)
          if (c != drop) m.push_back(s.u[i][cols[c]]);
      MultiPoly det = r == 0 ? MultiPoly::constant(1) : bareiss_det(m, r);
      x[cols[drop]] = drop % 2 == 0 ? det : -det;
      any = any || !det.is_zero();
    }
    if (!any) return false;
    for (std::size_t i = 0; i < s.M; ++i) {
      MultiPoly acc;
      for (std::size_t c : cols) acc += s.u[i][c] * x[c];
      if (!acc.is_zero()) return false;
    }
    found = normalize_solution(std::move(x));
    return true;
  });
  return found;
}

// Integer relation c_a u_a + c_b u_b = 0 between two columns (a == b tests for a zero column).
inline std::optional<std::vector<MultiPoly>> proportional_pair(const PolyLinearSystem& s, const std::vector<std::string>& vars,
                                                               std::size_t a, std::size_t b) {
  std::vector<MultiPoly> x(s.N);
  bool zero_a = true;
  for (std::size_t i = 0; i < s.M; ++i) zero_a = zero_a && s.u[i][a].is_zero();
  if (zero_a) {
    x[a] = MultiPoly::constant(1);
    return x;
  }
  if (a == b) return std::nullopt;
  mpz_class ca = 0, cb = 0;
  for (std::size_t i = 0; i < s.M; ++i) {
    auto tp = s.u[i][a].with_vars(vars), tq = s.u[i][b].with_vars(vars);
    if (tp.terms().size() != tq.terms().size()) return std::nullopt;
    for (auto it = tp.terms().begin(), jt = tq.terms().begin(); it != tp.terms().end(); ++it, ++jt) {
      if (it->first != jt->first) return std::nullopt;
      if (ca == 0) {
        mpz_class g = gcd(it->second, jt->second);
        ca = jt->second / g;
        cb = -it->second / g;
      }
      if (ca * it->second + cb * jt->second != 0) return std::nullopt;
    }
  }
  x[a] = MultiPoly::constant(ca);
  x[b] = MultiPoly::constant(cb);
  return normalize_solution(std::move(x));
}

constexpr std::size_t kLatticeUnknownLimit = 64;
constexpr std::size_t kCramerWindows = 48;

}  // namespace detail

// Small nontrivial solution; candidates come from proportional columns, lattice-reduced integer kernels of the
// expanded system and cofactor vectors on column windows. The smallest (height, degree) candidate is returned.
inline SiegelSolution siegel_solve(const PolyLinearSystem& s) {
  validate_system(s);
  auto vars = s.variables();
  std::vector<detail::Candidate> cand;
  for (std::size_t a = 0; a < s.N && cand.empty(); ++a)
    for (std::size_t b = a; b < s.N; ++b)
      if (auto x = detail::proportional_pair(s, vars, a, b)) {
        cand.push_back({*x, "pair"});
        break;
      }
  for (unsigned e = 0; e <= 3 * s.d; ++e) {
    std::size_t unknowns = s.N * detail::monomial_count(vars.size(), e);
    if (unknowns > detail::kLatticeUnknownLimit) break;
    auto lc = detail::lattice_candidates(s, vars, e);
    if (!lc.empty()) {
      for (auto& c : lc) cand.push_back(std::move(c));
      break;
    }
  }
  for (std::size_t r = 1; r <= s.M; ++r) {
    for (std::size_t w = 0; w < std::min(detail::kCramerWindows, s.N); ++w) {
      std::vector<std::size_t> cols;
      for (std::size_t c = 0; c <= r; ++c) cols.push_back((w + c) % s.N);
      std::sort(cols.begin(), cols.end());
      if (auto x = detail::cramer_on(s, cols)) cand.push_back({*x, "cofactor(" + std::to_string(r) + ")"});
    }
  }
  require(!cand.empty(), ErrorKind::bound_not_met, "no nontrivial solution found");
  std::size_t best = 0;
  for (std::size_t i = 1; i < cand.size(); ++i)
    if (detail::candidate_key(cand[i].x) < detail::candidate_key(cand[best].x)) best = i;
  SiegelSolution sol{cand[best].x, true, cand[best].method};
  auto rep = verify_solution(s, sol);
  require(rep.residuals_zero && rep.nontrivial, ErrorKind::bound_not_met, "candidate failed exact verification");
  require(rep.deg_ok, ErrorKind::bound_not_met, "best solution exceeds degree 3d");
  require(rep.height_ok, ErrorKind::bound_not_met,
          "best solution height " + detail::candidate_key(sol.x).first.get_str() + " exceeds (1+d)^6 A N = " +
              siegel_height_bound(s).get_str());
  return sol;
}

inline json system_to_json(const PolyLinearSystem& s) {
  json u = json::array();
  for (const auto& row : s.u) {
    json r = json::array();
    for (const auto& p : row) r.push_back(p.to_string());
    u.push_back(r);
  }
  return {{"M", s.M}, {"N", s.N}, {"d", s.d}, {"A", s.A.get_str()}, {"u", u}};
}

inline PolyLinearSystem system_from_json(const json& j) {
  require(j.is_object(), ErrorKind::parse, "system must be a JSON object");
  for (const char* k : {"M", "N", "d", "A", "u"}) require(j.contains(k), ErrorKind::parse, std::string("system needs '") + k + "'");
  PolyLinearSystem s;
  auto nat = [&](const char* k) {
    require(j[k].is_number_unsigned() || (j[k].is_number_integer() && j[k].get<long long>() >= 0), ErrorKind::parse,
            std::string("'") + k + "' must be a nonnegative integer");
    return j[k].get<std::size_t>();
  };
  s.M = nat("M");
  s.N = nat("N");
  s.d = static_cast<unsigned>(nat("d"));
  s.A = parse_integer(j["A"]);
  require(j["u"].is_array(), ErrorKind::parse, "'u' must be an array of rows");
  for (const auto& row : j["u"]) {
    require(row.is_array(), ErrorKind::parse, "each row of 'u' must be an array");
    std::vector<MultiPoly> r;
    for (const auto& p : row) r.push_back(poly_from_json(p));
    s.u.push_back(std::move(r));
  }
  return s;
}

inline json solution_to_json(const SiegelSolution& sol) {
  json x = json::array();
  for (const auto& p : sol.x) x.push_back(p.to_string());
  return {{"x", x}, {"nonzero", sol.nonzero}, {"method", sol.method}};
}

inline SiegelSolution solution_from_json(const json& j) {
  require(j.is_object() && j.contains("x") && j["x"].is_array(), ErrorKind::parse, "solution needs an 'x' array");
  SiegelSolution sol;
  for (const auto& p : j["x"]) sol.x.push_back(poly_from_json(p));
  for (const auto& p : sol.x) sol.nonzero = sol.nonzero || !p.is_zero();
  if (j.contains("method") && j["method"].is_string()) sol.method = j["method"].get<std::string>();
  return sol;
}

inline json report_to_json(const SiegelReport& r) {
  return {{"residuals_zero", r.residuals_zero}, {"deg_ok", r.deg_ok}, {"height_ok", r.height_ok}, {"nontrivial", r.nontrivial}};
}

// Seeded random system with N = 16M, coefficients of total degree <= d and height <= A in `arity` variables.
template <class Rng>
PolyLinearSystem random_system(Rng& rng, std::size_t M, unsigned d, long A, std::size_t arity) {
  PolyLinearSystem s;
  s.M = M;
  s.N = 16 * M;
  s.d = d;
  s.A = A;
  std::vector<std::string> vars;
  for (std::size_t i = 1; i <= arity; ++i) vars.push_back("y" + std::to_string(i));
  auto mons = detail::monomials_upto(arity, d);
  std::uniform_int_distribution<long> coef(-A, A);
  std::uniform_int_distribution<int> keep(0, 2);
  for (std::size_t i = 0; i < M; ++i) {
    std::vector<MultiPoly> row;
    for (std::size_t j = 0; j < s.N; ++j) {
      MultiPoly::Terms t;
      for (const auto& m : mons)
        if (keep(rng) == 0) t[m] = coef(rng);
      row.emplace_back(vars, t);
    }
    s.u.push_back(std::move(row));
  }
  return s;
}

}  // namespace gk
