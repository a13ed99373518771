#pragma once

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "gk/acceptance.hpp"
#include "gk/auxfn.hpp"
#include "gk/pipeline.hpp"

namespace gk::cli {

enum class KeyType { integer, real, text };

struct Key {
  std::string name;
  KeyType type;
  std::string fallback;
  std::string help;
};

inline const char* kSqrt2 = R"({"minpoly":[-2,0,1],"box":{"re":["1","2"],"im":["0","0"]}})";

// Every tunable constant, with its default. Order here is the order in embedded configs.
inline const std::vector<Key>& keys() {
  static const std::vector<Key> k{
      {"precision_bits", KeyType::integer, "256", "working precision in bits, [64, 65536]"},
      {"jobs", KeyType::integer, "1", "worker threads (never affects output)"},
      {"seed", KeyType::integer, "1", "seed for randomized suites"},
      {"alpha1", KeyType::text, "2", "alpha1: rational, algebraic JSON, or a file holding either"},
      {"alpha2", KeyType::text, "3", "alpha2: rational, algebraic JSON, or a file holding either"},
      {"beta", KeyType::text, kSqrt2, "beta: rational, algebraic JSON, or a file holding either"},
      {"n", KeyType::integer, "1", "N: auxiliary parameter, also N in waldschmidt bounds"},
      {"d1", KeyType::integer, "1", "D1: degree bound in x"},
      {"d2", KeyType::integer, "5", "D2: degree bound in y and z"},
      {"eps", KeyType::real, "0.5", "epsilon"},
      {"k_mult", KeyType::integer, "0", "zero multiplicity k; 0 picks the smallest admissible"},
      {"K", KeyType::real, "1", "constant K"},
      {"C", KeyType::real, "1", "budget constant C"},
      {"C1", KeyType::real, "1", "budget constant C1"},
      {"C2c", KeyType::real, "1", "constant in the power-form lower bound"},
      {"C3c", KeyType::real, "1", "constant in the log-ratio lower bound"},
      {"Cc", KeyType::real, "1", "constant in the corollary bound"},
      {"Cprime", KeyType::real, "1", "C': inner Schwarz radius is max(R2, C' N log N)"},
      {"k0", KeyType::real, "2", "k0 in the smallness transfer bound"},
      {"chain_n", KeyType::integer, "2", "N in the leading-coefficient threshold of the elimination chain"},
      {"R1", KeyType::real, "20", "outer Schwarz radius"},
      {"R2", KeyType::real, "5", "inner Schwarz radius"},
      {"samples", KeyType::integer, "720", "circle samples for maxima"},
      {"tolerance", KeyType::real, "1e-40", "grid vanishing tolerance"},
      {"deg_cap", KeyType::integer, "1", "scan degree cap"},
      {"height_cap", KeyType::integer, "2", "scan height cap"}};
  return k;
}

inline std::string dashed(std::string s) {
  std::replace(s.begin(), s.end(), '_', '-');
  return s;
}

inline std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

inline const Key& find_key(const std::string& raw) {
  std::string name = raw;
  std::replace(name.begin(), name.end(), '-', '_');
  for (const auto& k : keys())
    if (k.name == name) return k;
  fail(ErrorKind::parse, "unknown config key '" + raw + "'");
}

inline json typed_value(const Key& k, const std::string& v, const std::string& origin) {
  const std::string s = trim(v);
  try {
    std::size_t used = 0;
    if (k.type == KeyType::integer) {
      long long x = std::stoll(s, &used);
      if (used == s.size()) return x;
    } else if (k.type == KeyType::real) {
      double x = std::stod(s, &used);
      if (used == s.size() && std::isfinite(x)) return x;
    } else {
      return s;
    }
  } catch (const std::exception&) {
  }
  fail(ErrorKind::parse, "bad value '" + s + "' for " + k.name + " in " + origin);
}

inline std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::map<std::string, std::string> out;
  std::istringstream in(read_file(path));
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    auto eq = line.find('=');
    require(eq != std::string::npos, ErrorKind::parse, path + ":" + std::to_string(no) + ": expected key = value");
    const Key& k = find_key(trim(line.substr(0, eq)));
    out[k.name] = trim(line.substr(eq + 1));
  }
  return out;
}

class Config {
 public:
  // Command line beats config file beats GK_PRECISION_BITS beats built-in default.
  static Config resolve(const std::map<std::string, std::string>& flags, const std::string& config_path) {
    std::map<std::string, std::string> file;
    if (!config_path.empty()) file = parse_config_file(config_path);
    Config c;
    for (const auto& k : keys()) {
      if (auto f = flags.find(k.name); f != flags.end()) {
        c.values_[k.name] = typed_value(k, f->second, "command line");
      } else if (auto g = file.find(k.name); g != file.end()) {
        c.values_[k.name] = typed_value(k, g->second, config_path);
      } else if (const char* env = std::getenv("GK_PRECISION_BITS"); env && k.name == "precision_bits") {
        c.values_[k.name] = typed_value(k, env, "GK_PRECISION_BITS");
      } else {
        c.values_[k.name] = typed_value(k, k.fallback, "defaults");
      }
    }
    c.validate();
    return c;
  }

  long integer(const std::string& k) const { return values_.at(k).get<long>(); }
  double real(const std::string& k) const { return values_.at(k).get<double>(); }
  std::string text(const std::string& k) const { return values_.at(k).get<std::string>(); }

  json embedded() const {
    json j = values_;
    j.erase("jobs");
    return j;
  }

  AuxParams aux_params() const {
    AuxParams p;
    p.N = integer("n");
    p.D1 = integer("d1");
    p.D2 = integer("d2");
    p.K = real("K");
    p.C = real("C");
    p.C1 = real("C1");
    p.eps = real("eps");
    p.k_mult = integer("k_mult");
    return p;
  }

 private:
  void validate() const {
    clamp_precision(integer("precision_bits"));
    auto positive = [&](const char* k) { require(integer(k) >= 1, ErrorKind::invalid_argument, std::string(k) + " must be >= 1"); };
    for (const char* k : {"jobs", "n", "d1", "d2", "chain_n", "samples", "deg_cap", "height_cap"}) positive(k);
    require(integer("k_mult") >= 0, ErrorKind::invalid_argument, "k_mult must be >= 0");
    require(real("eps") > 0 && real("eps") < 1, ErrorKind::invalid_argument, "eps must lie in (0, 1)");
    require(real("tolerance") > 0, ErrorKind::invalid_argument, "tolerance must be positive");
    require(3 * real("R2") < real("R1") && real("R2") > 0, ErrorKind::invalid_argument, "need 0 < 3 R2 < R1");
    require(integer("samples") >= 8, ErrorKind::invalid_argument, "samples must be >= 8");
  }

  json values_ = json::object();
};

inline std::string input_text(const std::string& v) {
  std::error_code ec;
  if (!v.empty() && v.front() != '{' && std::filesystem::is_regular_file(v, ec)) return read_file(v);
  return v;
}

inline AlgebraicNumber load_algebraic(const Config& c, const std::string& key) {
  const std::string t = trim(input_text(c.text(key)));
  require(!t.empty(), ErrorKind::parse, key + " is empty");
  return algebraic_from_text(t);
}

inline MultiPoly load_poly(const json& j, const std::string& what) {
  require(!j.is_null(), ErrorKind::parse, "missing polynomial " + what);
  return poly_from_json(j);
}

inline TranscendentalTriple load_triple(const Config& c) {
  return eval_triple(load_algebraic(c, "alpha1"), load_algebraic(c, "alpha2"), load_algebraic(c, "beta"),
                     c.integer("precision_bits"));
}

inline json header(const std::string& cmd, const Config& c, const json& inputs) {
  return {{"subcommand", cmd}, {"config", c.embedded()}, {"inputs", inputs}};
}

inline void emit(const std::string& out, const std::string& text) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  require(static_cast<bool>(f), ErrorKind::invalid_argument, "cannot write '" + out + "'");
  f << text;
}

inline void emit_json(const std::string& out, const json& j) { emit(out, j.dump(2) + "\n"); }

inline json semires_to_json(const SemiResCertificate& c) {
  json degs = json::array();
  for (const auto& d : c.degrees) degs.push_back({{"var", d.var}, {"claimed", d.claimed}, {"computed", d.computed}});
  return {{"var", c.var},
          {"m", c.m},
          {"n", c.n},
          {"k", c.k},
          {"degrees", degs},
          {"height_claimed", c.height_claimed.get_str()},
          {"height_computed", c.height_computed.get_str()},
          {"r", c.r.to_string()},
          {"ok", c.ok}};
}

// Input JSON file (if any) overlaid by explicit polynomial flags.
inline json poly_inputs(const std::string& in, const std::map<std::string, std::string>& flags) {
  json j = json::object();
  if (!in.empty()) {
    j = parse_json_text(read_file(in), in);
    require(j.is_object(), ErrorKind::parse, in + " must hold a JSON object");
  }
  for (const auto& [k, v] : flags)
    if (!v.empty()) j[k] = v;
  return j;
}

inline int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::parse:
    case ErrorKind::unknown_variable:
    case ErrorKind::undefined_type:
    case ErrorKind::not_quadratic:
    case ErrorKind::domain:
    case ErrorKind::invalid_argument:
    case ErrorKind::hypothesis_violated:
    case ErrorKind::degenerate_budget:
      return 2;
    default:
      return 3;
  }
}

inline int run(int argc, char** argv) {
  CLI::App app{"gk: certified computations around the Gelfond-Kronecker method"};
  app.set_version_flag("--version", "gk 1.0");
  app.require_subcommand(1);
  app.fallthrough();

  std::map<std::string, std::string> flag_values;
  std::map<std::string, CLI::Option*> flag_opts;
  for (const auto& k : keys()) flag_opts[k.name] = app.add_option("--" + dashed(k.name), flag_values[k.name], k.help);
  std::string config_path, out;
  app.add_option("--config", config_path, "key = value file merged under explicit flags");
  app.add_option("--out", out, "output path (stdout when omitted)");

  auto* eval = app.add_subcommand("eval", "certified balls for L, tau1, tau2 and optional polynomial values");
  std::vector<std::string> eval_polys;
  eval->add_option("--poly", eval_polys, "polynomial in x, y, z to evaluate (repeatable)");

  auto* aux = app.add_subcommand("construct-aux", "build the auxiliary function and verify it");

  auto* elim = app.add_subcommand("eliminate", "semi-resultant elimination");
  elim->require_subcommand(1);
  std::string in, p_text, q_text, a1_text, var = "y";
  auto* semires = elim->add_subcommand("semires", "certified semi-resultant of P and Q");
  semires->add_option("--in", in, "JSON object with P, Q and optional var");
  semires->add_option("--p", p_text, "P");
  semires->add_option("--q", q_text, "Q");
  semires->add_option("--var", var, "eliminated variable");
  auto* chain = elim->add_subcommand("chain", "elimination chain A1 -> A4 with certificate");
  chain->add_option("--in", in, "JSON object with A1, P, Q");
  chain->add_option("--a1", a1_text, "A1 in x, y, z");
  chain->add_option("--p", p_text, "P in x, y");
  chain->add_option("--q", q_text, "Q in x, y, z");

  auto* scan = app.add_subcommand("scan", "coprime pair scan; CSV output");

  auto* bounds = app.add_subcommand("bounds", "closed-form lower bounds");
  bounds->require_subcommand(1);
  auto* corollary = bounds->add_subcommand("corollary", "corollary bound for P in x, y");
  corollary->add_option("--p", p_text, "P")->required();
  auto* wald = bounds->add_subcommand("waldschmidt", "power or log-ratio lower bound");
  double height = 1;
  std::string which = "power";
  wald->add_option("--height", height, "H >= 1");
  wald->add_option("--which", which, "power or logratio")->check(CLI::IsMember({"power", "logratio"}));

  auto* suite = app.add_subcommand("suite", "acceptance suites; exit 0 iff all selected pass");
  std::vector<std::string> filter;
#ifdef GK_INJECT_FAULT
  bool inject = true;
#else
  bool inject = false;
#endif
  suite->add_option("--filter", filter, "suite names to run")->delimiter(',');
  suite->add_flag("--inject-fault", inject, "corrupt known results to exercise the failure path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    std::map<std::string, std::string> given;
    for (const auto& [k, o] : flag_opts)
      if (o->count() > 0) given[k] = flag_values[k];
    const Config cfg = Config::resolve(given, config_path);

    if (eval->parsed()) {
      auto T = load_triple(cfg);
      json vals = json::array();
      for (const auto& s : eval_polys) {
        MultiPoly P = MultiPoly::parse(s);
        vals.push_back({{"poly", P.to_string()}, {"value", ball_to_json(eval_poly_at_triple(P, T))}});
      }
      json j = header("eval", cfg, {{"poly", eval_polys}});
      j["triple"] = {{"L", ball_to_json(T.L)},           {"tau1", ball_to_json(T.tau1)},
                     {"tau2", ball_to_json(T.tau2)},     {"log_alpha1", ball_to_json(T.log_a1)},
                     {"log_alpha2", ball_to_json(T.log_a2)}, {"beta", ball_to_json(T.beta)}};
      j["values"] = vals;
      emit_json(out, j);
      return 0;
    }

    if (aux->parsed()) {
      AuxParams p = cfg.aux_params();
      auto a1 = load_algebraic(cfg, "alpha1"), a2 = load_algebraic(cfg, "alpha2"), beta = load_algebraic(cfg, "beta");
      auto qd = quadratic_data(beta);
      auto F = construct_aux(p, qd, a1, a2);
      auto T = eval_triple(a1, a2, beta, cfg.integer("precision_bits"));
      double n = static_cast<double>(p.N);
      double r2 = std::max(cfg.real("R2"), cfg.real("Cprime") * n * std::log(n));
      require(3 * r2 < cfg.real("R1"), ErrorKind::invalid_argument, "need 3 R2 < R1 after applying C'");
      auto v = verify_aux(F, p, T, cfg.real("tolerance"), mpq_class(cfg.real("R1")), mpq_class(r2),
                          static_cast<unsigned>(cfg.integer("samples")));
      json j = header("construct-aux", cfg, json::object());
      j["checks"] = checks_to_json(check_params(p));
      j["aux"] = aux_to_json(F);
      j["verification"] = verification_to_json(v);
      j["verification"]["ok"] = v.ok();
      emit_json(out, j);
      return v.ok() ? 0 : 1;
    }

    if (semires->parsed()) {
      json src = poly_inputs(in, {{"P", p_text}, {"Q", q_text}});
      std::string v = src.contains("var") && !semires->get_option("--var")->count() ? src["var"].get<std::string>() : var;
      auto c = certify_semiresultant(load_poly(src.value("P", json()), "P"), load_poly(src.value("Q", json()), "Q"), v);
      src["var"] = v;
      json j = header("eliminate semires", cfg, src);
      j["certificate"] = semires_to_json(c);
      emit_json(out, j);
      return c.ok ? 0 : 1;
    }

    if (chain->parsed()) {
      json src = poly_inputs(in, {{"A1", a1_text}, {"P", p_text}, {"Q", q_text}});
      MultiPoly A1 = load_poly(src.value("A1", json()), "A1"), P = load_poly(src.value("P", json()), "P"),
                Q = load_poly(src.value("Q", json()), "Q");
      auto T = load_triple(cfg);
      auto s0 = step0_nearest_roots(P, Q, T);
      auto [A4, cert] = eliminate_chain(A1, P, Q, s0.xi1.xi, T, {cfg.real("eps"), cfg.integer("chain_n")});
      json j = header("eliminate chain", cfg, src);
      j["step0"] = step0_to_json(s0);
      j["certificate"] = certificate_to_json(cert);
      j["A4"] = A4.to_string();
      emit_json(out, j);
      return cert.pass ? 0 : 1;
    }

    if (scan->parsed()) {
      auto T = load_triple(cfg);
      auto s = pair_scan(static_cast<unsigned>(cfg.integer("deg_cap")), cfg.integer("height_cap"), T,
                             static_cast<unsigned>(cfg.integer("jobs")));
      emit(out, scan_to_csv(s, "config " + header("scan", cfg, json::object()).dump()));
      return 0;
    }

    if (corollary->parsed()) {
      MultiPoly P = MultiPoly::parse(p_text).with_vars({"x", "y"});
      double b = corollary_bound(P, cfg.real("Cc"));
      if (!out.empty()) {
        json j = header("bounds corollary", cfg, {{"P", P.to_string()}});
        j["value"] = real_json(b);
        emit_json(out, j);
      }
      std::cout << fmt_real(b, 17) << "\n";
      return 0;
    }

    if (wald->parsed()) {
      auto form = which == "power" ? WaldschmidtForm::power : WaldschmidtForm::logratio;
      double b = waldschmidt_bound(cfg.integer("n"), height, form, cfg.real("C2c"), cfg.real("C3c"));
      if (!out.empty()) {
        json j = header("bounds waldschmidt", cfg, {{"which", which}, {"height", height}});
        j["value"] = real_json(b);
        emit_json(out, j);
      }
      std::cout << fmt_real(b, 17) << "\n";
      return 0;
    }

    if (suite->parsed()) {
      SuiteOptions o;
      o.seed = static_cast<std::uint64_t>(cfg.integer("seed"));
      o.filter = filter;
      o.inject_fault = inject;
      o.jobs = static_cast<unsigned>(cfg.integer("jobs"));
      bool ok = true;
      auto rs = run_suite(o, [&](const CriterionResult& r) {
        std::cout << format_result(r) << std::endl;
        ok = ok && r.pass;
      });
      std::cout << (ok ? "suite: all passed" : "suite: FAILED") << std::endl;
      if (!out.empty()) {
        json j = header("suite", cfg, {{"filter", filter}, {"inject_fault", inject}});
        j["results"] = results_to_json(rs);
        j["pass"] = ok;
        emit_json(out, j);
      }
      return ok ? 0 : 1;
    }
  } catch (const Error& e) {
    std::cerr << "gk: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const json::exception& e) {
    std::cerr << "gk: parse error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace gk::cli
