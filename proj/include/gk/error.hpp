#pragma once

#include <stdexcept>
#include <string>

namespace gk {

enum class ErrorKind {
  parse,
  unknown_variable,
  undefined_type,
  not_quadratic,
  domain,
  no_roots,
  refine_precision,
  factor_cap,
  lemma_violation,
  hypothesis_violated,
  bound_not_met,
  chain_degenerate,
  degenerate_budget,
  invalid_argument,
  no_stable_factor
};

inline const char* kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::parse: return "parse error";
    case ErrorKind::unknown_variable: return "unknown variable";
    case ErrorKind::undefined_type: return "undefined type";
    case ErrorKind::not_quadratic: return "not quadratic";
    case ErrorKind::domain: return "domain error";
    case ErrorKind::no_roots: return "no roots";
    case ErrorKind::refine_precision: return "refine precision";
    case ErrorKind::factor_cap: return "factor cap exceeded";
    case ErrorKind::lemma_violation: return "lemma violation";
    case ErrorKind::hypothesis_violated: return "hypothesis violated";
    case ErrorKind::bound_not_met: return "bound not met";
    case ErrorKind::chain_degenerate: return "chain degenerate";
    case ErrorKind::degenerate_budget: return "degenerate budget";
    case ErrorKind::invalid_argument: return "invalid argument";
    case ErrorKind::no_stable_factor: return "no stable factor";
  }
  return "error";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(kind_name(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool ok, ErrorKind kind, const std::string& what) {
  if (!ok) fail(kind, what);
}

}  // namespace gk
