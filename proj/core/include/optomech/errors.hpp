#pragma once

#include <stdexcept>
#include <string>

namespace optomech {

// Failure taxonomy. Configuration errors are user-input problems (CLI exit
// code 2); everything else is a module runtime error (CLI exit code 1).
enum class errc {
  // configuration / parameter construction
  missing_key,
  unknown_key,
  bad_value,            // unparseable number, malformed line, bad enum string
  non_positive_value,
  inconsistent_pair,    // mutually contradictory keys (e.g. Q vs gamma_m)
  // numerics and physics
  bad_argument,         // precondition violated by a caller-supplied value
  no_root_in_bracket,
  degenerate_crossing,  // resonance condition has a (near-)double root
  no_convergence,
  division_by_zero_kappa1,
  integration_not_converged,
  anti_damped,          // gamma_eff <= 0 where a damped mode is required
  non_positive_peak,
  no_peak_found,
  fit_diverged,
  diverged,             // stochastic trajectory left the trust region
  io_error,
};

const char* errc_name(errc c);
bool is_config_error(errc c);

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what);
  errc code() const { return code_; }

 private:
  errc code_;
};

[[noreturn]] void fail(errc code, const std::string& what);

}  // namespace optomech
