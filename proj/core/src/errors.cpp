#include "optomech/errors.hpp"

namespace optomech {

const char* errc_name(errc c) {
  switch (c) {
    case errc::missing_key: return "MissingKey";
    case errc::unknown_key: return "UnknownKey";
    case errc::bad_value: return "BadValue";
    case errc::non_positive_value: return "NonPositiveValue";
    case errc::inconsistent_pair: return "InconsistentPair";
    case errc::bad_argument: return "BadArgument";
    case errc::no_root_in_bracket: return "NoRootInBracket";
    case errc::degenerate_crossing: return "DegenerateCrossing";
    case errc::no_convergence: return "NoConvergence";
    case errc::division_by_zero_kappa1: return "DivisionByZeroKappa1";
    case errc::integration_not_converged: return "IntegrationNotConverged";
    case errc::anti_damped: return "AntiDamped";
    case errc::non_positive_peak: return "NonPositivePeak";
    case errc::no_peak_found: return "NoPeakFound";
    case errc::fit_diverged: return "FitDiverged";
    case errc::diverged: return "Diverged";
    case errc::io_error: return "IoError";
  }
  return "UnknownError";
}

bool is_config_error(errc c) {
  switch (c) {
    case errc::missing_key:
    case errc::unknown_key:
    case errc::bad_value:
    case errc::non_positive_value:
    case errc::inconsistent_pair:
      return true;
    default:
      return false;
  }
}

Error::Error(errc code, const std::string& what)
    : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

void fail(errc code, const std::string& what) { throw Error(code, what); }

}  // namespace optomech
