#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace spectral_forge {

/// Raw residuals, the pass/fail verdicts derived from them, and the
/// tolerances that produced those verdicts.
struct VerificationReport {
  std::map<std::string, double> residuals;
  std::map<std::string, bool> pass;
  std::map<std::string, double> tolerances;

  /// Records a residual and its verdict `value <= bound` under one name.
  void check(const std::string& name, double value, double bound) {
    residuals[name] = value;
    pass[name] = std::isfinite(value) && value <= bound;
    tolerances[name] = bound;
  }

  /// Records a margin that must stay at or above `bound`.
  void check_at_least(const std::string& name, double value, double bound) {
    residuals[name] = value;
    pass[name] = std::isfinite(value) && value >= bound;
    tolerances[name] = bound;
  }

  bool all_pass() const {
    return std::all_of(pass.begin(), pass.end(), [](const auto& kv) { return kv.second; });
  }

  double residual(const std::string& name) const { return residuals.at(name); }
  bool passed(const std::string& name) const { return pass.at(name); }
};

}  // namespace spectral_forge
