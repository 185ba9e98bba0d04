#pragma once

#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include "wienergauge/errors.hpp"
#include "wienergauge/format.hpp"

namespace wienergauge {

/// Relative capacity sampled at strictly decreasing radii t in (0, 1).
struct DeltaProfile {
  struct Entry {
    double t = 0.0;
    double delta = 0.0;
  };
  std::vector<Entry> entries;
  double p = 2.0;
  std::string domain_label;
  /// One provenance string per entry (grid size, spacing, outer radius).
  std::vector<std::string> grid_meta;
  /// Values of delta at or below this are treated as 0 before exponentiation.
  double noise_floor = 0.0;

  void validate() const {
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const auto& e = entries[i];
      if (!(e.t > 0.0 && e.t < 1.0)) throw PreconditionError("profile radius " + format_real(e.t) + " outside (0,1)");
      if (!(e.delta >= 0.0) || !std::isfinite(e.delta)) throw PreconditionError("profile delta must be finite and >= 0");
      if (i > 0 && !(e.t < entries[i - 1].t)) throw PreconditionError("profile radii must be strictly decreasing");
    }
  }
};

/// CSV with header `t,delta`, descending t, 17 significant digits.
inline void write_csv(std::ostream& os, const DeltaProfile& prof) {
  os << "t,delta\n";
  for (const auto& e : prof.entries) os << format_real(e.t) << ',' << format_real(e.delta) << '\n';
}

}  // namespace wienergauge
