#pragma once

#include <vector>

#include "solenoid/classify.hpp"

namespace builders {

using namespace solenoid;

inline SpecPtr dyadic(int levels) { return make_spec(std::vector<int>(static_cast<size_t>(levels), 2)); }

/// constant + amplitude * cos(2 pi (m / P_level) t) as a real series.
inline BohrSeries cosine_field(SpecPtr spec, int level, long long m, double amplitude,
                               double constant) {
  BohrSeries v(std::move(spec), true);
  if (constant != 0.0) v.set_coefficient(0, 0, constant);
  v.set_pair(level, m, {amplitude / 2.0, 0.0});
  return v;
}

}  // namespace builders
