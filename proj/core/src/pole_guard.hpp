#pragma once

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "cavcool/errors.hpp"
#include "cavcool/resolvent.hpp"

namespace cavcool::detail {

// f(zeta) with a relative guard band; the reference magnitude is
// max(1, |zeta|)^3 in nu^3 units.
inline cplx guarded_char_poly(const SystemParams& p, double zeta,
                              const char* factor, double rel_tol) {
  const cplx f = char_poly(p, zeta);
  const double scale = std::pow(std::max(1.0, std::abs(zeta)), 3);
  if (!(std::abs(f) >= rel_tol * scale))
    throw PoleError(factor, fmt::format("{} = {:.3g} is within the pole guard band "
                                        "at zeta = {}",
                                        factor, std::abs(f), zeta));
  return f;
}

}  // namespace cavcool::detail
