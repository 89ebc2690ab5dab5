#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cavcool/params.hpp"

namespace cavcool {

/// Basis of the single-excitation manifold used throughout: index 0 is
/// |e,0>, 1 is |g1,0>, 2 is |g2,1>.
enum ManifoldState : int { kE0 = 0, kG1_0 = 1, kG2_1 = 2 };

/// Complex dressed frequencies of the driven atom-cavity manifold. Real part
/// is the position (units of nu), imaginary part minus the half-linewidth.
/// Ordered by descending real part, ties by ascending imaginary part.
struct DressedSpectrum {
  std::array<cplx, 3> omega_eff{};
};

/// Entries of the manifold resolvent (zeta - M)^{-1}, with the symmetric
/// off-diagonals implied.
struct ResolventBlock {
  cplx ee, g2g2, g1g1, g1g2, g1e, g2e;

  Eigen::Matrix3cd matrix() const;
};

struct DarkStateWeights {
  // Coefficients on (|g1,eps'>, |g2,eps'>); empty when Delta == 0.
  std::optional<std::array<double, 2>> three_photon;
  // Coefficients on (|g1,0>, |g2,1>).
  std::array<double, 2> two_photon{};
  bool three_photon_resonant = false;
  bool two_photon_resonant = false;
};

/// Non-Hermitian effective generator of the manifold (units of nu).
Eigen::Matrix3cd manifold_generator(const SystemParams& p);

/// Characteristic function f(zeta) = det(zeta - M), total linewidth gamma.
cplx char_poly(const SystemParams& p, cplx zeta);

/// Roots of f via a non-Hermitian eigensolve of the manifold generator.
DressedSpectrum dressed_states(const SystemParams& p);

/// Throws PoleError when |f(zeta)| < 1e-12 max(1,|zeta|^3).
ResolventBlock resolvent_block(const SystemParams& p, cplx zeta);

DarkStateWeights dark_state_weights(const SystemParams& p);

/// Re-orders `next` to follow `previous` by minimum total distance, so that
/// branches can be tracked across avoided crossings.
DressedSpectrum match_by_proximity(const DressedSpectrum& previous,
                                   const DressedSpectrum& next);

/// Dressed spectrum along a delta1 sweep with continuity-preserving labels.
std::vector<DressedSpectrum> track_dressed_states(
    SystemParams p, std::span<const double> delta1_values);

}  // namespace cavcool
