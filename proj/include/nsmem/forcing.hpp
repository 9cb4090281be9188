#pragma once

#include "nsmem/field.hpp"

namespace nsmem {

/// Localized divergence-free profile u = amplitude * curl of a Gaussian
/// stream bump exp(-r^2 / (2 width^2)) centered at (x_c, y_c).
///
/// Because the stream function itself is compactly concentrated, the velocity
/// has no slow multipole far field; this keeps forced energy localized for
/// the far-field diagnostics.  Negative width or center selects defaults
/// L/20 and the box center.
struct BumpSpec {
  double amplitude = 0.0;
  double width = -1.0;
  double x_c = -1.0;
  double y_c = -1.0;
};

/// Periodized bump synthesized from analytic samples, masked to the
/// dealiased range and projected; mean-free and divergence-free.
Field make_bump_field(const std::shared_ptr<const SpectralGrid>& grid,
                      const BumpSpec& spec);

/// max of ||h||_H, ||h||_V, ||h||_W: the profile constant entering the
/// energy estimates.
double profile_constant(const Field& h);

}  // namespace nsmem
