#pragma once

#include <Eigen/Core>

#include "core/interferogram.hpp"

namespace spm {

/// Counts along the antidiagonal through the pattern center (the fringe
/// direction, since the interference phase depends on w2 - w1), smoothed
/// with a centered boxcar of the given radius.
Eigen::ArrayXd antidiagonal_profile(const Interferogram& g, int smooth_radius = 1);

/// Fringe contrast (max - min)/(max + min) of the smoothed antidiagonal
/// profile, evaluated within 3/4 period of the central extremum with
/// parabolic refinement. Requires at least two fringe periods across the
/// profile.
double fringe_visibility(const Interferogram& g, int smooth_radius = 1);

}  // namespace spm
