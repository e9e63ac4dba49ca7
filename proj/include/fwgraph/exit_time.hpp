#pragma once

#include "fwgraph/random.hpp"

namespace fwg {

// Brownian motion on (0, 1) started at y, both ends absorbing.
// P(tau <= s, exit at 0) and its density in s.
double exit_cdf_lower(double s, double y);
double exit_density_lower(double s, double y);

// Crossover between the image series and the spectral series.
inline constexpr double kSeriesSwitch = 0.35;

struct IntervalExit {
    bool upper = false;  // exit at R rather than 0
    double time = 0.0;
};

// Exit of standard Brownian motion from (0, R) started at x. Side exact,
// time by inverse transform of the side-conditioned law.
IntervalExit sample_interval_exit(double x, double R, RandomStream& stream);

// Exit time from (-r, r) started at 0.
double sample_ball_exit_time(double r, RandomStream& stream);

// E[exp(-alpha tau); exit at 0] and E[exp(-alpha tau); exit at R].
double laplace_exit_lower(double alpha, double x, double R);
double laplace_exit_upper(double alpha, double x, double R);

}  // namespace fwg
