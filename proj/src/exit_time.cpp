#include "fwgraph/exit_time.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fwg {

namespace {

constexpr double kSeriesTolerance = 1e-8;
constexpr int kMaxTerms = 200;

// Image points y + 2k in order of increasing |.|: y, y-2, y+2, y-4, ...
double image_point(double y, int j) {
    if (j == 0) return y;
    const int k = (j + 1) / 2;
    return (j % 2 == 1) ? y - 2.0 * k : y + 2.0 * k;
}

double small_time_cdf(double s, double y) {
    const double scale = std::sqrt(2.0 * s);
    double sum = 0.0;
    for (int j = 0; j < kMaxTerms; ++j) {
        const double a = image_point(y, j);
        const double term = std::copysign(std::erfc(std::abs(a) / scale), a);
        sum += term;
        if (j > 0 && (std::abs(term) <= kSeriesTolerance * std::abs(sum) || term == 0.0)) break;
    }
    return sum;
}

double small_time_density(double s, double y) {
    const double c = 1.0 / std::sqrt(2.0 * std::numbers::pi * s * s * s);
    double sum = 0.0;
    for (int j = 0; j < kMaxTerms; ++j) {
        const double a = image_point(y, j);
        const double term = c * a * std::exp(-a * a / (2.0 * s));
        sum += term;
        if (j > 0 && (std::abs(term) <= kSeriesTolerance * std::abs(sum) || term == 0.0)) break;
    }
    return sum;
}

double large_time_cdf(double s, double y) {
    double sum = 0.0;
    for (int n = 1; n < kMaxTerms; ++n) {
        const double decay = std::exp(-n * n * std::numbers::pi * std::numbers::pi * s / 2.0);
        sum += std::sin(n * std::numbers::pi * y) / n * decay;
        if (decay < 1e-18) break;
    }
    return (1.0 - y) - 2.0 / std::numbers::pi * sum;
}

double large_time_density(double s, double y) {
    double sum = 0.0;
    for (int n = 1; n < kMaxTerms; ++n) {
        const double decay = std::exp(-n * n * std::numbers::pi * std::numbers::pi * s / 2.0);
        sum += n * std::sin(n * std::numbers::pi * y) * decay;
        if (decay < 1e-18) break;
    }
    return std::numbers::pi * sum;
}

// Time to hit 0 from y in (0, 1), conditioned on hitting 0 first.
double sample_lower_exit_time(double y, RandomStream& stream) {
    const double target = stream.uniform() * (1.0 - y);

    double s_lo = std::max(y * y / (2.0 * 40.0 * 40.0), 1e-300);
    while (exit_cdf_lower(s_lo, y) > target && s_lo > 1e-300) s_lo *= 0.25;
    double s_hi = 1.0;
    while (exit_cdf_lower(s_hi, y) < target && s_hi < 1e3) s_hi *= 2.0;

    // Newton in log-time, falling back to geometric bisection.
    double lo = std::log(s_lo), hi = std::log(s_hi);
    double z = std::clamp(std::log(std::max(y * y, 1e-300)), lo, hi);
    for (int it = 0; it < 200; ++it) {
        const double s = std::exp(z);
        const double g = exit_cdf_lower(s, y) - target;
        if (g < 0.0) {
            lo = z;
        } else {
            hi = z;
        }
        const double slope = exit_density_lower(s, y) * s;
        double next = z - g / slope;
        if (!std::isfinite(next) || next <= lo || next >= hi) next = 0.5 * (lo + hi);
        if (std::abs(next - z) < 1e-13 || hi - lo < 1e-13) return std::exp(next);
        z = next;
    }
    return std::exp(z);
}

}  // namespace

double exit_cdf_lower(double s, double y) {
    if (s <= 0.0) return 0.0;
    return s < kSeriesSwitch ? small_time_cdf(s, y) : large_time_cdf(s, y);
}

double exit_density_lower(double s, double y) {
    if (s <= 0.0) return 0.0;
    return s < kSeriesSwitch ? small_time_density(s, y) : large_time_density(s, y);
}

IntervalExit sample_interval_exit(double x, double R, RandomStream& stream) {
    if (!(R > 0.0) || !(x > 0.0) || !(x < R)) throw std::invalid_argument("start must lie strictly inside (0, R)");
    IntervalExit out;
    out.upper = stream.uniform() < x / R;
    const double y = out.upper ? (R - x) / R : x / R;
    out.time = R * R * sample_lower_exit_time(y, stream);
    return out;
}

double sample_ball_exit_time(double r, RandomStream& stream) {
    if (!(r > 0.0)) throw std::invalid_argument("ball radius must be positive");
    return (2.0 * r) * (2.0 * r) * sample_lower_exit_time(0.5, stream);
}

double laplace_exit_lower(double alpha, double x, double R) {
    if (alpha == 0.0) return 1.0 - x / R;
    const double k = std::sqrt(2.0 * alpha);
    return std::sinh(k * (R - x)) / std::sinh(k * R);
}

double laplace_exit_upper(double alpha, double x, double R) {
    if (alpha == 0.0) return x / R;
    const double k = std::sqrt(2.0 * alpha);
    return std::sinh(k * x) / std::sinh(k * R);
}

}  // namespace fwg
