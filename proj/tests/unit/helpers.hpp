#pragma once

#include "varicurv/types.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace varicurv::testing {

inline constexpr double kPi = std::numbers::pi;

inline Vec v3(double a, double b, double c)
{
    return (Vec(3) << a, b, c).finished();
}

inline Vec v2(double a, double b)
{
    return (Vec(2) << a, b).finished();
}

inline Vec random_unit(std::mt19937_64& rng, int d)
{
    std::normal_distribution<double> n(0.0, 1.0);
    Vec v(d);
    for (int k = 0; k < d; ++k) {
        v(k) = n(rng);
    }
    return v.normalized();
}

inline Mat random_rotation(std::mt19937_64& rng)
{
    std::normal_distribution<double> n(0.0, 1.0);
    Mat a(3, 3);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            a(i, j) = n(rng);
        }
    }
    Eigen::HouseholderQR<Mat> qr(a);
    Mat q = qr.householderQ();
    if (q.determinant() < 0.0) {
        q.col(0) *= -1.0;
    }
    return q;
}

// Midpoint-rule sum of sin over m equal cells of [0, pi]: 1 / sin(h / 2) with h = pi / m.
inline double midpoint_sphere_mass(double radius, int resolution)
{
    const double h = kPi / (2.0 * resolution);
    return 4.0 * kPi * radius * radius * (0.5 * h) / std::sin(0.5 * h);
}

} // namespace varicurv::testing
