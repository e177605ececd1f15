#pragma once

#include "whmap/moebius.hpp"

#include <cmath>
#include <complex>

namespace whmap {

using Complex = std::complex<double>;

/// Boundary correspondence between the half-plane picture (extended reals,
/// where all exact computation happens) and the unit circle: the conjugated
/// Cayley transform w = conj((z - i)/(z + i)), sending 0 -> -1, 1 -> -i,
/// infinity -> 1 and the interior point i -> 0.
inline Complex disk_from_half(const Complex& z) {
    const Complex i(0.0, 1.0);
    return std::conj((z - i) / (z + i));
}

inline Complex half_from_disk(const Complex& w) {
    const Complex i(0.0, 1.0);
    Complex wc = std::conj(w);
    return i * (1.0 + wc) / (1.0 - wc);
}

inline Complex circle_point(const BoundaryPoint& x) {
    if (x.is_infinity()) return {1.0, 0.0};
    return disk_from_half(Complex(x.as_double(), 0.0));
}

inline Complex circle_point(double x) {
    if (std::isinf(x)) return {1.0, 0.0};
    return disk_from_half(Complex(x, 0.0));
}

/// Angular width of the arc {z : ccw(a, z, b)} on the circle, in (0, 2*pi).
/// The boundary correspondence reverses circular orientation, so the
/// counterclockwise arc in real-line coordinates runs clockwise on the
/// circle.
inline double arc_width(const BoundaryPoint& a, const BoundaryPoint& b) {
    double d = std::arg(circle_point(a)) - std::arg(circle_point(b));
    double two_pi = 2.0 * M_PI;
    d = std::fmod(d, two_pi);
    if (d <= 0) d += two_pi;
    return d;
}

/// Hyperbolic distance between interior points of the unit disk.
inline double disk_distance(const Complex& z, const Complex& w) {
    double r = std::abs(z - w) / std::abs(1.0 - std::conj(z) * w);
    return 2.0 * std::atanh(r);
}

}  // namespace whmap
