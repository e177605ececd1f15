#include "whmap/barycentric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace whmap {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

double half_coordinate(const Complex& w) {
    if (std::abs(1.0 - w) < 1e-14) return std::numeric_limits<double>::infinity();
    return half_from_disk(w).real();
}

Complex apply_half(const MoebiusMap& m, const Complex& z) {
    const double a = m.a.convert_to<double>(), b = m.b.convert_to<double>();
    const double c = m.c.convert_to<double>(), d = m.d.convert_to<double>();
    return (a * z + b) / (c * z + d);
}

double apply_real(const MoebiusMap& m, double x) {
    const double a = m.a.convert_to<double>(), b = m.b.convert_to<double>();
    const double c = m.c.convert_to<double>(), d = m.d.convert_to<double>();
    if (std::isinf(x)) {
        if (c == 0.0) return std::numeric_limits<double>::infinity();
        return a / c;
    }
    const double den = c * x + d;
    if (den == 0.0) return std::numeric_limits<double>::infinity();
    return (a * x + b) / den;
}

}  // namespace

BoundaryMap boundary_identity() {
    return [](const Complex& w) { return w; };
}

BoundaryMap boundary_of(const MoebiusMap& m) {
    return [m](const Complex& w) { return circle_point(apply_real(m, half_coordinate(w))); };
}

BoundaryMap boundary_of(const IntervalMap& im, double delta) {
    return [im, delta](const Complex& w) {
        const auto [lo, hi] = im(half_coordinate(w), delta);
        if (lo == hi) return circle_point(lo);
        const double mid = std::arg(circle_point(hi)) + 0.5 * arc_width(lo, hi);
        return std::polar(1.0, mid);
    };
}

IntervalMap interval_map(const CharMap& h) {
    return [h](double x, double delta) { return h.eval_interval(x, delta); };
}

DEResult de_extend(const BoundaryMap& f, const Complex& z, const DEParams& p) {
    if (std::abs(z) >= 1.0)
        throw std::invalid_argument("de_extend: point must be inside the disk");
    const int n = p.quad_nodes;
    std::vector<Complex> v(static_cast<size_t>(n));
    Complex mean(0.0, 0.0);
    for (int j = 0; j < n; ++j) {
        const Complex zeta = std::polar(1.0, kTwoPi * j / n);
        const Complex node = (zeta + z) / (1.0 + std::conj(z) * zeta);
        Complex val = f(node);
        val /= std::abs(val);  // keep the value exactly on the circle
        v[static_cast<size_t>(j)] = val;
        mean += val;
    }
    Complex w = mean / static_cast<double>(n);
    if (std::abs(w) > 0.999) w *= 0.999 / std::abs(w);

    const auto residual = [&](const Complex& at, Complex& A, Complex& B) {
        Complex F(0.0, 0.0);
        A = B = Complex(0.0, 0.0);
        for (const Complex& vj : v) {
            const Complex den = 1.0 - std::conj(at) * vj;
            F += (vj - at) / den;
            A -= 1.0 / den;
            B += (vj - at) * vj / (den * den);
        }
        F /= static_cast<double>(n);
        A /= static_cast<double>(n);
        B /= static_cast<double>(n);
        return F;
    };

    for (int iter = 0; iter < p.newton_max_iter; ++iter) {
        Complex A, B;
        const Complex F = residual(w, A, B);
        if (std::abs(F) < p.newton_tol) return {w, true};
        const double det = std::norm(A) - std::norm(B);
        if (!(std::abs(det) > 0)) break;
        const Complex step = (B * std::conj(F) - std::conj(A) * F) / det;
        double s = 1.0;
        while (std::abs(w + s * step) >= 1.0 - 1e-12 && s > 1e-8) s *= 0.5;
        if (s <= 1e-8) break;
        w += s * step;
    }
    Complex A, B;
    const bool ok = std::abs(residual(w, A, B)) < p.newton_tol;
    return {w, ok};
}

BeltramiSample beltrami_at(const BoundaryMap& f, const Complex& z, const DEParams& p) {
    const double e = p.fd_step;
    if (std::abs(z) + e >= 1.0)
        throw std::invalid_argument("beltrami_at: no room for the stencil");
    const DEResult c0 = de_extend(f, z, p);
    const DEResult xp = de_extend(f, z + Complex(e, 0.0), p);
    const DEResult xm = de_extend(f, z - Complex(e, 0.0), p);
    const DEResult yp = de_extend(f, z + Complex(0.0, e), p);
    const DEResult ym = de_extend(f, z - Complex(0.0, e), p);

    const Complex dx = xp.w - xm.w;
    const Complex dy = yp.w - ym.w;
    const Complex d = (dx - Complex(0.0, 1.0) * dy) / (4.0 * e);
    const Complex dbar = (dx + Complex(0.0, 1.0) * dy) / (4.0 * e);

    BeltramiSample out;
    out.z = z;
    out.converged =
        c0.converged && xp.converged && xm.converged && yp.converged && ym.converged;
    out.mu = (std::abs(d) > 0) ? dbar / d : Complex(0.0, 0.0);
    return out;
}

std::vector<ProfilePoint> support_profile(const BoundaryMap& f,
                                          const std::vector<Complex>& points, int N,
                                          const std::vector<Complex>& orbit,
                                          const DEParams& p) {
    if (N < 1) throw std::invalid_argument("support_profile: N must be positive");
    std::vector<ProfilePoint> out;
    for (const Complex& z : points) {
        if (std::abs(z) > 0.999) continue;
        const BeltramiSample s = beltrami_at(f, z, p);
        ProfilePoint pt;
        pt.z = z;
        pt.abs_mu = std::abs(s.mu);
        pt.converged = s.converged;
        pt.in_V = s.converged && pt.abs_mu >= 1.0 / N;
        double best = std::numeric_limits<double>::infinity();
        for (const Complex& o : orbit) best = std::min(best, disk_distance(z, o));
        pt.orbit_distance = best;
        out.push_back(pt);
    }
    return out;
}

std::vector<Complex> orbit_points(const Subgroup& g, const Complex& z0_half, int word_len) {
    std::vector<MoebiusMap> gens = schreier_generators(g);
    const size_t base = gens.size();
    for (size_t i = 0; i < base; ++i) gens.push_back(gens[i].inverse());

    std::vector<MoebiusMap> frontier = {MoebiusMap::identity()};
    std::map<std::pair<long long, long long>, Complex> seen;
    const auto record = [&](const MoebiusMap& m) {
        const Complex z = disk_from_half(apply_half(m, z0_half));
        const auto key = std::make_pair(std::llround(z.real() * 1e9),
                                        std::llround(z.imag() * 1e9));
        seen.emplace(key, z);
    };
    record(MoebiusMap::identity());
    for (int l = 0; l < word_len && seen.size() < 2000; ++l) {
        std::vector<MoebiusMap> next;
        for (const MoebiusMap& m : frontier) {
            for (const MoebiusMap& x : gens) {
                MoebiusMap prod = m * x;
                record(prod);
                next.push_back(std::move(prod));
            }
        }
        frontier = std::move(next);
    }
    std::vector<Complex> out;
    out.reserve(seen.size());
    for (const auto& [key, z] : seen) out.push_back(z);
    return out;
}

}  // namespace whmap
