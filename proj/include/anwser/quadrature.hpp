#pragma once

// Integration of the product two-sided exponential density over regions of
// the (v1, v2) plane that are unions of convex half-plane intersections.
// For fixed v1 the slice of a convex piece is one v2 interval whose mass is
// exact via the CDF; the outer v1 integral is adaptive Gauss-Kronrod.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "errors.hpp"

namespace anwser {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
};

/// Globally adaptive 7/15-point Gauss-Kronrod on [a, b] with optional
/// interior breakpoints. Stops when the summed error estimate is below tol.
inline QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                     std::vector<double> breakpoints, double tol,
                                     std::size_t max_intervals = 4000) {
    static constexpr std::array<double, 8> xk = {
        0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
        0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
        0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
        0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
    static constexpr std::array<double, 8> wk = {
        0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
        0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
        0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
        0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
    static constexpr std::array<double, 4> wg = {
        0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
        0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

    struct Segment {
        double lo, hi, value, error;
        bool operator<(const Segment& o) const { return error < o.error; }
    };

    auto rule = [&](double lo, double hi) {
        const double c = 0.5 * (lo + hi);
        const double h = 0.5 * (hi - lo);
        const double fc = f(c);
        double kron = wk[7] * fc;
        double gauss = wg[3] * fc;
        for (int j = 0; j < 7; ++j) {
            const double fsum = f(c - h * xk[j]) + f(c + h * xk[j]);
            kron += wk[j] * fsum;
            if (j % 2 == 1) gauss += wg[j / 2] * fsum;
        }
        return Segment{lo, hi, kron * h, std::abs((kron - gauss) * h)};
    };

    std::sort(breakpoints.begin(), breakpoints.end());
    std::vector<double> cuts{a};
    for (double p : breakpoints)
        if (p > cuts.back() && p < b) cuts.push_back(p);
    cuts.push_back(b);

    std::priority_queue<Segment> heap;
    double value = 0.0;
    double error = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        auto s = rule(cuts[i], cuts[i + 1]);
        value += s.value;
        error += s.error;
        heap.push(s);
    }
    while (error > tol && heap.size() < max_intervals) {
        auto worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (!(mid > worst.lo && mid < worst.hi)) {
            heap.push(worst);
            break;
        }
        auto left = rule(worst.lo, mid);
        auto right = rule(mid, worst.hi);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // Re-sum to drop accumulated update drift.
    value = 0.0;
    error = 0.0;
    while (!heap.empty()) {
        value += heap.top().value;
        error += heap.top().error;
        heap.pop();
    }
    return {value, error};
}

/// a*v1 + b*v2 > c. Strictness is irrelevant for probabilities.
struct HalfPlane {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;

    HalfPlane complement() const { return {-a, -b, -c}; }
};

using ConvexPiece = std::vector<HalfPlane>;

/// Union of pieces; the caller guarantees the pieces do not overlap.
using Region = std::vector<ConvexPiece>;

/// Two-sided exponential density (lambda/2) e^{-lambda |v|}.
struct LaplaceLaw {
    double rate = 1.0;

    double density(double v) const { return 0.5 * rate * std::exp(-rate * std::abs(v)); }
    double cdf(double v) const { return v <= 0.0 ? 0.5 * std::exp(rate * v) : 1.0 - 0.5 * std::exp(-rate * v); }
    double survival(double v) const { return v >= 0.0 ? 0.5 * std::exp(-rate * v) : 1.0 - 0.5 * std::exp(rate * v); }

    /// P(lo < v < hi) without cancellation in either tail.
    double mass(double lo, double hi) const {
        if (!(hi > lo)) return 0.0;
        if (lo >= 0.0) return survival(lo) - (std::isinf(hi) ? 0.0 : survival(hi));
        if (hi <= 0.0) return (std::isinf(hi) ? 1.0 : cdf(hi)) - (std::isinf(lo) ? 0.0 : cdf(lo));
        return 1.0 - (std::isinf(lo) ? 0.0 : cdf(lo)) - (std::isinf(hi) ? 0.0 : survival(hi));
    }
};

namespace detail {

// Probability mass of the v2-slice of a convex piece at fixed v1.
inline double slice_mass(const ConvexPiece& piece, double v1, const LaplaceLaw& law) {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (const auto& h : piece) {
        if (h.b == 0.0) {
            if (!(h.a * v1 > h.c)) return 0.0;
        } else if (h.b > 0.0) {
            lo = std::max(lo, (h.c - h.a * v1) / h.b);
        } else {
            hi = std::min(hi, (h.c - h.a * v1) / h.b);
        }
    }
    return law.mass(lo, hi);
}

// v1 positions where the slice integrand has a kink or jump.
inline std::vector<double> region_breakpoints(const Region& region) {
    std::vector<double> pts{0.0};
    for (const auto& piece : region) {
        for (std::size_t i = 0; i < piece.size(); ++i) {
            const auto& p = piece[i];
            if (p.b == 0.0) {
                if (p.a != 0.0) pts.push_back(p.c / p.a);
                continue;
            }
            if (p.a != 0.0) pts.push_back(p.c / p.a);  // boundary crosses v2 = 0
            for (std::size_t j = i + 1; j < piece.size(); ++j) {
                const auto& q = piece[j];
                if (q.b == 0.0) continue;
                const double det = p.a * q.b - q.a * p.b;
                if (std::abs(det) > 1e-300) pts.push_back((p.c * q.b - q.c * p.b) / det);
            }
        }
    }
    return pts;
}

}  // namespace detail

/// Integral of P(v1) P(v2) over the region on [-V, V] x R with V = 40/lambda.
/// The reported error adds the truncation bound 4 e^{-lambda V}.
inline QuadResult region_probability(const Region& region, double rate) {
    if (!(rate > 0.0)) throw ConfigError("shock rate must be > 0");
    const LaplaceLaw law{rate};
    const double span = 40.0 / rate;
    auto integrand = [&](double v1) {
        double s = 0.0;
        for (const auto& piece : region) s += detail::slice_mass(piece, v1, law);
        return law.density(v1) * s;
    };
    auto result = integrate_adaptive(integrand, -span, span, detail::region_breakpoints(region), 1e-13);
    result.error += 4.0 * std::exp(-rate * span);
    if (result.error > 1e-7)
        throw NonConvergence("region quadrature error estimate " + std::to_string(result.error));
    return result;
}

}  // namespace anwser
