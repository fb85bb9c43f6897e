#pragma once

// Asset price shocks. A positive draw is a price fall (a loss for holders).

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <boost/math/special_functions/beta.hpp>

#include "errors.hpp"
#include "random.hpp"

namespace anwser {

enum class ShockKind { two_sided_exponential, student_t };

inline std::string to_string(ShockKind k) {
    return k == ShockKind::two_sided_exponential ? "exponential" : "student_t";
}

/// Standard Student-t upper tail P(T > t) for t >= 0, via the regularized
/// incomplete beta function.
inline double student_t_tail(double t, double dof) {
    if (t < 0.0) return 1.0 - student_t_tail(-t, dof);
    if (t == 0.0) return 0.5;
    const double x = dof / (dof + t * t);
    return 0.5 * boost::math::ibeta(0.5 * dof, 0.5, x);
}

/// Upper quantile t with P(T > t) = p, 0 < p < 1/2, by bisection on the CDF.
inline double student_t_upper_quantile(double p, double dof) {
    if (!(p > 0.0 && p < 0.5)) throw ConfigError("tail probability must lie in (0, 1/2)");
    double lo = 0.0;
    double hi = 1.0;
    while (student_t_tail(hi, dof) > p) {
        lo = hi;
        hi *= 2.0;
    }
    for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (student_t_tail(mid, dof) > p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

struct ShockDistribution {
    ShockKind kind = ShockKind::two_sided_exponential;
    double rate = 1.0;   // lambda, exponential only
    double dof = 1.5;    // Student-t only
    double scale = 1.0;  // Student-t only

    static ShockDistribution exponential(double rate) {
        return {ShockKind::two_sided_exponential, rate, 0.0, 1.0};
    }
    static ShockDistribution student_t(double dof, double scale) {
        return {ShockKind::student_t, 0.0, dof, scale};
    }

    void validate() const {
        if (kind == ShockKind::two_sided_exponential && !(rate > 0.0))
            throw ConfigError("exponential shock rate must be > 0");
        if (kind == ShockKind::student_t && !(dof > 0.0 && scale > 0.0))
            throw ConfigError("Student-t shocks need dof > 0 and scale > 0");
    }

    /// P(v > x).
    double tail(double x) const {
        if (kind == ShockKind::two_sided_exponential)
            return x >= 0.0 ? 0.5 * std::exp(-rate * x) : 1.0 - 0.5 * std::exp(rate * x);
        return student_t_tail(x / scale, dof);
    }

    double draw(Rng& rng) const {
        if (kind == ShockKind::two_sided_exponential) {
            const double magnitude = -std::log(rng.uniform_open()) / rate;
            return rng.coin() ? magnitude : -magnitude;
        }
        // Bailey's polar method.
        double u, v, w;
        do {
            u = 2.0 * rng.uniform() - 1.0;
            v = 2.0 * rng.uniform() - 1.0;
            w = u * u + v * v;
        } while (w >= 1.0 || w == 0.0);
        return scale * u * std::sqrt(dof * (std::pow(w, -2.0 / dof) - 1.0) / w);
    }
};

inline std::vector<double> sample_shock(const ShockDistribution& dist, std::size_t n_assets, Rng& rng) {
    std::vector<double> v(n_assets);
    for (double& x : v) x = dist.draw(rng);
    return v;
}

inline std::vector<double> sample_shock(const ShockDistribution& dist, std::size_t n_assets,
                                        std::uint64_t seed) {
    Rng rng(seed);
    return sample_shock(dist, n_assets, rng);
}

/// Sets the exponential rate (or t scale) so that a bank fully invested in
/// one asset fails with probability p_target: P(v > gamma/(1-theta)) = p.
inline ShockDistribution calibrate_rate(ShockKind kind, double gamma, double theta, double p_target,
                                        double dof = 1.5) {
    if (!(p_target > 0.0 && p_target < 0.5)) throw ConfigError("p_target must lie in (0, 1/2)");
    const double threshold = gamma / (1.0 - theta);
    if (kind == ShockKind::two_sided_exponential)
        return ShockDistribution::exponential(std::log(1.0 / (2.0 * p_target)) / threshold);
    return ShockDistribution::student_t(dof, threshold / student_t_upper_quantile(p_target, dof));
}

}  // namespace anwser
