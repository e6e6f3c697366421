#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace downcite {

inline double mean(std::span<const double> xs) {
    if (xs.empty()) throw std::logic_error("mean of empty range");
    double s = 0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

/// Sample standard deviation (n-1 denominator). Needs at least two points.
inline double sample_stddev(std::span<const double> xs) {
    if (xs.size() < 2) throw std::logic_error("sample_stddev needs >= 2 points");
    double m = mean(xs);
    double ss = 0;
    for (double x : xs) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

/// Percentile of a sorted range, p in [0,1], linear interpolation between
/// order statistics: rank r = p*(n-1), value = x[lo] + (x[hi]-x[lo])*frac.
inline double percentile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw std::logic_error("percentile of empty range");
    if (p < 0.0 || p > 1.0) throw std::logic_error("percentile p outside [0,1]");
    const double rank = p * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(rank);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = rank - static_cast<double>(lo);
    return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

inline double percentile(std::vector<double> xs, double p) {
    std::sort(xs.begin(), xs.end());
    return percentile_sorted(xs, p);
}

inline double median(std::vector<double> xs) { return percentile(std::move(xs), 0.5); }

/// Pearson product-moment correlation. Two-pass, mean-centered.
/// nullopt when fewer than three pairs or either input has zero variance.
inline std::optional<double> pearson(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw std::logic_error("pearson: length mismatch");
    if (xs.size() < 3) return std::nullopt;
    const double mx = mean(xs);
    const double my = mean(ys);
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return std::nullopt;
    return sxy / std::sqrt(sxx * syy);
}

} // namespace downcite
