#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "downcite/profiles.hpp"
#include "downcite/records.hpp"

namespace downcite {

/// Parameters of the two-factor download decay model
///   rho(t) = rho0 * (A * exp(-b1 t) + (1 - A) * exp(-b2 t))
/// with A in [0,1] and b1, b2 > 0. The fast factor captures novelty-driven
/// downloads, the slow one archival interest. Canonical order is
/// decay_fast >= decay_slow; the (A,b1) <-> (1-A,b2) relabeling leaves the
/// model pointwise unchanged.
struct DecayModelParams {
    double rho0 = 0;
    double weight_a = 0;   // A
    double decay_fast = 0; // b1, per month
    double decay_slow = 0; // b2, per month
    double residual_ss = std::numeric_limits<double>::quiet_NaN();
    bool converged = false;
    int iterations = 0;
    bool degenerate = false; // the two rates collapsed onto each other
};

inline double eval_model(const DecayModelParams& p, double age) {
    return p.rho0 * (p.weight_a * std::exp(-p.decay_fast * age) +
                     (1.0 - p.weight_a) * std::exp(-p.decay_slow * age));
}

struct FitConfig {
    int max_iterations = 200;
    double convergence_tol = 1e-10; // on relative residual change
    std::vector<double> a_starts = {0.3, 0.6, 0.9};
    std::vector<double> b1_starts = {0.2, 0.5, 1.0};
    std::vector<double> b2_starts = {0.005, 0.02, 0.05};

    void validate() const {
        if (convergence_tol <= 0) throw InputError("convergence_tol must be positive");
        if (max_iterations < 1) throw InputError("max_iterations must be >= 1");
        if (a_starts.empty() || b1_starts.empty() || b2_starts.empty())
            throw InputError("multistart grids must be non-empty");
    }
};

/// One observed (age, density) point.
struct DensityObservation {
    double age;
    double rho;
};

inline std::vector<DensityObservation> observations(const DensitySeries& series) {
    std::vector<DensityObservation> pts;
    pts.reserve(series.points.size());
    for (const auto& p : series.points) pts.push_back({static_cast<double>(p.age), p.rho});
    return pts;
}

/// Sum of squared residuals of the model against the observations.
inline double model_objective(const DecayModelParams& p, std::span<const DensityObservation> pts) {
    double ss = 0;
    for (const auto& obs : pts) {
        const double r = obs.rho - eval_model(p, obs.age);
        ss += r * r;
    }
    return ss;
}

/// Analytic gradient of the objective in the natural parameter space
/// (rho0, A, b1, b2). dS/dp = -2 sum r_t df/dp.
inline std::array<double, 4> model_objective_gradient(const DecayModelParams& p,
                                                      std::span<const DensityObservation> pts) {
    std::array<double, 4> g{0, 0, 0, 0};
    for (const auto& obs : pts) {
        const double e1 = std::exp(-p.decay_fast * obs.age);
        const double e2 = std::exp(-p.decay_slow * obs.age);
        const double f = p.rho0 * (p.weight_a * e1 + (1.0 - p.weight_a) * e2);
        const double r = obs.rho - f;
        g[0] += -2.0 * r * (p.weight_a * e1 + (1.0 - p.weight_a) * e2);
        g[1] += -2.0 * r * p.rho0 * (e1 - e2);
        g[2] += -2.0 * r * (-p.rho0 * p.weight_a * obs.age * e1);
        g[3] += -2.0 * r * (-p.rho0 * (1.0 - p.weight_a) * obs.age * e2);
    }
    return g;
}

namespace detail {

// Box constraints are enforced by smooth reparameterization:
//   rho0 = exp(r), A = sigmoid(u), b1 = exp(v), b2 = exp(w)
// so every iterate is feasible by construction.
struct FitTheta {
    double r, u, v, w;
};

inline double sigmoid(double u) { return 1.0 / (1.0 + std::exp(-u)); }

inline DecayModelParams theta_to_params(const FitTheta& t) {
    DecayModelParams p;
    p.rho0 = std::exp(t.r);
    p.weight_a = sigmoid(t.u);
    p.decay_fast = std::exp(t.v);
    p.decay_slow = std::exp(t.w);
    return p;
}

/// Solves a 4x4 linear system in place; false when singular.
inline bool solve4(std::array<std::array<double, 4>, 4>& m, std::array<double, 4>& rhs,
                   std::array<double, 4>& out) {
    std::array<int, 4> perm = {0, 1, 2, 3};
    for (int col = 0; col < 4; ++col) {
        int pivot = col;
        for (int row = col + 1; row < 4; ++row)
            if (std::abs(m[perm[row]][col]) > std::abs(m[perm[pivot]][col])) pivot = row;
        std::swap(perm[col], perm[pivot]);
        const double diag = m[perm[col]][col];
        if (std::abs(diag) < 1e-300) return false;
        for (int row = col + 1; row < 4; ++row) {
            const double factor = m[perm[row]][col] / diag;
            for (int k = col; k < 4; ++k) m[perm[row]][k] -= factor * m[perm[col]][k];
            rhs[perm[row]] -= factor * rhs[perm[col]];
        }
    }
    for (int col = 3; col >= 0; --col) {
        double acc = rhs[perm[col]];
        for (int k = col + 1; k < 4; ++k) acc -= m[perm[col]][k] * out[k];
        out[col] = acc / m[perm[col]][col];
    }
    return true;
}

struct LmResult {
    FitTheta theta;
    double ss = std::numeric_limits<double>::infinity();
    bool converged = false;
    int iterations = 0;
};

/// Damped least squares on the reparameterized model. Steps that raise the
/// residual (or leave the feasible numeric range) are rejected with a larger
/// damping factor.
inline LmResult levenberg_marquardt(FitTheta theta, std::span<const DensityObservation> pts,
                                    const FitConfig& config) {
    const auto residual_ss = [&](const FitTheta& t) {
        return model_objective(theta_to_params(t), pts);
    };

    LmResult result;
    result.theta = theta;
    double ss = residual_ss(theta);
    double lambda = 1e-3;

    for (int iter = 0; iter < config.max_iterations; ++iter) {
        result.iterations = iter + 1;
        const DecayModelParams p = theta_to_params(theta);

        // Jacobian of the model wrt theta, via the chain rule
        std::array<std::array<double, 4>, 4> jtj{};
        std::array<double, 4> jtr{0, 0, 0, 0};
        for (const auto& obs : pts) {
            const double e1 = std::exp(-p.decay_fast * obs.age);
            const double e2 = std::exp(-p.decay_slow * obs.age);
            const double f = p.rho0 * (p.weight_a * e1 + (1.0 - p.weight_a) * e2);
            const double res = obs.rho - f;
            const std::array<double, 4> j = {
                f,                                                            // d f / d r
                p.rho0 * (e1 - e2) * p.weight_a * (1.0 - p.weight_a),         // d f / d u
                -p.rho0 * p.weight_a * obs.age * e1 * p.decay_fast,           // d f / d v
                -p.rho0 * (1.0 - p.weight_a) * obs.age * e2 * p.decay_slow,   // d f / d w
            };
            for (int a = 0; a < 4; ++a) {
                jtr[a] += j[a] * res;
                for (int b = 0; b < 4; ++b) jtj[a][b] += j[a] * j[b];
            }
        }

        bool stepped = false;
        for (int attempt = 0; attempt < 16 && !stepped; ++attempt) {
            auto damped = jtj;
            for (int a = 0; a < 4; ++a)
                damped[a][a] += lambda * std::max(jtj[a][a], 1e-12);
            auto rhs = jtr;
            std::array<double, 4> delta{};
            if (!solve4(damped, rhs, delta)) {
                lambda *= 10.0;
                continue;
            }
            FitTheta trial{theta.r + delta[0], theta.u + delta[1], theta.v + delta[2],
                           theta.w + delta[3]};
            // keep exp/sigmoid maps inside the numerically sane range
            if (std::abs(trial.r) > 300 || std::abs(trial.u) > 300 || std::abs(trial.v) > 300 ||
                std::abs(trial.w) > 300) {
                lambda *= 10.0;
                continue;
            }
            const double trial_ss = residual_ss(trial);
            if (std::isfinite(trial_ss) && trial_ss <= ss) {
                const double drop = ss - trial_ss;
                theta = trial;
                const bool done = drop <= config.convergence_tol * std::max(ss, 1e-300);
                ss = trial_ss;
                lambda = std::max(lambda * 0.3, 1e-12);
                stepped = true;
                if (done || ss <= 1e-300) {
                    result.theta = theta;
                    result.ss = ss;
                    result.converged = true;
                    return result;
                }
            } else {
                lambda *= 10.0;
            }
        }
        if (!stepped) {
            // damping exhausted: no downhill step exists at this scale
            result.theta = theta;
            result.ss = ss;
            result.converged = true;
            return result;
        }
    }

    result.theta = theta;
    result.ss = ss;
    result.converged = false;
    return result;
}

inline double logit(double a) {
    const double clamped = std::min(std::max(a, 1e-9), 1.0 - 1e-9);
    return std::log(clamped / (1.0 - clamped));
}

} // namespace detail

/// Relabels so that decay_fast >= decay_slow, swapping the weight
/// accordingly. The model value at every age is unchanged.
inline DecayModelParams canonicalize(DecayModelParams p) {
    if (p.decay_fast < p.decay_slow) {
        std::swap(p.decay_fast, p.decay_slow);
        p.weight_a = 1.0 - p.weight_a;
    }
    return p;
}

/// Least-squares fit of the decay model to an observed density series.
/// Multistart over a small grid of initial guesses; the lowest-residual
/// converged candidate wins, with a lexicographic tie-break on the canonical
/// parameters so reruns are deterministic.
inline DecayModelParams fit(std::span<const DensityObservation> pts, const FitConfig& config = {}) {
    config.validate();
    if (pts.size() < 5)
        throw InputError("fit needs at least 5 density points, got " + std::to_string(pts.size()));

    double rho0_init = pts.front().rho;
    for (const auto& obs : pts)
        if (obs.age < 1e-12) rho0_init = obs.rho;
    rho0_init = std::max(rho0_init, 1e-6);

    std::optional<DecayModelParams> best;
    auto better = [](const DecayModelParams& a, const DecayModelParams& b) {
        if (a.residual_ss != b.residual_ss) return a.residual_ss < b.residual_ss;
        const auto key = [](const DecayModelParams& p) {
            return std::array<double, 4>{p.rho0, p.weight_a, p.decay_fast, p.decay_slow};
        };
        return key(a) < key(b);
    };

    for (double a0 : config.a_starts) {
        for (double b1_0 : config.b1_starts) {
            for (double b2_0 : config.b2_starts) {
                detail::FitTheta start{std::log(rho0_init), detail::logit(a0), std::log(b1_0),
                                       std::log(b2_0)};
                const auto lm = detail::levenberg_marquardt(start, pts, config);
                DecayModelParams candidate = canonicalize(detail::theta_to_params(lm.theta));
                candidate.residual_ss = lm.ss;
                candidate.converged = lm.converged;
                candidate.iterations = lm.iterations;
                candidate.degenerate = std::abs(candidate.decay_fast - candidate.decay_slow) < 1e-4;
                if (!best || better(candidate, *best)) best = candidate;
            }
        }
    }
    return *best;
}

inline DecayModelParams fit(const DensitySeries& series, const FitConfig& config = {}) {
    const auto pts = observations(series);
    return fit(std::span<const DensityObservation>(pts), config);
}

/// Cumulative model mass over [0, x]; rho0 cancels in half-share ratios so
/// it is omitted. expm1 keeps tiny rates accurate.
inline double model_mass(const DecayModelParams& p, double x) {
    const auto term = [x](double weight, double rate) {
        return rate > 0 ? weight / rate * (-std::expm1(-rate * x)) : weight * x;
    };
    return term(p.weight_a, p.decay_fast) + term(1.0 - p.weight_a, p.decay_slow);
}

struct HalfShareAge {
    double continuous_months = 0; // bisected to 0.01-month resolution
    int months = 0;               // smallest whole month meeting the threshold
};

/// Smallest age x such that the model predicts half of all downloads within
/// the horizon go to papers aged <= x. Pass an infinite horizon for the
/// unbounded prediction.
inline HalfShareAge half_share_age(const DecayModelParams& p, double horizon_months) {
    if (!(horizon_months > 0)) throw InputError("horizon must be positive");
    if (!(p.decay_fast > 0) || !(p.decay_slow > 0) || p.weight_a < 0 || p.weight_a > 1)
        throw InputError("half_share_age: invalid model parameters");

    const bool unbounded = std::isinf(horizon_months);
    const double total = unbounded
                             ? p.weight_a / p.decay_fast + (1.0 - p.weight_a) / p.decay_slow
                             : model_mass(p, horizon_months);
    const double target = 0.5 * total;

    double hi = unbounded ? 1.0 : horizon_months;
    if (unbounded)
        while (model_mass(p, hi) < target) hi *= 2.0;
    double lo = 0.0;
    while (hi - lo > 0.01) {
        const double mid = 0.5 * (lo + hi);
        (model_mass(p, mid) >= target ? hi : lo) = mid;
    }

    HalfShareAge result;
    result.continuous_months = hi;
    result.months = static_cast<int>(std::ceil(hi - 1e-9));
    return result;
}

/// Per-age residual table for the fitted model.
struct FitReportRow {
    double age;
    double observed_rho;
    double fitted_rho;
    double residual;
};

struct FitReport {
    DecayModelParams params;
    std::vector<FitReportRow> rows;
    double residual_ss = 0; // recomputed from rows; equals params.residual_ss
};

inline FitReport model_report(const DecayModelParams& params,
                              std::span<const DensityObservation> pts) {
    FitReport report;
    report.params = params;
    report.rows.reserve(pts.size());
    double ss = 0;
    for (const auto& obs : pts) {
        const double fitted = eval_model(params, obs.age);
        const double residual = obs.rho - fitted;
        ss += residual * residual;
        report.rows.push_back({obs.age, obs.rho, fitted, residual});
    }
    report.residual_ss = ss;
    return report;
}

inline FitReport model_report(const DecayModelParams& params, const DensitySeries& series) {
    const auto pts = observations(series);
    return model_report(params, std::span<const DensityObservation>(pts));
}

} // namespace downcite
