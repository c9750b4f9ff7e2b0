#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "hgtpp/rng.hpp"

namespace hgtpp {

/// Conditional intensity t ↦ λ(t) ≥ 0 over t ≥ an anchor time.
class IntensityFn {
public:
    virtual ~IntensityFn() = default;

    virtual double operator()(double t) const = 0;

    /// ∫_a^b λ, when a closed form exists.
    virtual std::optional<double> integral(double /*a*/, double /*b*/) const { return std::nullopt; }

    /// Bound on λ over [from, to] given the history observed so far; required by thinning.
    virtual std::optional<double> upper_bound(double /*from*/, double /*to*/) const { return std::nullopt; }

    /// Informs history-dependent intensities that an event occurred at t.
    virtual void observe(double /*t*/) {}
};

class ConstantIntensity final : public IntensityFn {
public:
    explicit ConstantIntensity(double rate);
    double operator()(double) const override { return rate_; }
    std::optional<double> integral(double a, double b) const override { return rate_ * (b - a); }
    std::optional<double> upper_bound(double, double) const override { return rate_; }

private:
    double rate_;
};

/// λ(t) = α (t − anchor) for t ≥ anchor.
class RayleighIntensity final : public IntensityFn {
public:
    RayleighIntensity(double alpha, double anchor);
    double operator()(double t) const override;
    std::optional<double> integral(double a, double b) const override;
    std::optional<double> upper_bound(double from, double to) const override;

private:
    double alpha_;
    double anchor_;
};

/// Self-exciting intensity μ + α Σ_{t_i < t} exp(−β (t − t_i)); branching ratio α/β.
class HawkesIntensity final : public IntensityFn {
public:
    HawkesIntensity(double mu, double alpha, double beta);
    double operator()(double t) const override;
    std::optional<double> upper_bound(double from, double to) const override;
    void observe(double t) override;

    double branching_ratio() const noexcept { return alpha_ / beta_; }
    const std::vector<double>& history() const noexcept { return history_; }

private:
    double excitation_at(double t, bool inclusive) const;

    double mu_, alpha_, beta_;
    std::vector<double> history_;
};

/// Wraps an arbitrary callable; an optional constant bound enables thinning.
class FunctionIntensity final : public IntensityFn {
public:
    explicit FunctionIntensity(std::function<double(double)> fn, std::optional<double> bound = std::nullopt)
        : fn_(std::move(fn)), bound_(bound) {}
    double operator()(double t) const override { return fn_(t); }
    std::optional<double> upper_bound(double, double) const override { return bound_; }

private:
    std::function<double(double)> fn_;
    std::optional<double> bound_;
};

inline constexpr std::size_t kDefaultQuadraturePoints = 256;

/// exp(−∫_from^to λ); closed form when available, else trapezoidal with `quadrature_points` nodes.
double survival(const IntensityFn& intensity, double from, double to,
                std::size_t quadrature_points = kDefaultQuadraturePoints);

/// λ(t) · survival(anchor, t).
double event_probability(const IntensityFn& intensity, double t, double anchor,
                         std::size_t quadrature_points = kDefaultQuadraturePoints);

/// N uniform draws on [a, b], sorted ascending.
std::vector<double> sorted_uniform_samples(double a, double b, std::size_t n, Rng& rng);

/// Σ_{j≥2} (s_j − s_{j−1}) λ(s_j) over sorted samples.
template <class F>
double mc_survival_sum(std::span<const double> samples, F&& lambda) {
    double acc = 0.0;
    for (std::size_t j = 1; j < samples.size(); ++j) acc += (samples[j] - samples[j - 1]) * lambda(samples[j]);
    return acc;
}

/// Monte-Carlo estimate of ∫_{t_prev}^{t_i} λ from N sorted uniform samples.
double mc_log_survival(const IntensityFn& intensity, double t_prev, double t_i, std::size_t n, Rng& rng);

/// Mean first-event time under λ(t) = α (t − t_p): √(π / (2α)).
double rayleigh_expected_duration(double alpha);

/// Trapezoidal E[t − anchor] under p(t) = λ(t) S(t), truncated at
/// anchor + horizon_factor · time_unit and renormalized by the window mass.
double expected_duration_numeric(const IntensityFn& intensity, double anchor, double horizon_factor, std::size_t grid,
                                 double time_unit = 1.0);

/// Same estimate from intensities sampled on the uniform grid anchor + k·step.
double expected_duration_from_grid(std::span<const double> lambda, double step);

/// Ogata thinning over [from, to]; calls intensity.observe() on every accepted event.
std::vector<double> simulate_thinning(IntensityFn& intensity, double from, double to, Rng& rng);

}  // namespace hgtpp
