#include "hgtpp/tpp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hgtpp {

ConstantIntensity::ConstantIntensity(double rate) : rate_(rate) {
    if (!(rate >= 0.0) || !std::isfinite(rate)) throw std::invalid_argument("constant intensity must be finite and >= 0");
}

RayleighIntensity::RayleighIntensity(double alpha, double anchor) : alpha_(alpha), anchor_(anchor) {
    if (!(alpha >= 0.0)) throw std::invalid_argument("Rayleigh weight must be >= 0");
}

double RayleighIntensity::operator()(double t) const { return alpha_ * std::max(0.0, t - anchor_); }

std::optional<double> RayleighIntensity::integral(double a, double b) const {
    const double ea = std::max(0.0, a - anchor_);
    const double eb = std::max(0.0, b - anchor_);
    return 0.5 * alpha_ * (eb * eb - ea * ea);
}

std::optional<double> RayleighIntensity::upper_bound(double, double to) const { return (*this)(to); }

HawkesIntensity::HawkesIntensity(double mu, double alpha, double beta) : mu_(mu), alpha_(alpha), beta_(beta) {
    if (!(mu >= 0.0) || !(alpha >= 0.0) || !(beta > 0.0)) {
        throw std::invalid_argument("Hawkes parameters need mu >= 0, alpha >= 0, beta > 0");
    }
}

double HawkesIntensity::excitation_at(double t, bool inclusive) const {
    double s = 0.0;
    for (double ti : history_) {
        if (ti < t || (inclusive && ti == t)) s += std::exp(-beta_ * (t - ti));
    }
    return s;
}

double HawkesIntensity::operator()(double t) const { return mu_ + alpha_ * excitation_at(t, false); }

std::optional<double> HawkesIntensity::upper_bound(double from, double) const {
    // excitation decays between events, so the value just after `from` bounds the interval
    return mu_ + alpha_ * excitation_at(from, true);
}

void HawkesIntensity::observe(double t) { history_.push_back(t); }

namespace {

void check_interval(double from, double to, const char* what) {
    if (from > to) {
        throw std::invalid_argument(std::string(what) + ": interval start " + std::to_string(from) +
                                    " exceeds end " + std::to_string(to));
    }
}

double trapezoid_integral(const IntensityFn& f, double a, double b, std::size_t points) {
    if (points < 2) points = 2;
    const double h = (b - a) / static_cast<double>(points - 1);
    double acc = 0.5 * (f(a) + f(b));
    for (std::size_t k = 1; k + 1 < points; ++k) acc += f(a + h * static_cast<double>(k));
    return acc * h;
}

}  // namespace

double survival(const IntensityFn& intensity, double from, double to, std::size_t quadrature_points) {
    check_interval(from, to, "survival");
    if (from == to) return 1.0;
    const auto closed = intensity.integral(from, to);
    const double integral = closed ? *closed : trapezoid_integral(intensity, from, to, quadrature_points);
    return std::exp(-integral);
}

double event_probability(const IntensityFn& intensity, double t, double anchor, std::size_t quadrature_points) {
    return intensity(t) * survival(intensity, anchor, t, quadrature_points);
}

std::vector<double> sorted_uniform_samples(double a, double b, std::size_t n, Rng& rng) {
    std::vector<double> s(n);
    for (auto& x : s) x = rng.uniform(a, b);
    std::sort(s.begin(), s.end());
    return s;
}

double mc_log_survival(const IntensityFn& intensity, double t_prev, double t_i, std::size_t n, Rng& rng) {
    if (n < 2) throw std::invalid_argument("mc_log_survival: need at least 2 samples");
    if (!(t_prev < t_i)) throw std::invalid_argument("mc_log_survival: t_prev must precede t_i");
    const auto samples = sorted_uniform_samples(t_prev, t_i, n, rng);
    return mc_survival_sum(samples, [&](double t) { return intensity(t); });
}

double rayleigh_expected_duration(double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw std::invalid_argument("rayleigh_expected_duration: alpha must be positive");
    }
    return std::sqrt(std::numbers::pi / (2.0 * alpha));
}

double expected_duration_from_grid(std::span<const double> lambda, double step) {
    const std::size_t n = lambda.size();
    double cumulative = 0.0;
    double mass = 0.0;
    double moment = 0.0;
    double prev_p = lambda[0];  // S = 1 at the anchor
    double prev_tp = 0.0;
    for (std::size_t k = 1; k < n; ++k) {
        cumulative += 0.5 * step * (lambda[k - 1] + lambda[k]);
        const double p = lambda[k] * std::exp(-cumulative);
        const double tp = step * static_cast<double>(k) * p;
        mass += 0.5 * step * (prev_p + p);
        moment += 0.5 * step * (prev_tp + tp);
        prev_p = p;
        prev_tp = tp;
    }
    if (!(mass >= 1e-6)) {
        throw std::domain_error("expected duration: probability mass " + std::to_string(mass) +
                                " on the window is below 1e-6");
    }
    return moment / mass;
}

double expected_duration_numeric(const IntensityFn& intensity, double anchor, double horizon_factor, std::size_t grid,
                                 double time_unit) {
    if (grid < 16) throw std::invalid_argument("expected_duration_numeric: grid must be >= 16");
    if (!(horizon_factor > 0.0) || !(time_unit > 0.0)) {
        throw std::invalid_argument("expected_duration_numeric: horizon must be positive");
    }
    const double step = horizon_factor * time_unit / static_cast<double>(grid - 1);
    std::vector<double> lambda(grid);
    for (std::size_t k = 0; k < grid; ++k) lambda[k] = intensity(anchor + step * static_cast<double>(k));
    return expected_duration_from_grid(lambda, step);
}

std::vector<double> simulate_thinning(IntensityFn& intensity, double from, double to, Rng& rng) {
    check_interval(from, to, "simulate_thinning");
    std::vector<double> out;
    double t = from;
    while (true) {
        const auto bound = intensity.upper_bound(t, to);
        if (!bound) throw std::invalid_argument("simulate_thinning: intensity declares no upper bound");
        if (!(*bound > 0.0)) break;
        t += rng.exponential(*bound);
        if (t > to) break;
        if (rng.uniform() * *bound <= intensity(t)) {
            out.push_back(t);
            intensity.observe(t);
        }
    }
    return out;
}

}  // namespace hgtpp
