#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace sinrldp {

/// Probability left above the default mark cap for exponential marks.
inline constexpr double kDefaultMarkTailMass = 1e-3;

/// Upper quantile of exponential(c) used as the default binning cap for marks.
double default_mark_cap(double c);

/// Axis-aligned box in R^d together with the mark truncation used for binning.
struct Domain {
    std::vector<double> lower{0.0, 0.0};
    std::vector<double> upper{1.0, 1.0};
    double mark_cap = 6.907755278982137;  // default_mark_cap(1.0)

    std::size_t dimension() const noexcept { return lower.size(); }
    double extent(std::size_t axis) const { return upper[axis] - lower[axis]; }
    double volume() const;
    bool contains(std::span<const double> x) const;

    static Domain unit_box(std::size_t dimension = 2, double c = 1.0);

    friend bool operator==(const Domain&, const Domain&) = default;
};

/// Mark-dependent threshold: either a constant, or a piecewise-constant table.
///
/// A table with edges e_0 < e_1 < ... < e_{k-2} and values v_0..v_{k-1} evaluates
/// to v_i on (e_{i-1}, e_i], with v_{k-1} on everything above the last edge.
class ThresholdFunction {
public:
    ThresholdFunction() = default;
    static ThresholdFunction constant(double value);
    static ThresholdFunction tabulated(std::vector<double> edges, std::vector<double> values);

    double operator()(double mark) const;
    bool is_constant() const noexcept { return edges_.empty(); }
    std::span<const double> edges() const noexcept { return edges_; }
    std::span<const double> values() const noexcept { return values_; }
    double min_value() const;

    friend bool operator==(const ThresholdFunction&, const ThresholdFunction&) = default;

private:
    std::vector<double> edges_;
    std::vector<double> values_{1.0};
};

/// Intensity density mu on the domain. The default is the uniform density 1/volume.
class SpatialDensity {
public:
    using Fn = std::function<double(std::span<const double>)>;

    SpatialDensity() = default;
    static SpatialDensity uniform() { return {}; }
    /// `sup_bound` must dominate `fn` on the domain; it drives rejection sampling.
    static SpatialDensity custom(Fn fn, double sup_bound, std::string name);

    bool is_uniform() const noexcept { return fn_ == nullptr; }
    double operator()(const Domain& domain, std::span<const double> x) const;
    double sup_bound(const Domain& domain) const;
    const std::string& name() const noexcept { return name_; }

    /// Midpoint-rule integral of the density over `domain` with `resolution` nodes per axis.
    double integrate(const Domain& domain, std::size_t resolution = 64) const;

    friend bool operator==(const SpatialDensity& a, const SpatialDensity& b) { return a.fn_ == b.fn_; }

private:
    std::shared_ptr<const Fn> fn_;
    double sup_bound_ = 0.0;
    std::string name_ = "uniform";
};

struct ModelParams {
    double lambda = 100.0;  ///< PPP intensity multiplier
    double c = 1.0;         ///< exponential mark rate (mean 1/c)
    double alpha = 2.0;     ///< path-loss exponent
    double n0 = 0.0;        ///< noise power
    ThresholdFunction iota = ThresholdFunction::constant(1.0);  ///< SINR threshold
    ThresholdFunction zeta = ThresholdFunction::constant(1.0);  ///< interference scaling
    SpatialDensity mu;
    bool bounded_at_zero = true;  ///< path loss min(1, r^-alpha) instead of r^-alpha
    bool include_transmitter_in_interference = false;

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// a(lambda) = lambda^-gamma_a. Sub-critical with a growing second speed needs 1 < gamma_a < 2.
struct ScalingSchedule {
    double gamma_a = 1.5;

    double a(double lambda) const;
    double speed1(double lambda) const { return lambda; }
    double speed2(double lambda) const { return lambda * lambda * a(lambda); }

    friend bool operator==(const ScalingSchedule&, const ScalingSchedule&) = default;
};

double a_of_lambda(const ScalingSchedule& sched, double lambda);

struct Violation {
    std::string field;
    std::string message;
};

struct ValidationResult {
    std::vector<Violation> violations;

    bool ok() const noexcept { return violations.empty(); }
    bool mentions(std::string_view message) const;
    std::string describe() const;
};

ValidationResult validate(const ModelParams& params, const Domain& domain, const ScalingSchedule& sched);

/// Throws ValidationError carrying `describe()` when validation fails.
void require_valid(const ModelParams& params, const Domain& domain, const ScalingSchedule& sched);

}  // namespace sinrldp
