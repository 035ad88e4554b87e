#pragma once

#include "sinrldp/model.hpp"
#include "sinrldp/sampler.hpp"

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace sinrldp {

/// pi(r) = r^-alpha, or min(1, r^-alpha) when bounded at zero.
struct PathLoss {
    double alpha = 2.0;
    bool bounded_at_zero = true;

    double operator()(double distance) const;
};

double distance(const MarkedPoint& a, const MarkedPoint& b);

/// Undirected simple graph on sample indices, stored as sorted pairs (u < v).
class EdgeSet {
public:
    using Edge = std::pair<std::uint32_t, std::uint32_t>;

    EdgeSet() = default;
    /// Normalizes orientation, sorts and removes duplicates. Throws on self-loops.
    static EdgeSet from_pairs(std::vector<Edge> pairs);

    std::size_t size() const noexcept { return edges_.size(); }
    bool empty() const noexcept { return edges_.empty(); }
    bool contains(std::uint32_t u, std::uint32_t v) const;
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    auto begin() const noexcept { return edges_.begin(); }
    auto end() const noexcept { return edges_.end(); }

    /// True when every pair is a subset of `other`.
    bool subset_of(const EdgeSet& other) const;

    friend bool operator==(const EdgeSet&, const EdgeSet&) = default;

private:
    std::vector<Edge> edges_;
};

enum class GraphMode : std::uint8_t {
    quenched = 0,  ///< exact SINR threshold rule
    annealed = 1,  ///< independent Bernoulli edges with probability min(1, a t)
};

enum class LimitKind : std::uint8_t {
    none = 0,
    constant = 1,
    exp_distance = 2,  ///< exp(-rate * |a - b|)
    calibrated = 3,    ///< limit produced by threshold calibration at a reference distance
    custom = 4,        ///< user function; not serializable
};

/// The limit connectivity kernel t on pairs of marked points.
class LimitKernel {
public:
    using Fn = std::function<double(const MarkedPoint&, const MarkedPoint&)>;

    LimitKernel() = default;
    static LimitKernel constant(double value);
    static LimitKernel exp_distance(double rate);
    /// Limit of a^-1 T under thresholds calibrated so that at distance `reference_distance`
    /// lambda t_D = gamma log(lambda) + kappa. In the small-threshold regime lambda t_D scales
    /// as (d / d0)^alpha, so the limit is exp(-kappa) at d0, 0 beyond it and +inf inside it.
    static LimitKernel calibrated(double reference_distance, double kappa);
    static LimitKernel custom(Fn fn, bool mark_independent = false);

    double operator()(const MarkedPoint& a, const MarkedPoint& b) const;

    LimitKind kind() const noexcept { return kind_; }
    bool configured() const noexcept { return kind_ != LimitKind::none; }
    /// Value depends only on |a - b| (and not on marks).
    bool distance_only() const noexcept;
    bool mark_independent() const noexcept;
    /// Valid for distance_only() kernels.
    double of_distance(double d) const;
    double parameter(std::size_t i) const noexcept { return params_[i]; }

    friend bool operator==(const LimitKernel& a, const LimitKernel& b) {
        return a.kind_ == b.kind_ && a.params_[0] == b.params_[0] && a.params_[1] == b.params_[1] &&
               a.fn_ == b.fn_;
    }

private:
    LimitKind kind_ = LimitKind::none;
    double params_[2] = {0.0, 0.0};
    std::shared_ptr<const Fn> fn_;
    bool custom_mark_independent_ = false;
};

/// Evaluator bundle for the SINR connectivity functions t_D, T and the limit t.
struct ConnectivityKernel {
    ModelParams params;
    Domain domain;
    std::size_t quadrature_resolution = 32;  ///< midpoint nodes per axis
    GraphMode mode = GraphMode::quenched;
    LimitKernel limit;

    PathLoss path_loss() const { return {params.alpha, params.bounded_at_zero}; }
};

/// Signal from u received at v over noise plus zeta(l_v)-scaled interference from
/// every node other than u and v (or other than v when include_transmitter_in_interference).
/// Returns +inf when the denominator vanishes.
double sinr(const PointSample& sample, std::size_t u, std::size_t v, const ModelParams& params);

/// {u,v} is an edge iff sinr(u->v) >= iota(l_v) and sinr(v->u) >= iota(l_u).
EdgeSet build_quenched_graph(const PointSample& sample, const ModelParams& params, std::size_t threads = 1);

/// Midpoint quadrature against mu of the symmetric two-term SINR connectivity integrand.
double t_lambda_d(const ConnectivityKernel& kernel, const MarkedPoint& a, const MarkedPoint& b);

/// exp(-lambda t_D(a, b)); defined only for n0 == 0.
double t_big(const ConnectivityKernel& kernel, const MarkedPoint& a, const MarkedPoint& b, double lambda);

double t_limit(const ConnectivityKernel& kernel, const MarkedPoint& a, const MarkedPoint& b);

/// min(1, a_lambda t(a, b)).
double edge_probability(const ConnectivityKernel& kernel, const MarkedPoint& a, const MarkedPoint& b,
                        double a_lambda);

/// Includes each unordered pair independently with probability min(1, a_lambda t(u, v)),
/// a_lambda taken at kernel.params.lambda. Pairs are visited in (u < v) lexicographic order.
EdgeSet build_annealed_graph(const PointSample& sample, const ConnectivityKernel& kernel,
                             const ScalingSchedule& sched, std::uint64_t seed);

struct ThresholdCalibration {
    double lambda = 0.0;
    double threshold_scale = 0.0;  ///< common value of iota * zeta
    double target = 0.0;           ///< gamma log(lambda) + kappa
    double achieved = 0.0;         ///< lambda t_D at the reference distance
    bool converged = false;
};

/// Root-finds the mark-independent threshold product s = iota zeta such that
/// lambda t_D(d0) = gamma log(lambda) + kappa at reference distance d0.
ThresholdCalibration calibrate_thresholds(const ConnectivityKernel& kernel, const ScalingSchedule& sched,
                                          double lambda, double reference_distance, double kappa);

/// Copy of `kernel` with iota = s and zeta = 1.
ConnectivityKernel with_threshold_scale(ConnectivityKernel kernel, double s);

}  // namespace sinrldp
