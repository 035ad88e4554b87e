#include "sinrldp/connectivity.hpp"

#include "sinrldp/errors.hpp"
#include "sinrldp/parallel.hpp"
#include "sinrldp/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace sinrldp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDistanceMatchTolerance = 1e-9;

}  // namespace

double PathLoss::operator()(double r) const {
    if (r <= 0.0) {
        if (!bounded_at_zero) {
            throw SingularityError("coincident points with unbounded path loss");
        }
        return 1.0;
    }
    const double v = std::pow(r, -alpha);
    return bounded_at_zero ? std::min(1.0, v) : v;
}

double distance(const MarkedPoint& a, const MarkedPoint& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.location.size(); ++i) {
        const double d = a.location[i] - b.location[i];
        s += d * d;
    }
    return std::sqrt(s);
}

EdgeSet EdgeSet::from_pairs(std::vector<Edge> pairs) {
    for (auto& e : pairs) {
        if (e.first == e.second) {
            throw ValidationError("self-loop in edge list");
        }
        if (e.first > e.second) {
            std::swap(e.first, e.second);
        }
    }
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    EdgeSet out;
    out.edges_ = std::move(pairs);
    return out;
}

bool EdgeSet::contains(std::uint32_t u, std::uint32_t v) const {
    if (u > v) {
        std::swap(u, v);
    }
    return std::binary_search(edges_.begin(), edges_.end(), Edge{u, v});
}

bool EdgeSet::subset_of(const EdgeSet& other) const {
    return std::includes(other.edges_.begin(), other.edges_.end(), edges_.begin(), edges_.end());
}

LimitKernel LimitKernel::constant(double value) {
    LimitKernel k;
    k.kind_ = LimitKind::constant;
    k.params_[0] = value;
    return k;
}

LimitKernel LimitKernel::exp_distance(double rate) {
    LimitKernel k;
    k.kind_ = LimitKind::exp_distance;
    k.params_[0] = rate;
    return k;
}

LimitKernel LimitKernel::calibrated(double reference_distance, double kappa) {
    LimitKernel k;
    k.kind_ = LimitKind::calibrated;
    k.params_[0] = reference_distance;
    k.params_[1] = kappa;
    return k;
}

LimitKernel LimitKernel::custom(Fn fn, bool mark_independent) {
    LimitKernel k;
    k.kind_ = LimitKind::custom;
    k.fn_ = std::make_shared<const Fn>(std::move(fn));
    k.custom_mark_independent_ = mark_independent;
    return k;
}

bool LimitKernel::distance_only() const noexcept {
    return kind_ == LimitKind::constant || kind_ == LimitKind::exp_distance || kind_ == LimitKind::calibrated;
}

bool LimitKernel::mark_independent() const noexcept {
    return distance_only() || (kind_ == LimitKind::custom && custom_mark_independent_);
}

double LimitKernel::of_distance(double d) const {
    switch (kind_) {
    case LimitKind::constant:
        return params_[0];
    case LimitKind::exp_distance:
        return std::exp(-params_[0] * d);
    case LimitKind::calibrated: {
        const double d0 = params_[0];
        if (std::fabs(d - d0) <= kDistanceMatchTolerance * d0) {
            return std::exp(-params_[1]);
        }
        return d > d0 ? 0.0 : kInf;
    }
    default:
        throw ModeError("limit kernel is not a function of distance only");
    }
}

double LimitKernel::operator()(const MarkedPoint& a, const MarkedPoint& b) const {
    if (kind_ == LimitKind::none) {
        throw ModeError("limit kernel t is not configured");
    }
    if (kind_ == LimitKind::custom) {
        return (*fn_)(a, b);
    }
    if (kind_ == LimitKind::constant) {
        return params_[0];
    }
    return of_distance(distance(a, b));
}

double sinr(const PointSample& sample, std::size_t u, std::size_t v, const ModelParams& params) {
    const auto& pts = sample.points;
    if (u == v || u >= pts.size() || v >= pts.size()) {
        throw ValidationError("sinr needs two distinct valid indices");
    }
    const PathLoss pl{params.alpha, params.bounded_at_zero};
    const double signal = pts[u].mark * pl(distance(pts[u], pts[v]));
    double interference = 0.0;
    for (std::size_t w = 0; w < pts.size(); ++w) {
        if (w == v || (w == u && !params.include_transmitter_in_interference)) {
            continue;
        }
        interference += pts[w].mark * pl(distance(pts[w], pts[v]));
    }
    const double denom = params.n0 + params.zeta(pts[v].mark) * interference;
    if (denom == 0.0) {
        return signal > 0.0 ? kInf : 0.0;
    }
    return signal / denom;
}

EdgeSet build_quenched_graph(const PointSample& sample, const ModelParams& params, std::size_t threads) {
    const auto& pts = sample.points;
    const std::size_t n = pts.size();
    if (n < 2) {
        return {};
    }
    const PathLoss pl{params.alpha, params.bounded_at_zero};

    // received[w * n + v] = l_w pi(|w - v|); total[v] sums it over w != v.
    std::vector<double> received(n * n, 0.0);
    std::vector<double> total(n, 0.0);
    parallel_for(n, threads, [&](std::size_t v) {
        double s = 0.0;
        for (std::size_t w = 0; w < n; ++w) {
            if (w == v) {
                continue;
            }
            const double r = pts[w].mark * pl(distance(pts[w], pts[v]));
            received[w * n + v] = r;
            s += r;
        }
        total[v] = s;
    });

    auto link_ok = [&](std::size_t u, std::size_t v) {
        const double signal = received[u * n + v];
        const double interference =
            params.include_transmitter_in_interference ? total[v] : std::max(0.0, total[v] - signal);
        const double denom = params.n0 + params.zeta(pts[v].mark) * interference;
        const double ratio = denom == 0.0 ? (signal > 0.0 ? kInf : 0.0) : signal / denom;
        return ratio >= params.iota(pts[v].mark);
    };

    std::vector<std::vector<EdgeSet::Edge>> rows(n);
    parallel_for(n, threads, [&](std::size_t u) {
        for (std::size_t v = u + 1; v < n; ++v) {
            if (link_ok(u, v) && link_ok(v, u)) {
                rows[u].emplace_back(static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v));
            }
        }
    });
    std::vector<EdgeSet::Edge> all;
    for (auto& r : rows) {
        all.insert(all.end(), r.begin(), r.end());
    }
    return EdgeSet::from_pairs(std::move(all));
}

double t_lambda_d(const ConnectivityKernel& kernel, const MarkedPoint& a, const MarkedPoint& b) {
    const Domain& dom = kernel.domain;
    const std::size_t d = dom.dimension();
    const std::size_t q = kernel.quadrature_resolution;
    const double sep = distance(a, b);
    if (sep <= 0.0) {
        throw ValidationError("t_lambda_d needs distinct locations");
    }
    const double alpha = kernel.params.alpha;
    const double sa = kernel.params.iota(a.mark) * kernel.params.zeta(a.mark);
    const double sb = kernel.params.iota(b.mark) * kernel.params.zeta(b.mark);
    if (sa == 0.0 && sb == 0.0) {
        return 0.0;
    }
    const double sep_alpha = std::pow(sep, alpha);

    std::size_t nodes = 1;
    double cell = dom.volume();
    for (std::size_t i = 0; i < d; ++i) {
        nodes *= q;
        cell /= static_cast<double>(q);
    }
    std::vector<double> r(d);
    double sum = 0.0;
    for (std::size_t n = 0; n < nodes; ++n) {
        std::size_t rest = n;
        double norm2 = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            const std::size_t k = rest % q;
            rest /= q;
            r[i] = dom.lower[i] + (static_cast<double>(k) + 0.5) * dom.extent(i) / static_cast<double>(q);
            norm2 += r[i] * r[i];
        }
        // s / (s + |r|^a / |a-b|^a) written as s |a-b|^a / (s |a-b|^a + |r|^a).
        const double ra = std::pow(norm2, 0.5 * alpha);
        auto term = [&](double s) {
            if (s == 0.0) {
                return 0.0;
            }
            const double num = s * sep_alpha;
            return num / (num + ra);
        };
        const double value = (term(sa) + term(sb)) * kernel.params.mu(dom, r);
        if (!std::isfinite(value)) {
            std::ostringstream msg;
            msg << "non-finite t_lambda_d integrand at quadrature node " << n;
            throw QuadratureError(msg.str());
        }
        sum += value;
    }
    return sum * cell;
}

double t_big(const ConnectivityKernel& kernel, const MarkedPoint& a, const MarkedPoint& b, double lambda) {
    if (kernel.params.n0 != 0.0) {
        throw ModeError("T^lambda is defined only for n0 = 0");
    }
    const double v = std::exp(-lambda * t_lambda_d(kernel, a, b));
    return std::clamp(v, 0.0, 1.0);
}

double t_limit(const ConnectivityKernel& kernel, const MarkedPoint& a, const MarkedPoint& b) {
    return kernel.limit(a, b);
}

double edge_probability(const ConnectivityKernel& kernel, const MarkedPoint& a, const MarkedPoint& b,
                        double a_lambda) {
    const double t = kernel.limit(a, b);
    if (!(t > 0.0)) {
        return 0.0;
    }
    return std::min(1.0, a_lambda * t);
}

EdgeSet build_annealed_graph(const PointSample& sample, const ConnectivityKernel& kernel,
                             const ScalingSchedule& sched, std::uint64_t seed) {
    if (!kernel.limit.configured()) {
        throw ModeError("annealed graph needs a configured limit kernel t");
    }
    const auto& pts = sample.points;
    const std::size_t n = pts.size();
    const double a_lambda = sched.a(kernel.params.lambda);
    Rng rng(derive_seed(seed, "edges"));

    const bool constant = kernel.limit.kind() == LimitKind::constant;
    const double p_const = constant ? std::min(1.0, a_lambda * std::max(0.0, kernel.limit.parameter(0))) : 0.0;

    std::vector<EdgeSet::Edge> edges;
    for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t v = u + 1; v < n; ++v) {
            const double p = constant ? p_const : edge_probability(kernel, pts[u], pts[v], a_lambda);
            if (rng.uniform() < p) {
                edges.emplace_back(static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v));
            }
        }
    }
    return EdgeSet::from_pairs(std::move(edges));
}

ConnectivityKernel with_threshold_scale(ConnectivityKernel kernel, double s) {
    kernel.params.iota = ThresholdFunction::constant(s);
    kernel.params.zeta = ThresholdFunction::constant(1.0);
    return kernel;
}

ThresholdCalibration calibrate_thresholds(const ConnectivityKernel& kernel, const ScalingSchedule& sched,
                                          double lambda, double reference_distance, double kappa) {
    ThresholdCalibration out;
    out.lambda = lambda;
    out.target = sched.gamma_a * std::log(lambda) + kappa;

    // Probe pair along the first axis from the lower corner.
    MarkedPoint a;
    a.location = kernel.domain.lower;
    a.mark = 1.0;
    MarkedPoint b = a;
    b.location[0] += reference_distance;

    auto scaled = [&](double log_s) {
        return lambda * t_lambda_d(with_threshold_scale(kernel, std::exp(log_s)), a, b);
    };
    // lambda t_D is increasing in s; bisect in log s.
    double lo = -700.0;
    double hi = 700.0;
    if (!(scaled(lo) < out.target && scaled(hi) > out.target)) {
        return out;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
        const double mid = 0.5 * (lo + hi);
        (scaled(mid) < out.target ? lo : hi) = mid;
    }
    const double log_s = 0.5 * (lo + hi);
    out.threshold_scale = std::exp(log_s);
    out.achieved = scaled(log_s);
    out.converged = std::fabs(out.achieved - out.target) <= 1e-8 * std::max(1.0, std::fabs(out.target));
    return out;
}

}  // namespace sinrldp
