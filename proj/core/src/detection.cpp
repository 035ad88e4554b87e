#include "sinrldp/detection.hpp"

#include "sinrldp/errors.hpp"
#include "sinrldp/information.hpp"
#include "sinrldp/parallel.hpp"
#include "sinrldp/random.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sinrldp {

std::size_t EstimatedModel::masked_count() const {
    return static_cast<std::size_t>(std::count(masked.begin(), masked.end(), std::uint8_t{1}));
}

EstimatedModel estimate(std::span<const SinrRealization> replicates, const BinGrid& grid) {
    if (replicates.empty()) {
        throw ValidationError("estimate needs at least one replicate");
    }
    const NetworkModel& ref = replicates.front().model;
    for (const auto& y : replicates) {
        if (!(y.model.params == ref.params) || !(y.model.domain == ref.domain) ||
            y.model.sched.gamma_a != ref.sched.gamma_a) {
            throw ValidationError("replicates must share parameters, domain and schedule");
        }
    }
    const double lambda = ref.params.lambda;
    const double a_lambda = ref.a_lambda();
    const std::size_t n = grid.cell_count();

    // Accumulate integer counts and divide once so k = 1 reproduces M1 and M2 exactly.
    std::vector<std::uint64_t> c1(n, 0);
    std::vector<std::uint64_t> c2(n * n, 0);
    std::vector<std::size_t> cell;
    for (const auto& y : replicates) {
        cell.resize(y.sample.size());
        for (std::size_t i = 0; i < y.sample.size(); ++i) {
            cell[i] = grid.cell_of(y.sample.points[i]);
            ++c1[cell[i]];
        }
        for (const auto& [u, v] : y.edges) {
            ++c2[cell[u] * n + cell[v]];
            ++c2[cell[v] * n + cell[u]];
        }
    }
    const double k = static_cast<double>(replicates.size());
    EstimatedModel out;
    out.grid = grid;
    out.k_used = replicates.size();
    out.model = ref;
    out.beta_hat = BinnedMeasure(grid);
    BinnedPairMeasure m2bar(grid);
    for (std::size_t i = 0; i < n; ++i) {
        out.beta_hat.weights[i] = static_cast<double>(c1[i]) / (k * lambda);
    }
    const double norm = k * lambda * lambda * a_lambda;
    for (std::size_t i = 0; i < n * n; ++i) {
        m2bar.weights[i] = static_cast<double>(c2[i]) / norm;
    }
    out.t_hat = ratio_kernel(m2bar, out.beta_hat);
    out.masked.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        out.masked[i] = out.beta_hat.weights[i] > 0.0 ? 0 : 1;
    }
    return out;
}

StatisticParts test_statistic_parts(const SinrRealization& y, const EstimatedModel& model,
                                    const ScalingSchedule& sched) {
    const double lambda = model.lambda();
    const double a_lambda = sched.a(lambda);
    const auto my1 = m1(y.sample, model.grid, lambda);
    const auto my2 = m2(y.sample, y.edges, model.grid, lambda, a_lambda);
    StatisticParts parts;
    // Poisson form H + |beta_hat| - |M1|.
    const double h1 = rel_entropy(my1, model.beta_hat);
    parts.power_term = std::isinf(h1) ? h1 : lambda * std::max(0.0, h1 + model.beta_hat.mass() - my1.mass());
    parts.connectivity_term =
        0.5 * lambda * lambda * a_lambda * tilted_entropy(my2, product_kernel_measure(my1, model.t_hat));
    parts.total = parts.power_term + parts.connectivity_term;
    return parts;
}

double test_statistic(const SinrRealization& y, const EstimatedModel& model, const ScalingSchedule& sched) {
    return test_statistic_parts(y, model, sched).total;
}

double test_statistic(const SinrRealization& y, const EstimatedModel& model) {
    return test_statistic(y, model, model.model.sched);
}

SinrRealization sample_null(const EstimatedModel& model, std::uint64_t seed) {
    const BinGrid& grid = model.grid;
    const double lambda = model.lambda();
    const double a_lambda = model.model.a_lambda();
    const double c = grid.mark_rate();
    const std::size_t n = grid.cell_count();
    const std::size_t d = grid.domain().dimension();

    Rng loc(derive_seed(seed, "locations"));
    Rng mk(derive_seed(seed, "marks"));
    SinrRealization y;
    y.model = model.model;
    y.sample.seed = seed;
    y.sample.lambda_used = lambda;
    std::vector<std::size_t> cell_of_point;
    for (std::size_t x = 0; x < n; ++x) {
        if (model.masked[x] != 0) {
            continue;
        }
        const std::uint64_t count = loc.poisson(lambda * model.beta_hat.weights[x]);
        const auto b = grid.bounds(x);
        const double tail_lo = std::exp(-c * b.mark_lower);
        const bool top = grid.mark_of(x) + 1 == grid.mark_bins();
        const double tail_hi = top ? 0.0 : std::exp(-c * b.mark_upper);
        for (std::uint64_t j = 0; j < count; ++j) {
            MarkedPoint p;
            p.location.resize(d);
            for (std::size_t i = 0; i < d; ++i) {
                p.location[i] = loc.uniform(b.lower[i], b.upper[i]);
            }
            const double u = mk.uniform_open();
            p.mark = -std::log(tail_lo - u * (tail_lo - tail_hi)) / c;
            y.sample.points.push_back(std::move(p));
            cell_of_point.push_back(x);
        }
    }

    Rng ed(derive_seed(seed, "edges"));
    std::vector<EdgeSet::Edge> pairs;
    const std::size_t np = y.sample.size();
    for (std::size_t u = 0; u < np; ++u) {
        const std::size_t row = cell_of_point[u] * n;
        for (std::size_t v = u + 1; v < np; ++v) {
            const double p = std::min(1.0, a_lambda * model.t_hat.values[row + cell_of_point[v]]);
            if (ed.uniform() < p) {
                pairs.emplace_back(static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v));
            }
        }
    }
    y.edges = EdgeSet::from_pairs(std::move(pairs));
    return y;
}

double empirical_quantile(std::vector<double> values, double level) {
    if (values.empty()) {
        throw ValidationError("quantile of an empty sample");
    }
    if (!(level > 0.0) || level > 1.0) {
        throw ValidationError("level in (0, 1]");
    }
    std::sort(values.begin(), values.end());
    auto rank = static_cast<std::size_t>(std::ceil(level * static_cast<double>(values.size()) - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, values.size());
    return values[rank - 1];
}

ThresholdCalibrationResult calibrate_threshold(const EstimatedModel& model, double level, std::size_t b,
                                               std::uint64_t seed, std::size_t threads) {
    if (b < 100) {
        throw ValidationError("calibration needs b >= 100 null draws");
    }
    if (!(level > 0.0) || level > 1.0) {
        throw ValidationError("level in (0, 1]");
    }
    ThresholdCalibrationResult out;
    out.level = level;
    out.draws = b;
    out.null_statistics.assign(b, 0.0);
    parallel_for(b, threads, [&](std::size_t i) {
        const auto y = sample_null(model, derive_seed(seed, "null", i));
        out.null_statistics[i] = test_statistic(y, model);
    });
    out.infinite_count = static_cast<std::size_t>(std::count_if(
        out.null_statistics.begin(), out.null_statistics.end(), [](double s) { return std::isinf(s); }));
    out.all_infinite = out.infinite_count == b;
    out.threshold = empirical_quantile(out.null_statistics, level);
    return out;
}

std::string to_string(Decision d) {
    return d == Decision::typical ? "typical" : "anomalous";
}

DetectionReport detect(const SinrRealization& y, const EstimatedModel& model, double threshold, double level) {
    if (y.lambda() != model.lambda()) {
        std::ostringstream msg;
        msg << "lambda mismatch: realization has " << y.lambda() << ", model has " << model.lambda();
        throw ValidationError(msg.str());
    }
    if (!(y.model.domain == model.grid.domain())) {
        throw ValidationError("domain mismatch between realization and model grid");
    }
    const auto parts = test_statistic_parts(y, model, model.model.sched);
    DetectionReport r;
    r.statistic = parts.total;
    r.power_term = parts.power_term;
    r.connectivity_term = parts.connectivity_term;
    r.threshold = threshold;
    r.level = level;
    r.decision = parts.total > threshold ? Decision::anomalous : Decision::typical;
    r.seed = y.seed();
    r.lambda = y.lambda();
    return r;
}

std::string to_string(PerturbationKind k) {
    return k == PerturbationKind::power ? "power" : "connectivity";
}

NetworkModel perturb_power(NetworkModel model, double factor) {
    if (!(factor > 0.0)) {
        throw ValidationError("perturbation factor > 0");
    }
    model.params.c *= factor;
    return model;
}

NetworkModel perturb_connectivity(NetworkModel model, double factor) {
    if (!(factor >= 0.0)) {
        throw ValidationError("perturbation factor >= 0");
    }
    const LimitKernel base = model.limit;
    if (base.kind() == LimitKind::constant) {
        model.limit = LimitKernel::constant(base.parameter(0) * factor);
    } else {
        model.limit = LimitKernel::custom(
            [base, factor](const MarkedPoint& a, const MarkedPoint& b) { return factor * base(a, b); },
            base.mark_independent());
    }
    return model;
}

NetworkModel perturb(const NetworkModel& model, PerturbationKind kind, double factor) {
    return kind == PerturbationKind::power ? perturb_power(model, factor) : perturb_connectivity(model, factor);
}

PowerEstimate rejection_rate(const NetworkModel& truth, const EstimatedModel& model, double threshold,
                             std::size_t trials, std::uint64_t seed, std::size_t threads) {
    std::vector<std::uint8_t> rejected(trials, 0);
    parallel_for(trials, threads, [&](std::size_t i) {
        const auto y = generate_realization(truth, derive_seed(seed, "trial", i));
        rejected[i] = test_statistic(y, model) > threshold ? 1 : 0;
    });
    PowerEstimate out;
    out.trials = trials;
    out.rejections = static_cast<std::size_t>(std::count(rejected.begin(), rejected.end(), std::uint8_t{1}));
    return out;
}

}  // namespace sinrldp
