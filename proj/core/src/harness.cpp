#include "sinrldp/harness.hpp"

#include "sinrldp/errors.hpp"
#include "sinrldp/information.hpp"
#include "sinrldp/measures.hpp"
#include "sinrldp/parallel.hpp"
#include "sinrldp/random.hpp"
#include "sinrldp/summation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace sinrldp {

namespace {

double interpolated_quantile(const std::vector<double>& sorted, double p) {
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    if (frac == 0.0 || sorted[lo] == sorted[hi]) {
        return sorted[lo];
    }
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

NetworkModel at_lambda(const NetworkModel& base, double lambda) {
    NetworkModel m = base;
    m.params.lambda = lambda;
    return m;
}

using ReplicateFn = std::function<std::map<std::string, double>(const NetworkModel&, std::uint64_t)>;

// Runs every rung sequentially and its replicates through parallel_for, one slot per replicate.
TrendResult run_ladder(const ExperimentPlan& plan, const std::string& name, const ReplicateFn& fn) {
    validate_plan(plan);
    TrendResult out;
    out.experiment = name;
    for (std::size_t i = 0; i < plan.ladder.size(); ++i) {
        const NetworkModel model = at_lambda(plan.model, plan.ladder[i]);
        require_valid(model.params, model.domain, model.sched);
        std::vector<Record> recs(plan.replicates);
        parallel_for(plan.replicates, plan.threads, [&](std::size_t r) {
            Record rec;
            rec.rung = i;
            rec.replicate = r;
            rec.lambda = plan.ladder[i];
            rec.seed = replicate_seed(plan.seed, i, r);
            rec.values = fn(model, rec.seed);
            recs[r] = std::move(rec);
        });
        Rung rung;
        rung.lambda = plan.ladder[i];
        std::map<std::string, std::vector<double>> columns;
        for (const auto& rec : recs) {
            for (const auto& [k, v] : rec.values) {
                columns[k].push_back(v);
            }
        }
        for (auto& [k, col] : columns) {
            rung.stats[k] = summarize(std::move(col));
        }
        out.rungs.push_back(std::move(rung));
        out.records.insert(out.records.end(), recs.begin(), recs.end());
    }
    return out;
}

void add_trend_verdicts(TrendResult& r, const std::string& stat) {
    const auto med = r.medians(stat);
    r.verdicts[stat + "_median_nonincreasing"] = nonincreasing(med);
    r.verdicts[stat + "_median_strictly_decreasing"] = strictly_decreasing(med);
}

void require_annealed(const ExperimentPlan& plan, const char* what) {
    if (plan.model.mode != GraphMode::annealed) {
        throw ModeError(std::string(what) + " needs annealed mode");
    }
}

}  // namespace

Summary summarize(std::vector<double> values) {
    Summary s;
    s.count = values.size();
    if (values.empty()) {
        return s;
    }
    std::sort(values.begin(), values.end());
    s.min = values.front();
    s.max = values.back();
    s.median = interpolated_quantile(values, 0.5);
    s.q25 = interpolated_quantile(values, 0.25);
    s.q75 = interpolated_quantile(values, 0.75);
    s.mean = compensated_sum(values) / static_cast<double>(values.size());
    if (values.size() > 1 && std::isfinite(s.mean)) {
        CompensatedSum ss;
        for (double v : values) {
            ss += (v - s.mean) * (v - s.mean);
        }
        s.std = std::sqrt(ss.value() / static_cast<double>(values.size() - 1));
    } else if (!std::isfinite(s.mean)) {
        s.std = s.mean;
    }
    return s;
}

std::vector<double> TrendResult::medians(const std::string& stat) const {
    std::vector<double> out;
    out.reserve(rungs.size());
    for (const auto& r : rungs) {
        const auto it = r.stats.find(stat);
        out.push_back(it == r.stats.end() ? std::nan("") : it->second.median);
    }
    return out;
}

bool TrendResult::verdict(const std::string& name) const {
    const auto it = verdicts.find(name);
    if (it == verdicts.end()) {
        throw ValidationError("no verdict named " + name);
    }
    return it->second;
}

void validate_plan(const ExperimentPlan& plan) {
    if (plan.ladder.empty()) {
        throw ValidationError("ladder must not be empty");
    }
    for (std::size_t i = 0; i < plan.ladder.size(); ++i) {
        if (!(plan.ladder[i] > 0.0)) {
            throw ValidationError("ladder values must be positive");
        }
        if (i > 0 && !(plan.ladder[i] > plan.ladder[i - 1])) {
            throw ValidationError("ladder must be strictly increasing");
        }
    }
    if (plan.replicates < 1) {
        throw ValidationError("replicates >= 1");
    }
    if (plan.spatial_bins < 1 || plan.mark_bins < 1) {
        throw ValidationError("grid needs at least one spatial and one mark bin");
    }
}

std::uint64_t replicate_seed(std::uint64_t master, std::size_t rung, std::size_t replicate) {
    return derive_seed(derive_seed(master, "rung", rung), "replicate", replicate);
}

bool nonincreasing(const std::vector<double>& xs) {
    for (std::size_t i = 1; i < xs.size(); ++i) {
        if (!(xs[i] <= xs[i - 1])) {
            return false;
        }
    }
    return true;
}

bool strictly_decreasing(const std::vector<double>& xs) {
    for (std::size_t i = 1; i < xs.size(); ++i) {
        if (!(xs[i] < xs[i - 1])) {
            return false;
        }
    }
    return true;
}

TrendResult run_wlln(const ExperimentPlan& plan) {
    const BinGrid grid(plan.model.domain, plan.model.params.c, plan.spatial_bins, plan.mark_bins);
    const auto reference = reference_measure(grid, plan.model.params);
    const auto product = product_kernel_measure(reference, kernel_table(grid, plan.model.limit));
    auto r = run_ladder(plan, "wlln", [&](const NetworkModel& model, std::uint64_t seed) {
        const auto y = generate_realization(model, seed);
        const double lambda = model.params.lambda;
        const auto my1 = m1(y.sample, grid, lambda);
        const auto my2 = m2(y.sample, y.edges, grid, lambda, model.a_lambda());
        return std::map<std::string, double>{
            {"m1_sup", sup_distance(my1, reference)},
            {"m2_sup", sup_distance(my2, product)},
            {"m1_mass", my1.mass()},
            {"m2_mass", my2.mass()},
            {"nodes", static_cast<double>(y.sample.size())},
            {"edges", static_cast<double>(y.edges.size())},
        };
    });
    add_trend_verdicts(r, "m1_sup");
    add_trend_verdicts(r, "m2_sup");
    return r;
}

TrendResult run_aep(const ExperimentPlan& plan) {
    require_annealed(plan, "run_aep");
    const double entropy = model_entropy(plan.model.kernel());
    auto r = run_ladder(plan, "aep", [&](const NetworkModel& model, std::uint64_t seed) {
        const auto y = generate_realization(model, seed);
        const auto kernel = model.kernel();
        const auto ll = log_likelihood(y, kernel, model.sched);
        const double lambda = model.params.lambda;
        const double norm = model.a_lambda() * lambda * lambda * std::log(lambda);
        const double stat = -ll.total / norm;
        return std::map<std::string, double>{
            {"aep_statistic", stat},
            {"deviation", std::fabs(stat - entropy)},
            {"node_term", -ll.node / norm},
            {"edge_term", -ll.edge / norm},
            {"nonedge_term", -ll.nonedge / norm},
            {"log_likelihood", ll.total},
        };
    });
    for (auto& rung : r.rungs) {
        rung.extras["model_entropy"] = entropy;
        rung.extras["deviation_iqr"] = rung.stats.at("deviation").iqr();
    }
    add_trend_verdicts(r, "deviation");
    std::vector<double> iqr;
    for (const auto& rung : r.rungs) {
        iqr.push_back(rung.stats.at("deviation").iqr());
    }
    r.verdicts["deviation_iqr_nonincreasing"] = nonincreasing(iqr);
    return r;
}

std::vector<TrendResult> run_aep_gamma_sweep(const ExperimentPlan& plan, const std::vector<double>& gammas) {
    std::vector<TrendResult> out;
    for (double g : gammas) {
        ExperimentPlan p = plan;
        p.model.sched.gamma_a = g;
        auto r = run_aep(p);
        r.experiment = "aep_gamma";
        for (auto& rung : r.rungs) {
            rung.extras["gamma_a"] = g;
        }
        out.push_back(std::move(r));
    }
    return out;
}

double reference_pair_mass(const ExperimentPlan& plan) {
    const BinGrid grid(plan.model.domain, plan.model.params.c, plan.spatial_bins, plan.mark_bins);
    const auto reference = reference_measure(grid, plan.model.params);
    return product_kernel_measure(reference, kernel_table(grid, plan.model.limit)).mass();
}

double projected_decay_rate(const std::vector<double>& nu, std::size_t cells, double delta) {
    auto cost = [](double z, double v) {
        if (z == 0.0) {
            return v;
        }
        if (v == 0.0) {
            return kInfinity;
        }
        return z * std::log(z / v) - z + v;
    };
    double best = kInfinity;
    for (std::size_t x = 0; x < cells; ++x) {
        for (std::size_t y = x; y < cells; ++y) {
            const double v = nu[x * cells + y];
            const double copies = x == y ? 1.0 : 2.0;
            best = std::min(best, copies * cost(v + delta, v));
            if (v >= delta) {
                best = std::min(best, copies * cost(v - delta, v));
            }
        }
    }
    return best / 2.0;
}

TrendResult run_decay(const ExperimentPlan& plan, double delta) {
    require_annealed(plan, "run_decay");
    if (!(delta >= 0.0)) {
        throw ValidationError("delta >= 0");
    }
    const BinGrid grid(plan.model.domain, plan.model.params.c, plan.spatial_bins, plan.mark_bins);
    const auto reference = reference_measure(grid, plan.model.params);
    const auto product = product_kernel_measure(reference, kernel_table(grid, plan.model.limit));
    auto r = run_ladder(plan, "decay", [&](const NetworkModel& model, std::uint64_t seed) {
        const auto y = generate_realization(model, seed);
        const auto my2 = m2(y.sample, y.edges, grid, model.params.lambda, model.a_lambda());
        const double sup = sup_distance(my2, product);
        return std::map<std::string, double>{
            {"m2_sup", sup},
            {"exceeds", sup > delta ? 1.0 : 0.0},
        };
    });
    const double rate = projected_decay_rate(product.weights, product.cells(), delta);
    std::vector<double> freq;
    for (auto& rung : r.rungs) {
        const double f = rung.stats.at("exceeds").mean;
        const double speed = plan.model.sched.speed2(rung.lambda);
        rung.extras["frequency"] = f;
        rung.extras["delta"] = delta;
        rung.extras["projected_rate"] = -rate;
        if (f > 0.0) {
            rung.extras["log_frequency_rate"] = std::log(f) / speed;
        } else {
            rung.extras["log_frequency_rate"] = std::log(1.0 / static_cast<double>(plan.replicates)) / speed;
            rung.note = "zero frequency; upper bound 1/replicates";
        }
        freq.push_back(f);
    }
    r.verdicts["frequency_nonincreasing"] = nonincreasing(freq);
    return r;
}

TrendResult run_calibration(const ExperimentPlan& plan, const CalibrationProbe& probe) {
    validate_plan(plan);
    if (plan.model.params.n0 != 0.0) {
        throw ModeError("calibration needs n0 = 0");
    }
    const ConnectivityKernel base = plan.model.kernel();
    const LimitKernel limit = LimitKernel::calibrated(probe.reference_distance, probe.kappa);
    TrendResult out;
    out.experiment = "calibration";
    std::vector<double> deviations;
    for (std::size_t i = 0; i < plan.ladder.size(); ++i) {
        const double lambda = plan.ladder[i];
        Rung rung;
        rung.lambda = lambda;
        const auto cal = calibrate_thresholds(base, plan.model.sched, lambda, probe.reference_distance, probe.kappa);
        rung.extras["threshold_scale"] = cal.threshold_scale;
        rung.extras["target"] = cal.target;
        rung.extras["achieved"] = cal.achieved;
        rung.extras["converged"] = cal.converged ? 1.0 : 0.0;
        double worst = 0.0;
        if (!cal.converged) {
            rung.note = "threshold root-find failed";
            worst = kInfinity;
        } else {
            const auto kernel = with_threshold_scale(base, cal.threshold_scale);
            const double a_lambda = plan.model.sched.a(lambda);
            for (std::size_t j = 0; j < probe.distance_factors.size(); ++j) {
                MarkedPoint a;
                a.location = base.domain.lower;
                a.mark = 1.0;
                MarkedPoint b = a;
                b.location[0] += probe.distance_factors[j] * probe.reference_distance;
                const double approx = t_big(kernel, a, b, lambda) / a_lambda;
                const double dev = std::fabs(approx - limit(a, b));
                Record rec;
                rec.rung = i;
                rec.replicate = j;
                rec.lambda = lambda;
                rec.seed = plan.seed;
                rec.values = {{"distance", probe.distance_factors[j] * probe.reference_distance},
                              {"scaled_T", approx},
                              {"limit", limit(a, b)},
                              {"deviation", dev}};
                out.records.push_back(std::move(rec));
                worst = std::max(worst, dev);
            }
        }
        rung.extras["max_deviation"] = worst;
        Summary s;
        s.count = 1;
        s.median = s.mean = s.q25 = s.q75 = s.min = s.max = worst;
        rung.stats["max_deviation"] = s;
        deviations.push_back(worst);
        out.rungs.push_back(std::move(rung));
    }
    out.verdicts["max_deviation_nonincreasing"] = nonincreasing(deviations);
    return out;
}

}  // namespace sinrldp
