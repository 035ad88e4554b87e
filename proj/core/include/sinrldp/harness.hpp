#pragma once

#include "sinrldp/realization.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace sinrldp {

struct Summary {
    std::size_t count = 0;
    double median = 0.0;
    double mean = 0.0;
    double std = 0.0;  ///< sample standard deviation
    double q25 = 0.0;
    double q75 = 0.0;
    double min = 0.0;
    double max = 0.0;

    double iqr() const { return q75 - q25; }
};

/// Order statistics use linear interpolation between closest ranks. Infinite values are kept,
/// so mean and std may be infinite.
Summary summarize(std::vector<double> values);

/// One replicate worth of tracked values.
struct Record {
    std::size_t rung = 0;
    std::size_t replicate = 0;
    double lambda = 0.0;
    std::uint64_t seed = 0;
    std::map<std::string, double> values;
};

struct Rung {
    double lambda = 0.0;
    std::map<std::string, Summary> stats;
    std::map<std::string, double> extras;
    std::string note;
};

struct TrendResult {
    std::string experiment;
    std::vector<Rung> rungs;
    std::map<std::string, bool> verdicts;
    std::vector<Record> records;

    /// Median of `stat` per rung.
    std::vector<double> medians(const std::string& stat) const;
    bool verdict(const std::string& name) const;
};

struct ExperimentPlan {
    NetworkModel model;
    std::vector<double> ladder{100.0, 400.0, 1600.0};
    std::size_t replicates = 50;
    std::uint64_t seed = 1;
    std::size_t spatial_bins = 8;
    std::size_t mark_bins = 8;
    std::size_t threads = 1;
    std::string output_dir;

    static std::vector<double> default_ladder() { return {100.0, 400.0, 1600.0}; }
    static std::vector<double> fast_ladder() { return {50.0, 200.0, 800.0}; }
};

/// Throws ValidationError unless the ladder is strictly increasing and positive and replicates >= 1.
void validate_plan(const ExperimentPlan& plan);

/// Seed of replicate r on rung i.
std::uint64_t replicate_seed(std::uint64_t master, std::size_t rung, std::size_t replicate);

bool nonincreasing(const std::vector<double>& xs);
bool strictly_decreasing(const std::vector<double>& xs);

/// Tracks m1_sup = sup |M1 - mu (x) K| and m2_sup = sup |M2 - t beta (x) beta| with the true kernel
/// table. Verdicts: m1/m2 nonincreasing and strictly decreasing medians.
TrendResult run_wlln(const ExperimentPlan& plan);

/// Tracks |aep_statistic - model_entropy| and the likelihood components. Annealed mode only.
/// Verdicts: nonincreasing median and nonincreasing IQR.
TrendResult run_aep(const ExperimentPlan& plan);

/// One run_aep per gamma value, tabulated without assertion.
std::vector<TrendResult> run_aep_gamma_sweep(const ExperimentPlan& plan, const std::vector<double>& gammas);

/// Frequency of sup |M2 - t beta (x) beta| > delta per rung, next to log(frequency) / (lambda^2 a)
/// and the projection estimate -inf H/2 over the violating set. Annealed mode only.
TrendResult run_decay(const ExperimentPlan& plan, double delta);

/// mass(t beta (x) beta) on the plan's grid with beta = mu (x) K.
double reference_pair_mass(const ExperimentPlan& plan);

/// Cheapest single-pair violation of size delta under the Kullback action, with both ordered
/// entries of an off-diagonal pair moved together. Returns the halved tilted entropy.
double projected_decay_rate(const std::vector<double>& nu, std::size_t cells, double delta);

struct CalibrationProbe {
    double reference_distance = 0.1;
    double kappa = 0.0;
    std::vector<double> distance_factors{1.0, 1.25, 1.5, 2.0};
};

/// Per rung, calibrates thresholds so lambda t_D(d0) = gamma log(lambda) + kappa, then records
/// max over probes of |a^-1 T(a, b) - t(a, b)| against the calibrated limit kernel.
TrendResult run_calibration(const ExperimentPlan& plan, const CalibrationProbe& probe = {});

}  // namespace sinrldp
