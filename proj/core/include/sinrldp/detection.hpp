#pragma once

#include "sinrldp/measures.hpp"
#include "sinrldp/realization.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sinrldp {

/// Cell-wise null model estimated from replicate realizations.
struct EstimatedModel {
    BinGrid grid;
    BinnedMeasure beta_hat;
    PairTable t_hat;             ///< undefined (and 0) on pairs touching a masked cell
    std::size_t k_used = 0;
    std::vector<std::uint8_t> masked;  ///< 1 where beta_hat = 0
    NetworkModel model;          ///< parameters and schedule shared by the replicates

    double lambda() const noexcept { return model.params.lambda; }
    std::size_t masked_count() const;

    friend bool operator==(const EstimatedModel&, const EstimatedModel&) = default;
};

/// beta_hat = mean M1 and t_hat = mean M2 / (beta_hat (x) beta_hat) over the replicates.
/// Throws ValidationError on an empty list or replicates with different parameters.
EstimatedModel estimate(std::span<const SinrRealization> replicates, const BinGrid& grid);

struct StatisticParts {
    double power_term = 0.0;         ///< lambda [H(M1(y) | beta_hat) + |beta_hat| - |M1(y)|]
    double connectivity_term = 0.0;  ///< (lambda^2 a / 2) tilted_entropy(M2(y), t_hat M1(y) (x) M1(y))
    double total = 0.0;
};

StatisticParts test_statistic_parts(const SinrRealization& y, const EstimatedModel& model,
                                    const ScalingSchedule& sched);
double test_statistic(const SinrRealization& y, const EstimatedModel& model, const ScalingSchedule& sched);
double test_statistic(const SinrRealization& y, const EstimatedModel& model);

/// One realization of the estimated null: Poisson(lambda beta_hat(x)) points per cell, uniform
/// inside the spatial box, exponential marks conditioned on the mark bin, and independent edges
/// with probability min(1, a t_hat(x, y)). Masked cells receive no points.
SinrRealization sample_null(const EstimatedModel& model, std::uint64_t seed);

struct ThresholdCalibrationResult {
    double threshold = 0.0;
    double level = 0.0;
    std::size_t draws = 0;
    std::size_t infinite_count = 0;
    std::vector<double> null_statistics;  ///< in draw order
    bool all_infinite = false;
};

/// Empirical level-quantile (order statistic ceil(level * b)) of the statistic over b null draws.
/// Draw i uses derive_seed(seed, "null", i), so the result does not depend on `threads`.
ThresholdCalibrationResult calibrate_threshold(const EstimatedModel& model, double level, std::size_t b,
                                               std::uint64_t seed, std::size_t threads = 1);

/// ceil(level * n)-th smallest value; infinities sort last.
double empirical_quantile(std::vector<double> values, double level);

enum class Decision { typical, anomalous };

std::string to_string(Decision d);

struct DetectionReport {
    double statistic = 0.0;
    double threshold = 0.0;
    Decision decision = Decision::typical;
    double level = 0.0;
    double power_term = 0.0;
    double connectivity_term = 0.0;
    std::uint64_t seed = 0;
    double lambda = 0.0;
};

/// anomalous iff statistic > threshold. Throws ValidationError when y's lambda or grid
/// domain does not match the model.
DetectionReport detect(const SinrRealization& y, const EstimatedModel& model, double threshold, double level = 0.0);

enum class PerturbationKind { power, connectivity };

std::string to_string(PerturbationKind k);

/// Alternative with marks drawn at rate c * factor (perturbs the power measure).
NetworkModel perturb_power(NetworkModel model, double factor);
/// Alternative with the limit kernel multiplied by `factor` (perturbs t).
NetworkModel perturb_connectivity(NetworkModel model, double factor);
NetworkModel perturb(const NetworkModel& model, PerturbationKind kind, double factor);

struct PowerEstimate {
    std::size_t trials = 0;
    std::size_t rejections = 0;
    double rate() const { return trials == 0 ? 0.0 : static_cast<double>(rejections) / static_cast<double>(trials); }
};

/// Rejection frequency of the calibrated test on `trials` draws of `truth`.
/// Draw i uses derive_seed(seed, "trial", i).
PowerEstimate rejection_rate(const NetworkModel& truth, const EstimatedModel& model, double threshold,
                             std::size_t trials, std::uint64_t seed, std::size_t threads = 1);

}  // namespace sinrldp
