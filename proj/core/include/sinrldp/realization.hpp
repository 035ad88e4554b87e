#pragma once

#include "sinrldp/connectivity.hpp"
#include "sinrldp/model.hpp"
#include "sinrldp/sampler.hpp"

#include <cstdint>

namespace sinrldp {

/// Everything needed to draw a realization: parameters, domain, schedule, mode and limit kernel.
struct NetworkModel {
    ModelParams params;
    Domain domain;
    ScalingSchedule sched;
    GraphMode mode = GraphMode::annealed;
    LimitKernel limit = LimitKernel::constant(0.7);
    std::size_t quadrature_resolution = 32;

    ConnectivityKernel kernel() const;
    double a_lambda() const { return sched.a(params.lambda); }
    double speed2() const { return sched.speed2(params.lambda); }

    friend bool operator==(const NetworkModel&, const NetworkModel&) = default;
};

/// One sampled network: marked points, edges, and the model and seed that produced them.
struct SinrRealization {
    NetworkModel model;
    PointSample sample;
    EdgeSet edges;

    std::uint64_t seed() const noexcept { return sample.seed; }
    double lambda() const noexcept { return model.params.lambda; }

    friend bool operator==(const SinrRealization&, const SinrRealization&) = default;
};

/// Validates the model, samples the marked PPP and builds the edge set for `model.mode`.
SinrRealization generate_realization(const NetworkModel& model, std::uint64_t seed, std::size_t threads = 1);

/// Checks edge indices against the sample and point locations against the domain.
/// Throws ValidationError describing the first problem.
void validate_realization(const SinrRealization& y);

}  // namespace sinrldp
