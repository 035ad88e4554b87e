#include "sinrldp/realization.hpp"

#include "sinrldp/errors.hpp"

#include <sstream>

namespace sinrldp {

ConnectivityKernel NetworkModel::kernel() const {
    ConnectivityKernel k;
    k.params = params;
    k.domain = domain;
    k.quadrature_resolution = quadrature_resolution;
    k.mode = mode;
    k.limit = limit;
    return k;
}

SinrRealization generate_realization(const NetworkModel& model, std::uint64_t seed, std::size_t threads) {
    require_valid(model.params, model.domain, model.sched);
    SinrRealization y;
    y.model = model;
    y.sample = sample_marked_ppp(model.params, model.domain, seed);
    if (model.mode == GraphMode::quenched) {
        y.edges = build_quenched_graph(y.sample, model.params, threads);
    } else {
        y.edges = build_annealed_graph(y.sample, model.kernel(), model.sched, seed);
    }
    return y;
}

void validate_realization(const SinrRealization& y) {
    const auto n = y.sample.points.size();
    const auto d = y.model.domain.dimension();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& p = y.sample.points[i];
        if (p.location.size() != d) {
            throw ValidationError("point " + std::to_string(i) + " has wrong dimension");
        }
        if (!(p.mark > 0.0)) {
            throw ValidationError("point " + std::to_string(i) + " has non-positive mark");
        }
    }
    for (const auto& [u, v] : y.edges) {
        if (u >= n || v >= n) {
            std::ostringstream msg;
            msg << "edge (" << u << ", " << v << ") index out of range for " << n << " points";
            throw ValidationError(msg.str());
        }
        if (u >= v) {
            throw ValidationError("edge endpoints must satisfy u < v");
        }
    }
}

}  // namespace sinrldp
