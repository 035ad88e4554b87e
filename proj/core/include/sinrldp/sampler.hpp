#pragma once

#include "sinrldp/model.hpp"

#include <cstdint>
#include <vector>

namespace sinrldp {

/// Guard on the expected node count lambda * mu(D).
inline constexpr double kMaxExpectedPoints = 1e7;

struct MarkedPoint {
    std::vector<double> location;
    double mark = 0.0;  ///< power; 0 marks a placeholder before assign_marks

    friend bool operator==(const MarkedPoint&, const MarkedPoint&) = default;
};

/// One draw of the marked point process, in generation order.
struct PointSample {
    std::vector<MarkedPoint> points;
    std::uint64_t seed = 0;
    double lambda_used = 0.0;

    std::size_t size() const noexcept { return points.size(); }

    friend bool operator==(const PointSample&, const PointSample&) = default;
};

/// Poisson(lambda * mu(D)) node count, then i.i.d. locations with density mu.
/// Marks are left at the placeholder 0. Uses the "locations" stream derived from `seed`.
PointSample sample_ppp(const ModelParams& params, const Domain& domain, std::uint64_t seed);

/// Assigns i.i.d. exponential(c) marks using the "marks" stream derived from `seed`.
PointSample assign_marks(PointSample sample, double c, std::uint64_t seed);

/// sample_ppp followed by assign_marks with the same master seed.
PointSample sample_marked_ppp(const ModelParams& params, const Domain& domain, std::uint64_t seed);

}  // namespace sinrldp
