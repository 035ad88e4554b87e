#include "sinrldp/sampler.hpp"

#include "sinrldp/errors.hpp"
#include "sinrldp/random.hpp"

#include <sstream>

namespace sinrldp {

PointSample sample_ppp(const ModelParams& params, const Domain& domain, std::uint64_t seed) {
    if (!(params.lambda > 0.0)) {
        throw ValidationError("lambda > 0");
    }
    const double mass = params.mu.is_uniform() ? 1.0 : params.mu.integrate(domain);
    const double expected = params.lambda * mass;
    if (expected > kMaxExpectedPoints) {
        std::ostringstream msg;
        msg << "capacity exceeded: expected node count " << expected << " > " << kMaxExpectedPoints;
        throw CapacityError(msg.str());
    }

    Rng rng(derive_seed(seed, "locations"));
    PointSample out;
    out.seed = seed;
    out.lambda_used = params.lambda;
    const std::uint64_t n = rng.poisson(expected);
    out.points.reserve(n);

    const std::size_t d = domain.dimension();
    const double bound = params.mu.sup_bound(domain);
    for (std::uint64_t i = 0; i < n; ++i) {
        MarkedPoint p;
        p.location.resize(d);
        for (;;) {
            for (std::size_t k = 0; k < d; ++k) {
                p.location[k] = rng.uniform(domain.lower[k], domain.upper[k]);
            }
            if (params.mu.is_uniform() || rng.uniform() * bound <= params.mu(domain, p.location)) {
                break;
            }
        }
        out.points.push_back(std::move(p));
    }
    return out;
}

PointSample assign_marks(PointSample sample, double c, std::uint64_t seed) {
    if (!(c > 0.0)) {
        throw ValidationError("c > 0");
    }
    Rng rng(derive_seed(seed, "marks"));
    for (auto& p : sample.points) {
        p.mark = rng.exponential(c);
    }
    return sample;
}

PointSample sample_marked_ppp(const ModelParams& params, const Domain& domain, std::uint64_t seed) {
    return assign_marks(sample_ppp(params, domain, seed), params.c, seed);
}

}  // namespace sinrldp
