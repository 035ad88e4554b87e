#include "sinrldp/information.hpp"

#include "sinrldp/errors.hpp"
#include "sinrldp/summation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sinrldp {

namespace {

void require_same_size(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw GridMismatchError("measures have different sizes");
    }
}

// x log(x/y) - x + y >= 0, with its limits at x = 0 and y = 0.
double divergence_term(double x, double y) {
    if (x == 0.0) {
        return y;
    }
    if (y == 0.0) {
        return kInfinity;
    }
    const double d = x / y - 1.0;
    return y * ((1.0 + d) * std::log1p(d) - d);
}

std::vector<double> product_weights(const BinnedMeasure& beta, const PairTable& t_table) {
    return product_kernel_measure(beta, t_table).weights;
}

}  // namespace

double rel_entropy(std::span<const double> phi, std::span<const double> nu) {
    require_same_size(phi, nu);
    CompensatedSum s;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        const double term = divergence_term(phi[i], nu[i]);
        if (std::isinf(term)) {
            return kInfinity;
        }
        s += term;
    }
    s += compensated_sum(phi);
    s += -compensated_sum(nu);
    return s.value();
}

double rel_entropy(const BinnedMeasure& phi, const BinnedMeasure& nu) {
    if (!(phi.grid == nu.grid)) {
        throw GridMismatchError("measures are defined on different grids");
    }
    return rel_entropy(std::span<const double>(phi.weights), std::span<const double>(nu.weights));
}

double rel_entropy(const BinnedPairMeasure& phi, const BinnedPairMeasure& nu) {
    if (!(phi.grid == nu.grid)) {
        throw GridMismatchError("measures are defined on different grids");
    }
    return rel_entropy(std::span<const double>(phi.weights), std::span<const double>(nu.weights));
}

double tilted_entropy(std::span<const double> phi, std::span<const double> nu) {
    require_same_size(phi, nu);
    if (!(compensated_sum(phi) > 0.0)) {
        return kInfinity;
    }
    CompensatedSum s;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        const double term = divergence_term(phi[i], nu[i]);
        if (std::isinf(term)) {
            return kInfinity;
        }
        s += term;
    }
    return s.value();
}

double tilted_entropy(const BinnedPairMeasure& phi, const BinnedPairMeasure& nu) {
    if (!(phi.grid == nu.grid)) {
        throw GridMismatchError("measures are defined on different grids");
    }
    return tilted_entropy(std::span<const double>(phi.weights), std::span<const double>(nu.weights));
}

double rate_i1(const BinnedMeasure& beta, const BinnedPairMeasure& phi, const BinnedMeasure& reference,
               const PairTable& t_table, double tol) {
    if (sup_distance(phi, product_kernel_measure(beta, t_table)) > tol) {
        return kInfinity;
    }
    return rel_entropy(beta, reference);
}

double rate_i2(const BinnedMeasure& beta, const BinnedPairMeasure& phi, const BinnedMeasure& reference,
               const PairTable& t_table, double tol) {
    if (sup_distance(beta, reference) > tol) {
        return kInfinity;
    }
    return tilted_entropy(phi, product_kernel_measure(beta, t_table));
}

RateReport rate_report(const BinnedMeasure& beta, const BinnedPairMeasure& phi, const BinnedMeasure& reference,
                       const PairTable& t_table, double tol) {
    RateReport r;
    const auto product = product_kernel_measure(beta, t_table);
    r.consistency_i1 = sup_distance(phi, product);
    r.consistency_i2 = sup_distance(beta, reference);
    r.relative_entropy_term = rel_entropy(beta, reference);
    r.mass_beta = beta.mass();
    r.mass_phi = phi.mass();
    r.mass_product = product.mass();
    r.mass_difference_term = r.mass_product - r.mass_phi;
    r.i1 = r.consistency_i1 <= tol ? r.relative_entropy_term : kInfinity;
    r.i2 = r.consistency_i2 <= tol ? tilted_entropy(phi, product) : kInfinity;
    r.kullback = tilted_entropy(phi, product) / 2.0;
    r.i1_infinite = std::isinf(r.i1);
    r.i2_infinite = std::isinf(r.i2);
    return r;
}

bool TestFunction::valid() const {
    if (values.size() != cells * cells) {
        return false;
    }
    for (std::size_t x = 0; x < cells; ++x) {
        for (std::size_t y = 0; y < cells; ++y) {
            if (!std::isfinite(at(x, y)) || at(x, y) != at(y, x)) {
                return false;
            }
        }
    }
    return true;
}

double spectral_potential(std::span<const double> q, std::span<const double> nu) {
    require_same_size(q, nu);
    CompensatedSum s;
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (q[i] > kMaxExponent) {
            throw ValidationError("test function value exceeds the exp overflow guard (700)");
        }
        s += std::expm1(q[i]) * nu[i];
    }
    return s.value();
}

double spectral_potential(const TestFunction& q, const BinnedMeasure& beta, const PairTable& t_table) {
    if (!q.valid()) {
        throw ValidationError("test function must be finite and symmetric");
    }
    const auto nu = product_weights(beta, t_table);
    return spectral_potential(q.values, nu);
}

std::vector<double> spectral_potential_gradient(std::span<const double> q, std::span<const double> nu) {
    require_same_size(q, nu);
    std::vector<double> g(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
        g[i] = std::exp(q[i]) * nu[i];
    }
    return g;
}

double kullback_action_closed(std::span<const double> phi, std::span<const double> nu) {
    return tilted_entropy(phi, nu) / 2.0;
}

double kullback_action_closed(const BinnedPairMeasure& phi, const BinnedMeasure& beta, const PairTable& t_table) {
    return tilted_entropy(phi, product_kernel_measure(beta, t_table)) / 2.0;
}

double dual_objective(std::span<const double> q, std::span<const double> phi, std::span<const double> nu) {
    require_same_size(q, phi);
    require_same_size(q, nu);
    CompensatedSum s;
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (std::isinf(q[i]) && q[i] < 0.0) {
            // phi must vanish here for a finite value; the pair contributes its limit nu.
            s += phi[i] > 0.0 ? -kInfinity : nu[i];
            continue;
        }
        s += q[i] * phi[i] - std::expm1(q[i]) * nu[i];
    }
    return 0.5 * s.value();
}

std::vector<double> dual_gradient(std::span<const double> q, std::span<const double> phi,
                                  std::span<const double> nu) {
    std::vector<double> g(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
        g[i] = 0.5 * (phi[i] - std::exp(q[i]) * nu[i]);
    }
    return g;
}

DualResult kullback_action_dual(std::span<const double> phi, std::span<const double> nu,
                                const DualOptions& options) {
    require_same_size(phi, nu);
    DualResult out;
    out.maximizer.assign(phi.size(), 0.0);
    if (!(compensated_sum(phi) > 0.0)) {
        out.value = kInfinity;
        out.diagnostic = "phi has zero mass";
        return out;
    }
    for (std::size_t i = 0; i < phi.size(); ++i) {
        const double f = phi[i];
        const double n = nu[i];
        if (n == 0.0) {
            if (f > 0.0) {
                std::ostringstream msg;
                msg << "phi charges pair entry " << i << " outside the support of t beta (x) beta";
                out.support_violation = true;
                out.diagnostic = msg.str();
                out.value = kInfinity;
                return out;
            }
            out.maximizer[i] = 0.0;
            continue;
        }
        if (f == 0.0) {
            out.maximizer[i] = -kInfinity;
            continue;
        }
        double q = options.start == DualStart::stationary ? std::log(f / n) : 0.0;
        // Newton on the concave map q -> q f - (e^q - 1) n; upward steps are capped at 1.
        for (int it = 0; it < options.max_iterations; ++it) {
            const double step = std::min(1.0, f * std::exp(-q) / n - 1.0);
            q += step;
            out.iterations = std::max(out.iterations, it + 1);
            if (std::fabs(step) <= 1e-15 * (1.0 + std::fabs(q))) {
                break;
            }
        }
        out.maximizer[i] = q;
    }
    double gmax = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        if (std::isfinite(out.maximizer[i])) {
            gmax = std::max(gmax, std::fabs(0.5 * (phi[i] - std::exp(out.maximizer[i]) * nu[i])));
        }
    }
    out.gradient_norm = gmax;
    out.value = dual_objective(out.maximizer, phi, nu);
    return out;
}

DualResult kullback_action_dual(const BinnedPairMeasure& phi, const BinnedMeasure& beta, const PairTable& t_table,
                                const DualOptions& options) {
    const auto nu = product_weights(beta, t_table);
    return kullback_action_dual(phi.weights, nu, options);
}

double entropy_h(std::span<const double> phi, std::span<const double> nu_ref) {
    require_same_size(phi, nu_ref);
    const double ref_mass = compensated_sum(nu_ref);
    if (!(ref_mass > 0.0)) {
        throw ValidationError("entropy_h needs a reference measure with positive mass");
    }
    CompensatedSum s;
    s += compensated_sum(phi);
    s += -ref_mass;
    for (double f : phi) {
        if (f > 0.0) {
            s += -f * std::log(f / ref_mass);
        }
    }
    return s.value() / 2.0;
}

double entropy_h(const BinnedPairMeasure& phi, const BinnedPairMeasure& nu_ref) {
    if (!(phi.grid == nu_ref.grid)) {
        throw GridMismatchError("measures are defined on different grids");
    }
    return entropy_h(std::span<const double>(phi.weights), std::span<const double>(nu_ref.weights));
}

double entropy_h_lambda_weighted(const BinnedPairMeasure& phi, const BinnedPairMeasure& nu_ref, double lambda,
                                 const BinnedMeasure& beta) {
    const double ref_mass = nu_ref.mass();
    const double beta_mass = beta.mass();
    CompensatedSum s;
    s += phi.mass();
    s += -lambda * beta_mass * beta_mass;
    for (double f : phi.weights) {
        if (f > 0.0) {
            s += -f * std::log(f / ref_mass);
        }
    }
    return s.value() / 2.0;
}

LikelihoodTerms log_likelihood(const SinrRealization& y, const ConnectivityKernel& kernel,
                               const ScalingSchedule& sched) {
    const auto& pts = y.sample.points;
    const std::size_t n = pts.size();
    const auto& params = kernel.params;
    LikelihoodTerms out;

    CompensatedSum node;
    const double log_c = std::log(params.c);
    for (const auto& p : pts) {
        node += std::log(params.mu(kernel.domain, p.location)) + log_c - params.c * p.mark;
    }
    out.node = node.value();

    const double a_lambda = sched.a(params.lambda);
    auto degenerate = [](std::size_t u, std::size_t v, double p) {
        std::ostringstream msg;
        msg << "degenerate edge probability p = " << p << " on pair (" << u << ", " << v << ")";
        return DegenerateProbabilityError(msg.str(), u, v);
    };

    CompensatedSum edge;
    for (const auto& [u, v] : y.edges) {
        const double p = edge_probability(kernel, pts[u], pts[v], a_lambda);
        if (!(p > 0.0) || !(p < 1.0)) {
            throw degenerate(u, v, p);
        }
        edge += std::log(p) - std::log1p(-p);
    }
    out.edge = edge.value();

    if (kernel.limit.kind() == LimitKind::constant && n >= 2) {
        const double p = std::min(1.0, a_lambda * std::max(0.0, kernel.limit.parameter(0)));
        if (p >= 1.0) {
            throw degenerate(0, 1, p);
        }
        const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
        out.nonedge = pairs * std::log1p(-p);
    } else {
        CompensatedSum nonedge;
        for (std::size_t u = 0; u < n; ++u) {
            for (std::size_t v = u + 1; v < n; ++v) {
                const double p = edge_probability(kernel, pts[u], pts[v], a_lambda);
                if (p >= 1.0) {
                    throw degenerate(u, v, p);
                }
                nonedge += std::log1p(-p);
            }
        }
        out.nonedge = nonedge.value();
    }
    out.total = out.node + out.edge + out.nonedge;
    return out;
}

LikelihoodTerms log_likelihood(const SinrRealization& y) {
    return log_likelihood(y, y.model.kernel(), y.model.sched);
}

double aep_statistic(const SinrRealization& y, const ConnectivityKernel& kernel, const ScalingSchedule& sched) {
    const double lambda = kernel.params.lambda;
    if (!(lambda > 1.0)) {
        throw ValidationError("aep_statistic needs lambda > 1");
    }
    const double ll = log_likelihood(y, kernel, sched).total;
    return -ll / (sched.a(lambda) * lambda * lambda * std::log(lambda));
}

double aep_statistic(const SinrRealization& y) {
    return aep_statistic(y, y.model.kernel(), y.model.sched);
}

namespace {

// E[t(|a - b|)] for a, b i.i.d. uniform on a box: the difference u has density
// prod_k (L_k - |u_k|) / L_k^2 on [-L_k, L_k].
double distance_kernel_expectation(const LimitKernel& t, const Domain& dom, std::size_t resolution) {
    const std::size_t d = dom.dimension();
    const std::size_t per_axis = 2 * resolution;
    std::size_t nodes = 1;
    for (std::size_t i = 0; i < d; ++i) {
        nodes *= per_axis;
    }
    std::vector<double> u(d);
    CompensatedSum s;
    for (std::size_t n = 0; n < nodes; ++n) {
        std::size_t rest = n;
        double weight = 1.0;
        double norm2 = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            const std::size_t k = rest % per_axis;
            rest /= per_axis;
            const double len = dom.extent(i);
            const double h = 2.0 * len / static_cast<double>(per_axis);
            u[i] = -len + (static_cast<double>(k) + 0.5) * h;
            weight *= (len - std::fabs(u[i])) / (len * len) * h;
            norm2 += u[i] * u[i];
        }
        s += weight * t.of_distance(std::sqrt(norm2));
    }
    return s.value();
}

}  // namespace

double model_entropy(const ConnectivityKernel& kernel, const EntropyQuadrature& quad) {
    const auto& t = kernel.limit;
    if (!t.configured()) {
        throw ModeError("model_entropy needs a configured limit kernel t");
    }
    const Domain& dom = kernel.domain;
    if (t.kind() == LimitKind::constant) {
        return t.parameter(0);
    }
    if (t.distance_only() && kernel.params.mu.is_uniform()) {
        return distance_kernel_expectation(t, dom, quad.spatial_resolution);
    }

    // Full tensor midpoint rule over domain^2 x marks^2.
    const std::size_t d = dom.dimension();
    const std::size_t q = quad.general_resolution;
    std::size_t nodes = 1;
    double cell = dom.volume();
    for (std::size_t i = 0; i < d; ++i) {
        nodes *= q;
        cell /= static_cast<double>(q);
    }
    std::vector<MarkedPoint> pts(nodes);
    std::vector<double> w(nodes);
    for (std::size_t n = 0; n < nodes; ++n) {
        std::size_t rest = n;
        pts[n].location.resize(d);
        for (std::size_t i = 0; i < d; ++i) {
            const std::size_t k = rest % q;
            rest /= q;
            pts[n].location[i] = dom.lower[i] + (static_cast<double>(k) + 0.5) * dom.extent(i) / static_cast<double>(q);
        }
        w[n] = kernel.params.mu(dom, pts[n].location) * cell;
    }
    const std::size_t m_nodes = t.mark_independent() ? 1 : quad.mark_nodes;
    std::vector<double> marks(m_nodes, 1.0);
    for (std::size_t j = 0; j < m_nodes && m_nodes > 1; ++j) {
        marks[j] = -std::log1p(-(static_cast<double>(j) + 0.5) / static_cast<double>(m_nodes)) / kernel.params.c;
    }
    const double mark_weight = 1.0 / static_cast<double>(m_nodes * m_nodes);
    CompensatedSum s;
    MarkedPoint a;
    MarkedPoint b;
    for (std::size_t i = 0; i < nodes; ++i) {
        for (std::size_t j = 0; j < nodes; ++j) {
            double inner = 0.0;
            a.location = pts[i].location;
            b.location = pts[j].location;
            for (double la : marks) {
                for (double lb : marks) {
                    a.mark = la;
                    b.mark = lb;
                    inner += t(a, b);
                }
            }
            s += w[i] * w[j] * inner * mark_weight;
        }
    }
    return s.value();
}

double bits_estimate(double model_entropy, double lambda, const ScalingSchedule& sched) {
    return lambda * lambda * sched.a(lambda) * std::log(lambda) * model_entropy / std::log(2.0);
}

double cardinality_exponent(const BinnedPairMeasure& phi, const BinnedPairMeasure& nu_ref, double lambda,
                            const ScalingSchedule& sched) {
    return sched.speed2(lambda) * entropy_h(phi, nu_ref);
}

}  // namespace sinrldp
