#include "sinrldp/model.hpp"

#include "sinrldp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace sinrldp {

double default_mark_cap(double c) {
    return -std::log(kDefaultMarkTailMass) / c;
}

double Domain::volume() const {
    double v = 1.0;
    for (std::size_t i = 0; i < dimension(); ++i) {
        v *= extent(i);
    }
    return v;
}

bool Domain::contains(std::span<const double> x) const {
    if (x.size() != dimension()) {
        return false;
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] < lower[i] || x[i] > upper[i]) {
            return false;
        }
    }
    return true;
}

Domain Domain::unit_box(std::size_t dimension, double c) {
    Domain d;
    d.lower.assign(dimension, 0.0);
    d.upper.assign(dimension, 1.0);
    d.mark_cap = default_mark_cap(c);
    return d;
}

ThresholdFunction ThresholdFunction::constant(double value) {
    ThresholdFunction f;
    f.values_ = {value};
    return f;
}

ThresholdFunction ThresholdFunction::tabulated(std::vector<double> edges, std::vector<double> values) {
    if (values.size() != edges.size() + 1) {
        throw ValidationError("threshold table needs exactly one more value than edges");
    }
    if (!std::is_sorted(edges.begin(), edges.end()) ||
        std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
        throw ValidationError("threshold table edges must be strictly increasing");
    }
    ThresholdFunction f;
    f.edges_ = std::move(edges);
    f.values_ = std::move(values);
    return f;
}

double ThresholdFunction::operator()(double mark) const {
    if (edges_.empty()) {
        return values_.front();
    }
    auto it = std::lower_bound(edges_.begin(), edges_.end(), mark);
    return values_[static_cast<std::size_t>(it - edges_.begin())];
}

double ThresholdFunction::min_value() const {
    return *std::min_element(values_.begin(), values_.end());
}

SpatialDensity SpatialDensity::custom(Fn fn, double sup_bound, std::string name) {
    SpatialDensity d;
    d.fn_ = std::make_shared<const Fn>(std::move(fn));
    d.sup_bound_ = sup_bound;
    d.name_ = std::move(name);
    return d;
}

double SpatialDensity::operator()(const Domain& domain, std::span<const double> x) const {
    if (!fn_) {
        return domain.contains(x) ? 1.0 / domain.volume() : 0.0;
    }
    return (*fn_)(x);
}

double SpatialDensity::sup_bound(const Domain& domain) const {
    return fn_ ? sup_bound_ : 1.0 / domain.volume();
}

double SpatialDensity::integrate(const Domain& domain, std::size_t resolution) const {
    const std::size_t d = domain.dimension();
    std::size_t nodes = 1;
    for (std::size_t i = 0; i < d; ++i) {
        nodes *= resolution;
    }
    std::vector<double> x(d);
    double cell = domain.volume();
    for (std::size_t i = 0; i < d; ++i) {
        cell /= static_cast<double>(resolution);
    }
    double sum = 0.0;
    for (std::size_t n = 0; n < nodes; ++n) {
        std::size_t rest = n;
        for (std::size_t i = 0; i < d; ++i) {
            const std::size_t k = rest % resolution;
            rest /= resolution;
            x[i] = domain.lower[i] + (static_cast<double>(k) + 0.5) * domain.extent(i) / static_cast<double>(resolution);
        }
        sum += (*this)(domain, x);
    }
    return sum * cell;
}

double ScalingSchedule::a(double lambda) const {
    return std::pow(lambda, -gamma_a);
}

double a_of_lambda(const ScalingSchedule& sched, double lambda) {
    if (!(lambda > 0.0)) {
        throw ValidationError("lambda > 0");
    }
    return sched.a(lambda);
}

bool ValidationResult::mentions(std::string_view message) const {
    return std::any_of(violations.begin(), violations.end(),
                       [&](const Violation& v) { return v.message.find(message) != std::string::npos; });
}

std::string ValidationResult::describe() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < violations.size(); ++i) {
        if (i != 0) {
            out << "; ";
        }
        out << violations[i].field << ": " << violations[i].message;
    }
    return out.str();
}

ValidationResult validate(const ModelParams& params, const Domain& domain, const ScalingSchedule& sched) {
    ValidationResult r;
    auto fail = [&r](std::string field, std::string message) {
        r.violations.push_back({std::move(field), std::move(message)});
    };
    // Written as negated comparisons so NaN fails every check.
    if (!(params.lambda > 0.0) || !std::isfinite(params.lambda)) {
        fail("lambda", "lambda > 0");
    }
    if (!(params.c > 0.0) || !std::isfinite(params.c)) {
        fail("c", "c > 0");
    }
    if (!(params.alpha > 0.0) || !std::isfinite(params.alpha)) {
        fail("alpha", "alpha > 0");
    }
    if (!(params.n0 >= 0.0) || !std::isfinite(params.n0)) {
        fail("n0", "n0 >= 0");
    }
    for (double v : params.iota.values()) {
        if (!(v > 0.0)) {
            fail("iota", "iota(l) > 0");
            break;
        }
    }
    for (double v : params.zeta.values()) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            fail("zeta", "zeta(l) >= 0");
            break;
        }
    }
    if (!(sched.gamma_a > 1.0)) {
        fail("gamma_a", "gamma_a > 1 (sub-critical)");
    }
    if (!(sched.gamma_a < 2.0)) {
        fail("gamma_a", "gamma_a < 2 (growing second speed)");
    }
    if (domain.dimension() == 0 || domain.lower.size() != domain.upper.size()) {
        fail("domain", "dimension >= 1 with matching corners");
    } else {
        for (std::size_t i = 0; i < domain.dimension(); ++i) {
            if (!(domain.lower[i] < domain.upper[i])) {
                fail("domain", "lower < upper in every coordinate");
                break;
            }
        }
    }
    if (!(domain.mark_cap > 0.0)) {
        fail("mark_cap", "mark_cap > 0");
    }
    return r;
}

void require_valid(const ModelParams& params, const Domain& domain, const ScalingSchedule& sched) {
    const auto r = validate(params, domain, sched);
    if (!r.ok()) {
        throw ValidationError(r.describe());
    }
}

}  // namespace sinrldp
