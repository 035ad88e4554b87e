#pragma once

#include "sinrldp/connectivity.hpp"
#include "sinrldp/measures.hpp"
#include "sinrldp/realization.hpp"

#include <limits>
#include <span>
#include <string>
#include <vector>

namespace sinrldp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Pairing convention: pair measures store both ordered entries (x, y) and (y, x), every
/// functional below sums over ordered pairs, and the single factor 1/2 of the speed
/// lambda^2 a_lambda rate lives only in the Kullback action (closed form and dual).

// Relative entropy sum phi log(phi / nu), with 0 log 0 = 0 and +inf when phi charges a
// cell where nu vanishes. Evaluated term-wise as sum[phi log(phi/nu) - phi + nu] + (|phi| - |nu|)
// so equal-mass inputs never round below zero.
double rel_entropy(std::span<const double> phi, std::span<const double> nu);
double rel_entropy(const BinnedMeasure& phi, const BinnedMeasure& nu);
double rel_entropy(const BinnedPairMeasure& phi, const BinnedPairMeasure& nu);

/// H(phi | nu) + |nu| - |phi| when |phi| > 0, +inf otherwise.
double tilted_entropy(std::span<const double> phi, std::span<const double> nu);
double tilted_entropy(const BinnedPairMeasure& phi, const BinnedPairMeasure& nu);

/// Default tolerance for the rate functions' consistency constraints on analytic inputs.
inline constexpr double kAnalyticConsistencyTolerance = 1e-9;

/// Speed-lambda rate: H(beta | reference) if phi = t beta (x) beta within `tol`, else +inf.
double rate_i1(const BinnedMeasure& beta, const BinnedPairMeasure& phi, const BinnedMeasure& reference,
               const PairTable& t_table, double tol = kAnalyticConsistencyTolerance);

/// Speed-lambda^2 a rate: tilted_entropy(phi, t beta (x) beta) if beta = reference within `tol`, else +inf.
/// This is the unhalved form; the Kullback action carries the 1/2.
double rate_i2(const BinnedMeasure& beta, const BinnedPairMeasure& phi, const BinnedMeasure& reference,
               const PairTable& t_table, double tol = kAnalyticConsistencyTolerance);

struct RateReport {
    double i1 = 0.0;
    double i2 = 0.0;
    double kullback = 0.0;               ///< i2 / 2 evaluated at the realized beta
    double relative_entropy_term = 0.0;  ///< H(beta | reference)
    double mass_difference_term = 0.0;   ///< |t beta (x) beta| - |phi|
    double consistency_i1 = 0.0;         ///< sup |phi - t beta (x) beta|
    double consistency_i2 = 0.0;         ///< sup |beta - reference|
    bool i1_infinite = false;
    bool i2_infinite = false;
    double mass_beta = 0.0;
    double mass_phi = 0.0;
    double mass_product = 0.0;

    friend bool operator==(const RateReport&, const RateReport&) = default;
};

RateReport rate_report(const BinnedMeasure& beta, const BinnedPairMeasure& phi, const BinnedMeasure& reference,
                       const PairTable& t_table, double tol = kAnalyticConsistencyTolerance);

/// Bounded symmetric test function on ordered cell pairs.
struct TestFunction {
    std::size_t cells = 0;
    std::vector<double> values;

    TestFunction() = default;
    TestFunction(std::size_t n, double fill) : cells(n), values(n * n, fill) {}
    double at(std::size_t x, std::size_t y) const { return values[x * cells + y]; }
    double& at(std::size_t x, std::size_t y) { return values[x * cells + y]; }
    bool valid() const;
};

/// Values above this are rejected by the spectral potential to avoid exp overflow.
inline constexpr double kMaxExponent = 700.0;

/// rho_t(q, beta) = sum over ordered pairs of (e^q - 1) t beta (x) beta.
double spectral_potential(std::span<const double> q, std::span<const double> nu);
double spectral_potential(const TestFunction& q, const BinnedMeasure& beta, const PairTable& t_table);
/// d rho / d q(x, y) = e^q(x, y) t beta (x) beta (x, y).
std::vector<double> spectral_potential_gradient(std::span<const double> q, std::span<const double> nu);

/// I_beta(phi) = tilted_entropy(phi, t beta (x) beta) / 2.
double kullback_action_closed(const BinnedPairMeasure& phi, const BinnedMeasure& beta, const PairTable& t_table);
double kullback_action_closed(std::span<const double> phi, std::span<const double> nu);

/// (1/2) [<q, phi> - rho(q)]; entries with q = -inf contribute their limit.
double dual_objective(std::span<const double> q, std::span<const double> phi, std::span<const double> nu);
std::vector<double> dual_gradient(std::span<const double> q, std::span<const double> phi,
                                  std::span<const double> nu);

enum class DualStart { stationary, zero };

struct DualOptions {
    DualStart start = DualStart::stationary;
    int max_iterations = 200;
    double gradient_tolerance = 1e-15;
};

struct DualResult {
    double value = 0.0;
    std::vector<double> maximizer;  ///< -inf where phi = 0 < nu
    int iterations = 0;
    double gradient_norm = 0.0;     ///< max |gradient| at the returned point
    bool support_violation = false;
    std::string diagnostic;
};

/// Numerical Legendre dual sup_q (1/2)[<q, phi> - rho_t(q, beta)] by per-cell damped Newton
/// ascent (the objective is separable and concave). Matches kullback_action_closed.
DualResult kullback_action_dual(std::span<const double> phi, std::span<const double> nu,
                                const DualOptions& options = {});
DualResult kullback_action_dual(const BinnedPairMeasure& phi, const BinnedMeasure& beta, const PairTable& t_table,
                                const DualOptions& options = {});

/// h(phi) = (|phi| - |nu_ref| - <phi, log(phi / |nu_ref|)>) / 2 with nu_ref = t beta (x) beta.
double entropy_h(std::span<const double> phi, std::span<const double> nu_ref);
double entropy_h(const BinnedPairMeasure& phi, const BinnedPairMeasure& nu_ref);
/// Variant that keeps the lambda factor in the mass term: |phi| - lambda |beta|^2 - ....
double entropy_h_lambda_weighted(const BinnedPairMeasure& phi, const BinnedPairMeasure& nu_ref, double lambda,
                                 const BinnedMeasure& beta);

struct LikelihoodTerms {
    double node = 0.0;     ///< sum log density of mu (x) K at each marked point
    double edge = 0.0;     ///< sum over edges of log(p / (1 - p))
    double nonedge = 0.0;  ///< sum over all unordered pairs of log(1 - p)
    double total = 0.0;
};

/// Log-probability density of an annealed realization with p(u, v) = min(1, a t(u, v)).
/// Throws DegenerateProbabilityError when an edge has p in {0, 1} or a non-edge has p = 1.
LikelihoodTerms log_likelihood(const SinrRealization& y, const ConnectivityKernel& kernel,
                               const ScalingSchedule& sched);
LikelihoodTerms log_likelihood(const SinrRealization& y);

/// -log_likelihood / (a lambda^2 log lambda); needs lambda > 1.
double aep_statistic(const SinrRealization& y, const ConnectivityKernel& kernel, const ScalingSchedule& sched);
double aep_statistic(const SinrRealization& y);

struct EntropyQuadrature {
    std::size_t spatial_resolution = 64;  ///< per axis; distance-only kernels on uniform mu
    std::size_t general_resolution = 16;  ///< per axis for the full tensor rule
    std::size_t mark_nodes = 8;           ///< equal-probability mark nodes per point
};

/// H(f) = E[t((a, l_a), (b, l_b))] with a, b ~ mu i.i.d. and marks i.i.d. exponential(c).
double model_entropy(const ConnectivityKernel& kernel, const EntropyQuadrature& quad = {});

/// lambda^2 a log(lambda) H(f) / log 2.
double bits_estimate(double model_entropy, double lambda, const ScalingSchedule& sched);

/// lambda^2 a h(phi).
double cardinality_exponent(const BinnedPairMeasure& phi, const BinnedPairMeasure& nu_ref, double lambda,
                            const ScalingSchedule& sched);

}  // namespace sinrldp
