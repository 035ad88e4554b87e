#include "oracles.hpp"
#include "sinrldp/connectivity.hpp"
#include "sinrldp/errors.hpp"
#include "sinrldp/random.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace sinrldp;

namespace {

MarkedPoint pt(double x, double y, double mark = 1.0) {
    return MarkedPoint{{x, y}, mark};
}

PointSample line3() {
    PointSample s;
    s.points = {pt(0, 0), pt(1, 0), pt(2, 0)};
    return s;
}

ModelParams line_params() {
    ModelParams p;
    p.alpha = 2;
    p.n0 = 1;
    p.bounded_at_zero = false;
    return p;
}

ConnectivityKernel unit_kernel(std::size_t q = 32) {
    ConnectivityKernel k;
    k.quadrature_resolution = q;
    return k;
}

// 2 * integral over the unit square of 1 / (1 + |r|^2), by adaptive quadrature.
constexpr double kTdOracle = 1.279020703740622;

}  // namespace

TEST(PathLoss, BoundedAndSingular) {
    const PathLoss bounded{2.0, true};
    EXPECT_DOUBLE_EQ(bounded(0.0), 1.0);
    EXPECT_DOUBLE_EQ(bounded(0.5), 1.0);
    EXPECT_DOUBLE_EQ(bounded(2.0), 0.25);
    const PathLoss pure{2.0, false};
    EXPECT_DOUBLE_EQ(pure(0.5), 4.0);
    EXPECT_THROW(pure(0.0), SingularityError);
}

TEST(EdgeSetTest, Normalizes) {
    const auto e = EdgeSet::from_pairs({{3, 1}, {1, 3}, {0, 2}});
    ASSERT_EQ(e.size(), 2u);
    EXPECT_TRUE(e.contains(1, 3));
    EXPECT_TRUE(e.contains(3, 1));
    EXPECT_FALSE(e.contains(0, 1));
    EXPECT_EQ(e.edges().front(), (EdgeSet::Edge{0, 2}));
    EXPECT_THROW(EdgeSet::from_pairs({{2, 2}}), ValidationError);
    EXPECT_TRUE(EdgeSet::from_pairs({{0, 2}}).subset_of(e));
    EXPECT_FALSE(e.subset_of(EdgeSet::from_pairs({{0, 2}})));
}

TEST(Sinr, TwoNodesNoNoiseIsInfinite) {
    PointSample s;
    s.points = {pt(0, 0), pt(0.5, 0)};
    EXPECT_TRUE(std::isinf(sinr(s, 0, 1, ModelParams{})));
}

TEST(Sinr, ThreeNodeLine) {
    const auto s = line3();
    const auto p = line_params();
    EXPECT_DOUBLE_EQ(sinr(s, 0, 1, p), 0.5);
    EXPECT_DOUBLE_EQ(sinr(s, 0, 2, p), 0.125);
    EXPECT_DOUBLE_EQ(sinr(s, 1, 0, p), 0.8);
}

TEST(Sinr, SingularityPropagates) {
    PointSample s;
    s.points = {pt(0, 0), pt(0, 0), pt(1, 1)};
    auto p = line_params();
    EXPECT_THROW(sinr(s, 0, 1, p), SingularityError);
    EXPECT_THROW(build_quenched_graph(s, p), SingularityError);
}

TEST(Quenched, ThreeNodeLine) {
    auto p = line_params();
    p.iota = ThresholdFunction::constant(0.1);
    const auto e = build_quenched_graph(line3(), p);
    EXPECT_EQ(e, EdgeSet::from_pairs({{0, 1}, {0, 2}, {1, 2}}));
    p.iota = ThresholdFunction::constant(1e18);
    EXPECT_TRUE(build_quenched_graph(line3(), p).empty());
}

TEST(Quenched, SingleNode) {
    PointSample s;
    s.points = {pt(0.3, 0.3)};
    EXPECT_TRUE(build_quenched_graph(s, ModelParams{}).empty());
}

TEST(Quenched, MatchesBruteForceAndThreadCount) {
    ModelParams p;
    p.lambda = 60;
    p.iota = ThresholdFunction::constant(0.05);
    p.n0 = 0.01;
    const auto s = sample_marked_ppp(p, Domain{}, 31);
    const auto serial = build_quenched_graph(s, p, 1);
    EXPECT_EQ(serial, build_quenched_graph(s, p, 4));
    const auto brute = oracle::quenched_edges(s.points, p);
    EXPECT_EQ(std::vector<EdgeSet::Edge>(brute.begin(), brute.end()), serial.edges());
}

TEST(Quenched, TransmitterSwitch) {
    auto p = line_params();
    p.include_transmitter_in_interference = true;
    // Interference at node 1 now counts node 0 as well: 1 / (1 + 1 + 1).
    EXPECT_DOUBLE_EQ(sinr(line3(), 0, 1, p), 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(oracle::sinr(line3().points, 0, 1, p), 1.0 / 3.0);
}

TEST(TLambdaD, ZetaZero) {
    auto k = unit_kernel();
    k.params.zeta = ThresholdFunction::constant(0.0);
    EXPECT_EQ(t_lambda_d(k, pt(0, 0), pt(1, 0)), 0.0);
    EXPECT_EQ(t_big(k, pt(0, 0), pt(1, 0), 100.0), 1.0);
}

TEST(TLambdaD, UnitSeparationOracle) {
    const auto k = unit_kernel(32);
    const double v = t_lambda_d(k, pt(0, 0), pt(1, 0));
    EXPECT_LT(std::fabs(v - kTdOracle) / kTdOracle, 1e-4);
}

TEST(TLambdaD, Convergence) {
    for (double sep : {0.3, 0.7}) {
        const double a = t_lambda_d(unit_kernel(64), pt(0.2, 0.1), pt(0.2 + sep, 0.1));
        const double b = t_lambda_d(unit_kernel(128), pt(0.2, 0.1), pt(0.2 + sep, 0.1));
        EXPECT_LT(std::fabs(a - b) / b, 1e-3);
    }
}

TEST(TLambdaD, MonotoneInThresholdScale) {
    const auto k = unit_kernel(16);
    const double base = t_lambda_d(k, pt(0.1, 0.2), pt(0.4, 0.6));
    const double doubled = t_lambda_d(with_threshold_scale(k, 2.0), pt(0.1, 0.2), pt(0.4, 0.6));
    EXPECT_GT(doubled, base);
    EXPECT_THROW(t_lambda_d(k, pt(0.1, 0.2), pt(0.1, 0.2)), ValidationError);
}

TEST(TBig, ExponentialForm) {
    const auto k = unit_kernel(16);
    const double td = t_lambda_d(k, pt(0, 0), pt(0.5, 0));
    EXPECT_DOUBLE_EQ(t_big(k, pt(0, 0), pt(0.5, 0), 100.0), std::exp(-100.0 * td));
    EXPECT_NEAR(std::exp(-100.0 * 0.05), 6.7379e-3, 1e-7);
    double prev = 1.0;
    for (double lambda : {1.0, 10.0, 100.0}) {
        const double t = t_big(k, pt(0, 0), pt(0.5, 0), lambda);
        EXPECT_LT(t, prev);
        prev = t;
    }
    auto noisy = k;
    noisy.params.n0 = 0.1;
    EXPECT_THROW(t_big(noisy, pt(0, 0), pt(0.5, 0), 100.0), ModeError);
}

TEST(Limit, Kernels) {
    ConnectivityKernel k;
    k.limit = LimitKernel::constant(1.0);
    EXPECT_EQ(t_limit(k, pt(0, 0), pt(0.2, 0.9)), 1.0);
    k.limit = LimitKernel::exp_distance(1.0);
    EXPECT_NEAR(t_limit(k, pt(0, 0), pt(0.5, 0)), 0.6065306597126334, 1e-15);
    k.limit = LimitKernel{};
    EXPECT_THROW(t_limit(k, pt(0, 0), pt(0.5, 0)), ModeError);
    const auto cal = LimitKernel::calibrated(0.1, 1.0);
    EXPECT_NEAR(cal(pt(0, 0), pt(0.1, 0)), std::exp(-1.0), 1e-15);
    EXPECT_EQ(cal(pt(0, 0), pt(0.3, 0)), 0.0);
    EXPECT_TRUE(std::isinf(cal(pt(0, 0), pt(0.05, 0))));
}

TEST(Annealed, ZeroKernelEmpty) {
    ConnectivityKernel k;
    k.params.lambda = 100;
    k.limit = LimitKernel::constant(0.0);
    const auto s = sample_marked_ppp(k.params, Domain{}, 4);
    EXPECT_TRUE(build_annealed_graph(s, k, ScalingSchedule{}, 4).empty());
}

TEST(Annealed, BinomialEdgeCount) {
    ConnectivityKernel k;
    k.params.lambda = 100;  // a = 100^-1.5 = 0.001
    k.limit = LimitKernel::constant(1.0);
    PointSample s;
    Rng r(1);
    for (int i = 0; i < 200; ++i) {
        s.points.push_back(pt(r.uniform(), r.uniform()));
    }
    const int seeds = 2000;
    double total = 0.0;
    for (int seed = 0; seed < seeds; ++seed) {
        total += static_cast<double>(build_annealed_graph(s, k, ScalingSchedule{}, seed).size());
    }
    const double mean = 19900.0 * 0.001;
    EXPECT_NEAR(total / seeds, mean, 3.0 * std::sqrt(mean * 0.999 / seeds));
}

TEST(Annealed, ClampedProbability) {
    ConnectivityKernel k;
    k.params.lambda = 1.0;
    k.limit = LimitKernel::constant(3.0);
    PointSample s;
    s.points = {pt(0.1, 0.1), pt(0.2, 0.2), pt(0.3, 0.3), pt(0.4, 0.4)};
    EXPECT_EQ(build_annealed_graph(s, k, ScalingSchedule{}, 1).size(), 6u);
    EXPECT_EQ(edge_probability(k, s.points[0], s.points[1], 1.0), 1.0);
}

TEST(Annealed, DistanceKernelMatchesConstantPathStream) {
    // A non-constant kernel that happens to be constant must consume the same uniforms.
    ConnectivityKernel k;
    k.params.lambda = 50;
    k.limit = LimitKernel::constant(0.7);
    const auto s = sample_marked_ppp(k.params, Domain{}, 12);
    auto custom = k;
    custom.limit = LimitKernel::custom([](const MarkedPoint&, const MarkedPoint&) { return 0.7; });
    EXPECT_EQ(build_annealed_graph(s, k, ScalingSchedule{}, 3), build_annealed_graph(s, custom, ScalingSchedule{}, 3));
}

TEST(Calibration, HitsTargetAndConverges) {
    ConnectivityKernel k;
    k.quadrature_resolution = 32;
    const ScalingSchedule sched;
    std::vector<double> scaled;
    for (double lambda : {1e2, 1e3, 1e4}) {
        const auto cal = calibrate_thresholds(k, sched, lambda, 0.1, 0.0);
        ASSERT_TRUE(cal.converged);
        EXPECT_NEAR(cal.target, 1.5 * std::log(lambda), 1e-12);
        const auto ck = with_threshold_scale(k, cal.threshold_scale);
        MarkedPoint a{{0.0, 0.0}, 1.0};
        MarkedPoint b{{0.1, 0.0}, 1.0};
        EXPECT_NEAR(t_big(ck, a, b, lambda) / sched.a(lambda), 1.0, 1e-6);
        b.location[0] = 0.15;
        scaled.push_back(t_big(ck, a, b, lambda) / sched.a(lambda));
    }
    // Beyond the reference distance the scaled kernel decays toward the limit 0.
    EXPECT_GT(scaled[0], scaled[1]);
    EXPECT_GT(scaled[1], scaled[2]);
}
