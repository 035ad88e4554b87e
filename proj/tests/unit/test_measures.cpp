#include "oracles.hpp"
#include "sinrldp/errors.hpp"
#include "sinrldp/measures.hpp"
#include "sinrldp/realization.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace sinrldp;

namespace {

BinGrid unit_grid(std::size_t s = 8, std::size_t m = 8) {
    return BinGrid(Domain{}, 1.0, s, m);
}

}  // namespace

TEST(Grid, Partition) {
    const auto g = unit_grid();
    EXPECT_EQ(g.cell_count(), 512u);
    const auto edges = g.mark_edges();
    ASSERT_EQ(edges.size(), 9u);
    EXPECT_EQ(edges.front(), 0.0);
    EXPECT_EQ(edges.back(), g.domain().mark_cap);
    EXPECT_TRUE(std::is_sorted(edges.begin(), edges.end()));
    double total = 0.0;
    for (std::size_t m = 0; m < 8; ++m) {
        total += g.mark_bin_probability(m);
    }
    EXPECT_NEAR(total, 1.0, 1e-15);
}

TEST(Grid, CellLookup) {
    const auto g = unit_grid(2, 2);
    EXPECT_EQ(g.mark_index(0.0), 0u);
    EXPECT_EQ(g.mark_index(g.mark_edges()[1]), 0u);
    EXPECT_EQ(g.mark_index(std::nextafter(g.mark_edges()[1], 10.0)), 1u);
    EXPECT_EQ(g.mark_index(100.0), 1u);
    EXPECT_EQ(g.spatial_index(std::vector<double>{0.75, 0.25}), 1u);
    EXPECT_EQ(g.spatial_index(std::vector<double>{0.25, 0.75}), 2u);
    EXPECT_EQ(g.spatial_index(std::vector<double>{1.0, 1.0}), 3u);
    const auto b = g.bounds(g.cell_of(MarkedPoint{{0.75, 0.25}, 100.0}));
    EXPECT_EQ(b.lower, (std::vector<double>{0.5, 0.0}));
    EXPECT_EQ(b.upper, (std::vector<double>{1.0, 0.5}));
    EXPECT_EQ(b.mark_upper, g.domain().mark_cap);
}

TEST(Grid, ReferenceMeasure) {
    const auto g = unit_grid();
    const auto ref = reference_measure(g, ModelParams{});
    EXPECT_NEAR(ref.mass(), 1.0, 1e-12);
    for (double w : ref.weights) {
        EXPECT_GT(w, 0.0);
    }
    ModelParams p;
    p.mu = SpatialDensity::custom([](std::span<const double> x) { return 2.0 * x[0]; }, 2.0, "ramp");
    const auto ramp = reference_measure(unit_grid(2, 1), p);
    EXPECT_NEAR(ramp.weights[0], 0.125, 1e-12);
    EXPECT_NEAR(ramp.weights[1], 0.375, 1e-12);
    EXPECT_GE(ramp.mass(), 0.999);
}

TEST(M1, Definition) {
    const auto g = unit_grid();
    PointSample empty;
    EXPECT_EQ(m1(empty, g, 10.0).mass(), 0.0);
    PointSample s;
    for (int i = 0; i < 10; ++i) {
        s.points.push_back(MarkedPoint{{0.01, 0.01}, 0.01});
    }
    const auto w = m1(s, g, 10.0);
    EXPECT_EQ(w.weights[0], 1.0);
    EXPECT_EQ(w.mass(), 1.0);
    const auto diag = m_diag(s, g, 10.0);
    EXPECT_EQ(diag.at(0, 0), 1.0);
    EXPECT_EQ(diag.mass(), w.mass());
}

TEST(M2, Definition) {
    const auto g = unit_grid(2, 1);
    PointSample s;
    s.points = {MarkedPoint{{0.1, 0.1}, 1.0}, MarkedPoint{{0.9, 0.1}, 1.0}, MarkedPoint{{0.2, 0.2}, 1.0}};
    EXPECT_EQ(m2(s, EdgeSet{}, g, 2.0, 0.5).mass(), 0.0);
    const auto cross = m2(s, EdgeSet::from_pairs({{0, 1}}), g, 2.0, 0.5);
    EXPECT_EQ(cross.at(0, 1), 0.5);
    EXPECT_EQ(cross.at(1, 0), 0.5);
    EXPECT_EQ(cross.mass(), 1.0);
    const auto same = m2(s, EdgeSet::from_pairs({{0, 2}}), g, 2.0, 0.5);
    EXPECT_EQ(same.at(0, 0), 1.0);
    EXPECT_EQ(same.mass(), 1.0);
    EXPECT_TRUE(cross.symmetric());
}

TEST(M2, ExactMassIdentities) {
    NetworkModel model;
    model.params.lambda = 300;
    const auto y = generate_realization(model, 17);
    const auto g = unit_grid();
    const auto w1 = m1(y.sample, g, 300.0);
    const auto w2 = m2(y.sample, y.edges, g, 300.0, model.a_lambda());
    EXPECT_DOUBLE_EQ(w1.mass(), static_cast<double>(y.sample.size()) / 300.0);
    EXPECT_DOUBLE_EQ(w2.mass(), 2.0 * static_cast<double>(y.edges.size()) / (300.0 * 300.0 * model.a_lambda()));
    EXPECT_TRUE(w2.symmetric());
}

TEST(M1, BruteForceBinning) {
    NetworkModel model;
    model.params.lambda = 6;
    model.limit = LimitKernel::constant(50.0);
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto y = generate_realization(model, seed);
        if (y.sample.size() > 6) {
            continue;
        }
        const auto g = unit_grid(3, 4);
        EXPECT_EQ(m1(y.sample, g, 6.0).weights, oracle::m1(y.sample.points, g.domain(), 1.0, 3, 4, 6.0));
        const std::vector<EdgeSet::Edge> e(y.edges.begin(), y.edges.end());
        EXPECT_EQ(m2(y.sample, y.edges, g, 6.0, model.a_lambda()).weights,
                  oracle::m2(y.sample.points, e, g.domain(), 1.0, 3, 4, 6.0, model.a_lambda()));
    }
}

TEST(M1, ConcentratesAtLambda1000) {
    NetworkModel model;
    model.params.lambda = 1000;
    model.limit = LimitKernel::constant(0.0);
    const auto g = unit_grid();
    const auto ref = reference_measure(g, model.params);
    std::vector<double> avg(g.cell_count(), 0.0);
    for (int r = 0; r < 50; ++r) {
        const auto w = m1(generate_realization(model, 1000 + r).sample, g, 1000.0);
        for (std::size_t i = 0; i < avg.size(); ++i) {
            avg[i] += w.weights[i] / 50.0;
        }
    }
    double sup = 0.0;
    for (std::size_t i = 0; i < avg.size(); ++i) {
        sup = std::max(sup, std::fabs(avg[i] - ref.weights[i]));
    }
    EXPECT_LT(sup, 0.02);
}

TEST(M2, AnnealedUnitKernelMass) {
    NetworkModel model;
    model.params.lambda = 200;
    model.limit = LimitKernel::constant(1.0);
    const auto g = unit_grid(2, 2);
    const int reps = 200;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int r = 0; r < reps; ++r) {
        const auto y = generate_realization(model, 5000 + r);
        const double mass = m2(y.sample, y.edges, g, 200.0, model.a_lambda()).mass();
        sum += mass;
        sum_sq += mass * mass;
    }
    const double mean = sum / reps;
    const double sd = std::sqrt(sum_sq / reps - mean * mean);
    // E[N(N-1)] = lambda^2 for N ~ Poisson(lambda).
    EXPECT_NEAR(mean, 1.0, 3.0 * sd / std::sqrt(reps));
}

TEST(Product, Examples) {
    const auto g = unit_grid(2, 1);
    BinnedMeasure beta(BinGrid(Domain::unit_box(1), 1.0, 2, 1));
    beta.weights = {0.5, 0.5};
    EXPECT_EQ(product_kernel_measure(beta, PairTable(2, 0.0)).mass(), 0.0);
    const auto ones = product_kernel_measure(beta, PairTable(2, 1.0));
    EXPECT_EQ(ones.weights, (std::vector<double>{0.25, 0.25, 0.25, 0.25}));
    PairTable idx(2, 0.0);
    idx.values = {0.0, 1.0, 1.0, 2.0};
    EXPECT_EQ(product_kernel_measure(beta, idx).weights, (std::vector<double>{0.0, 0.25, 0.25, 0.5}));
    EXPECT_THROW(product_kernel_measure(beta, PairTable(3, 1.0)), GridMismatchError);
}

TEST(Product, Bilinear) {
    const BinGrid g(Domain::unit_box(1), 1.0, 3, 1);
    BinnedMeasure a(g);
    BinnedMeasure b(g);
    a.weights = {0.1, 0.4, 0.2};
    b.weights = {0.3, 0.0, 0.5};
    PairTable t(3, 0.0);
    t.values = {1, 2, 3, 2, 1, 0.5, 3, 0.5, 2};
    const auto pa = product_kernel_measure(scaled(a, 2.0), t);
    const auto base = product_kernel_measure(a, t);
    for (std::size_t i = 0; i < 9; ++i) {
        EXPECT_NEAR(pa.weights[i], 4.0 * base.weights[i], 1e-15);
    }
    EXPECT_TRUE(product_kernel_measure(b, t).symmetric());
}

TEST(SupDistance, Basics) {
    const auto g = unit_grid(2, 1);
    BinnedMeasure p(g);
    BinnedMeasure q(g);
    p.weights = {0.1, 0.2, 0.3, 0.4};
    q = p;
    EXPECT_EQ(sup_distance(p, q), 0.0);
    q.weights[2] += 0.3;
    EXPECT_NEAR(sup_distance(p, q), 0.3, 1e-15);
    EXPECT_EQ(sup_distance(p, q), sup_distance(q, p));
    EXPECT_THROW(sup_distance(p, BinnedMeasure(unit_grid(3, 1))), GridMismatchError);
}

TEST(Ratio, RecoversKernelAndMasks) {
    const auto g = unit_grid(2, 1);
    BinnedMeasure beta(g);
    beta.weights = {0.2, 0.0, 0.3, 0.5};
    PairTable t(4, 0.0);
    for (std::size_t x = 0; x < 4; ++x) {
        for (std::size_t y = 0; y < 4; ++y) {
            t.at(x, y) = 0.5 + 0.25 * static_cast<double>(x + y);
        }
    }
    const auto r = ratio_kernel(product_kernel_measure(beta, t), beta);
    for (std::size_t x = 0; x < 4; ++x) {
        for (std::size_t y = 0; y < 4; ++y) {
            if (x == 1 || y == 1) {
                EXPECT_FALSE(r.is_defined(x, y));
                EXPECT_EQ(r.at(x, y), 0.0);
            } else {
                EXPECT_TRUE(r.is_defined(x, y));
                EXPECT_NEAR(r.at(x, y), t.at(x, y), 1e-14);
            }
        }
    }
}

TEST(Ratio, MonteCarloConsistency) {
    NetworkModel model;
    model.params.lambda = 1600;
    model.limit = LimitKernel::constant(0.7);
    const auto g = unit_grid(2, 2);
    const std::size_t n = g.cell_count();
    BinnedMeasure m1bar(g);
    BinnedPairMeasure m2bar(g);
    const int reps = 100;
    for (int r = 0; r < reps; ++r) {
        const auto y = generate_realization(model, 9000 + r);
        const auto w1 = m1(y.sample, g, 1600.0);
        const auto w2 = m2(y.sample, y.edges, g, 1600.0, model.a_lambda());
        for (std::size_t i = 0; i < n; ++i) {
            m1bar.weights[i] += w1.weights[i] / reps;
        }
        for (std::size_t i = 0; i < n * n; ++i) {
            m2bar.weights[i] += w2.weights[i] / reps;
        }
    }
    const auto t = ratio_kernel(m2bar, m1bar);
    std::vector<double> vals;
    for (std::size_t i = 0; i < n * n; ++i) {
        if (t.is_defined(i / n, i % n)) {
            vals.push_back(t.values[i]);
        }
    }
    std::nth_element(vals.begin(), vals.begin() + vals.size() / 2, vals.end());
    EXPECT_NEAR(vals[vals.size() / 2], 0.7, 0.1);
}

TEST(KernelTable, RepresentativesAndConstant) {
    const auto g = unit_grid(2, 1);
    const auto c = kernel_table(g, LimitKernel::constant(0.7));
    EXPECT_EQ(c.values, std::vector<double>(16, 0.7));
    const auto e = kernel_table(g, LimitKernel::exp_distance(1.0));
    EXPECT_DOUBLE_EQ(e.at(0, 0), 1.0);
    EXPECT_NEAR(e.at(0, 1), std::exp(-0.5), 1e-15);
    EXPECT_NEAR(e.at(0, 3), std::exp(-std::sqrt(0.5)), 1e-15);
    EXPECT_TRUE(e.symmetric());
}
