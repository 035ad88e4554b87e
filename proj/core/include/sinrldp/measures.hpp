#pragma once

#include "sinrldp/connectivity.hpp"
#include "sinrldp/model.hpp"
#include "sinrldp/sampler.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace sinrldp {

struct CellBounds {
    std::vector<double> lower;
    std::vector<double> upper;
    double mark_lower = 0.0;
    double mark_upper = 0.0;
};

/// Partition of domain x (0, mark_cap] into S^d spatial boxes times M mark bins.
///
/// Mark bins are equal-probability under exponential(c) truncated at mark_cap; marks above the
/// cap fall in the top bin. Cell index = spatial_index * M + mark_index, with axis 0 varying
/// fastest inside spatial_index.
class BinGrid {
public:
    BinGrid() = default;
    BinGrid(Domain domain, double c, std::size_t spatial_bins = 8, std::size_t mark_bins = 8);

    std::size_t spatial_bins() const noexcept { return spatial_bins_; }
    std::size_t mark_bins() const noexcept { return mark_bins_; }
    std::size_t spatial_cells() const noexcept { return spatial_cells_; }
    std::size_t cell_count() const noexcept { return spatial_cells_ * mark_bins_; }
    const Domain& domain() const noexcept { return domain_; }
    double mark_rate() const noexcept { return c_; }
    /// M + 1 edges from 0 to mark_cap.
    std::span<const double> mark_edges() const noexcept { return mark_edges_; }

    std::size_t spatial_index(std::span<const double> x) const;
    std::size_t mark_index(double mark) const;
    std::size_t cell_of(const MarkedPoint& p) const;
    std::size_t spatial_of(std::size_t cell) const { return cell / mark_bins_; }
    std::size_t mark_of(std::size_t cell) const { return cell % mark_bins_; }

    CellBounds bounds(std::size_t cell) const;
    /// Exponential probability of the mark bin, the top bin including the tail above the cap.
    double mark_bin_probability(std::size_t m) const;
    /// Representative mark: conditional median of the exponential law inside the bin.
    double mark_representative(std::size_t m) const;
    std::vector<double> spatial_center(std::size_t spatial) const;

    friend bool operator==(const BinGrid&, const BinGrid&) = default;

private:
    Domain domain_;
    double c_ = 1.0;
    std::size_t spatial_bins_ = 0;
    std::size_t mark_bins_ = 0;
    std::size_t spatial_cells_ = 0;
    std::vector<double> mark_edges_;
};

struct BinnedMeasure {
    BinGrid grid;
    std::vector<double> weights;  ///< one per cell

    BinnedMeasure() = default;
    explicit BinnedMeasure(BinGrid g) : grid(std::move(g)), weights(grid.cell_count(), 0.0) {}

    double mass() const;
    std::size_t size() const noexcept { return weights.size(); }

    friend bool operator==(const BinnedMeasure&, const BinnedMeasure&) = default;
};

/// Symmetric measure on ordered cell pairs, stored row-major B x B.
struct BinnedPairMeasure {
    BinGrid grid;
    std::vector<double> weights;

    BinnedPairMeasure() = default;
    explicit BinnedPairMeasure(BinGrid g)
        : grid(std::move(g)), weights(grid.cell_count() * grid.cell_count(), 0.0) {}

    std::size_t cells() const noexcept { return grid.cell_count(); }
    double at(std::size_t x, std::size_t y) const { return weights[x * cells() + y]; }
    double& at(std::size_t x, std::size_t y) { return weights[x * cells() + y]; }
    double mass() const;
    bool symmetric() const;

    friend bool operator==(const BinnedPairMeasure&, const BinnedPairMeasure&) = default;
};

/// Values on ordered cell pairs with an optional definedness mask.
struct PairTable {
    std::size_t cells = 0;
    std::vector<double> values;
    std::vector<std::uint8_t> defined;  ///< empty means every entry is defined

    PairTable() = default;
    PairTable(std::size_t n, double fill) : cells(n), values(n * n, fill) {}

    double at(std::size_t x, std::size_t y) const { return values[x * cells + y]; }
    double& at(std::size_t x, std::size_t y) { return values[x * cells + y]; }
    bool is_defined(std::size_t x, std::size_t y) const { return defined.empty() || defined[x * cells + y] != 0; }
    bool symmetric() const;

    friend bool operator==(const PairTable&, const PairTable&) = default;
};

/// mu (x) K on the grid: spatial mass of each box times the exponential mass of each mark bin.
BinnedMeasure reference_measure(const BinGrid& grid, const ModelParams& params);

/// The limit kernel evaluated at cell representatives (spatial center, conditional-median mark).
PairTable kernel_table(const BinGrid& grid, const LimitKernel& t);

/// Empirical power measure: 1/lambda per point.
BinnedMeasure m1(const PointSample& sample, const BinGrid& grid, double lambda);

/// Empirical connectivity measure: 1/(lambda^2 a) on both ordered cell pairs of every edge.
BinnedPairMeasure m2(const PointSample& sample, const EdgeSet& edges, const BinGrid& grid, double lambda,
                     double a_lambda);

/// Diagonal measure: 1/lambda on (cell(u), cell(u)) for every point.
BinnedPairMeasure m_diag(const PointSample& sample, const BinGrid& grid, double lambda);

/// w(x, y) = t(x, y) beta(x) beta(y).
BinnedPairMeasure product_kernel_measure(const BinnedMeasure& beta, const PairTable& t_table);

double sup_distance(const BinnedMeasure& p, const BinnedMeasure& q);
double sup_distance(const BinnedPairMeasure& p, const BinnedPairMeasure& q);

/// t_hat(x, y) = m2bar(x, y) / (m1bar(x) m1bar(y)); entries touching a cell with m1bar = 0
/// are flagged undefined and set to 0.
PairTable ratio_kernel(const BinnedPairMeasure& m2bar, const BinnedMeasure& m1bar);

BinnedMeasure scaled(BinnedMeasure m, double factor);
BinnedPairMeasure scaled(BinnedPairMeasure m, double factor);

}  // namespace sinrldp
