#include "sinrldp/measures.hpp"

#include "sinrldp/errors.hpp"
#include "sinrldp/summation.hpp"

#include <algorithm>
#include <cmath>

namespace sinrldp {

namespace {

void require_same_grid(const BinGrid& a, const BinGrid& b) {
    if (!(a == b)) {
        throw GridMismatchError("measures are defined on different grids");
    }
}

template <class Vec>
double sup_abs_diff(const Vec& p, const Vec& q) {
    double m = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        m = std::max(m, std::fabs(p[i] - q[i]));
    }
    return m;
}

}  // namespace

BinGrid::BinGrid(Domain domain, double c, std::size_t spatial_bins, std::size_t mark_bins)
    : domain_(std::move(domain)), c_(c), spatial_bins_(spatial_bins), mark_bins_(mark_bins) {
    if (spatial_bins_ == 0 || mark_bins_ == 0) {
        throw ValidationError("grid needs at least one spatial and one mark bin");
    }
    if (!(c_ > 0.0) || !(domain_.mark_cap > 0.0)) {
        throw ValidationError("grid needs c > 0 and mark_cap > 0");
    }
    spatial_cells_ = 1;
    for (std::size_t i = 0; i < domain_.dimension(); ++i) {
        spatial_cells_ *= spatial_bins_;
    }
    const double cap = domain_.mark_cap;
    const double f_cap = -std::expm1(-c_ * cap);
    mark_edges_.resize(mark_bins_ + 1);
    mark_edges_[0] = 0.0;
    for (std::size_t k = 1; k < mark_bins_; ++k) {
        const double p = f_cap * static_cast<double>(k) / static_cast<double>(mark_bins_);
        mark_edges_[k] = -std::log1p(-p) / c_;
    }
    mark_edges_[mark_bins_] = cap;
}

std::size_t BinGrid::spatial_index(std::span<const double> x) const {
    std::size_t index = 0;
    std::size_t stride = 1;
    for (std::size_t i = 0; i < domain_.dimension(); ++i) {
        const double rel = (x[i] - domain_.lower[i]) / domain_.extent(i);
        auto k = static_cast<std::ptrdiff_t>(std::floor(rel * static_cast<double>(spatial_bins_)));
        k = std::clamp<std::ptrdiff_t>(k, 0, static_cast<std::ptrdiff_t>(spatial_bins_) - 1);
        index += static_cast<std::size_t>(k) * stride;
        stride *= spatial_bins_;
    }
    return index;
}

std::size_t BinGrid::mark_index(double mark) const {
    // Bins are (e_k, e_{k+1}]; count the inner edges strictly below the mark.
    const auto inner_begin = mark_edges_.begin() + 1;
    const auto inner_end = mark_edges_.end() - 1;
    return static_cast<std::size_t>(std::lower_bound(inner_begin, inner_end, mark) - inner_begin);
}

std::size_t BinGrid::cell_of(const MarkedPoint& p) const {
    return spatial_index(p.location) * mark_bins_ + mark_index(p.mark);
}

CellBounds BinGrid::bounds(std::size_t cell) const {
    CellBounds b;
    const std::size_t d = domain_.dimension();
    b.lower.resize(d);
    b.upper.resize(d);
    std::size_t rest = spatial_of(cell);
    for (std::size_t i = 0; i < d; ++i) {
        const std::size_t k = rest % spatial_bins_;
        rest /= spatial_bins_;
        const double w = domain_.extent(i) / static_cast<double>(spatial_bins_);
        b.lower[i] = domain_.lower[i] + static_cast<double>(k) * w;
        b.upper[i] = k + 1 == spatial_bins_ ? domain_.upper[i] : b.lower[i] + w;
    }
    const std::size_t m = mark_of(cell);
    b.mark_lower = mark_edges_[m];
    b.mark_upper = mark_edges_[m + 1];
    return b;
}

double BinGrid::mark_bin_probability(std::size_t m) const {
    const double f_cap = -std::expm1(-c_ * domain_.mark_cap);
    double p = f_cap / static_cast<double>(mark_bins_);
    if (m + 1 == mark_bins_) {
        p += 1.0 - f_cap;
    }
    return p;
}

double BinGrid::mark_representative(std::size_t m) const {
    const double lo = mark_edges_[m];
    const double tail_lo = std::exp(-c_ * lo);
    // Top bin: median of the exponential conditioned on exceeding lo.
    const double tail_hi = m + 1 == mark_bins_ ? 0.0 : std::exp(-c_ * mark_edges_[m + 1]);
    return -std::log(0.5 * (tail_lo + tail_hi)) / c_;
}

std::vector<double> BinGrid::spatial_center(std::size_t spatial) const {
    const auto b = bounds(spatial * mark_bins_);
    std::vector<double> c(b.lower.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        c[i] = 0.5 * (b.lower[i] + b.upper[i]);
    }
    return c;
}

double BinnedMeasure::mass() const {
    return compensated_sum(weights);
}

double BinnedPairMeasure::mass() const {
    return compensated_sum(weights);
}

bool BinnedPairMeasure::symmetric() const {
    const std::size_t n = cells();
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = x + 1; y < n; ++y) {
            if (at(x, y) != at(y, x)) {
                return false;
            }
        }
    }
    return true;
}

bool PairTable::symmetric() const {
    for (std::size_t x = 0; x < cells; ++x) {
        for (std::size_t y = x + 1; y < cells; ++y) {
            if (at(x, y) != at(y, x) || is_defined(x, y) != is_defined(y, x)) {
                return false;
            }
        }
    }
    return true;
}

BinnedMeasure reference_measure(const BinGrid& grid, const ModelParams& params) {
    BinnedMeasure out(grid);
    const std::size_t s_cells = grid.spatial_cells();
    std::vector<double> spatial(s_cells);
    for (std::size_t s = 0; s < s_cells; ++s) {
        if (params.mu.is_uniform()) {
            spatial[s] = 1.0 / static_cast<double>(s_cells);
        } else {
            const auto b = grid.bounds(s * grid.mark_bins());
            Domain cell;
            cell.lower = b.lower;
            cell.upper = b.upper;
            cell.mark_cap = grid.domain().mark_cap;
            spatial[s] = params.mu.integrate(cell, 8);
        }
    }
    for (std::size_t s = 0; s < s_cells; ++s) {
        for (std::size_t m = 0; m < grid.mark_bins(); ++m) {
            out.weights[s * grid.mark_bins() + m] = spatial[s] * grid.mark_bin_probability(m);
        }
    }
    return out;
}

PairTable kernel_table(const BinGrid& grid, const LimitKernel& t) {
    const std::size_t n = grid.cell_count();
    if (t.kind() == LimitKind::constant) {
        return PairTable(n, t.parameter(0));
    }
    std::vector<MarkedPoint> reps(n);
    for (std::size_t cell = 0; cell < n; ++cell) {
        reps[cell].location = grid.spatial_center(grid.spatial_of(cell));
        reps[cell].mark = grid.mark_representative(grid.mark_of(cell));
    }
    PairTable out(n, 0.0);
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = x; y < n; ++y) {
            const double v = t(reps[x], reps[y]);
            out.at(x, y) = v;
            out.at(y, x) = v;
        }
    }
    return out;
}

BinnedMeasure m1(const PointSample& sample, const BinGrid& grid, double lambda) {
    std::vector<std::uint64_t> counts(grid.cell_count(), 0);
    for (const auto& p : sample.points) {
        ++counts[grid.cell_of(p)];
    }
    BinnedMeasure out(grid);
    for (std::size_t i = 0; i < counts.size(); ++i) {
        out.weights[i] = static_cast<double>(counts[i]) / lambda;
    }
    return out;
}

BinnedPairMeasure m2(const PointSample& sample, const EdgeSet& edges, const BinGrid& grid, double lambda,
                     double a_lambda) {
    const std::size_t n = grid.cell_count();
    std::vector<std::uint64_t> counts(n * n, 0);
    std::vector<std::size_t> cell(sample.points.size());
    for (std::size_t i = 0; i < sample.points.size(); ++i) {
        cell[i] = grid.cell_of(sample.points[i]);
    }
    for (const auto& [u, v] : edges) {
        ++counts[cell[u] * n + cell[v]];
        ++counts[cell[v] * n + cell[u]];
    }
    const double norm = lambda * lambda * a_lambda;
    BinnedPairMeasure out(grid);
    for (std::size_t i = 0; i < counts.size(); ++i) {
        out.weights[i] = static_cast<double>(counts[i]) / norm;
    }
    return out;
}

BinnedPairMeasure m_diag(const PointSample& sample, const BinGrid& grid, double lambda) {
    const std::size_t n = grid.cell_count();
    std::vector<std::uint64_t> counts(n, 0);
    for (const auto& p : sample.points) {
        ++counts[grid.cell_of(p)];
    }
    BinnedPairMeasure out(grid);
    for (std::size_t x = 0; x < n; ++x) {
        out.at(x, x) = static_cast<double>(counts[x]) / lambda;
    }
    return out;
}

BinnedPairMeasure product_kernel_measure(const BinnedMeasure& beta, const PairTable& t_table) {
    const std::size_t n = beta.grid.cell_count();
    if (t_table.cells != n) {
        throw GridMismatchError("kernel table size does not match the grid");
    }
    BinnedPairMeasure out(beta.grid);
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = 0; y < n; ++y) {
            out.at(x, y) = t_table.at(x, y) * beta.weights[x] * beta.weights[y];
        }
    }
    return out;
}

double sup_distance(const BinnedMeasure& p, const BinnedMeasure& q) {
    require_same_grid(p.grid, q.grid);
    return sup_abs_diff(p.weights, q.weights);
}

double sup_distance(const BinnedPairMeasure& p, const BinnedPairMeasure& q) {
    require_same_grid(p.grid, q.grid);
    return sup_abs_diff(p.weights, q.weights);
}

PairTable ratio_kernel(const BinnedPairMeasure& m2bar, const BinnedMeasure& m1bar) {
    require_same_grid(m2bar.grid, m1bar.grid);
    const std::size_t n = m1bar.grid.cell_count();
    PairTable out(n, 0.0);
    out.defined.assign(n * n, 1);
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = 0; y < n; ++y) {
            const double denom = m1bar.weights[x] * m1bar.weights[y];
            if (denom > 0.0) {
                out.at(x, y) = m2bar.at(x, y) / denom;
            } else {
                out.defined[x * n + y] = 0;
            }
        }
    }
    return out;
}

BinnedMeasure scaled(BinnedMeasure m, double factor) {
    for (auto& w : m.weights) {
        w *= factor;
    }
    return m;
}

BinnedPairMeasure scaled(BinnedPairMeasure m, double factor) {
    for (auto& w : m.weights) {
        w *= factor;
    }
    return m;
}

}  // namespace sinrldp
