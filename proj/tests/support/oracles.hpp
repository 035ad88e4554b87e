#pragma once

// Direct implementations used as test oracles. They deliberately avoid the library's
// precomputation, binning helpers and compensated summation.

#include "sinrldp/realization.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <utility>
#include <vector>

namespace oracle {

inline double path_loss(double r, double alpha, bool bounded) {
    const double p = std::pow(r, -alpha);
    return bounded ? std::min(1.0, p) : p;
}

inline double dist(const sinrldp::MarkedPoint& a, const sinrldp::MarkedPoint& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.location.size(); ++i) {
        s += (a.location[i] - b.location[i]) * (a.location[i] - b.location[i]);
    }
    return std::sqrt(s);
}

inline double sinr(const std::vector<sinrldp::MarkedPoint>& pts, std::size_t u, std::size_t v,
                   const sinrldp::ModelParams& p) {
    const double signal = pts[u].mark * path_loss(dist(pts[u], pts[v]), p.alpha, p.bounded_at_zero);
    long double interference = 0.0L;
    for (std::size_t w = 0; w < pts.size(); ++w) {
        if (w == v || (w == u && !p.include_transmitter_in_interference)) {
            continue;
        }
        interference += pts[w].mark * path_loss(dist(pts[w], pts[v]), p.alpha, p.bounded_at_zero);
    }
    const long double denom = p.n0 + p.zeta(pts[v].mark) * interference;
    if (denom == 0.0L) {
        return signal > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    }
    return static_cast<double>(signal / denom);
}

inline std::set<std::pair<std::uint32_t, std::uint32_t>> quenched_edges(
    const std::vector<sinrldp::MarkedPoint>& pts, const sinrldp::ModelParams& p) {
    std::set<std::pair<std::uint32_t, std::uint32_t>> e;
    for (std::size_t u = 0; u < pts.size(); ++u) {
        for (std::size_t v = u + 1; v < pts.size(); ++v) {
            if (sinr(pts, u, v, p) >= p.iota(pts[v].mark) && sinr(pts, v, u, p) >= p.iota(pts[u].mark)) {
                e.insert({static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v)});
            }
        }
    }
    return e;
}

// Cell index by linear scans: spatial boxes of width extent/S (last one closed), mark bins
// (e_k, e_{k+1}] with the top bin open-ended.
inline std::size_t cell(const sinrldp::MarkedPoint& p, const sinrldp::Domain& dom, double c, std::size_t S,
                        std::size_t M) {
    std::size_t spatial = 0;
    std::size_t stride = 1;
    for (std::size_t i = 0; i < dom.dimension(); ++i) {
        std::size_t k = 0;
        while (k + 1 < S && p.location[i] >= dom.lower[i] + static_cast<double>(k + 1) * (dom.extent(i) / S)) {
            ++k;
        }
        spatial += k * stride;
        stride *= S;
    }
    const double fcap = 1.0 - std::exp(-c * dom.mark_cap);
    std::size_t m = 0;
    while (m + 1 < M) {
        const double edge = -std::log(1.0 - fcap * static_cast<double>(m + 1) / static_cast<double>(M)) / c;
        if (p.mark <= edge) {
            break;
        }
        ++m;
    }
    return spatial * M + m;
}

inline std::vector<double> m1(const std::vector<sinrldp::MarkedPoint>& pts, const sinrldp::Domain& dom, double c,
                              std::size_t S, std::size_t M, double lambda) {
    std::size_t cells = M;
    for (std::size_t i = 0; i < dom.dimension(); ++i) {
        cells *= S;
    }
    std::vector<double> w(cells, 0.0);
    std::vector<int> counts(cells, 0);
    for (const auto& p : pts) {
        ++counts[cell(p, dom, c, S, M)];
    }
    for (std::size_t i = 0; i < cells; ++i) {
        w[i] = counts[i] / lambda;
    }
    return w;
}

inline std::vector<double> m2(const std::vector<sinrldp::MarkedPoint>& pts,
                              const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges,
                              const sinrldp::Domain& dom, double c, std::size_t S, std::size_t M, double lambda,
                              double a) {
    std::size_t cells = M;
    for (std::size_t i = 0; i < dom.dimension(); ++i) {
        cells *= S;
    }
    std::vector<int> counts(cells * cells, 0);
    for (const auto& [u, v] : edges) {
        const std::size_t x = cell(pts[u], dom, c, S, M);
        const std::size_t y = cell(pts[v], dom, c, S, M);
        counts[x * cells + y] += 1;
        counts[y * cells + x] += 1;
    }
    std::vector<double> w(cells * cells);
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = counts[i] / (lambda * lambda * a);
    }
    return w;
}

// Direct evaluation of the realization log-density with probabilities p(u, v) = min(1, a t).
template <class T>
double log_likelihood(const sinrldp::SinrRealization& y, T&& t, double a) {
    const auto& pts = y.sample.points;
    const auto& par = y.model.params;
    long double ll = 0.0L;
    for (const auto& p : pts) {
        ll += std::log(par.mu(y.model.domain, p.location) * par.c * std::exp(-par.c * p.mark));
    }
    std::set<std::pair<std::uint32_t, std::uint32_t>> e(y.edges.begin(), y.edges.end());
    for (std::size_t u = 0; u < pts.size(); ++u) {
        for (std::size_t v = u + 1; v < pts.size(); ++v) {
            const double p = std::min(1.0, a * t(pts[u], pts[v]));
            const bool present = e.count({static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v)}) > 0;
            ll += present ? std::log(p) : std::log(1.0 - p);
        }
    }
    return static_cast<double>(ll);
}

}  // namespace oracle
