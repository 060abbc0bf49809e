// SPDX-License-Identifier: Apache-2.0
//
// tiltcov: uplink coverage and antenna tilt analysis for 3D-beamforming massive MIMO
// Copyright (C) 2026 The tiltcov authors
// ------------------------------------------------------------------------

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <queue>
#include <span>
#include <vector>

namespace tiltcov {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    explicit GaussLegendreRule(int order);

    /// Cached rule for `order`; thread-safe after first use of each order.
    static const GaussLegendreRule &cached(int order);
};

struct AdaptiveOptions {
    double abs_tol = 1e-9;
    double rel_tol = 1e-6;
    int order = 10;
    int initial_panels = 1;
    std::size_t max_panels = 1'000'000;
};

struct AdaptiveResult {
    std::vector<double> value;
    std::vector<double> error;
    std::size_t evals = 0;
    std::size_t panels = 0;
    bool converged = false;

    double max_error() const { return error.empty() ? 0.0 : *std::max_element(error.begin(), error.end()); }
};

/// Globally adaptive composite Gauss-Legendre for a vector-valued integrand.
///
/// Every panel is integrated once as a whole and once as two halves; the
/// difference is its error estimate. The panel with the largest error is
/// bisected until each component k satisfies
/// err_k <= max(abs_tol, rel_tol * |value_k|) or the panel budget runs out.
///
/// `f(x, out)` writes `dim` values into `out`. The initial panels are the
/// intervals between consecutive `edges` (sorted); put known kinks of the
/// integrand on edges.
template <class Integrand>
AdaptiveResult integrate_adaptive_panels(Integrand &&f, std::span<const double> edges,
                                         std::size_t dim, const AdaptiveOptions &opt = {});

/// Same, over [lo, hi] split into `opt.initial_panels` equal panels.
template <class Integrand>
AdaptiveResult integrate_adaptive(Integrand &&f, double lo, double hi, std::size_t dim,
                                  const AdaptiveOptions &opt = {})
{
    const int n0 = std::max(1, opt.initial_panels);
    std::vector<double> edges(static_cast<std::size_t>(n0) + 1);
    for (int i = 0; i <= n0; ++i) {
        edges[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / n0;
    }
    edges.back() = hi;
    return integrate_adaptive_panels(std::forward<Integrand>(f), edges, dim, opt);
}

template <class Integrand>
AdaptiveResult integrate_adaptive_panels(Integrand &&f, std::span<const double> edges,
                                         std::size_t dim, const AdaptiveOptions &opt)
{
    const GaussLegendreRule &rule = GaussLegendreRule::cached(opt.order);
    AdaptiveResult res;
    res.value.assign(dim, 0.0);
    res.error.assign(dim, 0.0);
    const double lo = edges.empty() ? 0.0 : edges.front();
    const double hi = edges.empty() ? 0.0 : edges.back();
    if (!(hi > lo) || dim == 0) {
        res.converged = true;
        return res;
    }

    std::vector<double> scratch(dim);
    auto gauss = [&](double a, double b, std::vector<double> &acc) {
        acc.assign(dim, 0.0);
        const double half = 0.5 * (b - a);
        const double mid = 0.5 * (b + a);
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            f(mid + half * rule.nodes[i], std::span<double>(scratch));
            for (std::size_t k = 0; k < dim; ++k) {
                acc[k] += rule.weights[i] * scratch[k];
            }
        }
        for (auto &v : acc) {
            v *= half;
        }
        res.evals += rule.nodes.size();
    };

    struct Panel {
        double a, b;
        std::vector<double> left, right, err;
        double worst;
    };
    auto by_worst = [](const Panel &p, const Panel &q) { return p.worst < q.worst; };
    std::priority_queue<Panel, std::vector<Panel>, decltype(by_worst)> queue(by_worst);

    auto make_panel = [&](double a, double b, const std::vector<double> &whole) {
        Panel p{a, b, {}, {}, std::vector<double>(dim), 0.0};
        const double m = 0.5 * (a + b);
        gauss(a, m, p.left);
        gauss(m, b, p.right);
        for (std::size_t k = 0; k < dim; ++k) {
            p.err[k] = std::abs(p.left[k] + p.right[k] - whole[k]);
            p.worst = std::max(p.worst, p.err[k]);
        }
        return p;
    };

    std::vector<double> total(dim, 0.0), total_err(dim, 0.0), whole;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const double a = edges[i];
        const double b = edges[i + 1];
        if (!(b > a)) {
            continue;
        }
        gauss(a, b, whole);
        Panel p = make_panel(a, b, whole);
        for (std::size_t k = 0; k < dim; ++k) {
            total[k] += p.left[k] + p.right[k];
            total_err[k] += p.err[k];
        }
        queue.push(std::move(p));
    }

    auto done = [&] {
        for (std::size_t k = 0; k < dim; ++k) {
            if (total_err[k] > std::max(opt.abs_tol, opt.rel_tol * std::abs(total[k]))) {
                return false;
            }
        }
        return true;
    };

    while (!done()) {
        if (queue.size() >= opt.max_panels) {
            break;
        }
        Panel p = queue.top();
        queue.pop();
        const double m = 0.5 * (p.a + p.b);
        Panel l = make_panel(p.a, m, p.left);
        Panel r = make_panel(m, p.b, p.right);
        for (std::size_t k = 0; k < dim; ++k) {
            total[k] += l.left[k] + l.right[k] + r.left[k] + r.right[k] - p.left[k] - p.right[k];
            total_err[k] += l.err[k] + r.err[k] - p.err[k];
        }
        queue.push(std::move(l));
        queue.push(std::move(r));
    }

    // Re-sum from the final panels so rounding drift in the running totals
    // does not leak into the result.
    std::fill(total.begin(), total.end(), 0.0);
    std::fill(total_err.begin(), total_err.end(), 0.0);
    res.panels = queue.size();
    std::vector<Panel> panels;
    panels.reserve(queue.size());
    while (!queue.empty()) {
        panels.push_back(queue.top());
        queue.pop();
    }
    std::sort(panels.begin(), panels.end(), [](const Panel &p, const Panel &q) { return p.a < q.a; });
    for (std::size_t k = 0; k < dim; ++k) {
        // Kahan summation keeps the result independent of panel count.
        double sum = 0.0, comp = 0.0, esum = 0.0;
        for (const auto &p : panels) {
            const double y = p.left[k] + p.right[k] - comp;
            const double t = sum + y;
            comp = (t - sum) - y;
            sum = t;
            esum += p.err[k];
        }
        total[k] = sum;
        total_err[k] = esum;
    }
    res.value = total;
    res.error = total_err;
    res.converged = done();
    return res;
}

} // namespace tiltcov
