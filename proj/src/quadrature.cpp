// SPDX-License-Identifier: Apache-2.0
//
// tiltcov: uplink coverage and antenna tilt analysis for 3D-beamforming massive MIMO
// Copyright (C) 2026 The tiltcov authors
// ------------------------------------------------------------------------

#include "tiltcov/quadrature.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

#include "tiltcov/geometry.hpp"

namespace tiltcov {

GaussLegendreRule::GaussLegendreRule(int order)
{
    if (order < 1) {
        throw std::invalid_argument("GaussLegendreRule: order must be >= 1");
    }
    const auto n = static_cast<std::size_t>(order);
    nodes.resize(n);
    weights.resize(n);
    // Newton on P_n from the Chebyshev-like initial guess; roots are symmetric.
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(kPi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
                p0 = p1;
                p1 = pk;
            }
            dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        // Recompute the derivative at the converged root.
        double p0 = 1.0, p1 = x;
        for (std::size_t k = 2; k <= n; ++k) {
            const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
            p0 = p1;
            p1 = pk;
        }
        dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) {
        nodes[n / 2] = 0.0;
    }
}

const GaussLegendreRule &GaussLegendreRule::cached(int order)
{
    static std::mutex mu;
    static std::map<int, std::unique_ptr<GaussLegendreRule>> rules;
    std::lock_guard<std::mutex> lock(mu);
    auto &slot = rules[order];
    if (!slot) {
        slot = std::make_unique<GaussLegendreRule>(order);
    }
    return *slot;
}

} // namespace tiltcov
