// Copyright 2026 The cfmimo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// Independent oracles shared by the tests: dart-throwing areas, the
// Kolmogorov-Smirnov statistic and least-squares fits. Nothing here calls the
// closed forms under test.

#pragma once

#include "cfmimo/geometry.hpp"
#include "cfmimo/random.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

struct Disk {
    double cx, cy, r;
    bool contains(double x, double y) const {
        const double dx = x - cx, dy = y - cy;
        return dx * dx + dy * dy <= r * r;
    }
};

/// Area of the intersection of disks by jittered stratified darts: the tight
/// bounding box is cut into a near-square grid of about n cells and one uniform
/// dart lands in each.
inline double intersection_darts(const std::vector<Disk> &disks, long n, std::uint64_t seed) {
    double x0 = -1e300, x1 = 1e300, y0 = -1e300, y1 = 1e300;
    for (const auto &d : disks) {
        x0 = std::max(x0, d.cx - d.r);
        x1 = std::min(x1, d.cx + d.r);
        y0 = std::max(y0, d.cy - d.r);
        y1 = std::min(y1, d.cy + d.r);
    }
    if (!(x1 > x0 && y1 > y0))
        return 0.0;
    const auto side = std::max<long>(1, std::lround(std::sqrt(static_cast<double>(n))));
    const double hx = (x1 - x0) / static_cast<double>(side);
    const double hy = (y1 - y0) / static_cast<double>(side);
    cfmimo::Rng rng = cfmimo::make_stream(seed, 0);
    long hits = 0;
    for (long i = 0; i < side; ++i)
        for (long j = 0; j < side; ++j) {
            const double x = x0 + (static_cast<double>(i) + cfmimo::uniform01(rng)) * hx;
            const double y = y0 + (static_cast<double>(j) + cfmimo::uniform01(rng)) * hy;
            bool in = true;
            for (const auto &d : disks)
                if (!d.contains(x, y)) {
                    in = false;
                    break;
                }
            hits += in;
        }
    return static_cast<double>(hits) * hx * hy;
}

/// Binomial standard error of a plain dart estimate over a square of half-side rho;
/// an upper bound for the stratified estimate.
inline double dart_stderr(double area, double rho, long n) {
    const double box = 4.0 * rho * rho;
    const double p = std::clamp(area / box, 0.0, 1.0);
    return box * std::sqrt(std::max(p * (1.0 - p), 1e-12) / static_cast<double>(n));
}

/// Typical user at the origin, AP at (r_o, 0), user x at distance d_x and angle
/// v_x: disk around the origin through the AP, and disk around x through the AP.
inline double aoi2_darts(double r_o, double d_x, double v_x, long n, std::uint64_t seed) {
    const double xx = d_x * std::cos(v_x), xy = d_x * std::sin(v_x);
    const double r_x = std::hypot(xx - r_o, xy);
    return intersection_darts({{0.0, 0.0, r_o}, {xx, xy, r_x}}, n, seed);
}

/// Three disks whose boundaries pass through the origin, centers at angles 0, v_x, v_y.
inline double aoi3_darts(double r_o, double r_x, double r_y, double v_x, double v_y, long n, std::uint64_t seed) {
    return intersection_darts({{r_o, 0.0, r_o},
                               {r_x * std::cos(v_x), r_x * std::sin(v_x), r_x},
                               {r_y * std::cos(v_y), r_y * std::sin(v_y), r_y}},
                              n, seed);
}

/// Disks around users x and y (polar about the typical user, angle from the AP
/// direction) that both pass through the AP at (r_o, 0).
inline double pair_lens_darts(double r_o, double d_x, double v_x, double d_y, double v_y, long n,
                              std::uint64_t seed) {
    const double xx = d_x * std::cos(v_x), xy = d_x * std::sin(v_x);
    const double yx = d_y * std::cos(v_y), yy = d_y * std::sin(v_y);
    return intersection_darts({{xx, xy, std::hypot(xx - r_o, xy)}, {yx, yy, std::hypot(yx - r_o, yy)}}, n, seed);
}

/// Two-sided Kolmogorov-Smirnov statistic of samples against a cdf.
inline double ks_statistic(std::vector<double> x, const std::function<double(double)> &cdf) {
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = cdf(x[i]);
        d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
    }
    return d;
}

/// Asymptotic KS critical value at level 0.01.
inline double ks_critical_001(std::size_t n) { return 1.6276 / std::sqrt(static_cast<double>(n)); }

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

inline LinearFit linear_fit(const std::vector<double> &x, const std::vector<double> &y) {
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
    return f;
}

} // namespace oracle
