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

#include "cfmimo/geometry.hpp"

#include "cfmimo/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace cfmimo {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double clamp_unit(double c) { return std::clamp(c, -1.0, 1.0); }

double wrap_angle(double a) {
    a = std::fmod(a, kTwoPi);
    return a < 0.0 ? a + kTwoPi : a;
}

} // namespace

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::DegenerateConfiguration: return "degenerate-configuration";
    case ErrorKind::InvalidConfiguration: return "invalid-configuration";
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::NoLoad: return "no-load";
    case ErrorKind::InvalidTarget: return "invalid-target";
    case ErrorKind::EmptySupport: return "empty-support";
    case ErrorKind::Underdispersed: return "underdispersed";
    case ErrorKind::InsufficientAps: return "insufficient-aps";
    case ErrorKind::InvalidSpec: return "invalid-spec";
    case ErrorKind::Unconverged: return "unconverged";
    }
    return "unknown";
}

DiskRegion::DiskRegion(Point2D c, double r) : center(c), radius(r) {
    if (!(r > 0.0) || !std::isfinite(r))
        throw Error(ErrorKind::InvalidArgument, "disk radius must be positive and finite");
}

std::vector<Point2D> sample_bpp(int count, const DiskRegion &region, Rng &rng) {
    if (count < 0)
        throw Error(ErrorKind::InvalidArgument, "negative point count");
    std::vector<Point2D> pts;
    pts.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const double rad = region.radius * std::sqrt(uniform01(rng));
        const double ang = kTwoPi * uniform01(rng);
        pts.push_back({region.center.x + rad * std::cos(ang), region.center.y + rad * std::sin(ang)});
    }
    return pts;
}

std::vector<Point2D> sample_ppp(double density, const DiskRegion &region, Rng &rng) {
    if (!(density >= 0.0))
        throw Error(ErrorKind::InvalidArgument, "negative density");
    if (density == 0.0)
        return {};
    std::poisson_distribution<long> count_dist(density * region.area());
    const long n = count_dist(rng);
    return sample_bpp(static_cast<int>(n), region, rng);
}

double half_angle_u(double r1, double r2, double v) {
    const double opposite_sq = r1 * r1 + r2 * r2 - 2.0 * r1 * r2 * std::cos(v);
    if (!(opposite_sq > 0.0))
        throw Error(ErrorKind::DegenerateConfiguration, "coincident triangle vertices in half_angle_u");
    return std::acos(clamp_unit((r2 - r1 * std::cos(v)) / std::sqrt(opposite_sq)));
}

double lens_area_common_point(double r1, double r2, double angle_at_point) {
    if (r1 <= 0.0 || r2 <= 0.0)
        return 0.0;
    const double c = std::cos(angle_at_point);
    const double d_sq = r1 * r1 + r2 * r2 - 2.0 * r1 * r2 * c;
    if (d_sq <= 0.0)
        return kPi * r1 * r1; // identical circles
    const double d = std::sqrt(d_sq);
    // half-angles at each center, between the center line and the common point
    const double t1 = std::acos(clamp_unit((r1 * r1 + d_sq - r2 * r2) / (2.0 * r1 * d)));
    const double t2 = std::acos(clamp_unit((r2 * r2 + d_sq - r1 * r1) / (2.0 * r2 * d)));
    const double area = r1 * r1 * (t1 - std::sin(2.0 * t1) / 2.0) + r2 * r2 * (t2 - std::sin(2.0 * t2) / 2.0);
    return std::clamp(area, 0.0, kPi * std::min(r1, r2) * std::min(r1, r2));
}

double aoi2(double r_o, double d_x, double v_x) {
    if (!(r_o > 0.0))
        throw Error(ErrorKind::InvalidArgument, "aoi2 requires r_o > 0");
    if (d_x == 0.0)
        return kPi * r_o * r_o;
    const double r_x = circle_radius_through_ap(r_o, d_x, v_x);
    if (r_x == 0.0)
        return 0.0;
    // fold to [0, pi]: the lens is mirror-symmetric about the center line
    double v = wrap_angle(v_x);
    if (v > kPi)
        v = kTwoPi - v;
    const double u = half_angle_u(r_o, d_x, v);
    const double area = r_o * r_o * (v - std::sin(2.0 * v) / 2.0) + r_x * r_x * (u - std::sin(2.0 * u) / 2.0);
    return std::clamp(area, 0.0, kPi * std::min(r_o, r_x) * std::min(r_o, r_x));
}

TripleIntersection triple_intersection(const std::array<Point2D, 3> &centers,
                                       const std::array<double, 3> &radii, Point2D common) {
    TripleIntersection out;
    const double scale = std::max({radii[0], radii[1], radii[2]});
    if (scale <= 0.0 || std::min({radii[0], radii[1], radii[2]}) <= 0.0)
        return out;
    const double len_tol = 1e-12 * scale;
    const double area_tol = 1e-12 * scale * scale;

    // drop duplicate circles; the intersection is unchanged
    std::array<bool, 3> active{true, true, true};
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            if (active[i] && active[j] && distance(centers[i], centers[j]) <= len_tol &&
                std::abs(radii[i] - radii[j]) <= len_tol)
                active[j] = false;

    auto inside = [&](Point2D p, int k) {
        return distance(p, centers[k]) <= radii[k] * (1.0 + 1e-12) + len_tol;
    };

    // Green's theorem over the boundary arcs that lie inside every other disk.
    // Per arc this is the chord-polygon share plus the segment r^2 (t - sin t)/2,
    // which for t <= pi is the familiar r^2 asin(c/2r) - c/4 sqrt(4r^2 - c^2).
    // Break points on circle i are the common point and the second intersection
    // with each other circle (reflection of the common point across the center line).
    double twice_area = 0.0;
    std::array<double, 3> arc_angle{0.0, 0.0, 0.0};
    for (int i = 0; i < 3; ++i) {
        if (!active[i])
            continue;
        const Point2D ci = centers[i];
        const double ri = radii[i];
        std::vector<double> breaks;
        auto angle_of = [&](Point2D p) { return wrap_angle(std::atan2(p.y - ci.y, p.x - ci.x)); };
        breaks.push_back(angle_of(common));
        for (int j = 0; j < 3; ++j) {
            if (j == i || !active[j])
                continue;
            const Point2D axis = centers[j] - ci;
            const double axis_sq = dot(axis, axis);
            if (axis_sq <= len_tol * len_tol)
                continue;
            const Point2D rel = common - ci;
            const double t = dot(rel, axis) / axis_sq;
            const Point2D foot = ci + t * axis;
            const Point2D mirrored = 2.0 * foot - common;
            breaks.push_back(angle_of(mirrored));
        }
        std::sort(breaks.begin(), breaks.end());
        const std::size_t nb = breaks.size();
        for (std::size_t b = 0; b < nb; ++b) {
            const double a0 = breaks[b];
            double a1 = (b + 1 < nb) ? breaks[b + 1] : breaks[0] + kTwoPi;
            if (nb == 1)
                a1 = a0 + kTwoPi;
            const double span = a1 - a0;
            if (span <= 1e-15)
                continue;
            const double mid = 0.5 * (a0 + a1);
            const Point2D pm{ci.x + ri * std::cos(mid), ci.y + ri * std::sin(mid)};
            bool keep = true;
            for (int k = 0; k < 3 && keep; ++k)
                if (k != i && active[k])
                    keep = inside(pm, k);
            if (!keep)
                continue;
            twice_area += ri * ri * span + ri * ci.x * (std::sin(a1) - std::sin(a0)) -
                          ri * ci.y * (std::cos(a1) - std::cos(a0));
            arc_angle[i] += span;
        }
    }

    const double area = 0.5 * twice_area;
    int bounding = 0;
    for (int i = 0; i < 3; ++i) {
        if (arc_angle[i] > 0.0) {
            ++bounding;
            const double span = std::min(arc_angle[i], kTwoPi);
            out.chords[i] = 2.0 * radii[i] * std::sin(0.5 * span);
        }
    }
    if (area <= area_tol || bounding == 0) {
        out.area = 0.0;
        out.kind = TripleCase::Point;
        out.chords = {0.0, 0.0, 0.0};
        return out;
    }
    out.area = area;
    out.kind = bounding == 1 ? TripleCase::Disk : bounding == 2 ? TripleCase::Lens : TripleCase::Triangle;
    return out;
}

TripleIntersection aoi3_detail(double r_o, double r_x, double r_y, double v_x, double v_y) {
    const Point2D common{0.0, 0.0};
    const std::array<Point2D, 3> centers{Point2D{r_o, 0.0},
                                         Point2D{r_x * std::cos(v_x), r_x * std::sin(v_x)},
                                         Point2D{r_y * std::cos(v_y), r_y * std::sin(v_y)}};
    auto res = triple_intersection(centers, {r_o, r_x, r_y}, common);
    return res;
}

double aoi3(double r_o, double r_x, double r_y, double v_x, double v_y) {
    return aoi3_detail(r_o, r_x, r_y, v_x, v_y).area;
}

double pair_angle_uxy(double r_o, double d_x, double d_y, double v_x, double v_y) {
    // angle at the AP between the AP->o direction and the AP->user direction
    const double w_x = half_angle_u(d_x, r_o, v_x);
    const double w_y = half_angle_u(d_y, r_o, v_y);
    const double a = wrap_angle(v_x);
    const double b = wrap_angle(v_y);
    const bool opposite = (a < kPi && b > kPi) || (a > kPi && b < kPi);
    return opposite ? w_x + w_y : std::abs(w_x - w_y);
}

} // namespace cfmimo
