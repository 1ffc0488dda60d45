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

// Point-process sampling and the circle-intersection kernels used by the
// load integrals. Every circle handled here passes through one common point
// (the access point), which is what makes the closed forms possible.

#pragma once

#include "cfmimo/random.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <variant>
#include <vector>

namespace cfmimo {

struct Point2D {
    double x = 0.0;
    double y = 0.0;

    friend Point2D operator+(Point2D a, Point2D b) { return {a.x + b.x, a.y + b.y}; }
    friend Point2D operator-(Point2D a, Point2D b) { return {a.x - b.x, a.y - b.y}; }
    friend Point2D operator*(double s, Point2D a) { return {s * a.x, s * a.y}; }
    friend bool operator==(const Point2D &, const Point2D &) = default;
};

inline double norm(Point2D p) { return std::hypot(p.x, p.y); }
inline double distance(Point2D a, Point2D b) { return norm(a - b); }
inline double dot(Point2D a, Point2D b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2D a, Point2D b) { return a.x * b.y - a.y * b.x; }

struct DiskRegion {
    Point2D center;
    double radius = 1.0;

    DiskRegion() = default;
    DiskRegion(Point2D c, double r);

    double area() const { return std::numbers::pi * radius * radius; }
    bool contains(Point2D p) const { return distance(p, center) <= radius; }
};

/// Fixed AP/user counts in a disk (traditional architecture).
struct BppCounts {
    int aps = 0;
    int users = 0;
};

/// Densities in points/m^2 (user-centric architecture).
struct PppDensities {
    double ap_density = 0.0;
    double user_density = 0.0;
};

struct NetworkRealization {
    std::vector<Point2D> aps;
    std::vector<Point2D> users;
    DiskRegion region;
    std::variant<BppCounts, PppDensities> model;
};

/// `count` i.i.d. uniform points on the disk (radius by square-root inverse transform).
std::vector<Point2D> sample_bpp(int count, const DiskRegion &region, Rng &rng);

/// Homogeneous PPP restricted to the disk: Poisson(density * area) points, uniformly placed.
std::vector<Point2D> sample_ppp(double density, const DiskRegion &region, Rng &rng);

/// Angle at the far end of side `r2` in the triangle with sides r1, r2 and
/// included angle v:  acos((r2 - r1 cos v) / sqrt(r1^2 + r2^2 - 2 r1 r2 cos v)).
/// Throws DegenerateConfiguration when the opposite side has zero length.
double half_angle_u(double r1, double r2, double v);

/// Lens area of two circles that both pass through a common point P, given their
/// radii and the angle at P between the directions to the two centers.
double lens_area_common_point(double r1, double r2, double angle_at_point);

/// Intersection area of the disk centered at the origin with radius r_o (through
/// the AP) and the disk centered at the user x (distance d_x from the origin, at
/// angle v_x from the AP direction) through the same AP.
double aoi2(double r_o, double d_x, double v_x);

/// Radius of the circle centered at x that passes through the AP.
inline double circle_radius_through_ap(double r_o, double d_x, double v_x) {
    return std::sqrt(std::max(0.0, r_o * r_o + d_x * d_x - 2.0 * r_o * d_x * std::cos(v_x)));
}

enum class TripleCase { Point, Lens, Triangle, Disk };

struct TripleIntersection {
    double area = 0.0;
    TripleCase kind = TripleCase::Point;
    /// Chord lengths spanning the arcs of the boundary, one per contributing circle
    /// in the input order (zero for circles that do not bound the region).
    std::array<double, 3> chords{0.0, 0.0, 0.0};
};

/// Intersection of three disks whose boundaries share the point `common`.
/// Circles are given by center and radius; the radius must equal the distance
/// from the center to `common` up to roundoff.
TripleIntersection triple_intersection(const std::array<Point2D, 3> &centers,
                                       const std::array<double, 3> &radii, Point2D common);

/// Three circles through a common point, parameterized at that point: circle o has
/// radius r_o and its center in direction 0, circle x radius r_x at direction v_x,
/// circle y radius r_y at direction v_y.
double aoi3(double r_o, double r_x, double r_y, double v_x, double v_y);

/// Same as aoi3 but returns the case split and chord lengths.
TripleIntersection aoi3_detail(double r_o, double r_x, double r_y, double v_x, double v_y);

/// Angle at the AP between the directions to users x and y, where the typical user
/// o sits at the origin, the AP at distance r_o, and the users at (d_x, v_x) and
/// (d_y, v_y) in polar coordinates measured from the AP direction. This is the
/// angle argument for lens_area_common_point(r_x, r_y, .).
double pair_angle_uxy(double r_o, double d_x, double d_y, double v_x, double v_y);

} // namespace cfmimo
