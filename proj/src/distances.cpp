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

#include "cfmimo/distances.hpp"

#include "cfmimo/error.hpp"
#include "cfmimo/numerics.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cfmimo {

namespace {

constexpr double pi = std::numbers::pi;

double clamped_acos(double x) { return std::acos(std::clamp(x, -1.0, 1.0)); }

// Fraction of the disk of radius r_s (center at distance r_o) within distance d of the user.
double user_cdf(double d, double r_o, double r_s) {
    if (d <= 0.0)
        return 0.0;
    if (d >= r_s + r_o)
        return 1.0;
    if (d < r_s - r_o)
        return d * d / (r_s * r_s);
    const double theta = clamped_acos((d * d + r_o * r_o - r_s * r_s) / (2.0 * r_o * d));
    const double phi = clamped_acos((r_s * r_s + r_o * r_o - d * d) / (2.0 * r_o * r_s));
    const double v = (d * d * (theta - std::sin(2.0 * theta) / 2.0) + r_s * r_s * (phi - std::sin(2.0 * phi) / 2.0)) /
                     (pi * r_s * r_s);
    return std::clamp(v, 0.0, 1.0);
}

double user_pdf(double d, double r_o, double r_s) {
    if (d < 0.0 || d > r_s + r_o)
        return 0.0;
    if (d < r_s - r_o)
        return 2.0 * d / (r_s * r_s);
    if (r_o <= 0.0)
        return d <= r_s ? 2.0 * d / (r_s * r_s) : 0.0;
    const double theta = clamped_acos((d * d + r_o * r_o - r_s * r_s) / (2.0 * r_o * d));
    return 2.0 * d * theta / (pi * r_s * r_s);
}

void check_disk(double r_o, double r_s) {
    if (!(r_s > 0.0))
        throw Error(ErrorKind::InvalidArgument, "disk radius must be positive");
    if (!(r_o >= 0.0 && r_o <= r_s))
        throw Error(ErrorKind::InvalidArgument, "user must lie inside the disk");
}

} // namespace

DistanceLaw::DistanceLaw(Fn pdf, Fn cdf, double lo, double hi, Fn inverse)
    : pdf_(std::move(pdf)), cdf_(std::move(cdf)), inverse_(std::move(inverse)), lo_(lo), hi_(hi) {
    if (!(hi > lo))
        throw Error(ErrorKind::EmptySupport, "distance law support is empty");
}

double DistanceLaw::pdf(double d) const { return (d < lo_ || d > hi_) ? 0.0 : pdf_(d); }

double DistanceLaw::cdf(double d) const {
    if (d <= lo_)
        return 0.0;
    if (d >= hi_)
        return 1.0;
    return cdf_(d);
}

double DistanceLaw::inverse_cdf(double p) const {
    p = std::clamp(p, 0.0, 1.0);
    if (inverse_)
        return std::clamp(inverse_(p), lo_, hi_);
    double a = lo_, b = hi_;
    const double tol = 1e-9 * (hi_ - lo_);
    while (b - a > tol) {
        const double mid = 0.5 * (a + b);
        (cdf(mid) < p ? a : b) = mid;
    }
    return 0.5 * (a + b);
}

DistanceLaw law_center_distance(double r_s) {
    if (!(r_s > 0.0))
        throw Error(ErrorKind::InvalidArgument, "disk radius must be positive");
    const double r2 = r_s * r_s;
    return DistanceLaw([=](double r) { return 2.0 * r / r2; }, [=](double r) { return r * r / r2; }, 0.0, r_s,
                       [=](double p) { return r_s * std::sqrt(p); });
}

DistanceLaw law_user_to_random_ap(double r_o, double r_s) {
    check_disk(r_o, r_s);
    return DistanceLaw([=](double d) { return user_pdf(d, r_o, r_s); },
                       [=](double d) { return user_cdf(d, r_o, r_s); }, 0.0, r_s + r_o);
}

DistanceLaw law_nearest_of_m(double r_o, double r_s, int m) {
    check_disk(r_o, r_s);
    if (m < 1)
        throw Error(ErrorKind::InvalidArgument, "need at least one AP");
    const double em = m;
    return DistanceLaw(
        [=](double d) { return em * user_pdf(d, r_o, r_s) * std::pow(1.0 - user_cdf(d, r_o, r_s), em - 1.0); },
        [=](double d) { return 1.0 - std::pow(1.0 - user_cdf(d, r_o, r_s), em); }, 0.0, r_s + r_o);
}

DistanceLaw law_truncated_remaining(double r_o, double r_s, double d_oo) {
    check_disk(r_o, r_s);
    if (!(d_oo >= 0.0))
        throw Error(ErrorKind::InvalidArgument, "truncation distance must be nonnegative");
    const double f0 = user_cdf(d_oo, r_o, r_s);
    const double rest = 1.0 - f0;
    if (!(rest > 0.0) || d_oo >= r_s + r_o)
        throw Error(ErrorKind::EmptySupport, "no probability mass beyond the truncation distance");
    return DistanceLaw([=](double d) { return user_pdf(d, r_o, r_s) / rest; },
                       [=](double d) { return (user_cdf(d, r_o, r_s) - f0) / rest; }, d_oo, r_s + r_o);
}

DistanceLaw law_ppp_order(int n, double density) {
    if (n < 1 || !(density > 0.0))
        throw Error(ErrorKind::InvalidArgument, "order law needs n >= 1 and positive density");
    const double a = pi * density;
    const double dn = n;
    const double log_norm = std::log(2.0) + dn * std::log(a) - std::lgamma(dn);
    const double hi = poisson_truncation_radius(n, density, 1e-12);
    return DistanceLaw(
        [=](double d) {
            if (d <= 0.0)
                return 0.0;
            return std::exp(log_norm + (2.0 * dn - 1.0) * std::log(d) - a * d * d);
        },
        [=](double d) { return boost::math::gamma_p(dn, a * d * d); }, 0.0, hi,
        [=](double p) {
            if (p <= 0.0)
                return 0.0;
            if (p >= 1.0)
                return hi;
            return std::sqrt(boost::math::gamma_p_inv(dn, p) / a);
        });
}

DistanceLaw conditional_inner_law(double d_n) {
    if (!(d_n > 0.0))
        throw Error(ErrorKind::InvalidArgument, "outer distance must be positive");
    const double d2 = d_n * d_n;
    return DistanceLaw([=](double d) { return 2.0 * d / d2; }, [=](double d) { return d * d / d2; }, 0.0, d_n,
                       [=](double p) { return d_n * std::sqrt(p); });
}

} // namespace cfmimo
