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

// Distance laws for the finite disk network (binomial point process) and the
// order statistics of an infinite Poisson network.

#pragma once

#include "cfmimo/random.hpp"

#include <functional>

namespace cfmimo {

class DistanceLaw {
public:
    using Fn = std::function<double(double)>;

    /// `inverse` is optional; without it quantiles come from bisection on the cdf.
    DistanceLaw(Fn pdf, Fn cdf, double lo, double hi, Fn inverse = {});

    double pdf(double d) const;
    double cdf(double d) const;
    double lo() const { return lo_; }
    double hi() const { return hi_; }

    /// Quantile for p in [0, 1]; bisection tolerance 1e-9 of the support width.
    double inverse_cdf(double p) const;
    double sample(Rng &rng) const { return inverse_cdf(uniform01(rng)); }

private:
    Fn pdf_;
    Fn cdf_;
    Fn inverse_;
    double lo_;
    double hi_;
};

/// Distance of a uniform point in a disk of radius r_s from its center.
DistanceLaw law_center_distance(double r_s);

/// Distance from a user at distance r_o from the disk center to a uniform point in the disk.
DistanceLaw law_user_to_random_ap(double r_o, double r_s);

/// Nearest of m i.i.d. points drawn from law_user_to_random_ap.
DistanceLaw law_nearest_of_m(double r_o, double r_s, int m);

/// law_user_to_random_ap truncated below at d_oo. Throws EmptySupport when no mass remains.
DistanceLaw law_truncated_remaining(double r_o, double r_s, double d_oo);

/// Distance to the n-th nearest point of a PPP with the given density (generalized gamma).
DistanceLaw law_ppp_order(int n, double density);

/// Given the n-th nearest distance d_n, each nearer point is i.i.d. with pdf 2d/d_n^2.
DistanceLaw conditional_inner_law(double d_n);

} // namespace cfmimo
