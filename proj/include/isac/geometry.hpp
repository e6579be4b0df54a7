// SPDX-License-Identifier: Apache-2.0
//
// isac-channel: bistatic ISAC channel simulator and evaluation harness
// Copyright (C) 2026 isac-channel contributors
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

#pragma once

#include "isac/rng.hpp"

#include <cmath>
#include <numbers>
#include <span>

namespace isac
{

inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kPi = std::numbers::pi;

struct Vec3
{
    double x = 0.0, y = 0.0, z = 0.0;

    constexpr Vec3 operator+(const Vec3 &o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(const Vec3 &o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    constexpr Vec3 operator-() const { return {-x, -y, -z}; }
    constexpr Vec3 &operator+=(const Vec3 &o)
    {
        x += o.x, y += o.y, z += o.z;
        return *this;
    }
    constexpr bool operator==(const Vec3 &) const = default;

    double norm() const { return std::sqrt(x * x + y * y + z * z); }
    bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

constexpr Vec3 operator*(double s, const Vec3 &v) { return v * s; }
constexpr double dot(const Vec3 &a, const Vec3 &b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(const Vec3 &a, const Vec3 &b)
{
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

using Point3 = Vec3;

/// Spherical direction; zenith in [0, pi], azimuth in [-pi, pi).
struct Direction
{
    double zenith = 0.0;
    double azimuth = 0.0;

    bool operator==(const Direction &) const = default;
};

/// Wraps an angle in radians to [-pi, pi).
double wrap_pi(double a);

/// Brings an arbitrary (zenith, azimuth) pair into canonical ranges. A zenith outside
/// [0, pi] is reflected through the pole, which flips the azimuth by pi.
Direction canonical(double zenith, double azimuth);

struct BistaticGeometry
{
    Point3 tx;
    Point3 rx;

    /// Throws DegenerateGeometry if tx == rx or either point is not finite.
    BistaticGeometry(const Point3 &tx, const Point3 &rx);

    double d3d() const { return d3d_; }

private:
    double d3d_;
};

/// (sin θ cos φ, sin θ sin φ, cos θ)
Vec3 spherical_unit(const Direction &d);

/// Direction of (to - from). Throws DegenerateGeometry for coincident points.
Direction direction_between(const Point3 &from, const Point3 &to);

/// Unit vector from `from` toward `to`. Throws DegenerateGeometry for coincident points.
Vec3 unit_between(const Point3 &from, const Point3 &to);

/// Point where the ray leaving tx along `dep` meets the prolate spheroid with foci
/// tx, rx and total path length `path_length`. Throws DegenerateEllipse when
/// path_length <= d3d.
Point3 ellipsoid_intersect(const BistaticGeometry &g, const Direction &dep, double path_length);

/// Uniformly drawn departure direction, then ellipsoid_intersect.
Point3 sample_ellipsoid_point(const BistaticGeometry &g, double path_length, Rng &rng);

/// Direction drawn uniformly on the unit sphere.
Direction sample_sphere_direction(Rng &rng);

/// Length of tx -> via[0] -> ... -> via[n-1] -> rx.
double path_length(const Point3 &tx, std::span<const Point3> via, const Point3 &rx);

/// d/dt (|p - prev| + |next - p|) for a scatterer p moving with velocity v.
double segment_range_rate(const Point3 &prev, const Point3 &p, const Point3 &next, const Vec3 &v);

/// d/dt (|tx - p| + |p - rx|). The effective (Doppler) velocity is the negative of this.
double bistatic_range_rate(const BistaticGeometry &g, const Point3 &p, const Vec3 &v);

} // namespace isac
