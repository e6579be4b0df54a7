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

#include "isac/geometry.hpp"

#include "isac/error.hpp"

#include <algorithm>

namespace isac
{

double wrap_pi(double a)
{
    double w = std::fmod(a + kPi, 2.0 * kPi);
    if (w < 0.0)
        w += 2.0 * kPi;
    w -= kPi;
    // fmod can land exactly on +pi after the shift for inputs like -pi - tiny
    return w >= kPi ? -kPi : w;
}

Direction canonical(double zenith, double azimuth)
{
    double z = std::fmod(zenith, 2.0 * kPi);
    if (z < 0.0)
        z += 2.0 * kPi;
    if (z > kPi)
    {
        z = 2.0 * kPi - z;
        azimuth += kPi;
    }
    return {z, wrap_pi(azimuth)};
}

BistaticGeometry::BistaticGeometry(const Point3 &tx_, const Point3 &rx_) : tx(tx_), rx(rx_)
{
    if (!tx.finite() || !rx.finite())
        throw DegenerateGeometry("bistatic geometry: non-finite position");
    d3d_ = (rx - tx).norm();
    if (!(d3d_ > 0.0))
        throw DegenerateGeometry("bistatic geometry: tx and rx coincide");
}

Vec3 spherical_unit(const Direction &d)
{
    const double st = std::sin(d.zenith);
    return {st * std::cos(d.azimuth), st * std::sin(d.azimuth), std::cos(d.zenith)};
}

Vec3 unit_between(const Point3 &from, const Point3 &to)
{
    const Vec3 d = to - from;
    const double n = d.norm();
    if (!(n > 0.0))
        throw DegenerateGeometry("direction between coincident points");
    return d * (1.0 / n);
}

Direction direction_between(const Point3 &from, const Point3 &to)
{
    const Vec3 u = unit_between(from, to);
    const double zen = std::acos(std::clamp(u.z, -1.0, 1.0));
    const double az = (u.x == 0.0 && u.y == 0.0) ? 0.0 : std::atan2(u.y, u.x);
    return {zen, wrap_pi(az)};
}

Point3 ellipsoid_intersect(const BistaticGeometry &g, const Direction &dep, double path_length)
{
    const double d = g.d3d();
    if (!(path_length > d))
        throw DegenerateEllipse("path length " + std::to_string(path_length) +
                                " m does not exceed focal distance " + std::to_string(d) + " m");
    const Vec3 u = spherical_unit(dep);
    // |t u - b| = L - t  with b = rx - tx  =>  t = (L^2 - |b|^2) / (2 (L - u.b)),
    // and u.b <= |b| < L keeps the denominator positive.
    const double denom = 2.0 * (path_length - dot(u, g.rx - g.tx));
    const double t = (path_length * path_length - d * d) / denom;
    return g.tx + u * t;
}

Direction sample_sphere_direction(Rng &rng)
{
    const double cz = rng.uniform(-1.0, 1.0);
    const double az = rng.uniform(-kPi, kPi);
    return {std::acos(cz), az};
}

Point3 sample_ellipsoid_point(const BistaticGeometry &g, double path_length, Rng &rng)
{
    return ellipsoid_intersect(g, sample_sphere_direction(rng), path_length);
}

double path_length(const Point3 &tx, std::span<const Point3> via, const Point3 &rx)
{
    double total = 0.0;
    Point3 prev = tx;
    for (const auto &p : via)
    {
        total += (p - prev).norm();
        prev = p;
    }
    return total + (rx - prev).norm();
}

double segment_range_rate(const Point3 &prev, const Point3 &p, const Point3 &next, const Vec3 &v)
{
    return dot(v, unit_between(prev, p) + unit_between(next, p));
}

double bistatic_range_rate(const BistaticGeometry &g, const Point3 &p, const Vec3 &v)
{
    return segment_range_rate(g.tx, p, g.rx, v);
}

} // namespace isac
