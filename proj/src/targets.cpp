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

#include "isac/targets.hpp"

#include "isac/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <regex>
#include <string>

#include <fmt/format.h>

namespace isac
{

namespace
{

constexpr double kDeg = kPi / 180.0;

template <class... Ts> struct overloaded : Ts...
{
    using Ts::operator()...;
};
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

Vec3 track_position(const motion::PrescribedTrack &tr, double t)
{
    const auto &s = tr.samples;
    if (s.empty())
        return {};
    if (t <= s.front().first)
        return s.front().second;
    if (t >= s.back().first)
        return s.back().second;
    auto hi = std::upper_bound(s.begin(), s.end(), t, [](double v, const auto &e) { return v < e.first; });
    auto lo = hi - 1;
    const double w = (t - lo->first) / (hi->first - lo->first);
    return lo->second + (hi->second - lo->second) * w;
}

Point3 draw_env_point(const Box &box, double clearance, const BistaticGeometry &g, const Point3 &target, Rng &rng)
{
    for (int attempt = 0; attempt < 100000; ++attempt)
    {
        const Point3 p{rng.uniform(box.lo.x, box.hi.x), rng.uniform(box.lo.y, box.hi.y),
                       rng.uniform(box.lo.z, box.hi.z)};
        if ((p - g.tx).norm() >= clearance && (p - g.rx).norm() >= clearance && (p - target).norm() >= clearance)
            return p;
    }
    throw DegenerateGeometry("environment bounce box leaves no room outside the clearance radius");
}

} // namespace

Vec3 velocity_at(const Motion &m, double t)
{
    return std::visit(overloaded{
                          [](const motion::Stationary &) { return Vec3{}; },
                          [](const motion::ConstantVelocity &c) { return c.v; },
                          [t](const motion::PrescribedTrack &tr) {
                              const auto &s = tr.samples;
                              if (s.size() < 2 || t < s.front().first || t >= s.back().first)
                                  return Vec3{};
                              auto hi = std::upper_bound(s.begin(), s.end(), t,
                                                         [](double v, const auto &e) { return v < e.first; });
                              auto lo = hi - 1;
                              return (hi->second - lo->second) * (1.0 / (hi->first - lo->first));
                          },
                      },
                      m);
}

Vec3 displacement(const Motion &m, double t, double dt)
{
    return std::visit(overloaded{
                          [](const motion::Stationary &) { return Vec3{}; },
                          [dt](const motion::ConstantVelocity &c) { return c.v * dt; },
                          [t, dt](const motion::PrescribedTrack &tr) {
                              return track_position(tr, t + dt) - track_position(tr, t);
                          },
                      },
                      m);
}

Box default_env_box(const BistaticGeometry &g)
{
    const double pad = 25.0;
    return {{std::min(g.tx.x, g.rx.x) - pad, std::min(g.tx.y, g.rx.y) - pad, 0.0},
            {std::max(g.tx.x, g.rx.x) + pad, std::max(g.tx.y, g.rx.y) + pad, 10.0}};
}

void validate(const TargetSpec &spec)
{
    if (spec.extended_rays < 1)
        throw ValidationError("target.extended_rays: must be at least 1");
    if (!(spec.extended_sigma_m >= 0.0) || !std::isfinite(spec.extended_sigma_m))
        throw ValidationError("target.extended_sigma_m: must be finite and >= 0");
    if (spec.reflection_types.empty())
        throw ValidationError("target.reflection_types: at least one reflection type is required");
    for (std::size_t i = 0; i < spec.reflection_types.size(); ++i)
        for (std::size_t j = i + 1; j < spec.reflection_types.size(); ++j)
            if (spec.reflection_types[i] == spec.reflection_types[j])
                throw ValidationError("target.reflection_types: duplicate entry");
    if (!spec.sub_cluster_weights.empty())
    {
        if (spec.sub_cluster_weights.size() != spec.reflection_types.size())
            throw ValidationError("target.sub_cluster_weights: need one weight per reflection type");
        for (double w : spec.sub_cluster_weights)
            if (!(w >= 0.0))
                throw ValidationError("target.sub_cluster_weights: weights must be >= 0");
        const double sum = std::accumulate(spec.sub_cluster_weights.begin(), spec.sub_cluster_weights.end(), 0.0);
        if (std::abs(sum - 1.0) > 1e-12)
            throw ValidationError("target.sub_cluster_weights: weights must sum to 1");
    }
    if (spec.env_box && !(spec.env_box->lo.x <= spec.env_box->hi.x && spec.env_box->lo.y <= spec.env_box->hi.y &&
                          spec.env_box->lo.z <= spec.env_box->hi.z))
        throw ValidationError("target.env_box: lower corner exceeds upper corner");
    if (!(spec.env_clearance_m >= 0.0))
        throw ValidationError("target.env_clearance_m: must be >= 0");
    if (!(spec.min_excess_path_m > 0.0))
        throw ValidationError("target.min_excess_path_m: must be > 0");
}

std::vector<Point3> SensingRay::path_points() const
{
    switch (reflection_type)
    {
    case ReflectionType::T1:
        return {target_point};
    case ReflectionType::T2:
        return {*env_point, target_point};
    case ReflectionType::T3:
        return {target_point, *env_point};
    }
    return {target_point};
}

void refresh_geometry(SensingRay &ray, const BistaticGeometry &g)
{
    const auto pts = ray.path_points();
    ray.delay_s = (path_length(g.tx, pts, g.rx) - g.d3d()) / kSpeedOfLight;
    const Direction dep = direction_between(g.tx, pts.front());
    const Direction arr = direction_between(g.rx, pts.back());
    ray.zod = dep.zenith;
    ray.aod = dep.azimuth;
    ray.zoa = arr.zenith;
    ray.aoa = arr.azimuth;
}

std::vector<SensingRay> build_statistical_target(const Cluster &cluster, const TargetSpec &spec,
                                                 const BistaticGeometry &g, const Direction &cluster_departure,
                                                 const LspSet &lsp, Rng &rng, bool absolute_delay_mode)
{
    validate(spec);
    double total_path;
    if (absolute_delay_mode)
    {
        if (cluster.delay_s <= 0.0)
            throw DegenerateEllipse("target cluster " + std::to_string(cluster.index) +
                                    " has zero delay in absolute-delay mode");
        total_path = kSpeedOfLight * cluster.delay_s;
    }
    else
    {
        // A zero-delay NLoS cluster would collapse the ellipsoid onto the baseline.
        total_path = g.d3d() + std::max(kSpeedOfLight * cluster.delay_s, spec.min_excess_path_m);
    }

    const Point3 centre = spec.placement == Placement::AnglePriority
                              ? ellipsoid_intersect(g, cluster_departure, total_path)
                              : sample_ellipsoid_point(g, total_path, rng);

    std::vector<Point3> points;
    if (spec.model == TargetModel::Point)
        points.push_back(centre);
    else
        for (int m = 0; m < spec.extended_rays; ++m)
        {
            const double dx = rng.normal(0.0, 1.0), dy = rng.normal(0.0, 1.0), dz = rng.normal(0.0, 1.0);
            points.push_back(centre + Vec3{dx, dy, dz} * spec.extended_sigma_m);
        }

    const std::size_t n_sub = spec.reflection_types.size();
    const Box box = spec.env_box.value_or(default_env_box(g));
    std::vector<SensingRay> rays;
    rays.reserve(n_sub * points.size());
    for (std::size_t i = 0; i < n_sub; ++i)
    {
        const double w = spec.sub_cluster_weights.empty() ? 1.0 / static_cast<double>(n_sub)
                                                          : spec.sub_cluster_weights[i];
        const double p_ray = cluster.power * w / static_cast<double>(points.size());
        for (std::size_t m = 0; m < points.size(); ++m)
        {
            SensingRay r;
            r.cluster_index = cluster.index;
            r.sub_cluster = static_cast<int>(i);
            r.ray_index = static_cast<int>(m) + 1;
            r.reflection_type = spec.reflection_types[i];
            r.target_point = points[m];
            if (r.reflection_type != ReflectionType::T1)
                r.env_point = draw_env_point(box, spec.env_clearance_m, g, points[m], rng);
            refresh_geometry(r, g);
            r.power = p_ray;
            r.xpr_linear = draw_xpr(lsp.xpr_mu_db, lsp.xpr_sigma_db, rng);
            r.phases = draw_initial_phases(rng);
            rays.push_back(r);
        }
    }
    return rays;
}

namespace
{

double ray_range_rate(const SensingRay &r, const BistaticGeometry &g, const Vec3 &v)
{
    switch (r.reflection_type)
    {
    case ReflectionType::T1:
        return segment_range_rate(g.tx, r.target_point, g.rx, v);
    case ReflectionType::T2:
        return segment_range_rate(*r.env_point, r.target_point, g.rx, v);
    case ReflectionType::T3:
        return segment_range_rate(g.tx, r.target_point, *r.env_point, v);
    }
    return 0.0;
}

} // namespace

void assign_doppler(std::span<SensingRay> rays, const Motion &m, const BistaticGeometry &g, double t)
{
    const Vec3 v = velocity_at(m, t);
    for (auto &r : rays)
        r.eff_velocity = v == Vec3{} ? 0.0 : -ray_range_rate(r, g, v);
}

void advance_targets(std::span<SensingRay> rays, const Motion &m, const BistaticGeometry &g, double t, double dt)
{
    if (!(dt > 0.0))
        throw ValidationError("advance_targets: dt must be > 0");
    const Vec3 d = displacement(m, t, dt);
    if (d == Vec3{})
    {
        assign_doppler(rays, m, g, t + dt);
        return;
    }
    for (auto &r : rays)
    {
        r.target_point += d;
        refresh_geometry(r, g);
    }
    assign_doppler(rays, m, g, t + dt);
}

const DetFrame &DeterministicTarget::frame_at(double t) const
{
    if (frames.empty())
        throw ValidationError("deterministic target has no frames");
    auto it = std::upper_bound(frames.begin(), frames.end(), t, [](double v, const DetFrame &f) { return v < f.t; });
    return it == frames.begin() ? frames.front() : *(it - 1);
}

namespace
{

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

double parse_number(std::string_view field, std::size_t line, const char *name)
{
    field = trim(field);
    double v = 0.0;
    const auto *end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, v);
    if (ec != std::errc{} || ptr != end || field.empty())
        throw ParseError(fmt::format("column {}: '{}' is not a number", name, field), line);
    if (!std::isfinite(v))
        throw ParseError(fmt::format("column {}: value is not finite", name), line);
    return v;
}

} // namespace

DeterministicTarget ingest_deterministic_rays(std::istream &in)
{
    static const std::regex header_re(R"(^# isac-trace v1; power_unit=(dbm|linear); frame_rate_fps=(\S+)\s*$)");
    static constexpr const char *kColumns[] = {"t_s",     "power",   "delay_s", "zod_deg",
                                               "aod_deg", "zoa_deg", "aoa_deg", "phase_rad"};

    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line))
        throw ParseError("empty trace", 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    std::smatch m;
    if (!std::regex_match(line, m, header_re))
        throw ParseError("expected header '# isac-trace v1; power_unit=<dbm|linear>; frame_rate_fps=<f>'", line_no);
    const bool dbm = m[1] == "dbm";
    DeterministicTarget target;
    target.frame_rate_fps = parse_number(m[2].str(), line_no, "frame_rate_fps");
    if (!(target.frame_rate_fps > 0.0))
        throw ValidationError("frame_rate_fps must be > 0");

    while (std::getline(in, line))
    {
        ++line_no;
        const auto body = trim(line);
        if (body.empty())
            continue;
        double f[8];
        std::size_t col = 0, start = 0;
        std::string_view sv = body;
        while (true)
        {
            const auto comma = sv.find(',', start);
            if (col >= 8)
                throw ParseError("more than 8 columns", line_no);
            f[col] = parse_number(sv.substr(start, comma == std::string_view::npos ? sv.npos : comma - start),
                                  line_no, kColumns[col]);
            ++col;
            if (comma == std::string_view::npos)
                break;
            start = comma + 1;
        }
        if (col != 8)
            throw ParseError(fmt::format("expected 8 columns, found {}", col), line_no);

        DetRay r;
        r.power = dbm ? std::pow(10.0, f[1] / 10.0) : f[1];
        if (!dbm && r.power < 0.0)
            throw ValidationError(fmt::format("line {}: negative linear power", line_no));
        if (f[2] < 0.0)
            throw ValidationError(fmt::format("line {}: negative delay", line_no));
        r.delay_s = f[2];
        r.zod = f[3] * kDeg;
        r.aod = f[4] * kDeg;
        r.zoa = f[5] * kDeg;
        r.aoa = f[6] * kDeg;
        r.phase_rad = f[7];

        const double t = f[0];
        if (target.frames.empty() || t > target.frames.back().t)
            target.frames.push_back({t, {}});
        else if (t < target.frames.back().t)
            throw ValidationError(fmt::format("line {}: timestamp {} precedes the previous frame at {}", line_no, t,
                                              target.frames.back().t));
        target.frames.back().rays.push_back(r);
    }
    if (target.frames.empty())
        throw ParseError("trace contains no rays", line_no + 1);
    return target;
}

void write_deterministic_trace(std::ostream &out, const DeterministicTarget &target, PowerUnit unit)
{
    out << fmt::format("# isac-trace v1; power_unit={}; frame_rate_fps={:.17g}\n",
                       unit == PowerUnit::DBm ? "dbm" : "linear", target.frame_rate_fps);
    for (const auto &f : target.frames)
        for (const auto &r : f.rays)
        {
            const double p = unit == PowerUnit::DBm ? 10.0 * std::log10(r.power) : r.power;
            out << fmt::format("{:.17g}, {:.17g}, {:.17g}, {:.17g}, {:.17g}, {:.17g}, {:.17g}, {:.17g}\n", f.t, p,
                               r.delay_s, r.zod / kDeg, r.aod / kDeg, r.zoa / kDeg, r.aoa / kDeg, r.phase_rad);
        }
}

DeterministicTarget scale_deterministic_power(const DeterministicTarget &target, double pl_db)
{
    DeterministicTarget out = target;
    const double pl = std::pow(10.0, pl_db / 10.0);
    for (auto &f : out.frames)
        for (auto &r : f.rays)
            r.power /= pl;
    return out;
}

} // namespace isac
