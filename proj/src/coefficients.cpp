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

#include "isac/coefficients.hpp"

#include "isac/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace isac
{

namespace
{

constexpr double kDeg = kPi / 180.0;

// exp(j 2 pi x) with the integer part of x removed first
cd cis_cycles(double x)
{
    const double f = x - std::floor(x);
    return {std::cos(2.0 * kPi * f), std::sin(2.0 * kPi * f)};
}

double element_cycles(const Direction &d, const Vec3 &pos_wl)
{
    return dot(spherical_unit(d), pos_wl);
}

} // namespace

FieldPattern field_pattern(AntennaPattern pattern, double slant_rad, const Direction &d)
{
    double amp = 1.0;
    if (pattern == AntennaPattern::Patch38901)
    {
        const double theta_deg = d.zenith / kDeg;
        const double phi_deg = wrap_pi(d.azimuth) / kDeg;
        const double a_v = -std::min(12.0 * std::pow((theta_deg - 90.0) / 65.0, 2), 30.0);
        const double a_h = -std::min(12.0 * std::pow(phi_deg / 65.0, 2), 30.0);
        const double a_db = 8.0 - std::min(-(a_v + a_h), 30.0);
        amp = std::pow(10.0, a_db / 20.0);
    }
    return {amp * std::cos(slant_rad), amp * std::sin(slant_rad)};
}

PolarizationMatrix nlos_polarization(double xpr_linear, const PhaseQuad &phases)
{
    const double cross = 1.0 / std::sqrt(xpr_linear);
    return {std::polar(1.0, phases[0]), std::polar(cross, phases[1]), std::polar(cross, phases[2]),
            std::polar(1.0, phases[3])};
}

PolarizationMatrix los_polarization()
{
    return {cd{1.0, 0.0}, cd{0.0, 0.0}, cd{0.0, 0.0}, cd{-1.0, 0.0}};
}

cd polarized_gain(const FieldPattern &rx, const PolarizationMatrix &p, const FieldPattern &tx)
{
    const cd a = p[0] * tx[0] + p[1] * tx[1];
    const cd b = p[2] * tx[0] + p[3] * tx[1];
    return rx[0] * a + rx[1] * b;
}

void VelocityHistory::push(double t0, double t1, double v)
{
    if (!(t1 > t0))
        throw ValidationError("velocity segment must have positive duration");
    const double expected = ends_.empty() ? 0.0 : ends_.back();
    if (t0 != expected)
        throw IncompleteHistory("velocity segment starting at " + std::to_string(t0) +
                                " s does not continue the history ending at " + std::to_string(expected) + " s");
    const double base = prefix_.empty() ? 0.0 : prefix_.back() + v_.back() * (ends_.back() - starts_.back());
    starts_.push_back(t0);
    ends_.push_back(t1);
    v_.push_back(v);
    prefix_.push_back(base);
}

double VelocityHistory::path_integral(double t) const
{
    if (t <= 0.0)
    {
        if (t < 0.0)
            throw IncompleteHistory("negative time");
        return 0.0;
    }
    if (ends_.empty() || t > ends_.back())
        throw IncompleteHistory("velocity history ends at " + std::to_string(covered_until()) +
                                " s, requested " + std::to_string(t) + " s");
    // last segment whose start is < t
    auto it = std::lower_bound(starts_.begin(), starts_.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - starts_.begin()) - 1;
    return prefix_[i] + v_[i] * (t - starts_[i]);
}

double VelocityHistory::doppler_phase(double t, double wavelength) const
{
    return 2.0 * kPi * path_integral(t) / wavelength;
}

Direction los_departure(const BistaticGeometry &g)
{
    return direction_between(g.tx, g.rx);
}

Direction los_arrival(const BistaticGeometry &g)
{
    return direction_between(g.rx, g.tx);
}

namespace
{

// Antenna, element and UT-motion factors shared by every ray type.
cd spatial_factor(const Direction &arr, const Direction &dep, const PolarizationMatrix &pol, const AntennaConfig &ant,
                  std::size_t u, std::size_t s, const Vec3 &v_ut, double wavelength, double t, double extra_cycles)
{
    const double slant = ant.polarization_slant_deg * kDeg;
    const cd g = polarized_gain(field_pattern(ant.pattern, slant, arr), pol, field_pattern(ant.pattern, slant, dep));
    const double cycles = element_cycles(arr, ant.rx_positions_wl.at(u)) +
                          element_cycles(dep, ant.tx_positions_wl.at(s)) +
                          dot(spherical_unit(arr), v_ut) / wavelength * t + extra_cycles;
    return g * cis_cycles(cycles);
}

} // namespace

cd env_ray_coefficient(const EnvRay &ray, const AntennaConfig &ant, std::size_t u, std::size_t s, const Vec3 &v_ut,
                       double wavelength, double cluster_power, int rays_per_cluster, double t)
{
    const double amp = std::sqrt(cluster_power / rays_per_cluster);
    return amp * spatial_factor(ray.arrival(), ray.departure(), nlos_polarization(ray.xpr_linear, ray.phases), ant, u,
                                s, v_ut, wavelength, t, 0.0);
}

cd target_ray_coefficient(const SensingRay &ray, const AntennaConfig &ant, std::size_t u, std::size_t s,
                          const Vec3 &v_ut, double wavelength, double t, const VelocityHistory &history)
{
    const double doppler_cycles = history.path_integral(t) / wavelength;
    return std::sqrt(ray.power) * spatial_factor(ray.arrival(), ray.departure(),
                                                 nlos_polarization(ray.xpr_linear, ray.phases), ant, u, s, v_ut,
                                                 wavelength, t, doppler_cycles);
}

cd deterministic_ray_coefficient(const DetRay &ray, double pl_db)
{
    return std::polar(std::sqrt(ray.power / std::pow(10.0, pl_db / 10.0)), ray.phase_rad);
}

cd los_coefficient(const BistaticGeometry &g, const AntennaConfig &ant, std::size_t u, std::size_t s,
                   const Vec3 &v_ut, double wavelength, double t)
{
    return spatial_factor(los_arrival(g), los_departure(g), los_polarization(), ant, u, s, v_ut, wavelength, t,
                          -g.d3d() / wavelength);
}

std::string_view to_string(TapOrigin o)
{
    switch (o)
    {
    case TapOrigin::LoS:
        return "los";
    case TapOrigin::Env:
        return "env";
    case TapOrigin::TargetStat:
        return "target_stat";
    case TapOrigin::TargetDet:
        return "target_det";
    }
    return "?";
}

CirSnapshot assemble_cir(const TapSet &env, const TapSet &target_stat, const TapSet &target_det, const TapSet &los,
                         const AssemblyParams &params)
{
    CirSnapshot snap;
    snap.t = params.t;
    snap.u = params.u;
    snap.s = params.s;

    bool have = false;
    for (const TapSet *set : {&target_stat, &target_det, &env, &los})
    {
        if (set->taps.empty())
            continue;
        if (have && set->convention != snap.convention)
            throw ConventionError("tap sets mix absolute and excess delay conventions");
        snap.convention = set->convention;
        have = true;
    }

    const bool has_los = !los.taps.empty();
    double w_nlos = 1.0, w_los = 0.0;
    if (has_los)
    {
        if (std::isinf(params.k_factor_db) && params.k_factor_db > 0.0)
        {
            w_nlos = 0.0;
            w_los = 1.0;
        }
        else
        {
            const double k = std::pow(10.0, params.k_factor_db / 10.0);
            w_nlos = std::sqrt(1.0 / (k + 1.0));
            w_los = std::sqrt(k / (k + 1.0));
        }
    }
    const double amp = std::pow(10.0, -(params.pl_db + params.sf_db) / 20.0);

    auto append = [&](const TapSet &set, double w) {
        for (Tap tap : set.taps)
        {
            tap.coeff *= w;
            snap.taps.push_back(tap);
        }
    };
    if (w_nlos > 0.0)
    {
        append(target_stat, w_nlos * amp);
        if (!params.det_bypass_scaling)
            append(target_det, w_nlos * amp);
        append(env, w_nlos * amp);
    }
    if (has_los)
        append(los, w_los * amp);
    if (params.det_bypass_scaling)
        append(target_det, 1.0);
    return snap;
}

void accumulate_cfr(std::span<const Tap> taps, double subcarrier_spacing_hz, std::span<cd> out)
{
    // Rays of one cluster share a delay; sum them before the per-subcarrier loop.
    std::vector<std::size_t> order(taps.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return taps[a].delay_s < taps[b].delay_s; });
    std::size_t i = 0;
    while (i < order.size())
    {
        const double tau = taps[order[i]].delay_s;
        cd sum{};
        for (; i < order.size() && taps[order[i]].delay_s == tau; ++i)
            sum += taps[order[i]].coeff;
        if (sum == cd{})
            continue;
        const double step = subcarrier_spacing_hz * tau;
        for (std::size_t k = 0; k < out.size(); ++k)
            out[k] += sum * cis_cycles(-static_cast<double>(k) * step);
    }
}

std::vector<cd> cir_to_cfr(const CirSnapshot &snap, std::size_t n_subcarriers, double subcarrier_spacing_hz)
{
    if (!(subcarrier_spacing_hz > 0.0))
        throw ValidationError("subcarrier spacing must be > 0");
    std::vector<cd> h(n_subcarriers);
    accumulate_cfr(snap.taps, subcarrier_spacing_hz, h);
    return h;
}

} // namespace isac
