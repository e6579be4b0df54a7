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

#include "isac/env_rays.hpp"

#include "isac/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

namespace isac
{

namespace
{

constexpr double kDeg = kPi / 180.0;

// 38.901 Table 7.5-2 and Table 7.5-4
constexpr std::pair<int, double> kCPhi[] = {{4, 0.779},  {5, 0.860},  {8, 1.018},  {10, 1.090},
                                            {11, 1.123}, {12, 1.146}, {14, 1.190}, {15, 1.211},
                                            {16, 1.226}, {19, 1.273}, {20, 1.289}, {25, 1.358}};
constexpr std::pair<int, double> kCTheta[] = {{8, 0.889},   {10, 0.957}, {11, 1.031}, {12, 1.104},
                                              {15, 1.1088}, {19, 1.184}, {20, 1.178}, {25, 1.282}};

template <std::size_t N> double nearest(const std::pair<int, double> (&table)[N], int n)
{
    const auto *best = &table[0];
    for (const auto &e : table)
        if (std::abs(e.first - n) < std::abs(best->first - n))
            best = &e;
    return best->second;
}

// Shuffle with draws from our own Rng so results do not depend on the std::shuffle implementation.
void permute(std::vector<double> &v, Rng &rng)
{
    for (std::size_t i = v.size(); i > 1; --i)
    {
        auto j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(i));
        std::swap(v[i - 1], v[std::min(j, i - 1)]);
    }
}

} // namespace

double c_phi_for(int n_clusters)
{
    return nearest(kCPhi, n_clusters);
}

double c_theta_for(int n_clusters)
{
    return nearest(kCTheta, n_clusters);
}

double azimuth_offset_deg(double power_ratio, double spread_deg, double c_phi)
{
    return 2.0 * (spread_deg / 1.4) * std::sqrt(-std::log(power_ratio)) / c_phi;
}

double zenith_offset_deg(double power_ratio, double spread_deg, double c_theta)
{
    return -spread_deg * std::log(power_ratio) / c_theta;
}

std::vector<ClusterAngles> generate_cluster_angles(std::span<const double> powers, std::span<const int> indices,
                                                   const LspSet &lsp, const Direction &los_arrival,
                                                   const Direction &los_departure, Rng &rng, AngleOptions opt)
{
    const int n = opt.scaling_count > 0 ? opt.scaling_count : static_cast<int>(powers.size());
    std::vector<ClusterAngles> out(powers.size());
    if (powers.empty())
        return out;
    const double pmax = *std::max_element(powers.begin(), powers.end());
    const double c_phi = c_phi_for(n);
    const double c_theta = c_theta_for(n);

    auto sign = [&] { return opt.perturb ? (rng.uniform() < 0.5 ? -1.0 : 1.0) : 1.0; };
    auto jitter = [&](double spread) { return opt.perturb ? rng.normal(0.0, spread / 7.0) : 0.0; };

    for (std::size_t i = 0; i < powers.size(); ++i)
    {
        const double ratio = std::min(powers[i] / pmax, 1.0);
        const double a_off = azimuth_offset_deg(ratio, lsp.asa_deg, c_phi);
        const double d_off = azimuth_offset_deg(ratio, lsp.asd_deg, c_phi);
        const double za_off = zenith_offset_deg(ratio, lsp.zsa_deg, c_theta);
        const double zd_off = zenith_offset_deg(ratio, lsp.zsd_deg, c_theta);

        const double aoa = sign() * a_off + jitter(lsp.asa_deg);
        const double aod = sign() * d_off + jitter(lsp.asd_deg);
        const double zoa = sign() * za_off + jitter(lsp.zsa_deg);
        const double zod = sign() * zd_off + jitter(lsp.zsd_deg);

        const Direction arr = canonical(los_arrival.zenith + zoa * kDeg, los_arrival.azimuth + aoa * kDeg);
        const Direction dep = canonical(los_departure.zenith + zod * kDeg, los_departure.azimuth + aod * kDeg);
        out[i] = {indices[i], arr.zenith, arr.azimuth, dep.zenith, dep.azimuth};
    }
    return out;
}

RaySpreads ray_spreads(const LspSet &lsp)
{
    return {lsp.c_asa_deg, lsp.c_asd_deg, lsp.c_zsa_deg, lsp.c_zsd_deg};
}

std::vector<double> ray_offsets(int m_rays, bool allow_equispaced)
{
    if (m_rays < 1)
        throw ConfigError("generation.rays_per_cluster: must be at least 1");
    if (m_rays == 20)
        return {kRayOffsets20.begin(), kRayOffsets20.end()};
    if (!allow_equispaced)
        throw ConfigError("generation.rays_per_cluster: " + std::to_string(m_rays) +
                          " rays has no offset table and the equispaced fallback is disabled");
    std::vector<double> a(static_cast<std::size_t>(m_rays), 0.0);
    if (m_rays == 1)
        return a;
    double ss = 0.0;
    for (int m = 0; m < m_rays; ++m)
    {
        a[static_cast<std::size_t>(m)] = m - 0.5 * (m_rays - 1);
        ss += a[static_cast<std::size_t>(m)] * a[static_cast<std::size_t>(m)];
    }
    const double scale = 1.0 / std::sqrt(ss / m_rays);
    for (auto &v : a)
        v *= scale;
    return a;
}

std::vector<EnvRay> expand_rays(std::span<const ClusterAngles> clusters, const RaySpreads &spreads, int m_rays,
                                Rng &rng, bool allow_equispaced)
{
    const auto table = ray_offsets(m_rays, allow_equispaced);
    std::vector<EnvRay> rays;
    rays.reserve(clusters.size() * table.size());
    for (const auto &c : clusters)
    {
        auto off_aoa = table, off_aod = table, off_zoa = table, off_zod = table;
        permute(off_aoa, rng);
        permute(off_aod, rng);
        permute(off_zoa, rng);
        permute(off_zod, rng);
        for (std::size_t m = 0; m < table.size(); ++m)
        {
            const Direction arr = canonical(c.zoa + spreads.c_zsa_deg * off_zoa[m] * kDeg,
                                            c.aoa + spreads.c_asa_deg * off_aoa[m] * kDeg);
            const Direction dep = canonical(c.zod + spreads.c_zsd_deg * off_zod[m] * kDeg,
                                            c.aod + spreads.c_asd_deg * off_aod[m] * kDeg);
            EnvRay r;
            r.cluster_index = c.cluster_index;
            r.ray_index = static_cast<int>(m) + 1;
            r.zoa = arr.zenith;
            r.aoa = arr.azimuth;
            r.zod = dep.zenith;
            r.aod = dep.azimuth;
            rays.push_back(r);
        }
    }
    return rays;
}

double draw_xpr(double xpr_mu_db, double xpr_sigma_db, Rng &rng)
{
    const double db = xpr_sigma_db > 0.0 ? rng.normal(xpr_mu_db, xpr_sigma_db) : xpr_mu_db;
    return std::pow(10.0, db / 10.0);
}

PhaseQuad draw_initial_phases(Rng &rng)
{
    PhaseQuad p;
    for (auto &v : p)
        v = rng.uniform(-kPi, kPi);
    return p;
}

} // namespace isac
