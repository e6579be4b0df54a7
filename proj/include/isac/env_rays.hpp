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

#include "isac/geometry.hpp"
#include "isac/rng.hpp"
#include "isac/scenario.hpp"

#include <array>
#include <span>
#include <vector>

namespace isac
{

/// Central angles of one cluster, radians.
struct ClusterAngles
{
    int cluster_index = 0;
    double zoa = 0.0, aoa = 0.0, zod = 0.0, aod = 0.0;

    Direction arrival() const { return {zoa, aoa}; }
    Direction departure() const { return {zod, aod}; }
    bool operator==(const ClusterAngles &) const = default;
};

/// Four initial phases in the order (theta-theta, theta-phi, phi-theta, phi-phi).
using PhaseQuad = std::array<double, 4>;

struct EnvRay
{
    int cluster_index = 0;
    int ray_index = 0; ///< 1-based
    double zoa = 0.0, aoa = 0.0, zod = 0.0, aod = 0.0;
    double xpr_linear = 1.0;
    PhaseQuad phases{};

    Direction arrival() const { return {zoa, aoa}; }
    Direction departure() const { return {zod, aod}; }
    bool operator==(const EnvRay &) const = default;
};

/// Ray offset angles for unit rms spread (38.901 Table 7.5-3, M = 20).
inline constexpr std::array<double, 20> kRayOffsets20 = {
    0.0447, -0.0447, 0.1413, -0.1413, 0.2492, -0.2492, 0.3715, -0.3715, 0.5129, -0.5129,
    0.6797, -0.6797, 0.8844, -0.8844, 1.1481, -1.1481, 1.5195, -1.5195, 2.1551, -2.1551,
};

/// Azimuth scaling factor C_phi for the nearest tabulated cluster count (ties go to the smaller count).
double c_phi_for(int n_clusters);
/// Zenith scaling factor C_theta, same lookup rule.
double c_theta_for(int n_clusters);

/// |pre-perturbation azimuth offset| in degrees: 2 (AS/1.4) sqrt(-ln(P/Pmax)) / C_phi.
double azimuth_offset_deg(double power_ratio, double spread_deg, double c_phi);
/// |pre-perturbation zenith offset| in degrees: -ZS ln(P/Pmax) / C_theta.
double zenith_offset_deg(double power_ratio, double spread_deg, double c_theta);

struct AngleOptions
{
    /// Random sign and Gaussian jitter; disable to obtain the bare mapping.
    bool perturb = true;
    /// Cluster count used for the C_phi / C_theta lookup; 0 means the number of clusters passed in.
    int scaling_count = 0;
};

/// Cluster central angles recentered on the LoS directions. `indices` names each
/// cluster (same length as `powers`).
std::vector<ClusterAngles> generate_cluster_angles(std::span<const double> powers, std::span<const int> indices,
                                                   const LspSet &lsp, const Direction &los_arrival,
                                                   const Direction &los_departure, Rng &rng,
                                                   AngleOptions opt = {});

struct RaySpreads
{
    double c_asa_deg = 0.0, c_asd_deg = 0.0, c_zsa_deg = 0.0, c_zsd_deg = 0.0;
};

RaySpreads ray_spreads(const LspSet &lsp);

/// Offsets for M rays: the 38.901 table when M = 20, otherwise equispaced with unit rms.
/// Throws ConfigError for M != 20 when the equispaced fallback is disabled.
std::vector<double> ray_offsets(int m_rays, bool allow_equispaced = true);

/// M rays per cluster. The AOA/AOD/ZOA/ZOD offset sequences are permuted
/// independently for each cluster (random coupling). XPR and phases are left default.
std::vector<EnvRay> expand_rays(std::span<const ClusterAngles> clusters, const RaySpreads &spreads, int m_rays,
                                Rng &rng, bool allow_equispaced = true);

/// kappa = 10^(kappa_dB / 10), kappa_dB ~ N(mu, sigma^2)
double draw_xpr(double xpr_mu_db, double xpr_sigma_db, Rng &rng);

/// Four i.i.d. U[-pi, pi) phases.
PhaseQuad draw_initial_phases(Rng &rng);

} // namespace isac
