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

#include "isac/scenario.hpp"

#include "isac/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace isac
{

LspSet umi_street_canyon_lsp(const ScenarioSpec &spec)
{
    const double fc_ghz = spec.fc_hz / 1e9;
    const double lf = std::log10(1.0 + fc_ghz);
    const double d2d = std::hypot(spec.rx_pos.x - spec.tx_pos.x, spec.rx_pos.y - spec.tx_pos.y);
    const double h_bs = spec.tx_pos.z;
    const double h_ut = spec.rx_pos.z;

    LspSet l;
    double lg_ds, lg_asd, lg_asa, lg_zsa, lg_zsd;
    if (spec.is_los())
    {
        lg_ds = -0.24 * lf - 7.14;
        lg_asd = -0.05 * lf + 1.21;
        lg_asa = -0.08 * lf + 1.73;
        lg_zsa = -0.1 * lf + 0.73;
        lg_zsd = std::max(-0.21, -14.8 * d2d / 1000.0 + 0.01 * std::abs(h_ut - h_bs) + 0.83);
        l.r_tau = 3.0;
        l.k_factor_db = 9.0;
        l.xpr_mu_db = 9.0;
        l.sf_sigma_db = 4.0;
        l.c_asd_deg = 3.0;
        l.c_asa_deg = 17.0;
    }
    else
    {
        lg_ds = -0.24 * lf - 6.83;
        lg_asd = -0.23 * lf + 1.53;
        lg_asa = -0.08 * lf + 1.81;
        lg_zsa = -0.04 * lf + 0.92;
        lg_zsd = std::max(-0.5, -3.1 * d2d / 1000.0 + 0.01 * std::max(h_ut - h_bs, 0.0) + 0.2);
        l.r_tau = 2.1;
        l.k_factor_db = -std::numeric_limits<double>::infinity();
        l.xpr_mu_db = 8.0;
        l.sf_sigma_db = 7.82;
        l.c_asd_deg = 10.0;
        l.c_asa_deg = 22.0;
    }
    l.ds_s = std::pow(10.0, lg_ds);
    l.asd_deg = std::min(std::pow(10.0, lg_asd), 104.0);
    l.asa_deg = std::min(std::pow(10.0, lg_asa), 104.0);
    l.zsa_deg = std::min(std::pow(10.0, lg_zsa), 52.0);
    l.zsd_deg = std::min(std::pow(10.0, lg_zsd), 52.0);
    l.zeta_db = 3.0;
    l.c_zsa_deg = 7.0;
    l.c_zsd_deg = 0.375 * std::pow(10.0, lg_zsd);
    l.xpr_sigma_db = 3.0;
    return l;
}

int umi_street_canyon_cluster_count(LosCondition los)
{
    return los == LosCondition::LoS ? 12 : 19;
}

void validate(const ScenarioSpec &spec)
{
    if (!(spec.fc_hz >= 0.5e9 && spec.fc_hz <= 100e9))
        throw ValidationError("scenario.fc_hz: " + std::to_string(spec.fc_hz) + " outside [0.5e9, 100e9]");
    if (!(spec.bandwidth_hz > 0.0))
        throw ValidationError("scenario.bandwidth_hz: must be positive");
    if (!spec.tx_pos.finite() || !spec.rx_pos.finite() || !spec.v_ut.finite())
        throw ValidationError("scenario: positions and velocities must be finite");
    if (spec.tx_pos == spec.rx_pos)
        throw ValidationError("scenario: tx_pos_m and rx_pos_m coincide");
}

void validate(const LspSet &l)
{
    if (!(l.ds_s > 0.0))
        throw ValidationError("lsp.ds_s: must be positive");
    if (!(l.r_tau > 1.0))
        throw ValidationError("lsp.r_tau: must exceed 1");
    if (!(l.zeta_db >= 0.0))
        throw ValidationError("lsp.zeta_db: must be non-negative");
    for (double s : {l.asa_deg, l.asd_deg, l.zsa_deg, l.zsd_deg})
        if (!(s > 0.0))
            throw ValidationError("lsp: angular spreads must be positive");
    for (double s : {l.c_asa_deg, l.c_asd_deg, l.c_zsa_deg, l.c_zsd_deg})
        if (!(s >= 0.0))
            throw ValidationError("lsp: intra-cluster spreads must be non-negative");
    if (!(l.xpr_sigma_db >= 0.0) || !(l.sf_sigma_db >= 0.0))
        throw ValidationError("lsp: standard deviations must be non-negative");
}

void validate(const AntennaConfig &a)
{
    if (a.num_tx_elements < 1 || a.num_rx_elements < 1)
        throw ValidationError("antenna: element counts must be at least 1");
    if (a.tx_positions_wl.size() != a.num_tx_elements)
        throw ValidationError("antenna.tx_element_positions_wl: expected " +
                              std::to_string(a.num_tx_elements) + " positions");
    if (a.rx_positions_wl.size() != a.num_rx_elements)
        throw ValidationError("antenna.rx_element_positions_wl: expected " +
                              std::to_string(a.num_rx_elements) + " positions");
}

double free_space_pathloss_db(double d3d, double fc_hz)
{
    return 20.0 * std::log10(4.0 * kPi * d3d * fc_hz / kSpeedOfLight);
}

double umi_street_canyon_pathloss_db(double d3d, double h_bs, double h_ut, double fc_hz, LosCondition los)
{
    const double fc_ghz = fc_hz / 1e9;
    const double dh = h_bs - h_ut;
    const double d2d = std::sqrt(std::max(d3d * d3d - dh * dh, 0.0));
    const double d_bp = 4.0 * (h_bs - 1.0) * (h_ut - 1.0) * fc_hz / kSpeedOfLight;

    double pl_los;
    if (d2d <= d_bp)
        pl_los = 32.4 + 21.0 * std::log10(d3d) + 20.0 * std::log10(fc_ghz);
    else
        pl_los = 32.4 + 40.0 * std::log10(d3d) + 20.0 * std::log10(fc_ghz) -
                 9.5 * std::log10(d_bp * d_bp + dh * dh);
    if (los == LosCondition::LoS)
        return pl_los;

    const double pl_nlos = 35.3 * std::log10(d3d) + 22.4 + 21.3 * std::log10(fc_ghz) - 0.3 * (h_ut - 1.5);
    return std::max(pl_los, pl_nlos);
}

double compute_pathloss(const ScenarioSpec &spec)
{
    if (spec.pathloss_override_db)
        return *spec.pathloss_override_db;
    const double d3d = (spec.rx_pos - spec.tx_pos).norm();
    switch (spec.comm_scenario)
    {
    case CommScenario::Custom:
        return free_space_pathloss_db(d3d, spec.fc_hz);
    case CommScenario::UMi:
        return umi_street_canyon_pathloss_db(d3d, spec.tx_pos.z, spec.rx_pos.z, spec.fc_hz, spec.los_condition);
    default:
        throw ConfigError("scenario.pathloss_override_db: required for scenario " +
                          std::string(to_string(spec.comm_scenario)));
    }
}

double draw_shadow_fading(double sf_sigma_db, Rng &rng)
{
    if (sf_sigma_db == 0.0)
        return 0.0;
    return rng.normal(0.0, sf_sigma_db);
}

std::string_view to_string(CommScenario s)
{
    switch (s)
    {
    case CommScenario::UMi: return "UMi";
    case CommScenario::UMa: return "UMa";
    case CommScenario::IndoorOffice: return "IndoorOffice";
    case CommScenario::RMa: return "RMa";
    case CommScenario::InF: return "InF";
    case CommScenario::Custom: return "Custom";
    }
    return "?";
}

std::string_view to_string(SensingScenario s)
{
    switch (s)
    {
    case SensingScenario::TargetLocalization: return "TargetLocalization";
    case SensingScenario::BehaviorRecognition: return "BehaviorRecognition";
    case SensingScenario::BreathDetection: return "BreathDetection";
    case SensingScenario::InvasionDetection: return "InvasionDetection";
    case SensingScenario::EnvironmentImaging: return "EnvironmentImaging";
    }
    return "?";
}

std::string_view to_string(LosCondition s)
{
    return s == LosCondition::LoS ? "LoS" : "NLoS";
}

std::string_view to_string(AntennaPattern s)
{
    return s == AntennaPattern::Isotropic ? "Isotropic" : "Patch38901";
}

} // namespace isac
