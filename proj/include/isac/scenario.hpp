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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace isac
{

enum class CommScenario
{
    UMi,
    UMa,
    IndoorOffice,
    RMa,
    InF,
    Custom,
};

enum class SensingScenario
{
    TargetLocalization,
    BehaviorRecognition,
    BreathDetection,
    InvasionDetection,
    EnvironmentImaging,
};

enum class LosCondition
{
    LoS,
    NLoS,
};

/// Communication scenario + sensing scenario + link geometry.
struct ScenarioSpec
{
    CommScenario comm_scenario = CommScenario::UMi;
    SensingScenario sensing_scenario = SensingScenario::TargetLocalization;
    double fc_hz = 28e9;
    double bandwidth_hz = 95.04e6;
    Point3 tx_pos{0.0, 0.0, 10.0};
    Point3 rx_pos{100.0, 0.0, 1.5};
    LosCondition los_condition = LosCondition::LoS;
    Vec3 v_ut{};
    /// Required for scenarios without a built-in path loss model.
    std::optional<double> pathloss_override_db;
    /// When set, cluster delays are absolute and the target ellipsoid uses L = c * tau.
    bool absolute_delay_mode = false;

    bool operator==(const ScenarioSpec &) const = default;

    double wavelength() const { return kSpeedOfLight / fc_hz; }
    BistaticGeometry geometry() const { return {tx_pos, rx_pos}; }
    bool is_los() const { return los_condition == LosCondition::LoS; }
};

/// Large-scale parameters. Angles in degrees, dB quantities in dB.
struct LspSet
{
    double ds_s = 0.0;
    double r_tau = 0.0;
    double zeta_db = 0.0;
    double k_factor_db = 0.0;
    double asa_deg = 0.0;
    double asd_deg = 0.0;
    double zsa_deg = 0.0;
    double zsd_deg = 0.0;
    // Intra-cluster spreads used when expanding rays.
    double c_asa_deg = 0.0;
    double c_asd_deg = 0.0;
    double c_zsa_deg = 0.0;
    double c_zsd_deg = 0.0;
    double xpr_mu_db = 0.0;
    double xpr_sigma_db = 0.0;
    double sf_sigma_db = 0.0;

    bool operator==(const LspSet &) const = default;
};

enum class AntennaPattern
{
    Isotropic,
    Patch38901,
};

/// Element positions are in wavelengths.
struct AntennaConfig
{
    std::size_t num_tx_elements = 1;
    std::size_t num_rx_elements = 1;
    std::vector<Vec3> tx_positions_wl{Vec3{}};
    std::vector<Vec3> rx_positions_wl{Vec3{}};
    AntennaPattern pattern = AntennaPattern::Isotropic;
    double polarization_slant_deg = 0.0;

    bool operator==(const AntennaConfig &) const = default;
};

/// Median UMi street-canyon parameters (38.901 Table 7.5-6) evaluated at the
/// scenario's carrier frequency, LoS state and antenna heights.
LspSet umi_street_canyon_lsp(const ScenarioSpec &spec);

/// Number of clusters of the plain communication model for UMi street canyon.
int umi_street_canyon_cluster_count(LosCondition los);

/// Throws ValidationError on out-of-range values.
void validate(const ScenarioSpec &spec);
void validate(const LspSet &lsp);
void validate(const AntennaConfig &ant);

double free_space_pathloss_db(double d3d, double fc_hz);

/// UMi street canyon (38.901 Table 7.4.1-1); BS height = tx z, UT height = rx z.
double umi_street_canyon_pathloss_db(double d3d, double h_bs, double h_ut, double fc_hz, LosCondition los);

/// Free space for Custom, UMi formulas for UMi, override constant for the rest.
/// Throws ConfigError if the scenario needs an override that was not given.
double compute_pathloss(const ScenarioSpec &spec);

/// Zero-mean Gaussian in dB.
double draw_shadow_fading(double sf_sigma_db, Rng &rng);

std::string_view to_string(CommScenario s);
std::string_view to_string(SensingScenario s);
std::string_view to_string(LosCondition s);
std::string_view to_string(AntennaPattern s);

} // namespace isac
