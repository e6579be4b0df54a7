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

#include "isac/config.hpp"
#include "isac/error.hpp"

#include "catch_amalgamated.hpp"

#include <cstdlib>
#include <string>

using namespace isac;

namespace
{
const char *kUmiLink = R"(
; bistatic UMi link
[scenario]
comm_scenario = umi
sensing_scenario = target_localization
fc_hz = 28e9
tx_pos_m = 0, 0, 10
rx_pos_m = 100, 0, 1.5
los_condition = los

[generation]
seed = 42
n_isac = 24
prune_threshold_db = -50
target_selection = random_k
target_count = 3

[evaluation]
n_subcarriers = 792
subcarrier_spacing_hz = 120e3
symbol_duration_s = 8.92e-6
pilot_period_symbols = 7
)";
} // namespace

TEST_CASE("UMi 28 GHz link config loads", "[config]")
{
    const auto c = load_config_string(kUmiLink);
    CHECK(c.sim.scenario.fc_hz == 28e9);
    CHECK(c.sim.scenario.comm_scenario == CommScenario::UMi);
    CHECK(c.sim.generation.seed == 42);
    CHECK(c.eval.ofdm.n_subcarriers == 792);
    CHECK(c.eval.ofdm.subcarrier_spacing_hz == 120e3);
    CHECK(c.eval.ofdm.pilot_period_symbols == 7);
    CHECK(std::get<policy::RandomK>(c.sim.generation.target_policy).k == 3);
    CHECK_NOTHROW(validate(c));
}

TEST_CASE("empty document gives UMi target-localization defaults", "[config]")
{
    const auto c = load_config_string("");
    CHECK(c == Config{});
    CHECK(c.sim.scenario.comm_scenario == CommScenario::UMi);
    CHECK(c.sim.scenario.sensing_scenario == SensingScenario::TargetLocalization);
    CHECK_NOTHROW(validate(c));
}

TEST_CASE("config errors name the field", "[config]")
{
    try
    {
        load_config_string("[scenario]\nfrequency = 3\n");
        FAIL("expected ConfigError");
    }
    catch (const ConfigError &e)
    {
        CHECK(std::string(e.what()).find("scenario.frequency") != std::string::npos);
    }
    try
    {
        load_config_string("[generation]\nn_isac = many\n");
        FAIL("expected ConfigError");
    }
    catch (const ConfigError &e)
    {
        CHECK(std::string(e.what()).find("generation.n_isac") != std::string::npos);
    }
    CHECK_THROWS_AS(load_config_string("[bogus]\nx = 1\n"), ConfigError);
    CHECK_THROWS_AS(load_config_string("[scenario]\ncomm_scenario = mars\n"), ConfigError);
    CHECK_THROWS_AS(load_config_string("[scenario]\ntx_pos_m = 1, 2\n"), ConfigError);
}

TEST_CASE("out-of-range values raise ValidationError", "[config]")
{
    CHECK_THROWS_AS(validate(load_config_string("[scenario]\nfc_hz = 200e9\n")), ValidationError);
    CHECK_THROWS_AS(validate(load_config_string("[generation]\nn_isac = 1\n")), ValidationError);
    CHECK_THROWS_AS(validate(load_config_string("[generation]\nprune_threshold_db = 3\n")), ValidationError);
    CHECK_THROWS_AS(validate(load_config_string("[evaluation]\npilot_period_symbols = 40\n")), ConfigError);
}

TEST_CASE("non-UMi scenarios require explicit LSPs and path loss", "[config]")
{
    const auto c = load_config_string("[scenario]\ncomm_scenario = uma\npathloss_override_db = 120\n");
    CHECK_THROWS_AS(validate(c), ConfigError);
}

TEST_CASE("echoed config reloads to an identical object", "[config][property]")
{
    const auto a = load_config_string(kUmiLink);
    const auto b = load_config_string(echo_ini(a));
    CHECK(a == b);
    CHECK(echo_ini(a) == echo_ini(b));

    auto c = a;
    c.sim.generation.prune_threshold_db = kNoPruning;
    c.sim.generation.target_policy = policy::ExplicitIndices{{2, 5}};
    c.sim.generation.target_rel_los_db = {-27.76, -39.41};
    c.sim.lsp = umi_street_canyon_lsp(c.sim.scenario);
    c.sim.scenario.pathloss_override_db = 99.25;
    c.eval.modulations = {Modulation::QAM64};
    c.eval.sensing.clutter_removal = ClutterRemoval::MeanSubtraction;
    CHECK(load_config_string(echo_ini(c)) == c);

    auto d = a;
    d.sim.generation.target_policy = policy::DelayWindow{1e-7, 4e-7, 2};
    d.sim.generation.target.reflection_types = {ReflectionType::T1, ReflectionType::T2};
    d.sim.generation.target.sub_cluster_weights = {0.25, 0.75};
    d.sim.generation.target.env_box = Box{{-1, -2, 0}, {3, 4, 5}};
    d.sim.generation.motion = TargetMotionKind::ConstantVelocity;
    d.sim.generation.target_velocity = {1, -2, 0.5};
    CHECK(load_config_string(echo_ini(d)) == d);
}

TEST_CASE("ISAC_SEED overrides the configured seed", "[config]")
{
    auto c = load_config_string(kUmiLink);
    ::unsetenv("ISAC_SEED");
    CHECK_FALSE(apply_env_overrides(c));
    CHECK(c.sim.generation.seed == 42);
    ::setenv("ISAC_SEED", "1234", 1);
    CHECK(apply_env_overrides(c));
    CHECK(c.sim.generation.seed == 1234);
    ::setenv("ISAC_SEED", "12x", 1);
    CHECK_THROWS_AS(apply_env_overrides(c), ConfigError);
    ::unsetenv("ISAC_SEED");
}

TEST_CASE("json echo carries effective LSPs", "[config]")
{
    const auto c = load_config_string(kUmiLink);
    const auto j = to_json(c);
    CHECK(j.contains("effective_lsp"));
    CHECK(j["effective_lsp"]["ds_s"].get<double>() == umi_street_canyon_lsp(c.sim.scenario).ds_s);
    CHECK(j["scenario"]["fc_hz"].get<double>() == 28e9);
}
