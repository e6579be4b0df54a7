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

#include "isac/channel.hpp"
#include "isac/ofdm.hpp"
#include "isac/sensing.hpp"

#include "json.hpp"

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace isac
{

struct SensingConfig
{
    std::size_t n_symbols = 50;
    double pfa = 1e-5;
    CfarWindow cfar{};
    Window delay_window = Window::Hann;
    Window doppler_window = Window::Hann;
    ClutterRemoval clutter_removal = ClutterRemoval::Background;
    /// A detection belongs to a target when it lies within this many bins on both axes.
    double assoc_delay_bins = 1.5;
    double assoc_doppler_bins = 1.5;
    /// Noise realizations per drop and SNR.
    std::size_t noise_runs = 1;

    bool operator==(const SensingConfig &) const = default;
};

struct EvaluationConfig
{
    OfdmConfig ofdm;
    std::vector<Modulation> modulations{Modulation::QPSK, Modulation::QAM16};
    std::uint64_t min_bits = 1'000'000;
    std::uint64_t max_errors = 400;
    bool perfect_csi = false;
    SnrDefinition snr_definition = SnrDefinition::EsN0;
    SensingConfig sensing;
    std::size_t drops = 100;
    std::size_t spectrogram_symbols = 4096;
    std::size_t spectrogram_window = 256;
    std::size_t spectrogram_hop = 64;

    bool operator==(const EvaluationConfig &) const = default;
};

struct Config
{
    SimulationConfig sim;
    EvaluationConfig eval;

    bool operator==(const Config &) const = default;
};

/// INI document with sections [scenario], [lsp], [antenna], [generation], [evaluation].
/// Unknown sections or keys and unparsable values throw ConfigError naming the field.
Config load_config(std::istream &in);
Config load_config_string(const std::string &text);
Config load_config_file(const std::string &path);

/// Replaces the seed when ISAC_SEED is set in the environment. Returns true if it did.
bool apply_env_overrides(Config &cfg);

/// INI text that loads back to an equal Config.
std::string echo_ini(const Config &cfg);

/// Effective configuration including the LSPs actually in use.
nlohmann::json to_json(const Config &cfg);

void validate(const Config &cfg);

} // namespace isac
