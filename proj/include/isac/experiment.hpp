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
#include "isac/config.hpp"
#include "isac/matrix.hpp"
#include "isac/ofdm.hpp"
#include "isac/sensing.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace isac
{

/// "start:step:stop" inclusive (a single number is a one-point range). Throws ConfigError.
std::vector<double> parse_snr_range(const std::string &text);

using Progress = std::function<void(std::size_t done, std::size_t total)>;

struct BerRow
{
    double snr_db = 0.0;
    Modulation modulation = Modulation::QPSK;
    BerCount isac;
    BerCount comm;
};

/// BER of the ISAC channel and the plain communication channel over the same drops, with
/// identical bits and noise draws on both (common random numbers).
std::vector<BerRow> run_eval_comm(const Config &cfg, std::span<const double> snrs_db, std::size_t drops,
                                  const Progress &progress = {});

void write_ber_csv(std::ostream &out, std::span<const BerRow> rows);

/// SNR at which a BER curve (ascending SNR) crosses `target`, interpolated linearly in
/// log10(BER). Empty when the curve never crosses.
std::optional<double> snr_at_ber(std::span<const double> snrs_db, std::span<const double> ber, double target);

struct TargetTruth
{
    int cluster_index = 0;
    double delay_s = 0.0; ///< excess, power-weighted over the target's rays
    double range_m = 0.0; ///< bistatic range d3d + c * delay
    double doppler_hz = 0.0;
    double power = 0.0; ///< total tap power after K-factor weighting
};

/// Noise-free inputs of one sensing drop.
struct SenseDrop
{
    std::size_t drop_index = 0;
    CMatrix cfr;        ///< full channel, symbols x subcarriers
    CMatrix background; ///< LoS + environment part
    std::vector<TargetTruth> truth;
    double d3d = 0.0;
    double mean_gain = 0.0; ///< mean |H|^2
};

SenseDrop prepare_sense_drop(const Config &cfg, const Drop &drop);

struct SenseOutcome
{
    std::vector<Detection> detections;
    /// Per target: index into detections, or -1.
    std::vector<int> matched;
};

/// Target i claims the nearest unclaimed detection within the association window;
/// targets are served strongest first.
std::vector<int> associate(std::span<const Detection> dets, std::span<const TargetTruth> truth,
                           const RangeDopplerMap &map, const SensingConfig &cfg);

/// One noisy CPI: random QPSK symbols, AWGN at `snr_db` relative to the mean channel gain,
/// map, CFAR, range estimation and association. `unit_noise` (symbols x subcarriers,
/// unit-variance complex) and `symbols` are supplied so several SNRs can share them.
SenseOutcome sense_once(const SenseDrop &sd, const Config &cfg, double snr_db, const CMatrix &symbols,
                        const CMatrix &unit_noise);

struct DetectionRow
{
    double snr_db = 0.0;
    int target = 0; ///< 1-based, delay order
    std::size_t trials = 0;
    std::size_t detected = 0;
    double pd() const { return trials ? static_cast<double>(detected) / static_cast<double>(trials) : 0.0; }
};

struct RangeRow
{
    double snr_db = 0.0;
    std::size_t drop = 0;
    std::size_t run = 0;
    int target = 0;
    double true_range_m = 0.0;
    double est_range_m = 0.0;
    bool coarse = false;
    double error_m() const { return est_range_m - true_range_m; }
};

struct SenseResult
{
    std::vector<DetectionRow> detection;
    std::vector<RangeRow> ranges;
    /// Detections not associated with any target, per SNR.
    std::vector<std::size_t> unmatched;
};

/// Monte-Carlo over drops x noise_runs; every SNR reuses the same symbols and noise draws.
SenseResult run_eval_sense(const Config &cfg, std::span<const double> snrs_db, std::size_t drops,
                           const Progress &progress = {});

/// Same loop on caller-supplied drops.
SenseResult run_eval_sense_on(const Config &cfg, std::span<const SenseDrop> drops, std::span<const double> snrs_db,
                              std::size_t noise_runs, const Progress &progress = {});

void write_detection_csv(std::ostream &out, std::span<const DetectionRow> rows);
void write_range_csv(std::ostream &out, std::span<const RangeRow> rows);

/// Complex sum of the target taps at each symbol time (statistical or deterministic).
std::vector<std::complex<double>> target_tap_series(ChannelEvolution &evo, std::size_t n_symbols,
                                                    double symbol_duration_s);

/// drop, frame, t_s, doppler_hz, power_db
void write_spectrogram_csv(std::ostream &out, std::size_t drop, const Spectrogram &sg, bool header = true);

/// Draws `n` unit-variance circular complex Gaussian samples into a matrix.
CMatrix complex_noise(std::size_t rows, std::size_t cols, Rng &rng);
/// Uniform random QPSK symbols.
CMatrix random_qpsk(std::size_t rows, std::size_t cols, Rng &rng);

} // namespace isac
