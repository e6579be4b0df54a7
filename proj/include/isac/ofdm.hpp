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

#include "isac/matrix.hpp"
#include "isac/rng.hpp"

#include <complex>
#include <cstdint>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

namespace isac
{

enum class Modulation
{
    QPSK,
    QAM16,
    QAM64,
};

int bits_per_symbol(Modulation m);
std::string_view to_string(Modulation m);

/// Gray-mapped square QAM with unit average energy. `bits` holds bits_per_symbol values,
/// the first half selects the in-phase level.
std::complex<double> map_symbol(Modulation m, std::span<const std::uint8_t> bits);
/// Hard nearest-point decision, written to `bits`.
void demap_symbol(Modulation m, std::complex<double> y, std::span<std::uint8_t> bits);

enum class SnrDefinition
{
    EsN0, ///< signal power per received symbol over noise
    EbN0, ///< per information bit; EsN0 = EbN0 * bits_per_symbol
};

struct OfdmConfig
{
    std::size_t n_subcarriers = 792;
    double subcarrier_spacing_hz = 120e3;
    double symbol_duration_s = 8.92e-6;
    Modulation modulation = Modulation::QPSK;
    /// Symbols 0, P, 2P, ... of a frame carry pilots on every subcarrier.
    std::size_t pilot_period_symbols = 7;
    std::size_t frame_symbols = 29;

    bool operator==(const OfdmConfig &) const = default;
};

/// Throws ValidationError for bad values, ConfigError when the pilot period exceeds the frame.
void validate(const OfdmConfig &cfg);

struct LinkOptions
{
    /// Equalize with the true CFR instead of the LS + spline estimate.
    bool perfect_csi = false;
    bool no_noise = false;
    SnrDefinition snr_definition = SnrDefinition::EsN0;
};

struct BerCount
{
    std::uint64_t bits = 0;
    std::uint64_t errors = 0;

    double ber() const { return bits ? static_cast<double>(errors) / static_cast<double>(bits) : 0.0; }
    BerCount &operator+=(const BerCount &o)
    {
        bits += o.bits;
        errors += o.errors;
        return *this;
    }
};

/// One frame through the channel `cfr` (frame_symbols x n_subcarriers). The noise variance
/// is mean|H|^2 / SNR so the SNR is the average received SNR of the frame. Bits and
/// pilot symbols come from `bit_rng`, noise from `noise_rng`.
BerCount simulate_ofdm_frame(const CMatrix &cfr, const OfdmConfig &cfg, double snr_db, Rng &bit_rng,
                             Rng &noise_rng, const LinkOptions &opt = {});

/// Cycles through `cfr_frames` (at least one full pass) until `min_bits` bits were sent or
/// `max_errors` errors were counted.
BerCount simulate_ofdm_link(std::span<const CMatrix> cfr_frames, const OfdmConfig &cfg, double snr_db, Rng &rng,
                            const LinkOptions &opt = {}, std::uint64_t min_bits = 1'000'000,
                            std::uint64_t max_errors = 400);

/// Interpolation weights of a natural cubic spline through knots `x` (ascending), evaluated
/// at `xq`: value(xq[i]) = sum_j w(i, j) * y[j]. Outside the knots the end cubic is continued
/// linearly; a single knot gives a constant.
RMatrix natural_spline_weights(std::span<const double> x, std::span<const double> xq);

/// Gaussian tail probability.
double qfunc(double x);

} // namespace isac
