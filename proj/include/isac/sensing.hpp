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

#include <complex>
#include <span>
#include <string_view>
#include <vector>

namespace isac
{

enum class Window
{
    Rectangular,
    Hann,
};

enum class ClutterRemoval
{
    None,
    /// Per-subcarrier mean over symbols removed before the Doppler transform.
    MeanSubtraction,
    /// A known static (LoS + environment) response is subtracted.
    Background,
};

std::string_view to_string(Window w);
std::string_view to_string(ClutterRemoval c);

struct MapOptions
{
    Window delay_window = Window::Rectangular;
    Window doppler_window = Window::Rectangular;
    bool mean_subtraction = false;
    /// Symbols x subcarriers, subtracted from the symbol-divided CFR when given.
    const CMatrix *background = nullptr;
};

struct RangeDopplerMap
{
    /// rows = delay bins, cols = Doppler bins (unshifted, bin q <-> q / (M T) wrapped)
    RMatrix power;
    double bin_delay_s = 0.0;
    double bin_doppler_hz = 0.0;

    /// Signed Doppler frequency of column q.
    double doppler_hz(std::size_t q) const;
};

/// Periodic Hann window of length n (sum of squares n * 3/8).
std::vector<double> window_coefficients(Window w, std::size_t n);

/// `rx` and `tx_symbols` are symbols x subcarriers. Divides element-wise, transforms the
/// subcarrier axis backward (delay) and the symbol axis forward (Doppler), |.|^2.
/// Throws DivisionGuard on a zero transmit symbol.
RangeDopplerMap range_doppler_map(const CMatrix &rx, const CMatrix &tx_symbols, double subcarrier_spacing_hz,
                                  double symbol_duration_s, const MapOptions &opt = {});

struct Detection
{
    int delay_bin = 0;
    int doppler_bin = 0;
    double bistatic_range_m = 0.0;
    double power = 0.0;
    double snr_est_db = 0.0;
    /// Peak on the delay edge, range not interpolated.
    bool coarse = false;
};

struct CfarWindow
{
    int guard = 2;
    int train = 8;
    bool operator==(const CfarWindow &) const = default;
};

/// Scale of the cell-averaging threshold for `n_train` exponential cells.
double cfar_alpha(double pfa, std::size_t n_train);

/// 2D cell-averaging CFAR: Doppler axis wraps, delay axis is clamped (edge cells use fewer
/// training cells and their own alpha). Reports cells above threshold that are also 3x3
/// local maxima. Range fields are left zero; see estimate_range.
std::vector<Detection> cfar_detect(const RangeDopplerMap &map, double pfa, CfarWindow win = {});

/// Cells above threshold without the local-maximum step (for false-alarm calibration).
std::size_t cfar_count_exceedances(const RangeDopplerMap &map, double pfa, CfarWindow win = {});

/// Fractional delay bin from a parabola through the log power of the peak and its two
/// delay neighbours. Sets det.bistatic_range_m = d3d + c * (bin + offset) * bin_delay.
double estimate_range(Detection &det, const RangeDopplerMap &map, double d3d);

struct Spectrogram
{
    /// rows = frames, cols = Doppler bins from -M/2 to M/2 - 1 (frequency increasing), dB re max.
    RMatrix power_db;
    double bin_doppler_hz = 0.0;
    double hop_s = 0.0;

    double doppler_hz(std::size_t col) const;
};

/// Short-time DFT of a complex sample sequence (one sample per symbol) with a Hann window.
Spectrogram doppler_spectrogram(std::span<const std::complex<double>> series, std::size_t window_symbols,
                                std::size_t hop_symbols, double symbol_duration_s);

} // namespace isac
