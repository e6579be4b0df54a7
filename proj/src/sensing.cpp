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

#include "isac/sensing.hpp"

#include "isac/error.hpp"
#include "isac/fft.hpp"
#include "isac/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace isac
{

std::string_view to_string(Window w)
{
    return w == Window::Hann ? "hann" : "rect";
}

std::string_view to_string(ClutterRemoval c)
{
    switch (c)
    {
    case ClutterRemoval::None:
        return "none";
    case ClutterRemoval::MeanSubtraction:
        return "mean_subtraction";
    case ClutterRemoval::Background:
        return "background";
    }
    return "?";
}

double RangeDopplerMap::doppler_hz(std::size_t q) const
{
    const auto m = static_cast<std::ptrdiff_t>(power.cols);
    auto s = static_cast<std::ptrdiff_t>(q);
    if (2 * s >= m)
        s -= m;
    return static_cast<double>(s) * bin_doppler_hz;
}

std::vector<double> window_coefficients(Window w, std::size_t n)
{
    std::vector<double> c(n, 1.0);
    if (w == Window::Hann)
        for (std::size_t i = 0; i < n; ++i)
            c[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(i) / static_cast<double>(n));
    return c;
}

RangeDopplerMap range_doppler_map(const CMatrix &rx, const CMatrix &tx_symbols, double subcarrier_spacing_hz,
                                  double symbol_duration_s, const MapOptions &opt)
{
    const std::size_t M = rx.rows, K = rx.cols;
    if (M < 2)
        throw ValidationError("range_doppler_map: at least two symbols are required");
    if (tx_symbols.rows != M || tx_symbols.cols != K)
        throw ValidationError("range_doppler_map: transmit symbols do not match the received grid");
    if (opt.background && (opt.background->rows != M || opt.background->cols != K))
        throw ValidationError("range_doppler_map: background does not match the received grid");

    CMatrix z(M, K);
    for (std::size_t i = 0; i < z.data.size(); ++i)
    {
        if (tx_symbols.data[i] == std::complex<double>{})
            throw DivisionGuard("range_doppler_map: zero transmit symbol at symbol " + std::to_string(i / K) +
                                ", subcarrier " + std::to_string(i % K));
        z.data[i] = rx.data[i] / tx_symbols.data[i];
        if (opt.background)
            z.data[i] -= opt.background->data[i];
    }
    if (opt.mean_subtraction)
        for (std::size_t k = 0; k < K; ++k)
        {
            std::complex<double> mean{};
            for (std::size_t l = 0; l < M; ++l)
                mean += z(l, k);
            mean /= static_cast<double>(M);
            for (std::size_t l = 0; l < M; ++l)
                z(l, k) -= mean;
        }

    const auto wd = window_coefficients(opt.delay_window, K);
    const auto wf = window_coefficients(opt.doppler_window, M);
    for (std::size_t l = 0; l < M; ++l)
        for (std::size_t k = 0; k < K; ++k)
            z(l, k) *= wd[k] * wf[l];

    fft_rows(z.data, M, K, FftSign::Backward);
    fft_cols(z.data, M, K, FftSign::Forward);

    RangeDopplerMap map;
    map.power = RMatrix(K, M);
    for (std::size_t l = 0; l < M; ++l)
        for (std::size_t k = 0; k < K; ++k)
            map.power(k, l) = std::norm(z(l, k));
    map.bin_delay_s = 1.0 / (static_cast<double>(K) * subcarrier_spacing_hz);
    map.bin_doppler_hz = 1.0 / (static_cast<double>(M) * symbol_duration_s);
    return map;
}

double cfar_alpha(double pfa, std::size_t n_train)
{
    const double n = static_cast<double>(n_train);
    return n * (std::pow(pfa, -1.0 / n) - 1.0);
}

namespace
{

// Threshold and noise level of every cell.
struct CfarSurface
{
    RMatrix threshold;
    RMatrix noise;
};

CfarSurface cfar_surface(const RangeDopplerMap &map, double pfa, CfarWindow win)
{
    if (!(pfa > 0.0 && pfa < 1.0))
        throw ValidationError("cfar: pfa must be in (0, 1)");
    if (win.guard < 0 || win.train < 1)
        throw ValidationError("cfar: guard must be >= 0 and train >= 1");
    const auto R = static_cast<std::ptrdiff_t>(map.power.rows);
    const auto C = static_cast<std::ptrdiff_t>(map.power.cols);
    const std::ptrdiff_t W = win.guard + win.train, G = win.guard;
    if (C < 2 * W + 1 || R < 1)
        throw ValidationError("cfar: the Doppler axis is shorter than the CFAR window");

    // Integral image over the Doppler-extended map: column e maps to (e - W) mod C.
    const std::ptrdiff_t Ce = C + 2 * W;
    std::vector<long double> s(static_cast<std::size_t>((R + 1) * (Ce + 1)), 0.0L);
    auto S = [&](std::ptrdiff_t r, std::ptrdiff_t c) -> long double & {
        return s[static_cast<std::size_t>(r * (Ce + 1) + c)];
    };
    for (std::ptrdiff_t r = 0; r < R; ++r)
    {
        long double row = 0.0L;
        for (std::ptrdiff_t e = 0; e < Ce; ++e)
        {
            const std::ptrdiff_t c = ((e - W) % C + C) % C;
            row += map.power(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
            S(r + 1, e + 1) = S(r, e + 1) + row;
        }
    }
    auto box = [&](std::ptrdiff_t r0, std::ptrdiff_t r1, std::ptrdiff_t e0, std::ptrdiff_t e1) {
        return S(r1 + 1, e1 + 1) - S(r0, e1 + 1) - S(r1 + 1, e0) + S(r0, e0);
    };

    std::map<std::size_t, double> alpha_cache;
    CfarSurface out{RMatrix(map.power.rows, map.power.cols), RMatrix(map.power.rows, map.power.cols)};
    for (std::ptrdiff_t r = 0; r < R; ++r)
    {
        const std::ptrdiff_t ro0 = std::max<std::ptrdiff_t>(0, r - W), ro1 = std::min(R - 1, r + W);
        const std::ptrdiff_t ri0 = std::max<std::ptrdiff_t>(0, r - G), ri1 = std::min(R - 1, r + G);
        const auto n_train =
            static_cast<std::size_t>((ro1 - ro0 + 1) * (2 * W + 1) - (ri1 - ri0 + 1) * (2 * G + 1));
        auto it = alpha_cache.find(n_train);
        if (it == alpha_cache.end())
            it = alpha_cache.emplace(n_train, cfar_alpha(pfa, n_train)).first;
        const double alpha = it->second;
        for (std::ptrdiff_t c = 0; c < C; ++c)
        {
            const std::ptrdiff_t ec = c + W; // centre column in extended coordinates
            const long double sum = box(ro0, ro1, ec - W, ec + W) - box(ri0, ri1, ec - G, ec + G);
            const double noise = std::max(0.0, static_cast<double>(sum / static_cast<long double>(n_train)));
            out.noise(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = noise;
            out.threshold(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = alpha * noise;
        }
    }
    return out;
}

} // namespace

std::vector<Detection> cfar_detect(const RangeDopplerMap &map, double pfa, CfarWindow win)
{
    const auto surf = cfar_surface(map, pfa, win);
    const auto R = static_cast<std::ptrdiff_t>(map.power.rows);
    const auto C = static_cast<std::ptrdiff_t>(map.power.cols);
    std::vector<Detection> out;
    for (std::ptrdiff_t r = 0; r < R; ++r)
        for (std::ptrdiff_t c = 0; c < C; ++c)
        {
            const double v = map.power(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
            if (!(v > surf.threshold(static_cast<std::size_t>(r), static_cast<std::size_t>(c))))
                continue;
            bool peak = true;
            for (std::ptrdiff_t dr = -1; dr <= 1 && peak; ++dr)
                for (std::ptrdiff_t dc = -1; dc <= 1; ++dc)
                {
                    const std::ptrdiff_t rr = r + dr;
                    if ((dr == 0 && dc == 0) || rr < 0 || rr >= R)
                        continue;
                    const std::ptrdiff_t cc = ((c + dc) % C + C) % C;
                    const double n = map.power(static_cast<std::size_t>(rr), static_cast<std::size_t>(cc));
                    // ties resolved toward the lower index so a plateau yields one detection
                    if (n > v || (n == v && (rr < r || (rr == r && cc < c))))
                    {
                        peak = false;
                        break;
                    }
                }
            if (!peak)
                continue;
            Detection d;
            d.delay_bin = static_cast<int>(r);
            d.doppler_bin = static_cast<int>(c);
            d.power = v;
            const double noise = surf.noise(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
            d.snr_est_db = noise > 0.0 ? 10.0 * std::log10(v / noise) : std::numeric_limits<double>::infinity();
            out.push_back(d);
        }
    return out;
}

std::size_t cfar_count_exceedances(const RangeDopplerMap &map, double pfa, CfarWindow win)
{
    const auto surf = cfar_surface(map, pfa, win);
    std::size_t n = 0;
    for (std::size_t i = 0; i < map.power.data.size(); ++i)
        n += map.power.data[i] > surf.threshold.data[i];
    return n;
}

double estimate_range(Detection &det, const RangeDopplerMap &map, double d3d)
{
    const auto R = static_cast<int>(map.power.rows);
    const auto q = static_cast<std::size_t>(det.doppler_bin);
    double offset = 0.0;
    det.coarse = det.delay_bin <= 0 || det.delay_bin >= R - 1;
    if (!det.coarse)
    {
        const auto p = static_cast<std::size_t>(det.delay_bin);
        const double a = map.power(p - 1, q), b = map.power(p, q), c = map.power(p + 1, q);
        if (a > 0.0 && b > 0.0 && c > 0.0)
        {
            const double la = std::log(a), lb = std::log(b), lc = std::log(c);
            const double den = la - 2.0 * lb + lc;
            if (den < 0.0)
                offset = std::clamp(0.5 * (la - lc) / den, -0.5, 0.5);
        }
        else
            det.coarse = true;
    }
    det.bistatic_range_m = d3d + kSpeedOfLight * (det.delay_bin + offset) * map.bin_delay_s;
    return det.bistatic_range_m;
}

double Spectrogram::doppler_hz(std::size_t col) const
{
    const auto m = static_cast<std::ptrdiff_t>(power_db.cols);
    return static_cast<double>(static_cast<std::ptrdiff_t>(col) - m / 2) * bin_doppler_hz;
}

Spectrogram doppler_spectrogram(std::span<const std::complex<double>> series, std::size_t window_symbols,
                                std::size_t hop_symbols, double symbol_duration_s)
{
    const std::size_t M = window_symbols;
    if (M < 2)
        throw ValidationError("spectrogram: window must be at least 2 symbols");
    if (hop_symbols < 1)
        throw ValidationError("spectrogram: hop must be at least 1 symbol");
    if (series.size() < M)
        throw ValidationError("spectrogram: series shorter than the window");

    // Direct DFT with a conjugate-symmetric twiddle table, so a conjugated series gives
    // exactly the frequency-mirrored power.
    std::vector<std::complex<double>> tw(M);
    for (std::size_t n = 0; n <= M / 2; ++n)
    {
        const double a = -2.0 * kPi * static_cast<double>(n) / static_cast<double>(M);
        tw[n] = {std::cos(a), std::sin(a)};
        if (n > 0 && n < M)
            tw[M - n] = std::conj(tw[n]);
    }
    if (M % 2 == 0)
        tw[M / 2] = {-1.0, 0.0};
    const auto win = window_coefficients(Window::Hann, M);

    const std::size_t frames = (series.size() - M) / hop_symbols + 1;
    Spectrogram sg;
    sg.power_db = RMatrix(frames, M);
    sg.bin_doppler_hz = 1.0 / (static_cast<double>(M) * symbol_duration_s);
    sg.hop_s = static_cast<double>(hop_symbols) * symbol_duration_s;

    std::vector<std::complex<double>> x(M);
    double peak = 0.0;
    for (std::size_t f = 0; f < frames; ++f)
    {
        for (std::size_t n = 0; n < M; ++n)
            x[n] = series[f * hop_symbols + n] * win[n];
        for (std::size_t col = 0; col < M; ++col)
        {
            const std::size_t q = (col + M - M / 2) % M;
            std::complex<double> acc{};
            for (std::size_t n = 0; n < M; ++n)
                acc += x[n] * tw[(n * q) % M];
            const double p = std::norm(acc);
            sg.power_db(f, col) = p;
            peak = std::max(peak, p);
        }
    }
    for (auto &v : sg.power_db.data)
        v = peak > 0.0 ? 10.0 * std::log10(std::max(v / peak, 1e-40)) : 0.0;
    return sg;
}

} // namespace isac
