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

#include "isac/ofdm.hpp"

#include "isac/error.hpp"

#include <algorithm>
#include <cmath>

namespace isac
{

int bits_per_symbol(Modulation m)
{
    switch (m)
    {
    case Modulation::QPSK:
        return 2;
    case Modulation::QAM16:
        return 4;
    case Modulation::QAM64:
        return 6;
    }
    return 2;
}

std::string_view to_string(Modulation m)
{
    switch (m)
    {
    case Modulation::QPSK:
        return "qpsk";
    case Modulation::QAM16:
        return "qam16";
    case Modulation::QAM64:
        return "qam64";
    }
    return "?";
}

namespace
{

struct Pam
{
    int bits;
    int levels;
    double scale; ///< multiply integer levels by this for unit symbol energy
};

Pam pam_for(Modulation m)
{
    const int b = bits_per_symbol(m) / 2;
    const int l = 1 << b;
    return {b, l, 1.0 / std::sqrt(2.0 * (l * l - 1) / 3.0)};
}

double pam_map(const Pam &p, std::span<const std::uint8_t> bits)
{
    unsigned g = 0;
    for (int i = 0; i < p.bits; ++i)
        g = (g << 1) | bits[static_cast<std::size_t>(i)];
    unsigned idx = g;
    for (unsigned s = g >> 1; s; s >>= 1)
        idx ^= s;
    return (2.0 * idx - (p.levels - 1)) * p.scale;
}

void pam_demap(const Pam &p, double y, std::span<std::uint8_t> bits)
{
    const double pos = (y / p.scale + (p.levels - 1)) / 2.0;
    const int idx = std::clamp(static_cast<int>(std::lround(pos)), 0, p.levels - 1);
    const unsigned g = static_cast<unsigned>(idx) ^ (static_cast<unsigned>(idx) >> 1);
    for (int i = 0; i < p.bits; ++i)
        bits[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>((g >> (p.bits - 1 - i)) & 1U);
}

class BitSource
{
public:
    explicit BitSource(Rng &rng) : rng_(rng) {}
    std::uint8_t next()
    {
        if (left_ == 0)
        {
            word_ = rng_.bits();
            left_ = 64;
        }
        --left_;
        const auto b = static_cast<std::uint8_t>(word_ & 1U);
        word_ >>= 1;
        return b;
    }

private:
    Rng &rng_;
    std::uint64_t word_ = 0;
    int left_ = 0;
};

} // namespace

std::complex<double> map_symbol(Modulation m, std::span<const std::uint8_t> bits)
{
    const Pam p = pam_for(m);
    return {pam_map(p, bits.subspan(0, static_cast<std::size_t>(p.bits))),
            pam_map(p, bits.subspan(static_cast<std::size_t>(p.bits)))};
}

void demap_symbol(Modulation m, std::complex<double> y, std::span<std::uint8_t> bits)
{
    const Pam p = pam_for(m);
    pam_demap(p, y.real(), bits.subspan(0, static_cast<std::size_t>(p.bits)));
    pam_demap(p, y.imag(), bits.subspan(static_cast<std::size_t>(p.bits)));
}

void validate(const OfdmConfig &cfg)
{
    if (cfg.n_subcarriers < 1)
        throw ValidationError("evaluation.n_subcarriers: must be at least 1");
    if (!(cfg.subcarrier_spacing_hz > 0.0))
        throw ValidationError("evaluation.subcarrier_spacing_hz: must be > 0");
    if (!(cfg.symbol_duration_s * cfg.subcarrier_spacing_hz >= 1.0 - 1e-12))
        throw ValidationError("evaluation.symbol_duration_s: must be at least 1 / subcarrier spacing");
    if (cfg.pilot_period_symbols < 1)
        throw ValidationError("evaluation.pilot_period_symbols: must be at least 1");
    if (cfg.frame_symbols < 1)
        throw ValidationError("evaluation.frame_symbols: must be at least 1");
    if (cfg.pilot_period_symbols > cfg.frame_symbols)
        throw ConfigError("evaluation.pilot_period_symbols: pilot period exceeds the frame length");
}

RMatrix natural_spline_weights(std::span<const double> x, std::span<const double> xq)
{
    const std::size_t n = x.size();
    RMatrix w(xq.size(), n);
    if (n == 0)
        throw ValidationError("spline needs at least one knot");
    if (n == 1)
    {
        for (std::size_t i = 0; i < xq.size(); ++i)
            w(i, 0) = 1.0;
        return w;
    }
    std::vector<double> h(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i)
    {
        h[i] = x[i + 1] - x[i];
        if (!(h[i] > 0.0))
            throw ValidationError("spline knots must be strictly increasing");
    }
    std::vector<double> y(n), m2(n), cp(n), dp(n);
    for (std::size_t j = 0; j < n; ++j)
    {
        std::fill(y.begin(), y.end(), 0.0);
        y[j] = 1.0;
        // second derivatives, natural ends, Thomas algorithm on the interior rows
        std::fill(m2.begin(), m2.end(), 0.0);
        if (n > 2)
        {
            const std::size_t k = n - 2;
            for (std::size_t r = 0; r < k; ++r)
            {
                const std::size_t i = r + 1;
                const double a = h[i - 1], b = 2.0 * (h[i - 1] + h[i]), c = h[i];
                const double d = 6.0 * ((y[i + 1] - y[i]) / h[i] - (y[i] - y[i - 1]) / h[i - 1]);
                if (r == 0)
                {
                    cp[r] = c / b;
                    dp[r] = d / b;
                }
                else
                {
                    const double den = b - a * cp[r - 1];
                    cp[r] = c / den;
                    dp[r] = (d - a * dp[r - 1]) / den;
                }
            }
            m2[k] = dp[k - 1];
            for (std::size_t r = k - 1; r-- > 0;)
                m2[r + 1] = dp[r] - cp[r] * m2[r + 2];
        }
        for (std::size_t q = 0; q < xq.size(); ++q)
        {
            const double t = xq[q];
            double v;
            if (t < x[0])
            {
                const double slope = (y[1] - y[0]) / h[0] - h[0] * (2.0 * m2[0] + m2[1]) / 6.0;
                v = y[0] + slope * (t - x[0]);
            }
            else if (t > x[n - 1])
            {
                const double hh = h[n - 2];
                const double slope = (y[n - 1] - y[n - 2]) / hh + hh * (m2[n - 2] + 2.0 * m2[n - 1]) / 6.0;
                v = y[n - 1] + slope * (t - x[n - 1]);
            }
            else
            {
                auto it = std::upper_bound(x.begin(), x.end(), t);
                std::size_t i = static_cast<std::size_t>(it - x.begin());
                i = std::min(i == 0 ? 0 : i - 1, n - 2);
                const double hi = h[i], a = x[i + 1] - t, b = t - x[i];
                v = m2[i] * a * a * a / (6.0 * hi) + m2[i + 1] * b * b * b / (6.0 * hi) +
                    (y[i] / hi - m2[i] * hi / 6.0) * a + (y[i + 1] / hi - m2[i + 1] * hi / 6.0) * b;
            }
            w(q, j) = v;
        }
    }
    return w;
}

BerCount simulate_ofdm_frame(const CMatrix &cfr, const OfdmConfig &cfg, double snr_db, Rng &bit_rng,
                             Rng &noise_rng, const LinkOptions &opt)
{
    validate(cfg);
    const std::size_t L = cfg.frame_symbols, K = cfg.n_subcarriers, P = cfg.pilot_period_symbols;
    if (cfr.rows != L || cfr.cols != K)
        throw ValidationError("CFR frame shape does not match the OFDM configuration");
    const int bps = bits_per_symbol(cfg.modulation);

    double mean_h2 = 0.0;
    for (const auto &h : cfr.data)
        mean_h2 += std::norm(h);
    mean_h2 /= static_cast<double>(cfr.data.size());
    const double snr_lin = std::pow(10.0, snr_db / 10.0) * (opt.snr_definition == SnrDefinition::EbN0 ? bps : 1);
    const double sigma = opt.no_noise ? 0.0 : std::sqrt(mean_h2 / snr_lin / 2.0);

    std::vector<double> pilot_t, data_t;
    std::vector<std::size_t> pilot_rows, data_rows;
    for (std::size_t l = 0; l < L; ++l)
    {
        if (l % P == 0)
        {
            pilot_rows.push_back(l);
            pilot_t.push_back(static_cast<double>(l));
        }
        else
        {
            data_rows.push_back(l);
            data_t.push_back(static_cast<double>(l));
        }
    }

    BitSource src(bit_rng);
    CMatrix tx(L, K), rx(L, K);
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(L * K * bps));
    std::uint8_t pb[2];
    for (std::size_t l = 0; l < L; ++l)
    {
        const bool pilot = l % P == 0;
        for (std::size_t k = 0; k < K; ++k)
        {
            std::complex<double> x;
            if (pilot)
            {
                pb[0] = src.next();
                pb[1] = src.next();
                x = map_symbol(Modulation::QPSK, pb);
            }
            else
            {
                auto *b = &bits[(l * K + k) * static_cast<std::size_t>(bps)];
                for (int i = 0; i < bps; ++i)
                    b[i] = src.next();
                x = map_symbol(cfg.modulation, std::span<const std::uint8_t>(b, static_cast<std::size_t>(bps)));
            }
            tx(l, k) = x;
            const double nr = noise_rng.normal(), ni = noise_rng.normal();
            rx(l, k) = cfr(l, k) * x + std::complex<double>(sigma * nr, sigma * ni);
        }
    }

    CMatrix est;
    if (!opt.perfect_csi)
    {
        const RMatrix w = natural_spline_weights(pilot_t, data_t);
        CMatrix ls(pilot_rows.size(), K);
        for (std::size_t j = 0; j < pilot_rows.size(); ++j)
            for (std::size_t k = 0; k < K; ++k)
                ls(j, k) = rx(pilot_rows[j], k) / tx(pilot_rows[j], k);
        est = CMatrix(L, K);
        for (std::size_t d = 0; d < data_rows.size(); ++d)
            for (std::size_t j = 0; j < pilot_rows.size(); ++j)
            {
                const double wj = w(d, j);
                if (wj == 0.0)
                    continue;
                auto *dst = est.row(data_rows[d]);
                const auto *srcp = ls.row(j);
                for (std::size_t k = 0; k < K; ++k)
                    dst[k] += wj * srcp[k];
            }
    }
    const CMatrix &heq = opt.perfect_csi ? cfr : est;

    BerCount count;
    std::uint8_t out[8];
    for (std::size_t l : data_rows)
        for (std::size_t k = 0; k < K; ++k)
        {
            demap_symbol(cfg.modulation, rx(l, k) / heq(l, k), std::span(out, static_cast<std::size_t>(bps)));
            const auto *b = &bits[(l * K + k) * static_cast<std::size_t>(bps)];
            for (int i = 0; i < bps; ++i)
                count.errors += out[i] != b[i];
            count.bits += static_cast<std::uint64_t>(bps);
        }
    return count;
}

BerCount simulate_ofdm_link(std::span<const CMatrix> cfr_frames, const OfdmConfig &cfg, double snr_db, Rng &rng,
                            const LinkOptions &opt, std::uint64_t min_bits, std::uint64_t max_errors)
{
    if (cfr_frames.empty())
        throw ValidationError("simulate_ofdm_link: no CFR frames");
    BerCount total;
    for (std::size_t pass = 0;; ++pass)
    {
        for (const auto &f : cfr_frames)
        {
            if (pass > 0 && (total.bits >= min_bits || total.errors >= max_errors))
                return total;
            total += simulate_ofdm_frame(f, cfg, snr_db, rng, rng, opt);
        }
        if (total.bits >= min_bits || total.errors >= max_errors || total.bits == 0)
            return total;
    }
}

double qfunc(double x)
{
    return 0.5 * std::erfc(x / std::sqrt(2.0));
}

} // namespace isac
