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

#include "isac/error.hpp"
#include "isac/ofdm.hpp"
#include "isac/rng.hpp"
#include "oracles.hpp"

#include "catch_amalgamated.hpp"

#include <cmath>
#include <set>

using namespace isac;
using Catch::Matchers::WithinAbs;

namespace
{
std::vector<std::uint8_t> to_bits(unsigned v, int n)
{
    std::vector<std::uint8_t> b(n);
    for (int i = 0; i < n; ++i)
        b[i] = (v >> (n - 1 - i)) & 1u;
    return b;
}

double ber_qam16_gray(double esn0)
{
    const double a = std::sqrt(esn0 / 5.0);
    return (3 * oracle::q_function(a) + 2 * oracle::q_function(3 * a) - oracle::q_function(5 * a)) / 4;
}

CMatrix flat(const OfdmConfig &c)
{
    return CMatrix(c.frame_symbols, c.n_subcarriers, {1.0, 0.0});
}
} // namespace

TEST_CASE("constellations have unit energy and invert under hard decisions", "[ofdm]")
{
    for (auto m : {Modulation::QPSK, Modulation::QAM16, Modulation::QAM64})
    {
        const int b = bits_per_symbol(m);
        const unsigned n = 1u << b;
        double e = 0;
        std::set<std::pair<double, double>> points;
        for (unsigned v = 0; v < n; ++v)
        {
            const auto bits = to_bits(v, b);
            const auto s = map_symbol(m, bits);
            e += std::norm(s);
            points.insert({std::round(s.real() * 1e9), std::round(s.imag() * 1e9)});
            std::vector<std::uint8_t> back(b);
            demap_symbol(m, s, back);
            CHECK(back == bits);
            // small perturbation stays in the decision region
            demap_symbol(m, s + std::complex<double>(0.01, -0.01), back);
            CHECK(back == bits);
        }
        CHECK(points.size() == n);
        CHECK_THAT(e / n, WithinAbs(1.0, 1e-12));
    }
}

TEST_CASE("Gray mapping: nearest neighbours differ in one bit", "[ofdm]")
{
    for (auto m : {Modulation::QAM16, Modulation::QAM64})
    {
        const int b = bits_per_symbol(m);
        const unsigned n = 1u << b;
        std::vector<std::complex<double>> s(n);
        for (unsigned v = 0; v < n; ++v)
            s[v] = map_symbol(m, to_bits(v, b));
        double dmin = 1e9;
        for (unsigned i = 0; i < n; ++i)
            for (unsigned j = i + 1; j < n; ++j)
                dmin = std::min(dmin, std::abs(s[i] - s[j]));
        for (unsigned i = 0; i < n; ++i)
            for (unsigned j = i + 1; j < n; ++j)
                if (std::abs(std::abs(s[i] - s[j]) - dmin) < 1e-9)
                    CHECK(std::popcount(i ^ j) == 1);
    }
}

TEST_CASE("AWGN BER with perfect CSI matches the closed form", "[ofdm]")
{
    OfdmConfig cfg;
    const CMatrix h = flat(cfg);
    const std::vector<CMatrix> frames{h};
    LinkOptions opt;
    opt.perfect_csi = true;
    for (double snr : {0.0, 4.0})
    {
        cfg.modulation = Modulation::QPSK;
        opt.snr_definition = SnrDefinition::EbN0;
        Rng rng(11 + static_cast<int>(snr));
        const auto r = simulate_ofdm_link(frames, cfg, snr, rng, opt, 1'000'000, UINT64_MAX);
        const double p = oracle::q_function(std::sqrt(2 * std::pow(10, snr / 10)));
        CHECK(r.bits >= 1'000'000);
        CHECK(std::abs(r.ber() - p) <= oracle::three_sigma(p, static_cast<double>(r.bits)));

        cfg.modulation = Modulation::QAM16;
        opt.snr_definition = SnrDefinition::EsN0;
        const double es = std::pow(10, (snr + 8) / 10);
        const auto q = simulate_ofdm_link(frames, cfg, snr + 8, rng, opt, 1'000'000, UINT64_MAX);
        const double p16 = ber_qam16_gray(es);
        CHECK(std::abs(q.ber() - p16) <= oracle::three_sigma(p16, static_cast<double>(q.bits)));
    }
}

TEST_CASE("LS and spline estimation is exact on a noiseless frequency-selective channel", "[ofdm]")
{
    OfdmConfig cfg;
    cfg.n_subcarriers = 64;
    CMatrix h(cfg.frame_symbols, cfg.n_subcarriers);
    for (std::size_t l = 0; l < h.rows; ++l)
        for (std::size_t k = 0; k < h.cols; ++k)
            h(l, k) = std::polar(1.0, 0.3 * k) * (1.0 + 0.2 * std::cos(0.1 * k)) * std::polar(1.0, 0.001 * l);
    LinkOptions opt;
    opt.no_noise = true;
    Rng a(1), b(2);
    for (auto m : {Modulation::QPSK, Modulation::QAM16, Modulation::QAM64})
    {
        cfg.modulation = m;
        const auto r = simulate_ofdm_frame(h, cfg, 0.0, a, b, opt);
        CHECK(r.bits == (cfg.frame_symbols - 5) * cfg.n_subcarriers * bits_per_symbol(m));
        CHECK(r.errors == 0);
    }
}

TEST_CASE("link simulation is deterministic per seed", "[ofdm]")
{
    OfdmConfig cfg;
    cfg.n_subcarriers = 128;
    const std::vector<CMatrix> frames{flat(cfg)};
    Rng r1(5), r2(5);
    const auto a = simulate_ofdm_link(frames, cfg, 3.0, r1, {}, 50'000, 1000);
    const auto b = simulate_ofdm_link(frames, cfg, 3.0, r2, {}, 50'000, 1000);
    CHECK(a.bits == b.bits);
    CHECK(a.errors == b.errors);
}

TEST_CASE("BER decreases with SNR", "[ofdm]")
{
    OfdmConfig cfg;
    cfg.n_subcarriers = 256;
    const std::vector<CMatrix> frames{flat(cfg)};
    double prev = 1.0;
    for (double snr = 0; snr <= 10; snr += 2)
    {
        Rng rng(3);
        const double ber = simulate_ofdm_link(frames, cfg, snr, rng, {}, 200'000, UINT64_MAX).ber();
        CHECK(ber < prev);
        prev = ber;
    }
}

TEST_CASE("OFDM configuration validation", "[ofdm]")
{
    OfdmConfig cfg;
    CHECK_NOTHROW(validate(cfg));
    cfg.pilot_period_symbols = 40;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    cfg = {};
    cfg.n_subcarriers = 0;
    CHECK_THROWS_AS(validate(cfg), ValidationError);
    cfg = {};
    Rng a(1), b(1);
    CHECK_THROWS(simulate_ofdm_frame(CMatrix(3, 3), cfg, 0.0, a, b));
}

TEST_CASE("natural spline weights reproduce an independent spline solve", "[ofdm]")
{
    const std::vector<double> x{0, 7, 14, 21, 28};
    const std::vector<double> y{1.0, -2.0, 0.5, 3.0, 2.5};
    std::vector<double> xq;
    for (double q = 0; q <= 28; q += 0.5)
        xq.push_back(q);
    const auto w = natural_spline_weights(x, xq);
    REQUIRE(w.rows == xq.size());
    REQUIRE(w.cols == x.size());
    for (std::size_t i = 0; i < xq.size(); ++i)
    {
        double v = 0, s = 0;
        for (std::size_t j = 0; j < x.size(); ++j)
        {
            v += w(i, j) * y[j];
            s += w(i, j);
        }
        CHECK_THAT(v, WithinAbs(oracle::natural_spline(x, y, xq[i]), 1e-10));
        CHECK_THAT(s, WithinAbs(1.0, 1e-12));
    }
    // linear data is reproduced everywhere, including beyond the last knot
    const std::vector<double> lin{0, 7, 14, 21, 28};
    const std::vector<double> far{30.0, 35.0};
    const auto wf = natural_spline_weights(x, far);
    for (std::size_t i = 0; i < far.size(); ++i)
    {
        double v = 0;
        for (std::size_t j = 0; j < x.size(); ++j)
            v += wf(i, j) * lin[j];
        CHECK_THAT(v, WithinAbs(far[i], 1e-9));
    }
    const std::vector<double> one{3.0};
    const auto w1 = natural_spline_weights(one, far);
    CHECK(w1(0, 0) == 1.0);
}

TEST_CASE("Gaussian tail function", "[ofdm]")
{
    for (double x = -3; x <= 6; x += 0.25)
        CHECK_THAT(qfunc(x), WithinAbs(oracle::q_function(x), 1e-15));
}
