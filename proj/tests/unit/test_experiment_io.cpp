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
#include "isac/experiment.hpp"
#include "isac/io.hpp"

#include "catch_amalgamated.hpp"

#include <cmath>
#include <sstream>

using namespace isac;
using Catch::Matchers::WithinAbs;

namespace
{
std::string first_line(const std::string &s)
{
    return s.substr(0, s.find('\n'));
}

std::size_t line_count(const std::string &s)
{
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}
} // namespace

TEST_CASE("SNR range parsing", "[experiment]")
{
    CHECK(parse_snr_range("0:2:20").size() == 11);
    CHECK(parse_snr_range("5") == std::vector<double>{5.0});
    const auto r = parse_snr_range("-4:0.5:-2");
    REQUIRE(r.size() == 5);
    CHECK_THAT(r.back(), WithinAbs(-2.0, 1e-12));
    for (const char *bad : {"", "a:b:c", "0:0:5", "5:1:0", "0:1", "0:1:2:3", "1e999", "0:1:x"})
        CHECK_THROWS_AS(parse_snr_range(bad), ConfigError);
}

TEST_CASE("SNR at a BER level", "[experiment]")
{
    const std::vector<double> snr{0, 2, 4, 6};
    const std::vector<double> ber{1e-1, 1e-2, 1e-3, 1e-4};
    CHECK_THAT(*snr_at_ber(snr, ber, 1e-2), WithinAbs(2.0, 1e-12));
    CHECK_THAT(*snr_at_ber(snr, ber, std::sqrt(1e-2 * 1e-3)), WithinAbs(3.0, 1e-12));
    CHECK_FALSE(snr_at_ber(snr, ber, 1e-6).has_value());
    const std::vector<double> zeros{1e-1, 0.0, 0.0, 0.0};
    REQUIRE(snr_at_ber(snr, zeros, 1e-2).has_value());
    CHECK(*snr_at_ber(snr, zeros, 1e-2) > 0.0);
    CHECK(*snr_at_ber(snr, zeros, 1e-2) < 2.0);
}

TEST_CASE("association picks the nearest detection strongest target first", "[experiment]")
{
    RangeDopplerMap map;
    map.power = RMatrix(100, 50);
    map.bin_delay_s = 1e-8;
    map.bin_doppler_hz = 100.0;
    SensingConfig sc;
    std::vector<TargetTruth> truth(2);
    truth[0].delay_s = 10.2e-8;
    truth[0].doppler_hz = 0.0;
    truth[0].power = 1.0;
    truth[1].delay_s = 11e-8;
    truth[1].doppler_hz = 0.0;
    truth[1].power = 5.0;
    std::vector<Detection> dets(3);
    dets[0].delay_bin = 10;
    dets[1].delay_bin = 11;
    dets[2].delay_bin = 40;
    dets[2].doppler_bin = 20;
    const auto m = associate(dets, truth, map, sc);
    REQUIRE(m.size() == 2);
    CHECK(m[1] == 1);
    CHECK(m[0] == 0);

    // Doppler outside the window, including the wrapped distance
    truth[0].doppler_hz = -300.0;
    const auto m2 = associate(std::span(dets).first(1), std::span(truth).first(1), map, sc);
    CHECK(m2[0] == -1);
    dets[0].doppler_bin = 48; // -200 Hz, one bin away through the wrap
    CHECK(associate(std::span(dets).first(1), std::span(truth).first(1), map, sc)[0] == 0);
    dets[0].doppler_bin = 45; // -500 Hz, two bins away
    CHECK(associate(std::span(dets).first(1), std::span(truth).first(1), map, sc)[0] == -1);
    dets[0].doppler_bin = 47; // -300 Hz
    CHECK(associate(std::span(dets).first(1), std::span(truth).first(1), map, sc)[0] == 0);
    truth[0].doppler_hz = std::nan("");
    dets[0].doppler_bin = 5;
    CHECK(associate(std::span(dets).first(1), std::span(truth).first(1), map, sc)[0] == 0);
}

TEST_CASE("CFR binary and sidecar round trip", "[io]")
{
    CfrLayout lay{2, 3, 4, 120e3, 28e9, 8.92e-6};
    std::vector<CMatrix> mats;
    std::stringstream bin;
    for (int d = 0; d < 2; ++d)
    {
        CMatrix m(3, 4);
        for (std::size_t i = 0; i < m.data.size(); ++i)
            m.data[i] = {d + 0.1 * i, -1.0 / (i + 1)};
        append_cfr_binary(bin, m);
        mats.push_back(m);
    }
    CHECK(bin.str().size() == 2 * 3 * 4 * 16);
    const auto back = read_cfr_binary(bin, read_cfr_sidecar(cfr_sidecar(lay)));
    CHECK(back == mats);
    const auto j = cfr_sidecar(lay);
    const auto l2 = read_cfr_sidecar(j);
    CHECK(l2.drops == 2);
    CHECK(l2.subcarriers == 4);
    CHECK(l2.fc_hz == 28e9);
    std::stringstream short_bin(bin.str().substr(0, 40));
    CHECK_THROWS(read_cfr_binary(short_bin, lay));
}

TEST_CASE("CSV writers", "[io]")
{
    SimulationConfig sim;
    const auto drop = generate_isac_drop(sim, 0);
    std::ostringstream c, r, cir;
    write_clusters_csv(c, drop);
    CHECK(first_line(c.str()) == "drop,index,delay_s,power_lin,power_db_rel_max,kind");
    CHECK(line_count(c.str()) == drop.clusters.size() + 1);
    write_rays_csv(r, drop);
    std::size_t n_target_rays = 0;
    for (const auto &t : drop.targets)
        n_target_rays += t.rays.size();
    CHECK(line_count(r.str()) == drop.env_rays.size() + n_target_rays + 1);
    ChannelEvolution evo(drop);
    const std::vector<CirSnapshot> snaps{evo.snapshot(0.0)};
    write_cir_csv(cir, 0, snaps);
    CHECK(first_line(cir.str()) == "drop,t_s,u,s,delay_s,re,im,origin,n,m");
    CHECK(line_count(cir.str()) == snaps[0].taps.size() + 1);

    std::ostringstream ber, det, rng;
    BerRow br;
    br.snr_db = 2;
    br.isac = {100, 3};
    br.comm = {100, 4};
    write_ber_csv(ber, std::vector{br});
    CHECK(first_line(ber.str()) == "snr_db,modulation,ber_isac,ber_comm,bits_isac,errors_isac,bits_comm,errors_comm");
    CHECK(line_count(ber.str()) == 2);
    write_detection_csv(det, std::vector<DetectionRow>{{0.0, 1, 10, 5}});
    CHECK(first_line(det.str()) == "snr_db,target,trials,detected,pd");
    write_range_csv(rng, std::vector<RangeRow>{});
    CHECK(first_line(rng.str()) == "snr_db,drop,run,target,true_range_m,est_range_m,error_m,coarse");
}

TEST_CASE("common random numbers: identical channels give identical BER", "[experiment]")
{
    Config cfg;
    cfg.sim.generation.n_isac = cfg.sim.comm_cluster_count();
    cfg.sim.generation.prune_threshold_db = cfg.sim.generation.comm_prune_threshold_db;
    cfg.sim.generation.target_policy = policy::ExplicitIndices{};
    cfg.eval.ofdm.n_subcarriers = 96;
    cfg.eval.min_bits = 20'000;
    const std::vector<double> snrs{0.0, 10.0};
    const auto rows = run_eval_comm(cfg, snrs, 3);
    REQUIRE(rows.size() == 4);
    for (const auto &r : rows)
    {
        CHECK(r.isac.bits == r.comm.bits);
        CHECK(r.isac.errors == r.comm.errors);
        CHECK((r.isac.bits >= 20'000 || r.isac.errors >= cfg.eval.max_errors));
    }
    const auto again = run_eval_comm(cfg, snrs, 3);
    for (std::size_t i = 0; i < rows.size(); ++i)
        CHECK(again[i].isac.errors == rows[i].isac.errors);
}

TEST_CASE("sensing evaluation is reproducible and finds strong targets", "[experiment]")
{
    Config cfg;
    cfg.sim.generation.target_rel_los_db = {-27.76, -39.41, -43.41};
    const std::vector<double> snrs{-10.0, 30.0};
    const auto a = run_eval_sense(cfg, snrs, 2);
    const auto b = run_eval_sense(cfg, snrs, 2);
    REQUIRE(a.detection.size() == 6);
    for (std::size_t i = 0; i < a.detection.size(); ++i)
    {
        CHECK(a.detection[i].detected == b.detection[i].detected);
        CHECK(a.detection[i].trials == 2);
    }
    // strongest target detected at high SNR in every drop
    for (const auto &row : a.detection)
        if (row.snr_db == 30.0 && row.target == 1)
            CHECK(row.detected == row.trials);
    CHECK(a.unmatched.size() == 2);
}
