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

#include "isac/env_rays.hpp"
#include "isac/error.hpp"

#include "catch_amalgamated.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace isac;
using Catch::Matchers::WithinAbs;

TEST_CASE("angle scaling factors use the nearest tabulated count", "[env_rays]")
{
    CHECK(c_phi_for(12) == 1.146);
    CHECK(c_phi_for(19) == 1.273);
    CHECK(c_phi_for(20) == 1.289);
    CHECK(c_phi_for(24) == 1.358);
    CHECK(c_phi_for(13) == 1.146); // tie between 12 and 14 goes to the smaller count
    CHECK(c_phi_for(2) == 0.779);
    CHECK(c_theta_for(12) == 1.104);
    CHECK(c_theta_for(24) == 1.282);
    CHECK(c_theta_for(9) == 0.889);
}

TEST_CASE("offset mappings match hand evaluation", "[env_rays]")
{
    // 2 * (AS / 1.4) * sqrt(-ln r) / C with AS = 20 deg, r = 0.1, C = 1.146
    const double expect = 2.0 * (20.0 / 1.4) * std::sqrt(std::log(10.0)) / 1.146;
    CHECK_THAT(azimuth_offset_deg(0.1, 20.0, 1.146), WithinAbs(expect, 1e-12));
    CHECK_THAT(azimuth_offset_deg(0.1, 20.0, 1.146), WithinAbs(37.8316, 1e-4));
    CHECK(azimuth_offset_deg(1.0, 20.0, 1.146) == 0.0);
    CHECK_THAT(zenith_offset_deg(std::exp(-1.0), 10.0, 1.104), WithinAbs(10.0 / 1.104, 1e-12));
}

TEST_CASE("unperturbed angles put the strongest cluster on the LoS direction", "[env_rays]")
{
    LspSet l;
    l.asa_deg = 40;
    l.asd_deg = 10;
    l.zsa_deg = 8;
    l.zsd_deg = 2;
    const std::vector<double> p{0.5, 0.3, 0.2};
    const std::vector<int> idx{0, 4, 7};
    const Direction los_a{1.5, 2.0}, los_d{1.6, -1.0};
    Rng rng(1);
    AngleOptions opt;
    opt.perturb = false;
    const auto a = generate_cluster_angles(p, idx, l, los_a, los_d, rng, opt);
    REQUIRE(a.size() == 3);
    CHECK(a[0].cluster_index == 0);
    CHECK(a[2].cluster_index == 7);
    CHECK_THAT(a[0].aoa, WithinAbs(2.0, 1e-15));
    CHECK_THAT(a[0].zod, WithinAbs(1.6, 1e-15));
    const double d = azimuth_offset_deg(0.3 / 0.5, 40, c_phi_for(3)) * std::numbers::pi / 180;
    CHECK_THAT(a[1].aoa, WithinAbs(2.0 + d, 1e-12));

    opt.scaling_count = 24;
    const auto b = generate_cluster_angles(p, idx, l, los_a, los_d, rng, opt);
    const double d24 = azimuth_offset_deg(0.3 / 0.5, 40, c_phi_for(24)) * std::numbers::pi / 180;
    CHECK_THAT(b[1].aoa, WithinAbs(2.0 + d24, 1e-12));
}

TEST_CASE("perturbed angles stay canonical", "[env_rays][property]")
{
    LspSet l;
    l.asa_deg = 60;
    l.asd_deg = 20;
    l.zsa_deg = 15;
    l.zsd_deg = 10;
    Rng rng(3);
    for (int trial = 0; trial < 200; ++trial)
    {
        std::vector<double> p(24);
        std::vector<int> idx(24);
        for (int i = 0; i < 24; ++i)
        {
            p[static_cast<std::size_t>(i)] = rng.uniform(1e-6, 1.0);
            idx[static_cast<std::size_t>(i)] = i;
        }
        for (const auto &a : generate_cluster_angles(p, idx, l, {0.1, 3.0}, {3.0, -3.1}, rng))
        {
            CHECK(a.zoa >= 0.0);
            CHECK(a.zoa <= std::numbers::pi);
            CHECK(a.aoa >= -std::numbers::pi);
            CHECK(a.aoa < std::numbers::pi);
            CHECK(a.zod >= 0.0);
            CHECK(a.zod <= std::numbers::pi);
        }
    }
}

TEST_CASE("ray offsets", "[env_rays]")
{
    const auto t = ray_offsets(20);
    CHECK(t.size() == 20);
    CHECK(t[0] == 0.0447);
    for (int m : {1, 2, 7, 33})
    {
        const auto o = ray_offsets(m);
        REQUIRE(o.size() == static_cast<std::size_t>(m));
        double ss = 0, s = 0;
        for (double v : o)
        {
            ss += v * v;
            s += v;
        }
        CHECK_THAT(s, WithinAbs(0.0, 1e-12));
        if (m > 1)
            CHECK_THAT(ss / m, WithinAbs(1.0, 1e-12));
    }
    CHECK_THROWS_AS(ray_offsets(7, false), ConfigError);
    CHECK_THROWS_AS(ray_offsets(0), ConfigError);
}

TEST_CASE("random coupling permutes every offset sequence independently", "[env_rays][property]")
{
    RaySpreads s{17, 5, 7, 3};
    const std::vector<ClusterAngles> c{{3, 1.4, 0.2, 1.7, -0.4}};
    std::vector<double> table(kRayOffsets20.begin(), kRayOffsets20.end());
    std::sort(table.begin(), table.end());
    Rng rng(1);
    bool any_different = false;
    for (int trial = 0; trial < 50; ++trial)
    {
        const auto rays = expand_rays(c, s, 20, rng);
        REQUIRE(rays.size() == 20);
        std::vector<double> aoa, zod;
        for (std::size_t m = 0; m < rays.size(); ++m)
        {
            CHECK(rays[m].ray_index == static_cast<int>(m) + 1);
            CHECK(rays[m].cluster_index == 3);
            aoa.push_back(std::round((rays[m].aoa - 0.2) * 180 / std::numbers::pi / 17 * 1e4) / 1e4);
            zod.push_back(std::round((rays[m].zod - 1.7) * 180 / std::numbers::pi / 3 * 1e4) / 1e4);
        }
        if (aoa != zod)
            any_different = true;
        std::sort(aoa.begin(), aoa.end());
        std::sort(zod.begin(), zod.end());
        CHECK(aoa == table);
        CHECK(zod == table);
    }
    CHECK(any_different);
}

TEST_CASE("XPR and phase draws", "[env_rays]")
{
    Rng rng(2);
    CHECK_THAT(draw_xpr(9.0, 0.0, rng), WithinAbs(std::pow(10.0, 0.9), 1e-12));
    double s = 0, s2 = 0;
    const int n = 50000;
    for (int i = 0; i < n; ++i)
    {
        const double db = 10 * std::log10(draw_xpr(9.0, 3.0, rng));
        s += db;
        s2 += db * db;
    }
    CHECK_THAT(s / n, WithinAbs(9.0, 0.05));
    CHECK_THAT(std::sqrt(s2 / n - (s / n) * (s / n)), WithinAbs(3.0, 0.05));
    for (int i = 0; i < 1000; ++i)
        for (double p : draw_initial_phases(rng))
        {
            CHECK(p >= -std::numbers::pi);
            CHECK(p < std::numbers::pi);
        }
}
