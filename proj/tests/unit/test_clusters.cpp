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

#include "isac/clusters.hpp"
#include "isac/error.hpp"

#include "catch_amalgamated.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace isac;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("delays from forced uniforms", "[clusters]")
{
    const std::vector<double> ones{1.0, 1.0, 1.0};
    for (double t : delays_from_uniforms(ones, 3.0, 100e-9))
        CHECK(t == 0.0);
    const std::vector<double> x{std::exp(-1.0), std::exp(-2.0), std::exp(-3.0)};
    const auto d = delays_from_uniforms(x, 3.0, 100e-9);
    REQUIRE(d.size() == 3);
    CHECK(d[0] == 0.0);
    CHECK_THAT(d[1], WithinAbs(300e-9, 1e-18));
    CHECK_THAT(d[2], WithinAbs(600e-9, 1e-18));
}

TEST_CASE("delays are sorted and start at zero for every seed", "[clusters][property]")
{
    for (std::uint64_t seed = 0; seed < 1000; ++seed)
    {
        Rng rng(seed);
        const auto d = generate_delays(24, 3.0, 60e-9, rng);
        REQUIRE(d.size() == 24);
        CHECK(d.front() == 0.0);
        CHECK(std::is_sorted(d.begin(), d.end()));
    }
}

TEST_CASE("powers from hand-evaluated delays", "[clusters]")
{
    const std::vector<double> tau{0.0, 300e-9, 600e-9};
    Rng rng(1);
    const auto p = generate_powers(tau, 3.0, 100e-9, 0.0, rng);
    const double z = 1 + std::exp(-2.0) + std::exp(-4.0);
    CHECK_THAT(p[0], WithinRel(1 / z, 1e-12));
    CHECK_THAT(p[1], WithinRel(std::exp(-2.0) / z, 1e-12));
    CHECK_THAT(p[2], WithinRel(std::exp(-4.0) / z, 1e-12));
    CHECK_THAT(p[0], WithinAbs(0.86681333, 1e-8));
    CHECK_THAT(p[1], WithinAbs(0.11731043, 1e-8));
    CHECK_THAT(p[2], WithinAbs(0.01587624, 1e-8));

    const std::vector<double> one{0.0};
    CHECK(generate_powers(one, 3.0, 1e-7, 3.0, rng)[0] == 1.0);
    const std::vector<double> two{0.0, 0.0};
    const auto p2 = generate_powers(two, 3.0, 1e-7, 0.0, rng);
    CHECK(p2[0] == 0.5);
    CHECK(p2[1] == 0.5);
}

TEST_CASE("power normalization holds for every seed", "[clusters][property]")
{
    for (std::uint64_t seed = 0; seed < 1000; ++seed)
    {
        Rng rng(seed);
        const auto d = generate_delays(24, 3.0, 60e-9, rng);
        std::vector<double> shadow;
        const auto p = generate_powers(d, 3.0, 60e-9, 3.0, rng, &shadow);
        CHECK(std::abs(std::accumulate(p.begin(), p.end(), 0.0) - 1.0) < 1e-12);
        CHECK(shadow.size() == p.size());
        for (double v : p)
            CHECK(v > 0.0);
    }
}

namespace
{
std::vector<Cluster> from_db(std::initializer_list<double> db)
{
    std::vector<Cluster> out;
    int i = 0;
    for (double v : db)
    {
        Cluster c;
        c.index = i;
        c.delay_s = 1e-8 * i;
        c.power = std::pow(10.0, v / 10.0);
        out.push_back(c);
        ++i;
    }
    return out;
}
} // namespace

TEST_CASE("pruning thresholds", "[clusters]")
{
    auto a = prune_clusters(from_db({0, -10, -30}), -25);
    REQUIRE(a.size() == 2);
    CHECK(a[1].index == 1);
    auto b = prune_clusters(from_db({0, -49.9, -50.1}), -50);
    CHECK(b.size() == 2);
    auto c = prune_clusters(from_db({0, -49.9, -50.1, -300}), kNoPruning);
    CHECK(c.size() == 4);
    auto d = prune_clusters(from_db({-3, 0, -3}), -1);
    REQUIRE(d.size() == 1);
    CHECK(d[0].index == 1);
    CHECK(d[0].power == 1.0);
}

TEST_CASE("lowering the threshold never drops a kept cluster", "[clusters][property]")
{
    for (std::uint64_t seed = 0; seed < 300; ++seed)
    {
        Rng rng(seed);
        const auto d = generate_delays(24, 3.0, 60e-9, rng);
        std::vector<double> sh;
        const auto p = generate_powers(d, 3.0, 60e-9, 3.0, rng, &sh);
        const auto all = make_clusters(d, p, sh);
        std::vector<int> prev;
        for (double th = -5; th >= -80; th -= 5)
        {
            std::vector<int> idx;
            for (const auto &c : prune_clusters(all, th))
                idx.push_back(c.index);
            CHECK(std::includes(idx.begin(), idx.end(), prev.begin(), prev.end()));
            prev = idx;
        }
    }
}

TEST_CASE("target selection policies", "[clusters]")
{
    std::vector<Cluster> cl(3);
    const double pw[] = {0.8668, 0.1173, 0.0159};
    const double tau[] = {0.0, 300e-9, 600e-9};
    for (int i = 0; i < 3; ++i)
        cl[static_cast<std::size_t>(i)] = {i, tau[i], pw[i], 0.0, ClusterKind::Environment};
    Rng rng(1);

    auto kinds = [](const std::vector<Cluster> &v) {
        std::vector<int> t;
        for (const auto &c : v)
            if (c.kind == ClusterKind::Target)
                t.push_back(c.index);
        return t;
    };
    CHECK(kinds(select_target_clusters(cl, policy::SecondStrongest{}, false, rng)) == std::vector<int>{1});
    CHECK(kinds(select_target_clusters(cl, policy::DelayWindow{100e-9, 400e-9, 0}, false, rng)) ==
          std::vector<int>{1});
    CHECK(kinds(select_target_clusters(cl, policy::ExplicitIndices{{2}}, false, rng)) == std::vector<int>{2});
    CHECK(kinds(select_target_clusters(cl, policy::ExplicitIndices{}, true, rng)).empty());
    // the LoS cluster is never a target
    CHECK_THROWS(select_target_clusters(cl, policy::ExplicitIndices{{0}}, true, rng));
    CHECK_THROWS_AS(select_target_clusters(cl, policy::RandomK{3}, true, rng), InsufficientClusters);
    CHECK(kinds(select_target_clusters(cl, policy::RandomK{2}, true, rng)) == std::vector<int>{1, 2});
    CHECK(kinds(select_target_clusters(cl, policy::RandomK{3}, false, rng)).size() == 3);
}

TEST_CASE("RandomK on a 24-cluster -50 dB set yields three distinct NLoS targets", "[clusters][property]")
{
    for (std::uint64_t seed = 0; seed < 500; ++seed)
    {
        Rng rng(seed);
        const auto d = generate_delays(24, 3.0, 60e-9, rng);
        std::vector<double> sh;
        const auto p = generate_powers(d, 3.0, 60e-9, 3.0, rng, &sh);
        const auto kept = prune_clusters(make_clusters(d, p, sh), -50);
        const auto sel = select_target_clusters(kept, policy::RandomK{3}, true, rng);
        int n = 0;
        for (const auto &c : sel)
            if (c.kind == ClusterKind::Target)
            {
                ++n;
                CHECK(c.delay_s > 0.0);
            }
        CHECK(n == 3);
        CHECK(sel.size() == kept.size());
    }
    Rng a(5), b(5);
    std::vector<Cluster> cl(10);
    for (int i = 0; i < 10; ++i)
        cl[static_cast<std::size_t>(i)] = {i, 1e-8 * i, 0.1, 0.0, ClusterKind::Environment};
    CHECK(select_target_clusters(cl, policy::RandomK{3}, true, a) ==
          select_target_clusters(cl, policy::RandomK{3}, true, b));
}
