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

#include <algorithm>
#include <cmath>
#include <numeric>

namespace isac
{

std::vector<double> delays_from_uniforms(std::span<const double> x, double r_tau, double ds_s)
{
    std::vector<double> tau(x.size());
    for (std::size_t n = 0; n < x.size(); ++n)
        tau[n] = -r_tau * ds_s * std::log(x[n]);
    if (tau.empty())
        return tau;
    const double tmin = *std::min_element(tau.begin(), tau.end());
    for (auto &t : tau)
        t -= tmin;
    std::sort(tau.begin(), tau.end());
    return tau;
}

std::vector<double> generate_delays(int n_clusters, double r_tau, double ds_s, Rng &rng)
{
    std::vector<double> x(static_cast<std::size_t>(std::max(n_clusters, 0)));
    for (auto &v : x)
        v = rng.uniform_open0();
    return delays_from_uniforms(x, r_tau, ds_s);
}

std::vector<double> generate_powers(std::span<const double> delays, double r_tau, double ds_s, double zeta_db,
                                    Rng &rng, std::vector<double> *shadow_db)
{
    const std::size_t n = delays.size();
    std::vector<double> p(n);
    std::vector<double> z(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
    {
        if (zeta_db > 0.0)
            z[i] = rng.normal(0.0, zeta_db);
        p[i] = std::exp(-delays[i] * (r_tau - 1.0) / (r_tau * ds_s)) * std::pow(10.0, -z[i] / 10.0);
    }
    const double sum = std::accumulate(p.begin(), p.end(), 0.0);
    for (auto &v : p)
        v /= sum;
    if (shadow_db)
        *shadow_db = std::move(z);
    return p;
}

std::vector<Cluster> make_clusters(std::span<const double> delays, std::span<const double> powers,
                                   std::span<const double> shadow_db)
{
    std::vector<Cluster> out(delays.size());
    for (std::size_t n = 0; n < delays.size(); ++n)
    {
        out[n].index = static_cast<int>(n);
        out[n].delay_s = delays[n];
        out[n].power = powers[n];
        out[n].shadow_db = n < shadow_db.size() ? shadow_db[n] : 0.0;
    }
    return out;
}

std::vector<Cluster> prune_clusters(std::span<const Cluster> clusters, double threshold_db)
{
    if (clusters.empty())
        return {};
    const double pmax =
        std::max_element(clusters.begin(), clusters.end(), [](auto &a, auto &b) { return a.power < b.power; })->power;
    std::vector<Cluster> kept;
    for (const auto &c : clusters)
        if (c.power == pmax || 10.0 * std::log10(c.power / pmax) >= threshold_db)
            kept.push_back(c);
    return kept;
}

namespace
{

bool selectable(const Cluster &c, bool los)
{
    return !(los && c.index == 0);
}

std::vector<std::size_t> by_power_desc(std::span<const Cluster> clusters)
{
    std::vector<std::size_t> order(clusters.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return clusters[a].power > clusters[b].power; });
    return order;
}

struct Selector
{
    std::span<const Cluster> clusters;
    bool los;
    Rng &rng;

    std::vector<std::size_t> operator()(const policy::RandomK &p) const
    {
        std::vector<std::size_t> pool;
        for (std::size_t i = 0; i < clusters.size(); ++i)
            if (selectable(clusters[i], los))
                pool.push_back(i);
        if (p.k < 0 || static_cast<std::size_t>(p.k) > pool.size())
            throw InsufficientClusters("RandomK: requested " + std::to_string(p.k) + " targets but only " +
                                       std::to_string(pool.size()) + " selectable clusters");
        // partial Fisher-Yates, draws only k values
        for (std::size_t i = 0; i < static_cast<std::size_t>(p.k); ++i)
        {
            const auto j = i + static_cast<std::size_t>(rng.uniform() * static_cast<double>(pool.size() - i));
            std::swap(pool[i], pool[std::min(j, pool.size() - 1)]);
        }
        pool.resize(static_cast<std::size_t>(p.k));
        return pool;
    }

    std::vector<std::size_t> operator()(const policy::DelayWindow &p) const
    {
        std::vector<std::size_t> picked;
        for (std::size_t i : by_power_desc(clusters))
        {
            const auto &c = clusters[i];
            if (selectable(c, los) && c.delay_s >= p.min_s && c.delay_s <= p.max_s)
                picked.push_back(i);
        }
        if (p.k > 0)
        {
            if (picked.size() < static_cast<std::size_t>(p.k))
                throw InsufficientClusters("DelayWindow: fewer than " + std::to_string(p.k) +
                                           " clusters inside the window");
            picked.resize(static_cast<std::size_t>(p.k));
        }
        if (picked.empty())
            throw InsufficientClusters("DelayWindow: no cluster inside the window");
        return picked;
    }

    std::vector<std::size_t> operator()(const policy::SecondStrongest &) const
    {
        const auto order = by_power_desc(clusters);
        if (order.size() < 2)
            throw InsufficientClusters("SecondStrongest: fewer than two clusters");
        // The strongest path is taken by the LoS/communication link; when the second
        // strongest is the LoS-bearing cluster itself, fall back to the strongest.
        if (selectable(clusters[order[1]], los))
            return {order[1]};
        return {order[0]};
    }

    std::vector<std::size_t> operator()(const policy::ExplicitIndices &p) const
    {
        std::vector<std::size_t> picked;
        for (int want : p.indices)
        {
            auto it = std::find_if(clusters.begin(), clusters.end(), [&](auto &c) { return c.index == want; });
            if (it == clusters.end() || !selectable(*it, los))
                throw InsufficientClusters("ExplicitIndices: cluster " + std::to_string(want) +
                                           " is not available for selection");
            picked.push_back(static_cast<std::size_t>(it - clusters.begin()));
        }
        return picked;
    }
};

} // namespace

std::vector<Cluster> select_target_clusters(std::span<const Cluster> clusters, const TargetPolicy &policy, bool los,
                                            Rng &rng)
{
    std::vector<Cluster> out(clusters.begin(), clusters.end());
    for (auto &c : out)
        c.kind = ClusterKind::Environment;
    for (std::size_t i : std::visit(Selector{clusters, los, rng}, policy))
        out[i].kind = ClusterKind::Target;
    return out;
}

} // namespace isac
