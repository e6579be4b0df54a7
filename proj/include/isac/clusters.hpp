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

#include "isac/rng.hpp"

#include <cstdint>
#include <limits>
#include <span>
#include <variant>
#include <vector>

namespace isac
{

enum class ClusterKind
{
    Environment,
    Target,
};

struct Cluster
{
    int index = 0;        ///< position in the delay-sorted list of generated clusters
    double delay_s = 0.0; ///< excess delay
    double power = 0.0;   ///< linear fraction, normalized over all generated clusters
    double shadow_db = 0.0;
    ClusterKind kind = ClusterKind::Environment;

    bool operator==(const Cluster &) const = default;
};

namespace policy
{
struct RandomK
{
    int k = 3;
    bool operator==(const RandomK &) const = default;
};
/// Clusters with delay in [min, max]; at most k of them (strongest first), k = 0 means all.
struct DelayWindow
{
    double min_s = 0.0;
    double max_s = 0.0;
    int k = 0;
    bool operator==(const DelayWindow &) const = default;
};
struct SecondStrongest
{
    bool operator==(const SecondStrongest &) const = default;
};
struct ExplicitIndices
{
    std::vector<int> indices;
    bool operator==(const ExplicitIndices &) const = default;
};
} // namespace policy

using TargetPolicy =
    std::variant<policy::RandomK, policy::DelayWindow, policy::SecondStrongest, policy::ExplicitIndices>;

inline constexpr double kNoPruning = -std::numeric_limits<double>::infinity();

/// Delay taps tau_n, ascending, first element exactly 0.
std::vector<double> generate_delays(int n_clusters, double r_tau, double ds_s, Rng &rng);

/// Same as generate_delays but with the uniform draws X_n supplied by the caller.
std::vector<double> delays_from_uniforms(std::span<const double> x, double r_tau, double ds_s);

/// Returns P_n (normalized to sum 1) and writes the per-cluster shadowing terms to `shadow_db`.
std::vector<double> generate_powers(std::span<const double> delays, double r_tau, double ds_s, double zeta_db,
                                    Rng &rng, std::vector<double> *shadow_db = nullptr);

/// Delays + powers combined into Cluster records, all marked Environment.
std::vector<Cluster> make_clusters(std::span<const double> delays, std::span<const double> powers,
                                   std::span<const double> shadow_db);

/// Keeps clusters within `threshold_db` of the strongest one. Powers are not renormalized.
std::vector<Cluster> prune_clusters(std::span<const Cluster> clusters, double threshold_db);

/// Marks the policy-selected clusters as Target. Under LoS the first (zero-delay) cluster
/// carries the LoS ray and is never selectable. Throws InsufficientClusters.
std::vector<Cluster> select_target_clusters(std::span<const Cluster> clusters, const TargetPolicy &policy,
                                            bool los, Rng &rng);

} // namespace isac
