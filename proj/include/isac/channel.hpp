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

#include "isac/clusters.hpp"
#include "isac/coefficients.hpp"
#include "isac/env_rays.hpp"
#include "isac/matrix.hpp"
#include "isac/scenario.hpp"
#include "isac/targets.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace isac
{

enum class TargetMotionKind
{
    Stationary,
    /// Effective velocity drawn per target from N(mean_i, std^2), directed along the
    /// steepest decrease of the bistatic path length.
    RandomSpeed,
    ConstantVelocity,
};

enum class TargetModeling
{
    Statistical,
    Deterministic,
};

struct GenerationConfig
{
    int n_isac = 24;
    /// 0 selects the scenario default.
    int n_comm = 0;
    double prune_threshold_db = -50.0;
    double comm_prune_threshold_db = -25.0;
    int rays_per_cluster = 20;
    bool allow_equispaced_rays = true;
    TargetPolicy target_policy = policy::RandomK{3};
    TargetSpec target;
    TargetMotionKind motion = TargetMotionKind::RandomSpeed;
    std::vector<double> target_speed_mean_mps{1.0, -10.0, 30.0};
    double target_speed_std_mps = 1.0;
    Vec3 target_velocity{};
    double cpi_s = 50 * 8.92e-6;
    /// Target i (in delay order) gets total power this many dB relative to the LoS tap.
    std::vector<double> target_rel_los_db;
    TargetModeling target_modeling = TargetModeling::Statistical;
    std::string trace_path;
    DelayConvention trace_delay_convention = DelayConvention::Excess;
    bool det_bypass_scaling = false;
    bool regenerate_per_drop = true;
    bool apply_pathloss = true;
    bool shadow_fading = true;
    std::uint64_t seed = 1;

    bool operator==(const GenerationConfig &) const = default;
};

struct SimulationConfig
{
    ScenarioSpec scenario;
    /// Empty means the scenario's built-in medians (UMi only).
    std::optional<LspSet> lsp;
    AntennaConfig antenna;
    GenerationConfig generation;

    /// Throws ConfigError when no LSPs are available for the scenario.
    LspSet effective_lsp() const;
    int comm_cluster_count() const;
    bool operator==(const SimulationConfig &) const = default;
};

/// Throws ValidationError / ConfigError.
void validate(const SimulationConfig &cfg);

struct TargetState
{
    int cluster_index = 0;
    Motion motion;
    std::vector<SensingRay> rays;
};

/// Everything drawn for one Monte-Carlo drop.
struct Drop
{
    std::uint64_t seed = 0;
    std::uint64_t drop_index = 0;
    ScenarioSpec scenario;
    LspSet lsp;
    AntennaConfig antenna;
    int n_generated = 0;
    int rays_per_cluster = 20;
    /// Clusters kept after pruning, delay order, with their kind.
    std::vector<Cluster> clusters;
    /// Parallel to `clusters`.
    std::vector<ClusterAngles> angles;
    /// Rays of the environment clusters.
    std::vector<EnvRay> env_rays;
    std::vector<TargetState> targets;
    std::shared_ptr<const DeterministicTarget> det;
    DelayConvention det_convention = DelayConvention::Excess;
    bool det_bypass_scaling = false;
    /// Path loss used to normalize deterministic powers.
    double det_norm_pl_db = 0.0;
    double pl_db = 0.0;
    double sf_db = 0.0;
    double cpi_s = 0.0;

    const Cluster &cluster(int index) const;
};

/// ISAC generator: n_isac clusters, low pruning threshold, target selection and target rays.
Drop generate_isac_drop(const SimulationConfig &cfg, std::uint64_t drop_index,
                        std::shared_ptr<const DeterministicTarget> det = nullptr);

/// Plain communication generator (no target stage): n_comm clusters, comm threshold.
Drop generate_comm_drop(const SimulationConfig &cfg, std::uint64_t drop_index);

/// Time evolution of one drop. Targets move once per CPI; the Doppler phase integral is
/// accumulated from the per-CPI effective velocities.
class ChannelEvolution
{
public:
    explicit ChannelEvolution(Drop drop);

    CirSnapshot snapshot(double t, std::size_t u = 0, std::size_t s = 0);

    /// Rows = symbols at t0 + l * symbol_duration, cols = subcarriers.
    CMatrix cfr_frames(std::size_t n_symbols, double symbol_duration_s, std::size_t n_subcarriers,
                       double subcarrier_spacing_hz, double t0 = 0.0, std::size_t u = 0, std::size_t s = 0);

    const Drop &drop() const { return drop_; }
    /// Target state of the CPI containing the last requested time.
    const std::vector<TargetState> &targets() const { return targets_; }
    /// Per-ray velocity history, same layout as targets()[i].rays.
    const std::vector<std::vector<VelocityHistory>> &histories() const { return history_; }

private:
    void reset();
    void advance_to(double t);

    Drop drop_;
    std::vector<TargetState> targets_;
    std::vector<std::vector<VelocityHistory>> history_;
    std::int64_t cpi_index_ = 0;
};

/// Keeps only taps whose origin is in `origins`.
CirSnapshot filter_taps(const CirSnapshot &snap, std::initializer_list<TapOrigin> origins);

/// Reads the deterministic trace named by the configuration (null when statistical).
std::shared_ptr<const DeterministicTarget> load_configured_trace(const SimulationConfig &cfg);

std::string_view to_string(TargetMotionKind k);
std::string_view to_string(TargetModeling k);
std::string_view to_string(DelayConvention c);

} // namespace isac
