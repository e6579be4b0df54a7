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
#include "isac/env_rays.hpp"
#include "isac/geometry.hpp"
#include "isac/rng.hpp"
#include "isac/scenario.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

namespace isac
{

enum class TargetModel
{
    Point,
    Extended,
};

/// T1: Tx-Target-Rx, T2: Tx-Reflection-Target-Rx, T3: Tx-Target-Reflection-Rx.
enum class ReflectionType
{
    T1,
    T2,
    T3,
};

enum class Placement
{
    AnglePriority,
    PositionPriority,
};

namespace motion
{
struct Stationary
{
    bool operator==(const Stationary &) const = default;
};
struct ConstantVelocity
{
    Vec3 v;
    bool operator==(const ConstantVelocity &) const = default;
};
/// Displacement samples (t, offset from the initial position), linearly interpolated
/// and held constant outside the sampled span.
struct PrescribedTrack
{
    std::vector<std::pair<double, Vec3>> samples;
    bool operator==(const PrescribedTrack &) const = default;
};
} // namespace motion

using Motion = std::variant<motion::Stationary, motion::ConstantVelocity, motion::PrescribedTrack>;

/// Velocity of the target at time t.
Vec3 velocity_at(const Motion &m, double t);
/// Displacement accumulated over [t, t + dt].
Vec3 displacement(const Motion &m, double t, double dt);

/// Axis-aligned region where the extra environment bounce of T2/T3 rays is drawn.
struct Box
{
    Vec3 lo;
    Vec3 hi;
    bool operator==(const Box &) const = default;
};

/// Baseline extent padded by 25 m in x and y, heights 0-10 m.
Box default_env_box(const BistaticGeometry &g);

struct TargetSpec
{
    TargetModel model = TargetModel::Point;
    int extended_rays = 10;
    double extended_sigma_m = 0.5;
    std::vector<ReflectionType> reflection_types{ReflectionType::T1};
    /// One weight per reflection type; empty means equal split.
    std::vector<double> sub_cluster_weights;
    Placement placement = Placement::AnglePriority;
    std::optional<Box> env_box;
    double env_clearance_m = 0.5;
    /// Floor on the excess path length of a target reflection point, keeps a zero-delay
    /// cluster off the Tx-Rx segment.
    double min_excess_path_m = 1.0;

    bool operator==(const TargetSpec &) const = default;
};

/// Throws ValidationError.
void validate(const TargetSpec &spec);

struct SensingRay
{
    int cluster_index = 0;
    int sub_cluster = 0;
    int ray_index = 0; ///< 1-based within the sub-cluster
    ReflectionType reflection_type = ReflectionType::T1;
    Point3 target_point;
    std::optional<Point3> env_point;
    double delay_s = 0.0; ///< excess over d3d / c
    double zod = 0.0, aod = 0.0, zoa = 0.0, aoa = 0.0;
    double power = 0.0;
    double eff_velocity = 0.0;
    PhaseQuad phases{};
    double xpr_linear = 1.0;

    Direction arrival() const { return {zoa, aoa}; }
    Direction departure() const { return {zod, aod}; }
    /// Scatterers in propagation order.
    std::vector<Point3> path_points() const;
    bool operator==(const SensingRay &) const = default;
};

/// Recomputes delay and angles from the stored points.
void refresh_geometry(SensingRay &ray, const BistaticGeometry &g);

/// Reflection points and rays of one target cluster. `cluster_departure` is the
/// cluster's departure direction from the angle generator (used by AnglePriority).
std::vector<SensingRay> build_statistical_target(const Cluster &cluster, const TargetSpec &spec,
                                                 const BistaticGeometry &g, const Direction &cluster_departure,
                                                 const LspSet &lsp, Rng &rng, bool absolute_delay_mode = false);

/// eff_velocity = -(rate of change of the ray's path length), target point moving, env point static.
void assign_doppler(std::span<SensingRay> rays, const Motion &m, const BistaticGeometry &g, double t);

/// Moves the target points from t to t + dt and refreshes delay, angles and eff_velocity.
void advance_targets(std::span<SensingRay> rays, const Motion &m, const BistaticGeometry &g, double t, double dt);

struct DetRay
{
    double power = 0.0; ///< linear
    double delay_s = 0.0;
    double zod = 0.0, aod = 0.0, zoa = 0.0, aoa = 0.0; ///< radians
    double phase_rad = 0.0;
    bool operator==(const DetRay &) const = default;
};

struct DetFrame
{
    double t = 0.0;
    std::vector<DetRay> rays;
    bool operator==(const DetFrame &) const = default;
};

enum class PowerUnit
{
    DBm,
    Linear,
};

struct DeterministicTarget
{
    std::vector<DetFrame> frames;
    double frame_rate_fps = 0.0;

    /// Latest frame with timestamp <= t (the first frame before the trace starts).
    const DetFrame &frame_at(double t) const;
    bool operator==(const DeterministicTarget &) const = default;
};

/// Parses the `# isac-trace v1` CSV format. Throws ParseError (with line number) or
/// ValidationError (non-increasing timestamps).
DeterministicTarget ingest_deterministic_rays(std::istream &in);

/// Writes the trace format; powers are written in `unit`.
void write_deterministic_trace(std::ostream &out, const DeterministicTarget &target, PowerUnit unit);

/// P' = P / PL for every ray.
DeterministicTarget scale_deterministic_power(const DeterministicTarget &target, double pl_db);

} // namespace isac
