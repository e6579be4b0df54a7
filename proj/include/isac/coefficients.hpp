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

#include "isac/env_rays.hpp"
#include "isac/geometry.hpp"
#include "isac/scenario.hpp"
#include "isac/targets.hpp"

#include <array>
#include <complex>
#include <span>
#include <vector>

namespace isac
{

using cd = std::complex<double>;

/// Field components (F_theta, F_phi) of one element.
using FieldPattern = std::array<double, 2>;

/// Isotropic: (cos slant, sin slant). Patch38901: 8 dBi element with boresight along +x.
FieldPattern field_pattern(AntennaPattern pattern, double slant_rad, const Direction &d);

/// Row-major 2x2: {theta-theta, theta-phi, phi-theta, phi-phi}.
using PolarizationMatrix = std::array<cd, 4>;

PolarizationMatrix nlos_polarization(double xpr_linear, const PhaseQuad &phases);
PolarizationMatrix los_polarization();

/// F_rx^T * P * F_tx
cd polarized_gain(const FieldPattern &rx, const PolarizationMatrix &p, const FieldPattern &tx);

/// Piecewise-constant effective velocity, contiguous segments starting at t = 0.
class VelocityHistory
{
public:
    /// Appends [t0, t1) with constant velocity v. Throws IncompleteHistory when t0 does not
    /// continue the previous segment, ValidationError when t1 <= t0.
    void push(double t0, double t1, double v);

    /// Integral of v over [0, t] in metres. Throws IncompleteHistory when t is not covered.
    double path_integral(double t) const;

    /// 2 pi * path_integral(t) / wavelength
    double doppler_phase(double t, double wavelength) const;

    double covered_until() const { return ends_.empty() ? 0.0 : ends_.back(); }
    bool empty() const { return ends_.empty(); }

private:
    std::vector<double> starts_;
    std::vector<double> ends_;
    std::vector<double> v_;
    std::vector<double> prefix_; ///< integral up to starts_[i]
};

/// Direction of the LoS departure at tx and arrival at rx.
Direction los_departure(const BistaticGeometry &g);
Direction los_arrival(const BistaticGeometry &g);

cd env_ray_coefficient(const EnvRay &ray, const AntennaConfig &ant, std::size_t u, std::size_t s, const Vec3 &v_ut,
                       double wavelength, double cluster_power, int rays_per_cluster, double t);

cd target_ray_coefficient(const SensingRay &ray, const AntennaConfig &ant, std::size_t u, std::size_t s,
                          const Vec3 &v_ut, double wavelength, double t, const VelocityHistory &history);

/// sqrt(P / PL) exp(j phase)
cd deterministic_ray_coefficient(const DetRay &ray, double pl_db);

cd los_coefficient(const BistaticGeometry &g, const AntennaConfig &ant, std::size_t u, std::size_t s,
                   const Vec3 &v_ut, double wavelength, double t);

enum class TapOrigin
{
    LoS,
    Env,
    TargetStat,
    TargetDet,
};

std::string_view to_string(TapOrigin o);

struct Tap
{
    double delay_s = 0.0;
    cd coeff{};
    TapOrigin origin = TapOrigin::Env;
    int n = 0;
    int m = 0;
    bool operator==(const Tap &) const = default;
};

enum class DelayConvention
{
    Excess,
    Absolute,
};

struct TapSet
{
    DelayConvention convention = DelayConvention::Excess;
    std::vector<Tap> taps;
};

struct CirSnapshot
{
    double t = 0.0;
    std::size_t u = 0;
    std::size_t s = 0;
    DelayConvention convention = DelayConvention::Excess;
    std::vector<Tap> taps;
    bool operator==(const CirSnapshot &) const = default;
};

struct AssemblyParams
{
    double k_factor_db = 0.0;
    double pl_db = 0.0;
    double sf_db = 0.0;
    /// Deterministic taps skip K-factor, path loss and shadowing and are appended last.
    bool det_bypass_scaling = false;
    double t = 0.0;
    std::size_t u = 0;
    std::size_t s = 0;
};

/// Combines the tap sets. When `los` holds a tap the NLoS part is weighted by
/// sqrt(1/(K+1)) and the LoS tap by sqrt(K/(K+1)); with K = +inf only the LoS tap remains.
/// Every tap is then scaled by 10^(-(PL+SF)/20). Throws ConventionError when non-empty
/// sets disagree on the delay convention.
CirSnapshot assemble_cir(const TapSet &env, const TapSet &target_stat, const TapSet &target_det, const TapSet &los,
                         const AssemblyParams &params);

/// H[k] = sum coeff * exp(-j 2 pi k df tau), k = 0..n-1
std::vector<cd> cir_to_cfr(const CirSnapshot &snap, std::size_t n_subcarriers, double subcarrier_spacing_hz);

/// Same, accumulated into `out` (length n_subcarriers).
void accumulate_cfr(std::span<const Tap> taps, double subcarrier_spacing_hz, std::span<cd> out);

} // namespace isac
