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

#include "isac/channel.hpp"

#include "isac/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace isac
{

LspSet SimulationConfig::effective_lsp() const
{
    if (lsp)
        return *lsp;
    if (scenario.comm_scenario == CommScenario::UMi)
        return umi_street_canyon_lsp(scenario);
    throw ConfigError("lsp: scenario " + std::string(to_string(scenario.comm_scenario)) +
                      " has no built-in parameters, an [lsp] section is required");
}

int SimulationConfig::comm_cluster_count() const
{
    if (generation.n_comm > 0)
        return generation.n_comm;
    if (scenario.comm_scenario == CommScenario::UMi)
        return umi_street_canyon_cluster_count(scenario.los_condition);
    throw ConfigError("generation.n_comm: required for scenario " + std::string(to_string(scenario.comm_scenario)));
}

void validate(const SimulationConfig &cfg)
{
    validate(cfg.scenario);
    validate(cfg.effective_lsp());
    validate(cfg.antenna);
    validate(cfg.generation.target);
    const auto &g = cfg.generation;
    if (g.n_isac < 2)
        throw ValidationError("generation.n_isac: must be at least 2");
    if (g.n_comm < 0)
        throw ValidationError("generation.n_comm: must be >= 0");
    if (g.rays_per_cluster < 1)
        throw ValidationError("generation.rays_per_cluster: must be at least 1");
    if (!(g.cpi_s > 0.0) || !std::isfinite(g.cpi_s))
        throw ValidationError("generation.cpi_s: must be > 0");
    if (!(g.target_speed_std_mps >= 0.0))
        throw ValidationError("generation.target_speed_std_mps: must be >= 0");
    if (g.motion == TargetMotionKind::RandomSpeed && g.target_speed_mean_mps.empty())
        throw ValidationError("generation.target_speed_mean_mps: at least one value is required");
    if (!(g.prune_threshold_db < 0.0))
        throw ValidationError("generation.prune_threshold_db: must be < 0 dB");
    if (!(g.comm_prune_threshold_db < 0.0))
        throw ValidationError("generation.comm_prune_threshold_db: must be < 0 dB");
    if (const auto *rk = std::get_if<policy::RandomK>(&g.target_policy); rk && rk->k < 0)
        throw ValidationError("generation.target_count: must be >= 0");
    if (g.target_modeling == TargetModeling::Deterministic && g.trace_path.empty())
        throw ConfigError("generation.trace_path: deterministic target modeling needs a trace file");
}

const Cluster &Drop::cluster(int index) const
{
    for (const auto &c : clusters)
        if (c.index == index)
            return c;
    throw ValidationError("cluster " + std::to_string(index) + " is not part of the drop");
}

namespace
{

Drop drop_base(const SimulationConfig &cfg, std::uint64_t drop_index)
{
    validate(cfg);
    Drop d;
    d.seed = cfg.generation.seed;
    d.drop_index = cfg.generation.regenerate_per_drop ? drop_index : 0;
    d.scenario = cfg.scenario;
    d.lsp = cfg.effective_lsp();
    d.antenna = cfg.antenna;
    d.rays_per_cluster = cfg.generation.rays_per_cluster;
    d.cpi_s = cfg.generation.cpi_s;
    const double pl = compute_pathloss(cfg.scenario);
    d.pl_db = cfg.generation.apply_pathloss ? pl : 0.0;
    if (cfg.generation.shadow_fading && d.lsp.sf_sigma_db > 0.0)
    {
        Rng rng(derive_seed(d.seed, d.drop_index, Stream::Shadowing));
        d.sf_db = draw_shadow_fading(d.lsp.sf_sigma_db, rng);
    }
    d.det_norm_pl_db = pl;
    d.det_bypass_scaling = cfg.generation.det_bypass_scaling;
    d.det_convention = cfg.generation.trace_delay_convention;
    return d;
}

std::vector<Cluster> draw_clusters(const Drop &d, int n, double threshold_db)
{
    Rng rd(derive_seed(d.seed, d.drop_index, Stream::Delays));
    const auto delays = generate_delays(n, d.lsp.r_tau, d.lsp.ds_s, rd);
    Rng rp(derive_seed(d.seed, d.drop_index, Stream::Powers));
    std::vector<double> shadow;
    const auto powers = generate_powers(delays, d.lsp.r_tau, d.lsp.ds_s, d.lsp.zeta_db, rp, &shadow);
    auto clusters = make_clusters(delays, powers, shadow);
    if (d.scenario.absolute_delay_mode)
    {
        const double base = d.scenario.geometry().d3d() / kSpeedOfLight;
        for (auto &c : clusters)
            c.delay_s += base;
    }
    return prune_clusters(clusters, threshold_db);
}

std::vector<ClusterAngles> draw_angles(const Drop &d)
{
    std::vector<double> powers;
    std::vector<int> indices;
    for (const auto &c : d.clusters)
    {
        powers.push_back(c.power);
        indices.push_back(c.index);
    }
    const auto g = d.scenario.geometry();
    Rng ra(derive_seed(d.seed, d.drop_index, Stream::ClusterAngles));
    // scaling factors follow the generated cluster count, not the pruned one
    AngleOptions opt;
    opt.scaling_count = d.n_generated;
    return generate_cluster_angles(powers, indices, d.lsp, los_arrival(g), los_departure(g), ra, opt);
}

std::vector<EnvRay> draw_env_rays(const Drop &d, bool allow_equispaced)
{
    const auto spreads = ray_spreads(d.lsp);
    std::vector<EnvRay> out;
    for (std::size_t i = 0; i < d.clusters.size(); ++i)
    {
        const auto &c = d.clusters[i];
        if (c.kind != ClusterKind::Environment)
            continue;
        const auto idx = static_cast<std::uint64_t>(c.index);
        Rng rr(derive_seed(d.seed, d.drop_index, Stream::Rays, idx));
        auto rays = expand_rays(std::span(&d.angles[i], 1), spreads, d.rays_per_cluster, rr, allow_equispaced);
        Rng rx(derive_seed(d.seed, d.drop_index, Stream::Xpr, idx));
        Rng rph(derive_seed(d.seed, d.drop_index, Stream::Phases, idx));
        for (auto &r : rays)
        {
            r.xpr_linear = draw_xpr(d.lsp.xpr_mu_db, d.lsp.xpr_sigma_db, rx);
            r.phases = draw_initial_phases(rph);
        }
        out.insert(out.end(), rays.begin(), rays.end());
    }
    return out;
}

Motion target_motion(const GenerationConfig &gen, const Drop &d, const TargetState &t, std::size_t order)
{
    switch (gen.motion)
    {
    case TargetMotionKind::Stationary:
        return motion::Stationary{};
    case TargetMotionKind::ConstantVelocity:
        return motion::ConstantVelocity{gen.target_velocity};
    case TargetMotionKind::RandomSpeed:
        break;
    }
    Rng rv(derive_seed(d.seed, d.drop_index, Stream::Velocity, static_cast<std::uint64_t>(t.cluster_index)));
    const double mean = gen.target_speed_mean_mps[order % gen.target_speed_mean_mps.size()];
    const double speed = gen.target_speed_std_mps > 0.0 ? rv.normal(mean, gen.target_speed_std_mps) : mean;
    Point3 centre{};
    for (const auto &r : t.rays)
        centre += r.target_point;
    centre = centre * (1.0 / static_cast<double>(t.rays.size()));
    const auto g = d.scenario.geometry();
    // gradient of |p - tx| + |p - rx|; v = -speed * grad / |grad|^2 gives -grad.v = speed
    const Vec3 grad = unit_between(g.tx, centre) + unit_between(g.rx, centre);
    const double gn2 = dot(grad, grad);
    if (!(gn2 > 1e-24))
        return motion::Stationary{};
    return motion::ConstantVelocity{grad * (-speed / gn2)};
}

} // namespace

Drop generate_comm_drop(const SimulationConfig &cfg, std::uint64_t drop_index)
{
    Drop d = drop_base(cfg, drop_index);
    d.n_generated = cfg.comm_cluster_count();
    d.clusters = draw_clusters(d, d.n_generated, cfg.generation.comm_prune_threshold_db);
    d.angles = draw_angles(d);
    d.env_rays = draw_env_rays(d, cfg.generation.allow_equispaced_rays);
    return d;
}

Drop generate_isac_drop(const SimulationConfig &cfg, std::uint64_t drop_index,
                        std::shared_ptr<const DeterministicTarget> det)
{
    Drop d = drop_base(cfg, drop_index);
    const auto &gen = cfg.generation;
    d.n_generated = gen.n_isac;
    auto kept = draw_clusters(d, d.n_generated, gen.prune_threshold_db);
    Rng rs(derive_seed(d.seed, d.drop_index, Stream::Selection));
    d.clusters = select_target_clusters(kept, gen.target_policy, d.scenario.is_los(), rs);

    std::vector<std::size_t> target_pos;
    for (std::size_t i = 0; i < d.clusters.size(); ++i)
        if (d.clusters[i].kind == ClusterKind::Target)
            target_pos.push_back(i);

    if (!gen.target_rel_los_db.empty())
    {
        if (gen.target_rel_los_db.size() < target_pos.size())
            throw ConfigError("generation.target_rel_los_db: one value per target is required");
        const double k_lin = d.scenario.is_los() ? std::pow(10.0, d.lsp.k_factor_db / 10.0) : 1.0;
        for (std::size_t j = 0; j < target_pos.size(); ++j)
            d.clusters[target_pos[j]].power = k_lin * std::pow(10.0, gen.target_rel_los_db[j] / 10.0);
    }

    d.angles = draw_angles(d);
    d.env_rays = draw_env_rays(d, gen.allow_equispaced_rays);

    if (gen.target_modeling == TargetModeling::Deterministic)
    {
        d.det = det ? std::move(det) : load_configured_trace(cfg);
        return d;
    }

    const auto g = d.scenario.geometry();
    for (std::size_t j = 0; j < target_pos.size(); ++j)
    {
        const auto &c = d.clusters[target_pos[j]];
        TargetState t;
        t.cluster_index = c.index;
        Rng rt(derive_seed(d.seed, d.drop_index, Stream::Targets, static_cast<std::uint64_t>(c.index)));
        t.rays = build_statistical_target(c, gen.target, g, d.angles[target_pos[j]].departure(), d.lsp, rt,
                                          d.scenario.absolute_delay_mode);
        t.motion = target_motion(gen, d, t, j);
        assign_doppler(t.rays, t.motion, g, 0.0);
        d.targets.push_back(std::move(t));
    }
    return d;
}

ChannelEvolution::ChannelEvolution(Drop drop) : drop_(std::move(drop))
{
    if (!(drop_.cpi_s > 0.0))
        throw ValidationError("generation.cpi_s: must be > 0");
    reset();
}

void ChannelEvolution::reset()
{
    targets_ = drop_.targets;
    history_.assign(targets_.size(), {});
    for (std::size_t i = 0; i < targets_.size(); ++i)
    {
        history_[i].resize(targets_[i].rays.size());
        for (std::size_t r = 0; r < targets_[i].rays.size(); ++r)
            history_[i][r].push(0.0, drop_.cpi_s, targets_[i].rays[r].eff_velocity);
    }
    cpi_index_ = 0;
}

void ChannelEvolution::advance_to(double t)
{
    if (t < 0.0)
        throw ValidationError("snapshot time must be >= 0");
    if (t < static_cast<double>(cpi_index_) * drop_.cpi_s)
        reset();
    const auto g = drop_.scenario.geometry();
    while (t >= static_cast<double>(cpi_index_ + 1) * drop_.cpi_s)
    {
        const double t_cpi = static_cast<double>(cpi_index_) * drop_.cpi_s;
        ++cpi_index_;
        const double t0 = static_cast<double>(cpi_index_) * drop_.cpi_s;
        const double t1 = static_cast<double>(cpi_index_ + 1) * drop_.cpi_s;
        for (std::size_t i = 0; i < targets_.size(); ++i)
        {
            advance_targets(targets_[i].rays, targets_[i].motion, g, t_cpi, t0 - t_cpi);
            for (std::size_t r = 0; r < targets_[i].rays.size(); ++r)
                history_[i][r].push(t0, t1, targets_[i].rays[r].eff_velocity);
        }
    }
}

CirSnapshot ChannelEvolution::snapshot(double t, std::size_t u, std::size_t s)
{
    advance_to(t);
    const auto g = drop_.scenario.geometry();
    const double lambda = drop_.scenario.wavelength();
    const Vec3 &v_ut = drop_.scenario.v_ut;
    const bool absolute = drop_.scenario.absolute_delay_mode;
    const DelayConvention conv = absolute ? DelayConvention::Absolute : DelayConvention::Excess;
    const double base = absolute ? g.d3d() / kSpeedOfLight : 0.0;

    TapSet env{conv, {}};
    env.taps.reserve(drop_.env_rays.size());
    const Cluster *c = nullptr;
    for (const auto &r : drop_.env_rays)
    {
        if (!c || c->index != r.cluster_index)
            c = &drop_.cluster(r.cluster_index);
        env.taps.push_back({c->delay_s,
                            env_ray_coefficient(r, drop_.antenna, u, s, v_ut, lambda, c->power,
                                                drop_.rays_per_cluster, t),
                            TapOrigin::Env, r.cluster_index, r.ray_index});
    }

    TapSet stat{conv, {}};
    for (std::size_t i = 0; i < targets_.size(); ++i)
    {
        const auto &rays = targets_[i].rays;
        const int per_sub = rays.empty() ? 0 : static_cast<int>(rays.size()) / std::max(1, rays.back().sub_cluster + 1);
        for (std::size_t r = 0; r < rays.size(); ++r)
            stat.taps.push_back({base + rays[r].delay_s,
                                 target_ray_coefficient(rays[r], drop_.antenna, u, s, v_ut, lambda, t, history_[i][r]),
                                 TapOrigin::TargetStat, rays[r].cluster_index,
                                 rays[r].sub_cluster * per_sub + rays[r].ray_index});
    }

    TapSet det{drop_.det_convention, {}};
    if (drop_.det)
    {
        const auto &frame = drop_.det->frame_at(t);
        const double pl = drop_.det_bypass_scaling ? 0.0 : drop_.det_norm_pl_db;
        for (std::size_t j = 0; j < frame.rays.size(); ++j)
            det.taps.push_back({frame.rays[j].delay_s, deterministic_ray_coefficient(frame.rays[j], pl),
                                TapOrigin::TargetDet, -1, static_cast<int>(j) + 1});
    }

    TapSet los{conv, {}};
    if (drop_.scenario.is_los())
        los.taps.push_back({base, los_coefficient(g, drop_.antenna, u, s, v_ut, lambda, t), TapOrigin::LoS, 0, 0});

    AssemblyParams p;
    p.k_factor_db = drop_.lsp.k_factor_db;
    p.pl_db = drop_.pl_db;
    p.sf_db = drop_.sf_db;
    p.det_bypass_scaling = drop_.det_bypass_scaling;
    p.t = t;
    p.u = u;
    p.s = s;
    return assemble_cir(env, stat, det, los, p);
}

CMatrix ChannelEvolution::cfr_frames(std::size_t n_symbols, double symbol_duration_s, std::size_t n_subcarriers,
                                     double subcarrier_spacing_hz, double t0, std::size_t u, std::size_t s)
{
    CMatrix h(n_symbols, n_subcarriers);
    for (std::size_t l = 0; l < n_symbols; ++l)
    {
        const auto snap = snapshot(t0 + static_cast<double>(l) * symbol_duration_s, u, s);
        accumulate_cfr(snap.taps, subcarrier_spacing_hz, std::span(h.row(l), n_subcarriers));
    }
    return h;
}

CirSnapshot filter_taps(const CirSnapshot &snap, std::initializer_list<TapOrigin> origins)
{
    CirSnapshot out = snap;
    out.taps.clear();
    for (const auto &tap : snap.taps)
        if (std::find(origins.begin(), origins.end(), tap.origin) != origins.end())
            out.taps.push_back(tap);
    return out;
}

std::shared_ptr<const DeterministicTarget> load_configured_trace(const SimulationConfig &cfg)
{
    if (cfg.generation.target_modeling != TargetModeling::Deterministic)
        return nullptr;
    std::ifstream in(cfg.generation.trace_path);
    if (!in)
        throw ConfigError("generation.trace_path: cannot open '" + cfg.generation.trace_path + "'");
    return std::make_shared<const DeterministicTarget>(ingest_deterministic_rays(in));
}

std::string_view to_string(TargetMotionKind k)
{
    switch (k)
    {
    case TargetMotionKind::Stationary:
        return "stationary";
    case TargetMotionKind::RandomSpeed:
        return "random_speed";
    case TargetMotionKind::ConstantVelocity:
        return "constant_velocity";
    }
    return "?";
}

std::string_view to_string(TargetModeling k)
{
    return k == TargetModeling::Statistical ? "statistical" : "deterministic";
}

std::string_view to_string(DelayConvention c)
{
    return c == DelayConvention::Excess ? "excess" : "absolute";
}

} // namespace isac
