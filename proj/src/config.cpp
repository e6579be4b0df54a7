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

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace isac
{

namespace pt = boost::property_tree;

namespace
{

std::string trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return std::string(s);
}

std::string lower(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::vector<std::string> split(const std::string &s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep))
        out.push_back(trim(cur));
    if (!s.empty() && s.back() == sep)
        out.emplace_back();
    return out;
}

std::string fmt_double(double v)
{
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    return fmt::format("{:.17g}", v);
}

template <class E> struct EnumTable
{
    std::vector<std::pair<std::string_view, E>> entries;

    E parse(const std::string &field, const std::string &text) const
    {
        const auto key = lower(trim(text));
        for (const auto &[name, value] : entries)
            if (name == key)
                return value;
        std::string allowed;
        for (const auto &[name, value] : entries)
            allowed += (allowed.empty() ? "" : "|") + std::string(name);
        throw ConfigError(field + ": '" + text + "' is not one of " + allowed);
    }
    std::string_view name(E v) const
    {
        for (const auto &[name, value] : entries)
            if (value == v)
                return name;
        return "?";
    }
};

const EnumTable<CommScenario> kCommScenarios{{{"umi", CommScenario::UMi},
                                              {"uma", CommScenario::UMa},
                                              {"indoor_office", CommScenario::IndoorOffice},
                                              {"rma", CommScenario::RMa},
                                              {"inf", CommScenario::InF},
                                              {"custom", CommScenario::Custom}}};
const EnumTable<SensingScenario> kSensingScenarios{{{"target_localization", SensingScenario::TargetLocalization},
                                                    {"behavior_recognition", SensingScenario::BehaviorRecognition},
                                                    {"breath_detection", SensingScenario::BreathDetection},
                                                    {"invasion_detection", SensingScenario::InvasionDetection},
                                                    {"environment_imaging", SensingScenario::EnvironmentImaging}}};
const EnumTable<LosCondition> kLos{{{"los", LosCondition::LoS}, {"nlos", LosCondition::NLoS}}};
const EnumTable<AntennaPattern> kPatterns{
    {{"isotropic", AntennaPattern::Isotropic}, {"patch38901", AntennaPattern::Patch38901}}};
const EnumTable<TargetModel> kTargetModels{{{"point", TargetModel::Point}, {"extended", TargetModel::Extended}}};
const EnumTable<ReflectionType> kReflections{
    {{"t1", ReflectionType::T1}, {"t2", ReflectionType::T2}, {"t3", ReflectionType::T3}}};
const EnumTable<Placement> kPlacements{
    {{"angle_priority", Placement::AnglePriority}, {"position_priority", Placement::PositionPriority}}};
const EnumTable<TargetMotionKind> kMotions{{{"stationary", TargetMotionKind::Stationary},
                                            {"random_speed", TargetMotionKind::RandomSpeed},
                                            {"constant_velocity", TargetMotionKind::ConstantVelocity}}};
const EnumTable<TargetModeling> kModeling{
    {{"statistical", TargetModeling::Statistical}, {"deterministic", TargetModeling::Deterministic}}};
const EnumTable<DelayConvention> kConventions{
    {{"excess", DelayConvention::Excess}, {"absolute", DelayConvention::Absolute}}};
const EnumTable<Modulation> kModulations{
    {{"qpsk", Modulation::QPSK}, {"qam16", Modulation::QAM16}, {"qam64", Modulation::QAM64}}};
const EnumTable<SnrDefinition> kSnrDefs{{{"es_n0", SnrDefinition::EsN0}, {"eb_n0", SnrDefinition::EbN0}}};
const EnumTable<Window> kWindows{{{"rect", Window::Rectangular}, {"hann", Window::Hann}}};
const EnumTable<ClutterRemoval> kClutter{{{"none", ClutterRemoval::None},
                                          {"mean_subtraction", ClutterRemoval::MeanSubtraction},
                                          {"background", ClutterRemoval::Background}}};

// Pulls keys out of one section and remembers which ones were consumed.
class Section
{
public:
    Section(std::string name, const pt::ptree *tree) : name_(std::move(name)), tree_(tree) {}

    bool present() const { return tree_ != nullptr; }

    std::optional<std::string> raw(const std::string &key)
    {
        if (!tree_)
            return std::nullopt;
        auto it = tree_->find(key);
        if (it == tree_->not_found())
            return std::nullopt;
        used_.insert(key);
        return trim(it->second.data());
    }

    std::string field(const std::string &key) const { return name_ + "." + key; }

    double number(const std::string &key, double fallback)
    {
        auto v = raw(key);
        return v ? parse_double(field(key), *v) : fallback;
    }

    template <class I> I integer(const std::string &key, I fallback)
    {
        auto v = raw(key);
        if (!v)
            return fallback;
        I out{};
        auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
        if (ec != std::errc{} || p != v->data() + v->size())
            throw ConfigError(field(key) + ": '" + *v + "' is not a valid integer");
        return out;
    }

    bool boolean(const std::string &key, bool fallback)
    {
        auto v = raw(key);
        if (!v)
            return fallback;
        const auto s = lower(*v);
        if (s == "true" || s == "1" || s == "yes" || s == "on")
            return true;
        if (s == "false" || s == "0" || s == "no" || s == "off")
            return false;
        throw ConfigError(field(key) + ": '" + *v + "' is not a boolean");
    }

    std::string text(const std::string &key, const std::string &fallback)
    {
        auto v = raw(key);
        return v ? *v : fallback;
    }

    template <class E> E choice(const std::string &key, const EnumTable<E> &table, E fallback)
    {
        auto v = raw(key);
        return v ? table.parse(field(key), *v) : fallback;
    }

    std::vector<double> numbers(const std::string &key, const std::vector<double> &fallback)
    {
        auto v = raw(key);
        if (!v)
            return fallback;
        std::vector<double> out;
        if (v->empty())
            return out;
        for (const auto &part : split(*v, ','))
            out.push_back(parse_double(field(key), part));
        return out;
    }

    Vec3 vec3(const std::string &key, const Vec3 &fallback)
    {
        auto v = raw(key);
        if (!v)
            return fallback;
        return parse_vec3(field(key), *v);
    }

    std::vector<Vec3> vec3_list(const std::string &key, const std::vector<Vec3> &fallback)
    {
        auto v = raw(key);
        if (!v)
            return fallback;
        std::vector<Vec3> out;
        for (const auto &part : split(*v, ';'))
            out.push_back(parse_vec3(field(key), part));
        return out;
    }

    /// Threshold in dB where "none" / "-inf" disable pruning.
    double threshold(const std::string &key, double fallback)
    {
        auto v = raw(key);
        if (!v)
            return fallback;
        const auto s = lower(*v);
        if (s == "none" || s == "-inf")
            return kNoPruning;
        return parse_double(field(key), *v);
    }

    void check_unused() const
    {
        if (!tree_)
            return;
        for (const auto &[key, child] : *tree_)
            if (!used_.count(key))
                throw ConfigError(field(key) + ": unknown key");
    }

    static double parse_double(const std::string &field, const std::string &text)
    {
        const auto s = trim(text);
        double out = 0.0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        if (s.empty() || ec != std::errc{} || p != s.data() + s.size() || std::isnan(out))
            throw ConfigError(field + ": '" + text + "' is not a valid number");
        return out;
    }

    static Vec3 parse_vec3(const std::string &field, const std::string &text)
    {
        const auto parts = split(text, ',');
        if (parts.size() != 3)
            throw ConfigError(field + ": expected three comma-separated values, got '" + text + "'");
        return {parse_double(field, parts[0]), parse_double(field, parts[1]), parse_double(field, parts[2])};
    }

private:
    std::string name_;
    const pt::ptree *tree_;
    std::set<std::string> used_;
};

std::string join(const std::vector<double> &v)
{
    std::string s;
    for (double x : v)
        s += (s.empty() ? "" : ", ") + fmt_double(x);
    return s;
}

std::string vec3_text(const Vec3 &v)
{
    return fmt_double(v.x) + ", " + fmt_double(v.y) + ", " + fmt_double(v.z);
}

std::string vec3_list_text(const std::vector<Vec3> &v)
{
    std::string s;
    for (const auto &p : v)
        s += (s.empty() ? "" : "; ") + vec3_text(p);
    return s;
}

std::string threshold_text(double v)
{
    return v == kNoPruning ? "none" : fmt_double(v);
}

const std::set<std::string> kSections{"scenario", "lsp", "antenna", "generation", "evaluation"};

} // namespace

Config load_config(std::istream &in)
{
    pt::ptree tree;
    try
    {
        pt::ini_parser::read_ini(in, tree);
    }
    catch (const pt::ini_parser_error &e)
    {
        throw ConfigError(fmt::format("config line {}: {}", e.line(), e.message()));
    }
    for (const auto &[name, child] : tree)
    {
        if (!kSections.count(name))
            throw ConfigError(name + ": unknown section");
    }
    auto section = [&](const std::string &name) {
        auto it = tree.find(name);
        return Section(name, it == tree.not_found() ? nullptr : &it->second);
    };

    Config cfg;
    auto &sc = cfg.sim.scenario;
    Section s = section("scenario");
    sc.comm_scenario = s.choice("comm_scenario", kCommScenarios, sc.comm_scenario);
    sc.sensing_scenario = s.choice("sensing_scenario", kSensingScenarios, sc.sensing_scenario);
    sc.fc_hz = s.number("fc_hz", sc.fc_hz);
    sc.bandwidth_hz = s.number("bandwidth_hz", sc.bandwidth_hz);
    sc.tx_pos = s.vec3("tx_pos_m", sc.tx_pos);
    sc.rx_pos = s.vec3("rx_pos_m", sc.rx_pos);
    sc.los_condition = s.choice("los_condition", kLos, sc.los_condition);
    sc.v_ut = s.vec3("v_ut_mps", sc.v_ut);
    if (auto v = s.raw("pathloss_override_db"); v && lower(*v) != "none")
        sc.pathloss_override_db = Section::parse_double(s.field("pathloss_override_db"), *v);
    sc.absolute_delay_mode = s.boolean("absolute_delay_mode", sc.absolute_delay_mode);
    s.check_unused();

    Section l = section("lsp");
    if (l.present())
    {
        LspSet base{};
        bool have_base = sc.comm_scenario == CommScenario::UMi;
        if (have_base)
            base = umi_street_canyon_lsp(sc);
        const std::vector<std::pair<const char *, double LspSet::*>> keys{
            {"ds_s", &LspSet::ds_s},
            {"r_tau", &LspSet::r_tau},
            {"zeta_db", &LspSet::zeta_db},
            {"k_factor_db", &LspSet::k_factor_db},
            {"asa_deg", &LspSet::asa_deg},
            {"asd_deg", &LspSet::asd_deg},
            {"zsa_deg", &LspSet::zsa_deg},
            {"zsd_deg", &LspSet::zsd_deg},
            {"c_asa_deg", &LspSet::c_asa_deg},
            {"c_asd_deg", &LspSet::c_asd_deg},
            {"c_zsa_deg", &LspSet::c_zsa_deg},
            {"c_zsd_deg", &LspSet::c_zsd_deg},
            {"xpr_mu_db", &LspSet::xpr_mu_db},
            {"xpr_sigma_db", &LspSet::xpr_sigma_db},
            {"sf_sigma_db", &LspSet::sf_sigma_db},
        };
        for (const auto &[key, member] : keys)
        {
            auto v = l.raw(key);
            if (v)
                base.*member = Section::parse_double(l.field(key), *v);
            else if (!have_base)
                throw ConfigError(l.field(key) + ": required for scenario " +
                                  std::string(kCommScenarios.name(sc.comm_scenario)));
        }
        l.check_unused();
        cfg.sim.lsp = base;
    }

    auto &ant = cfg.sim.antenna;
    Section a = section("antenna");
    ant.pattern = a.choice("pattern", kPatterns, ant.pattern);
    ant.polarization_slant_deg = a.number("polarization_slant_deg", ant.polarization_slant_deg);
    ant.tx_positions_wl = a.vec3_list("tx_positions_wl", ant.tx_positions_wl);
    ant.rx_positions_wl = a.vec3_list("rx_positions_wl", ant.rx_positions_wl);
    ant.num_tx_elements = ant.tx_positions_wl.size();
    ant.num_rx_elements = ant.rx_positions_wl.size();
    a.check_unused();

    auto &gen = cfg.sim.generation;
    Section g = section("generation");
    gen.seed = g.integer<std::uint64_t>("seed", gen.seed);
    gen.n_isac = g.integer<int>("n_isac", gen.n_isac);
    gen.n_comm = g.integer<int>("n_comm", gen.n_comm);
    gen.prune_threshold_db = g.threshold("prune_threshold_db", gen.prune_threshold_db);
    gen.comm_prune_threshold_db = g.threshold("comm_prune_threshold_db", gen.comm_prune_threshold_db);
    gen.rays_per_cluster = g.integer<int>("rays_per_cluster", gen.rays_per_cluster);
    gen.allow_equispaced_rays = g.boolean("allow_equispaced_rays", gen.allow_equispaced_rays);

    const auto selection = lower(g.text("target_selection", "random_k"));
    const int count = g.integer<int>("target_count", selection == "delay_window" ? 0 : 3);
    const auto window = g.numbers("target_delay_window_s", {});
    const auto indices = g.numbers("target_indices", {});
    if (selection == "random_k")
        gen.target_policy = policy::RandomK{count};
    else if (selection == "delay_window")
    {
        if (window.size() != 2)
            throw ConfigError(g.field("target_delay_window_s") + ": expected 'min, max'");
        gen.target_policy = policy::DelayWindow{window[0], window[1], count};
    }
    else if (selection == "second_strongest")
        gen.target_policy = policy::SecondStrongest{};
    else if (selection == "explicit")
    {
        policy::ExplicitIndices p;
        for (double v : indices)
        {
            if (v != std::floor(v) || v < 0)
                throw ConfigError(g.field("target_indices") + ": indices must be non-negative integers");
            p.indices.push_back(static_cast<int>(v));
        }
        gen.target_policy = p;
    }
    else
        throw ConfigError(g.field("target_selection") + ": '" + selection +
                          "' is not one of random_k|delay_window|second_strongest|explicit");

    auto &t = gen.target;
    t.model = g.choice("target_model", kTargetModels, t.model);
    t.extended_rays = g.integer<int>("extended_rays", t.extended_rays);
    t.extended_sigma_m = g.number("extended_sigma_m", t.extended_sigma_m);
    if (auto v = g.raw("reflection_types"))
    {
        t.reflection_types.clear();
        for (const auto &part : split(*v, ','))
            t.reflection_types.push_back(kReflections.parse(g.field("reflection_types"), part));
    }
    t.sub_cluster_weights = g.numbers("sub_cluster_weights", t.sub_cluster_weights);
    t.placement = g.choice("placement", kPlacements, t.placement);
    if (auto v = g.raw("env_box_m"); v && lower(*v) != "default")
    {
        const auto parts = split(*v, ';');
        if (parts.size() != 2)
            throw ConfigError(g.field("env_box_m") + ": expected 'x0, y0, z0; x1, y1, z1'");
        t.env_box = Box{Section::parse_vec3(g.field("env_box_m"), parts[0]),
                        Section::parse_vec3(g.field("env_box_m"), parts[1])};
    }
    t.env_clearance_m = g.number("env_clearance_m", t.env_clearance_m);
    t.min_excess_path_m = g.number("min_excess_path_m", t.min_excess_path_m);

    gen.motion = g.choice("motion", kMotions, gen.motion);
    gen.target_velocity = g.vec3("target_velocity_mps", gen.target_velocity);
    gen.target_speed_mean_mps = g.numbers("target_speed_mean_mps", gen.target_speed_mean_mps);
    gen.target_speed_std_mps = g.number("target_speed_std_mps", gen.target_speed_std_mps);
    gen.cpi_s = g.number("cpi_s", gen.cpi_s);
    gen.target_rel_los_db = g.numbers("target_rel_los_db", gen.target_rel_los_db);
    gen.target_modeling = g.choice("target_modeling", kModeling, gen.target_modeling);
    gen.trace_path = g.text("trace_path", gen.trace_path);
    gen.trace_delay_convention = g.choice("trace_delay_convention", kConventions, gen.trace_delay_convention);
    gen.det_bypass_scaling = g.boolean("det_bypass_scaling", gen.det_bypass_scaling);
    gen.regenerate_per_drop = g.boolean("regenerate_per_drop", gen.regenerate_per_drop);
    gen.apply_pathloss = g.boolean("apply_pathloss", gen.apply_pathloss);
    gen.shadow_fading = g.boolean("shadow_fading", gen.shadow_fading);
    g.check_unused();

    auto &ev = cfg.eval;
    Section e = section("evaluation");
    ev.ofdm.n_subcarriers = e.integer<std::size_t>("n_subcarriers", ev.ofdm.n_subcarriers);
    ev.ofdm.subcarrier_spacing_hz = e.number("subcarrier_spacing_hz", ev.ofdm.subcarrier_spacing_hz);
    ev.ofdm.symbol_duration_s = e.number("symbol_duration_s", ev.ofdm.symbol_duration_s);
    ev.ofdm.pilot_period_symbols = e.integer<std::size_t>("pilot_period_symbols", ev.ofdm.pilot_period_symbols);
    ev.ofdm.frame_symbols = e.integer<std::size_t>("frame_symbols", ev.ofdm.frame_symbols);
    if (auto v = e.raw("modulations"))
    {
        ev.modulations.clear();
        for (const auto &part : split(*v, ','))
            ev.modulations.push_back(kModulations.parse(e.field("modulations"), part));
    }
    ev.min_bits = e.integer<std::uint64_t>("min_bits", ev.min_bits);
    ev.max_errors = e.integer<std::uint64_t>("max_errors", ev.max_errors);
    ev.perfect_csi = e.boolean("perfect_csi", ev.perfect_csi);
    ev.snr_definition = e.choice("snr_definition", kSnrDefs, ev.snr_definition);
    ev.drops = e.integer<std::size_t>("drops", ev.drops);
    auto &se = ev.sensing;
    se.n_symbols = e.integer<std::size_t>("sensing_symbols", se.n_symbols);
    se.pfa = e.number("pfa", se.pfa);
    se.cfar.guard = e.integer<int>("cfar_guard_cells", se.cfar.guard);
    se.cfar.train = e.integer<int>("cfar_train_cells", se.cfar.train);
    se.delay_window = e.choice("delay_window", kWindows, se.delay_window);
    se.doppler_window = e.choice("doppler_window", kWindows, se.doppler_window);
    se.clutter_removal = e.choice("clutter_removal", kClutter, se.clutter_removal);
    se.assoc_delay_bins = e.number("assoc_delay_bins", se.assoc_delay_bins);
    se.assoc_doppler_bins = e.number("assoc_doppler_bins", se.assoc_doppler_bins);
    se.noise_runs = e.integer<std::size_t>("noise_runs", se.noise_runs);
    ev.spectrogram_symbols = e.integer<std::size_t>("spectrogram_symbols", ev.spectrogram_symbols);
    ev.spectrogram_window = e.integer<std::size_t>("spectrogram_window", ev.spectrogram_window);
    ev.spectrogram_hop = e.integer<std::size_t>("spectrogram_hop", ev.spectrogram_hop);
    e.check_unused();

    return cfg;
}

Config load_config_string(const std::string &text)
{
    std::istringstream in(text);
    return load_config(in);
}

Config load_config_file(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config: cannot open '" + path + "'");
    return load_config(in);
}

bool apply_env_overrides(Config &cfg)
{
    const char *seed = std::getenv("ISAC_SEED");
    if (!seed || !*seed)
        return false;
    std::uint64_t v = 0;
    const std::string s(seed);
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw ConfigError("ISAC_SEED: '" + s + "' is not a valid unsigned integer");
    cfg.sim.generation.seed = v;
    return true;
}

std::string echo_ini(const Config &cfg)
{
    std::string o;
    auto kv = [&](const std::string &k, const std::string &v) { o += k + " = " + v + "\n"; };
    const auto &sc = cfg.sim.scenario;
    o += "[scenario]\n";
    kv("comm_scenario", std::string(kCommScenarios.name(sc.comm_scenario)));
    kv("sensing_scenario", std::string(kSensingScenarios.name(sc.sensing_scenario)));
    kv("fc_hz", fmt_double(sc.fc_hz));
    kv("bandwidth_hz", fmt_double(sc.bandwidth_hz));
    kv("tx_pos_m", vec3_text(sc.tx_pos));
    kv("rx_pos_m", vec3_text(sc.rx_pos));
    kv("los_condition", std::string(kLos.name(sc.los_condition)));
    kv("v_ut_mps", vec3_text(sc.v_ut));
    kv("pathloss_override_db", sc.pathloss_override_db ? fmt_double(*sc.pathloss_override_db) : "none");
    kv("absolute_delay_mode", sc.absolute_delay_mode ? "true" : "false");

    if (cfg.sim.lsp)
    {
        const auto &l = *cfg.sim.lsp;
        o += "\n[lsp]\n";
        kv("ds_s", fmt_double(l.ds_s));
        kv("r_tau", fmt_double(l.r_tau));
        kv("zeta_db", fmt_double(l.zeta_db));
        kv("k_factor_db", fmt_double(l.k_factor_db));
        kv("asa_deg", fmt_double(l.asa_deg));
        kv("asd_deg", fmt_double(l.asd_deg));
        kv("zsa_deg", fmt_double(l.zsa_deg));
        kv("zsd_deg", fmt_double(l.zsd_deg));
        kv("c_asa_deg", fmt_double(l.c_asa_deg));
        kv("c_asd_deg", fmt_double(l.c_asd_deg));
        kv("c_zsa_deg", fmt_double(l.c_zsa_deg));
        kv("c_zsd_deg", fmt_double(l.c_zsd_deg));
        kv("xpr_mu_db", fmt_double(l.xpr_mu_db));
        kv("xpr_sigma_db", fmt_double(l.xpr_sigma_db));
        kv("sf_sigma_db", fmt_double(l.sf_sigma_db));
    }

    const auto &ant = cfg.sim.antenna;
    o += "\n[antenna]\n";
    kv("pattern", std::string(kPatterns.name(ant.pattern)));
    kv("polarization_slant_deg", fmt_double(ant.polarization_slant_deg));
    kv("tx_positions_wl", vec3_list_text(ant.tx_positions_wl));
    kv("rx_positions_wl", vec3_list_text(ant.rx_positions_wl));

    const auto &g = cfg.sim.generation;
    o += "\n[generation]\n";
    kv("seed", std::to_string(g.seed));
    kv("n_isac", std::to_string(g.n_isac));
    kv("n_comm", std::to_string(g.n_comm));
    kv("prune_threshold_db", threshold_text(g.prune_threshold_db));
    kv("comm_prune_threshold_db", threshold_text(g.comm_prune_threshold_db));
    kv("rays_per_cluster", std::to_string(g.rays_per_cluster));
    kv("allow_equispaced_rays", g.allow_equispaced_rays ? "true" : "false");
    std::visit(
        [&](const auto &p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, policy::RandomK>)
            {
                kv("target_selection", "random_k");
                kv("target_count", std::to_string(p.k));
            }
            else if constexpr (std::is_same_v<P, policy::DelayWindow>)
            {
                kv("target_selection", "delay_window");
                kv("target_count", std::to_string(p.k));
                kv("target_delay_window_s", fmt_double(p.min_s) + ", " + fmt_double(p.max_s));
            }
            else if constexpr (std::is_same_v<P, policy::SecondStrongest>)
                kv("target_selection", "second_strongest");
            else
            {
                kv("target_selection", "explicit");
                std::string s;
                for (int i : p.indices)
                    s += (s.empty() ? "" : ", ") + std::to_string(i);
                kv("target_indices", s);
            }
        },
        g.target_policy);
    const auto &t = g.target;
    kv("target_model", std::string(kTargetModels.name(t.model)));
    kv("extended_rays", std::to_string(t.extended_rays));
    kv("extended_sigma_m", fmt_double(t.extended_sigma_m));
    std::string refl;
    for (auto r : t.reflection_types)
        refl += (refl.empty() ? "" : ", ") + std::string(kReflections.name(r));
    kv("reflection_types", refl);
    kv("sub_cluster_weights", join(t.sub_cluster_weights));
    kv("placement", std::string(kPlacements.name(t.placement)));
    kv("env_box_m", t.env_box ? vec3_text(t.env_box->lo) + "; " + vec3_text(t.env_box->hi) : "default");
    kv("env_clearance_m", fmt_double(t.env_clearance_m));
    kv("min_excess_path_m", fmt_double(t.min_excess_path_m));
    kv("motion", std::string(kMotions.name(g.motion)));
    kv("target_velocity_mps", vec3_text(g.target_velocity));
    kv("target_speed_mean_mps", join(g.target_speed_mean_mps));
    kv("target_speed_std_mps", fmt_double(g.target_speed_std_mps));
    kv("cpi_s", fmt_double(g.cpi_s));
    kv("target_rel_los_db", join(g.target_rel_los_db));
    kv("target_modeling", std::string(kModeling.name(g.target_modeling)));
    kv("trace_path", g.trace_path);
    kv("trace_delay_convention", std::string(kConventions.name(g.trace_delay_convention)));
    kv("det_bypass_scaling", g.det_bypass_scaling ? "true" : "false");
    kv("regenerate_per_drop", g.regenerate_per_drop ? "true" : "false");
    kv("apply_pathloss", g.apply_pathloss ? "true" : "false");
    kv("shadow_fading", g.shadow_fading ? "true" : "false");

    const auto &e = cfg.eval;
    o += "\n[evaluation]\n";
    kv("n_subcarriers", std::to_string(e.ofdm.n_subcarriers));
    kv("subcarrier_spacing_hz", fmt_double(e.ofdm.subcarrier_spacing_hz));
    kv("symbol_duration_s", fmt_double(e.ofdm.symbol_duration_s));
    kv("pilot_period_symbols", std::to_string(e.ofdm.pilot_period_symbols));
    kv("frame_symbols", std::to_string(e.ofdm.frame_symbols));
    std::string mods;
    for (auto m : e.modulations)
        mods += (mods.empty() ? "" : ", ") + std::string(kModulations.name(m));
    kv("modulations", mods);
    kv("min_bits", std::to_string(e.min_bits));
    kv("max_errors", std::to_string(e.max_errors));
    kv("perfect_csi", e.perfect_csi ? "true" : "false");
    kv("snr_definition", std::string(kSnrDefs.name(e.snr_definition)));
    kv("drops", std::to_string(e.drops));
    kv("sensing_symbols", std::to_string(e.sensing.n_symbols));
    kv("pfa", fmt_double(e.sensing.pfa));
    kv("cfar_guard_cells", std::to_string(e.sensing.cfar.guard));
    kv("cfar_train_cells", std::to_string(e.sensing.cfar.train));
    kv("delay_window", std::string(kWindows.name(e.sensing.delay_window)));
    kv("doppler_window", std::string(kWindows.name(e.sensing.doppler_window)));
    kv("clutter_removal", std::string(kClutter.name(e.sensing.clutter_removal)));
    kv("assoc_delay_bins", fmt_double(e.sensing.assoc_delay_bins));
    kv("assoc_doppler_bins", fmt_double(e.sensing.assoc_doppler_bins));
    kv("noise_runs", std::to_string(e.sensing.noise_runs));
    kv("spectrogram_symbols", std::to_string(e.spectrogram_symbols));
    kv("spectrogram_window", std::to_string(e.spectrogram_window));
    kv("spectrogram_hop", std::to_string(e.spectrogram_hop));
    return o;
}

nlohmann::json to_json(const Config &cfg)
{
    // Section/key layout of the INI echo, values typed where they are plain numbers.
    nlohmann::json j = nlohmann::json::object();
    const auto text = echo_ini(cfg);
    pt::ptree tree;
    std::istringstream in(text);
    pt::ini_parser::read_ini(in, tree);
    for (const auto &[section, child] : tree)
        for (const auto &[key, value] : child)
        {
            const auto &s = value.data();
            double d = 0.0;
            auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), d);
            if (ec == std::errc{} && p == s.data() + s.size() && std::isfinite(d) && key != "seed")
                j[section][key] = d;
            else if (key == "seed")
                j[section][key] = cfg.sim.generation.seed;
            else
                j[section][key] = s;
        }
    const auto lsp = cfg.sim.effective_lsp();
    j["effective_lsp"] = {
        {"ds_s", lsp.ds_s},           {"r_tau", lsp.r_tau},         {"zeta_db", lsp.zeta_db},
        {"k_factor_db", lsp.k_factor_db}, {"asa_deg", lsp.asa_deg}, {"asd_deg", lsp.asd_deg},
        {"zsa_deg", lsp.zsa_deg},     {"zsd_deg", lsp.zsd_deg},     {"c_asa_deg", lsp.c_asa_deg},
        {"c_asd_deg", lsp.c_asd_deg}, {"c_zsa_deg", lsp.c_zsa_deg}, {"c_zsd_deg", lsp.c_zsd_deg},
        {"xpr_mu_db", lsp.xpr_mu_db}, {"xpr_sigma_db", lsp.xpr_sigma_db}, {"sf_sigma_db", lsp.sf_sigma_db},
    };
    j["effective_lsp"]["n_comm"] = cfg.sim.comm_cluster_count();
    j["pathloss_db"] = compute_pathloss(cfg.sim.scenario);
    return j;
}

void validate(const Config &cfg)
{
    validate(cfg.sim);
    validate(cfg.eval.ofdm);
    const auto &s = cfg.eval.sensing;
    if (!(s.pfa > 0.0 && s.pfa < 1.0))
        throw ValidationError("evaluation.pfa: must be in (0, 1)");
    if (s.n_symbols < 2)
        throw ValidationError("evaluation.sensing_symbols: must be at least 2");
    if (s.cfar.guard < 0 || s.cfar.train < 1)
        throw ValidationError("evaluation.cfar_train_cells: guard >= 0 and train >= 1 required");
    if (s.noise_runs < 1)
        throw ValidationError("evaluation.noise_runs: must be at least 1");
    if (cfg.eval.modulations.empty())
        throw ValidationError("evaluation.modulations: at least one modulation is required");
    if (cfg.eval.spectrogram_window < 2 || cfg.eval.spectrogram_hop < 1 ||
        cfg.eval.spectrogram_symbols < cfg.eval.spectrogram_window)
        throw ValidationError("evaluation.spectrogram_window: need 2 <= window <= spectrogram_symbols and hop >= 1");
}

} // namespace isac
