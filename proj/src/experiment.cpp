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

#include "isac/experiment.hpp"

#include "isac/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>

namespace isac
{

std::vector<double> parse_snr_range(const std::string &text)
{
    std::vector<double> parts;
    std::size_t start = 0;
    while (true)
    {
        const auto colon = text.find(':', start);
        const auto piece = text.substr(start, colon == std::string::npos ? std::string::npos : colon - start);
        std::size_t used = 0;
        double v = 0.0;
        try
        {
            v = std::stod(piece, &used);
        }
        catch (const std::exception &)
        {
            used = 0;
        }
        if (used == 0 || used != piece.size() || !std::isfinite(v))
            throw ConfigError("--snr: '" + text + "' is not 'start:step:stop'");
        parts.push_back(v);
        if (colon == std::string::npos)
            break;
        start = colon + 1;
    }
    if (parts.size() == 1)
        return parts;
    if (parts.size() != 3 || !(parts[1] > 0.0) || parts[2] < parts[0])
        throw ConfigError("--snr: '" + text + "' needs step > 0 and stop >= start");
    std::vector<double> out;
    const auto n = static_cast<std::size_t>(std::floor((parts[2] - parts[0]) / parts[1] + 1e-9));
    for (std::size_t i = 0; i <= n; ++i)
        out.push_back(parts[0] + static_cast<double>(i) * parts[1]);
    return out;
}

namespace
{

OfdmConfig ofdm_for(const Config &cfg, Modulation m)
{
    OfdmConfig o = cfg.eval.ofdm;
    o.modulation = m;
    return o;
}

std::uint64_t stream_key(std::size_t pass, std::size_t mod, std::size_t snr)
{
    return (static_cast<std::uint64_t>(pass) << 40) | (static_cast<std::uint64_t>(mod) << 20) |
           static_cast<std::uint64_t>(snr);
}

} // namespace

std::vector<BerRow> run_eval_comm(const Config &cfg, std::span<const double> snrs_db, std::size_t drops,
                                  const Progress &progress)
{
    validate(cfg);
    if (drops < 1)
        throw ConfigError("--drops: must be at least 1");
    const auto det = load_configured_trace(cfg.sim);
    const auto &o = cfg.eval.ofdm;
    const std::uint64_t seed = cfg.sim.generation.seed;
    LinkOptions opt;
    opt.perfect_csi = cfg.eval.perfect_csi;
    opt.snr_definition = cfg.eval.snr_definition;

    const auto &mods = cfg.eval.modulations;
    std::vector<BerRow> rows;
    for (double snr : snrs_db)
        for (auto m : mods)
            rows.push_back({snr, m, {}, {}});

    auto needs_more = [&](const BerRow &r) {
        auto short_of = [&](const BerCount &c) { return c.bits < cfg.eval.min_bits && c.errors < cfg.eval.max_errors; };
        return short_of(r.isac) || short_of(r.comm);
    };

    for (std::size_t pass = 0;; ++pass)
    {
        if (pass > 0 && std::none_of(rows.begin(), rows.end(), needs_more))
            break;
        std::uint64_t bits_this_pass = 0;
        for (std::size_t d = 0; d < drops; ++d)
        {
            ChannelEvolution ei(generate_isac_drop(cfg.sim, d, det));
            ChannelEvolution ec(generate_comm_drop(cfg.sim, d));
            const auto hi = ei.cfr_frames(o.frame_symbols, o.symbol_duration_s, o.n_subcarriers,
                                          o.subcarrier_spacing_hz);
            const auto hc = ec.cfr_frames(o.frame_symbols, o.symbol_duration_s, o.n_subcarriers,
                                          o.subcarrier_spacing_hz);
            std::size_t r = 0;
            for (std::size_t si = 0; si < snrs_db.size(); ++si)
                for (std::size_t mi = 0; mi < mods.size(); ++mi, ++r)
                {
                    auto &row = rows[r];
                    if (pass > 0 && !needs_more(row))
                        continue;
                    const auto key = stream_key(pass, mi, si);
                    const auto bseed = derive_seed(seed, d, Stream::Bits, key);
                    const auto nseed = derive_seed(seed, d, Stream::Noise, key);
                    const auto ofdm = ofdm_for(cfg, mods[mi]);
                    {
                        Rng b(bseed), n(nseed);
                        row.isac += simulate_ofdm_frame(hi, ofdm, row.snr_db, b, n, opt);
                    }
                    {
                        Rng b(bseed), n(nseed);
                        const auto c = simulate_ofdm_frame(hc, ofdm, row.snr_db, b, n, opt);
                        bits_this_pass += c.bits;
                        row.comm += c;
                    }
                }
            if (progress)
                progress(d + 1, drops);
        }
        if (bits_this_pass == 0)
            break;
    }
    return rows;
}

void write_ber_csv(std::ostream &out, std::span<const BerRow> rows)
{
    out << "snr_db,modulation,ber_isac,ber_comm,bits_isac,errors_isac,bits_comm,errors_comm\n";
    for (const auto &r : rows)
        out << fmt::format("{:.17g},{},{:.17g},{:.17g},{},{},{},{}\n", r.snr_db, to_string(r.modulation),
                           r.isac.ber(), r.comm.ber(), r.isac.bits, r.isac.errors, r.comm.bits, r.comm.errors);
}

std::optional<double> snr_at_ber(std::span<const double> snrs_db, std::span<const double> ber, double target)
{
    auto lg = [](double b) { return std::log10(std::max(b, 1e-12)); };
    for (std::size_t i = 0; i + 1 < ber.size(); ++i)
    {
        if (ber[i] >= target && ber[i + 1] < target)
        {
            const double a = lg(ber[i]), b = lg(ber[i + 1]), t = lg(target);
            const double f = (a == b) ? 0.0 : (a - t) / (a - b);
            return snrs_db[i] + f * (snrs_db[i + 1] - snrs_db[i]);
        }
    }
    return std::nullopt;
}

CMatrix complex_noise(std::size_t rows, std::size_t cols, Rng &rng)
{
    CMatrix m(rows, cols);
    const double s = std::sqrt(0.5);
    for (auto &v : m.data)
    {
        const double re = rng.normal();
        v = {s * re, s * rng.normal()};
    }
    return m;
}

CMatrix random_qpsk(std::size_t rows, std::size_t cols, Rng &rng)
{
    CMatrix m(rows, cols);
    const double s = std::sqrt(0.5);
    std::uint64_t word = 0;
    int left = 0;
    for (auto &v : m.data)
    {
        if (left < 2)
        {
            word = rng.bits();
            left = 64;
        }
        v = {(word & 1U) ? -s : s, (word & 2U) ? -s : s};
        word >>= 2;
        left -= 2;
    }
    return m;
}

SenseDrop prepare_sense_drop(const Config &cfg, const Drop &drop)
{
    const auto &o = cfg.eval.ofdm;
    const std::size_t M = cfg.eval.sensing.n_symbols, K = o.n_subcarriers;
    ChannelEvolution evo(drop);
    SenseDrop sd;
    sd.drop_index = drop.drop_index;
    sd.cfr = CMatrix(M, K);
    sd.background = CMatrix(M, K);
    for (std::size_t l = 0; l < M; ++l)
    {
        const auto snap = evo.snapshot(static_cast<double>(l) * o.symbol_duration_s);
        accumulate_cfr(snap.taps, o.subcarrier_spacing_hz, std::span(sd.cfr.row(l), K));
        const auto bg = filter_taps(snap, {TapOrigin::LoS, TapOrigin::Env});
        accumulate_cfr(bg.taps, o.subcarrier_spacing_hz, std::span(sd.background.row(l), K));
    }
    double g = 0.0;
    for (const auto &v : sd.cfr.data)
        g += std::norm(v);
    sd.mean_gain = g / static_cast<double>(sd.cfr.data.size());

    const auto geo = drop.scenario.geometry();
    const bool absolute = drop.scenario.absolute_delay_mode;
    sd.d3d = absolute ? 0.0 : geo.d3d();
    const double lambda = drop.scenario.wavelength();
    const bool los = drop.scenario.is_los();
    const double k = std::pow(10.0, drop.lsp.k_factor_db / 10.0);
    const double w2 = los ? 1.0 / (k + 1.0) : 1.0;
    const double base = absolute ? geo.d3d() / kSpeedOfLight : 0.0;
    for (const auto &t : drop.targets)
    {
        TargetTruth tr;
        tr.cluster_index = t.cluster_index;
        double p = 0.0, pd = 0.0, pv = 0.0;
        for (const auto &r : t.rays)
        {
            p += r.power;
            pd += r.power * r.delay_s;
            pv += r.power * r.eff_velocity;
        }
        tr.delay_s = base + pd / p;
        tr.range_m = sd.d3d + kSpeedOfLight * tr.delay_s;
        tr.doppler_hz = pv / p / lambda;
        tr.power = w2 * p;
        sd.truth.push_back(tr);
    }
    if (drop.det)
    {
        const auto &f = drop.det->frame_at(0.0);
        TargetTruth tr;
        tr.cluster_index = -1;
        double p = 0.0, pd = 0.0;
        for (const auto &r : f.rays)
        {
            p += r.power;
            pd += r.power * r.delay_s;
        }
        tr.delay_s = p > 0.0 ? pd / p : 0.0;
        tr.range_m = sd.d3d + kSpeedOfLight * tr.delay_s;
        tr.doppler_hz = std::numeric_limits<double>::quiet_NaN();
        tr.power = p;
        sd.truth.push_back(tr);
    }
    return sd;
}

std::vector<int> associate(std::span<const Detection> dets, std::span<const TargetTruth> truth,
                           const RangeDopplerMap &map, const SensingConfig &cfg)
{
    std::vector<int> matched(truth.size(), -1);
    std::vector<bool> claimed(dets.size(), false);
    std::vector<std::size_t> order(truth.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return truth[a].power > truth[b].power; });
    const double M = static_cast<double>(map.power.cols);
    for (std::size_t i : order)
    {
        const double tb = truth[i].delay_s / map.bin_delay_s;
        const bool use_doppler = std::isfinite(truth[i].doppler_hz);
        const double fb = use_doppler ? truth[i].doppler_hz / map.bin_doppler_hz : 0.0;
        double best = std::numeric_limits<double>::infinity();
        int best_j = -1;
        for (std::size_t j = 0; j < dets.size(); ++j)
        {
            if (claimed[j])
                continue;
            const double dp = (dets[j].delay_bin - tb) / cfg.assoc_delay_bins;
            double dq = 0.0;
            if (use_doppler)
            {
                double d = std::fmod(dets[j].doppler_bin - fb, M);
                if (d < -M / 2)
                    d += M;
                if (d >= M / 2)
                    d -= M;
                dq = d / cfg.assoc_doppler_bins;
            }
            if (std::abs(dp) > 1.0 || std::abs(dq) > 1.0)
                continue;
            const double dist = dp * dp + dq * dq;
            if (dist < best)
            {
                best = dist;
                best_j = static_cast<int>(j);
            }
        }
        if (best_j >= 0)
        {
            matched[i] = best_j;
            claimed[static_cast<std::size_t>(best_j)] = true;
        }
    }
    return matched;
}

SenseOutcome sense_once(const SenseDrop &sd, const Config &cfg, double snr_db, const CMatrix &symbols,
                        const CMatrix &unit_noise)
{
    const auto &s = cfg.eval.sensing;
    const auto &o = cfg.eval.ofdm;
    const double amp = std::sqrt(sd.mean_gain / std::pow(10.0, snr_db / 10.0));
    CMatrix rx(sd.cfr.rows, sd.cfr.cols);
    for (std::size_t i = 0; i < rx.data.size(); ++i)
        rx.data[i] = sd.cfr.data[i] * symbols.data[i] + amp * unit_noise.data[i];
    MapOptions mo;
    mo.delay_window = s.delay_window;
    mo.doppler_window = s.doppler_window;
    mo.mean_subtraction = s.clutter_removal == ClutterRemoval::MeanSubtraction;
    mo.background = s.clutter_removal == ClutterRemoval::Background ? &sd.background : nullptr;
    const auto map = range_doppler_map(rx, symbols, o.subcarrier_spacing_hz, o.symbol_duration_s, mo);
    SenseOutcome out;
    out.detections = cfar_detect(map, s.pfa, s.cfar);
    for (auto &d : out.detections)
        estimate_range(d, map, sd.d3d);
    out.matched = associate(out.detections, sd.truth, map, s);
    return out;
}

SenseResult run_eval_sense_on(const Config &cfg, std::span<const SenseDrop> drops, std::span<const double> snrs_db,
                              std::size_t noise_runs, const Progress &progress)
{
    const std::uint64_t seed = cfg.sim.generation.seed;
    std::size_t max_targets = 0;
    for (const auto &sd : drops)
        max_targets = std::max(max_targets, sd.truth.size());
    SenseResult res;
    for (double snr : snrs_db)
        for (std::size_t t = 0; t < max_targets; ++t)
            res.detection.push_back({snr, static_cast<int>(t) + 1, 0, 0});
    res.unmatched.assign(snrs_db.size(), 0);

    for (std::size_t d = 0; d < drops.size(); ++d)
    {
        const auto &sd = drops[d];
        for (std::size_t run = 0; run < noise_runs; ++run)
        {
            Rng rs(derive_seed(seed, sd.drop_index, Stream::Bits, run));
            Rng rn(derive_seed(seed, sd.drop_index, Stream::Noise, run));
            const auto x = random_qpsk(sd.cfr.rows, sd.cfr.cols, rs);
            const auto w = complex_noise(sd.cfr.rows, sd.cfr.cols, rn);
            for (std::size_t si = 0; si < snrs_db.size(); ++si)
            {
                const auto out = sense_once(sd, cfg, snrs_db[si], x, w);
                std::size_t used = 0;
                for (std::size_t t = 0; t < sd.truth.size(); ++t)
                {
                    auto &row = res.detection[si * max_targets + t];
                    ++row.trials;
                    if (out.matched[t] < 0)
                        continue;
                    ++row.detected;
                    ++used;
                    const auto &det = out.detections[static_cast<std::size_t>(out.matched[t])];
                    res.ranges.push_back({snrs_db[si], sd.drop_index, run, static_cast<int>(t) + 1,
                                          sd.truth[t].range_m, det.bistatic_range_m, det.coarse});
                }
                res.unmatched[si] += out.detections.size() - used;
            }
        }
        if (progress)
            progress(d + 1, drops.size());
    }
    return res;
}

SenseResult run_eval_sense(const Config &cfg, std::span<const double> snrs_db, std::size_t drops,
                           const Progress &progress)
{
    validate(cfg);
    if (drops < 1)
        throw ConfigError("--drops: must be at least 1");
    const auto det = load_configured_trace(cfg.sim);
    // Drops are prepared one at a time to keep memory flat.
    SenseResult total;
    for (std::size_t d = 0; d < drops; ++d)
    {
        const SenseDrop sd = prepare_sense_drop(cfg, generate_isac_drop(cfg.sim, d, det));
        auto part = run_eval_sense_on(cfg, std::span(&sd, 1), snrs_db, cfg.eval.sensing.noise_runs);
        if (total.unmatched.empty())
            total.unmatched.assign(snrs_db.size(), 0);
        for (std::size_t si = 0; si < snrs_db.size(); ++si)
            total.unmatched[si] += part.unmatched[si];
        for (const auto &row : part.detection)
        {
            auto it = std::find_if(total.detection.begin(), total.detection.end(), [&](const DetectionRow &r) {
                return r.snr_db == row.snr_db && r.target == row.target;
            });
            if (it == total.detection.end())
                total.detection.push_back(row);
            else
            {
                it->trials += row.trials;
                it->detected += row.detected;
            }
        }
        total.ranges.insert(total.ranges.end(), part.ranges.begin(), part.ranges.end());
        if (progress)
            progress(d + 1, drops);
    }
    std::stable_sort(total.detection.begin(), total.detection.end(), [](const auto &a, const auto &b) {
        return a.snr_db < b.snr_db || (a.snr_db == b.snr_db && a.target < b.target);
    });
    return total;
}

void write_detection_csv(std::ostream &out, std::span<const DetectionRow> rows)
{
    out << "snr_db,target,trials,detected,pd\n";
    for (const auto &r : rows)
        out << fmt::format("{:.17g},{},{},{},{:.17g}\n", r.snr_db, r.target, r.trials, r.detected, r.pd());
}

void write_range_csv(std::ostream &out, std::span<const RangeRow> rows)
{
    out << "snr_db,drop,run,target,true_range_m,est_range_m,error_m,coarse\n";
    for (const auto &r : rows)
        out << fmt::format("{:.17g},{},{},{},{:.17g},{:.17g},{:.17g},{}\n", r.snr_db, r.drop, r.run, r.target,
                           r.true_range_m, r.est_range_m, r.error_m(), r.coarse ? 1 : 0);
}

std::vector<std::complex<double>> target_tap_series(ChannelEvolution &evo, std::size_t n_symbols,
                                                    double symbol_duration_s)
{
    std::vector<std::complex<double>> out(n_symbols);
    for (std::size_t l = 0; l < n_symbols; ++l)
    {
        const auto snap = evo.snapshot(static_cast<double>(l) * symbol_duration_s);
        for (const auto &tap : snap.taps)
            if (tap.origin == TapOrigin::TargetStat || tap.origin == TapOrigin::TargetDet)
                out[l] += tap.coeff;
    }
    return out;
}

void write_spectrogram_csv(std::ostream &out, std::size_t drop, const Spectrogram &sg, bool header)
{
    if (header)
        out << "drop,frame,t_s,doppler_hz,power_db\n";
    for (std::size_t f = 0; f < sg.power_db.rows; ++f)
        for (std::size_t c = 0; c < sg.power_db.cols; ++c)
            out << fmt::format("{},{},{:.17g},{:.17g},{:.17g}\n", drop, f, static_cast<double>(f) * sg.hop_s, sg.doppler_hz(c),
                               sg.power_db(f, c));
}

} // namespace isac
