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
#include "isac/config.hpp"
#include "isac/error.hpp"
#include "isac/experiment.hpp"
#include "isac/io.hpp"
#include "isac/targets.hpp"

#include "CLI11.hpp"

#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace isac;

namespace
{

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Options
{
    std::string config_path;
    std::optional<std::size_t> drops;
    std::string out_dir = ".";
    std::string snr = "0:2:20";
    bool dump_rays = false;
    std::string in_path;
    bool validate_only = false;
};

std::ofstream open_out(const fs::path &p, std::ios::openmode mode = std::ios::out)
{
    std::ofstream f(p, mode);
    if (!f)
        throw std::runtime_error("cannot write " + p.string());
    return f;
}

Progress stderr_progress(const std::string &label)
{
    return [label, last = std::size_t{0}](std::size_t done, std::size_t total) mutable {
        const std::size_t pct = total ? 100 * done / total : 100;
        if (pct / 10 != last / 10 || done == total)
        {
            std::cerr << fmt::format("{}: {}/{} drops\n", label, done, total);
            last = pct;
        }
    };
}

struct Run
{
    Config cfg;
    std::size_t drops = 0;
    fs::path out;
};

Run prepare(const Options &o, const std::string &command)
{
    if (o.config_path.empty())
        throw ConfigError("--config: required for " + command);
    Run r;
    r.cfg = load_config_file(o.config_path);
    apply_env_overrides(r.cfg);
    validate(r.cfg);
    r.drops = o.drops.value_or(r.cfg.eval.drops);
    if (r.drops < 1)
        throw ConfigError("--drops: must be at least 1");
    r.out = o.out_dir;
    fs::create_directories(r.out);
    std::cerr << "seed: " << r.cfg.sim.generation.seed << "\n";
    return r;
}

void write_echo(const Run &r, const std::string &command, const std::vector<std::string> &files,
                const nlohmann::json &extra = nlohmann::json::object())
{
    auto cfg = to_json(r.cfg);
    cfg["seed"] = r.cfg.sim.generation.seed;
    write_json_file((r.out / "config.json").string(), cfg);
    nlohmann::json meta = {{"command", command},
                           {"seed", r.cfg.sim.generation.seed},
                           {"drops", r.drops},
                           {"files", files}};
    for (const auto &[k, v] : extra.items())
        meta[k] = v;
    write_json_file((r.out / "metadata.json").string(), meta);
}

int cmd_generate(const Options &o)
{
    const auto r = prepare(o, "generate");
    const auto &sim = r.cfg.sim;
    const auto &ofdm = r.cfg.eval.ofdm;
    const auto det = load_configured_trace(sim);
    auto clusters = open_out(r.out / "clusters.csv");
    auto cir = open_out(r.out / "cir.csv");
    auto cfr = open_out(r.out / "cfr.bin", std::ios::out | std::ios::binary);
    std::optional<std::ofstream> rays;
    if (o.dump_rays)
        rays = open_out(r.out / "rays.csv");

    const std::size_t n_sym = r.cfg.eval.sensing.n_symbols;
    auto progress = stderr_progress("generate");
    for (std::size_t d = 0; d < r.drops; ++d)
    {
        Drop drop = generate_isac_drop(sim, d, det);
        write_clusters_csv(clusters, drop, d == 0);
        if (rays)
            write_rays_csv(*rays, drop, d == 0);
        ChannelEvolution evo(std::move(drop));
        std::vector<CirSnapshot> snaps;
        for (std::size_t u = 0; u < sim.antenna.rx_positions_wl.size(); ++u)
            for (std::size_t s = 0; s < sim.antenna.tx_positions_wl.size(); ++s)
                snaps.push_back(evo.snapshot(0.0, u, s));
        write_cir_csv(cir, d, snaps, d == 0);
        append_cfr_binary(cfr, evo.cfr_frames(n_sym, ofdm.symbol_duration_s, ofdm.n_subcarriers,
                                              ofdm.subcarrier_spacing_hz));
        progress(d + 1, r.drops);
    }
    CfrLayout layout{r.drops, n_sym, ofdm.n_subcarriers, ofdm.subcarrier_spacing_hz, sim.scenario.fc_hz,
                     ofdm.symbol_duration_s};
    write_json_file((r.out / "cfr.json").string(), cfr_sidecar(layout));
    std::vector<std::string> files{"clusters.csv", "cir.csv", "cfr.bin", "cfr.json"};
    if (rays)
        files.push_back("rays.csv");
    write_echo(r, "generate", files);
    return 0;
}

int cmd_eval_comm(const Options &o)
{
    const auto r = prepare(o, "eval-comm");
    const auto snrs = parse_snr_range(o.snr);
    const auto rows = run_eval_comm(r.cfg, snrs, r.drops, stderr_progress("eval-comm"));
    auto f = open_out(r.out / "ber_vs_snr.csv");
    write_ber_csv(f, rows);
    write_echo(r, "eval-comm", {"ber_vs_snr.csv"}, {{"snr_db", snrs}});
    return 0;
}

int cmd_eval_sense(const Options &o)
{
    const auto r = prepare(o, "eval-sense");
    const auto snrs = parse_snr_range(o.snr);
    const auto res = run_eval_sense(r.cfg, snrs, r.drops, stderr_progress("eval-sense"));
    {
        auto f = open_out(r.out / "detection_prob.csv");
        write_detection_csv(f, res.detection);
    }
    {
        auto f = open_out(r.out / "range_error.csv");
        write_range_csv(f, res.ranges);
    }
    write_echo(r, "eval-sense", {"detection_prob.csv", "range_error.csv"},
               {{"snr_db", snrs}, {"unmatched_detections", res.unmatched}});
    return 0;
}

int cmd_spectrogram(const Options &o)
{
    const auto r = prepare(o, "spectrogram");
    const auto &e = r.cfg.eval;
    const auto det = load_configured_trace(r.cfg.sim);
    auto f = open_out(r.out / "spectrogram.csv");
    auto progress = stderr_progress("spectrogram");
    for (std::size_t d = 0; d < r.drops; ++d)
    {
        ChannelEvolution evo(generate_isac_drop(r.cfg.sim, d, det));
        const auto series = target_tap_series(evo, e.spectrogram_symbols, e.ofdm.symbol_duration_s);
        const auto sg = doppler_spectrogram(series, e.spectrogram_window, e.spectrogram_hop, e.ofdm.symbol_duration_s);
        write_spectrogram_csv(f, d, sg, d == 0);
        progress(d + 1, r.drops);
    }
    write_echo(r, "spectrogram", {"spectrogram.csv"});
    return 0;
}

int cmd_ingest(const Options &o)
{
    if (o.in_path.empty())
        throw ConfigError("--in: required for ingest-rays");
    std::ifstream in(o.in_path, std::ios::binary);
    if (!in)
        throw ConfigError("--in: cannot open " + o.in_path);
    const auto trace = ingest_deterministic_rays(in);
    std::size_t rays = 0;
    for (const auto &fr : trace.frames)
        rays += fr.rays.size();
    std::cout << fmt::format("ok: {} frames, {} rays, frame_rate_fps={}\n", trace.frames.size(), rays,
                             trace.frame_rate_fps);
    if (o.validate_only)
        return 0;
    const fs::path out = o.out_dir;
    fs::create_directories(out);
    {
        auto f = open_out(out / "trace_linear.csv");
        write_deterministic_trace(f, trace, PowerUnit::Linear);
    }
    write_json_file((out / "metadata.json").string(),
                    {{"command", "ingest-rays"},
                     {"input", o.in_path},
                     {"frames", trace.frames.size()},
                     {"rays", rays},
                     {"frame_rate_fps", trace.frame_rate_fps},
                     {"files", {"trace_linear.csv"}}});
    return 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"ISAC channel generator and evaluation harness"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App *sub) {
        sub->add_option("--config", o.config_path, "INI configuration file")->required();
        sub->add_option("--drops", o.drops, "Monte-Carlo drops (default: evaluation.drops)");
        sub->add_option("--out", o.out_dir, "Output directory");
    };
    auto *gen = app.add_subcommand("generate", "Write cluster tables, CIR snapshots and CFR frames");
    add_common(gen);
    gen->add_flag("--dump-rays", o.dump_rays, "Also write the per-ray table");
    auto *comm = app.add_subcommand("eval-comm", "BER versus SNR on the ISAC and communication channels");
    add_common(comm);
    comm->add_option("--snr", o.snr, "SNR range start:step:stop in dB");
    auto *sense = app.add_subcommand("eval-sense", "Detection probability and range error versus SNR");
    add_common(sense);
    sense->add_option("--snr", o.snr, "SNR range start:step:stop in dB");
    auto *spec = app.add_subcommand("spectrogram", "Doppler spectrogram of the target taps");
    add_common(spec);
    auto *ingest = app.add_subcommand("ingest-rays", "Parse a deterministic target trace");
    ingest->add_option("--in", o.in_path, "Trace CSV")->required();
    ingest->add_flag("--validate", o.validate_only, "Only check the trace");
    ingest->add_option("--out", o.out_dir, "Output directory");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &)
    {
        std::cout << app.help();
        return 0;
    }
    catch (const CLI::ParseError &e)
    {
        std::cerr << "error: " << e.what() << "\n" << app.help();
        return kExitConfig;
    }

    try
    {
        if (gen->parsed())
            return cmd_generate(o);
        if (comm->parsed())
            return cmd_eval_comm(o);
        if (sense->parsed())
            return cmd_eval_sense(o);
        if (spec->parsed())
            return cmd_spectrogram(o);
        return cmd_ingest(o);
    }
    catch (const ConfigError &e)
    {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    catch (const ParseError &e)
    {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitConfig;
    }
    catch (const ValidationError &e)
    {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitConfig;
    }
    catch (const std::exception &e)
    {
        std::cerr << "runtime error: " << e.what() << "\n";
        return kExitRuntime;
    }
}
