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

#include "isac/io.hpp"

#include "isac/error.hpp"

#include <fmt/format.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace isac
{

namespace
{

constexpr double kDeg = 180.0 / kPi;

std::string g17(double v)
{
    return fmt::format("{:.17g}", v);
}

std::string_view reflection_name(ReflectionType t)
{
    switch (t)
    {
    case ReflectionType::T1:
        return "T1";
    case ReflectionType::T2:
        return "T2";
    case ReflectionType::T3:
        return "T3";
    }
    return "?";
}

void put_f64(std::ostream &out, double v)
{
    static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);
    auto bits = std::bit_cast<std::uint64_t>(v);
    if constexpr (std::endian::native == std::endian::big)
        bits = __builtin_bswap64(bits);
    char buf[8];
    std::memcpy(buf, &bits, 8);
    out.write(buf, 8);
}

double get_f64(std::istream &in)
{
    char buf[8];
    if (!in.read(buf, 8))
        throw ValidationError("CFR binary ended early");
    std::uint64_t bits;
    std::memcpy(&bits, buf, 8);
    if constexpr (std::endian::native == std::endian::big)
        bits = __builtin_bswap64(bits);
    return std::bit_cast<double>(bits);
}

} // namespace

void write_clusters_csv(std::ostream &out, const Drop &drop, bool header)
{
    if (header)
        out << "drop,index,delay_s,power_lin,power_db_rel_max,kind\n";
    double pmax = 0.0;
    for (const auto &c : drop.clusters)
        pmax = std::max(pmax, c.power);
    for (const auto &c : drop.clusters)
        out << fmt::format("{},{},{},{},{},{}\n", drop.drop_index, c.index, g17(c.delay_s), g17(c.power),
                           g17(10.0 * std::log10(c.power / pmax)),
                           c.kind == ClusterKind::Target ? "target" : "environment");
}

void write_rays_csv(std::ostream &out, const Drop &drop, bool header)
{
    if (header)
        out << "drop,kind,cluster,sub_cluster,ray,reflection,delay_s,power_lin,zoa_deg,aoa_deg,zod_deg,aod_deg,"
               "xpr_db,phase_tt,phase_tp,phase_pt,phase_pp,target_x,target_y,target_z,env_x,env_y,env_z,"
               "eff_velocity_mps\n";
    for (const auto &r : drop.env_rays)
    {
        const auto &c = drop.cluster(r.cluster_index);
        out << fmt::format("{},environment,{},0,{},,{},{},{},{},{},{},{},{},{},{},{},,,,,,,\n", drop.drop_index,
                           r.cluster_index, r.ray_index, g17(c.delay_s), g17(c.power / drop.rays_per_cluster),
                           g17(r.zoa * kDeg), g17(r.aoa * kDeg), g17(r.zod * kDeg), g17(r.aod * kDeg),
                           g17(10.0 * std::log10(r.xpr_linear)), g17(r.phases[0]), g17(r.phases[1]),
                           g17(r.phases[2]), g17(r.phases[3]));
    }
    for (const auto &t : drop.targets)
        for (const auto &r : t.rays)
        {
            std::string env = ",,";
            if (r.env_point)
                env = fmt::format("{},{},{}", g17(r.env_point->x), g17(r.env_point->y), g17(r.env_point->z));
            out << fmt::format("{},target,{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                               drop.drop_index, r.cluster_index, r.sub_cluster, r.ray_index,
                               reflection_name(r.reflection_type), g17(r.delay_s), g17(r.power), g17(r.zoa * kDeg),
                               g17(r.aoa * kDeg), g17(r.zod * kDeg), g17(r.aod * kDeg),
                               g17(10.0 * std::log10(r.xpr_linear)), g17(r.phases[0]), g17(r.phases[1]),
                               g17(r.phases[2]), g17(r.phases[3]), g17(r.target_point.x), g17(r.target_point.y),
                               g17(r.target_point.z), env, g17(r.eff_velocity));
        }
}

void write_cir_csv(std::ostream &out, std::size_t drop, std::span<const CirSnapshot> snaps, bool header)
{
    if (header)
        out << "drop,t_s,u,s,delay_s,re,im,origin,n,m\n";
    for (const auto &snap : snaps)
        for (const auto &tap : snap.taps)
            out << fmt::format("{},{},{},{},{},{},{},{},{},{}\n", drop, g17(snap.t), snap.u, snap.s, g17(tap.delay_s),
                               g17(tap.coeff.real()), g17(tap.coeff.imag()), to_string(tap.origin), tap.n, tap.m);
}

nlohmann::json cfr_sidecar(const CfrLayout &l)
{
    return {
        {"format", "float64 little-endian, interleaved re/im"},
        {"layout", "drop, symbol, subcarrier (row-major)"},
        {"shape", {l.drops, l.symbols, l.subcarriers}},
        {"subcarrier_spacing_hz", l.subcarrier_spacing_hz},
        {"fc_hz", l.fc_hz},
        {"symbol_duration_s", l.symbol_duration_s},
    };
}

CfrLayout read_cfr_sidecar(const nlohmann::json &j)
{
    CfrLayout l;
    const auto &shape = j.at("shape");
    l.drops = shape.at(0).get<std::size_t>();
    l.symbols = shape.at(1).get<std::size_t>();
    l.subcarriers = shape.at(2).get<std::size_t>();
    l.subcarrier_spacing_hz = j.at("subcarrier_spacing_hz").get<double>();
    l.fc_hz = j.at("fc_hz").get<double>();
    l.symbol_duration_s = j.at("symbol_duration_s").get<double>();
    return l;
}

void append_cfr_binary(std::ostream &out, const CMatrix &cfr)
{
    for (const auto &v : cfr.data)
    {
        put_f64(out, v.real());
        put_f64(out, v.imag());
    }
}

std::vector<CMatrix> read_cfr_binary(std::istream &in, const CfrLayout &layout)
{
    std::vector<CMatrix> out;
    for (std::size_t d = 0; d < layout.drops; ++d)
    {
        CMatrix m(layout.symbols, layout.subcarriers);
        for (auto &v : m.data)
        {
            const double re = get_f64(in);
            v = {re, get_f64(in)};
        }
        out.push_back(std::move(m));
    }
    return out;
}

void write_json_file(const std::string &path, const nlohmann::json &j)
{
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write '" + path + "'");
    out << j.dump(2) << "\n";
}

} // namespace isac
