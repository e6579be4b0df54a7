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

#include "isac/channel.hpp"
#include "isac/coefficients.hpp"
#include "isac/matrix.hpp"

#include "json.hpp"

#include <iosfwd>
#include <span>
#include <string>

namespace isac
{

/// drop, index, delay_s, power_lin, power_db_rel_max, kind
void write_clusters_csv(std::ostream &out, const Drop &drop, bool header = true);

/// Environment and target rays of one drop, one row each.
void write_rays_csv(std::ostream &out, const Drop &drop, bool header = true);

/// t_s, u, s, delay_s, re, im, origin, n, m (prefixed by a drop column)
void write_cir_csv(std::ostream &out, std::size_t drop, std::span<const CirSnapshot> snaps, bool header = true);

struct CfrLayout
{
    std::size_t drops = 1;
    std::size_t symbols = 0;
    std::size_t subcarriers = 0;
    double subcarrier_spacing_hz = 0.0;
    double fc_hz = 0.0;
    double symbol_duration_s = 0.0;
};

nlohmann::json cfr_sidecar(const CfrLayout &layout);

/// Appends interleaved little-endian float64 re/im, row-major.
void append_cfr_binary(std::ostream &out, const CMatrix &cfr);

/// Reads `layout.drops` matrices of symbols x subcarriers.
std::vector<CMatrix> read_cfr_binary(std::istream &in, const CfrLayout &layout);
CfrLayout read_cfr_sidecar(const nlohmann::json &j);

void write_json_file(const std::string &path, const nlohmann::json &j);

} // namespace isac
