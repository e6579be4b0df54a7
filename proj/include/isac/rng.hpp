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

#include <cstdint>
#include <random>

namespace isac
{

// Named sub-streams of one drop. Every generation stage draws from its own
// stream so that enabling or disabling one stage never shifts the draws of another.
enum class Stream : std::uint64_t
{
    Delays = 1,
    Powers,
    ClusterAngles,
    Rays,
    Xpr,
    Phases,
    Selection,
    Targets,
    Velocity,
    Shadowing,
    Noise,
    Bits,
};

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Counter-based seed split: the result depends only on the arguments, never on call order.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t drop, Stream stream,
                                    std::uint64_t index = 0) noexcept
{
    std::uint64_t h = mix64(seed);
    h = mix64(h ^ drop);
    h = mix64(h ^ static_cast<std::uint64_t>(stream));
    return mix64(h ^ index);
}

class Rng
{
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// U[0,1)
    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }

    /// U(0,1], safe for log().
    double uniform_open0() { return 1.0 - uniform(); }

    double normal(double mean = 0.0, double stddev = 1.0)
    {
        return normal_(engine_, std::normal_distribution<double>::param_type(mean, stddev));
    }

    std::uint64_t bits() { return engine_(); }

    std::mt19937_64 &engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_;
};

} // namespace isac
