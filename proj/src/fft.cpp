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

#include "isac/fft.hpp"

#include "isac/error.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <vector>

namespace isac
{

namespace
{

struct PlanDeleter
{
    void operator()(fftw_plan_s *p) const { fftw_destroy_plan(p); }
};
using PlanPtr = std::unique_ptr<fftw_plan_s, PlanDeleter>;

// Planning is not thread-safe in FFTW; execution with new-array plans is.
std::mutex g_plan_mutex;
std::map<std::tuple<std::size_t, std::size_t, std::size_t, int>, PlanPtr> g_plans;

fftw_plan get_plan(std::size_t n, std::size_t howmany, std::size_t stride, std::size_t dist, FftSign sign)
{
    const int dir = sign == FftSign::Forward ? FFTW_FORWARD : FFTW_BACKWARD;
    const auto key = std::make_tuple(n, howmany, stride, dir);
    std::lock_guard lock(g_plan_mutex);
    auto it = g_plans.find(key);
    if (it != g_plans.end())
        return it->second.get();
    const std::size_t span = (n - 1) * stride + (howmany - 1) * dist + 1;
    std::vector<std::complex<double>> scratch(span);
    auto *buf = reinterpret_cast<fftw_complex *>(scratch.data());
    int nn = static_cast<int>(n);
    fftw_plan p = fftw_plan_many_dft(1, &nn, static_cast<int>(howmany), buf, nullptr, static_cast<int>(stride),
                                     static_cast<int>(dist), buf, nullptr, static_cast<int>(stride),
                                     static_cast<int>(dist), dir, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!p)
        throw Error("FFTW could not create a plan");
    g_plans.emplace(key, PlanPtr(p));
    return p;
}

void run(std::span<std::complex<double>> data, std::size_t n, std::size_t howmany, std::size_t stride,
         std::size_t dist, FftSign sign)
{
    if (n == 0 || howmany == 0)
        return;
    fftw_plan p = get_plan(n, howmany, stride, dist, sign);
    auto *buf = reinterpret_cast<fftw_complex *>(data.data());
    fftw_execute_dft(p, buf, buf);
}

} // namespace

void fft_inplace(std::span<std::complex<double>> x, FftSign sign)
{
    run(x, x.size(), 1, 1, x.size(), sign);
}

void fft_rows(std::span<std::complex<double>> data, std::size_t rows, std::size_t cols, FftSign sign)
{
    if (data.size() != rows * cols)
        throw ValidationError("fft_rows: size mismatch");
    run(data, cols, rows, 1, cols, sign);
}

void fft_cols(std::span<std::complex<double>> data, std::size_t rows, std::size_t cols, FftSign sign)
{
    if (data.size() != rows * cols)
        throw ValidationError("fft_cols: size mismatch");
    run(data, rows, cols, cols, 1, sign);
}

} // namespace isac
