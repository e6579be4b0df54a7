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

#include <complex>
#include <span>

namespace isac
{

enum class FftSign
{
    Forward,  ///< sum x[n] exp(-j 2 pi n k / N)
    Backward, ///< sum x[n] exp(+j 2 pi n k / N), no 1/N
};

/// Unnormalized in-place DFT of any length. Plans are cached per (length, sign).
void fft_inplace(std::span<std::complex<double>> x, FftSign sign);

/// In-place DFT along every row (stride 1) or column of a row-major rows x cols block.
void fft_rows(std::span<std::complex<double>> data, std::size_t rows, std::size_t cols, FftSign sign);
void fft_cols(std::span<std::complex<double>> data, std::size_t rows, std::size_t cols, FftSign sign);

} // namespace isac
