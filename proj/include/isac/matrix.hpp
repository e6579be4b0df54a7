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
#include <cstddef>
#include <vector>

namespace isac
{

/// Dense row-major matrix.
template <class T> struct Matrix
{
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<T> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, T fill = T{}) : rows(r), cols(c), data(r * c, fill) {}

    T &operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    const T &operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    T *row(std::size_t r) { return data.data() + r * cols; }
    const T *row(std::size_t r) const { return data.data() + r * cols; }

    bool operator==(const Matrix &) const = default;
};

using CMatrix = Matrix<std::complex<double>>;
using RMatrix = Matrix<double>;

} // namespace isac
