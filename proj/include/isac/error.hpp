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

#include <stdexcept>
#include <string>

namespace isac
{

/// Base class of every error raised by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class DegenerateGeometry : public Error
{
public:
    using Error::Error;
};

/// Requested total path length does not exceed the focal distance.
class DegenerateEllipse : public Error
{
public:
    using Error::Error;
};

/// Malformed or unknown configuration field; the message starts with the field path.
class ConfigError : public Error
{
public:
    using Error::Error;
};

/// Well-formed input whose value is out of range.
class ValidationError : public Error
{
public:
    using Error::Error;
};

class ParseError : public Error
{
public:
    ParseError(const std::string &msg, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + msg), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class InsufficientClusters : public Error
{
public:
    using Error::Error;
};

/// Velocity history does not cover the requested time span.
class IncompleteHistory : public Error
{
public:
    using Error::Error;
};

/// Tap sets with different delay conventions were combined.
class ConventionError : public Error
{
public:
    using Error::Error;
};

/// Division by a zero transmit symbol.
class DivisionGuard : public Error
{
public:
    using Error::Error;
};

} // namespace isac
