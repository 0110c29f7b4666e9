// Copyright 2026 The dqcsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dqcsim {

/// Base class of every error raised by the library.
///
/// Each category carries the process exit code the command-line tool reports
/// for it, so callers can map failures without inspecting messages.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
    virtual int exit_code() const noexcept {
        return 1;
    }
};

/// Malformed or inconsistent input files (circuits, networks, configs).
class ConfigError : public Error {
   public:
    using Error::Error;
    int exit_code() const noexcept override {
        return 2;
    }
};

/// Syntax or semantic error at a known line of a text input.
class ParseError : public ConfigError {
   public:
    ParseError(std::size_t line, const std::string &message)
        : ConfigError("line " + std::to_string(line) + ": " + message), line_(line), detail_(message) {
    }
    std::size_t line() const noexcept {
        return line_;
    }
    /// The message without the line prefix.
    const std::string &detail() const noexcept {
        return detail_;
    }

   private:
    std::size_t line_;
    std::string detail_;
};

/// Circuit violates an IR invariant.
class CircuitError : public ConfigError {
   public:
    using ConfigError::ConfigError;
};

/// Placement or instruction emission failed.
class CompileError : public Error {
   public:
    using Error::Error;
    int exit_code() const noexcept override {
        return 3;
    }
};

/// Runtime failure inside the simulated nodes, network or scheduler.
class SimulationError : public Error {
   public:
    using Error::Error;
    int exit_code() const noexcept override {
        return 4;
    }
};

}  // namespace dqcsim
