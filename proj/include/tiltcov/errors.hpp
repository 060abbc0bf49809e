// SPDX-License-Identifier: Apache-2.0
//
// tiltcov: uplink coverage and antenna tilt analysis for 3D-beamforming massive MIMO
// Copyright (C) 2026 The tiltcov authors
// ------------------------------------------------------------------------

#pragma once

#include <stdexcept>
#include <string>

namespace tiltcov {

/// Invalid or inconsistent configuration. Maps to CLI exit code 2.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of an elementary function.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Quadrature or search failed to meet its budget. Carries the best partial value.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string &what, double partial)
        : std::runtime_error(what), partial_(partial)
    {
    }

    double partial() const noexcept { return partial_; }

private:
    double partial_;
};

/// Filesystem read/write failure. Maps to CLI exit code 4.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace tiltcov
