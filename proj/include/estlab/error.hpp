// Copyright 2026 The estlab Authors
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

#include <cstdio>
#include <stdexcept>
#include <string>

namespace estlab {

/// Short %g rendering of a double for error messages.
inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

/// Base class of every error raised by the library. The CLI maps
/// `validation()` errors to exit code 3 and the rest to exit code 5.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string &what) : std::runtime_error(what) {}
    virtual bool validation() const noexcept { return false; }
};

/// Input violates a documented precondition (bad parameters, wrong design).
class ValidationError : public Error {
public:
    using Error::Error;
    bool validation() const noexcept override { return true; }
};

/// Numerical failure on inputs that were syntactically valid.
class NumericError : public Error {
public:
    using Error::Error;
};

#define ESTLAB_DEFINE_ERROR(Name, Base)                                        \
    class Name : public Base {                                                 \
    public:                                                                    \
        explicit Name(const std::string &what) : Base(#Name ": " + what) {}    \
    }

ESTLAB_DEFINE_ERROR(InvalidSpec, ValidationError);
ESTLAB_DEFINE_ERROR(InvalidSpectrum, ValidationError);
ESTLAB_DEFINE_ERROR(InvalidGamma, ValidationError);
ESTLAB_DEFINE_ERROR(OutOfDomain, ValidationError);
ESTLAB_DEFINE_ERROR(DimensionMismatch, ValidationError);
ESTLAB_DEFINE_ERROR(IndexOutOfRange, ValidationError);
ESTLAB_DEFINE_ERROR(WrongDesign, ValidationError);
ESTLAB_DEFINE_ERROR(EmptyRetainedSet, ValidationError);

ESTLAB_DEFINE_ERROR(NotPositiveDefinite, NumericError);
ESTLAB_DEFINE_ERROR(ConvergenceFailure, NumericError);
ESTLAB_DEFINE_ERROR(SingularCovariance, NumericError);
ESTLAB_DEFINE_ERROR(DegenerateDenominator, NumericError);

#undef ESTLAB_DEFINE_ERROR

} // namespace estlab
