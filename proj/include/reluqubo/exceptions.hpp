// Copyright 2026 The reluqubo Authors
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace reluqubo {

class Error : public std::runtime_error {
 public:
    using std::runtime_error::runtime_error;
};

/// Vector length does not match the problem it is used with.
class DimensionError : public Error {
 public:
    using Error::Error;
};

class InvalidPolylineError : public Error {
 public:
    using Error::Error;
};

class ConvexityError : public Error {
 public:
    using Error::Error;
};

class FitFailureError : public Error {
 public:
    using Error::Error;
};

/// The input lacks something the operation needs (derivatives, a quantized
/// linear form, ...).
class CapabilityError : public Error {
 public:
    using Error::Error;
};

class SizeError : public Error {
 public:
    using Error::Error;
};

class UnsupportedCombinationError : public Error {
 public:
    using Error::Error;
};

class InvalidConfigError : public Error {
 public:
    using Error::Error;
};

class ParseError : public Error {
 public:
    using Error::Error;
};

}  // namespace reluqubo
