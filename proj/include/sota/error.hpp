/*
 * Copyright (C) 2026 The sotaroute Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
*/

#ifndef SOTA__ERROR_HPP
#define SOTA__ERROR_HPP

#include <stdexcept>

namespace sota {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Inputs that cannot be combined, e.g. distributions on different time grids.
class ConfigError : public Error
{
public:
  using Error::Error;
};

/// A call sequence that violates an object's protocol.
class UsageError : public Error
{
public:
  using Error::Error;
};

class ArgumentError : public Error
{
public:
  using Error::Error;
};

/// Malformed input document.
class ParseError : public Error
{
public:
  using Error::Error;
};

/// Well-formed input that violates a model invariant.
class ValidationError : public Error
{
public:
  using Error::Error;
};

/// The path search hit its configured queue cap.
class SearchBudgetExceeded : public Error
{
public:
  using Error::Error;
};

} // namespace sota

#endif // SOTA__ERROR_HPP
