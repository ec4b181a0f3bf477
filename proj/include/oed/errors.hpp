// SPDX-FileCopyrightText: The oed authors
// SPDX-License-Identifier: Apache-2.0

#ifndef OED_ERRORS_HPP
#define OED_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace oed {

/// Invalid user-facing configuration: mesh level out of range, bad parameter
/// values, malformed config or design files.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure: linear solver breakdown, line-search stagnation.
class SolverError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Evaluation outside dom Psi, i.e. the information matrix is not positive
/// definite where a derivative or inverse is required. Objective values are
/// extended by +inf instead of throwing.
class DomainError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace oed

#endif
