/*
 Copyright 2026 The steergame Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#pragma once

#include <stdexcept>
#include <string>

namespace steergame {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inconsistent matrix or sequence sizes.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A weight or covariance fails its definiteness requirement.
class DefinitenessError : public Error {
 public:
  DefinitenessError(const std::string& what, double min_eig)
      : Error(what), min_eig_(min_eig) {}
  double min_eig() const { return min_eig_; }

 private:
  double min_eig_;
};

// A solver precondition (concavity, curvature, rank) does not hold.
class AssumptionViolation : public Error {
 public:
  AssumptionViolation(const std::string& what, double diagnostic)
      : Error(what), diagnostic_(diagnostic) {}
  double diagnostic() const { return diagnostic_; }

 private:
  double diagnostic_;
};

// Terminal mean cannot be reached in the upper game.
class InfeasibleMean : public Error {
 public:
  InfeasibleMean(const std::string& what, int rank, int required)
      : Error(what), rank_(rank), required_(required) {}
  int rank() const { return rank_; }
  int required() const { return required_; }

 private:
  int rank_;
  int required_;
};

// No structured controller gain meets the terminal covariance bound.
class InfeasibleCovariance : public Error {
 public:
  InfeasibleCovariance(const std::string& what, double min_norm)
      : Error(what), min_norm_(min_norm) {}
  // Smallest attainable value of the spectral-norm constraint function.
  double min_norm() const { return min_norm_; }

 private:
  double min_norm_;
};

// Numerical breakdown inside a solver (singular system, no progress).
class SolverError : public Error {
 public:
  using Error::Error;
};

// Scenario file problems. The message carries line and field information.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace steergame
