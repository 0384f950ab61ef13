#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pennmm {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad penalty/model parameters, rejected at construction.
struct InvalidSpecError : Error {
  using Error::Error;
};

// Operation evaluated outside its mathematical domain
// (e.g. a majorizer centered at zero without perturbation).
struct DomainError : Error {
  using Error::Error;
};

// Non-finite likelihood, carrying the offending linear predictor.
struct LoglikOverflowError : Error {
  LoglikOverflowError(std::ptrdiff_t observation, double predictor)
      : Error("non-finite log-likelihood at observation " + std::to_string(observation) +
              " (linear predictor " + std::to_string(predictor) + ")"),
        observation(observation),
        predictor(predictor) {}
  std::ptrdiff_t observation;
  double predictor;
};

// Rank deficiency detected during factorization.
struct SingularityError : Error {
  SingularityError(const std::string& what, double smallest_pivot)
      : Error(what + " (smallest pivot " + std::to_string(smallest_pivot) + ")"),
        smallest_pivot(smallest_pivot) {}
  double smallest_pivot;
};

// Diagnostic requested at a point that is not stationary.
struct NonStationaryError : Error {
  using Error::Error;
};

// Malformed input file; line is 1-based.
struct CsvError : Error {
  CsvError(const std::string& what, std::size_t line)
      : Error(what + " (line " + std::to_string(line) + ")"), line(line) {}
  std::size_t line;
};

// Exhaustive search refused because the subset count is exponential in d.
struct SubsetCostError : Error {
  using Error::Error;
};

}  // namespace pennmm
