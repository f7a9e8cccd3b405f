#pragma once

#include <stdexcept>
#include <string>

namespace aitc {

// Analysis failures (CLI exit code 1).
class AnalysisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// MAIC target outside the convex hull of the observed covariates.
class InfeasibleTargetError : public AnalysisError {
 public:
  using AnalysisError::AnalysisError;
};

// Complete/quasi-complete separation in a propensity fit.
class SeparationError : public AnalysisError {
 public:
  using AnalysisError::AnalysisError;
};

// A weighted 2x2 cell with zero mass.
class DegenerateCellError : public AnalysisError {
 public:
  using AnalysisError::AnalysisError;
};

// Arbitration protocol misuse: hash mismatch, wrong recipient, bad role.
class ProtocolError : public AnalysisError {
 public:
  using AnalysisError::AnalysisError;
};

// Malformed or out-of-contract input files (CLI exit code 2).
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace aitc
