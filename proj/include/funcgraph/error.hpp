#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace funcgraph {

enum class ErrorCode {
  // geometry
  BehindCamera,
  InvalidDepth,
  EmptySequence,
  // scene graph
  EmptyPointCloud,
  UnknownParent,
  UnknownElement,
  TrajectoryTooShort,
  DimensionMismatch,
  ParseError,
  // view selection / lifting
  ZeroWeightSum,
  AllNoise,
  NoVisiblePoints,
  // tracking
  TooFewPoints,
  DegenerateConfiguration,
  NoConvergence,
  NonMonotonicTimestamps,
  InsufficientTrack,
  // articulation
  DegenerateTrajectory,
  CollinearPoints,
  // refinement
  EmptyTrajectory,
  EmptyGraph,
  // bench / metrics
  InvalidConfig,
  LengthMismatch,
  JointTypeMismatch,
  // file boundary
  IoError,
};

std::string_view to_string(ErrorCode code);

// True for failures caused by the data being numerically unusable rather than
// malformed (the CLI maps these to exit code 2).
bool is_numerical(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace funcgraph
