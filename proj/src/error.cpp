#include "funcgraph/error.hpp"

namespace funcgraph {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::BehindCamera: return "BehindCamera";
    case ErrorCode::InvalidDepth: return "InvalidDepth";
    case ErrorCode::EmptySequence: return "EmptySequence";
    case ErrorCode::EmptyPointCloud: return "EmptyPointCloud";
    case ErrorCode::UnknownParent: return "UnknownParent";
    case ErrorCode::UnknownElement: return "UnknownElement";
    case ErrorCode::TrajectoryTooShort: return "TrajectoryTooShort";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ZeroWeightSum: return "ZeroWeightSum";
    case ErrorCode::AllNoise: return "AllNoise";
    case ErrorCode::NoVisiblePoints: return "NoVisiblePoints";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::DegenerateConfiguration: return "DegenerateConfiguration";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NonMonotonicTimestamps: return "NonMonotonicTimestamps";
    case ErrorCode::InsufficientTrack: return "InsufficientTrack";
    case ErrorCode::DegenerateTrajectory: return "DegenerateTrajectory";
    case ErrorCode::CollinearPoints: return "CollinearPoints";
    case ErrorCode::EmptyTrajectory: return "EmptyTrajectory";
    case ErrorCode::EmptyGraph: return "EmptyGraph";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::JointTypeMismatch: return "JointTypeMismatch";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

bool is_numerical(ErrorCode code) {
  switch (code) {
    case ErrorCode::TooFewPoints:
    case ErrorCode::DegenerateConfiguration:
    case ErrorCode::NoConvergence:
    case ErrorCode::InsufficientTrack:
    case ErrorCode::DegenerateTrajectory:
    case ErrorCode::CollinearPoints:
    case ErrorCode::AllNoise:
    case ErrorCode::ZeroWeightSum:
    case ErrorCode::NoVisiblePoints:
      return true;
    default:
      return false;
  }
}

}  // namespace funcgraph
