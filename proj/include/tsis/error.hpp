#pragma once

#include <stdexcept>
#include <string>

namespace tsis {

enum class ErrorCode {
  // dataset-io
  MissingFile,
  EmptyFile,
  RaggedRow,
  NonNumericValue,
  IndexOutOfRange,
  EmptyKeepList,
  // neighbors
  LengthMismatch,
  KZero,
  KTooLarge,
  // instance selection
  LTooLarge,
  SingularSystem,
  DimensionMismatch,
  FewerThanTwoInstances,
  // feature selection
  EmptyInput,
  SingleClassDataset,
  EmptyScores,
  // classifiers
  EmptySeries,
  BandTooNarrow,
  WidthMismatch,
  SingleClassTraining,
  SubsetTooLarge,
  LabelOutsideUniverse,
  // pipeline
  EmptyAxis,
  DatasetLoadFailure,
  IoFailure,
};

constexpr const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::RaggedRow: return "RaggedRow";
    case ErrorCode::NonNumericValue: return "NonNumericValue";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::EmptyKeepList: return "EmptyKeepList";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::KZero: return "KZero";
    case ErrorCode::KTooLarge: return "KTooLarge";
    case ErrorCode::LTooLarge: return "LTooLarge";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::FewerThanTwoInstances: return "FewerThanTwoInstances";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::SingleClassDataset: return "SingleClassDataset";
    case ErrorCode::EmptyScores: return "EmptyScores";
    case ErrorCode::EmptySeries: return "EmptySeries";
    case ErrorCode::BandTooNarrow: return "BandTooNarrow";
    case ErrorCode::WidthMismatch: return "WidthMismatch";
    case ErrorCode::SingleClassTraining: return "SingleClassTraining";
    case ErrorCode::SubsetTooLarge: return "SubsetTooLarge";
    case ErrorCode::LabelOutsideUniverse: return "LabelOutsideUniverse";
    case ErrorCode::EmptyAxis: return "EmptyAxis";
    case ErrorCode::DatasetLoadFailure: return "DatasetLoadFailure";
    case ErrorCode::IoFailure: return "IoFailure";
  }
  return "UnknownError";
}

/// Exception carrying a machine-checkable error code alongside the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace tsis
