#pragma once

#include <stdexcept>
#include <string>

namespace fairlens {

// Every failure the library reports, keyed so callers (and the CLI exit
// code mapping) can tell metric-undefined conditions apart from bad input.
enum class ErrorCode {
  Io,
  Parse,
  DuplicateId,
  DuplicateInRanking,
  OverlappingLexicon,
  SentinelInInput,
  EmptyReferences,
  UndefinedMetric,
  DegenerateTraining,
  CorpusTooSmall,
  CyclicHierarchy,
  AmbiguousSurfaceForm,
  UnknownObject,
  NoGroundTruth,
  JoinFailure,
  JoinMismatch,
  MissingCatalogEntry,
  InvalidQuery,
  UnknownAnchor,
  InvalidArgument,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

  // CLI contract: 1 when a metric is mathematically undefined on the
  // given data, 2 for anything wrong with the input itself.
  int exit_class() const { return code_ == ErrorCode::UndefinedMetric ? 1 : 2; }

 private:
  ErrorCode code_;
};

const char* error_code_name(ErrorCode code);

}  // namespace fairlens
