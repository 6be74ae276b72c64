#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace arsum {

/// Base of every domain error. `kind()` is the stable error name printed by
/// the CLI ("SchemaError: row 3: missing field expert_summary").
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define ARSUM_DEFINE_ERROR(Name)                                       \
  class Name : public Error {                                          \
   public:                                                             \
    explicit Name(const std::string& message) : Error(#Name, message) {} \
  };

ARSUM_DEFINE_ERROR(IoError)
ARSUM_DEFINE_ERROR(SchemaError)
ARSUM_DEFINE_ERROR(DuplicateIdError)
ARSUM_DEFINE_ERROR(EmptyCorpusError)
ARSUM_DEFINE_ERROR(UnknownFieldError)
ARSUM_DEFINE_ERROR(CorpusTooSmallError)
ARSUM_DEFINE_ERROR(InvalidNError)
ARSUM_DEFINE_ERROR(EmptyReferenceError)
ARSUM_DEFINE_ERROR(MissingCandidateError)
ARSUM_DEFINE_ERROR(MissingRecordError)
ARSUM_DEFINE_ERROR(NoSentencesError)
ARSUM_DEFINE_ERROR(MissingModelNameError)
ARSUM_DEFINE_ERROR(MixedProvenanceError)
ARSUM_DEFINE_ERROR(EmptyInputError)
ARSUM_DEFINE_ERROR(UnknownIdError)
ARSUM_DEFINE_ERROR(UnknownTaskError)
ARSUM_DEFINE_ERROR(OutOfRangeError)
ARSUM_DEFINE_ERROR(DuplicateRatingError)
ARSUM_DEFINE_ERROR(EmptyStoreError)
ARSUM_DEFINE_ERROR(BlindnessError)
ARSUM_DEFINE_ERROR(ConfigError)

#undef ARSUM_DEFINE_ERROR

}  // namespace arsum
