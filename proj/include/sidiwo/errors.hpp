#pragma once

#include <stdexcept>
#include <string>

namespace sidiwo {

// One code per failure class; the CLI maps these onto exit codes and the
// C API onto sidiwo_status values.
enum class ErrorCode {
  invalid_argument,
  io_failure,
  parse_failure,
  empty_corpus,
  document_too_short,
  empty_document,
  rank_deficient,
  not_symmetric,
  shape_mismatch,
  model_invalid,
  domain_error,
  degenerate_weight,
  unsupported_rank,
  eig_gap_too_small,
  degenerate_split,
  length_mismatch,
  internal,
};

const char* error_name(ErrorCode code);

// True for failures of the numerics (as opposed to bad inputs or I/O).
bool is_numerical_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_name(code)) + ": " + message),
        code_(code),
        message_(message) {}

  ErrorCode code() const noexcept { return code_; }
  const char* name() const noexcept { return error_name(code_); }
  /// The message without the leading error name.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace sidiwo
