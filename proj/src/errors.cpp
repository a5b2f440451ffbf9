#include "sidiwo/errors.hpp"

namespace sidiwo {

const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::io_failure: return "IoFailure";
    case ErrorCode::parse_failure: return "ParseFailure";
    case ErrorCode::empty_corpus: return "EmptyCorpus";
    case ErrorCode::document_too_short: return "DocumentTooShort";
    case ErrorCode::empty_document: return "EmptyDocument";
    case ErrorCode::rank_deficient: return "RankDeficient";
    case ErrorCode::not_symmetric: return "NotSymmetric";
    case ErrorCode::shape_mismatch: return "ShapeMismatch";
    case ErrorCode::model_invalid: return "ModelInvalid";
    case ErrorCode::domain_error: return "DomainError";
    case ErrorCode::degenerate_weight: return "DegenerateWeight";
    case ErrorCode::unsupported_rank: return "UnsupportedRank";
    case ErrorCode::eig_gap_too_small: return "EigGapTooSmall";
    case ErrorCode::degenerate_split: return "DegenerateSplit";
    case ErrorCode::length_mismatch: return "LengthMismatch";
    case ErrorCode::internal: return "InternalError";
  }
  return "UnknownError";
}

bool is_numerical_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::rank_deficient:
    case ErrorCode::not_symmetric:
    case ErrorCode::domain_error:
    case ErrorCode::degenerate_weight:
    case ErrorCode::eig_gap_too_small:
    case ErrorCode::degenerate_split:
    case ErrorCode::internal:
      return true;
    default:
      return false;
  }
}

}  // namespace sidiwo
