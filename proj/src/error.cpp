#include "narrativeforge/error.hpp"

namespace narrativeforge {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::parse: return "parse_error";
    case ErrorCode::validation: return "validation_error";
    case ErrorCode::not_found: return "not_found";
    case ErrorCode::lock_violation: return "lock_violation";
    case ErrorCode::transport: return "transport_error";
    case ErrorCode::extraction: return "extraction_error";
    case ErrorCode::empty_profile: return "empty_profile";
    case ErrorCode::categorization: return "categorization_error";
    case ErrorCode::generation: return "generation_error";
    case ErrorCode::update: return "update_error";
    case ErrorCode::embedding: return "embedding_error";
    case ErrorCode::storage: return "storage_error";
    case ErrorCode::conflict: return "conflict";
    case ErrorCode::unsupported: return "unsupported";
    case ErrorCode::usage: return "usage_error";
  }
  return "unknown";
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::parse:
    case ErrorCode::validation:
    case ErrorCode::usage: return 400;
    case ErrorCode::not_found: return 404;
    case ErrorCode::lock_violation:
    case ErrorCode::conflict: return 409;
    case ErrorCode::extraction:
    case ErrorCode::empty_profile:
    case ErrorCode::categorization:
    case ErrorCode::generation:
    case ErrorCode::update: return 422;
    case ErrorCode::transport:
    case ErrorCode::embedding: return 502;
    case ErrorCode::unsupported: return 501;
    case ErrorCode::storage: return 500;
  }
  return 500;
}

}  // namespace narrativeforge
