#pragma once

#include <stdexcept>
#include <string>

namespace pbcore {

// Base class for every error the library throws.
struct PbError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : PbError {
  using PbError::PbError;
};

struct UnknownProject : PbError {
  explicit UnknownProject(const std::string& id) : PbError("unknown project: " + id) {}
};

struct UnknownVoter : PbError {
  explicit UnknownVoter(const std::string& id) : PbError("unknown voter: " + id) {}
};

struct ShareOfUnapprovedProject : PbError {
  explicit ShareOfUnapprovedProject(const std::string& id)
      : PbError("share is undefined: project " + id + " has no approvers") {}
};

// A strict comparison could not be resolved within the precision cap and the
// operands are not syntactically equal. Verdicts must surface this instead of
// guessing an order.
struct IndeterminateComparison : PbError {
  using PbError::PbError;
};

struct EnumerationLimitExceeded : PbError {
  using PbError::PbError;
};

struct LimitExceeded : PbError {
  using PbError::PbError;
};

struct InvalidParameters : PbError {
  using PbError::PbError;
};

}  // namespace pbcore
