#ifndef WILLMORE_ERRORS_HPP
#define WILLMORE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace willmore {

/// Input rejected by a precondition. The CLI maps this to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A laminate or corrector was requested where the envelope needs none.
class NotAdmissible : public ValidationError {
 public:
  enum class Reason { kAlreadyFlat, kEnvelopeEqualsRaw };

  explicit NotAdmissible(Reason r)
      : ValidationError(r == Reason::kAlreadyFlat ? "already flat" : "envelope equals raw integrand"),
        reason_(r) {}
  Reason reason() const { return reason_; }

 private:
  Reason reason_;
};

/// No entry of an epsilon ladder keeps the mollified Hessian below sqrt(lambda)/2.
class NoAdmissibleEpsilon : public ValidationError {
 public:
  NoAdmissibleEpsilon() : ValidationError("no admissible epsilon") {}
};

}  // namespace willmore

#endif  // WILLMORE_ERRORS_HPP
