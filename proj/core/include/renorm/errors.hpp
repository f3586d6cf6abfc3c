#pragma once

#include <stdexcept>
#include <string>

namespace renorm {

/// Base class for every failure the library reports. `exit_code()` is the
/// process exit status the CLI maps the failure to.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual int exit_code() const noexcept { return 1; }
};

/// Bad arguments, malformed configuration, violated preconditions.
class ValidationError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

/// Working precision cannot certify the requested quantity.
class PrecisionExhausted : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

/// Observed orbit order deviates from the rigid-rotation model.
class CombinatoricsMismatch : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 4; }
};

/// Return-time denominators exceeded the integer width.
class IntegerOverflow : public Error {
 public:
  explicit IntegerOverflow(const std::string& what, int largest_valid)
      : Error(what), largest_valid_(largest_valid) {}
  /// Largest index whose value was still representable.
  int largest_valid() const noexcept { return largest_valid_; }

 private:
  int largest_valid_;
};

/// Parameter bisection reached floating-point resolution before matching the
/// requested combinatorial depth.
class BisectionStall : public Error {
 public:
  explicit BisectionStall(const std::string& what, int matched_depth)
      : Error(what), matched_depth_(matched_depth) {}
  int matched_depth() const noexcept { return matched_depth_; }
  int exit_code() const noexcept override { return 3; }

 private:
  int matched_depth_;
};

/// Commutation residual at the glueing seam exceeded tolerance.
class SeamDiscontinuity : public Error {
 public:
  using Error::Error;
};

/// A Moebius evaluation came too close to its pole.
class PoleProximity : public Error {
 public:
  using Error::Error;
};

/// Kernel evaluated at (or within tolerance of) one of its poles.
class PoleHit : public Error {
 public:
  using Error::Error;
};

/// Two successive quadrature resolutions disagree beyond tolerance.
class QuadratureNonconvergence : public Error {
 public:
  using Error::Error;
};

/// A planar evaluation left the band on which the extension is defined.
class BandExceeded : public Error {
 public:
  using Error::Error;
};

/// A one-dimensional root solve failed to reach its residual target.
class RootFindFailure : public Error {
 public:
  using Error::Error;
};

/// A planar Newton pullback failed to converge.
class NewtonDivergence : public Error {
 public:
  using Error::Error;
};

}  // namespace renorm
