#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace hexcone {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using RealVec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Mat2c = Eigen::Matrix2cd;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;

// primitive cube root of unity e^{2 pi i / 3}
inline cplx tau() { return std::polar(1.0, kTwoPi / 3.0); }

enum class ErrorCode {
  MalformedAction,
  UnknownPreset,
  ParseError,
  SymmetryValidationError,
  ConjugationMismatch,
  NotAFixedPoint,
  NonCommuting,
  WrongSymmetryKind,
  NoCenterVertex,
  MultiplicityMismatch,
  RotationFixesEigenspace,
  DegenerateOnContour,
  LowOverlap,
  NotEigenvectorOfInvolution,
  InvalidArgument,
};

const char* error_name(ErrorCode c);

// validation failures are input problems, the rest are numeric certification failures
bool is_validation_error(ErrorCode c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hexcone
