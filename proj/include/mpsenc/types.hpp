#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace mpsenc {

using cplx = std::complex<double>;

using Mat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic>;
using RowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Eigen::Matrix<cplx, Eigen::Dynamic, 1>;
using RealVec = Eigen::VectorXd;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;
using Mat16 = Eigen::Matrix<cplx, 16, 16>;

enum class ErrorCode {
  invalid_argument,
  size_mismatch,
  out_of_range,
  degenerate_input,
  resource_limit,
  parse_error,
  io_error,
};

const char* to_string(ErrorCode code);

/// Library-wide exception; `code()` is stable and used by the CLI's
/// machine-readable error line.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mpsenc
