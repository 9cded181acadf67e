#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace lindblad {

template <typename Real>
using Cplx = std::complex<Real>;

template <typename Real>
using DenseMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Real>
using DenseVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

using cd = std::complex<double>;
using MatrixXcd = DenseMatrix<double>;
using VectorXcd = DenseVector<double>;
using Points = std::vector<cd>;

enum class ErrorCode {
  OffUnitCircle,
  OnSymbolCurve,
  NoSplit,
  DegenerateGamma,
  SizeTooSmall,
  SizeTooLarge,
  Singular,
  PrimePathUnavailable,
  UnsupportedModel,
  RankTooHigh,
  NoConvergence,
  EmptySet,
  InvalidInput,
};

inline const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::OffUnitCircle: return "OffUnitCircle";
    case ErrorCode::OnSymbolCurve: return "OnSymbolCurve";
    case ErrorCode::NoSplit: return "NoSplit";
    case ErrorCode::DegenerateGamma: return "DegenerateGamma";
    case ErrorCode::SizeTooSmall: return "SizeTooSmall";
    case ErrorCode::SizeTooLarge: return "SizeTooLarge";
    case ErrorCode::Singular: return "Singular";
    case ErrorCode::PrimePathUnavailable: return "PrimePathUnavailable";
    case ErrorCode::UnsupportedModel: return "UnsupportedModel";
    case ErrorCode::RankTooHigh: return "RankTooHigh";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::InvalidInput: return "InvalidInput";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace lindblad
