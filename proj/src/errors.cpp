#include "ssf/errors.hpp"

namespace ssf {

std::string_view error_kind_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::SpectrumHit: return "SpectrumHit";
    case ErrorKind::BranchCutHit: return "BranchCutHit";
    case ErrorKind::QuadratureFailure: return "QuadratureFailure";
    case ErrorKind::SingularValue: return "SingularValue";
    case ErrorKind::ExtrapolationUnstable: return "ExtrapolationUnstable";
    case ErrorKind::SingularWeyl: return "SingularWeyl";
    case ErrorKind::TailTooFat: return "TailTooFat";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::NeumannEigenvalueHit: return "NeumannEigenvalueHit";
    case ErrorKind::DirichletEigenvalueHit: return "DirichletEigenvalueHit";
    case ErrorKind::OdeSolveFailure: return "OdeSolveFailure";
    case ErrorKind::SingularFactor: return "SingularFactor";
    case ErrorKind::RootFindingFailure: return "RootFindingFailure";
    case ErrorKind::BranchViolation: return "BranchViolation";
    case ErrorKind::SignPathMismatch: return "SignPathMismatch";
  }
  return "Unknown";
}

}  // namespace ssf
