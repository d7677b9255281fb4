#pragma once

#include <stdexcept>
#include <string>

namespace qest {

/// Base class for all numerical/domain failures raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct NonHermitianInput : Error { using Error::Error; };
struct InconsistentRhs : Error { using Error::Error; };
struct RldUndefined : Error { using Error::Error; };
struct SingularQfi : Error { using Error::Error; };
struct SingularOutcome : Error { using Error::Error; };
struct SolverFailure : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };
struct DerivativeError : Error { using Error::Error; };
struct SingularJacobian : Error { using Error::Error; };
struct DegenerateScene : Error { using Error::Error; };
struct GridUnconverged : Error { using Error::Error; };
struct TailTooLarge : Error { using Error::Error; };
struct SearchDegenerate : Error { using Error::Error; };
struct NonConvergent : Error { using Error::Error; };
struct SdpInfeasible : Error { using Error::Error; };

}  // namespace qest
