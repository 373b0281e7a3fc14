#pragma once

#include <stdexcept>
#include <string>

namespace mott {

/// Base class of every error raised by the simulator.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Total energy sits on a channel threshold; the plane-wave pair degenerates.
class ThresholdDegeneracy : public Error {
public:
    using Error::Error;
};

/// The excited channel is closed, so no flux can be carried into it.
class ClosedChannel : public Error {
public:
    using Error::Error;
};

/// Spin positions are not strictly increasing.
class OverlappingSpins : public Error {
public:
    using Error::Error;
};

/// The matching system could not be solved to the required residual.
class SingularSystem : public Error {
public:
    SingularSystem(const std::string& what, double rcond)
        : Error(what + " (reciprocal condition estimate " + std::to_string(rcond) + ")"),
          rcond_(rcond) {}
    double rcond() const noexcept { return rcond_; }

private:
    double rcond_;
};

/// Outgoing flux does not match the incident flux; the solve is unreliable.
class UnitarityViolation : public Error {
public:
    UnitarityViolation(const std::string& what, double defect) : Error(what), defect_(defect) {}
    double defect() const noexcept { return defect_; }

private:
    double defect_;
};

/// Two spins map to the same grid point.
class SpinCollision : public Error {
public:
    using Error::Error;
};

class SpinOutsideGrid : public Error {
public:
    using Error::Error;
};

/// The exponential action could not reach its tolerance at the requested step.
class ConvergenceFailure : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent configuration input.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace mott
