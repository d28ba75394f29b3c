#pragma once

#include <stdexcept>
#include <string>

namespace shepherd {

/// Invalid or infeasible configuration (bad parameter, capacity exceeded).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Violation of the agent/coordinator message protocol or of a call contract
/// between simulation components.
class ProtocolError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

}  // namespace shepherd
