#pragma once

#include <stdexcept>
#include <string>

namespace vftanh {

// Invalid format, configuration or argument combination.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// Well-formed request that falls outside an operation's domain.
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

}  // namespace vftanh
