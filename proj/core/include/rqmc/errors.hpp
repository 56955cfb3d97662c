#pragma once

#include <stdexcept>
#include <string>

namespace rqmc {

// Thrown for malformed input files (direction numbers, point dumps).
// Messages name the offending line where applicable.
class parse_error : public std::runtime_error {
public:
    explicit parse_error(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a request exceeds a documented size limit.
class limit_error : public std::runtime_error {
public:
    explicit limit_error(const std::string& what) : std::runtime_error(what) {}
};

// Thrown for invalid parameter combinations.
class config_error : public std::invalid_argument {
public:
    explicit config_error(const std::string& what) : std::invalid_argument(what) {}
};

// Thrown when a file cannot be opened, written, or renamed.
class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace rqmc
