#ifndef IUH_ERRORS_HPP
#define IUH_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace iuh {

/// Bad or inconsistent run configuration (missing paths, invalid ranges).
/// Maps to CLI exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Unusable input data (malformed files, nothing survives quality control).
/// Maps to CLI exit code 3.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace iuh

#endif
