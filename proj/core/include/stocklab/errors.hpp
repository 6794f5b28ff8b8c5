#pragma once

#include <stdexcept>
#include <string>

namespace stocklab {

/// Problems with input files or datasets (missing file, bad schema, bad row).
class DataError : public std::runtime_error {
   public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Numeric failures (singular systems, divergent computations).
class NumericError : public std::runtime_error {
   public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace stocklab
