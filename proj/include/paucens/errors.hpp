#pragma once

#include <stdexcept>
#include <string>

namespace paucens {

/// Bad input data (files, CSV contents, incompatible dimensions).
struct DataError : std::runtime_error {
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// A numerical routine failed to reach its required tolerance.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace paucens
