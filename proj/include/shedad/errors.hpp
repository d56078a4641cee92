#pragma once

#include <stdexcept>
#include <string>

namespace shedad {

/// Bad input data: malformed CSV, schema mismatches, inconsistent id sets.
/// The CLI maps this to exit code 2; everything else unexpected is exit 3.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace shedad
