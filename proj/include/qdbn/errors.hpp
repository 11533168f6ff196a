#pragma once

#include <stdexcept>
#include <string>

namespace qdbn {

// File or input-data problem; the CLI maps this to exit code 2.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure (NaN/Inf, empty sample set, ...); CLI exit code 3.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace qdbn
