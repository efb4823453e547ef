#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace lerw {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// Input or configuration problem; maps to CLI exit code 1.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Solver, fit or integration failure; maps to CLI exit code 2.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace lerw
