#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>

namespace topomin {

/// Arbitrary-precision integer used for every chain coefficient and matrix entry.
using Integer = boost::multiprecision::cpp_int;

/// Exact lattice coordinate. Denominators stay tiny (barycenters of grid simplices).
using Rational = boost::rational<std::int64_t>;

inline double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

inline std::string to_string(const Integer& v) { return v.str(); }

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed arguments (zero dimension, empty axis, indices out of range).
struct InvalidInput : Error {
  using Error::Error;
};

/// A documented precondition of an operation does not hold.
struct PreconditionError : Error {
  using Error::Error;
};

/// A constraint cannot be placed in the complement model.
struct RealizationError : Error {
  using Error::Error;
};

/// No candidate set satisfies the constraint family.
struct InfeasibleError : Error {
  using Error::Error;
};

/// Exhaustive search refused because the candidate pool exceeds the cap.
struct PoolTooLarge : Error {
  using Error::Error;
};

}  // namespace topomin
