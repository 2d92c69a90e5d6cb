#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace eplateau {

using Vec3 = Eigen::Vector3d;

/// Per-vertex positions, one column per vertex (3 x vertex_count).
using Configuration = Eigen::Matrix3Xd;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Geometry that makes a quantity undefined (collapsed edge, zero-area triangle, inflection).
class DegenerateGeometry : public Error {
public:
    using Error::Error;
};

/// NaN/Inf encountered, or an iterative method that could not produce a usable answer.
class NumericalFailure : public Error {
public:
    using Error::Error;
};

} // namespace eplateau
