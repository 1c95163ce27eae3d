#pragma once

#include <stdexcept>
#include <string>

namespace siftbench {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Mismatched or invalid image dimensions.
struct DimensionError : Error {
  using Error::Error;
};

/// An argument outside its documented domain (level, quality, tilt, ...).
struct ParameterError : Error {
  using Error::Error;
};

/// Input image too small for the requested operation.
struct SizeError : Error {
  using Error::Error;
};

/// JPEG/PNG encode or decode failure.
struct CodecError : Error {
  using Error::Error;
};

/// Singular or otherwise unusable geometric transform.
struct GeometryError : Error {
  using Error::Error;
};

/// Not enough samples to fit a model.
struct InsufficientDataError : Error {
  using Error::Error;
};

/// Every minimal sample was degenerate (e.g. collinear points).
struct DegenerateGeometryError : Error {
  using Error::Error;
};

/// Unreadable/unwritable files and malformed external data.
struct IoError : Error {
  using Error::Error;
};

/// Degenerate benchmark cells, empty aggregations and similar data faults.
struct DataError : Error {
  using Error::Error;
};

}  // namespace siftbench
