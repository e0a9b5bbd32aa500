#pragma once

#include <stdexcept>

namespace relpair {

/// Invalid or inconsistent user-supplied configuration. The CLI maps this
/// to exit code 2; every other failure maps to 3.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Degenerate geometry: coincident worldlines, detector windows outside the
/// sampled grid, and similar requests with no well-defined answer.
struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Position grid too coarse for the requested momentum spread; results would
/// alias rather than degrade gracefully.
struct AliasingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Trial record set that violates the two-records-per-trial contract
/// (missing partner, duplicate station, out-of-range values).
struct MalformedRecords : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace relpair
