#pragma once

#include <stdexcept>
#include <string>

namespace cfs {

// Error taxonomy mirrored by the CLI exit codes:
//   usage/format -> 2, numeric/horizon -> 3, resource cap -> 4.
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A coefficient query or scan went past the declared horizon of a
// generator-backed series.
struct HorizonError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Word enumeration or symbolic expansion exceeded a configured cap.
struct ResourceCapError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace cfs
