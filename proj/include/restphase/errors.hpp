#pragma once

#include <stdexcept>
#include <string>

namespace restphase {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidSeries : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct LengthMismatch : Error { using Error::Error; };
struct TrajectoryOutOfBounds : Error { using Error::Error; };
struct PointOutOfBounds : Error { using Error::Error; };
struct FlatTemplate : Error { using Error::Error; };
struct RoiLargerThanImage : Error { using Error::Error; };
struct RoiOutOfBounds : Error { using Error::Error; };
struct BadVariant : Error { using Error::Error; };
struct EmptyInput : Error { using Error::Error; };
struct InvalidWindow : Error { using Error::Error; };
struct DegenerateLabels : Error { using Error::Error; };
struct PairingMismatch : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

}  // namespace restphase
