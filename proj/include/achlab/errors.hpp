#pragma once

#include <stdexcept>
#include <string>

namespace ach {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct DegenerateMinima : Error { using Error::Error; };
struct InvalidEndpoint : Error { using Error::Error; };
struct NonConvergence : Error { using Error::Error; };
struct ShapeError : Error { using Error::Error; };
struct GridMismatch : Error { using Error::Error; };
struct Blowup : Error { using Error::Error; };
struct EmptyInterior : Error { using Error::Error; };
struct EmptyBoundary : Error { using Error::Error; };
struct NegativeVolume : Error { using Error::Error; };
struct BadTau : Error { using Error::Error; };
struct VolumeTooLarge : Error { using Error::Error; };
struct ZeroMass : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

}  // namespace ach
