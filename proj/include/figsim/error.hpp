#pragma once

#include <stdexcept>
#include <string>

namespace figsim {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateFit : Error {
  using Error::Error;
};
struct EmptySurface : Error {
  using Error::Error;
};
struct EmptyMask : Error {
  using Error::Error;
};
struct NoPoints : Error {
  using Error::Error;
};
struct TopologyMismatch : Error {
  using Error::Error;
};
struct NonFiniteActivation : Error {
  using Error::Error;
};
struct NonFiniteGradient : Error {
  using Error::Error;
};
struct DatasetEmpty : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};
struct FormatVersionMismatch : Error {
  using Error::Error;
};
struct InvalidSpec : Error {
  using Error::Error;
};
struct LengthMismatch : Error {
  using Error::Error;
};
struct NonFiniteState : Error {
  using Error::Error;
};

}  // namespace figsim
