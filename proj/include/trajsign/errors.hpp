#pragma once

#include <stdexcept>
#include <string>

namespace trajsign {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// imaging
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};
class NoHandDetected : public Error {
 public:
  using Error::Error;
};
class SeedOutOfBounds : public Error {
 public:
  using Error::Error;
};
class SeedMismatch : public Error {
 public:
  using Error::Error;
};
class EmptyRegion : public Error {
 public:
  using Error::Error;
};
class TrackingLost : public Error {
 public:
  using Error::Error;
};

// features
class EmptyTrajectory : public Error {
 public:
  using Error::Error;
};
class TooShort : public Error {
 public:
  using Error::Error;
};

// gmm / hmm
class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};
class EmptySequence : public Error {
 public:
  using Error::Error;
};
class TrainingDiverged : public Error {
 public:
  using Error::Error;
};

// classify / datagen / io
class InsufficientSamples : public Error {
 public:
  using Error::Error;
};
class InsufficientSubjects : public Error {
 public:
  using Error::Error;
};
class IoError : public Error {
 public:
  using Error::Error;
};
class CurveOutOfBounds : public Error {
 public:
  using Error::Error;
};

}  // namespace trajsign
