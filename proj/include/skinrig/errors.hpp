#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace skinrig {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define SKINRIG_DEFINE_ERROR(Name)          \
  class Name : public Error {               \
   public:                                  \
    using Error::Error;                     \
  }

// geometry
SKINRIG_DEFINE_ERROR(InvalidSurfaceError);
SKINRIG_DEFINE_ERROR(MeshFormatError);
SKINRIG_DEFINE_ERROR(OpenSectionError);
SKINRIG_DEFINE_ERROR(DegenerateMeshError);
SKINRIG_DEFINE_ERROR(RadiusTooLargeError);

// kinematics
SKINRIG_DEFINE_ERROR(LinkIndexError);
SKINRIG_DEFINE_ERROR(ChainFormatError);

// planning and simulation
SKINRIG_DEFINE_ERROR(AngleInfeasibleError);
SKINRIG_DEFINE_ERROR(PlanExecutionError);
SKINRIG_DEFINE_ERROR(FormatVersionError);
SKINRIG_DEFINE_ERROR(ChecksumError);
SKINRIG_DEFINE_ERROR(DatasetFormatError);

// calibration
SKINRIG_DEFINE_ERROR(EmptyClassError);
SKINRIG_DEFINE_ERROR(DegenerateFitError);
SKINRIG_DEFINE_ERROR(SplitTooSmallError);

// control
SKINRIG_DEFINE_ERROR(InfeasibleQPError);
SKINRIG_DEFINE_ERROR(FrameMismatchError);
SKINRIG_DEFINE_ERROR(TraceFormatError);
SKINRIG_DEFINE_ERROR(UncalibratedCellError);

// configuration
SKINRIG_DEFINE_ERROR(ConfigError);

#undef SKINRIG_DEFINE_ERROR

/// Raised when one or more skin cells never received a positive training label.
class CoverageError : public Error {
 public:
  CoverageError(const std::string& what, std::vector<int> uncovered)
      : Error(what), uncovered_(std::move(uncovered)) {}
  const std::vector<int>& uncovered() const noexcept { return uncovered_; }

 private:
  std::vector<int> uncovered_;
};

enum class DesignAxis { X, Y };

/// Raised when a layer cannot satisfy the stretch band on one axis.
class InfeasibleDesignError : public Error {
 public:
  InfeasibleDesignError(const std::string& what, std::string layer, DesignAxis axis)
      : Error(what), layer_(std::move(layer)), axis_(axis) {}
  const std::string& layer() const noexcept { return layer_; }
  DesignAxis axis() const noexcept { return axis_; }

 private:
  std::string layer_;
  DesignAxis axis_;
};

}  // namespace skinrig
