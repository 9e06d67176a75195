#ifndef PFT_ERRORS_HPP
#define PFT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pft {

// Base class for all recoverable tracker errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& msg) : Error(msg) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& msg) : Error(msg) {}
};

class BehindCamera : public Error {
 public:
  BehindCamera() : Error("point is behind the camera") {}
};

class NonPositiveDepth : public Error {
 public:
  NonPositiveDepth() : Error("depth must be positive") {}
};

class DegenerateMesh : public Error {
 public:
  explicit DegenerateMesh(const std::string& msg) : Error(msg) {}
};

class InsufficientCoverage : public Error {
 public:
  explicit InsufficientCoverage(const std::string& msg) : Error(msg) {}
};

class OutOfRoi : public Error {
 public:
  OutOfRoi() : Error("sample point outside the region of interest") {}
};

class InvalidCorrespondence : public Error {
 public:
  InvalidCorrespondence() : Error("correspondence is not valid") {}
};

class NonPositiveWeight : public Error {
 public:
  NonPositiveWeight() : Error("mixture weights must be positive") {}
};

class RoiTooSmall : public Error {
 public:
  explicit RoiTooSmall(const std::string& msg) : Error(msg) {}
};

class PatchOutOfBounds : public Error {
 public:
  PatchOutOfBounds() : Error("patch extends outside the region of interest") {}
};

class SingularSystem : public Error {
 public:
  SingularSystem() : Error("normal equations are singular") {}
};

class LostTrack : public Error {
 public:
  explicit LostTrack(const std::string& msg) : Error(msg) {}
};

class ObjectOutOfView : public Error {
 public:
  ObjectOutOfView() : Error("object does not project inside the image") {}
};

class EmptyRegion : public Error {
 public:
  explicit EmptyRegion(const std::string& msg) : Error(msg) {}
};

class MissingGroundTruth : public Error {
 public:
  MissingGroundTruth() : Error("sequence has no ground-truth poses") {}
};

class MissingFrames : public Error {
 public:
  explicit MissingFrames(const std::string& msg) : Error(msg) {}
};

class MalformedPoseLine : public ParseError {
 public:
  MalformedPoseLine(const std::string& path, int line)
      : ParseError(path + ":" + std::to_string(line) +
                   ": malformed pose line"),
        line_number(line) {}
  int line_number;
};

}  // namespace pft

#endif  // PFT_ERRORS_HPP
