#pragma once

#include <stdexcept>
#include <string>

namespace abscat {

// Base for all library errors. `numerical()` distinguishes tolerance failures
// (CLI exit code 3) from bad input (exit code 2).
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg, bool numerical = false)
        : std::runtime_error(msg), numerical_(numerical) {}
    bool numerical() const { return numerical_; }

private:
    bool numerical_;
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& m) : Error("config: " + m) {}
};

struct NoIntersection : Error {
    explicit NoIntersection(const std::string& m) : Error("no intersection: " + m) {}
};

struct CurvesTooClose : Error {
    explicit CurvesTooClose(const std::string& m) : Error("curves too close: " + m, true) {}
};

struct NonIntegerLink : Error {
    explicit NonIntegerLink(const std::string& m) : Error("non-integer linking value: " + m, true) {}
};

struct UnsupportedTopology : Error {
    explicit UnsupportedTopology(const std::string& m) : Error("unsupported topology: " + m) {}
};

struct OnCurve : Error {
    explicit OnCurve(const std::string& m) : Error("evaluation point on source curve: " + m) {}
};

struct RayBlocked : Error {
    explicit RayBlocked(const std::string& m) : Error("ray meets the obstacle: " + m) {}
};

struct TailBoundUnavailable : Error {
    explicit TailBoundUnavailable(const std::string& m) : Error("no decay data for tail bound: " + m) {}
};

struct QuadratureFailure : Error {
    explicit QuadratureFailure(const std::string& m) : Error("quadrature did not converge: " + m, true) {}
};

struct SupportOverlapsObstacle : Error {
    explicit SupportOverlapsObstacle(const std::string& m) : Error("support overlaps obstacle: " + m) {}
};

struct SupportTouchesObstacle : Error {
    explicit SupportTouchesObstacle(const std::string& m) : Error("packet support touches obstacle: " + m) {}
};

struct GridMismatch : Error {
    explicit GridMismatch(const std::string& m) : Error("grid mismatch: " + m) {}
};

struct GridTooCoarse : Error {
    explicit GridTooCoarse(const std::string& m) : Error("grid too coarse: " + m, true) {}
};

struct DegenerateFrame : Error {
    explicit DegenerateFrame(const std::string& m) : Error("degenerate plane frame: " + m) {}
};

struct EmptyPart : Error {
    explicit EmptyPart(const std::string& m) : Error("packet part has no mass: " + m) {}
};

struct ResolutionInsufficient : Error {
    explicit ResolutionInsufficient(const std::string& m) : Error("resolution insufficient: " + m, true) {}
};

} // namespace abscat
