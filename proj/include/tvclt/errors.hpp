#pragma once

#include <stdexcept>
#include <string>

namespace tvclt {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// density exists but is not absolutely continuous (jump discontinuities)
struct NonSmoothDensity : Error { using Error::Error; };
// score requested where p(x) <= p_floor, or outside the usable grid region
struct ScoreUndefined : Error { using Error::Error; };
// adaptive quadrature exhausted its interval budget, or an integral
// exceeded a configured cap (e.g. Fisher information past j_max)
struct QuadratureDivergent : Error { using Error::Error; };
// operation needs a connected support interval
struct DisconnectedSupport : Error { using Error::Error; };
// requested grid extent clips more than the allowed mass
struct GridTooSmall : Error { using Error::Error; };
// negativity clip after convolution exceeded the allowed mass
struct RingingError : Error { using Error::Error; };
// two grid densities do not share a lattice
struct GridMismatch : Error { using Error::Error; };
// leave-one-out sum requested for n < 2
struct DegenerateSum : Error { using Error::Error; };

struct ParseError : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

}  // namespace tvclt
