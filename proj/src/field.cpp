#include "ecgl/field.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ecgl {

bool ComplexField::finite() const {
    for (const auto& v : values)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

ZParameter::ZParameter(double theta) : theta_(theta) {
    const double half_pi = std::numbers::pi / 2.0;
    if (!(theta > 0.0) || theta > half_pi + 1e-12)
        throw std::invalid_argument("ZParameter: theta must lie in (0, pi/2]");
    // Snap to the exact NLS limit so Re z = 0 holds without rounding fuzz.
    if (std::abs(theta - half_pi) < 1e-12) {
        theta_ = half_pi;
        re_ = 0.0;
        im_ = 1.0;
    } else {
        re_ = std::cos(theta_);
        im_ = std::sin(theta_);
    }
}

} // namespace ecgl
