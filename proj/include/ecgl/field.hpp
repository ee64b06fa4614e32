#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "ecgl/grid.hpp"

namespace ecgl {

using cplx = std::complex<double>;

enum class Space { physical, spectral };

/// Complex samples on a Grid, either as point values (physical) or as
/// unitary-normalized DFT coefficients (spectral).
struct ComplexField {
    std::shared_ptr<const Grid> grid;
    Space space = Space::physical;
    std::vector<cplx> values;

    ComplexField() = default;
    ComplexField(std::shared_ptr<const Grid> g, Space s = Space::physical)
        : grid(std::move(g)), space(s), values(grid->size(), cplx{0.0, 0.0}) {}

    bool finite() const;
};

/// The unit-modulus coefficient z = e^{i theta}, theta in (0, pi/2].
///
/// theta = pi/2 is the NLS limit (Re z = 0 exactly); smaller theta gives the
/// dissipative Ginzburg-Landau regime.  Stored as the angle so |z| = 1 holds
/// by construction.
class ZParameter {
public:
    explicit ZParameter(double theta);

    double theta() const { return theta_; }
    double re() const { return re_; }
    double im() const { return im_; }
    cplx z() const { return {re_, im_}; }
    bool is_nls() const { return re_ == 0.0; }

private:
    double theta_;
    double re_;
    double im_;
};

} // namespace ecgl
