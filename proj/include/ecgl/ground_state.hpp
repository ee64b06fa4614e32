#pragma once

#include "ecgl/field.hpp"

namespace ecgl {

/// Radial quadrature settings for the threshold integrals.
struct QuadratureParams {
    double rel_tol = 1e-12;
    int max_levels = 15;
};

/// Reference values of the stationary profile W: the kinetic threshold
/// ||grad W||^2 and the energy threshold E(W), with a record of how they
/// were obtained.
struct GroundStateRefs {
    int d = 3;
    double grad_norm_sq_W = 0.0;
    double energy_W = 0.0;
    double potential_W = 0.0; // ||W||^{2d/(d-2)} in L^{2d/(d-2)}, equals grad_norm_sq_W
    double quadrature_error = 0.0;
    int quadrature_levels = 0;
};

/// W(x) = (1 + |x|^2 / (d(d-2)))^{-(d-2)/2}, the radial stationary profile.
double eval_W(double radius_sq, int d);

/// dW/dr as a function of r (used by quadrature cross-checks).
double eval_W_radial_derivative(double r, int d);

/// Kinetic and energy thresholds by 1-D radial quadrature.  Throws if the
/// quadrature does not converge to params.rel_tol, or if the computed values
/// violate the Pohozaev relation E(W) = ||grad W||^2 / d beyond 1e-8.
GroundStateRefs compute_thresholds(int d, const QuadratureParams& params = {});

/// W sampled on the grid, kept exact for |x| <= cutoff_radius and brought to
/// zero by |x| >= cutoff_radius + taper_width with a C^1 smoothstep.
/// Requires cutoff_radius + taper_width < grid.half_length().
ComplexField truncated_W(std::shared_ptr<const Grid> grid, double cutoff_radius,
                         double taper_width);

/// The smoothstep taper factor in [0,1] at radius r.
double taper_factor(double r, double cutoff_radius, double taper_width);

/// L^2 norm of Laplacian(W) + |W|^{4/(d-2)} W for box-sampled, untapered W,
/// evaluated spectrally.  Reports how far the sampled profile is from being
/// stationary at the given resolution.
double stationarity_residual(std::shared_ptr<const Grid> grid);

} // namespace ecgl
