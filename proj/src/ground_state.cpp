#include "ecgl/ground_state.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ecgl/spectral.hpp"

namespace ecgl {

double eval_W(double radius_sq, int d) {
    const double c = static_cast<double>(d) * (d - 2);
    const double base = 1.0 + radius_sq / c;
    return d == 3 ? 1.0 / std::sqrt(base) : 1.0 / base;
}

double eval_W_radial_derivative(double r, int d) {
    // W(r) = (1 + r^2/c)^{-(d-2)/2}, c = d(d-2)
    const double c = static_cast<double>(d) * (d - 2);
    const double base = 1.0 + r * r / c;
    return -(d - 2) * r / c * std::pow(base, -static_cast<double>(d) / 2.0);
}

namespace {

double surface_area(int d) {
    // |S^{d-1}|: 4 pi for d=3, 2 pi^2 for d=4
    const double pi = std::numbers::pi;
    return d == 3 ? 4.0 * pi : 2.0 * pi * pi;
}

} // namespace

GroundStateRefs compute_thresholds(int d, const QuadratureParams& params) {
    if (d != 3 && d != 4) throw std::invalid_argument("compute_thresholds: d must be 3 or 4");

    const double area = surface_area(d);
    const double c = static_cast<double>(d) * (d - 2);

    boost::math::quadrature::exp_sinh<double> integrator(params.max_levels);

    // exp_sinh probes astronomically large r; assemble the integrands from
    // r^2/base = 1/(1/r^2 + 1/c) and 1/base so no inf*0 can appear.
    auto kinetic_integrand = [&](double r) {
        const double r2_over_base = 1.0 / (1.0 / (r * r) + 1.0 / c);
        const double inv_base = 1.0 / (1.0 + r * r / c);
        const double common = area / (c * c) * r2_over_base * r2_over_base * inv_base;
        // |W'|^2 r^{d-1} = (d-2)^2/c^2 * r^4/base^3 * r^{d-3}
        return d == 3 ? common : 4.0 * common * r * inv_base;
    };
    auto potential_integrand = [&](double r) {
        const double r2_over_base = 1.0 / (1.0 / (r * r) + 1.0 / c);
        const double inv_base = 1.0 / (1.0 + r * r / c);
        const double common = area * r2_over_base * inv_base * inv_base;
        // base^{-d} r^{d-1}
        return d == 3 ? common : common * r * inv_base;
    };

    GroundStateRefs refs;
    refs.d = d;
    double err_k = 0.0, err_p = 0.0;
    double l1_k = 0.0, l1_p = 0.0;
    std::size_t levels_k = 0, levels_p = 0;
    refs.grad_norm_sq_W =
        integrator.integrate(kinetic_integrand, params.rel_tol, &err_k, &l1_k, &levels_k);
    refs.potential_W =
        integrator.integrate(potential_integrand, params.rel_tol, &err_p, &l1_p, &levels_p);
    refs.quadrature_error = std::max(err_k, err_p);
    refs.quadrature_levels = static_cast<int>(std::max(levels_k, levels_p));

    if (refs.quadrature_error > 1e-10)
        throw std::runtime_error("compute_thresholds: quadrature did not converge");

    refs.energy_W =
        0.5 * refs.grad_norm_sq_W - (d - 2) / (2.0 * d) * refs.potential_W;

    // Pohozaev: ||grad W||^2 = ||W||^{2d/(d-2)} forces E(W) = ||grad W||^2 / d.
    const double pohozaev = refs.grad_norm_sq_W / d;
    if (std::abs(refs.energy_W - pohozaev) > 1e-8 * std::abs(pohozaev))
        throw std::runtime_error("compute_thresholds: Pohozaev consistency violated");

    return refs;
}

double taper_factor(double r, double cutoff_radius, double taper_width) {
    if (r <= cutoff_radius) return 1.0;
    if (r >= cutoff_radius + taper_width) return 0.0;
    const double s = (cutoff_radius + taper_width - r) / taper_width;
    return s * s * (3.0 - 2.0 * s);
}

ComplexField truncated_W(std::shared_ptr<const Grid> grid, double cutoff_radius,
                         double taper_width) {
    if (!(cutoff_radius > 0.0) || !(taper_width > 0.0))
        throw std::invalid_argument("truncated_W: cutoff and taper must be positive");
    if (cutoff_radius + taper_width >= grid->half_length())
        throw std::invalid_argument("truncated_W: cutoff_radius + taper_width must be < L");

    ComplexField f(grid, Space::physical);
    const int d = grid->dim();
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        const double r2 = grid->radius_sq(i);
        const double r = std::sqrt(r2);
        const double tap = taper_factor(r, cutoff_radius, taper_width);
        f.values[i] = tap > 0.0 ? cplx{eval_W(r2, d) * tap, 0.0} : cplx{0.0, 0.0};
    }
    return f;
}

double stationarity_residual(std::shared_ptr<const Grid> grid) {
    const int d = grid->dim();
    const double q = 4.0 / (d - 2);
    ComplexField w(grid, Space::physical);
    for (std::size_t i = 0; i < w.values.size(); ++i)
        w.values[i] = cplx{eval_W(grid->radius_sq(i), d), 0.0};

    ComplexField lap = dft(w);
    const auto& ksq = grid->k_sq_table();
    for (std::size_t i = 0; i < lap.values.size(); ++i) lap.values[i] *= -ksq[i];
    to_physical(lap);

    double s = 0.0;
    for (std::size_t i = 0; i < w.values.size(); ++i) {
        const double a = std::abs(w.values[i]);
        const cplx resid = lap.values[i] + std::pow(a, q) * w.values[i];
        s += std::norm(resid);
    }
    return std::sqrt(s * grid->cell_volume());
}

} // namespace ecgl
