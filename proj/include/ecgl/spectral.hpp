#pragma once

#include "ecgl/field.hpp"

namespace ecgl {

/// Unitary discrete Fourier transform (both directions scale by N^{-1/2},
/// so Parseval holds with the same quadrature weight h^d on both sides).
ComplexField dft(const ComplexField& f);
ComplexField idft(const ComplexField& f);

/// In-place variants used by the stepping loop.
void to_spectral(ComplexField& f);
void to_physical(ComplexField& f);

/// Exact linear flow e^{t z Laplacian}: spectral multiplier e^{-t z |k|^2}.
/// Requires t >= 0; the multiplier has magnitude <= 1 whenever Re z >= 0.
/// The returned field is in the same space as the input.
ComplexField apply_semigroup(const ComplexField& f, const ZParameter& z, double t);

/// Multiplier applied in place to a spectral-space field.
void apply_semigroup_spectral(ComplexField& fhat, const ZParameter& z, double t);

/// ||grad f||_{L^2}^2 = sum |k|^2 |fhat(k)|^2 h^d.
double grad_norm_sq(const ComplexField& f);

/// L^p norm (sum |f|^p h^d)^{1/p} over the box.
double lebesgue_norm(const ComplexField& f, double p);

/// ||f||_{L^2}^2 (the mass when f is the solution field).
double mass(const ComplexField& f);

double sup_abs(const ComplexField& f);

/// L^2 inner product <f, g> = sum f conj(g) h^d (same space required).
cplx inner_l2(const ComplexField& f, const ComplexField& g);

/// Fraction of ||f||^2 carried by points in the outer 10% shell of the box
/// (any coordinate with |x_j| >= 0.9 L).  Flags data that feel the boundary.
double boundary_mass_fraction(const ComplexField& f);

/// Fraction of ||f||^2 in modes with any axis index |m| >= n/3 (the region
/// a 2/3-rule dealiasing would discard).  Flags under-resolved fields.
double spectral_tail_fraction(const ComplexField& f);

} // namespace ecgl
