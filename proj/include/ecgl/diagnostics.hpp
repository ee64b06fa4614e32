#pragma once

#include <optional>
#include <vector>

#include "ecgl/field.hpp"
#include "ecgl/ground_state.hpp"

namespace ecgl {

/// E(u) = 1/2 ||grad u||^2 - (d-2)/(2d) ||u||^{2d/(d-2)}_{L^{2d/(d-2)}}.
double energy(const ComplexField& u);

/// K(u) = ||grad u||^2 - ||u||^{2d/(d-2)}_{L^{2d/(d-2)}}.
double k_functional(const ComplexField& u);

/// ||u||^p_{L^p} with p = 2d/(d-2) (the potential term).
double potential_power(const ComplexField& u);

/// Space integrand of the S-norm, ||u||^{2(d+2)/(d-2)}_{L^{2(d+2)/(d-2)}}.
double s_norm_integrand(const ComplexField& u);

/// ||du/dt||^2 with du/dt read off the equation: z (Laplacian u + f(u)).
/// Since |z| = 1 this equals ||Laplacian u + f(u)||^2 for every theta.
double ut_norm_sq(const ComplexField& u);

struct BubbleFit {
    double lambda = 0.0;
    std::array<double, 4> center{0.0, 0.0, 0.0, 0.0};
    double correlation = 0.0;
};

struct DiagnosticsRecord {
    double t = 0.0;
    double mass = 0.0;
    double kinetic = 0.0;
    double potential = 0.0;
    double energy = 0.0;
    double k_functional = 0.0;
    double s_integrand = 0.0;
    double s_accumulator = 0.0;
    double sup_abs = 0.0;
    double boundary_mass_fraction = 0.0;
    std::optional<BubbleFit> bubble;
};

struct RecordOptions {
    bool with_bubble = false;
    const GroundStateRefs* refs = nullptr; // needed only for the bubble fit
};

/// Evaluate all trajectory functionals at time t.  The S-accumulator is
/// advanced from prev by the trapezoid rule.
DiagnosticsRecord record(const ComplexField& u, double t,
                         const DiagnosticsRecord* prev = nullptr,
                         const RecordOptions& opts = {});

/// Residual of the energy dissipation identity
/// E(u(0)) = E(u(t)) + Re z int_0^t ||u_tau||^2, one entry per record,
/// relative to |E(u(0))|.  ut_norms must align with records.
std::vector<double> dissipation_residual(const std::vector<DiagnosticsRecord>& records,
                                         const std::vector<double>& ut_norms, double re_z);

/// Residual of d/dt ||u||^2 = -2 Re z K(u) by centered differencing of the
/// mass; entries correspond to interior records (size N-2).
std::vector<double> mass_identity_residual(const std::vector<DiagnosticsRecord>& records,
                                           double re_z);

struct VirialSeries {
    std::vector<double> t;
    std::vector<double> I;        // 1/2 int_0^t mass
    std::vector<double> I_prime;  // mass/2
    std::vector<double> I_second; // -Re z K(u)
    std::vector<double> concavity_ratio; // I I'' / (I' - I'(0))^2 where defined
};

VirialSeries virial_series(const std::vector<DiagnosticsRecord>& records, double re_z);

/// Modulation fit: search (lambda, x0) maximizing the normalized H^1-dot
/// correlation |<grad u, grad W_{x0,lambda}>| / (||grad u|| ||grad W_lambda||).
/// Lambda is scanned over a log-spaced lattice in [h, L/4] and refined by
/// golden section; x0 over the grid via FFT cross-correlation.
/// Returns nullopt for a degenerate field (kinetic ~ 0).
std::optional<BubbleFit> bubble_fit(const ComplexField& u);

enum class TrappingSide { Subcritical, Supercritical };

struct TrappingReport {
    TrappingSide side = TrappingSide::Subcritical;
    bool all_assertions_hold = false;
    // subcritical branch
    double min_margin_kinetic = 0.0; // min over t of 1 - kinetic/||grad W||^2
    double min_margin_K = 0.0;       // min over t of K/kinetic
    bool energy_nonneg = false;
    double measured_delta_bar = 0.0;
    // supercritical branch
    double measured_delta_3 = 0.0; // min over t of -K
};

/// Check the energy-trapping inequalities along a recorded trajectory.
/// The initial record must satisfy E < E(W) and lie strictly on one side of
/// the kinetic threshold; otherwise throws naming the violated inequality.
TrappingReport trapping_report(const std::vector<DiagnosticsRecord>& records,
                               const GroundStateRefs& refs);

} // namespace ecgl
