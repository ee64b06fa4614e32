#pragma once

#include <string>
#include <vector>

#include "ecgl/diagnostics.hpp"
#include "ecgl/field.hpp"
#include "ecgl/ground_state.hpp"
#include "ecgl/integrator.hpp"

namespace ecgl {

enum class ExperimentKind {
    DichotomySweep,
    InviscidLimit,
    DecayStudy,
    WeakStrongGronwall,
    TrappingCheck
};

enum class InitialFamily { TruncatedW, Gaussian, Ring };

struct FamilyParams {
    double sigma = 0.5;         // Gaussian / ring width
    double cutoff_radius = 1.2; // truncated W
    double taper_width = 0.6;
    double ring_radius = 1.0;
};

struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::DichotomySweep;
    InitialFamily family = InitialFamily::Gaussian;
    FamilyParams fparams;
    std::vector<double> amplitudes{1.0};
    std::vector<double> thetas{0.7853981633974483}; // pi/4
    unsigned long long seed = 12345;
    double epsilon = 1e-6;   // Gronwall perturbation size
    double final_time = 0.5; // inviscid / Gronwall horizon
    std::vector<int> m_list{2, 3, 4, 5, 6}; // inviscid: theta_m = pi/2 - 2^-m
};

/// a * profile on the grid; Gaussian is a e^{-|x|^2/(2 sigma^2)}, the ring is
/// a cylindrically symmetric (hence non-radial) shell.
ComplexField make_initial(InitialFamily family, const FamilyParams& params,
                          double amplitude, std::shared_ptr<const Grid> grid);

/// Seeded band-limited noise with unit H^1 norm, used for perturbations.
ComplexField smooth_noise(std::shared_ptr<const Grid> grid, unsigned long long seed);

struct SweepCell {
    double amplitude = 0.0;
    double theta = 0.0;
    double energy0 = 0.0;
    double kinetic0 = 0.0;
    double energy0_over_ew = 0.0;
    double kinetic0_over_kw = 0.0;
    bool classifiable = false; // E(u0) < E(W) on the grid quadrature
    bool subcritical = false;  // kinetic(u0) < ||grad W||^2
    bool trusted = false;      // initial boundary-mass and spectral-tail clean
    RunStatus outcome = RunStatus::Running;
    double t_event = 0.0;
    double measured_delta_bar = 0.0;
    double measured_delta_3 = 0.0;
    double i_second_min = 0.0; // min of -Re z K over records (supercritical)
    bool trapping_ok = false;
    bool consistent = false; // outcome matches the dichotomy (trusted cells)
    std::vector<DiagnosticsRecord> records;
};

struct SweepResult {
    std::vector<SweepCell> cells;
    bool all_consistent = false;
};

SweepResult run_dichotomy_sweep(const ExperimentSpec& spec,
                                std::shared_ptr<const Grid> grid,
                                const StepperConfig& stepper, const GroundStateRefs& refs,
                                int jobs = 1, int record_cadence = 10);

struct InviscidRow {
    int m = 0;
    double theta = 0.0;
    double cos_theta = 0.0;
    double err_l2 = 0.0;
    double err_h1 = 0.0;
    double energy_final = 0.0;
};

struct InviscidResult {
    std::vector<InviscidRow> rows;
    double energy0 = 0.0;
    double energy_nls_final = 0.0;
    double defect_bound = 0.0; // max_t Re z_6 ||Lap v + f(v)|| * T along the reference
    bool monotone_last3 = false;
};

InviscidResult run_inviscid_limit(const ExperimentSpec& spec,
                                  std::shared_ptr<const Grid> grid,
                                  const StepperConfig& stepper,
                                  const GroundStateRefs& refs, int record_cadence = 10);

struct DecayResult {
    RunStatus status = RunStatus::Running;
    double t_event = 0.0;
    double final_h1 = 0.0;
    double fitted_rate = 0.0; // late-time exponential rate of the H^1-dot norm
    double s_total = 0.0;
    double s_final_quarter_fraction = 0.0;
    bool h1_below_threshold = false;
    std::vector<DiagnosticsRecord> records;
};

DecayResult run_decay_study(const ExperimentSpec& spec, std::shared_ptr<const Grid> grid,
                            const StepperConfig& stepper, const GroundStateRefs& refs,
                            int record_cadence = 10);

struct GronwallResult {
    double w0_h1_sq = 0.0;
    double w_final_h1 = 0.0;      // epsilon perturbation
    double w_final_h1_2eps = 0.0; // doubled perturbation
    double w_final_h1_zero = 0.0; // identical data
    double c_hat = 0.0;           // fitted exponential constant
    bool ratio_bounded = false;   // ratio <= e^{c_hat t} along the run
    std::vector<double> t_series;
    std::vector<double> ratio_series; // ||w(t)||^2_H1 / ||w(0)||^2_H1
};

GronwallResult run_weak_strong_gronwall(const ExperimentSpec& spec,
                                        std::shared_ptr<const Grid> grid,
                                        const StepperConfig& stepper,
                                        const GroundStateRefs& refs,
                                        int record_cadence = 10);

} // namespace ecgl
