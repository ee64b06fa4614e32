#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ecgl/field.hpp"

namespace ecgl {

struct StepperConfig {
    double dt = 1e-3;
    double dt_min = 1e-9;
    double blowup_sup_threshold = 1e6;
    double blowup_kinetic_factor = 25.0; // multiple of ||grad W||^2
    double decay_h1_threshold = 1e-6;
    double max_time = 20.0;
    bool adaptive = true;
    double energy_increase_tol = 1e-8; // relative, per step, GL regime only
    bool linear_only = false;          // diagnostic switch: drop the nonlinearity
    int event_check_cadence = 1;       // steps between kinetic-threshold checks

    void validate() const {
        if (!(dt > dt_min) || !(dt_min > 0.0))
            throw std::invalid_argument("StepperConfig: need dt > dt_min > 0");
        if (!(blowup_sup_threshold > 0.0) || !(blowup_kinetic_factor > 0.0) ||
            !(decay_h1_threshold > 0.0) || !(max_time > 0.0))
            throw std::invalid_argument("StepperConfig: thresholds must be positive");
    }
};

enum class RunStatus { Running, Decayed, BlownUp, MaxTimeReached, StepFailure };

const char* to_string(RunStatus s);

struct RunState {
    double t = 0.0;
    ComplexField u;
    long step_index = 0;
    RunStatus status = RunStatus::Running;
    double t_event = 0.0; // blow-up estimate / decay time once terminal
};

/// Raised when the pointwise nonlinear flow hits its singularity within dt.
struct BlowUpInSubstep : std::runtime_error {
    double t_star;
    explicit BlowUpInSubstep(double ts)
        : std::runtime_error("nonlinear substep singular before dt, t* = " +
                             std::to_string(ts)),
          t_star(ts) {}
};

/// Exact pointwise flow of u' = z |u|^q u over dt, q = 4/(d-2).
/// Modulus: r(dt) = r0 (1 - q Re z r0^q dt)^{-1/q}; phase advances by
/// (Im z / Re z) ln(r/r0), or Im z r0^q dt in the NLS limit Re z = 0.
/// Throws BlowUpInSubstep if dt reaches the singular time at any sample.
ComplexField nonlinear_substep(const ComplexField& u, const ZParameter& z, double dt);

/// One Strang step: semigroup(dt/2) then nonlinear(dt) then semigroup(dt/2).
/// Second order in dt; exactly L^2-isometric in the NLS limit.
/// Propagates BlowUpInSubstep to the caller (integrate handles halving).
void strang_step(RunState& state, const ZParameter& z, double dt,
                 bool linear_only = false);

using Observer = std::function<void(const RunState&)>;

/// Step until a terminal status is reached.  The observer (if any) fires on
/// the initial state, every record_cadence steps, and on the terminal state.
/// grad_w_sq is ||grad W||^2 for the kinetic blow-up threshold.
RunState integrate(const ComplexField& u0, const ZParameter& z, const StepperConfig& cfg,
                   double grad_w_sq, const Observer& observer = {},
                   int record_cadence = 1);

struct BlowupFit {
    bool detected = false;
    double t_estimate = 0.0;
    double exponent = 0.0;     // fitted p in mass ~ (t*-t)^{-p}
    double i_second_min = 0.0; // empirical lower bound on I'' over the tail
};

/// Concavity-based extrapolation of the blow-up time from a mass history
/// ||u(t)||^2.  Fits the singular exponent on the tail and extrapolates the
/// zero of 1/(d log mass / dt).  Requires at least 10 samples.
BlowupFit detect_blowup_time(const std::vector<double>& times,
                             const std::vector<double>& mass_history);

} // namespace ecgl
