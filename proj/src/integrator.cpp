#include "ecgl/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ecgl/diagnostics.hpp"
#include "ecgl/spectral.hpp"

namespace ecgl {

const char* to_string(RunStatus s) {
    switch (s) {
        case RunStatus::Running: return "Running";
        case RunStatus::Decayed: return "Decayed";
        case RunStatus::BlownUp: return "BlownUp";
        case RunStatus::MaxTimeReached: return "MaxTimeReached";
        case RunStatus::StepFailure: return "StepFailure";
    }
    return "?";
}

ComplexField nonlinear_substep(const ComplexField& u, const ZParameter& z, double dt) {
    if (u.space != Space::physical)
        throw std::invalid_argument("nonlinear_substep: physical-space field required");
    const int d = u.grid->dim();
    const double q = 4.0 / (d - 2);
    const double re = z.re(), im = z.im();

    if (re > 0.0) {
        // Singularity check on the largest sample first; denom is monotone in r0.
        double max_nsq = 0.0;
        for (const auto& v : u.values) max_nsq = std::max(max_nsq, std::norm(v));
        const double max_r0q = std::pow(max_nsq, q / 2.0);
        if (max_r0q > 0.0 && 1.0 - q * re * max_r0q * dt <= 0.0)
            throw BlowUpInSubstep(1.0 / (q * re * max_r0q));
    }

    ComplexField out = u;
    if (re == 0.0) {
        // NLS limit: pure phase rotation, |u| pointwise invariant.
        for (auto& v : out.values) {
            const double nsq = std::norm(v);
            if (nsq == 0.0) continue;
            const double phase = im * std::pow(nsq, q / 2.0) * dt;
            v *= cplx{std::cos(phase), std::sin(phase)};
        }
    } else {
        const double im_over_re = im / re;
        for (auto& v : out.values) {
            const double nsq = std::norm(v);
            if (nsq == 0.0) continue;
            const double r0q = std::pow(nsq, q / 2.0);
            const double denom = 1.0 - q * re * r0q * dt;
            const double amp = std::pow(denom, -1.0 / q);
            const double phase = -(im_over_re / q) * std::log(denom);
            v *= amp * cplx{std::cos(phase), std::sin(phase)};
        }
    }
    return out;
}

void strang_step(RunState& state, const ZParameter& z, double dt, bool linear_only) {
    ComplexField u = state.u;
    to_spectral(u);
    apply_semigroup_spectral(u, z, linear_only ? dt : dt / 2.0);
    to_physical(u);
    if (!linear_only) {
        u = nonlinear_substep(u, z, dt); // may throw; state untouched then
        to_spectral(u);
        apply_semigroup_spectral(u, z, dt / 2.0);
        to_physical(u);
    }
    state.u = std::move(u);
    state.t += dt;
    state.step_index += 1;
}

RunState integrate(const ComplexField& u0, const ZParameter& z, const StepperConfig& cfg,
                   double grad_w_sq, const Observer& observer, int record_cadence) {
    cfg.validate();
    if (!u0.finite()) throw std::invalid_argument("integrate: initial datum is not finite");

    RunState state;
    state.u = u0;
    if (state.u.space == Space::spectral) to_physical(state.u);

    const double kin_threshold = cfg.blowup_kinetic_factor * grad_w_sq;
    const double decay_sq = cfg.decay_h1_threshold * cfg.decay_h1_threshold;
    const bool check_energy = cfg.adaptive && !z.is_nls() && !cfg.linear_only;

    if (observer) observer(state);
    if (grad_norm_sq(state.u) < decay_sq) {
        state.status = RunStatus::Decayed;
        state.t_event = 0.0;
        if (observer) observer(state);
        return state;
    }

    double cur_dt = cfg.dt;
    int clean_steps = 0;
    double e_prev = check_energy ? energy(state.u) : 0.0;

    while (state.status == RunStatus::Running) {
        if (state.t >= cfg.max_time - 1e-12 * cfg.max_time) {
            state.status = RunStatus::MaxTimeReached;
            state.t_event = state.t;
            break;
        }
        const double dt_step = std::min(cur_dt, cfg.max_time - state.t);

        RunState trial = state;
        bool singular = false;
        try {
            strang_step(trial, z, dt_step, cfg.linear_only);
        } catch (const BlowUpInSubstep&) {
            singular = true;
        }
        if (singular) {
            if (cur_dt / 2.0 >= cfg.dt_min) {
                cur_dt /= 2.0;
                clean_steps = 0;
                continue;
            }
            state.status = RunStatus::BlownUp;
            state.t_event = state.t;
            break;
        }
        if (!trial.u.finite()) {
            state = std::move(trial);
            state.status = RunStatus::StepFailure;
            state.t_event = state.t;
            break;
        }
        double e_new = 0.0;
        if (check_energy) {
            e_new = energy(trial.u);
            if (e_new - e_prev > cfg.energy_increase_tol * std::abs(e_prev) &&
                cur_dt / 2.0 >= cfg.dt_min) {
                cur_dt /= 2.0;
                clean_steps = 0;
                continue;
            }
        }

        state = std::move(trial);
        e_prev = e_new;
        if (++clean_steps >= 50 && cur_dt * 2.0 <= cfg.dt) {
            cur_dt *= 2.0;
            clean_steps = 0;
        }

        if (sup_abs(state.u) > cfg.blowup_sup_threshold) {
            state.status = RunStatus::BlownUp;
            state.t_event = state.t;
            break;
        }
        if (state.step_index % cfg.event_check_cadence == 0) {
            const double kin = grad_norm_sq(state.u);
            if (kin > kin_threshold) {
                state.status = RunStatus::BlownUp;
                state.t_event = state.t;
                break;
            }
            if (kin < decay_sq) {
                state.status = RunStatus::Decayed;
                state.t_event = state.t;
                break;
            }
        }
        if (observer && state.step_index % record_cadence == 0) observer(state);
    }

    if (observer) observer(state);
    return state;
}

BlowupFit detect_blowup_time(const std::vector<double>& times,
                             const std::vector<double>& mass_history) {
    if (times.size() != mass_history.size())
        throw std::invalid_argument("detect_blowup_time: series length mismatch");
    const std::size_t n = times.size();
    if (n < 10) throw std::invalid_argument("detect_blowup_time: need at least 10 samples");

    // Centered log-derivative g = d log(mass)/dt on interior points.
    std::vector<double> tc, g, dm;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double dt2 = times[i + 1] - times[i - 1];
        if (dt2 <= 0.0 || mass_history[i - 1] <= 0.0 || mass_history[i + 1] <= 0.0) continue;
        tc.push_back(times[i]);
        g.push_back((std::log(mass_history[i + 1]) - std::log(mass_history[i - 1])) / dt2);
        dm.push_back((mass_history[i + 1] - mass_history[i - 1]) / dt2);
    }

    BlowupFit fit;
    if (tc.size() < 5) return fit;
    const std::size_t tail = std::max<std::size_t>(5, tc.size() / 3);
    const std::size_t start = tc.size() - tail;

    double gmax = 0.0;
    for (std::size_t i = start; i < tc.size(); ++i) gmax = std::max(gmax, g[i]);
    if (gmax <= 1e-10) return fit; // flat or decaying history: no singularity

    // For mass ~ (t*-t)^{-p}: 1/g = (t* - t)/p, linear in t.  Fit and find
    // the zero crossing.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t cnt = 0;
    double i2min = std::numeric_limits<double>::infinity();
    for (std::size_t i = start; i < tc.size(); ++i) {
        if (g[i] <= 0.0) continue;
        const double y = 1.0 / g[i];
        sx += tc[i];
        sy += y;
        sxx += tc[i] * tc[i];
        sxy += tc[i] * y;
        ++cnt;
        i2min = std::min(i2min, dm[i] / 2.0);
    }
    if (cnt < 5) return fit;
    const double det = cnt * sxx - sx * sx;
    if (det == 0.0) return fit;
    const double b = (cnt * sxy - sx * sy) / det;
    const double a = (sy * sxx - sx * sxy) / det;
    if (b >= 0.0) return fit; // growth not accelerating toward a singularity

    fit.detected = true;
    fit.t_estimate = -a / b;
    fit.exponent = -1.0 / b;
    fit.i_second_min = i2min;
    return fit;
}

} // namespace ecgl
