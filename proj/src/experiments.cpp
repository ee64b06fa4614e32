#include "ecgl/experiments.hpp"

#include <atomic>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <thread>

#include "ecgl/spectral.hpp"

namespace ecgl {

ComplexField make_initial(InitialFamily family, const FamilyParams& params,
                          double amplitude, std::shared_ptr<const Grid> grid) {
    switch (family) {
        case InitialFamily::TruncatedW: {
            ComplexField f = truncated_W(grid, params.cutoff_radius, params.taper_width);
            for (auto& v : f.values) v *= amplitude;
            return f;
        }
        case InitialFamily::Gaussian: {
            ComplexField f(grid, Space::physical);
            const double two_s2 = 2.0 * params.sigma * params.sigma;
            for (std::size_t i = 0; i < f.values.size(); ++i)
                f.values[i] = cplx{amplitude * std::exp(-grid->radius_sq(i) / two_s2), 0.0};
            return f;
        }
        case InitialFamily::Ring: {
            // Shell in the first two axes, Gaussian in the rest: non-radial.
            ComplexField f(grid, Space::physical);
            const double two_s2 = 2.0 * params.sigma * params.sigma;
            for (std::size_t i = 0; i < f.values.size(); ++i) {
                const auto idx = grid->unpack(i);
                const double x0 = grid->coord(idx[0]);
                const double x1 = grid->coord(idx[1]);
                const double rho = std::sqrt(x0 * x0 + x1 * x1);
                double rest = 0.0;
                for (int a = 2; a < grid->dim(); ++a) {
                    const double x = grid->coord(idx[a]);
                    rest += x * x;
                }
                const double dr = rho - params.ring_radius;
                f.values[i] = cplx{amplitude * std::exp(-(dr * dr + rest) / two_s2), 0.0};
            }
            return f;
        }
    }
    throw std::invalid_argument("make_initial: unknown family");
}

ComplexField smooth_noise(std::shared_ptr<const Grid> grid, unsigned long long seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int n = grid->n_per_axis();
    const int band = 4;

    ComplexField f(grid, Space::spectral);
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        const auto idx = grid->unpack(i);
        double msq = 0.0;
        bool in_band = true;
        for (int a = 0; a < grid->dim(); ++a) {
            const int m = idx[a] < n / 2 ? idx[a] : idx[a] - n;
            if (std::abs(m) > band) in_band = false;
            msq += static_cast<double>(m) * m;
        }
        if (!in_band) continue;
        const double env = std::exp(-msq / 8.0);
        f.values[i] = env * cplx{gauss(rng), gauss(rng)};
    }
    to_physical(f);
    const double h1 = std::sqrt(mass(f) + grad_norm_sq(f));
    if (h1 > 0.0)
        for (auto& v : f.values) v /= h1;
    return f;
}

namespace {

// Collects diagnostics records through the integrate observer, skipping
// duplicate times (integrate fires the observer once more on the terminal
// state, which may coincide with the last cadence record).
struct Recorder {
    std::vector<DiagnosticsRecord> records;
    void operator()(const RunState& s) {
        if (!s.u.finite()) return;
        if (!records.empty() && s.t <= records.back().t) return;
        const DiagnosticsRecord* prev = records.empty() ? nullptr : &records.back();
        records.push_back(record(s.u, s.t, prev));
    }
};

void run_pool(std::size_t n_items, int jobs, const std::function<void(std::size_t)>& work) {
    if (jobs <= 1) {
        for (std::size_t i = 0; i < n_items; ++i) work(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const int n_threads = std::min<std::size_t>(jobs, n_items);
    for (int t = 0; t < n_threads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n_items) break;
                work(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace

SweepResult run_dichotomy_sweep(const ExperimentSpec& spec,
                                std::shared_ptr<const Grid> grid,
                                const StepperConfig& stepper, const GroundStateRefs& refs,
                                int jobs, int record_cadence) {
    if (spec.amplitudes.empty() || spec.thetas.empty())
        throw std::invalid_argument("run_dichotomy_sweep: empty amplitude or theta range");

    SweepResult result;
    result.cells.resize(spec.amplitudes.size() * spec.thetas.size());
    for (std::size_t ia = 0; ia < spec.amplitudes.size(); ++ia)
        for (std::size_t it = 0; it < spec.thetas.size(); ++it) {
            auto& c = result.cells[ia * spec.thetas.size() + it];
            c.amplitude = spec.amplitudes[ia];
            c.theta = spec.thetas[it];
        }

    run_pool(result.cells.size(), jobs, [&](std::size_t i) {
        SweepCell& cell = result.cells[i];
        const ZParameter z(cell.theta);
        ComplexField u0 = make_initial(spec.family, spec.fparams, cell.amplitude, grid);

        cell.kinetic0 = grad_norm_sq(u0);
        cell.energy0 = energy(u0);
        cell.energy0_over_ew = cell.energy0 / refs.energy_W;
        cell.kinetic0_over_kw = cell.kinetic0 / refs.grad_norm_sq_W;
        cell.classifiable = cell.energy0 < refs.energy_W;
        cell.subcritical = cell.kinetic0 < refs.grad_norm_sq_W;
        cell.trusted = boundary_mass_fraction(u0) < 1e-6 && spectral_tail_fraction(u0) < 1e-6;

        Recorder rec;
        RunState final = integrate(u0, z, stepper, refs.grad_norm_sq_W, std::ref(rec),
                                   record_cadence);
        cell.outcome = final.status;
        cell.t_event = final.t_event;
        cell.records = std::move(rec.records);

        if (cell.classifiable && !cell.records.empty()) {
            try {
                const auto rep = trapping_report(cell.records, refs);
                cell.trapping_ok = rep.all_assertions_hold;
                cell.measured_delta_bar = rep.measured_delta_bar;
                cell.measured_delta_3 = rep.measured_delta_3;
                if (rep.side == TrappingSide::Supercritical) {
                    cell.i_second_min = z.re() * rep.measured_delta_3;
                }
            } catch (const std::invalid_argument&) {
                cell.trapping_ok = false;
            }
        }

        if (!cell.classifiable) {
            cell.consistent = true; // no claim made
        } else if (cell.subcritical) {
            cell.consistent = cell.outcome == RunStatus::Decayed;
        } else {
            cell.consistent = cell.outcome == RunStatus::BlownUp;
        }
    });

    result.all_consistent = true;
    for (const auto& c : result.cells)
        if (c.trusted && !c.consistent) result.all_consistent = false;
    return result;
}

InviscidResult run_inviscid_limit(const ExperimentSpec& spec,
                                  std::shared_ptr<const Grid> grid,
                                  const StepperConfig& stepper,
                                  const GroundStateRefs& refs, int record_cadence) {
    const double half_pi = std::numbers::pi / 2.0;
    ComplexField u0 = make_initial(spec.family, spec.fparams, spec.amplitudes.at(0), grid);

    StepperConfig cfg = stepper;
    cfg.max_time = spec.final_time;
    cfg.adaptive = false;

    // NLS reference at a quarter of the step, so its own time-discretization
    // error sits well below the GL runs'.
    StepperConfig ref_cfg = cfg;
    ref_cfg.dt = cfg.dt / 4.0;
    ref_cfg.dt_min = std::min(cfg.dt_min, ref_cfg.dt / 16.0);

    InviscidResult result;
    result.energy0 = energy(u0);

    double defect_sup = 0.0;
    auto defect_observer = [&](const RunState& s) {
        if (s.step_index % (record_cadence * 4) == 0 || s.status != RunStatus::Running)
            defect_sup = std::max(defect_sup, std::sqrt(ut_norm_sq(s.u)));
    };
    RunState nls = integrate(u0, ZParameter(half_pi), ref_cfg, refs.grad_norm_sq_W,
                             defect_observer, record_cadence * 4);
    if (nls.status != RunStatus::MaxTimeReached)
        throw std::runtime_error(std::string("inviscid: NLS reference ended ") +
                                 to_string(nls.status));
    result.energy_nls_final = energy(nls.u);

    for (int m : spec.m_list) {
        const double theta = half_pi - std::pow(2.0, -m);
        RunState gl = integrate(u0, ZParameter(theta), cfg, refs.grad_norm_sq_W);
        if (gl.status != RunStatus::MaxTimeReached)
            throw std::runtime_error("inviscid: GL member run at theta = " +
                                     std::to_string(theta) + " ended " +
                                     to_string(gl.status));
        ComplexField diff = gl.u;
        for (std::size_t i = 0; i < diff.values.size(); ++i)
            diff.values[i] -= nls.u.values[i];
        InviscidRow row;
        row.m = m;
        row.theta = theta;
        row.cos_theta = std::cos(theta);
        row.err_l2 = std::sqrt(mass(diff));
        row.err_h1 = std::sqrt(grad_norm_sq(diff));
        row.energy_final = energy(gl.u);
        result.rows.push_back(row);
    }

    const double cos_last =
        result.rows.empty() ? 0.0 : result.rows.back().cos_theta;
    result.defect_bound = cos_last * defect_sup * spec.final_time;

    result.monotone_last3 = result.rows.size() >= 3;
    for (std::size_t i = result.rows.size() >= 3 ? result.rows.size() - 3 : 0;
         i + 1 < result.rows.size(); ++i)
        if (!(result.rows[i + 1].err_l2 < result.rows[i].err_l2))
            result.monotone_last3 = false;
    return result;
}

DecayResult run_decay_study(const ExperimentSpec& spec, std::shared_ptr<const Grid> grid,
                            const StepperConfig& stepper, const GroundStateRefs& refs,
                            int record_cadence) {
    const double theta = spec.thetas.empty() ? std::numbers::pi / 4.0 : spec.thetas[0];
    ComplexField u0 = make_initial(spec.family, spec.fparams, spec.amplitudes.at(0), grid);

    Recorder rec;
    RunState final =
        integrate(u0, ZParameter(theta), stepper, refs.grad_norm_sq_W, std::ref(rec),
                  record_cadence);

    DecayResult result;
    result.status = final.status;
    result.t_event = final.t_event;
    result.final_h1 = std::sqrt(grad_norm_sq(final.u));
    result.h1_below_threshold = result.final_h1 < stepper.decay_h1_threshold;
    result.records = std::move(rec.records);

    if (!result.records.empty()) {
        result.s_total = result.records.back().s_accumulator;
        const double t_end = result.records.back().t;
        double s_at_three_quarters = result.s_total;
        for (const auto& r : result.records)
            if (r.t >= 0.75 * t_end) {
                s_at_three_quarters = r.s_accumulator;
                break;
            }
        result.s_final_quarter_fraction =
            result.s_total > 0.0 ? (result.s_total - s_at_three_quarters) / result.s_total
                                 : 0.0;

        // Late-time exponential rate of the H^1-dot norm: straight-line fit
        // of log sqrt(kinetic) over the final stretch above the threshold.
        std::vector<std::pair<double, double>> pts;
        const double floor_sq = 100.0 * stepper.decay_h1_threshold *
                                stepper.decay_h1_threshold;
        for (const auto& r : result.records)
            if (r.t >= 0.5 * t_end && r.kinetic > floor_sq)
                pts.emplace_back(r.t, 0.5 * std::log(r.kinetic));
        if (pts.size() >= 3) {
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            for (auto [x, y] : pts) {
                sx += x;
                sy += y;
                sxx += x * x;
                sxy += x * y;
            }
            const double det = pts.size() * sxx - sx * sx;
            if (det != 0.0) result.fitted_rate = -(pts.size() * sxy - sx * sy) / det;
        }
    }
    return result;
}

GronwallResult run_weak_strong_gronwall(const ExperimentSpec& spec,
                                        std::shared_ptr<const Grid> grid,
                                        const StepperConfig& stepper,
                                        const GroundStateRefs& refs, int record_cadence) {
    const ZParameter z(std::numbers::pi / 2.0);
    ComplexField v0 = make_initial(spec.family, spec.fparams, spec.amplitudes.at(0), grid);
    ComplexField noise = smooth_noise(grid, spec.seed);

    const double kin0 = grad_norm_sq(v0);
    if (!(energy(v0) < refs.energy_W) || !(kin0 < refs.grad_norm_sq_W))
        throw std::invalid_argument("gronwall: datum outside the trapped regime");

    auto perturbed = [&](double eps) {
        ComplexField f = v0;
        for (std::size_t i = 0; i < f.values.size(); ++i)
            f.values[i] += eps * noise.values[i];
        return f;
    };
    {
        ComplexField p = perturbed(spec.epsilon);
        if (!(energy(p) < refs.energy_W) || !(grad_norm_sq(p) < refs.grad_norm_sq_W))
            throw std::invalid_argument(
                "gronwall: perturbation leaves the trapped regime");
    }

    StepperConfig cfg = stepper;
    cfg.max_time = spec.final_time;
    cfg.adaptive = false;

    const long n_steps = static_cast<long>(std::ceil(cfg.max_time / cfg.dt - 1e-12));

    auto lockstep = [&](const ComplexField& a0, const ComplexField& b0,
                        GronwallResult* track) {
        RunState a, b;
        a.u = a0;
        b.u = b0;
        double w0 = 0.0;
        if (track) {
            ComplexField d = a0;
            for (std::size_t i = 0; i < d.values.size(); ++i) d.values[i] -= b0.values[i];
            w0 = mass(d) + grad_norm_sq(d);
            track->w0_h1_sq = w0;
            track->t_series.push_back(0.0);
            track->ratio_series.push_back(1.0);
        }
        for (long s = 0; s < n_steps; ++s) {
            const double dt = std::min(cfg.dt, cfg.max_time - a.t);
            strang_step(a, z, dt);
            strang_step(b, z, dt);
            if (track && w0 > 0.0 && ((s + 1) % record_cadence == 0 || s + 1 == n_steps)) {
                ComplexField d = a.u;
                for (std::size_t i = 0; i < d.values.size(); ++i)
                    d.values[i] -= b.u.values[i];
                track->t_series.push_back(a.t);
                track->ratio_series.push_back((mass(d) + grad_norm_sq(d)) / w0);
            }
        }
        ComplexField d = a.u;
        for (std::size_t i = 0; i < d.values.size(); ++i) d.values[i] -= b.u.values[i];
        return std::sqrt(mass(d) + grad_norm_sq(d));
    };

    GronwallResult result;
    result.w_final_h1 = lockstep(perturbed(spec.epsilon), v0, &result);
    result.w_final_h1_2eps = lockstep(perturbed(2.0 * spec.epsilon), v0, nullptr);
    result.w_final_h1_zero = lockstep(v0, v0, nullptr);

    // Fitted exponential constant: smallest C with ratio(t) <= e^{C t}.
    double c_hat = 0.0;
    for (std::size_t i = 1; i < result.t_series.size(); ++i)
        if (result.ratio_series[i] > 0.0 && result.t_series[i] > 0.0)
            c_hat = std::max(c_hat, std::log(result.ratio_series[i]) / result.t_series[i]);
    result.c_hat = c_hat;
    result.ratio_bounded = true;
    for (std::size_t i = 0; i < result.t_series.size(); ++i)
        if (result.ratio_series[i] > std::exp(c_hat * result.t_series[i]) * (1.0 + 1e-12))
            result.ratio_bounded = false;
    return result;
}

} // namespace ecgl
