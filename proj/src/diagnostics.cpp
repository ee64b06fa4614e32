#include "ecgl/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ecgl/spectral.hpp"

namespace ecgl {

namespace {

double pth_power_integral(const ComplexField& u, double p) {
    const double norm = lebesgue_norm(u, p);
    return std::pow(norm, p);
}

} // namespace

double potential_power(const ComplexField& u) {
    const int d = u.grid->dim();
    return pth_power_integral(u, 2.0 * d / (d - 2));
}

double energy(const ComplexField& u) {
    const int d = u.grid->dim();
    return 0.5 * grad_norm_sq(u) - (d - 2) / (2.0 * d) * potential_power(u);
}

double k_functional(const ComplexField& u) {
    return grad_norm_sq(u) - potential_power(u);
}

double s_norm_integrand(const ComplexField& u) {
    const int d = u.grid->dim();
    return pth_power_integral(u, 2.0 * (d + 2) / (d - 2));
}

double ut_norm_sq(const ComplexField& u) {
    if (u.space != Space::physical)
        throw std::invalid_argument("ut_norm_sq: physical-space field required");
    const int d = u.grid->dim();
    const double q = 4.0 / (d - 2);

    ComplexField lap = dft(u);
    const auto& ksq = u.grid->k_sq_table();
    for (std::size_t i = 0; i < lap.values.size(); ++i) lap.values[i] *= -ksq[i];
    to_physical(lap);

    double s = 0.0;
    for (std::size_t i = 0; i < u.values.size(); ++i) {
        const double a2 = std::norm(u.values[i]);
        const cplx rhs = lap.values[i] + std::pow(a2, q / 2.0) * u.values[i];
        s += std::norm(rhs);
    }
    return s * u.grid->cell_volume();
}

DiagnosticsRecord record(const ComplexField& u, double t, const DiagnosticsRecord* prev,
                         const RecordOptions& opts) {
    if (u.space != Space::physical)
        throw std::invalid_argument("record: physical-space field required");
    const int d = u.grid->dim();

    DiagnosticsRecord r;
    r.t = t;
    r.mass = mass(u);
    r.kinetic = grad_norm_sq(u);
    r.potential = potential_power(u);
    r.energy = 0.5 * r.kinetic - (d - 2) / (2.0 * d) * r.potential;
    r.k_functional = r.kinetic - r.potential;
    r.s_integrand = s_norm_integrand(u);
    r.sup_abs = sup_abs(u);
    r.boundary_mass_fraction = boundary_mass_fraction(u);
    if (prev) {
        r.s_accumulator =
            prev->s_accumulator + 0.5 * (prev->s_integrand + r.s_integrand) * (t - prev->t);
    } else {
        r.s_accumulator = 0.0;
    }
    if (opts.with_bubble) r.bubble = bubble_fit(u);
    return r;
}

std::vector<double> dissipation_residual(const std::vector<DiagnosticsRecord>& records,
                                         const std::vector<double>& ut_norms, double re_z) {
    if (records.size() != ut_norms.size())
        throw std::invalid_argument("dissipation_residual: series length mismatch");
    std::vector<double> out(records.size(), 0.0);
    if (records.empty()) return out;
    const double e0 = records.front().energy;
    const double scale = std::max(std::abs(e0), std::numeric_limits<double>::min());
    double integral = 0.0;
    for (std::size_t i = 1; i < records.size(); ++i) {
        integral += 0.5 * (ut_norms[i - 1] + ut_norms[i]) *
                    (records[i].t - records[i - 1].t);
        out[i] = (e0 - records[i].energy - re_z * integral) / scale;
    }
    return out;
}

std::vector<double> mass_identity_residual(const std::vector<DiagnosticsRecord>& records,
                                           double re_z) {
    if (records.size() < 3)
        throw std::invalid_argument("mass_identity_residual: need at least 3 records");
    std::vector<double> out;
    out.reserve(records.size() - 2);
    for (std::size_t i = 1; i + 1 < records.size(); ++i) {
        const double dmdt = (records[i + 1].mass - records[i - 1].mass) /
                            (records[i + 1].t - records[i - 1].t);
        out.push_back(dmdt + 2.0 * re_z * records[i].k_functional);
    }
    return out;
}

VirialSeries virial_series(const std::vector<DiagnosticsRecord>& records, double re_z) {
    VirialSeries v;
    double I = 0.0;
    const double ip0 = records.empty() ? 0.0 : records.front().mass / 2.0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (i > 0)
            I += 0.25 * (records[i - 1].mass + records[i].mass) *
                 (records[i].t - records[i - 1].t);
        const double ip = records[i].mass / 2.0;
        const double is = -re_z * records[i].k_functional;
        v.t.push_back(records[i].t);
        v.I.push_back(I);
        v.I_prime.push_back(ip);
        v.I_second.push_back(is);
        const double dp = ip - ip0;
        v.concavity_ratio.push_back(dp != 0.0 ? I * is / (dp * dp)
                                              : std::numeric_limits<double>::quiet_NaN());
    }
    return v;
}

namespace {

struct LambdaScan {
    double correlation = -1.0;
    std::size_t argmax = 0;
    std::array<double, 4> center{0, 0, 0, 0};
};

// Best normalized correlation over all centers for a fixed scale, via FFT
// cross-correlation of the gradients.
LambdaScan scan_lambda(const ComplexField& uhat, double kinetic_u, double lambda) {
    const Grid& g = *uhat.grid;
    const int d = g.dim();
    const int n = g.n_per_axis();
    const double L = g.half_length();

    // Template: rescaled W centered at x = 0, tapered near the box edge so
    // the periodic extension stays C^1.
    ComplexField tmpl(uhat.grid, Space::physical);
    const double R = 0.7 * L, w = 0.2 * L;
    const double amp = std::pow(lambda, -(d - 2) / 2.0);
    for (std::size_t i = 0; i < tmpl.values.size(); ++i) {
        const double r2 = g.radius_sq(i);
        const double tap = taper_factor(std::sqrt(r2), R, w);
        tmpl.values[i] =
            tap > 0.0 ? cplx{amp * eval_W(r2 / (lambda * lambda), d) * tap, 0.0} : cplx{0, 0};
    }
    to_spectral(tmpl);

    const auto& ksq = g.k_sq_table();
    double kin_t = 0.0;
    ComplexField prod(uhat.grid, Space::spectral);
    for (std::size_t i = 0; i < prod.values.size(); ++i) {
        kin_t += ksq[i] * std::norm(tmpl.values[i]);
        prod.values[i] = ksq[i] * uhat.values[i] * std::conj(tmpl.values[i]);
    }
    kin_t *= g.cell_volume();

    to_physical(prod); // prod[j0] * sqrt(N) * h^d = <grad u, grad T(.-j0 h)>
    LambdaScan best;
    if (kin_t <= 0.0) return best;
    double cmax = 0.0;
    std::size_t jmax = 0;
    for (std::size_t j = 0; j < prod.values.size(); ++j) {
        const double c = std::norm(prod.values[j]);
        if (c > cmax) {
            cmax = c;
            jmax = j;
        }
    }
    const double scale = std::sqrt(static_cast<double>(g.size())) * g.cell_volume();
    best.correlation = std::sqrt(cmax) * scale / std::sqrt(kinetic_u * kin_t);
    best.argmax = jmax;
    const auto idx = g.unpack(jmax);
    for (int a = 0; a < d; ++a) {
        const int ci = (n / 2 + idx[a]) % n;
        best.center[a] = -L + ci * g.spacing();
    }
    return best;
}

} // namespace

std::optional<BubbleFit> bubble_fit(const ComplexField& u) {
    ComplexField uhat = u.space == Space::spectral ? u : dft(u);
    const Grid& g = *u.grid;
    const double kinetic_u = grad_norm_sq(uhat);
    if (kinetic_u < 1e-24) return std::nullopt;

    const double lo = g.spacing();
    const double hi = g.half_length() / 4.0;
    const int npts = 24;

    double best_lam = lo;
    LambdaScan best;
    for (int i = 0; i < npts; ++i) {
        const double lam = lo * std::pow(hi / lo, static_cast<double>(i) / (npts - 1));
        const auto s = scan_lambda(uhat, kinetic_u, lam);
        if (s.correlation > best.correlation) {
            best = s;
            best_lam = lam;
        }
    }

    // Golden-section refinement in log(lambda) around the lattice optimum.
    const double step = std::log(hi / lo) / (npts - 1);
    double a = std::log(best_lam) - step, b = std::log(best_lam) + step;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - gr * (b - a), dpt = a + gr * (b - a);
    auto eval = [&](double loglam) { return scan_lambda(uhat, kinetic_u, std::exp(loglam)); };
    LambdaScan sc = eval(c), sd = eval(dpt);
    for (int it = 0; it < 20; ++it) {
        if (sc.correlation > sd.correlation) {
            b = dpt;
            dpt = c;
            sd = sc;
            c = b - gr * (b - a);
            sc = eval(c);
        } else {
            a = c;
            c = dpt;
            sc = sd;
            dpt = a + gr * (b - a);
            sd = eval(dpt);
        }
    }
    const double loglam = sc.correlation > sd.correlation ? c : dpt;
    const LambdaScan& sbest = sc.correlation > sd.correlation ? sc : sd;

    BubbleFit fit;
    if (sbest.correlation >= best.correlation) {
        fit.lambda = std::exp(loglam);
        fit.correlation = sbest.correlation;
        fit.center = sbest.center;
    } else {
        fit.lambda = best_lam;
        fit.correlation = best.correlation;
        fit.center = best.center;
    }
    return fit;
}

TrappingReport trapping_report(const std::vector<DiagnosticsRecord>& records,
                               const GroundStateRefs& refs) {
    if (records.empty()) throw std::invalid_argument("trapping_report: no records");
    const auto& r0 = records.front();
    if (!(r0.energy < refs.energy_W))
        throw std::invalid_argument("trapping_report: precondition E(u0) < E(W) violated");
    const double kw = refs.grad_norm_sq_W;
    if (r0.kinetic == kw)
        throw std::invalid_argument(
            "trapping_report: precondition kinetic(u0) != ||grad W||^2 violated");

    TrappingReport rep;
    if (r0.kinetic < kw) {
        rep.side = TrappingSide::Subcritical;
        rep.min_margin_kinetic = std::numeric_limits<double>::infinity();
        rep.min_margin_K = std::numeric_limits<double>::infinity();
        rep.energy_nonneg = true;
        bool ok = true;
        for (const auto& r : records) {
            rep.min_margin_kinetic = std::min(rep.min_margin_kinetic, 1.0 - r.kinetic / kw);
            if (r.kinetic > 0.0)
                rep.min_margin_K = std::min(rep.min_margin_K, r.k_functional / r.kinetic);
            if (r.energy < 0.0) rep.energy_nonneg = false;
            if (!(r.kinetic < kw) || !(r.k_functional > 0.0) || r.energy < 0.0) ok = false;
        }
        rep.measured_delta_bar = std::min(rep.min_margin_kinetic, rep.min_margin_K);
        rep.all_assertions_hold = ok;
    } else {
        rep.side = TrappingSide::Supercritical;
        rep.measured_delta_3 = std::numeric_limits<double>::infinity();
        bool ok = true;
        for (const auto& r : records) {
            rep.measured_delta_3 = std::min(rep.measured_delta_3, -r.k_functional);
            if (!(r.kinetic > kw) || !(r.k_functional < 0.0)) ok = false;
        }
        rep.all_assertions_hold = ok;
    }
    return rep;
}

} // namespace ecgl
