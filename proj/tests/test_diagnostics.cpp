#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>

#include "ecgl/diagnostics.hpp"
#include "ecgl/integrator.hpp"
#include "ecgl/spectral.hpp"
#include "oracles.hpp"

using namespace ecgl;
const double pi = std::numbers::pi;

namespace {

std::shared_ptr<const Grid> box(int n = 32, double L = 8.0) {
    return std::make_shared<Grid>(3, n, L);
}

ComplexField gaussian(std::shared_ptr<const Grid> g, double amp, double sigma) {
    ComplexField f(g, Space::physical);
    for (std::size_t i = 0; i < f.values.size(); ++i)
        f.values[i] = amp * std::exp(-g->radius_sq(i) / (2.0 * sigma * sigma));
    return f;
}

} // namespace

TEST_CASE("record: zero and constant fields") {
    auto g = box(16, 4.0);
    ComplexField zero(g, Space::physical);
    auto rz = record(zero, 1.5);
    CHECK(rz.t == 1.5);
    CHECK(rz.mass == 0.0);
    CHECK(rz.kinetic == 0.0);
    CHECK(rz.potential == 0.0);
    CHECK(rz.energy == 0.0);
    CHECK(rz.sup_abs == 0.0);

    const double c = 0.9;
    ComplexField cst(g, Space::physical);
    for (auto& v : cst.values) v = cplx{0.0, c};
    const double V = g->box_volume();
    auto rc = record(cst, 0.0);
    CHECK(rc.mass == doctest::Approx(c * c * V).epsilon(1e-12));
    CHECK(rc.kinetic < 1e-20);
    CHECK(rc.potential == doctest::Approx(std::pow(c, 6.0) * V).epsilon(1e-12));
    CHECK(rc.energy ==
          doctest::Approx(-std::pow(c, 6.0) * V / 6.0).epsilon(1e-10));
    CHECK(rc.k_functional ==
          doctest::Approx(-std::pow(c, 6.0) * V).epsilon(1e-10));
    CHECK(rc.sup_abs == doctest::Approx(c).epsilon(1e-14));
}

TEST_CASE("record: Gaussian moments against closed-form integrals") {
    // h = 0.25: |u|^10 is a Gaussian of width sigma/sqrt(5) and needs the
    // finer lattice for the quadrature to reach 1e-8
    auto g = box(64, 8.0);
    const double a = 1.2, sigma = 1.0;
    auto u = gaussian(g, a, sigma);
    auto r = record(u, 0.0);
    const double s2 = sigma * sigma;
    CHECK(r.mass == doctest::Approx(a * a * std::pow(pi * s2, 1.5)).epsilon(1e-8));
    CHECK(r.potential ==
          doctest::Approx(std::pow(a, 6.0) * std::pow(pi * s2 / 3.0, 1.5)).epsilon(1e-8));
    CHECK(r.s_integrand ==
          doctest::Approx(std::pow(a, 10.0) * std::pow(pi * s2 / 5.0, 1.5)).epsilon(1e-8));
    // kinetic of a e^{-r^2/(2 s2)}: a^2 (3/2) pi^{3/2} sigma
    CHECK(r.kinetic ==
          doctest::Approx(a * a * 1.5 * std::pow(pi, 1.5) * sigma).epsilon(1e-8));
}

TEST_CASE("record: trapezoid S-accumulator") {
    auto g = box(16, 4.0);
    auto u = gaussian(g, 0.5, 1.0);
    auto r0 = record(u, 0.0);
    auto r1 = record(u, 0.4, &r0);
    // same field at both times: accumulator = integrand * dt exactly
    CHECK(r1.s_accumulator == doctest::Approx(r1.s_integrand * 0.4).epsilon(1e-13));
    auto r2 = record(u, 1.0, &r1);
    CHECK(r2.s_accumulator == doctest::Approx(r2.s_integrand * 1.0).epsilon(1e-13));
}

TEST_CASE("ut_norm_sq: closed form on a single Fourier mode") {
    auto g = box(16, 4.0);
    const double k0 = g->wavenumber(2);
    const double a = 0.8;
    ComplexField u(g, Space::physical);
    for (std::size_t i = 0; i < u.values.size(); ++i) {
        const auto idx = g->unpack(i);
        const double phase = k0 * g->coord(idx[0]);
        u.values[i] = a * cplx{std::cos(phase), std::sin(phase)};
    }
    // |u| = a everywhere, so Lap u + |u|^4 u = (a^4 - k0^2) u
    const double coeff = std::pow(a, 4.0) - k0 * k0;
    const double expect = coeff * coeff * a * a * g->box_volume();
    CHECK(ut_norm_sq(u) == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("dissipation_residual: consistent synthetic series") {
    // ||u_t||^2(t) = 1 + t^2, E(t) = E0 - re int_0^t (1+s^2) ds; the trapezoid
    // mismatch is O(dt^2) relative
    const double re = 0.6, e0 = 2.0;
    std::vector<DiagnosticsRecord> recs;
    std::vector<double> ut;
    const double dt = 1e-3;
    for (int i = 0; i <= 200; ++i) {
        const double t = i * dt;
        DiagnosticsRecord r;
        r.t = t;
        r.energy = e0 - re * (t + t * t * t / 3.0);
        recs.push_back(r);
        ut.push_back(1.0 + t * t);
    }
    auto resid = dissipation_residual(recs, ut, re);
    CHECK(resid.front() == 0.0);
    for (double x : resid) CHECK(std::abs(x) <= 2e-8);

    ut.pop_back();
    CHECK_THROWS_AS(dissipation_residual(recs, ut, re), std::invalid_argument);
}

TEST_CASE("mass and energy identities hold along a computed trajectory") {
    auto g = box(16, 4.0);
    auto u0 = gaussian(g, 0.8, 1.0);
    const ZParameter z(pi / 4.0);
    const double dt = 2e-3;

    std::vector<DiagnosticsRecord> recs;
    std::vector<double> uts;
    RunState s;
    s.u = u0;
    recs.push_back(record(s.u, s.t));
    uts.push_back(ut_norm_sq(s.u));
    for (int i = 0; i < 100; ++i) {
        strang_step(s, z, dt);
        recs.push_back(record(s.u, s.t, &recs.back()));
        uts.push_back(ut_norm_sq(s.u));
    }

    // d/dt mass = -2 Re z K: centered differences vs the recorded K
    const auto mres = mass_identity_residual(recs, z.re());
    double kscale = 0.0;
    for (const auto& r : recs) kscale = std::max(kscale, std::abs(2.0 * z.re() * r.k_functional));
    for (double x : mres) CHECK(std::abs(x) <= 1e-4 * kscale);

    // E(0) - E(t) = Re z int ||u_t||^2
    const auto eres = dissipation_residual(recs, uts, z.re());
    for (double x : eres) CHECK(std::abs(x) <= 1e-4);

    // energy monotone non-increasing under the GL flow
    for (std::size_t i = 1; i < recs.size(); ++i)
        CHECK(recs[i].energy <= recs[i - 1].energy + 1e-10 * std::abs(recs[0].energy));
}

TEST_CASE("virial_series: constant-mass records") {
    std::vector<DiagnosticsRecord> recs;
    for (int i = 0; i <= 10; ++i) {
        DiagnosticsRecord r;
        r.t = 0.1 * i;
        r.mass = 3.0;
        r.k_functional = -2.0;
        recs.push_back(r);
    }
    const double re = 0.5;
    auto v = virial_series(recs, re);
    REQUIRE(v.t.size() == recs.size());
    for (std::size_t i = 0; i < v.t.size(); ++i) {
        CHECK(v.I[i] == doctest::Approx(1.5 * v.t[i]).epsilon(1e-13));
        CHECK(v.I_prime[i] == 1.5);
        CHECK(v.I_second[i] == doctest::Approx(re * 2.0).epsilon(1e-15));
        CHECK(std::isnan(v.concavity_ratio[i])); // I' never moves off I'(0)
    }
}

TEST_CASE("bubble_fit: recovers scale and center of a planted bubble") {
    auto g = box(32, 8.0);
    const double lam = 0.8;
    const std::array<double, 3> x0{1.0, -0.5, 0.5}; // on the h = 0.5 lattice
    ComplexField u(g, Space::physical);
    const double R = 0.7 * g->half_length(), w = 0.2 * g->half_length();
    for (std::size_t i = 0; i < u.values.size(); ++i) {
        const auto idx = g->unpack(i);
        double r2 = 0.0;
        for (int a = 0; a < 3; ++a) {
            const double dx = g->coord(idx[a]) - x0[a];
            r2 += dx * dx;
        }
        const double tap = taper_factor(std::sqrt(r2), R, w);
        u.values[i] = tap * std::pow(lam, -0.5) * eval_W(r2 / (lam * lam), 3);
    }
    auto fit = bubble_fit(u);
    REQUIRE(fit.has_value());
    CHECK(fit->correlation > 0.95);
    CHECK(std::abs(fit->lambda - lam) <= 0.15 * lam);
    for (int a = 0; a < 3; ++a)
        CHECK(std::abs(fit->center[a] - x0[a]) <= g->spacing() + 1e-12);
}

TEST_CASE("bubble_fit: degenerate field yields no fit") {
    auto g = box(16, 4.0);
    ComplexField zero(g, Space::physical);
    CHECK(!bubble_fit(zero).has_value());
}

TEST_CASE("trapping_report: precondition violations throw") {
    GroundStateRefs refs;
    refs.d = 3;
    refs.grad_norm_sq_W = 12.0;
    refs.energy_W = 4.0;

    std::vector<DiagnosticsRecord> recs(1);
    recs[0].energy = 5.0; // >= E(W)
    recs[0].kinetic = 1.0;
    CHECK_THROWS_WITH_AS(trapping_report(recs, refs),
                         doctest::Contains("E(u0) < E(W)"), std::invalid_argument);

    recs[0].energy = 1.0;
    recs[0].kinetic = 12.0; // exactly at the threshold
    CHECK_THROWS_AS(trapping_report(recs, refs), std::invalid_argument);

    CHECK_THROWS_AS(trapping_report({}, refs), std::invalid_argument);
}

TEST_CASE("trapping_report: subcritical and supercritical branches") {
    GroundStateRefs refs;
    refs.d = 3;
    refs.grad_norm_sq_W = 12.0;
    refs.energy_W = 4.0;

    std::vector<DiagnosticsRecord> sub;
    for (int i = 0; i < 5; ++i) {
        DiagnosticsRecord r;
        r.kinetic = 6.0 - i;          // max 6 -> margin >= 0.5
        r.k_functional = 0.5 * r.kinetic;
        r.energy = 1.0;
        sub.push_back(r);
    }
    auto rs = trapping_report(sub, refs);
    CHECK(rs.side == TrappingSide::Subcritical);
    CHECK(rs.all_assertions_hold);
    CHECK(rs.min_margin_kinetic == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(rs.min_margin_K == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(rs.energy_nonneg);
    CHECK(rs.measured_delta_bar == doctest::Approx(0.5).epsilon(1e-14));

    std::vector<DiagnosticsRecord> sup;
    for (int i = 0; i < 5; ++i) {
        DiagnosticsRecord r;
        r.kinetic = 20.0 + i;
        r.k_functional = -(1.0 + i);
        r.energy = 1.0;
        sup.push_back(r);
    }
    auto rp = trapping_report(sup, refs);
    CHECK(rp.side == TrappingSide::Supercritical);
    CHECK(rp.all_assertions_hold);
    CHECK(rp.measured_delta_3 == doctest::Approx(1.0).epsilon(1e-14));

    // one record dipping below the threshold breaks the assertions
    sup[3].kinetic = 11.0;
    auto rb = trapping_report(sup, refs);
    CHECK(!rb.all_assertions_hold);
}
