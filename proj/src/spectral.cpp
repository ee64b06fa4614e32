#include "ecgl/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace ecgl {

namespace {

// Plan cache keyed by (dim, n).  Plans are created with FFTW_UNALIGNED so
// they can be executed on any caller buffer via fftw_execute_dft, which is
// thread safe; creation itself is serialized.
struct PlanPair {
    fftw_plan forward;
    fftw_plan backward;
};

PlanPair& plans_for(const Grid& g) {
    static std::map<std::pair<int, int>, PlanPair> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    const auto key = std::make_pair(g.dim(), g.n_per_axis());
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    std::vector<cplx> scratch(g.size());
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    std::vector<int> dims(g.dim(), g.n_per_axis());
    PlanPair p;
    p.forward = fftw_plan_dft(g.dim(), dims.data(), buf, buf, FFTW_FORWARD,
                              FFTW_ESTIMATE | FFTW_UNALIGNED);
    p.backward = fftw_plan_dft(g.dim(), dims.data(), buf, buf, FFTW_BACKWARD,
                               FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!p.forward || !p.backward) throw std::runtime_error("FFTW plan creation failed");
    return cache.emplace(key, p).first->second;
}

void execute(ComplexField& f, bool forward) {
    auto& p = plans_for(*f.grid);
    auto* buf = reinterpret_cast<fftw_complex*>(f.values.data());
    fftw_execute_dft(forward ? p.forward : p.backward, buf, buf);
    const double scale = 1.0 / std::sqrt(static_cast<double>(f.grid->size()));
    for (auto& v : f.values) v *= scale;
}

} // namespace

void to_spectral(ComplexField& f) {
    if (f.space != Space::physical)
        throw std::invalid_argument("to_spectral: field already in spectral space");
    execute(f, true);
    f.space = Space::spectral;
}

void to_physical(ComplexField& f) {
    if (f.space != Space::spectral)
        throw std::invalid_argument("to_physical: field already in physical space");
    execute(f, false);
    f.space = Space::physical;
}

ComplexField dft(const ComplexField& f) {
    ComplexField out = f;
    to_spectral(out);
    return out;
}

ComplexField idft(const ComplexField& f) {
    ComplexField out = f;
    to_physical(out);
    return out;
}

void apply_semigroup_spectral(ComplexField& fhat, const ZParameter& z, double t) {
    if (fhat.space != Space::spectral)
        throw std::invalid_argument("apply_semigroup_spectral: spectral-space field required");
    if (t < 0.0) throw std::invalid_argument("apply_semigroup: t must be >= 0");
    if (t == 0.0) return;
    const auto& ksq = fhat.grid->k_sq_table();
    const double re = z.re(), im = z.im();
    for (std::size_t i = 0; i < fhat.values.size(); ++i) {
        const double a = t * ksq[i];
        const double damp = re == 0.0 ? 1.0 : std::exp(-re * a);
        const double phase = -im * a;
        fhat.values[i] *= cplx{damp * std::cos(phase), damp * std::sin(phase)};
    }
}

ComplexField apply_semigroup(const ComplexField& f, const ZParameter& z, double t) {
    if (t < 0.0) throw std::invalid_argument("apply_semigroup: t must be >= 0");
    ComplexField out = f;
    if (t == 0.0) return out;
    const bool was_physical = (out.space == Space::physical);
    if (was_physical) to_spectral(out);
    apply_semigroup_spectral(out, z, t);
    if (was_physical) to_physical(out);
    return out;
}

double grad_norm_sq(const ComplexField& f) {
    ComplexField tmp;
    const ComplexField* fh = &f;
    if (f.space == Space::physical) {
        tmp = dft(f);
        fh = &tmp;
    }
    const auto& ksq = fh->grid->k_sq_table();
    double s = 0.0;
    for (std::size_t i = 0; i < fh->values.size(); ++i) s += ksq[i] * std::norm(fh->values[i]);
    return s * fh->grid->cell_volume();
}

double lebesgue_norm(const ComplexField& f, double p) {
    if (f.space != Space::physical)
        throw std::invalid_argument("lebesgue_norm: physical-space field required");
    if (p < 1.0) throw std::invalid_argument("lebesgue_norm: p must be >= 1");
    double s = 0.0;
    if (p == 2.0) {
        for (const auto& v : f.values) s += std::norm(v);
    } else {
        const double half_p = p / 2.0;
        for (const auto& v : f.values) s += std::pow(std::norm(v), half_p);
    }
    return std::pow(s * f.grid->cell_volume(), 1.0 / p);
}

double mass(const ComplexField& f) {
    double s = 0.0;
    for (const auto& v : f.values) s += std::norm(v);
    return s * f.grid->cell_volume();
}

double sup_abs(const ComplexField& f) {
    if (f.space != Space::physical)
        throw std::invalid_argument("sup_abs: physical-space field required");
    double m = 0.0;
    for (const auto& v : f.values) m = std::max(m, std::norm(v));
    return std::sqrt(m);
}

cplx inner_l2(const ComplexField& f, const ComplexField& g) {
    if (f.space != g.space || !(*f.grid == *g.grid))
        throw std::invalid_argument("inner_l2: fields must share grid and space");
    cplx s{0.0, 0.0};
    for (std::size_t i = 0; i < f.values.size(); ++i) s += f.values[i] * std::conj(g.values[i]);
    return s * f.grid->cell_volume();
}

double boundary_mass_fraction(const ComplexField& f) {
    if (f.space != Space::physical)
        throw std::invalid_argument("boundary_mass_fraction: physical-space field required");
    const Grid& g = *f.grid;
    const double edge = 0.9 * g.half_length();
    double shell = 0.0, total = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        const double m = std::norm(f.values[i]);
        total += m;
        const auto idx = g.unpack(i);
        for (int a = 0; a < g.dim(); ++a) {
            if (std::abs(g.coord(idx[a])) >= edge) {
                shell += m;
                break;
            }
        }
    }
    return total > 0.0 ? shell / total : 0.0;
}

double spectral_tail_fraction(const ComplexField& f) {
    ComplexField tmp;
    const ComplexField* fh = &f;
    if (f.space == Space::physical) {
        tmp = dft(f);
        fh = &tmp;
    }
    const Grid& g = *fh->grid;
    const int n = g.n_per_axis();
    const int cut = n / 3;
    double tail = 0.0, total = 0.0;
    for (std::size_t i = 0; i < fh->values.size(); ++i) {
        const double m = std::norm(fh->values[i]);
        total += m;
        const auto idx = g.unpack(i);
        for (int a = 0; a < g.dim(); ++a) {
            const int mi = idx[a] < n / 2 ? idx[a] : n - idx[a];
            if (mi >= cut) {
                tail += m;
                break;
            }
        }
    }
    return total > 0.0 ? tail / total : 0.0;
}

} // namespace ecgl
