#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace ecgl {

/// Uniform periodic grid on the box [-L, L)^d, d = 3 or 4.
///
/// Points per axis: x_i = -L + i*h with h = 2L/n.  Wavenumbers follow FFT
/// storage order, k_m = pi*m/L with m = i for i < n/2 and m = i - n
/// otherwise; the Nyquist mode is kept with m = -n/2.
class Grid {
public:
    Grid(int dim, int n_per_axis, double half_length);

    int dim() const { return dim_; }
    int n_per_axis() const { return n_; }
    double half_length() const { return half_length_; }
    double spacing() const { return spacing_; }
    std::size_t size() const { return size_; }

    /// Quadrature weight h^d for all box integrals.
    double cell_volume() const { return cell_volume_; }
    /// Box volume (2L)^d.
    double box_volume() const { return box_volume_; }

    double coord(int axis_index) const;
    double wavenumber(int axis_index) const;

    /// |k|^2 at a flat spectral index (precomputed).
    double k_sq(std::size_t flat) const { return ksq_[flat]; }
    const std::vector<double>& k_sq_table() const { return ksq_; }

    /// Flat index -> per-axis indices (row-major, axis 0 slowest).
    std::array<int, 4> unpack(std::size_t flat) const;
    std::size_t pack(const std::array<int, 4>& idx) const;

    /// |x|^2 at a flat physical index.
    double radius_sq(std::size_t flat) const;

    bool operator==(const Grid& other) const {
        return dim_ == other.dim_ && n_ == other.n_ && half_length_ == other.half_length_;
    }

private:
    int dim_;
    int n_;
    double half_length_;
    double spacing_;
    std::size_t size_;
    double cell_volume_;
    double box_volume_;
    std::vector<double> ksq_;
    std::vector<double> axis_k_;
};

} // namespace ecgl
