#pragma once

#include <stdexcept>
#include <vector>

namespace ratedist {

/// Uniform frequency grid, symmetric about 0, with f = 0 and both endpoints
/// on the grid (node count = intervals + 1, odd). Quadrature routines work on
/// the non-negative half and double, exploiting the even symmetry of spectra.
struct FrequencyGrid {
    double half_width = 0.5;
    int intervals = 4096;  // even, >= 16

    FrequencyGrid() = default;
    FrequencyGrid(double half_width_, int intervals_)
        : half_width(half_width_), intervals(intervals_) {
        if (!(half_width > 0.0)) throw std::invalid_argument("FrequencyGrid: half_width must be > 0");
        if (intervals < 16 || intervals % 2 != 0)
            throw std::invalid_argument("FrequencyGrid: intervals must be even and >= 16");
    }

    double spacing() const { return 2.0 * half_width / intervals; }
    int n_points() const { return intervals + 1; }

    /// Nodes on [0, half_width]; n/2 + 1 of them, first is exactly 0,
    /// last exactly half_width.
    std::vector<double> half_nodes() const {
        const int m = intervals / 2;
        std::vector<double> f(m + 1);
        for (int i = 0; i <= m; ++i) f[i] = half_width * static_cast<double>(i) / m;
        return f;
    }

    /// Full node set on [-half_width, half_width].
    std::vector<double> full_nodes() const {
        const int m = intervals / 2;
        std::vector<double> f(intervals + 1);
        for (int i = -m; i <= m; ++i) f[i + m] = half_width * static_cast<double>(i) / m;
        return f;
    }
};

/// Trapezoid weights for an increasing (not necessarily uniform) node vector.
std::vector<double> trapezoid_weights(const std::vector<double>& nodes);

}  // namespace ratedist
