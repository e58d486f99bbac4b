#pragma once

// Uniform 1+1 dimensional grids (one time axis, one periodic spatial axis)
// shared by sampled conformal factors, mass grids and complex field grids.

#include <cstddef>
#include <cmath>
#include <stdexcept>

namespace confkg {

// Coordinate chart a grid lives in. The spatial sections are always flat;
// cosmic_flrw means (t, x) with line element -dt^2 + a(t)^2 dx^2, while
// conformal_flat means Minkowski coordinates (tau, x).
enum class Chart { cosmic_flrw, conformal_flat };

struct GridSpec {
    std::size_t nt = 0, nx = 0;   // points per axis
    double t0 = 0.0, dt = 0.0;    // time origin and spacing
    double x0 = 0.0, dx = 0.0;    // spatial origin and spacing

    double time(std::size_t i) const { return t0 + static_cast<double>(i) * dt; }
    double x(std::size_t j) const { return x0 + static_cast<double>(j) * dx; }
    std::size_t size() const { return nt * nx; }
    std::size_t index(std::size_t i, std::size_t j) const { return i * nx + j; }

    bool congruent(const GridSpec& o, double tol = 1e-12) const {
        return nt == o.nt && nx == o.nx &&
               std::abs(t0 - o.t0) <= tol && std::abs(dt - o.dt) <= tol &&
               std::abs(x0 - o.x0) <= tol && std::abs(dx - o.dx) <= tol;
    }

    void validate(std::size_t min_per_axis, const char* who) const {
        if (nt < min_per_axis || nx < min_per_axis)
            throw std::invalid_argument(std::string(who) + ": grid needs at least " +
                                        std::to_string(min_per_axis) + " points per axis");
        if (!(dt > 0.0) || !(dx > 0.0))
            throw std::invalid_argument(std::string(who) + ": grid spacings must be positive");
    }
};

} // namespace confkg
