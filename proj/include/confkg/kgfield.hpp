#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "confkg/geometry.hpp"
#include "confkg/grid.hpp"

namespace confkg {

// Complex scalar field sampled on a uniform (time, x) grid with a periodic
// spatial direction. Grids need at least five points per axis so second
// derivatives and convergence checks have room to work.
struct GridField {
    GridSpec grid;
    Chart chart = Chart::conformal_flat;
    std::vector<std::complex<double>> v;

    static GridField zeros(const GridSpec& g, Chart c);
    static GridField sample(const GridSpec& g, Chart c,
                            const std::function<std::complex<double>(double, double)>& f);

    std::complex<double>& at(std::size_t i, std::size_t j) { return v[grid.index(i, j)]; }
    const std::complex<double>& at(std::size_t i, std::size_t j) const {
        return v[grid.index(i, j)];
    }

    // binary format: "CKGF", u32 version, u64 nt, u64 nx,
    // f64 dt, dx, t0, x0, u32 chart (0 cosmic, 1 conformal),
    // then nt*nx little-endian (re, im) f64 pairs in time-major order
    void save(const std::string& path) const;
    static GridField load(const std::string& path);
};

// Residual of the field equation in an expanding universe in cosmic time,
//
//     -d_t^2 phi - 3 (adot/a) d_t phi + a^{-2} d_x^2 phi - m2(t) phi,
//
// with second-order central differences, periodic in x. The first and last
// time rows of the result are zero; the residual lives on interior rows.
GridField kg_residual_flrw(const GridField& phi, const ScaleFactorProfile& scale,
                           const std::function<double(double)>& m2);

// Same for Minkowski coordinates with a time-dependent mass:
//
//     -d_tau^2 phi + d_x^2 phi - M2(tau) phi
GridField kg_residual_flat(const GridField& phi, const std::function<double(double)>& m2);

double max_abs(const GridField& f);

// Klein-Gordon pseudo inner product on one interior time slice,
//
//     (phi, psi) = i * sum_j dx * w * (phi* d_t psi - psi d_t phi*),
//
// with the measure weight w fixed by the chart: a(t)^3 in cosmic time,
// a(tau)^2 in conformal time (so a constant unit scale gives the flat
// product). Time derivatives are second-order central differences.
std::complex<double> pseudo_inner_product(const GridField& phi, const GridField& psi,
                                          std::size_t time_index,
                                          const ScaleFactorProfile& scale);

// flat-space product: unit weight, conformal chart only
std::complex<double> pseudo_inner_product(const GridField& phi, const GridField& psi,
                                          std::size_t time_index);

}  // namespace confkg
