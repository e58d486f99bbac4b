#include "confkg/kgfield.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace confkg {

static_assert(std::endian::native == std::endian::little,
              "field files are little-endian and so must be the host");
static_assert(sizeof(std::complex<double>) == 16);

namespace {

constexpr char kMagic[4] = {'C', 'K', 'G', 'F'};
constexpr std::uint32_t kVersion = 1;

void put_bytes(std::ofstream& os, const void* p, std::size_t n) {
    os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void get_bytes(std::ifstream& is, void* p, std::size_t n, const char* what) {
    is.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (is.gcount() != static_cast<std::streamsize>(n))
        throw std::runtime_error(std::string("GridField: file ends inside the ") + what);
}

void check_pair(const GridField& a, const GridField& b, const char* who) {
    if (a.chart != b.chart) throw std::invalid_argument(std::string(who) + ": charts differ");
    if (!a.grid.congruent(b.grid))
        throw std::invalid_argument(std::string(who) + ": grids are not congruent");
}

}  // namespace

GridField GridField::zeros(const GridSpec& g, Chart c) {
    g.validate(5, "GridField");
    GridField f;
    f.grid = g;
    f.chart = c;
    f.v.assign(g.size(), {0.0, 0.0});
    return f;
}

GridField GridField::sample(const GridSpec& g, Chart c,
                            const std::function<std::complex<double>(double, double)>& f) {
    GridField out = zeros(g, c);
    for (std::size_t i = 0; i < g.nt; ++i) {
        const double t = g.time(i);
        for (std::size_t j = 0; j < g.nx; ++j) out.at(i, j) = f(t, g.x(j));
    }
    return out;
}

void GridField::save(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("GridField: cannot open " + path + " for writing");
    const std::uint64_t nt = grid.nt, nx = grid.nx;
    const std::uint32_t ch = chart == Chart::cosmic_flrw ? 0 : 1;
    put_bytes(os, kMagic, 4);
    put_bytes(os, &kVersion, 4);
    put_bytes(os, &nt, 8);
    put_bytes(os, &nx, 8);
    put_bytes(os, &grid.dt, 8);
    put_bytes(os, &grid.dx, 8);
    put_bytes(os, &grid.t0, 8);
    put_bytes(os, &grid.x0, 8);
    put_bytes(os, &ch, 4);
    put_bytes(os, v.data(), v.size() * sizeof(std::complex<double>));
    if (!os) throw std::runtime_error("GridField: write to " + path + " failed");
}

GridField GridField::load(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("GridField: cannot open " + path);

    char magic[4];
    get_bytes(is, magic, 4, "header");
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("GridField: " + path + " is not a field file");
    std::uint32_t version = 0;
    get_bytes(is, &version, 4, "header");
    if (version != kVersion)
        throw std::runtime_error("GridField: unsupported format version in " + path);

    std::uint64_t nt = 0, nx = 0;
    std::uint32_t ch = 0;
    GridSpec g;
    get_bytes(is, &nt, 8, "header");
    get_bytes(is, &nx, 8, "header");
    get_bytes(is, &g.dt, 8, "header");
    get_bytes(is, &g.dx, 8, "header");
    get_bytes(is, &g.t0, 8, "header");
    get_bytes(is, &g.x0, 8, "header");
    get_bytes(is, &ch, 4, "header");
    if (nt > (std::uint64_t{1} << 32) || nx > (std::uint64_t{1} << 32))
        throw std::runtime_error("GridField: unreasonable grid size in " + path);
    if (ch > 1) throw std::runtime_error("GridField: unknown chart tag in " + path);
    g.nt = static_cast<std::size_t>(nt);
    g.nx = static_cast<std::size_t>(nx);
    if (!std::isfinite(g.dt) || !std::isfinite(g.dx) || !std::isfinite(g.t0) ||
        !std::isfinite(g.x0))
        throw std::runtime_error("GridField: non-finite grid geometry in " + path);
    g.validate(5, "GridField");

    GridField f = zeros(g, ch == 0 ? Chart::cosmic_flrw : Chart::conformal_flat);
    get_bytes(is, f.v.data(), f.v.size() * sizeof(std::complex<double>), "field data");
    return f;
}

GridField kg_residual_flrw(const GridField& phi, const ScaleFactorProfile& scale,
                           const std::function<double(double)>& m2) {
    if (phi.chart != Chart::cosmic_flrw)
        throw std::invalid_argument("kg_residual_flrw: field is not in cosmic coordinates");
    const GridSpec& g = phi.grid;
    GridField r = GridField::zeros(g, phi.chart);
    const double idt2 = 1.0 / (g.dt * g.dt), idx2 = 1.0 / (g.dx * g.dx);
    const double i2dt = 1.0 / (2.0 * g.dt);
    for (std::size_t i = 1; i + 1 < g.nt; ++i) {
        const double t = g.time(i);
        const double a = scale.a_cosmic(t);
        const double hub = scale.adot_cosmic(t) / a;
        const double mm = m2(t);
        const double ia2 = 1.0 / (a * a);
        for (std::size_t j = 0; j < g.nx; ++j) {
            const std::size_t jm = j == 0 ? g.nx - 1 : j - 1;
            const std::size_t jp = j + 1 == g.nx ? 0 : j + 1;
            const auto c = phi.at(i, j);
            const auto dtt = (phi.at(i + 1, j) - 2.0 * c + phi.at(i - 1, j)) * idt2;
            const auto dt1 = (phi.at(i + 1, j) - phi.at(i - 1, j)) * i2dt;
            const auto dxx = (phi.at(i, jp) - 2.0 * c + phi.at(i, jm)) * idx2;
            r.at(i, j) = -dtt - 3.0 * hub * dt1 + ia2 * dxx - mm * c;
        }
    }
    return r;
}

GridField kg_residual_flat(const GridField& phi, const std::function<double(double)>& m2) {
    if (phi.chart != Chart::conformal_flat)
        throw std::invalid_argument("kg_residual_flat: field is not in Minkowski coordinates");
    const GridSpec& g = phi.grid;
    GridField r = GridField::zeros(g, phi.chart);
    const double idt2 = 1.0 / (g.dt * g.dt), idx2 = 1.0 / (g.dx * g.dx);
    for (std::size_t i = 1; i + 1 < g.nt; ++i) {
        const double mm = m2(g.time(i));
        for (std::size_t j = 0; j < g.nx; ++j) {
            const std::size_t jm = j == 0 ? g.nx - 1 : j - 1;
            const std::size_t jp = j + 1 == g.nx ? 0 : j + 1;
            const auto c = phi.at(i, j);
            const auto dtt = (phi.at(i + 1, j) - 2.0 * c + phi.at(i - 1, j)) * idt2;
            const auto dxx = (phi.at(i, jp) - 2.0 * c + phi.at(i, jm)) * idx2;
            r.at(i, j) = -dtt + dxx - mm * c;
        }
    }
    return r;
}

double max_abs(const GridField& f) {
    double m = 0.0;
    for (const auto& z : f.v) m = std::max(m, std::abs(z));
    return m;
}

std::complex<double> pseudo_inner_product(const GridField& phi, const GridField& psi,
                                          std::size_t time_index,
                                          const ScaleFactorProfile& scale) {
    check_pair(phi, psi, "pseudo_inner_product");
    const GridSpec& g = phi.grid;
    if (time_index == 0 || time_index + 1 >= g.nt)
        throw std::invalid_argument(
            "pseudo_inner_product: time derivatives need an interior time slice");

    const double time = g.time(time_index);
    const double w = phi.chart == Chart::cosmic_flrw
                         ? std::pow(scale.a_cosmic(time), 3)
                         : scale.a_conf(time) * scale.a_conf(time);
    const double i2dt = 1.0 / (2.0 * g.dt);
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t j = 0; j < g.nx; ++j) {
        const auto dpsi = (psi.at(time_index + 1, j) - psi.at(time_index - 1, j)) * i2dt;
        const auto dphi = (phi.at(time_index + 1, j) - phi.at(time_index - 1, j)) * i2dt;
        acc += std::conj(phi.at(time_index, j)) * dpsi - psi.at(time_index, j) * std::conj(dphi);
    }
    return std::complex<double>(0.0, 1.0) * w * g.dx * acc;
}

std::complex<double> pseudo_inner_product(const GridField& phi, const GridField& psi,
                                          std::size_t time_index) {
    if (phi.chart != Chart::conformal_flat)
        throw std::invalid_argument(
            "pseudo_inner_product: the unweighted product lives in Minkowski coordinates");
    return pseudo_inner_product(phi, psi, time_index, ScaleFactorProfile::constant(1.0));
}

}  // namespace confkg
