#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "paraexp/linode.hpp"

namespace paraexp {

/// Physical constants (SI).
inline constexpr double kVacuumPermittivity = 8.854187817e-12;  // F/m
inline constexpr double kVacuumPermeability = 4.0e-7 * 3.14159265358979323846;  // H/m

/// Structured staggered grid: node counts per axis and uniform spacings.
struct FitGrid {
    std::size_t nx = 2, ny = 2, nz = 2;
    double dx = 1.0, dy = 1.0, dz = 1.0;

    void validate() const;

    // Primal edge counts per direction and totals. Degrees of freedom are
    // indexed axis-major: all x-edges, then y, then z; lexicographic within
    // each direction with ix fastest, then iy, then iz.
    std::size_t num_edges_x() const { return (nx - 1) * ny * nz; }
    std::size_t num_edges_y() const { return nx * (ny - 1) * nz; }
    std::size_t num_edges_z() const { return nx * ny * (nz - 1); }
    std::size_t num_edges() const { return num_edges_x() + num_edges_y() + num_edges_z(); }

    // Primal facets by normal direction (dual edges pair with these 1:1).
    std::size_t num_facets_x() const { return nx * (ny - 1) * (nz - 1); }
    std::size_t num_facets_y() const { return (nx - 1) * ny * (nz - 1); }
    std::size_t num_facets_z() const { return (nx - 1) * (ny - 1) * nz; }
    std::size_t num_facets() const { return num_facets_x() + num_facets_y() + num_facets_z(); }

    // Global index helpers for the fixed ordering above.
    std::size_t edge_x(std::size_t ix, std::size_t iy, std::size_t iz) const;
    std::size_t edge_y(std::size_t ix, std::size_t iy, std::size_t iz) const;
    std::size_t edge_z(std::size_t ix, std::size_t iy, std::size_t iz) const;
    std::size_t facet_x(std::size_t ix, std::size_t iy, std::size_t iz) const;
    std::size_t facet_y(std::size_t ix, std::size_t iy, std::size_t iz) const;
    std::size_t facet_z(std::size_t ix, std::size_t iy, std::size_t iz) const;
};

/// Staggered-grid operators: incidence curl, diagonal materials, PEC mask.
/// The semidiscrete system is
///   M_mu  dh/dt = -C e          (dual Faraday)
///   M_eps de/dt =  C^T h - j(t) (primal Ampere)
/// with state u = [h; e] and A = -M^{-1} K, K = [[0, C], [-C^T, 0]].
struct FitOperators {
    SparseMatrix c;       // primal curl incidence, num_facets x num_edges, entries +-1
    SparseMatrix c_dual;  // transpose of c (after masking, transpose of the masked c)
    std::vector<double> m_eps;  // diagonal, one entry per primal edge
    std::vector<double> m_mu;   // diagonal, one entry per primal facet
    std::vector<std::uint8_t> pec_mask;  // 1 = tangential boundary edge, held at zero
    std::size_t n_e = 0;
    std::size_t n_h = 0;
};

/// Gaussian line current i(t) = i_max * exp(-4 ((t - sigma_t)/sigma_t)^2)
/// imposed on the z-directed edges listed in `edges`.
struct WaveSourceConfig {
    double i_max = 1.0;     // A
    double sigma_t = 2e-8;  // s
    std::vector<std::size_t> edges;  // global primal-edge indices (z-directed)
};

/// Incidence curl: row per primal facet, +-1 entries over its four boundary
/// edges, composed from one-dimensional shift differences per axis.
SparseMatrix build_curl(const FitGrid& grid);

/// Homogeneous-medium material diagonals. m_eps[edge] = eps * (dual facet
/// area)/(edge length); m_mu[facet] = mu * (facet area)/(dual edge length).
/// Dual lengths/areas next to the boundary use half cells.
std::pair<std::vector<double>, std::vector<double>> build_materials(const FitGrid& grid,
                                                                    double eps, double mu);

/// Curl + materials + empty mask.
FitOperators assemble_operators(const FitGrid& grid, double eps, double mu);

/// Flags every tangential boundary edge and eliminates its couplings: the
/// masked columns of c are dropped and c_dual rebuilt as the transpose, so
/// K stays exactly skew and masked e-entries never receive an update.
FitOperators apply_pec(const FitOperators& ops, const FitGrid& grid);

double line_current(double t, const WaveSourceConfig& cfg);

/// Default source placement: the vertical column of z-edges at the central
/// (ix, iy) node (node counts should be odd in x and y for exact centering).
WaveSourceConfig centered_line_source(const FitGrid& grid, double i_max, double sigma_t);

/// A = -M^{-1} K assembled from the (possibly masked) operators.
SparseMatrix build_state_matrix(const FitOperators& ops);

/// What the Leapfrog integrate path needs beyond the plain ODE view.
struct FitSystemTerms {
    FitGrid grid;
    FitOperators ops;
    WaveSourceConfig source_cfg;
    SourceFn j_current;  // fills an n_e vector with the lumped current (A); may be null
};

/// Full cavity problem: PEC boundary, centered line current, u0 = 0.
/// sys.source is g(t) with g_e = -M_eps^{-1} j(t); sys.fit keeps the raw
/// operator split for the staggered stepper.
LinearOdeSystem build_wave_system(const FitGrid& grid, const WaveSourceConfig& cfg, double eps,
                                  double mu);

/// W = 1/2 (e^T M_eps e + h^T M_mu h), in joules.
double energy(const StateVector& e, const StateVector& h, const FitOperators& ops);

/// Energy of a full state u = [h; e].
double energy_of_state(const StateVector& u, const FitOperators& ops);

/// Views into a state u = [h; e].
StateVector h_part(const StateVector& u, const FitOperators& ops);
StateVector e_part(const StateVector& u, const FitOperators& ops);

/// One snapshot row per z-edge, in index order.
struct EzSample {
    std::size_t ix, iy, iz;
    double ez;  // V/m (edge voltage divided by dz)
};
std::vector<EzSample> ez_snapshot(const StateVector& u, const FitGrid& grid,
                                  const FitOperators& ops);

}  // namespace paraexp
