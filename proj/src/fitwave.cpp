#include "paraexp/fitwave.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>
#include <utility>

namespace paraexp {

void FitGrid::validate() const {
    if (nx < 2 || ny < 2 || nz < 2)
        throw std::invalid_argument("fit grid: need at least 2 nodes per axis");
    if (!(dx > 0.0 && dy > 0.0 && dz > 0.0))
        throw std::invalid_argument("fit grid: spacings must be positive");
}

std::size_t FitGrid::edge_x(std::size_t ix, std::size_t iy, std::size_t iz) const {
    return ix + (nx - 1) * (iy + ny * iz);
}
std::size_t FitGrid::edge_y(std::size_t ix, std::size_t iy, std::size_t iz) const {
    return num_edges_x() + ix + nx * (iy + (ny - 1) * iz);
}
std::size_t FitGrid::edge_z(std::size_t ix, std::size_t iy, std::size_t iz) const {
    return num_edges_x() + num_edges_y() + ix + nx * (iy + ny * iz);
}
std::size_t FitGrid::facet_x(std::size_t ix, std::size_t iy, std::size_t iz) const {
    return ix + nx * (iy + (ny - 1) * iz);
}
std::size_t FitGrid::facet_y(std::size_t ix, std::size_t iy, std::size_t iz) const {
    return num_facets_x() + ix + (nx - 1) * (iy + ny * iz);
}
std::size_t FitGrid::facet_z(std::size_t ix, std::size_t iy, std::size_t iz) const {
    return num_facets_x() + num_facets_y() + ix + (nx - 1) * (iy + (ny - 1) * iz);
}

SparseMatrix build_curl(const FitGrid& g) {
    g.validate();
    SparseBuilder b(g.num_facets(), g.num_edges());

    // x-normal facets: circulation = d_y(Ez) - d_z(Ey)
    for (std::size_t iz = 0; iz + 1 < g.nz; ++iz)
        for (std::size_t iy = 0; iy + 1 < g.ny; ++iy)
            for (std::size_t ix = 0; ix < g.nx; ++ix) {
                const std::size_t f = g.facet_x(ix, iy, iz);
                b.add(f, g.edge_z(ix, iy + 1, iz), +1.0);
                b.add(f, g.edge_z(ix, iy, iz), -1.0);
                b.add(f, g.edge_y(ix, iy, iz + 1), -1.0);
                b.add(f, g.edge_y(ix, iy, iz), +1.0);
            }
    // y-normal facets: circulation = d_z(Ex) - d_x(Ez)
    for (std::size_t iz = 0; iz + 1 < g.nz; ++iz)
        for (std::size_t iy = 0; iy < g.ny; ++iy)
            for (std::size_t ix = 0; ix + 1 < g.nx; ++ix) {
                const std::size_t f = g.facet_y(ix, iy, iz);
                b.add(f, g.edge_x(ix, iy, iz + 1), +1.0);
                b.add(f, g.edge_x(ix, iy, iz), -1.0);
                b.add(f, g.edge_z(ix + 1, iy, iz), -1.0);
                b.add(f, g.edge_z(ix, iy, iz), +1.0);
            }
    // z-normal facets: circulation = d_x(Ey) - d_y(Ex)
    for (std::size_t iz = 0; iz < g.nz; ++iz)
        for (std::size_t iy = 0; iy + 1 < g.ny; ++iy)
            for (std::size_t ix = 0; ix + 1 < g.nx; ++ix) {
                const std::size_t f = g.facet_z(ix, iy, iz);
                b.add(f, g.edge_y(ix + 1, iy, iz), +1.0);
                b.add(f, g.edge_y(ix, iy, iz), -1.0);
                b.add(f, g.edge_x(ix, iy + 1, iz), -1.0);
                b.add(f, g.edge_x(ix, iy, iz), +1.0);
            }
    return b.build();
}

namespace {

// Dual extent along one axis at node index i: half a cell at the two ends.
double dual_len(std::size_t i, std::size_t n, double d) {
    if (n == 2) return d;  // degenerate: single cell, both halves
    if (i == 0 || i + 1 == n) return 0.5 * d;
    return d;
}

}  // namespace

std::pair<std::vector<double>, std::vector<double>> build_materials(const FitGrid& g, double eps,
                                                                    double mu) {
    g.validate();
    if (!(eps > 0.0 && mu > 0.0))
        throw std::invalid_argument("build_materials: eps, mu must be positive");

    std::vector<double> m_eps(g.num_edges(), 0.0);
    std::vector<double> m_mu(g.num_facets(), 0.0);

    // m_eps[edge] = eps * (dual facet area) / (primal edge length);
    // the dual facet spans the dual extents of the two transverse axes.
    for (std::size_t iz = 0; iz < g.nz; ++iz)
        for (std::size_t iy = 0; iy < g.ny; ++iy) {
            for (std::size_t ix = 0; ix + 1 < g.nx; ++ix)
                m_eps[g.edge_x(ix, iy, iz)] =
                    eps * dual_len(iy, g.ny, g.dy) * dual_len(iz, g.nz, g.dz) / g.dx;
            for (std::size_t ix = 0; ix < g.nx; ++ix) {
                if (iy + 1 < g.ny)
                    m_eps[g.edge_y(ix, iy, iz)] =
                        eps * dual_len(ix, g.nx, g.dx) * dual_len(iz, g.nz, g.dz) / g.dy;
                if (iz + 1 < g.nz)
                    m_eps[g.edge_z(ix, iy, iz)] =
                        eps * dual_len(ix, g.nx, g.dx) * dual_len(iy, g.ny, g.dy) / g.dz;
            }
        }

    // m_mu[facet] = mu * (primal facet area) / (dual edge length); the dual
    // edge crosses the facet along its normal axis.
    for (std::size_t iz = 0; iz + 1 < g.nz; ++iz)
        for (std::size_t iy = 0; iy + 1 < g.ny; ++iy)
            for (std::size_t ix = 0; ix < g.nx; ++ix)
                m_mu[g.facet_x(ix, iy, iz)] = mu * g.dy * g.dz / dual_len(ix, g.nx, g.dx);
    for (std::size_t iz = 0; iz + 1 < g.nz; ++iz)
        for (std::size_t iy = 0; iy < g.ny; ++iy)
            for (std::size_t ix = 0; ix + 1 < g.nx; ++ix)
                m_mu[g.facet_y(ix, iy, iz)] = mu * g.dx * g.dz / dual_len(iy, g.ny, g.dy);
    for (std::size_t iz = 0; iz < g.nz; ++iz)
        for (std::size_t iy = 0; iy + 1 < g.ny; ++iy)
            for (std::size_t ix = 0; ix + 1 < g.nx; ++ix)
                m_mu[g.facet_z(ix, iy, iz)] = mu * g.dx * g.dy / dual_len(iz, g.nz, g.dz);

    return {std::move(m_eps), std::move(m_mu)};
}

FitOperators assemble_operators(const FitGrid& g, double eps, double mu) {
    FitOperators ops;
    ops.c = build_curl(g);
    ops.c_dual = transpose(ops.c);
    auto mats = build_materials(g, eps, mu);
    ops.m_eps = std::move(mats.first);
    ops.m_mu = std::move(mats.second);
    ops.n_e = g.num_edges();
    ops.n_h = g.num_facets();
    ops.pec_mask.assign(ops.n_e, 0);
    return ops;
}

FitOperators apply_pec(const FitOperators& ops, const FitGrid& g) {
    FitOperators out = ops;
    out.pec_mask.assign(ops.n_e, 0);

    // An edge is tangential to the boundary iff any transverse index sits on
    // a boundary plane.
    for (std::size_t iz = 0; iz < g.nz; ++iz)
        for (std::size_t iy = 0; iy < g.ny; ++iy) {
            for (std::size_t ix = 0; ix + 1 < g.nx; ++ix)
                if (iy == 0 || iy + 1 == g.ny || iz == 0 || iz + 1 == g.nz)
                    out.pec_mask[g.edge_x(ix, iy, iz)] = 1;
            for (std::size_t ix = 0; ix < g.nx; ++ix) {
                if (iy + 1 < g.ny && (ix == 0 || ix + 1 == g.nx || iz == 0 || iz + 1 == g.nz))
                    out.pec_mask[g.edge_y(ix, iy, iz)] = 1;
                if (iz + 1 < g.nz && (ix == 0 || ix + 1 == g.nx || iy == 0 || iy + 1 == g.ny))
                    out.pec_mask[g.edge_z(ix, iy, iz)] = 1;
            }
        }

    // Drop every coupling into a masked edge: zero the masked columns of c.
    SparseBuilder b(ops.c.nrows, ops.c.ncols);
    for (std::size_t f = 0; f < ops.c.nrows; ++f)
        for (std::size_t k = ops.c.row_offsets[f]; k < ops.c.row_offsets[f + 1]; ++k) {
            const std::size_t e = ops.c.col_indices[k];
            if (!out.pec_mask[e]) b.add(f, e, ops.c.values[k]);
        }
    out.c = b.build();
    out.c_dual = transpose(out.c);
    return out;
}

double line_current(double t, const WaveSourceConfig& cfg) {
    if (!(cfg.sigma_t > 0.0)) throw std::invalid_argument("line_current: sigma_t must be > 0");
    const double q = (t - cfg.sigma_t) / cfg.sigma_t;
    return cfg.i_max * std::exp(-4.0 * q * q);
}

WaveSourceConfig centered_line_source(const FitGrid& g, double i_max, double sigma_t) {
    WaveSourceConfig cfg;
    cfg.i_max = i_max;
    cfg.sigma_t = sigma_t;
    const std::size_t ix = (g.nx - 1) / 2;
    const std::size_t iy = (g.ny - 1) / 2;
    for (std::size_t iz = 0; iz + 1 < g.nz; ++iz) cfg.edges.push_back(g.edge_z(ix, iy, iz));
    return cfg;
}

SparseMatrix build_state_matrix(const FitOperators& ops) {
    // u = [h; e]: rows 0..n_h-1 give dh/dt = -M_mu^{-1} C e,
    // rows n_h.. give de/dt = M_eps^{-1} C^T h.
    SparseBuilder b(ops.n_h + ops.n_e, ops.n_h + ops.n_e);
    for (std::size_t f = 0; f < ops.c.nrows; ++f)
        for (std::size_t k = ops.c.row_offsets[f]; k < ops.c.row_offsets[f + 1]; ++k)
            b.add(f, ops.n_h + ops.c.col_indices[k], -ops.c.values[k] / ops.m_mu[f]);
    for (std::size_t e = 0; e < ops.c_dual.nrows; ++e)
        for (std::size_t k = ops.c_dual.row_offsets[e]; k < ops.c_dual.row_offsets[e + 1]; ++k)
            b.add(ops.n_h + e, ops.c_dual.col_indices[k], ops.c_dual.values[k] / ops.m_eps[e]);
    return b.build();
}

LinearOdeSystem build_wave_system(const FitGrid& grid, const WaveSourceConfig& cfg, double eps,
                                  double mu) {
    grid.validate();
    FitOperators ops = apply_pec(assemble_operators(grid, eps, mu), grid);
    for (std::size_t e : cfg.edges) {
        if (e >= ops.n_e) throw std::invalid_argument("wave source: edge index out of range");
        if (ops.pec_mask[e])
            throw std::invalid_argument("wave source: edge is PEC-masked");
    }

    auto terms = std::make_shared<FitSystemTerms>();
    terms->grid = grid;
    terms->ops = ops;
    terms->source_cfg = cfg;
    const WaveSourceConfig src = cfg;
    const std::size_t n_e = ops.n_e;
    terms->j_current = [src, n_e](double t, StateVector& out) {
        if (out.size() != n_e) out.assign(n_e, 0.0);
        const double i = line_current(t, src);
        for (std::size_t e : src.edges) out[e] += i;
    };

    LinearOdeSystem sys;
    sys.a = build_state_matrix(ops);
    sys.u0.assign(ops.n_h + ops.n_e, 0.0);
    sys.t0 = 0.0;
    const std::size_t n_h = ops.n_h;
    std::vector<double> inv_eps_on_source;
    inv_eps_on_source.reserve(src.edges.size());
    for (std::size_t e : src.edges) inv_eps_on_source.push_back(1.0 / ops.m_eps[e]);
    sys.source = [src, n_h, inv_eps_on_source](double t, StateVector& out) {
        const double i = line_current(t, src);
        for (std::size_t k = 0; k < src.edges.size(); ++k)
            out[n_h + src.edges[k]] -= i * inv_eps_on_source[k];
    };
    sys.fit = std::move(terms);
    return sys;
}

double energy(const StateVector& e, const StateVector& h, const FitOperators& ops) {
    if (e.size() != ops.n_e || h.size() != ops.n_h)
        throw std::invalid_argument("energy: dimension mismatch");
    double we = 0.0, wh = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) we += ops.m_eps[i] * e[i] * e[i];
    for (std::size_t i = 0; i < h.size(); ++i) wh += ops.m_mu[i] * h[i] * h[i];
    return 0.5 * (we + wh);
}

double energy_of_state(const StateVector& u, const FitOperators& ops) {
    return energy(e_part(u, ops), h_part(u, ops), ops);
}

StateVector h_part(const StateVector& u, const FitOperators& ops) {
    if (u.size() != ops.n_h + ops.n_e) throw std::invalid_argument("h_part: dimension mismatch");
    return StateVector(u.begin(), u.begin() + static_cast<std::ptrdiff_t>(ops.n_h));
}

StateVector e_part(const StateVector& u, const FitOperators& ops) {
    if (u.size() != ops.n_h + ops.n_e) throw std::invalid_argument("e_part: dimension mismatch");
    return StateVector(u.begin() + static_cast<std::ptrdiff_t>(ops.n_h), u.end());
}

std::vector<EzSample> ez_snapshot(const StateVector& u, const FitGrid& g,
                                  const FitOperators& ops) {
    if (g.num_edges() != ops.n_e)
        throw std::invalid_argument("ez_snapshot: grid does not match operators");
    const StateVector e = e_part(u, ops);
    std::vector<EzSample> rows;
    rows.reserve(g.num_edges_z());
    for (std::size_t iz = 0; iz + 1 < g.nz; ++iz)
        for (std::size_t iy = 0; iy < g.ny; ++iy)
            for (std::size_t ix = 0; ix < g.nx; ++ix)
                rows.push_back({ix, iy, iz, e[g.edge_z(ix, iy, iz)] / g.dz});
    return rows;
}

}  // namespace paraexp
