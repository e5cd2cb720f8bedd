#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <random>
#include <vector>

#include "paraexp/expm.hpp"
#include "paraexp/fitwave.hpp"
#include "paraexp/steppers.hpp"

using namespace paraexp;

namespace {

double uniform01(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// Mirror of build_materials' per-axis dual extent, for geometry oracles.
double dual_len_oracle(std::size_t i, std::size_t n, double d) {
    if (n == 2) return d;
    if (i == 0 || i + 1 == n) return 0.5 * d;
    return d;
}

// Nodal gradient: one row per primal edge, +1 at the head node, -1 at the
// tail node. Discrete calculus demands curl(grad(phi)) = 0 identically.
std::vector<std::vector<double>> nodal_gradient_dense(const FitGrid& g) {
    const std::size_t n_nodes = g.nx * g.ny * g.nz;
    auto node = [&](std::size_t ix, std::size_t iy, std::size_t iz) {
        return ix + g.nx * (iy + g.ny * iz);
    };
    std::vector<std::vector<double>> grad(g.num_edges(), std::vector<double>(n_nodes, 0.0));
    for (std::size_t iz = 0; iz < g.nz; ++iz)
        for (std::size_t iy = 0; iy < g.ny; ++iy)
            for (std::size_t ix = 0; ix < g.nx; ++ix) {
                if (ix + 1 < g.nx) {
                    grad[g.edge_x(ix, iy, iz)][node(ix + 1, iy, iz)] += 1.0;
                    grad[g.edge_x(ix, iy, iz)][node(ix, iy, iz)] -= 1.0;
                }
                if (iy + 1 < g.ny) {
                    grad[g.edge_y(ix, iy, iz)][node(ix, iy + 1, iz)] += 1.0;
                    grad[g.edge_y(ix, iy, iz)][node(ix, iy, iz)] -= 1.0;
                }
                if (iz + 1 < g.nz) {
                    grad[g.edge_z(ix, iy, iz)][node(ix, iy, iz + 1)] += 1.0;
                    grad[g.edge_z(ix, iy, iz)][node(ix, iy, iz)] -= 1.0;
                }
            }
    return grad;
}

// Cyclic Jacobi eigenvalues of a symmetric matrix (values only). Plenty for
// the ~200x200 spectral cross-checks below.
std::vector<double> jacobi_eigenvalues(std::vector<std::vector<double>> s) {
    const std::size_t n = s.size();
    double fro2 = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) fro2 += s[i][j] * s[i][j];

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off2 = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off2 += s[i][j] * s[i][j];
        if (off2 <= 1e-28 * fro2) break;

        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                if (s[p][q] == 0.0) continue;
                const double theta = (s[q][q] - s[p][p]) / (2.0 * s[p][q]);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double skp = s[k][p], skq = s[k][q];
                    s[k][p] = c * skp - sn * skq;
                    s[k][q] = sn * skp + c * skq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double spk = s[p][k], sqk = s[q][k];
                    s[p][k] = c * spk - sn * sqk;
                    s[q][k] = sn * spk + c * sqk;
                }
            }
    }
    std::vector<double> eig(n);
    for (std::size_t i = 0; i < n; ++i) eig[i] = s[i][i];
    return eig;
}

FitGrid make_grid(std::size_t nx, std::size_t ny, std::size_t nz) {
    FitGrid g;
    g.nx = nx;
    g.ny = ny;
    g.nz = nz;
    return g;
}

}  // namespace

TEST_CASE("edge and facet counts for the study grids") {
    const FitGrid g21 = make_grid(21, 21, 2);
    CHECK(g21.num_edges_x() == 840);
    CHECK(g21.num_edges_y() == 840);
    CHECK(g21.num_edges_z() == 441);
    CHECK(g21.num_edges() == 2121);
    CHECK(g21.num_facets_x() == 420);
    CHECK(g21.num_facets_y() == 420);
    CHECK(g21.num_facets_z() == 800);
    CHECK(g21.num_facets() == 1640);

    const FitGrid g7 = make_grid(7, 7, 2);
    CHECK(g7.num_edges() == 217);
    CHECK(g7.num_facets() == 156);

    const FitGrid g5 = make_grid(5, 5, 2);
    CHECK(g5.num_edges() == 105);
    CHECK(g5.num_facets() == 72);
}

TEST_CASE("grid validation rejects degenerate inputs") {
    CHECK_THROWS_AS(make_grid(1, 2, 2).validate(), std::invalid_argument);
    FitGrid g = make_grid(3, 3, 3);
    g.dx = 0.0;
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
}

TEST_CASE("every curl row has four unit entries summing to zero") {
    for (const FitGrid g : {make_grid(2, 2, 2), make_grid(4, 3, 3)}) {
        const SparseMatrix c = build_curl(g);
        CHECK(c.nrows == g.num_facets());
        CHECK(c.ncols == g.num_edges());
        for (std::size_t f = 0; f < c.nrows; ++f) {
            CHECK(c.row_offsets[f + 1] - c.row_offsets[f] == 4);
            double sum = 0.0;
            int plus = 0, minus = 0;
            for (std::size_t k = c.row_offsets[f]; k < c.row_offsets[f + 1]; ++k) {
                CHECK(std::abs(c.values[k]) == 1.0);
                sum += c.values[k];
                (c.values[k] > 0 ? plus : minus)++;
            }
            CHECK(sum == 0.0);
            CHECK(plus == 2);
            CHECK(minus == 2);
        }
    }
}

TEST_CASE("curl of a nodal gradient vanishes exactly") {
    const FitGrid g = make_grid(3, 3, 3);
    const SparseMatrix c = build_curl(g);
    const auto grad = nodal_gradient_dense(g);
    const std::size_t n_nodes = g.nx * g.ny * g.nz;

    // Dense product C * G: +-1 entries, so every coefficient is an exact
    // small integer and must be exactly zero.
    for (std::size_t f = 0; f < c.nrows; ++f)
        for (std::size_t v = 0; v < n_nodes; ++v) {
            double acc = 0.0;
            for (std::size_t k = c.row_offsets[f]; k < c.row_offsets[f + 1]; ++k)
                acc += c.values[k] * grad[c.col_indices[k]][v];
            CHECK(acc == 0.0);
        }

    // Same statement applied to an integer-valued potential.
    std::mt19937_64 eng(5);
    StateVector phi(n_nodes);
    for (double& v : phi) v = static_cast<double>(eng() % 17) - 8.0;
    StateVector e(g.num_edges(), 0.0);
    for (std::size_t row = 0; row < grad.size(); ++row)
        for (std::size_t v = 0; v < n_nodes; ++v) e[row] += grad[row][v] * phi[v];
    const StateVector circ = spmv(c, e);
    for (double v : circ) CHECK(v == 0.0);
}

TEST_CASE("a uniform axial field has zero circulation everywhere") {
    const FitGrid g = make_grid(3, 3, 3);
    const SparseMatrix c = build_curl(g);
    StateVector e(g.num_edges(), 0.0);
    for (std::size_t iz = 0; iz + 1 < g.nz; ++iz)
        for (std::size_t iy = 0; iy < g.ny; ++iy)
            for (std::size_t ix = 0; ix < g.nx; ++ix) e[g.edge_z(ix, iy, iz)] = 0.7;
    for (double v : spmv(c, e)) CHECK(v == 0.0);
}

TEST_CASE("material diagonals follow the dual-cell geometry") {
    FitGrid g = make_grid(4, 3, 3);
    g.dx = 2.0;
    g.dy = 3.0;
    g.dz = 5.0;
    const double eps = 2.0, mu = 7.0;
    const auto [m_eps, m_mu] = build_materials(g, eps, mu);

    CHECK(m_eps[g.edge_x(1, 1, 1)] ==
          eps * dual_len_oracle(1, 3, g.dy) * dual_len_oracle(1, 3, g.dz) / g.dx);
    CHECK(m_eps[g.edge_x(1, 1, 1)] == doctest::Approx(15.0).epsilon(1e-15));
    CHECK(m_eps[g.edge_y(0, 0, 1)] ==
          eps * dual_len_oracle(0, 4, g.dx) * dual_len_oracle(1, 3, g.dz) / g.dy);
    CHECK(m_eps[g.edge_z(3, 2, 0)] ==
          eps * dual_len_oracle(3, 4, g.dx) * dual_len_oracle(2, 3, g.dy) / g.dz);
    CHECK(m_eps[g.edge_z(3, 2, 0)] == doctest::Approx(0.6).epsilon(1e-15));

    CHECK(m_mu[g.facet_x(0, 1, 1)] == mu * g.dy * g.dz / dual_len_oracle(0, 4, g.dx));
    CHECK(m_mu[g.facet_x(0, 1, 1)] == doctest::Approx(105.0).epsilon(1e-15));
    CHECK(m_mu[g.facet_y(2, 0, 1)] == mu * g.dx * g.dz / dual_len_oracle(0, 3, g.dy));
    CHECK(m_mu[g.facet_z(2, 1, 2)] == mu * g.dx * g.dy / dual_len_oracle(2, 3, g.dz));
    CHECK(m_mu[g.facet_z(2, 1, 2)] == doctest::Approx(16.8).epsilon(1e-15));
}

TEST_CASE("unit geometry gives unit interior materials") {
    const FitGrid g = make_grid(3, 3, 3);
    const auto [m_eps, m_mu] = build_materials(g, 1.0, 1.0);
    CHECK(m_eps[g.edge_z(1, 1, 0)] == 1.0);  // both transverse duals interior
    CHECK(m_eps[g.edge_z(0, 0, 0)] == 0.25);  // two boundary halves
    CHECK(m_eps[g.edge_x(0, 1, 0)] == 0.5);   // one boundary half
    CHECK(m_mu[g.facet_x(1, 1, 1)] == 1.0);
    CHECK(m_mu[g.facet_z(0, 0, 0)] == 2.0);  // half dual edge at the boundary
    CHECK_THROWS_AS(build_materials(g, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("single-cell axis keeps the full dual extent") {
    const FitGrid g = make_grid(3, 3, 2);
    const auto [m_eps, m_mu] = build_materials(g, 1.0, 1.0);
    // nz = 2: the lone z-cell's dual extent is the whole cell, so z-facet and
    // x-edge entries see no z-halving.
    CHECK(m_mu[g.facet_z(1, 1, 0)] == 1.0);
    CHECK(m_eps[g.edge_x(1, 1, 0)] == 1.0);  // dual_len(iz=0, nz=2) = dz
    CHECK(m_eps[g.edge_x(1, 0, 0)] == 0.5);  // iy = 0 still halves
}

TEST_CASE("vacuum constants propagate into the cavity materials") {
    const FitGrid g = make_grid(21, 21, 2);
    const FitOperators ops = assemble_operators(g, kVacuumPermittivity, kVacuumPermeability);
    CHECK(ops.m_eps[g.edge_z(10, 10, 0)] == kVacuumPermittivity);
    CHECK(ops.m_mu[g.facet_z(0, 0, 0)] == kVacuumPermeability);
    CHECK(ops.n_e == 2121);
    CHECK(ops.n_h == 1640);
    CHECK(ops.c_dual.nrows == ops.n_e);
    CHECK(ops.c_dual.ncols == ops.n_h);
}

TEST_CASE("pec mask keeps exactly the interior axial edges") {
    const FitGrid g = make_grid(21, 21, 2);
    const FitOperators ops = apply_pec(
        assemble_operators(g, kVacuumPermittivity, kVacuumPermeability), g);

    std::size_t free_count = 0;
    for (std::size_t e = 0; e < ops.n_e; ++e)
        if (!ops.pec_mask[e]) ++free_count;
    CHECK(free_count == 361);

    // With nz = 2 every x- and y-edge touches a z-boundary plane.
    for (std::size_t e = 0; e < g.num_edges_x() + g.num_edges_y(); ++e)
        CHECK(ops.pec_mask[e] == 1);
    for (std::size_t iy = 0; iy < g.ny; ++iy)
        for (std::size_t ix = 0; ix < g.nx; ++ix) {
            const bool boundary = ix == 0 || ix == g.nx - 1 || iy == 0 || iy == g.ny - 1;
            CHECK(ops.pec_mask[g.edge_z(ix, iy, 0)] == (boundary ? 1 : 0));
        }

    // Masked columns are dropped entirely; every free column keeps its four
    // adjacent circulations.
    std::vector<std::size_t> col_count(ops.n_e, 0);
    for (std::size_t k = 0; k < ops.c.nnz(); ++k) ++col_count[ops.c.col_indices[k]];
    for (std::size_t e = 0; e < ops.n_e; ++e)
        CHECK(col_count[e] == (ops.pec_mask[e] ? 0u : 4u));
    CHECK(ops.c.nnz() == 4 * 361);

    const FitGrid g5 = make_grid(5, 5, 2);
    const FitOperators ops5 = apply_pec(assemble_operators(g5, 1.0, 1.0), g5);
    std::size_t free5 = 0;
    for (std::size_t e = 0; e < ops5.n_e; ++e)
        if (!ops5.pec_mask[e]) ++free5;
    CHECK(free5 == 9);

    // The 2x2x2 cavity is all boundary: nothing survives.
    const FitGrid g2 = make_grid(2, 2, 2);
    const FitOperators ops2 = apply_pec(assemble_operators(g2, 1.0, 1.0), g2);
    for (std::size_t e = 0; e < ops2.n_e; ++e) CHECK(ops2.pec_mask[e] == 1);
    CHECK(ops2.c.nnz() == 0);
}

TEST_CASE("masked dual curl is the exact transpose, so K stays skew") {
    const FitGrid g = make_grid(5, 5, 2);
    const FitOperators ops = apply_pec(assemble_operators(g, 1.0, 1.0), g);

    const SparseMatrix ct = transpose(ops.c);
    CHECK(ops.c_dual.row_offsets == ct.row_offsets);
    CHECK(ops.c_dual.col_indices == ct.col_indices);
    CHECK(ops.c_dual.values == ct.values);

    // Dense K = [[0, C], [-C^T, 0]]: K + K^T must vanish entry by entry.
    const std::size_t n = ops.n_h + ops.n_e;
    std::vector<std::vector<double>> kmat(n, std::vector<double>(n, 0.0));
    for (std::size_t f = 0; f < ops.c.nrows; ++f)
        for (std::size_t k = ops.c.row_offsets[f]; k < ops.c.row_offsets[f + 1]; ++k)
            kmat[f][ops.n_h + ops.c.col_indices[k]] = ops.c.values[k];
    for (std::size_t e = 0; e < ops.c_dual.nrows; ++e)
        for (std::size_t k = ops.c_dual.row_offsets[e]; k < ops.c_dual.row_offsets[e + 1]; ++k)
            kmat[ops.n_h + e][ops.c_dual.col_indices[k]] = -ops.c_dual.values[k];
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) CHECK(kmat[i][j] + kmat[j][i] == 0.0);
}

TEST_CASE("line current is a unit-peak gaussian pulse") {
    WaveSourceConfig cfg;
    cfg.i_max = 1.0;
    cfg.sigma_t = 2e-8;
    CHECK(line_current(cfg.sigma_t, cfg) == 1.0);
    CHECK(line_current(0.0, cfg) == doctest::Approx(0.018315638888734179).epsilon(1e-15));
    CHECK(line_current(2.0 * cfg.sigma_t, cfg) == line_current(0.0, cfg));

    cfg.i_max = 2.5;
    CHECK(line_current(cfg.sigma_t, cfg) == 2.5);

    cfg.sigma_t = 0.0;
    CHECK_THROWS_AS(line_current(0.0, cfg), std::invalid_argument);
}

TEST_CASE("centered line source targets the axis column") {
    const FitGrid g21 = make_grid(21, 21, 2);
    const WaveSourceConfig s21 = centered_line_source(g21, 1.0, 2e-8);
    REQUIRE(s21.edges.size() == 1);
    CHECK(s21.edges[0] == g21.edge_z(10, 10, 0));

    const FitGrid g73 = make_grid(7, 7, 3);
    const WaveSourceConfig s73 = centered_line_source(g73, 1.0, 2e-8);
    REQUIRE(s73.edges.size() == 2);
    CHECK(s73.edges[0] == g73.edge_z(3, 3, 0));
    CHECK(s73.edges[1] == g73.edge_z(3, 3, 1));
}

TEST_CASE("wave system rejects masked or out-of-range source edges") {
    const FitGrid g = make_grid(5, 5, 2);
    WaveSourceConfig cfg;
    cfg.edges = {g.edge_z(0, 0, 0)};  // lateral boundary -> masked
    CHECK_THROWS_AS(build_wave_system(g, cfg, kVacuumPermittivity, kVacuumPermeability),
                    std::invalid_argument);
    cfg.edges = {g.num_edges()};
    CHECK_THROWS_AS(build_wave_system(g, cfg, kVacuumPermittivity, kVacuumPermeability),
                    std::invalid_argument);
}

TEST_CASE("zero current leaves the cavity exactly at rest") {
    const FitGrid g = make_grid(5, 5, 2);
    const LinearOdeSystem sys = build_wave_system(g, centered_line_source(g, 0.0, 2e-8),
                                                  kVacuumPermittivity, kVacuumPermeability);
    const SampledSolution sol = integrate(sys, 0.0, 1e-8, 1e-9, StepperKind::RK4);
    for (const auto& u : sol.states)
        for (double v : u) CHECK(v == 0.0);
}

TEST_CASE("masked entries stay bitwise zero over 100 driven steps") {
    const FitGrid g = make_grid(7, 7, 2);
    const LinearOdeSystem sys = build_wave_system(g, centered_line_source(g, 1.0, 2e-8),
                                                  kVacuumPermittivity, kVacuumPermeability);
    const FitOperators& ops = sys.fit->ops;
    for (StepperKind kind : {StepperKind::RK4, StepperKind::Leapfrog}) {
        const SampledSolution sol = integrate(sys, 0.0, 100e-9, 1e-9, kind);
        REQUIRE(sol.size() == 101);
        bool excited = false;
        for (const auto& u : sol.states) {
            for (std::size_t e = 0; e < ops.n_e; ++e)
                if (ops.pec_mask[e]) CHECK(u[ops.n_h + e] == 0.0);
            excited = excited || weighted_norms(u).max_abs > 0.0;
        }
        CHECK(excited);  // the drive really did inject a field
    }
}

TEST_CASE("energy quadrature on hand-checkable states") {
    const FitGrid g = make_grid(3, 3, 3);
    const FitOperators ops = assemble_operators(g, 1.0, 1.0);

    StateVector e(ops.n_e, 0.0), h(ops.n_h, 0.0);
    CHECK(energy(e, h, ops) == 0.0);

    e[g.edge_z(1, 1, 0)] = 1.0;  // m_eps = 1 there
    CHECK(energy(e, h, ops) == 0.5);

    h[g.facet_x(1, 1, 1)] = 1.0;  // m_mu = 1 there
    CHECK(energy(e, h, ops) == 1.0);

    StateVector u(ops.n_h + ops.n_e, 0.0);
    u[g.facet_x(1, 1, 1)] = 1.0;
    u[ops.n_h + g.edge_z(1, 1, 0)] = 1.0;
    CHECK(energy_of_state(u, ops) == energy(e, h, ops));

    CHECK_THROWS_AS(energy(h, e, ops), std::invalid_argument);  // swapped parts
}

TEST_CASE("exact propagation conserves the cavity energy") {
    const FitGrid g = make_grid(7, 7, 2);
    const LinearOdeSystem base = build_wave_system(g, centered_line_source(g, 1.0, 2e-8),
                                                   kVacuumPermittivity, kVacuumPermeability);
    const FitOperators& ops = base.fit->ops;

    std::mt19937_64 eng(99);
    StateVector u(ops.n_h + ops.n_e, 0.0);
    for (std::size_t f = 0; f < ops.n_h; ++f) u[f] = uniform01(eng) * 2.0 - 1.0;
    for (std::size_t e = 0; e < ops.n_e; ++e)
        if (!ops.pec_mask[e]) u[ops.n_h + e] = uniform01(eng) * 2.0 - 1.0;

    const double w0 = energy_of_state(u, ops);
    REQUIRE(w0 > 0.0);
    const DenseMatrix step = expm_dense(base.a, 1e-9);
    for (int k = 0; k < 10; ++k) {
        u = paraexp::apply(step, u);
        CHECK(std::abs(energy_of_state(u, ops) - w0) / w0 <= 1e-10);
    }
}

TEST_CASE("leapfrog locality: the field cannot outrun the stencil") {
    const FitGrid g = make_grid(7, 7, 2);
    const LinearOdeSystem sys = build_wave_system(g, centered_line_source(g, 1.0, 2e-8),
                                                  kVacuumPermittivity, kVacuumPermeability);
    const FitOperators& ops = sys.fit->ops;

    StateVector h(ops.n_h, 0.0), e(ops.n_e, 0.0);
    const double dt = 1e-9;
    double t = 0.0;
    for (int n = 1; n <= 3; ++n) {
        std::tie(h, e) = leapfrog_step(ops, h, e, t, dt, sys.fit->j_current);
        t += dt;
        // After n steps the support of e is the Manhattan ball of radius n-1
        // around the source column; everything beyond is bitwise untouched.
        for (std::size_t iy = 0; iy < g.ny; ++iy)
            for (std::size_t ix = 0; ix < g.nx; ++ix) {
                const std::size_t dist = (ix > 3 ? ix - 3 : 3 - ix) + (iy > 3 ? iy - 3 : 3 - iy);
                if (dist >= static_cast<std::size_t>(n)) CHECK(e[g.edge_z(ix, iy, 0)] == 0.0);
            }
        CHECK(e[g.edge_z(3, 3, 0)] != 0.0);
    }
}

TEST_CASE("driven field is symmetric under quarter turns") {
    const FitGrid g = make_grid(7, 7, 2);
    const LinearOdeSystem sys = build_wave_system(g, centered_line_source(g, 1.0, 2e-8),
                                                  kVacuumPermittivity, kVacuumPermeability);
    const SampledSolution sol = integrate(sys, 0.0, 2e-8, 1e-9, StepperKind::RK4);
    const auto rows = ez_snapshot(sol.states.back(), g, sys.fit->ops);

    auto ez_at = [&](std::size_t ix, std::size_t iy) {
        return rows[ix + g.nx * iy].ez;
    };
    double max_abs = 0.0;
    for (const auto& r : rows) max_abs = std::max(max_abs, std::abs(r.ez));
    REQUIRE(max_abs > 0.0);
    for (std::size_t iy = 0; iy < g.ny; ++iy)
        for (std::size_t ix = 0; ix < g.nx; ++ix)
            CHECK(std::abs(ez_at(ix, iy) - ez_at(iy, g.nx - 1 - ix)) <= 1e-12 * max_abs);
}

TEST_CASE("snapshot rows follow the axial index order") {
    FitGrid g = make_grid(4, 3, 2);
    g.dz = 0.5;
    const FitOperators ops = assemble_operators(g, 1.0, 1.0);
    StateVector u(ops.n_h + ops.n_e, 0.0);
    u[ops.n_h + g.edge_z(2, 1, 0)] = 3.0;

    const auto rows = ez_snapshot(u, g, ops);
    REQUIRE(rows.size() == g.num_edges_z());
    const auto& r = rows[2 + g.nx * 1];
    CHECK(r.ix == 2);
    CHECK(r.iy == 1);
    CHECK(r.iz == 0);
    CHECK(r.ez == 6.0);  // edge voltage / dz

    CHECK_THROWS_AS(ez_snapshot(u, make_grid(3, 3, 3), ops), std::invalid_argument);
}

TEST_CASE("cavity spectrum is imaginary and matches the power-iteration estimate") {
    const FitGrid g = make_grid(5, 5, 2);
    const FitOperators ops = apply_pec(
        assemble_operators(g, kVacuumPermittivity, kVacuumPermeability), g);

    // B = M^{-1/2} K M^{-1/2} is skew, so B^2 is symmetric negative
    // semidefinite; its eigenvalues are exactly -omega^2.
    const std::size_t n = ops.n_h + ops.n_e;
    std::vector<std::vector<double>> b(n, std::vector<double>(n, 0.0));
    for (std::size_t f = 0; f < ops.c.nrows; ++f)
        for (std::size_t k = ops.c.row_offsets[f]; k < ops.c.row_offsets[f + 1]; ++k) {
            const std::size_t e = ops.c.col_indices[k];
            const double v = ops.c.values[k] / std::sqrt(ops.m_mu[f] * ops.m_eps[e]);
            b[f][ops.n_h + e] = v;
            b[ops.n_h + e][f] = -v;
        }
    std::vector<std::vector<double>> b2(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            if (b[i][k] == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) b2[i][j] += b[i][k] * b[k][j];
        }

    const std::vector<double> eig = jacobi_eigenvalues(b2);
    double min_eig = 0.0;
    for (double v : eig) min_eig = std::min(min_eig, v);
    const double omega_jacobi = std::sqrt(-min_eig);
    for (double v : eig) CHECK(v <= 1e-10 * (-min_eig));

    // Independently computed: omega_max(5x5x2) = 7.83395e8 rad/s.
    CHECK(omega_jacobi == doctest::Approx(7.8339544557e8).epsilon(1e-6));

    const CflEstimate cfl = estimate_cfl(build_state_matrix(ops));
    CHECK(std::abs(cfl.omega_max - omega_jacobi) <= 0.01 * omega_jacobi);
}
