#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "rrcollapse/errors.hpp"
#include "rrcollapse/grid.hpp"

namespace rrc {

/// Symmetric tridiagonal discretization of -hbar^2/(2m) d^2/dx^2 + V(x)
/// with Dirichlet boundaries.
struct TridiagonalHamiltonian {
    std::vector<double> diag;
    std::vector<double> off;  // size n-1, all equal for a uniform grid
};

inline TridiagonalHamiltonian build_hamiltonian(const Grid1D& grid,
                                                const PotentialSpec& potential,
                                                double mass, double hbar) {
    if (!(mass > 0.0) || !(hbar > 0.0))
        throw Error("build_hamiltonian: mass and hbar must be positive");
    const int n = grid.n_points();
    const double dx = grid.dx();
    const double kin = hbar * hbar / (mass * dx * dx);
    const std::vector<double> v = potential.sample(grid, mass);

    TridiagonalHamiltonian h;
    h.diag.resize(n);
    h.off.assign(n - 1, -0.5 * kin);
    for (int i = 0; i < n; ++i) h.diag[i] = kin + v[i];
    return h;
}

/// Lowest eigenpairs of the discretized Schroedinger problem.
/// States are real, grid-orthonormal (sum psi_j psi_k dx = delta_jk) and
/// sign-fixed so the first nonzero sample from the left is positive.
struct EigenBasis {
    Grid1D grid;
    std::vector<double> energies;  // ascending
    Eigen::MatrixXd states;        // n_points x n_states
    int n_states = 0;
    double mass = 1.0;
    double hbar = 1.0;
};

inline int count_nodes(const Eigen::Ref<const Eigen::VectorXd>& psi) {
    const double thresh = 1e-8 * psi.cwiseAbs().maxCoeff();
    int nodes = 0;
    double last = 0.0;
    for (int i = 0; i < psi.size(); ++i) {
        const double s = psi[i];
        if (std::abs(s) < thresh) continue;
        if (last != 0.0 && std::signbit(s) != std::signbit(last)) ++nodes;
        last = s;
    }
    return nodes;
}

inline EigenBasis solve_eigenproblem(const Grid1D& grid, const PotentialSpec& potential,
                                     int n_states, double mass = 1.0, double hbar = 1.0) {
    if (n_states < 1 || n_states > grid.n_points())
        throw Error("solve_eigenproblem: need 1 <= n_states <= n_points");
    const TridiagonalHamiltonian h = build_hamiltonian(grid, potential, mass, hbar);
    const int n = grid.n_points();

    Eigen::Map<const Eigen::VectorXd> diag(h.diag.data(), n);
    Eigen::Map<const Eigen::VectorXd> off(h.off.data(), n - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success)
        throw SolverFailureError("tridiagonal eigensolver failed to converge",
                                 30 * n /* Eigen's internal iteration cap */);

    EigenBasis basis{grid, {}, {}, n_states, mass, hbar};
    basis.energies.resize(n_states);
    basis.states.resize(n, n_states);
    const double scale = 1.0 / std::sqrt(grid.dx());
    for (int k = 0; k < n_states; ++k) {
        basis.energies[k] = solver.eigenvalues()[k];
        basis.states.col(k) = solver.eigenvectors().col(k) * scale;
    }

    // Near-degenerate pairs: order by node count (fewer nodes first).
    const double escale = std::max(std::abs(basis.energies.front()),
                                   std::abs(basis.energies.back()));
    for (int k = 0; k + 1 < n_states; ++k) {
        if (std::abs(basis.energies[k + 1] - basis.energies[k]) < 1e-12 * escale &&
            count_nodes(basis.states.col(k)) > count_nodes(basis.states.col(k + 1))) {
            std::swap(basis.energies[k], basis.energies[k + 1]);
            basis.states.col(k).swap(basis.states.col(k + 1));
        }
    }

    for (int k = 0; k < n_states; ++k) {
        const auto col = basis.states.col(k);
        const double thresh = 1e-8 * col.cwiseAbs().maxCoeff();
        for (int i = 0; i < n; ++i) {
            if (std::abs(col[i]) > thresh) {
                if (col[i] < 0.0) basis.states.col(k) = -col;
                break;
            }
        }
    }
    return basis;
}

/// d_jk = sum_i psi_j(x_i) x_i psi_k(x_i) dx, the position matrix in the
/// eigenbasis.
inline Eigen::MatrixXd dipole_matrix(const EigenBasis& basis) {
    const int n = basis.grid.n_points();
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x[i] = basis.grid.point(i);
    Eigen::MatrixXd weighted = x.asDiagonal() * basis.states;
    Eigen::MatrixXd d = basis.states.transpose() * weighted * basis.grid.dx();
    // enforce exact symmetry against roundoff in the matrix product
    d = 0.5 * (d + d.transpose()).eval();
    return d;
}

}  // namespace rrc
