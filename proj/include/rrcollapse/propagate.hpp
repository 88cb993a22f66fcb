#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <vector>

#include "rrcollapse/errors.hpp"
#include "rrcollapse/wavefunction.hpp"

namespace rrc {

/// Crank-Nicolson propagator for a fixed tridiagonal Hamiltonian:
///   (1 + i dt H / 2 hbar) psi' = (1 - i dt H / 2 hbar) psi
/// Unitary to round-off; the tridiagonal solve is a Thomas sweep.
class CrankNicolson {
  public:
    CrankNicolson(const TridiagonalHamiltonian& h, double dt, double hbar)
        : dt_(dt), n_(static_cast<int>(h.diag.size())) {
        const Complex alpha(0.0, dt / (2.0 * hbar));
        bp_.resize(n_);
        bm_.resize(n_);
        off_p_.resize(n_ - 1);
        off_m_.resize(n_ - 1);
        for (int i = 0; i < n_; ++i) {
            bp_[i] = 1.0 + alpha * h.diag[i];
            bm_[i] = 1.0 - alpha * h.diag[i];
        }
        for (int i = 0; i + 1 < n_; ++i) {
            off_p_[i] = alpha * h.off[i];
            off_m_[i] = -alpha * h.off[i];
        }
        // Precompute the forward-elimination coefficients (matrix is constant).
        cprime_.resize(n_ - 1);
        denom_.resize(n_);
        denom_[0] = bp_[0];
        cprime_[0] = off_p_[0] / denom_[0];
        for (int i = 1; i < n_; ++i) {
            denom_[i] = bp_[i] - off_p_[i - 1] * cprime_[i - 1];
            if (i + 1 < n_) cprime_[i] = off_p_[i] / denom_[i];
        }
    }

    double dt() const { return dt_; }

    void step(Eigen::VectorXcd& psi) const {
        rhs_.resize(n_);
        for (int i = 0; i < n_; ++i) {
            Complex v = bm_[i] * psi[i];
            if (i > 0) v += off_m_[i - 1] * psi[i - 1];
            if (i + 1 < n_) v += off_m_[i] * psi[i + 1];
            rhs_[i] = v;
        }
        psi[0] = rhs_[0] / denom_[0];
        for (int i = 1; i < n_; ++i)
            psi[i] = (rhs_[i] - off_p_[i - 1] * psi[i - 1]) / denom_[i];
        for (int i = n_ - 2; i >= 0; --i)
            psi[i] -= cprime_[i] * psi[i + 1];
    }

  private:
    double dt_;
    int n_;
    std::vector<Complex> bp_, bm_, off_p_, off_m_, cprime_, denom_;
    mutable std::vector<Complex> rhs_;
};

struct PropagateOptions {
    /// Largest level spacing of the states carrying weight; when positive,
    /// dt must satisfy dt * spacing / hbar < 0.5.
    double max_level_spacing = 0.0;
    /// Record a snapshot every `snapshot_interval` steps (0 = none).
    int snapshot_interval = 0;
};

struct PropagationResult {
    WaveFunction psi;
    std::vector<WaveFunction> snapshots;  // includes the initial state when recording
};

inline PropagationResult propagate_grid(const WaveFunction& psi0,
                                        const PotentialSpec& potential, double dt,
                                        int n_steps, double mass = 1.0, double hbar = 1.0,
                                        const PropagateOptions& opts = {}) {
    if (!(dt != 0.0)) throw Error("propagate_grid: dt must be nonzero");
    if (opts.max_level_spacing > 0.0 &&
        std::abs(dt) * opts.max_level_spacing / hbar >= 0.5)
        throw TimestepTooLargeError("propagate_grid: dt does not resolve the level spacing");

    const TridiagonalHamiltonian h = build_hamiltonian(psi0.grid, potential, mass, hbar);
    const CrankNicolson cn(h, dt, hbar);

    PropagationResult result{psi0, {}};
    if (opts.snapshot_interval > 0) result.snapshots.push_back(result.psi);
    for (int s = 0; s < n_steps; ++s) {
        cn.step(result.psi.amplitudes);
        if (opts.snapshot_interval > 0 && (s + 1) % opts.snapshot_interval == 0)
            result.snapshots.push_back(result.psi);
    }
    return result;
}

/// Force expectation <-dV/dx> in the edge-centered form that makes the
/// discrete Ehrenfest identity close for the tridiagonal Hamiltonian.
inline double force_expectation(const WaveFunction& psi, const std::vector<double>& v) {
    const int n = psi.grid.n_points();
    const double dx = psi.grid.dx();
    double f = 0.0;
    for (int i = 0; i + 1 < n; ++i) {
        const double edge_density =
            std::real(std::conj(psi.amplitudes[i]) * psi.amplitudes[i + 1]);
        f -= (v[i + 1] - v[i]) / dx * edge_density * dx;
    }
    return f;
}

/// Residual of m d^2<x>/dt^2 = <-dV/dx> from uniformly spaced snapshots,
/// one value per interior snapshot.
inline std::vector<double> ehrenfest_residual(const std::vector<WaveFunction>& snapshots,
                                              const PotentialSpec& potential, double dt,
                                              double mass = 1.0) {
    if (snapshots.size() < 3)
        throw InsufficientDataError("ehrenfest_residual: need at least 3 snapshots");
    const Grid1D& grid = snapshots.front().grid;
    const std::vector<double> v = potential.sample(grid, mass);
    const double dx = grid.dx();

    std::vector<double> x_mean(snapshots.size()), force(snapshots.size());
    for (std::size_t s = 0; s < snapshots.size(); ++s) {
        double xm = 0.0;
        for (int i = 0; i < grid.n_points(); ++i)
            xm += std::norm(snapshots[s].amplitudes[i]) * grid.point(i) * dx;
        x_mean[s] = xm;
        force[s] = force_expectation(snapshots[s], v);
    }

    std::vector<double> residual(snapshots.size() - 2);
    for (std::size_t s = 1; s + 1 < snapshots.size(); ++s) {
        const double accel = (x_mean[s + 1] - 2.0 * x_mean[s] + x_mean[s - 1]) / (dt * dt);
        residual[s - 1] = std::abs(mass * accel - force[s]);
    }
    return residual;
}

}  // namespace rrc
