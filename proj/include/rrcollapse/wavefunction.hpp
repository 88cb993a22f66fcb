#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "rrcollapse/errors.hpp"
#include "rrcollapse/spectral.hpp"

namespace rrc {

using Complex = std::complex<double>;

/// Wave function sampled on the interior points of a Grid1D.
struct WaveFunction {
    Grid1D grid;
    Eigen::VectorXcd amplitudes;

    double norm_squared() const { return amplitudes.squaredNorm() * grid.dx(); }

    void normalize() {
        const double n = std::sqrt(norm_squared());
        if (n > 0.0) amplitudes /= n;
    }
};

/// <a| M |a> for a real symmetric matrix M; the imaginary part cancels.
inline double real_quadratic_form(const Eigen::MatrixXd& m, const Eigen::VectorXcd& a) {
    const Eigen::VectorXd re = a.real();
    const Eigen::VectorXd im = a.imag();
    return re.dot(m * re) + im.dot(m * im);
}

/// Gaussian packet exp(-(x-center)^2/(4 sigma^2) + i k0 x), normalized.
inline WaveFunction gaussian_packet(const Grid1D& grid, double center, double sigma,
                                    double k0 = 0.0) {
    if (!(sigma > 0.0)) throw Error("gaussian_packet: sigma must be positive");
    WaveFunction psi{grid, Eigen::VectorXcd(grid.n_points())};
    for (int i = 0; i < grid.n_points(); ++i) {
        const double x = grid.point(i);
        const double envelope = std::exp(-(x - center) * (x - center) / (4.0 * sigma * sigma));
        psi.amplitudes[i] = envelope * std::polar(1.0, k0 * x);
    }
    psi.normalize();
    return psi;
}

/// Coefficients a_k of a wave function over an EigenBasis.
struct SuperpositionState {
    const EigenBasis* basis = nullptr;
    Eigen::VectorXcd coeffs;
    double truncation_residual = 0.0;

    std::vector<double> populations() const {
        std::vector<double> p(coeffs.size());
        for (int k = 0; k < coeffs.size(); ++k) p[k] = std::norm(coeffs[k]);
        return p;
    }
};

/// a_k = sum_i psi_k(x_i) Psi(x_i) dx. Coefficients are renormalized; the
/// truncation residual 1 - sum |a_k|^2 is kept on the state and must stay
/// below `residual_threshold`.
inline SuperpositionState project(const WaveFunction& psi, const EigenBasis& basis,
                                  double residual_threshold = 0.01) {
    if (!(psi.grid == basis.grid))
        throw Error("project: wave function and basis use different grids");
    SuperpositionState state;
    state.basis = &basis;
    state.coeffs = basis.states.transpose() * psi.amplitudes * basis.grid.dx();
    const double captured = state.coeffs.squaredNorm();
    state.truncation_residual = 1.0 - captured;
    if (state.truncation_residual > residual_threshold)
        throw BasisTruncationError("projection residual exceeds threshold",
                                   state.truncation_residual);
    state.coeffs /= std::sqrt(captured);
    return state;
}

/// Psi(x_i, t) = sum_k a_k psi_k(x_i) exp(-i E_k t / hbar).
inline WaveFunction reconstruct(const SuperpositionState& state, double t) {
    const EigenBasis& basis = *state.basis;
    Eigen::VectorXcd phased(state.coeffs.size());
    for (int k = 0; k < state.coeffs.size(); ++k)
        phased[k] = state.coeffs[k] * std::polar(1.0, -basis.energies[k] * t / basis.hbar);
    WaveFunction psi{basis.grid, basis.states * phased};
    psi.normalize();
    return psi;
}

struct Observables {
    double x_mean = 0.0;
    double p_mean = 0.0;
    double E_mean = 0.0;
    double E_variance = 0.0;
};

/// Grid-side expectation values; energy moments use the discrete Hamiltonian.
inline Observables expectation_observables(const WaveFunction& psi,
                                           const TridiagonalHamiltonian& h,
                                           double hbar = 1.0) {
    const int n = psi.grid.n_points();
    const double dx = psi.grid.dx();
    Observables obs;
    for (int i = 0; i < n; ++i)
        obs.x_mean += std::norm(psi.amplitudes[i]) * psi.grid.point(i) * dx;
    for (int i = 1; i + 1 < n; ++i) {
        const Complex dpsi = (psi.amplitudes[i + 1] - psi.amplitudes[i - 1]) / (2.0 * dx);
        obs.p_mean += hbar * std::imag(std::conj(psi.amplitudes[i]) * dpsi) * dx;
    }
    Eigen::VectorXcd hpsi(n);
    for (int i = 0; i < n; ++i) {
        Complex v = h.diag[i] * psi.amplitudes[i];
        if (i > 0) v += h.off[i - 1] * psi.amplitudes[i - 1];
        if (i + 1 < n) v += h.off[i] * psi.amplitudes[i + 1];
        hpsi[i] = v;
    }
    obs.E_mean = std::real(psi.amplitudes.dot(hpsi)) * dx;
    obs.E_variance = hpsi.squaredNorm() * dx - obs.E_mean * obs.E_mean;
    return obs;
}

/// Eigenbasis-side expectation values: <E> = sum |a_k|^2 E_k.
inline Observables expectation_observables(const SuperpositionState& state,
                                           const Eigen::MatrixXd& dipole) {
    const EigenBasis& basis = *state.basis;
    Observables obs;
    for (int k = 0; k < state.coeffs.size(); ++k) {
        const double p = std::norm(state.coeffs[k]);
        obs.E_mean += p * basis.energies[k];
        obs.E_variance += p * basis.energies[k] * basis.energies[k];
    }
    obs.E_variance -= obs.E_mean * obs.E_mean;
    obs.x_mean = real_quadratic_form(dipole, state.coeffs);
    return obs;
}

}  // namespace rrc
