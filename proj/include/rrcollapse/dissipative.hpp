#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include "rrcollapse/errors.hpp"
#include "rrcollapse/trace.hpp"
#include "rrcollapse/wavefunction.hpp"

namespace rrc {

struct PhysicalConstants {
    double e = 1.0;
    double eps0 = 1.0;
    double c = 1.0;
    double hbar = 1.0;
    double mass = 1.0;

    void validate() const {
        for (double v : {e, eps0, c, hbar, mass})
            if (!(v > 0.0) || !std::isfinite(v))
                throw Error("PhysicalConstants: all constants must be finite and positive");
    }

    /// e^2 / (3 pi eps0 c^3 hbar), the prefactor of the spontaneous decay rate.
    double rate_prefactor() const {
        return e * e / (3.0 * M_PI * eps0 * c * c * c * hbar);
    }
};

/// Pairwise decay rates A_jk = C (E_j - E_k)^3 / hbar^3 * d_jk^2 for
/// E_j > E_k, zero otherwise (and on the diagonal).
struct DecayRateMatrix {
    Eigen::MatrixXd rates;

    double max_rate() const { return rates.size() ? rates.maxCoeff() : 0.0; }
};

inline DecayRateMatrix decay_rates_from_energies(const std::vector<double>& energies,
                                                 const Eigen::MatrixXd& dipole,
                                                 const PhysicalConstants& constants) {
    constants.validate();
    const int n = static_cast<int>(energies.size());
    if (dipole.rows() != n || dipole.cols() != n)
        throw Error("decay_rates: dipole matrix dimension mismatch");
    const double prefactor = constants.rate_prefactor();
    const double hbar3 = constants.hbar * constants.hbar * constants.hbar;
    DecayRateMatrix out{Eigen::MatrixXd::Zero(n, n)};
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
            const double gap = energies[j] - energies[k];
            if (gap > 0.0)
                out.rates(j, k) = prefactor * gap * gap * gap / hbar3 *
                                  dipole(j, k) * dipole(j, k);
        }
    }
    return out;
}

inline DecayRateMatrix decay_rates(const EigenBasis& basis, const Eigen::MatrixXd& dipole,
                                   const PhysicalConstants& constants) {
    return decay_rates_from_energies(basis.energies, dipole, constants);
}

/// Two-level weight decay:
///   |a_2(t)|^2 = (1 - |a_1(0)|^2) / (1 - |a_1(0)|^2 + |a_1(0)|^2 e^{A t})
/// with |a_1(0)|^2 = 1 - p2_initial. Evaluated in log space once A t is
/// large enough that e^{A t} would overflow.
inline double fermi_closed_form(double p2_initial, double rate, double t) {
    if (!(p2_initial >= 0.0 && p2_initial <= 1.0))
        throw DomainError("fermi_closed_form: p2_initial must lie in [0, 1]");
    if (rate < 0.0) throw DomainError("fermi_closed_form: rate must be non-negative");
    if (t < 0.0) throw DomainError("fermi_closed_form: t must be non-negative");
    const double q = 1.0 - p2_initial;  // lower-state seed
    if (q == 0.0) return 1.0;
    if (p2_initial == 0.0) return 0.0;
    const double at = rate * t;
    if (at > 700.0)
        return std::exp(std::log(p2_initial / q) - at);
    return p2_initial / (p2_initial + q * std::exp(at));
}

/// Populations, unitary phases and time over a fixed level set.
struct DissipativeState {
    std::vector<double> populations;
    std::vector<double> phases;  // radians, one per level
    double t = 0.0;

    static DissipativeState from_populations(std::vector<double> p, double t0 = 0.0) {
        DissipativeState s;
        s.phases.assign(p.size(), 0.0);
        s.populations = std::move(p);
        s.t = t0;
        double total = 0.0;
        for (double pk : s.populations) total += pk;
        if (!(std::abs(total - 1.0) < 1e-9))
            throw DomainError("DissipativeState: populations must sum to 1");
        return s;
    }
};

namespace detail {

/// dp_j/dt = - sum_{k: A_jk>0} A_jk p_j p_k + sum_{k: A_kj>0} A_kj p_k p_j.
/// Pairwise transfer conserves sum p exactly; RK4 preserves that linear
/// invariant.
inline void population_derivative(const Eigen::MatrixXd& rates,
                                  const Eigen::VectorXd& p, Eigen::VectorXd& dp) {
    const Eigen::VectorXd outflow = rates * p;            // sum_k A_jk p_k
    const Eigen::VectorXd inflow = rates.transpose() * p; // sum_k A_kj p_k
    dp = p.cwiseProduct(inflow - outflow);
}

inline void rk4_population_step(const Eigen::MatrixXd& rates, Eigen::VectorXd& p,
                                double dt, Eigen::VectorXd& k1, Eigen::VectorXd& k2,
                                Eigen::VectorXd& k3, Eigen::VectorXd& k4,
                                Eigen::VectorXd& tmp) {
    population_derivative(rates, p, k1);
    tmp = p + 0.5 * dt * k1;
    population_derivative(rates, tmp, k2);
    tmp = p + 0.5 * dt * k2;
    population_derivative(rates, tmp, k3);
    tmp = p + dt * k3;
    population_derivative(rates, tmp, k4);
    p += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

inline void check_populations(const Eigen::VectorXd& p) {
    for (int i = 0; i < p.size(); ++i)
        if (p[i] < -1e-12)
            throw IntegratorInstabilityError("population went negative beyond tolerance");
}

}  // namespace detail

struct DissipativeOptions {
    std::vector<double> energies;  // for phase advance and <E>; may be empty
    double hbar = 1.0;
    int sample_interval = 1;  // steps between trace rows; 0 disables the trace
};

struct DissipativeResult {
    DissipativeState state;
    Trace trace{std::vector<std::string>{}};
};

/// Fixed-step RK4 on the pairwise logistic transfer equations; phases
/// advance as phi_k -= E_k dt / hbar. Requires dt * max(A) < 0.1.
inline DissipativeResult evolve_dissipative(const DissipativeState& initial,
                                            const DecayRateMatrix& rates, double dt,
                                            long n_steps,
                                            const DissipativeOptions& opts = {}) {
    const int n = static_cast<int>(initial.populations.size());
    if (rates.rates.rows() != n || rates.rates.cols() != n)
        throw Error("evolve_dissipative: rate matrix dimension mismatch");
    if (!(dt > 0.0)) throw Error("evolve_dissipative: dt must be positive");
    if (dt * rates.max_rate() >= 0.1)
        throw TimestepTooLargeError("evolve_dissipative: dt * max(A) must stay below 0.1");
    const bool have_energies = !opts.energies.empty();
    if (have_energies && static_cast<int>(opts.energies.size()) != n)
        throw Error("evolve_dissipative: energies dimension mismatch");

    std::vector<std::string> names;
    for (int k = 0; k < n; ++k) names.push_back("p" + std::to_string(k));
    if (have_energies) names.push_back("E_mean");
    DissipativeResult result;
    result.state = initial;
    result.trace = Trace(names);

    Eigen::VectorXd p = Eigen::Map<const Eigen::VectorXd>(initial.populations.data(), n);
    Eigen::VectorXd k1, k2, k3, k4, tmp;

    auto emit = [&](double t) {
        std::vector<double> row(p.data(), p.data() + n);
        if (have_energies) {
            double e = 0.0;
            for (int k = 0; k < n; ++k) e += p[k] * opts.energies[k];
            row.push_back(e);
        }
        result.trace.add_row(t, row);
    };

    if (opts.sample_interval > 0) emit(initial.t);
    for (long s = 0; s < n_steps; ++s) {
        detail::rk4_population_step(rates.rates, p, dt, k1, k2, k3, k4, tmp);
        detail::check_populations(p);
        if (have_energies)
            for (int k = 0; k < n; ++k)
                result.state.phases[k] -= opts.energies[k] * dt / opts.hbar;
        if (opts.sample_interval > 0 && (s + 1) % opts.sample_interval == 0)
            emit(initial.t + (s + 1) * dt);
    }
    result.state.t = initial.t + n_steps * dt;
    result.state.populations.assign(p.data(), p.data() + n);
    return result;
}

struct NoiseSpec {
    double sigma_E = 0.0;  // std of the Gaussian jitter applied to each E_k
    std::uint64_t seed = 0;
};

struct CombinedOptions {
    double dt = 0.0;
    long n_steps = 0;
    int sample_interval = 1;
    /// Transfer gate threshold: rates are scaled by
    /// min(1, |<-dV/dx>| / gate_epsilon) so zero-gradient regions do not decay.
    double gate_epsilon = 1e-6;
    std::optional<NoiseSpec> noise;
    double projection_threshold = 0.01;
};

struct CombinedResult {
    SuperpositionState state;
    Trace trace{std::vector<std::string>{}};
};

/// Strang-split evolution in the eigenbasis: half-step unitary phase
/// advance, full dissipative population step, half-step unitary. The force
/// expectation gating the rates is evaluated from the instantaneous
/// coefficients via the eigenbasis force matrix.
inline CombinedResult evolve_combined(const WaveFunction& psi0, const EigenBasis& basis,
                                      const PotentialSpec& potential,
                                      const Eigen::MatrixXd& dipole,
                                      const PhysicalConstants& constants,
                                      const CombinedOptions& opts) {
    if (!(opts.dt > 0.0)) throw Error("evolve_combined: dt must be positive");
    const int n = basis.n_states;

    const DecayRateMatrix base_rates = decay_rates(basis, dipole, constants);
    if (opts.dt * base_rates.max_rate() >= 0.1)
        throw TimestepTooLargeError("evolve_combined: dt * max(A) must stay below 0.1");

    // Force matrix F_jk = <psi_j | -dV/dx | psi_k> on the grid.
    const std::vector<double> grad = potential.sample_gradient(basis.grid, constants.mass);
    Eigen::VectorXd gvec = -Eigen::Map<const Eigen::VectorXd>(grad.data(), grad.size());
    Eigen::MatrixXd force =
        basis.states.transpose() * gvec.asDiagonal() * basis.states * basis.grid.dx();
    force = 0.5 * (force + force.transpose()).eval();

    SuperpositionState state = project(psi0, basis, opts.projection_threshold);

    std::mt19937_64 rng(opts.noise ? opts.noise->seed : 0);
    std::normal_distribution<double> jitter(0.0, opts.noise ? opts.noise->sigma_E : 0.0);

    std::vector<std::string> names;
    for (int k = 0; k < n; ++k) names.push_back("p" + std::to_string(k));
    names.insert(names.end(), {"E_mean", "x_mean", "gate"});
    CombinedResult result;
    result.trace = Trace(names);

    Eigen::VectorXd p(n);
    for (int k = 0; k < n; ++k) p[k] = std::norm(state.coeffs[k]);
    Eigen::VectorXd k1, k2, k3, k4, tmp;
    std::vector<double> energies = basis.energies;

    auto emit = [&](double t, double gate) {
        std::vector<double> row(p.data(), p.data() + n);
        double e_mean = 0.0;
        for (int k = 0; k < n; ++k) e_mean += p[k] * basis.energies[k];
        const double x_mean = real_quadratic_form(dipole, state.coeffs);
        row.insert(row.end(), {e_mean, x_mean, gate});
        result.trace.add_row(t, row);
    };

    auto phase_half_step = [&]() {
        for (int k = 0; k < n; ++k)
            state.coeffs[k] *=
                std::polar(1.0, -basis.energies[k] * opts.dt / (2.0 * constants.hbar));
    };

    double gate = 0.0;
    if (opts.sample_interval > 0) emit(0.0, gate);
    for (long s = 0; s < opts.n_steps; ++s) {
        phase_half_step();

        const double f = real_quadratic_form(force, state.coeffs);
        gate = std::min(1.0, std::abs(f) / opts.gate_epsilon);

        const Eigen::MatrixXd* rates = &base_rates.rates;
        Eigen::MatrixXd jittered;
        if (opts.noise && opts.noise->sigma_E > 0.0) {
            for (int k = 0; k < n; ++k) energies[k] = basis.energies[k] + jitter(rng);
            jittered = decay_rates_from_energies(energies, dipole, constants).rates;
            rates = &jittered;
        }
        if (gate < 1.0) {
            if (rates != &jittered) jittered = *rates;
            jittered *= gate;
            rates = &jittered;
        }

        detail::rk4_population_step(*rates, p, opts.dt, k1, k2, k3, k4, tmp);
        detail::check_populations(p);
        // carry the new populations onto the coefficients, phases untouched
        for (int k = 0; k < n; ++k) {
            const double mag = std::abs(state.coeffs[k]);
            const double target = std::sqrt(std::max(p[k], 0.0));
            state.coeffs[k] = mag > 0.0 ? state.coeffs[k] * (target / mag)
                                        : Complex(target, 0.0);
        }

        phase_half_step();
        if (opts.sample_interval > 0 && (s + 1) % opts.sample_interval == 0)
            emit((s + 1) * opts.dt, gate);
    }
    result.state = state;
    return result;
}

}  // namespace rrc
