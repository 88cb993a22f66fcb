#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "rrcollapse/dissipative.hpp"

using namespace rrc;

namespace {

EigenBasis harmonic_basis(int n_states, int n_points = 1200) {
    const Grid1D grid(-10.0, 10.0, n_points);
    return solve_eigenproblem(grid, PotentialSpec::harmonic(1.0), n_states);
}

}  // namespace

TEST_CASE("physical constants must be positive and finite") {
    PhysicalConstants constants;
    constants.c = 0.0;
    CHECK_THROWS_AS(constants.validate(), Error);
    constants.c = -3.0;
    CHECK_THROWS_AS(constants.validate(), Error);
    constants.c = 1.0;
    CHECK_NOTHROW(constants.validate());
    CHECK(constants.rate_prefactor() == Catch::Approx(1.0 / (3.0 * M_PI)));
}

TEST_CASE("decay rates: harmonic ladder at c=10 hits the hand value") {
    // A_10 = [1/(3 pi 1000)] * 1 * (1/2) = 1/(6000 pi)
    const EigenBasis basis = harmonic_basis(4, 2000);
    const Eigen::MatrixXd d = dipole_matrix(basis);
    PhysicalConstants constants;
    constants.c = 10.0;
    const DecayRateMatrix rates = decay_rates(basis, d, constants);
    CHECK(rates.rates(1, 0) == Catch::Approx(1.0 / (6000.0 * M_PI)).epsilon(1e-3));
    CHECK(rates.max_rate() > 0.0);
}

TEST_CASE("decay rates: degenerate and parity-forbidden pairs are exactly zero") {
    std::vector<double> energies = {1.0, 1.0, 2.0};
    Eigen::MatrixXd d = Eigen::MatrixXd::Ones(3, 3);
    PhysicalConstants constants;
    const DecayRateMatrix degen = decay_rates_from_energies(energies, d, constants);
    CHECK(degen.rates(1, 0) == 0.0);
    CHECK(degen.rates(0, 1) == 0.0);
    for (int k = 0; k < 3; ++k) CHECK(degen.rates(k, k) == 0.0);
    CHECK(degen.rates(2, 0) > 0.0);
    CHECK(degen.rates(0, 2) == 0.0);  // no upward transfer

    const EigenBasis basis = harmonic_basis(4);
    const DecayRateMatrix harm = decay_rates(basis, dipole_matrix(basis), constants);
    CHECK(harm.rates(2, 0) < 1e-20);  // d_02 = 0 by parity
    CHECK(harm.rates(3, 1) < 1e-20);
}

TEST_CASE("decay rates scale as 1/c^3") {
    const EigenBasis basis = harmonic_basis(4);
    const Eigen::MatrixXd d = dipole_matrix(basis);
    PhysicalConstants c1, c2;
    c1.c = 1.0;
    c2.c = 2.0;
    const Eigen::MatrixXd a1 = decay_rates(basis, d, c1).rates;
    const Eigen::MatrixXd a2 = decay_rates(basis, d, c2).rates;
    for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k)
            CHECK(8.0 * a2(j, k) == Catch::Approx(a1(j, k)).margin(1e-18));
}

TEST_CASE("fermi closed form: boundary and landmark values") {
    CHECK(fermi_closed_form(1.0, 2.0, 5.0) == 1.0);   // no lower seed, no decay
    CHECK(fermi_closed_form(0.0, 2.0, 5.0) == 0.0);
    CHECK(fermi_closed_form(0.42, 1.0, 0.0) == 0.42);  // t = 0 exact
    // q = 0.01, A = 1: half-population at ln(99)
    CHECK(fermi_closed_form(0.99, 1.0, std::log(99.0)) == Catch::Approx(0.5).margin(1e-12));
    // asymptote: p2(t) e^{At} -> p2_0 / q
    const double t = 50.0;
    CHECK(fermi_closed_form(0.99, 1.0, t) * std::exp(t) ==
          Catch::Approx(99.0).epsilon(1e-9));
}

TEST_CASE("fermi closed form: log-space branch avoids overflow") {
    const double v = fermi_closed_form(0.99, 1.0, 740.0);
    CHECK(std::isfinite(v));
    CHECK(v > 0.0);
    CHECK(v < 1e-300);
    // continuity across the branch switch at At = 700
    const double lo = fermi_closed_form(0.5, 1.0, 699.999);
    const double hi = fermi_closed_form(0.5, 1.0, 700.001);
    CHECK(hi < lo);
    CHECK(hi == Catch::Approx(lo).epsilon(1e-2));
}

TEST_CASE("fermi closed form: domain errors") {
    CHECK_THROWS_AS(fermi_closed_form(-0.1, 1.0, 1.0), DomainError);
    CHECK_THROWS_AS(fermi_closed_form(1.1, 1.0, 1.0), DomainError);
    CHECK_THROWS_AS(fermi_closed_form(0.5, -1.0, 1.0), DomainError);
    CHECK_THROWS_AS(fermi_closed_form(0.5, 1.0, -1.0), DomainError);
}

TEST_CASE("dissipative state requires unit total population") {
    CHECK_THROWS_AS(DissipativeState::from_populations({0.5, 0.4}), DomainError);
    CHECK_NOTHROW(DissipativeState::from_populations({0.5, 0.5}));
}

TEST_CASE("evolve_dissipative enforces the rate-resolution bound") {
    DecayRateMatrix rates{Eigen::MatrixXd::Zero(2, 2)};
    rates.rates(1, 0) = 1.0;
    const DissipativeState initial = DissipativeState::from_populations({0.01, 0.99});
    CHECK_THROWS_AS(evolve_dissipative(initial, rates, 0.1, 10), TimestepTooLargeError);
    CHECK_NOTHROW(evolve_dissipative(initial, rates, 0.01, 10));
}

TEST_CASE("two-level RK4 trajectory matches the closed form") {
    const double p2_0 = 0.99, rate = 1.0, dt = 0.01;
    DecayRateMatrix rates{Eigen::MatrixXd::Zero(2, 2)};
    rates.rates(1, 0) = rate;
    DissipativeOptions opts;
    opts.sample_interval = 1;
    const DissipativeResult out = evolve_dissipative(
        DissipativeState::from_populations({1.0 - p2_0, p2_0}), rates, dt, 1500, opts);
    const std::vector<double> t = out.trace.column("t");
    const std::vector<double> p2 = out.trace.column("p1");
    double max_err = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i)
        max_err = std::max(max_err, std::abs(p2[i] - fermi_closed_form(p2_0, rate, t[i])));
    CHECK(max_err < 1e-8);
}

TEST_CASE("single eigenstate is an exact fixed point") {
    const EigenBasis basis = harmonic_basis(6);
    PhysicalConstants constants;
    constants.c = 10.0;
    const DecayRateMatrix rates = decay_rates(basis, dipole_matrix(basis), constants);
    std::vector<double> p(6, 0.0);
    p[3] = 1.0;
    const DissipativeResult out = evolve_dissipative(
        DissipativeState::from_populations(p), rates, 0.01, 10000);
    for (int k = 0; k < 6; ++k)
        CHECK(out.state.populations[k] == p[k]);  // bitwise
}

TEST_CASE("probability conserved and energy monotone under dissipation") {
    const EigenBasis basis = harmonic_basis(8);
    PhysicalConstants constants;
    constants.c = 3.0;
    const DecayRateMatrix rates = decay_rates(basis, dipole_matrix(basis), constants);
    const double dt = 0.05 / rates.max_rate();

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> p(8);
    double total = 0.0;
    for (double& pk : p) total += (pk = u(rng));
    for (double& pk : p) pk /= total;

    DissipativeOptions opts;
    opts.energies = basis.energies;
    opts.sample_interval = 1;
    const DissipativeResult out = evolve_dissipative(
        DissipativeState::from_populations(p), rates, dt, 2000, opts);

    double sum = 0.0;
    for (double pk : out.state.populations) sum += pk;
    CHECK(std::abs(sum - 1.0) < 1e-9);

    const std::vector<double> e = out.trace.column("E_mean");
    for (std::size_t i = 1; i < e.size(); ++i) CHECK(e[i] <= e[i - 1] + 1e-12);
}

TEST_CASE("three-level cascade fills the middle level on the way down") {
    DecayRateMatrix rates{Eigen::MatrixXd::Zero(3, 3)};
    rates.rates(1, 0) = rates.rates(2, 0) = rates.rates(2, 1) = 1.0;
    DissipativeOptions opts;
    opts.sample_interval = 10;
    const DissipativeResult out = evolve_dissipative(
        DissipativeState::from_populations({0.001, 0.019, 0.98}), rates, 0.01, 6000, opts);
    const std::vector<double> mid = out.trace.column("p1");
    CHECK(*std::max_element(mid.begin(), mid.end()) > 0.5);
    CHECK(out.state.populations[0] > 0.9);  // everything ends in the ground state
}

TEST_CASE("phases advance by -E_k dt / hbar") {
    DecayRateMatrix rates{Eigen::MatrixXd::Zero(2, 2)};
    DissipativeOptions opts;
    opts.energies = {0.5, 1.5};
    const DissipativeResult out = evolve_dissipative(
        DissipativeState::from_populations({0.5, 0.5}), rates, 0.01, 100, opts);
    CHECK(out.state.phases[0] == Catch::Approx(-0.5).margin(1e-12));
    CHECK(out.state.phases[1] == Catch::Approx(-1.5).margin(1e-12));
    CHECK(out.state.t == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("evolve_combined: zero rates reduce to pure unitary evolution") {
    const Grid1D grid(-10.0, 10.0, 600);
    const PotentialSpec potential = PotentialSpec::harmonic(1.0);
    const EigenBasis basis = solve_eigenproblem(grid, potential, 16);
    const Eigen::MatrixXd d = dipole_matrix(basis);
    PhysicalConstants constants;
    constants.c = 1e12;  // rates ~ 1e-37, effectively off
    const WaveFunction psi0 = gaussian_packet(grid, 0.3, std::sqrt(0.5));

    CombinedOptions opts;
    opts.dt = 0.01;
    opts.n_steps = 500;
    const CombinedResult out = evolve_combined(psi0, basis, potential, d, constants, opts);

    const SuperpositionState ref = project(psi0, basis);
    double fid = 0.0;
    for (int k = 0; k < 16; ++k) {
        const Complex phase = std::polar(1.0, -basis.energies[k] * 5.0);
        fid += std::real(std::conj(ref.coeffs[k] * phase) * out.state.coeffs[k]);
    }
    CHECK(fid > 1.0 - 1e-9);
}

TEST_CASE("evolve_combined: eigenstate input keeps every observable constant") {
    const Grid1D grid(-10.0, 10.0, 600);
    const PotentialSpec potential = PotentialSpec::harmonic(1.0);
    const EigenBasis basis = solve_eigenproblem(grid, potential, 8);
    const Eigen::MatrixXd d = dipole_matrix(basis);
    PhysicalConstants constants;
    constants.c = 3.0;  // rates clearly on
    WaveFunction psi0{grid, basis.states.col(0).cast<Complex>()};

    CombinedOptions opts;
    opts.dt = 0.01;
    opts.n_steps = 300;
    opts.sample_interval = 50;
    const CombinedResult out = evolve_combined(psi0, basis, potential, d, constants, opts);
    for (const auto& row : out.trace.rows()) {
        CHECK(row[1] == Catch::Approx(1.0).margin(1e-9));       // p0
        CHECK(row[out.trace.column_index("E_mean")] ==
              Catch::Approx(basis.energies[0]).margin(1e-9));
    }
}

TEST_CASE("evolve_combined: free packet sees no transfer through the gate") {
    const Grid1D grid(-40.0, 40.0, 800);
    const PotentialSpec potential = PotentialSpec::box();
    const EigenBasis basis = solve_eigenproblem(grid, potential, 24);
    const Eigen::MatrixXd d = dipole_matrix(basis);
    PhysicalConstants constants;  // c = 1: raw box rates are sizable
    const WaveFunction psi0 = gaussian_packet(grid, 0.0, 4.0);

    CombinedOptions opts;
    opts.dt = 0.001;
    opts.n_steps = 200;
    opts.sample_interval = 200;
    const CombinedResult out = evolve_combined(psi0, basis, potential, d, constants, opts);

    const SuperpositionState ref = project(psi0, basis);
    const std::vector<double> p0 = ref.populations();
    const std::vector<double> p1 = out.state.populations();
    for (int k = 0; k < 24; ++k) CHECK(std::abs(p1[k] - p0[k]) < 1e-12);
    CHECK(out.trace.rows().back()[out.trace.column_index("gate")] == 0.0);
}

TEST_CASE("evolve_combined: noise is reproducible per seed") {
    const Grid1D grid(-10.0, 10.0, 400);
    const PotentialSpec potential = PotentialSpec::harmonic(1.0);
    const EigenBasis basis = solve_eigenproblem(grid, potential, 8);
    const Eigen::MatrixXd d = dipole_matrix(basis);
    PhysicalConstants constants;
    constants.c = 3.0;
    const WaveFunction psi0 = gaussian_packet(grid, 0.3, std::sqrt(0.5));

    CombinedOptions opts;
    opts.dt = 0.01;
    opts.n_steps = 100;
    opts.sample_interval = 1;
    opts.noise = NoiseSpec{0.05, 42};
    const CombinedResult a = evolve_combined(psi0, basis, potential, d, constants, opts);
    const CombinedResult b = evolve_combined(psi0, basis, potential, d, constants, opts);
    CHECK(a.trace == b.trace);

    opts.noise = NoiseSpec{0.05, 43};
    const CombinedResult c = evolve_combined(psi0, basis, potential, d, constants, opts);
    CHECK_FALSE(a.trace == c.trace);
}
