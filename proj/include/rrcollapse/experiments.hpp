#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rrcollapse/classical_rr.hpp"
#include "rrcollapse/dissipative.hpp"
#include "rrcollapse/propagate.hpp"
#include "rrcollapse/trace.hpp"

namespace rrc {

struct ExperimentConfig {
    std::string name;
    std::map<std::string, double> parameters;
    std::uint64_t seed = 0;
    int sample_interval = 0;  // 0 = experiment default

    double param(const std::string& key) const {
        auto it = parameters.find(key);
        if (it == parameters.end())
            throw ConfigError("missing parameter '" + key + "'");
        return it->second;
    }
};

struct ExperimentDefaults {
    std::map<std::string, double> parameters;
    int sample_interval = 1;
};

inline const std::map<std::string, ExperimentDefaults>& experiment_registry() {
    static const std::map<std::string, ExperimentDefaults> registry = {
        {"fermi_decay",
         {{{"p2_initial", 0.99}, {"rate", 1.0}, {"t_max", 15.0}, {"dt_rate_product", 0.01}},
          10}},
        {"three_level_cascade",
         {{{"p1_initial", 1e-4},
           {"p2_initial", 1e-2},
           {"A21", 1.0},
           {"A31", 1.0},
           {"A32", 1.0},
           {"t_max", 60.0},
           {"dt", 0.01},
           {"cascade_threshold", 0.5},
           {"direct_threshold", 0.1}},
          10}},
        {"two_well_localization",
         {{{"separation", 4.0},
           {"width", 1.0},
           {"depth", 10.0},
           {"delta", 0.5},
           {"mass", 0.5},
           {"n_states", 32.0},
           {"n_points", 1200.0},
           {"half_extent", 16.0},
           {"packet_width", 2.0},
           {"a_fastest", 0.1},
           {"t_max", 2.0e6},
           {"dt", 0.9},
           {"noise_sigma", 0.0},
           {"gate_epsilon", 1e-6},
           {"localization_threshold", 0.99},
           {"rates_off", 0.0}},
          2000}},
        {"ehrenfest_check",
         {{{"omega", 1.0},
           {"displacement", 0.3},
           {"dt", 1e-3},
           {"n_steps", 200.0},
           {"n_points", 600.0},
           {"half_extent", 10.0}},
          1}},
        {"runaway_demo",
         {{{"tau", 1.0}, {"a_initial", 1.0}, {"m_eff", 1.0}, {"t_max", 5.0}, {"dt", 0.01}},
          1}},
        {"preacceleration_demo",
         {{{"tau", 1.0}, {"f0", 1.0}, {"m_eff", 1.0}, {"t_half_span", 5.0},
           {"n_samples", 1001.0}},
          1}},
    };
    return registry;
}

inline std::vector<std::string> experiment_names() {
    std::vector<std::string> names;
    for (const auto& [name, _] : experiment_registry()) names.push_back(name);
    return names;
}

/// Fill defaults and reject unknown names/parameters.
inline ExperimentConfig resolve_config(const ExperimentConfig& config) {
    auto it = experiment_registry().find(config.name);
    if (it == experiment_registry().end()) {
        std::string valid;
        for (const auto& n : experiment_names()) {
            if (!valid.empty()) valid += ", ";
            valid += n;
        }
        throw ConfigError("unknown experiment '" + config.name + "' (valid: " + valid + ")");
    }
    const ExperimentDefaults& defaults = it->second;
    for (const auto& [key, _] : config.parameters)
        if (!defaults.parameters.count(key))
            throw ConfigError("unknown parameter '" + key + "' for experiment '" +
                              config.name + "'");
    ExperimentConfig resolved = config;
    for (const auto& [key, value] : defaults.parameters)
        resolved.parameters.emplace(key, value);
    if (resolved.sample_interval <= 0) resolved.sample_interval = defaults.sample_interval;
    return resolved;
}

struct ExperimentResult {
    std::vector<std::pair<std::string, Trace>> traces;
    nlohmann::json summary;
};

struct LocalizationMetrics {
    double prob_left = 0.0;
    double participation_ratio = 0.0;
    int dominant_state = 0;
};

namespace detail {

/// Least-squares slope of y against t.
inline double fit_slope(const std::vector<double>& t, const std::vector<double>& y) {
    const std::size_t n = t.size();
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        st += t[i];
        sy += y[i];
        stt += t[i] * t[i];
        sty += t[i] * y[i];
    }
    return (n * sty - st * sy) / (n * stt - st * st);
}

/// First crossing time of `series` through `level` (linear interpolation),
/// NaN when no crossing occurs.
inline double crossing_time(const std::vector<double>& t, const std::vector<double>& series,
                            double level) {
    for (std::size_t i = 1; i < series.size(); ++i) {
        const bool below = series[i] <= level, above = series[i - 1] > level;
        if (above && below) {
            const double w = (series[i - 1] - level) / (series[i - 1] - series[i]);
            return t[i - 1] + w * (t[i] - t[i - 1]);
        }
    }
    return std::nan("");
}

inline double participation_ratio(const Eigen::VectorXd& p) {
    return 1.0 / p.squaredNorm();
}

}  // namespace detail

/// Two-level decay: closed-form curve vs the RK4 rate-equation trajectory.
inline ExperimentResult run_fermi_decay(const ExperimentConfig& raw) {
    const ExperimentConfig config = resolve_config(raw);
    const double p2_0 = config.param("p2_initial");
    const double rate = config.param("rate");
    const double t_max = config.param("t_max");
    const double dt = config.param("dt_rate_product") / rate;
    const long n_steps = static_cast<long>(std::llround(t_max / dt));

    DecayRateMatrix rates{Eigen::MatrixXd::Zero(2, 2)};
    rates.rates(1, 0) = rate;
    DissipativeOptions opts;
    opts.energies = {0.0, 1.0};
    opts.sample_interval = config.sample_interval;
    const DissipativeState initial =
        DissipativeState::from_populations({1.0 - p2_0, p2_0});
    const DissipativeResult ode = evolve_dissipative(initial, rates, dt, n_steps, opts);

    Trace trace({"p2_closed", "p2_ode", "p1_ode"});
    const std::vector<double> t = ode.trace.column("t");
    const std::vector<double> p2 = ode.trace.column("p1");
    const std::vector<double> p1 = ode.trace.column("p0");
    for (std::size_t i = 0; i < t.size(); ++i)
        trace.add_row(t[i], {fermi_closed_form(p2_0, rate, t[i]), p2[i], p1[i]});

    // tail fit over the last 20% of the trace
    const std::size_t tail_start = t.size() - std::max<std::size_t>(t.size() / 5, 2);
    std::vector<double> tail_t(t.begin() + tail_start, t.end());
    std::vector<double> tail_log;
    for (std::size_t i = tail_start; i < t.size(); ++i)
        tail_log.push_back(std::log(std::max(p2[i], 1e-300)));

    const double q = 1.0 - p2_0;
    nlohmann::json summary;
    summary["turning_point_t"] = detail::crossing_time(t, p2, 0.5);
    summary["turning_point_exact"] = q > 0.0 && q < 1.0 ? std::log((1.0 - q) / q) / rate
                                                        : std::nan("");
    summary["tail_rate_fit"] = detail::fit_slope(tail_t, tail_log);

    ExperimentResult result;
    result.traces.emplace_back("fermi_decay", std::move(trace));
    result.summary = std::move(summary);
    return result;
}

/// Three-level decay path: cascade / direct / mixed, per the transient
/// middle-level population. Level 0 is the lowest.
inline ExperimentResult run_cascade(const ExperimentConfig& raw) {
    const ExperimentConfig config = resolve_config(raw);
    const double p1_0 = config.param("p1_initial");
    const double p2_0 = config.param("p2_initial");
    const double p3_0 = 1.0 - p1_0 - p2_0;
    if (p3_0 < 0.0) throw ConfigError("three_level_cascade: seeds exceed unit probability");
    const double dt = config.param("dt");
    const long n_steps = static_cast<long>(std::llround(config.param("t_max") / dt));

    DecayRateMatrix rates{Eigen::MatrixXd::Zero(3, 3)};
    rates.rates(1, 0) = config.param("A21");
    rates.rates(2, 0) = config.param("A31");
    rates.rates(2, 1) = config.param("A32");

    DissipativeOptions opts;
    opts.energies = {0.0, 1.0, 2.0};
    opts.sample_interval = config.sample_interval;
    const DissipativeResult ode = evolve_dissipative(
        DissipativeState::from_populations({p1_0, p2_0, p3_0}), rates, dt, n_steps, opts);

    const std::vector<double> mid = ode.trace.column("p1");
    const std::vector<double> low = ode.trace.column("p0");
    const double max_mid = *std::max_element(mid.begin(), mid.end());
    const bool ground_grew = low.back() > low.front();

    std::string path = "mixed";
    if (max_mid > config.param("cascade_threshold"))
        path = "cascade";
    else if (max_mid < config.param("direct_threshold") && ground_grew)
        path = "direct";

    ExperimentResult result;
    result.traces.emplace_back("cascade", ode.trace);
    result.summary["path"] = path;
    result.summary["max_p_middle"] = max_mid;
    result.summary["p_ground_final"] = low.back();
    return result;
}

/// Broad packet over two attractive centers; radiation reaction funnels the
/// population into a single well-localized eigenstate when the depths are
/// asymmetric.
inline ExperimentResult run_two_well(const ExperimentConfig& raw) {
    const ExperimentConfig config = resolve_config(raw);
    const double sep = config.param("separation");
    const double delta = config.param("delta");
    const double depth = config.param("depth");
    const double mass = config.param("mass");
    const int n_states = static_cast<int>(config.param("n_states"));
    const int n_points = static_cast<int>(config.param("n_points"));
    const double half_extent = config.param("half_extent");

    const Grid1D grid(-half_extent, half_extent, n_points);
    const PotentialSpec potential = PotentialSpec::double_well(
        -sep / 2.0, sep / 2.0, depth + delta, depth, config.param("width"));
    const EigenBasis basis = solve_eigenproblem(grid, potential, n_states, mass, 1.0);
    const Eigen::MatrixXd dipole = dipole_matrix(basis);

    // Tune c so the fastest raw rate lands at a_fastest.
    PhysicalConstants constants;
    constants.mass = mass;
    const double raw_max = decay_rates(basis, dipole, constants).rates.maxCoeff();
    const double a_fastest = config.param("a_fastest");
    const bool rates_off = config.param("rates_off") != 0.0;
    if (raw_max > 0.0 && !rates_off)
        constants.c = std::cbrt(raw_max / a_fastest);
    else
        constants.c = 1e12;  // pushes every rate to ~0

    const WaveFunction packet = gaussian_packet(grid, 0.0, config.param("packet_width"));

    CombinedOptions opts;
    opts.dt = config.param("dt");
    opts.n_steps = static_cast<long>(std::llround(config.param("t_max") / opts.dt));
    opts.sample_interval = config.sample_interval;
    opts.gate_epsilon = config.param("gate_epsilon");
    if (config.param("noise_sigma") > 0.0)
        opts.noise = NoiseSpec{config.param("noise_sigma"), config.seed};

    const CombinedResult evolved =
        evolve_combined(packet, basis, potential, dipole, constants, opts);

    // Localization metrics from the trace and the final state.
    const std::vector<double> t = evolved.trace.column("t");
    const double loc_threshold = config.param("localization_threshold");
    double time_to_localization = std::nan("");
    double min_pr = std::numeric_limits<double>::infinity();
    Eigen::VectorXd p(n_states);
    for (std::size_t r = 0; r < evolved.trace.size(); ++r) {
        for (int k = 0; k < n_states; ++k) p[k] = evolved.trace.rows()[r][k + 1];
        min_pr = std::min(min_pr, detail::participation_ratio(p));
        if (std::isnan(time_to_localization) && p.maxCoeff() > loc_threshold)
            time_to_localization = t[r];
    }
    for (int k = 0; k < n_states; ++k) p[k] = std::norm(evolved.state.coeffs[k]);

    LocalizationMetrics metrics;
    metrics.participation_ratio = detail::participation_ratio(p);
    Eigen::Index dominant;
    p.maxCoeff(&dominant);
    metrics.dominant_state = static_cast<int>(dominant);
    const WaveFunction final_psi = reconstruct(evolved.state, 0.0);
    const double midpoint = 0.0;
    for (int i = 0; i < n_points; ++i)
        if (grid.point(i) < midpoint)
            metrics.prob_left += std::norm(final_psi.amplitudes[i]) * grid.dx();

    // probability that the dominant eigenstate itself sits left of the midpoint
    double dominant_prob_left = 0.0;
    for (int i = 0; i < n_points; ++i)
        if (grid.point(i) < midpoint)
            dominant_prob_left +=
                basis.states(i, dominant) * basis.states(i, dominant) * grid.dx();

    ExperimentResult result;
    result.traces.emplace_back("two_well", evolved.trace);
    result.summary["final"] = {{"prob_left", metrics.prob_left},
                               {"participation_ratio", metrics.participation_ratio},
                               {"dominant_state", metrics.dominant_state},
                               {"max_population", p.maxCoeff()},
                               {"dominant_prob_left", dominant_prob_left}};
    result.summary["min_participation_ratio"] = min_pr;
    if (std::isnan(time_to_localization))
        result.summary["time_to_localization"] = nullptr;
    else
        result.summary["time_to_localization"] = time_to_localization;
    result.summary["tuned_c"] = constants.c;
    result.summary["truncation_residual"] = evolved.state.truncation_residual;
    return result;
}

/// Displaced ground state in a harmonic trap; reports the Ehrenfest residual.
inline ExperimentResult run_ehrenfest_check(const ExperimentConfig& raw) {
    const ExperimentConfig config = resolve_config(raw);
    const double omega = config.param("omega");
    const int n_points = static_cast<int>(config.param("n_points"));
    const double half_extent = config.param("half_extent");
    const double dt = config.param("dt");
    const int n_steps = static_cast<int>(config.param("n_steps"));

    const Grid1D grid(-half_extent, half_extent, n_points);
    const PotentialSpec potential = PotentialSpec::harmonic(omega);
    const double ground_sigma = std::sqrt(1.0 / (2.0 * omega));
    const WaveFunction packet =
        gaussian_packet(grid, config.param("displacement"), ground_sigma);

    PropagateOptions popts;
    popts.snapshot_interval = 1;
    const PropagationResult prop = propagate_grid(packet, potential, dt, n_steps, 1.0, 1.0, popts);
    const std::vector<double> residual =
        ehrenfest_residual(prop.snapshots, potential, dt, 1.0);

    Trace trace({"x_mean", "residual"});
    const std::vector<double> v = potential.sample(grid, 1.0);
    for (std::size_t s = 1; s + 1 < prop.snapshots.size(); ++s) {
        double xm = 0.0;
        for (int i = 0; i < grid.n_points(); ++i)
            xm += std::norm(prop.snapshots[s].amplitudes[i]) * grid.point(i) * grid.dx();
        trace.add_row(s * dt, {xm, residual[s - 1]});
    }

    ExperimentResult result;
    result.traces.emplace_back("ehrenfest", std::move(trace));
    result.summary["max_residual"] = *std::max_element(residual.begin(), residual.end());
    return result;
}

/// Force-free Abraham-Lorentz integration from a nonzero initial
/// acceleration: the homogeneous e^{t/tau} runaway.
inline ExperimentResult run_runaway_demo(const ExperimentConfig& raw) {
    const ExperimentConfig config = resolve_config(raw);
    const double tau = config.param("tau");
    const double dt = config.param("dt");
    const long n_steps = static_cast<long>(std::llround(config.param("t_max") / dt));

    ALParams params{config.param("m_eff"), tau, ForceProfile::zero()};
    ALState initial;
    initial.a = config.param("a_initial");
    const DirectIntegrationResult direct = integrate_direct(initial, params, dt, n_steps);

    Trace trace({"a_direct"});
    std::vector<double> t, log_a;
    for (std::size_t i = 0; i < direct.trajectory.size(); i += config.sample_interval) {
        const ALState& st = direct.trajectory[i];
        trace.add_row(st.t, {st.a});
        t.push_back(st.t);
        log_a.push_back(std::log(std::abs(st.a)));
    }

    ExperimentResult result;
    result.traces.emplace_back("runaway", std::move(trace));
    result.summary["growth_rate_fit"] = detail::fit_slope(t, log_a);
    result.summary["growth_rate_expected"] = 1.0 / tau;
    result.summary["runaway_flagged"] = direct.runaway_flagged;
    return result;
}

/// Reduced-order (runaway-free) response to a step force, with the direct
/// integration seeded on the reduced solution for comparison.
inline ExperimentResult run_preacceleration_demo(const ExperimentConfig& raw) {
    const ExperimentConfig config = resolve_config(raw);
    const double tau = config.param("tau");
    const double span = config.param("t_half_span") * tau;
    const int n_samples = static_cast<int>(config.param("n_samples"));

    ALParams params{config.param("m_eff"), tau,
                    ForceProfile::step(config.param("f0"), 0.0)};
    std::vector<double> t_grid(n_samples);
    for (int i = 0; i < n_samples; ++i)
        t_grid[i] = -span + 2.0 * span * i / (n_samples - 1);
    const ReducedIntegrationResult reduced = integrate_reduced(params, t_grid);

    const double dt_direct = (t_grid[1] - t_grid[0]) < tau / 10.0 ? t_grid[1] - t_grid[0]
                                                                  : tau / 100.0;
    ALState seeded;
    seeded.t = t_grid.front();
    seeded.a = reduced.a.front();
    const long direct_steps = static_cast<long>(std::llround(2.0 * span / dt_direct));
    const DirectIntegrationResult direct =
        integrate_direct(seeded, params, dt_direct, direct_steps);

    Trace trace({"a_reduced", "a_direct"});
    for (int i = 0; i < n_samples; ++i) {
        // nearest direct sample
        const double pos = (t_grid[i] - t_grid.front()) / dt_direct;
        const std::size_t idx = std::min<std::size_t>(
            static_cast<std::size_t>(std::llround(pos)), direct.trajectory.size() - 1);
        trace.add_row(t_grid[i], {reduced.a[i], direct.trajectory[idx].a});
    }

    const double a_inf = config.param("f0") / config.param("m_eff");
    ExperimentResult result;
    result.traces.emplace_back("preacceleration", std::move(trace));
    result.summary["preacceleration_ratio"] =
        integrate_reduced(params, {-tau, 0.0}).a.front() / a_inf;
    result.summary["expected_ratio"] = std::exp(-1.0);
    return result;
}

inline ExperimentResult run_experiment(const ExperimentConfig& config) {
    const std::string& name = config.name;
    if (name == "fermi_decay") return run_fermi_decay(config);
    if (name == "three_level_cascade") return run_cascade(config);
    if (name == "two_well_localization") return run_two_well(config);
    if (name == "ehrenfest_check") return run_ehrenfest_check(config);
    if (name == "runaway_demo") return run_runaway_demo(config);
    if (name == "preacceleration_demo") return run_preacceleration_demo(config);
    resolve_config(config);  // throws the usage error with the valid-name list
    throw ConfigError("unreachable");
}

}  // namespace rrc
