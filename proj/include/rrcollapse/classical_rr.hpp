#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "rrcollapse/errors.hpp"

namespace rrc {

/// External force profile F(t).
class ForceProfile {
  public:
    enum class Kind { zero, step, pulse, tabulated };

    static ForceProfile zero() { return ForceProfile(Kind::zero); }

    static ForceProfile step(double f0, double t_on) {
        ForceProfile f(Kind::step);
        f.f0_ = f0;
        f.t_on_ = t_on;
        return f;
    }

    static ForceProfile pulse(double f0, double t_on, double t_off) {
        if (!(t_off > t_on)) throw Error("ForceProfile::pulse: t_off must exceed t_on");
        ForceProfile f(Kind::pulse);
        f.f0_ = f0;
        f.t_on_ = t_on;
        f.t_off_ = t_off;
        return f;
    }

    /// Piecewise-linear samples on a uniform time grid; zero outside it.
    static ForceProfile tabulated(std::vector<double> times, std::vector<double> values) {
        if (times.size() != values.size() || times.size() < 2)
            throw Error("ForceProfile::tabulated: need matching times/values, length >= 2");
        ForceProfile f(Kind::tabulated);
        f.times_ = std::move(times);
        f.values_ = std::move(values);
        return f;
    }

    Kind kind() const { return kind_; }
    double f0() const { return f0_; }
    double t_on() const { return t_on_; }
    double t_off() const { return t_off_; }
    bool tail_decays() const {
        if (kind_ == Kind::tabulated) return values_.back() == 0.0;
        if (kind_ == Kind::step) return f0_ == 0.0;
        return true;
    }

    double operator()(double t) const {
        switch (kind_) {
            case Kind::zero:
                return 0.0;
            case Kind::step:
                return t >= t_on_ ? f0_ : 0.0;
            case Kind::pulse:
                return (t >= t_on_ && t < t_off_) ? f0_ : 0.0;
            case Kind::tabulated: {
                if (t <= times_.front() || t >= times_.back()) {
                    if (t == times_.front()) return values_.front();
                    if (t == times_.back()) return values_.back();
                    return 0.0;
                }
                std::size_t lo = 0, hi = times_.size() - 1;
                while (hi - lo > 1) {
                    const std::size_t mid = (lo + hi) / 2;
                    (times_[mid] <= t ? lo : hi) = mid;
                }
                const double w = (t - times_[lo]) / (times_[hi] - times_[lo]);
                return values_[lo] + w * (values_[hi] - values_[lo]);
            }
        }
        return 0.0;
    }

  private:
    explicit ForceProfile(Kind kind) : kind_(kind) {}
    Kind kind_;
    double f0_ = 0.0, t_on_ = 0.0, t_off_ = 0.0;
    std::vector<double> times_, values_;
};

struct ALParams {
    double m_eff = 1.0;  // effective mass, self-energy contribution included
    double tau = 1.0;    // radiation-reaction timescale 2 e^2 / (3 m_eff c^3)
    ForceProfile force = ForceProfile::zero();

    void validate() const {
        if (!(m_eff > 0.0)) throw Error("ALParams: m_eff must be positive");
        if (!(tau > 0.0)) throw Error("ALParams: tau must be positive");
    }
};

/// Third-order dynamics makes the acceleration part of the state.
struct ALState {
    double t = 0.0;
    double x = 0.0;
    double v = 0.0;
    double a = 0.0;

    bool finite() const {
        return std::isfinite(x) && std::isfinite(v) && std::isfinite(a);
    }
};

struct ALOverflowError : Error {
    ALOverflowError(const std::string& msg, ALState last_finite_)
        : Error(msg), last_finite(last_finite_) {}
    ALState last_finite;
};

struct DirectIntegrationResult {
    std::vector<ALState> trajectory;
    bool runaway_flagged = false;
    double runaway_onset_t = 0.0;
};

namespace detail {

/// xdot = v, vdot = a, adot = (m_eff a - F(t)) / (m_eff tau).
inline void al_derivative(const ALParams& p, double t, const double y[3], double dy[3]) {
    dy[0] = y[1];
    dy[1] = y[2];
    dy[2] = (p.m_eff * y[2] - p.force(t)) / (p.m_eff * p.tau);
}

}  // namespace detail

/// RK4 on the first-order system. Runaway is flagged once |a| exceeds
/// 1e12 times its initial scale (1 if the initial acceleration is zero).
inline DirectIntegrationResult integrate_direct(const ALState& initial, const ALParams& params,
                                                double dt, long n_steps) {
    params.validate();
    if (!(dt > 0.0) || dt >= params.tau / 10.0)
        throw TimestepTooLargeError("integrate_direct: require 0 < dt < tau/10");

    const double a_scale = initial.a != 0.0 ? std::abs(initial.a) : 1.0;
    DirectIntegrationResult result;
    result.trajectory.reserve(n_steps + 1);
    result.trajectory.push_back(initial);

    double y[3] = {initial.x, initial.v, initial.a};
    double k1[3], k2[3], k3[3], k4[3], tmp[3];
    for (long s = 0; s < n_steps; ++s) {
        const double t = initial.t + s * dt;
        detail::al_derivative(params, t, y, k1);
        for (int i = 0; i < 3; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
        detail::al_derivative(params, t + 0.5 * dt, tmp, k2);
        for (int i = 0; i < 3; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
        detail::al_derivative(params, t + 0.5 * dt, tmp, k3);
        for (int i = 0; i < 3; ++i) tmp[i] = y[i] + dt * k3[i];
        detail::al_derivative(params, t + dt, tmp, k4);
        for (int i = 0; i < 3; ++i)
            y[i] += dt / 6.0 * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);

        ALState st{t + dt, y[0], y[1], y[2]};
        if (!st.finite())
            throw ALOverflowError("integrate_direct: state overflowed",
                                  result.trajectory.back());
        if (!result.runaway_flagged && std::abs(st.a) > 1e12 * a_scale) {
            result.runaway_flagged = true;
            result.runaway_onset_t = st.t;
        }
        result.trajectory.push_back(st);
    }
    return result;
}

struct ReducedIntegrationResult {
    std::vector<double> t;
    std::vector<double> a;
    bool tail_truncation_warning = false;
};

/// Runaway-free solution a(t) = 1/(m_eff tau) Int_t^inf e^{(t-t')/tau} F(t') dt'.
/// Closed form for zero/step/pulse; quadrature with the tail truncated at
/// 40 tau for tabulated forces.
inline ReducedIntegrationResult integrate_reduced(const ALParams& params,
                                                  const std::vector<double>& t_grid) {
    params.validate();
    if (t_grid.size() < 2) throw Error("integrate_reduced: need at least 2 grid times");
    const double tau = params.tau;
    const double m = params.m_eff;

    ReducedIntegrationResult result;
    result.t = t_grid;
    result.a.resize(t_grid.size());

    const ForceProfile& f = params.force;
    switch (f.kind()) {
        case ForceProfile::Kind::zero:
            break;  // identically zero
        case ForceProfile::Kind::step:
            for (std::size_t i = 0; i < t_grid.size(); ++i) {
                const double t = t_grid[i];
                result.a[i] = t < f.t_on() ? f.f0() / m * std::exp((t - f.t_on()) / tau)
                                           : f.f0() / m;
            }
            break;
        case ForceProfile::Kind::pulse:
            for (std::size_t i = 0; i < t_grid.size(); ++i) {
                const double t = t_grid[i];
                if (t < f.t_on())
                    result.a[i] = f.f0() / m * (std::exp((t - f.t_on()) / tau) -
                                                std::exp((t - f.t_off()) / tau));
                else if (t < f.t_off())
                    result.a[i] = f.f0() / m * (1.0 - std::exp((t - f.t_off()) / tau));
                else
                    result.a[i] = 0.0;
            }
            break;
        case ForceProfile::Kind::tabulated: {
            if (!f.tail_decays()) result.tail_truncation_warning = true;
            // composite Simpson over s in [0, 40 tau], integrand e^{-s/tau} F(t+s)
            const int n_sub = 4000;  // step tau/100
            const double smax = 40.0 * tau;
            const double ds = smax / n_sub;
            for (std::size_t i = 0; i < t_grid.size(); ++i) {
                const double t = t_grid[i];
                double sum = 0.0;
                for (int j = 0; j <= n_sub; ++j) {
                    const double s = j * ds;
                    const double w = (j == 0 || j == n_sub) ? 1.0 : (j % 2 ? 4.0 : 2.0);
                    sum += w * std::exp(-s / tau) * f(t + s);
                }
                result.a[i] = sum * ds / 3.0 / (m * tau);
            }
            break;
        }
    }
    return result;
}

/// Lift a reduced-order acceleration curve to full states by cumulative
/// trapezoidal integration from rest at the first grid time.
inline std::vector<ALState> states_from_acceleration(const ReducedIntegrationResult& reduced) {
    std::vector<ALState> states(reduced.t.size());
    double v = 0.0, x = 0.0;
    for (std::size_t i = 0; i < reduced.t.size(); ++i) {
        if (i > 0) {
            const double dt = reduced.t[i] - reduced.t[i - 1];
            const double v_prev = v;
            v += 0.5 * dt * (reduced.a[i] + reduced.a[i - 1]);
            x += 0.5 * dt * (v + v_prev);
        }
        states[i] = ALState{reduced.t[i], x, v, reduced.a[i]};
    }
    return states;
}

struct EnergyAudit {
    std::vector<double> kinetic;   // 1/2 m_eff v^2 at each sample
    std::vector<double> radiated;  // cumulative Int m_eff tau a^2 dt
    std::vector<double> work;      // cumulative Int F v dt
};

inline EnergyAudit energy_audit(const std::vector<ALState>& trajectory,
                                const ALParams& params) {
    EnergyAudit audit;
    audit.kinetic.resize(trajectory.size());
    audit.radiated.resize(trajectory.size());
    audit.work.resize(trajectory.size());
    double radiated = 0.0, work = 0.0;
    for (std::size_t i = 0; i < trajectory.size(); ++i) {
        const ALState& st = trajectory[i];
        audit.kinetic[i] = 0.5 * params.m_eff * st.v * st.v;
        if (i > 0) {
            const ALState& prev = trajectory[i - 1];
            const double dt = st.t - prev.t;
            radiated += 0.5 * dt * params.m_eff * params.tau *
                        (st.a * st.a + prev.a * prev.a);
            work += 0.5 * dt * (params.force(st.t) * st.v + params.force(prev.t) * prev.v);
        }
        audit.radiated[i] = radiated;
        audit.work[i] = work;
    }
    return audit;
}

}  // namespace rrc
