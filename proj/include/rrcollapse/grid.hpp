#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "rrcollapse/errors.hpp"

namespace rrc {

/// Uniform 1-D grid of interior points with Dirichlet endpoints excluded.
/// Points are x_i = x_min + (i+1)*dx, i = 0..n_points-1, with
/// dx = (x_max - x_min)/(n_points + 1).
class Grid1D {
  public:
    Grid1D(double x_min, double x_max, int n_points)
        : x_min_(x_min), x_max_(x_max), n_points_(n_points) {
        if (!(x_max > x_min))
            throw Error("Grid1D: x_max must exceed x_min");
        if (n_points < 3)
            throw GridTooSmallError("Grid1D: need at least 3 interior points");
        dx_ = (x_max - x_min) / (n_points + 1);
    }

    double x_min() const { return x_min_; }
    double x_max() const { return x_max_; }
    int n_points() const { return n_points_; }
    double dx() const { return dx_; }
    double point(int i) const { return x_min_ + (i + 1) * dx_; }

    std::vector<double> points() const {
        std::vector<double> xs(n_points_);
        for (int i = 0; i < n_points_; ++i) xs[i] = point(i);
        return xs;
    }

    bool operator==(const Grid1D& o) const {
        return x_min_ == o.x_min_ && x_max_ == o.x_max_ && n_points_ == o.n_points_;
    }

  private:
    double x_min_, x_max_;
    int n_points_;
    double dx_;
};

/// External electrostatic potential on a grid.
class PotentialSpec {
  public:
    enum class Kind { harmonic, box, double_well, tabulated };

    static PotentialSpec harmonic(double omega) {
        PotentialSpec p(Kind::harmonic);
        p.omega_ = omega;
        return p;
    }

    static PotentialSpec box() { return PotentialSpec(Kind::box); }

    static PotentialSpec double_well(double center_a, double center_b,
                                     double depth_a, double depth_b, double width) {
        if (!(center_a < center_b))
            throw InvalidPotentialError("double_well: center_A must be left of center_B");
        if (!(width > 0.0))
            throw InvalidPotentialError("double_well: width must be positive");
        if (depth_a < 0.0 || depth_b < 0.0)
            throw InvalidPotentialError("double_well: depths must be non-negative");
        PotentialSpec p(Kind::double_well);
        p.center_a_ = center_a;
        p.center_b_ = center_b;
        p.depth_a_ = depth_a;
        p.depth_b_ = depth_b;
        p.width_ = width;
        return p;
    }

    static PotentialSpec tabulated(std::vector<double> values) {
        PotentialSpec p(Kind::tabulated);
        p.values_ = std::move(values);
        return p;
    }

    Kind kind() const { return kind_; }
    double omega() const { return omega_; }
    double center_a() const { return center_a_; }
    double center_b() const { return center_b_; }

    /// V(x). Harmonic uses V = m w^2 x^2 / 2, so mass is required here.
    double value(double x, double mass) const {
        switch (kind_) {
            case Kind::harmonic:
                return 0.5 * mass * omega_ * omega_ * x * x;
            case Kind::box:
                return 0.0;
            case Kind::double_well:
                return -depth_a_ * gauss(x - center_a_) - depth_b_ * gauss(x - center_b_);
            case Kind::tabulated:
                throw Error("tabulated potential has no off-grid value");
        }
        return 0.0;
    }

    std::vector<double> sample(const Grid1D& grid, double mass) const {
        const int n = grid.n_points();
        std::vector<double> v(n);
        if (kind_ == Kind::tabulated) {
            if (static_cast<int>(values_.size()) != n)
                throw InvalidPotentialError("tabulated potential length must equal n_points");
            v = values_;
        } else {
            for (int i = 0; i < n; ++i) v[i] = value(grid.point(i), mass);
        }
        for (double vi : v)
            if (!std::isfinite(vi))
                throw InvalidPotentialError("potential contains a non-finite value");
        return v;
    }

    /// dV/dx on the grid. Analytic where the form allows, central
    /// differences for tabulated values.
    std::vector<double> sample_gradient(const Grid1D& grid, double mass) const {
        const int n = grid.n_points();
        std::vector<double> g(n);
        switch (kind_) {
            case Kind::harmonic:
                for (int i = 0; i < n; ++i) g[i] = mass * omega_ * omega_ * grid.point(i);
                break;
            case Kind::box:
                break;  // zero-initialized
            case Kind::double_well:
                for (int i = 0; i < n; ++i) {
                    const double x = grid.point(i);
                    g[i] = depth_a_ * gauss(x - center_a_) * (x - center_a_) / (width_ * width_) +
                           depth_b_ * gauss(x - center_b_) * (x - center_b_) / (width_ * width_);
                }
                break;
            case Kind::tabulated: {
                const std::vector<double> v = sample(grid, mass);
                const double dx = grid.dx();
                for (int i = 1; i + 1 < n; ++i) g[i] = (v[i + 1] - v[i - 1]) / (2.0 * dx);
                g[0] = (v[1] - v[0]) / dx;
                g[n - 1] = (v[n - 1] - v[n - 2]) / dx;
                break;
            }
        }
        return g;
    }

  private:
    explicit PotentialSpec(Kind kind) : kind_(kind) {}

    double gauss(double r) const { return std::exp(-r * r / (2.0 * width_ * width_)); }

    Kind kind_;
    double omega_ = 0.0;
    double center_a_ = 0.0, center_b_ = 0.0;
    double depth_a_ = 0.0, depth_b_ = 0.0;
    double width_ = 1.0;
    std::vector<double> values_;
};

}  // namespace rrc
