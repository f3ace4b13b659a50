#pragma once

// Shared fixtures and independent reference computations for the tests.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "ucpc/model.hpp"

namespace fixtures {

inline ucpc::UncertainObject uniform1(std::string id, double lo, double hi) {
    return ucpc::UncertainObject(std::move(id), ucpc::UniformBox{ucpc::Box({lo}, {hi})});
}

inline ucpc::UncertainObject point1(std::string id, double x) { return ucpc::UncertainObject::point(std::move(id), {x}); }

inline ucpc::UncertainObject two_point(std::string id, double a, double b) {
    return ucpc::UncertainObject(std::move(id), ucpc::Empirical{{{a}, {b}}, {0.5, 0.5}});
}

// U[0,2] and U[1,3], the running example pair.
inline std::vector<ucpc::UncertainObject> pair_u02_u13() { return {uniform1("a", 0, 2), uniform1("b", 1, 3)}; }

inline bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * (1.0 + std::abs(b)); }

/// Composite Simpson rule on [lo, hi] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double lo, double hi, int n = 20000) {
    const double h = (hi - lo) / n;
    double s = f(lo) + f(hi);
    for (int i = 1; i < n; ++i) s += f(lo + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

struct QuadMoments {
    double mean;
    double var;
};

/// Mean and variance of the density proportional to `g` on [lo, hi], by quadrature.
inline QuadMoments quad_moments(const std::function<double(double)>& g, double lo, double hi, int n = 20000) {
    const double z = simpson(g, lo, hi, n);
    const double m1 = simpson([&](double x) { return x * g(x); }, lo, hi, n) / z;
    const double c2 = simpson([&](double x) { return (x - m1) * (x - m1) * g(x); }, lo, hi, n) / z;
    return {m1, c2};
}

} // namespace fixtures
