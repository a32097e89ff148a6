#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace pspin {

// Bisection root finder. Requires f(a) and f(b) of opposite sign (or zero).
template <class F>
double bisect_root(F&& f, double a, double b, double xtol = 1e-13, int max_iter = 200) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0) throw std::invalid_argument("bisect_root: no sign change in bracket");
    for (int i = 0; i < max_iter && (b - a) > xtol; ++i) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if (fm == 0.0) return m;
        if (fa * fm < 0.0) {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    return 0.5 * (a + b);
}

// Golden-section minimizer on [a,b]. Assumes unimodality on the bracket.
template <class F>
double golden_minimize(F&& f, double a, double b, double xtol = 1e-11, int max_iter = 200) {
    constexpr double inv_phi = 0.6180339887498949;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < max_iter && (b - a) > xtol; ++i) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

struct GaussLegendreRule {
    std::vector<double> nodes;    // on (-1,1)
    std::vector<double> weights;  // sum to 2
};

// Nodes and weights for n-point Gauss-Legendre quadrature; cached per n.
const GaussLegendreRule& gauss_legendre(int n);

// Integral of f over [a,b] with a single n-point Gauss-Legendre panel.
template <class F>
double integrate_gl(F&& f, double a, double b, int n) {
    const auto& rule = gauss_legendre(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return acc * half;
}

struct LineFit {
    double intercept = 0.0;
    double slope = 0.0;
    double r2 = 0.0;
};

// Least-squares y = intercept + slope * x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

// log(sum(exp(v))) with max-shift.
double log_sum_exp(std::span<const double> v);

// Worker count from PSPIN_WORKERS (>=1); defaults to hardware concurrency.
int worker_count();

// Runs fn(i) for i in [0,n); distributes across the worker pool.
// Results must be written to per-index slots so output stays deterministic.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace pspin
