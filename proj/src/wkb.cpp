#include "pspin/wkb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pspin/numerics.hpp"

namespace pspin {

double wkb_ratio(const PotentialSpec& spec, double k, double energy, double s, double q) {
    const double e = 1.0 - 2.0 * k;
    const double rad = e * e - q * q;
    if (rad <= 0.0) throw std::domain_error("wkb_ratio: q at or beyond the band edge");
    return 2.0 * (s * potential(spec, q) - energy) / ((1.0 - s) * std::sqrt(rad));
}

WkbState make_wkb_state(const PotentialSpec& spec, double k, double energy,
                        const AnnealPoint& point) {
    WkbState state;
    state.k = k;
    state.energy = energy;
    state.point = point;
    state.turning_points = turning_points(spec, k, energy, point);
    return state;
}

std::complex<double> momentum(const PotentialSpec& spec, const WkbState& state, double q) {
    const double e = 1.0 - 2.0 * state.k;
    if (std::abs(q) >= e) throw std::domain_error("momentum: |q| must be < 1-2k");
    const double u = wkb_ratio(spec, state.k, state.energy, state.point.s, q);
    if (u >= 1.0) return {0.0, std::acosh(u)};
    if (u <= -1.0) return {M_PI, std::acosh(-u)};
    return {std::acos(u), 0.0};
}

std::vector<double> turning_points(const PotentialSpec& spec, double k, double energy,
                                   const AnnealPoint& point) {
    const double s = point.s;
    const double e = 1.0 - 2.0 * k;
    std::vector<double> roots;
    if (e <= 1e-15 || s >= 1.0) return roots;

    // |u| = 1 is equivalent to U(k,q) = E (lower band edge) or the band top
    // s f(q) + (1-s)/2 sqrt(...) = E; scan both on a dense grid.
    const auto lower = [&](double q) { return effective_potential(spec, k, q, s) - energy; };
    const auto upper = [&](double q) { return band_top(spec, k, q, s) - energy; };

    const int n = 4096;
    std::vector<double> qs;
    qs.reserve(n + 128);
    for (int i = 1; i <= n; ++i) qs.push_back(-e + 2.0 * e * i / (n + 1));
    for (int i = 0; i < 64; ++i) {
        const double rel = std::pow(10.0, -2.5 - 10.5 * i / 63.0);
        qs.push_back(e * (1.0 - rel));
        qs.push_back(-e * (1.0 - rel));
    }
    std::sort(qs.begin(), qs.end());

    const auto scan = [&](auto&& f) {
        double prev_q = qs.front();
        double prev_f = f(prev_q);
        for (std::size_t i = 1; i < qs.size(); ++i) {
            const double cur_q = qs[i];
            const double cur_f = f(cur_q);
            if (prev_f == 0.0) {
                roots.push_back(prev_q);
            } else if (prev_f * cur_f < 0.0) {
                roots.push_back(bisect_root(f, prev_q, cur_q, 1e-15 * std::max(1.0, e)));
            }
            prev_q = cur_q;
            prev_f = cur_f;
        }
        if (prev_f == 0.0) roots.push_back(prev_q);
    };
    scan(lower);
    scan(upper);
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end(),
                            [](double a, double b) { return std::abs(a - b) < 1e-13; }),
                roots.end());
    return roots;
}

namespace {

// Forbidden segment bracketing the barrier: the U(q) = E crossings on either
// slope of the barrier top. Degenerate turning points sit at the well minima.
struct Segment {
    double q_left, q_right;
};

Segment barrier_segment(const PotentialSpec& spec, double k, double energy, double s,
                        const Landscape& land) {
    const auto diff = [&](double q) { return effective_potential(spec, k, q, s) - energy; };
    const double q_top = land.barrier_top->q;
    Segment seg;
    seg.q_left = (energy <= land.left_min.energy)
                     ? land.left_min.q
                     : bisect_root(diff, land.left_min.q, q_top, 1e-15);
    seg.q_right = (energy <= land.right_min->energy)
                      ? land.right_min->q
                      : bisect_root(diff, q_top, land.right_min->q, 1e-15);
    return seg;
}

}  // namespace

BarrierAction barrier_action(const PotentialSpec& spec, double k, double energy,
                             const AnnealPoint& point, int quad_nodes) {
    if (point.s >= 1.0) {
        BarrierAction result;
        result.sigma = std::numeric_limits<double>::infinity();
        return result;
    }
    return barrier_action(spec, k, energy, point, landscape(spec, k, point.s), quad_nodes);
}

BarrierAction barrier_action(const PotentialSpec& spec, double k, double energy,
                             const AnnealPoint& point, const Landscape& land, int quad_nodes) {
    point.validate();
    const double s = point.s;
    BarrierAction result;
    if (s >= 1.0) {
        result.sigma = std::numeric_limits<double>::infinity();
        return result;
    }
    if (!land.two_wells()) throw std::domain_error("barrier_action: no two-well landscape");
    if (energy >= land.barrier_top->energy) {
        result.over_barrier = true;
        result.sigma = 0.0;
        return result;
    }
    if (energy < land.left_min.energy - 1e-12 || energy < land.right_min->energy - 1e-12)
        throw std::domain_error("barrier_action: energy below a well bottom");

    const Segment seg = barrier_segment(spec, k, energy, s, land);
    result.q_left = seg.q_left;
    result.q_right = seg.q_right;

    // arccosh(u) vanishes like sqrt(q - q_TP) at the turning points; the
    // substitution q = q_TP +- t^2 makes both half-integrands smooth.
    const double mid = 0.5 * (seg.q_left + seg.q_right);
    const auto integrand = [&](double q) {
        const double u = wkb_ratio(spec, k, energy, s, q);
        return u <= 1.0 ? 0.0 : std::acosh(u);
    };
    const double t_left = std::sqrt(mid - seg.q_left);
    const double t_right = std::sqrt(seg.q_right - mid);
    const double left = integrate_gl(
        [&](double t) { return 2.0 * t * integrand(seg.q_left + t * t); }, 0.0, t_left,
        quad_nodes);
    const double right = integrate_gl(
        [&](double t) { return 2.0 * t * integrand(seg.q_right - t * t); }, 0.0, t_right,
        quad_nodes);
    result.sigma = left + right;
    return result;
}

std::optional<double> period(const PotentialSpec& spec, double k, double energy,
                             const AnnealPoint& point, int quad_nodes) {
    if (point.s >= 1.0) return std::nullopt;
    return period(spec, k, energy, point, landscape(spec, k, point.s), quad_nodes);
}

std::optional<double> period(const PotentialSpec& spec, double k, double energy,
                             const AnnealPoint& point, const Landscape& land, int quad_nodes) {
    point.validate();
    const double s = point.s;
    if (s >= 1.0) return std::nullopt;
    if (!land.two_wells()) throw std::domain_error("period: no two-well landscape");
    if (energy >= land.barrier_top->energy) return std::nullopt;
    const double bottom = std::max(land.left_min.energy, land.right_min->energy);
    if (energy <= bottom) return std::numeric_limits<double>::infinity();

    const Segment seg = barrier_segment(spec, k, energy, s, land);
    const double e = 1.0 - 2.0 * k;
    const auto integrand = [&](double q) {
        const double w = std::sqrt(std::max(e * e - q * q, 1e-300));
        const double u = wkb_ratio(spec, k, energy, s, q);
        const double root = std::sqrt(std::max(u * u - 1.0, 1e-300));
        return 2.0 / ((1.0 - s) * w * root);
    };
    // integrand ~ (q - q_TP)^{-1/2} at the endpoints; same t^2 substitution
    const double mid = 0.5 * (seg.q_left + seg.q_right);
    const double t_left = std::sqrt(mid - seg.q_left);
    const double t_right = std::sqrt(seg.q_right - mid);
    const double left = integrate_gl(
        [&](double t) { return 2.0 * t * integrand(seg.q_left + t * t); }, 0.0, t_left,
        quad_nodes);
    const double right = integrate_gl(
        [&](double t) { return 2.0 * t * integrand(seg.q_right - t * t); }, 0.0, t_right,
        quad_nodes);
    return left + right;
}

}  // namespace pspin
