#include "pspin/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "pspin/numerics.hpp"

namespace pspin {

PotentialSpec PotentialSpec::cubic(double q_min, double q_max, double c) {
    PotentialSpec spec;
    spec.kind = PotentialKind::Cubic;
    spec.q_min = q_min;
    spec.q_max = q_max;
    spec.c = c;
    spec.validate();
    return spec;
}

PotentialSpec PotentialSpec::monomial(int p) {
    PotentialSpec spec;
    spec.kind = PotentialKind::Monomial;
    spec.p = p;
    spec.validate();
    return spec;
}

void PotentialSpec::validate() const {
    if (kind == PotentialKind::Cubic) {
        if (!(q_min >= 0.0 && q_min < 1.0))
            throw std::invalid_argument("PotentialSpec: q_min must lie in [0,1)");
        if (!(q_max > q_min && q_max < 1.0))
            throw std::invalid_argument("PotentialSpec: q_max must lie in (q_min,1)");
        if (!(q_max <= (2.0 + q_min) / 3.0))
            throw std::invalid_argument(
                "PotentialSpec: q_max must not exceed (2+q_min)/3, else q=1 is not the "
                "global minimum");
        if (!(c > 0.0)) throw std::invalid_argument("PotentialSpec: c must be positive");
    } else {
        if (p < 3) throw std::invalid_argument("PotentialSpec: monomial exponent p must be >= 3");
    }
}

bool PotentialSpec::is_degenerate() const {
    if (kind != PotentialKind::Cubic) return false;
    return potential(*this, q_min) - potential(*this, 1.0) <= 0.0;
}

std::string PotentialSpec::describe() const {
    std::ostringstream os;
    if (kind == PotentialKind::Cubic)
        os << "cubic(q_min=" << q_min << ", q_max=" << q_max << ", c=" << c << ")";
    else
        os << "monomial(p=" << p << ")";
    return os.str();
}

void AnnealPoint::validate() const {
    if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("AnnealPoint: s must lie in [0,1]");
    if (!(beta >= 0.0)) throw std::invalid_argument("AnnealPoint: beta must be >= 0");
}

double potential(const PotentialSpec& spec, double q) {
    if (std::abs(q) > 1.0 + 1e-12) throw std::domain_error("potential: |q| > 1");
    if (spec.kind == PotentialKind::Cubic) {
        const double d = q - spec.q_min;
        const double b = 0.5 * (3.0 * spec.q_max - spec.q_min);
        return -spec.c * d * d * (q - b);
    }
    return std::pow(q, spec.p);
}

double potential_slope(const PotentialSpec& spec, double q) {
    if (spec.kind == PotentialKind::Cubic)
        return -3.0 * spec.c * (q - spec.q_min) * (q - spec.q_max);
    return spec.p * std::pow(q, spec.p - 1);
}

double potential_curvature(const PotentialSpec& spec, double q) {
    if (spec.kind == PotentialKind::Cubic)
        return -3.0 * spec.c * (2.0 * q - spec.q_min - spec.q_max);
    return spec.p * (spec.p - 1) * std::pow(q, spec.p - 2);
}

double sector_entropy(double k) {
    if (k < -1e-15 || k > 0.5 + 1e-15) throw std::domain_error("sector_entropy: k outside [0,1/2]");
    k = std::clamp(k, 0.0, 0.5);
    if (k == 0.0) return 0.0;  // limit value, avoids 0*log(0)
    return -k * std::log(k) - (1.0 - k) * std::log(1.0 - k);
}

double sector_entropy_slope(double k) { return std::log((1.0 - k) / k); }

double classical_entropy(double q) {
    if (std::abs(q) > 1.0 + 1e-15) throw std::domain_error("classical_entropy: |q| > 1");
    return sector_entropy(0.5 * (1.0 - std::clamp(q, -1.0, 1.0)));
}

namespace {

inline double band_radicand(double k, double q) {
    const double e = 1.0 - 2.0 * k;
    return e * e - q * q;
}

inline double band_width(double k, double q, const char* who) {
    const double r = band_radicand(k, q);
    if (r < -1e-13) throw std::domain_error(std::string(who) + ": |q| > 1-2k");
    return std::sqrt(std::max(r, 0.0));
}

}  // namespace

double effective_potential(const PotentialSpec& spec, double k, double q, double s) {
    return s * potential(spec, q) - 0.5 * (1.0 - s) * band_width(k, q, "effective_potential");
}

double effective_potential_slope(const PotentialSpec& spec, double k, double q, double s) {
    const double w = band_width(k, q, "effective_potential_slope");
    return s * potential_slope(spec, q) + 0.5 * (1.0 - s) * q / w;
}

double band_top(const PotentialSpec& spec, double k, double q, double s) {
    return s * potential(spec, q) + 0.5 * (1.0 - s) * band_width(k, q, "band_top");
}

double effective_mass(const PotentialSpec&, double k, double q, double s) {
    const double w = band_width(k, q, "effective_mass");
    return 1.0 / (0.5 * (1.0 - s) * w);
}

double effective_potential_d2q(const PotentialSpec& spec, double k, double q, double s) {
    const double w = band_width(k, q, "effective_potential_d2q");
    const double e = 1.0 - 2.0 * k;
    return s * potential_curvature(spec, q) + 0.5 * (1.0 - s) * e * e / (w * w * w);
}

double effective_potential_dk(const PotentialSpec&, double k, double q, double s) {
    const double w = band_width(k, q, "effective_potential_dk");
    return (1.0 - s) * (1.0 - 2.0 * k) / w;
}

double effective_potential_d2k(const PotentialSpec&, double k, double q, double s) {
    const double w = band_width(k, q, "effective_potential_d2k");
    return 2.0 * (1.0 - s) * q * q / (w * w * w);
}

double effective_potential_dkdq(const PotentialSpec&, double k, double q, double s) {
    const double w = band_width(k, q, "effective_potential_dkdq");
    return (1.0 - s) * (1.0 - 2.0 * k) * q / (w * w * w);
}

namespace {

constexpr int kLandscapeGrid = 2048;

// Interior sample points of the band (-e, e): uniform grid plus log-spaced
// refinement toward both edges. A uniform grid alone misses minima that sit
// within ~1e-4 of the band edge (the right well at large s).
std::vector<double> band_samples(double e) {
    std::vector<double> qs;
    qs.reserve(kLandscapeGrid + 128);
    for (int i = 1; i <= kLandscapeGrid; ++i)
        qs.push_back(-e + 2.0 * e * i / (kLandscapeGrid + 1));
    for (int i = 0; i < 64; ++i) {
        const double rel = std::pow(10.0, -2.5 - 10.5 * i / 63.0);
        qs.push_back(e * (1.0 - rel));
        qs.push_back(-e * (1.0 - rel));
    }
    std::sort(qs.begin(), qs.end());
    qs.erase(std::unique(qs.begin(), qs.end()), qs.end());
    return qs;
}

struct Stationary {
    double q;
    bool minimum;
};

std::vector<Stationary> interior_stationary(const PotentialSpec& spec, double k, double s) {
    const double e = 1.0 - 2.0 * k;
    const auto slope = [&](double q) { return effective_potential_slope(spec, k, q, s); };
    const auto qs = band_samples(e);
    std::vector<double> g(qs.size());
    for (std::size_t i = 0; i < qs.size(); ++i) g[i] = slope(qs[i]);

    std::vector<Stationary> out;
    for (std::size_t i = 0; i + 1 < qs.size(); ++i) {
        double root;
        if (g[i] == 0.0) {
            root = qs[i];
        } else if (g[i] * g[i + 1] < 0.0) {
            root = bisect_root(slope, qs[i], qs[i + 1], 1e-15 * std::max(1.0, e));
        } else {
            continue;
        }
        const bool minimum = effective_potential_d2q(spec, k, root, s) > 0.0;
        if (!out.empty() && std::abs(out.back().q - root) < 1e-14) continue;
        out.push_back({root, minimum});
    }
    return out;
}

Landscape classical_landscape(const PotentialSpec& spec, double k) {
    // s = 1: U = f on the band, no edge repulsion; band edges may be minima.
    const double e = 1.0 - 2.0 * k;
    const auto value = [&](double q) { return potential(spec, q); };
    Landscape land;
    std::vector<Stationary> stat;
    if (e > 0.0) {
        const auto qs = band_samples(e);
        const auto slope = [&](double q) { return potential_slope(spec, q); };
        for (std::size_t i = 0; i + 1 < qs.size(); ++i) {
            double root;
            if (slope(qs[i]) == 0.0)
                root = qs[i];
            else if (slope(qs[i]) * slope(qs[i + 1]) < 0.0)
                root = bisect_root(slope, qs[i], qs[i + 1], 1e-15);
            else
                continue;
            if (!stat.empty() && std::abs(stat.back().q - root) < 1e-14) continue;
            stat.push_back({root, potential_curvature(spec, root) > 0.0});
        }
    }
    std::vector<Extremum> minima;
    if (e > 0.0 && potential_slope(spec, -e) > 0.0) minima.push_back({-e, value(-e)});
    for (const auto& st : stat)
        if (st.minimum) minima.push_back({st.q, value(st.q)});
    if (potential_slope(spec, e) < 0.0) minima.push_back({e, value(e)});
    if (minima.empty()) {
        // monotone profile: the lower band edge is the single minimum
        const double q0 = value(-e) <= value(e) ? -e : e;
        land.left_min = {q0, value(q0)};
        return land;
    }
    land.left_min = minima.front();
    if (minima.size() >= 2) {
        land.right_min = minima[1];
        // barrier top: the interior maximum between the two minima
        for (const auto& st : stat) {
            if (!st.minimum && st.q > land.left_min.q && st.q < land.right_min->q) {
                land.barrier_top = Extremum{st.q, value(st.q)};
                break;
            }
        }
        if (!land.barrier_top) land.right_min.reset();
    }
    return land;
}

}  // namespace

Landscape landscape(const PotentialSpec& spec, double k, double s) {
    if (k < -1e-15 || k > 0.5 + 1e-15) throw std::domain_error("landscape: k outside [0,1/2]");
    if (s < 0.0 || s > 1.0) throw std::domain_error("landscape: s outside [0,1]");
    k = std::clamp(k, 0.0, 0.5);
    const double e = 1.0 - 2.0 * k;
    Landscape land;
    if (e <= 1e-15) {
        land.left_min = {0.0, s * potential(spec, 0.0)};
        return land;
    }
    if (s == 1.0) return classical_landscape(spec, k);

    const auto stat = interior_stationary(spec, k, s);
    // For s < 1 the band edges repel, so there is always at least one interior
    // minimum and the profile alternates min/max/min/...
    std::vector<Extremum> minima, maxima;
    for (const auto& st : stat) {
        const double u = effective_potential(spec, k, st.q, s);
        if (st.minimum)
            minima.push_back({st.q, u});
        else
            maxima.push_back({st.q, u});
    }
    if (minima.empty()) {
        // numerical corner: fall back to the grid minimum
        const auto qs = band_samples(e);
        double best_q = qs.front();
        double best_u = effective_potential(spec, k, best_q, s);
        for (double q : qs) {
            const double u = effective_potential(spec, k, q, s);
            if (u < best_u) {
                best_u = u;
                best_q = q;
            }
        }
        land.left_min = {best_q, best_u};
        return land;
    }
    land.left_min = minima.front();
    if (minima.size() >= 2) {
        land.right_min = minima[1];
        for (const auto& mx : maxima) {
            if (mx.q > land.left_min.q && mx.q < land.right_min->q) {
                land.barrier_top = mx;
                break;
            }
        }
        if (!land.barrier_top) land.right_min.reset();
    }
    return land;
}

namespace {

// True when U(k,.) still has a right well. Near the merge point the two
// stationary points are closer than any grid,so refine by minimizing the
// slope beyond the barrier climb and checking it dips below zero.
bool right_well_exists(const PotentialSpec& spec, double k, double s) {
    if (k >= 0.5) return false;
    if (s == 1.0) return spec.kind == PotentialKind::Cubic && spec.q_max < 1.0 - 2.0 * k;
    Landscape land = landscape(spec, k, s);
    if (land.two_wells()) return true;
    const double e = 1.0 - 2.0 * k;
    const auto slope = [&](double q) { return effective_potential_slope(spec, k, q, s); };
    // scan the climb region beyond the left minimum for a slope dip
    const double q0 = land.left_min.q;
    const int n = 1024;
    double best_g = std::numeric_limits<double>::infinity();
    int best_i = -1;
    std::vector<double> qs(n);
    for (int i = 0; i < n; ++i) {
        // log-spaced approach to the right band edge
        const double t = static_cast<double>(i) / (n - 1);
        const double rel = std::pow(10.0, -13.0 * t);
        qs[i] = e - (e - q0) * rel;
    }
    std::reverse(qs.begin(), qs.end());  // ascending from just above q0
    bool climbing = false;
    for (int i = 0; i < n; ++i) {
        const double g = slope(qs[i]);
        if (g > 0.0) climbing = true;
        if (climbing && g < best_g) {
            best_g = g;
            best_i = i;
        }
    }
    if (best_i < 0) return false;
    if (best_g < 0.0) return true;
    if (best_i == 0 || best_i == n - 1) return false;
    const double refined =
        golden_minimize(slope, qs[best_i - 1], qs[best_i + 1], 1e-15 * std::max(1.0, e));
    return slope(refined) < 0.0;
}

}  // namespace

std::optional<double> k_star(const PotentialSpec& spec, double s) {
    if (s == 1.0) {
        if (spec.kind == PotentialKind::Cubic && spec.q_max < 1.0)
            return 0.5 * (1.0 - spec.q_max);
        return std::nullopt;
    }
    if (!right_well_exists(spec, 0.0, s)) return std::nullopt;
    double lo = 0.0, hi = 0.5;
    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        if (right_well_exists(spec, mid, s))
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace pspin
