#include "pspin/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "pspin/numerics.hpp"

namespace pspin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kLineGrid = 512;

// Continuation of the stationary points of U(k,.) along a k sweep: Newton
// steps seeded from the previous k, re-synced against the full grid scan
// periodically and on any failure. Sweeps call landscape() ~16x instead of
// 512x.
class TrackedLandscape {
  public:
    TrackedLandscape(const PotentialSpec& spec, double s) : spec_(spec), s_(s) {}

    Landscape at(double k) {
        if (s_ == 1.0) return landscape(spec_, k, s_);
        if (have_ && steps_since_sync_ < 32) {
            if (auto land = refine_all(k)) {
                ++steps_since_sync_;
                remember(k, *land);
                return *land;
            }
        }
        const Landscape land = landscape(spec_, k, s_);
        steps_since_sync_ = 0;
        remember(k, land);
        return land;
    }

  private:
    void remember(double, const Landscape& land) {
        have_ = true;
        q_left_ = land.left_min.q;
        two_wells_ = land.two_wells();
        if (two_wells_) {
            q_top_ = land.barrier_top->q;
            q_right_ = land.right_min->q;
        }
    }

    std::optional<double> refine(double seed, double k, int want_min) const {
        const double e = 1.0 - 2.0 * k;
        double q = std::clamp(seed, -e * (1.0 - 1e-12), e * (1.0 - 1e-12));
        for (int i = 0; i < 16; ++i) {
            const double g = effective_potential_slope(spec_, k, q, s_);
            const double h = effective_potential_d2q(spec_, k, q, s_);
            if (h == 0.0) return std::nullopt;
            double step = -g / h;
            const double cap = 0.05 * e;
            step = std::clamp(step, -cap, cap);
            double next = q + step;
            if (!(std::abs(next) < e)) return std::nullopt;
            if (std::abs(step) < 1e-14 * std::max(1.0, e)) {
                q = next;
                const double curve = effective_potential_d2q(spec_, k, q, s_);
                if (want_min * curve <= 0.0) return std::nullopt;
                if (std::abs(effective_potential_slope(spec_, k, q, s_)) > 1e-8)
                    return std::nullopt;
                return q;
            }
            q = next;
        }
        return std::nullopt;
    }

    std::optional<Landscape> refine_all(double k) const {
        Landscape land;
        const auto left = refine(q_left_, k, +1);
        if (!left) return std::nullopt;
        land.left_min = {*left, effective_potential(spec_, k, *left, s_)};
        if (!two_wells_) return land;
        const auto top = refine(q_top_, k, -1);
        const auto right = refine(q_right_, k, +1);
        if (!top || !right) return std::nullopt;
        if (!(*left < *top && *top < *right)) return std::nullopt;
        if (*top - *left < 1e-9 || *right - *top < 1e-9) return std::nullopt;
        land.barrier_top = Extremum{*top, effective_potential(spec_, k, *top, s_)};
        land.right_min = Extremum{*right, effective_potential(spec_, k, *right, s_)};
        return land;
    }

    const PotentialSpec& spec_;
    double s_;
    bool have_ = false;
    bool two_wells_ = false;
    double q_left_ = 0.0, q_top_ = 0.0, q_right_ = 0.0;
    int steps_since_sync_ = 0;
};

double left_energy(const PotentialSpec& spec, double s, double k) {
    return landscape(spec, k, s).left_min.energy;
}

// Right-well bottom at sector k; just below the inflection the well can have
// merged numerically, so back off toward smaller k.
double right_energy(const PotentialSpec& spec, double s, double k) {
    Landscape land = landscape(spec, k, s);
    if (land.right_min) return land.right_min->energy;
    for (double shrink : {1e-7, 1e-5, 1e-3}) {
        land = landscape(spec, k * (1.0 - shrink), s);
        if (land.right_min) return land.right_min->energy;
    }
    return landscape(spec, 0.0, s).barrier_top->energy;  // worst case: top
}

// Free-energy minimization along one well line, grid scan plus golden polish.
struct LineMinimum {
    double k = 0.0;
    double energy = 0.0;
    double value = kInf;
};

// Energies of one well along the k grid; NaN where the well is missing.
struct WellLineScan {
    std::vector<double> k;
    std::vector<double> energy;
    std::vector<double> entropy;
};

WellLineScan scan_line(const PotentialSpec& spec, double s, double k_hi, WellSide side) {
    WellLineScan scan;
    scan.k.resize(kLineGrid);
    scan.energy.resize(kLineGrid);
    scan.entropy.resize(kLineGrid);
    TrackedLandscape tracker(spec, s);
    for (int i = 0; i < kLineGrid; ++i) {
        const double k = k_hi * i / (kLineGrid - 1);
        scan.k[i] = k;
        scan.entropy[i] = sector_entropy(k);
        const Landscape land = tracker.at(k);
        if (side == WellSide::Left)
            scan.energy[i] = land.left_min.energy;
        else
            scan.energy[i] =
                land.right_min ? land.right_min->energy : std::numeric_limits<double>::quiet_NaN();
    }
    return scan;
}

template <class EnergyFn>
LineMinimum polish_line_minimum(const WellLineScan& scan, double beta, EnergyFn&& energy_at) {
    int idx = -1;
    double best = kInf;
    for (int i = 0; i < kLineGrid; ++i) {
        const double v = beta * scan.energy[i] - scan.entropy[i];
        if (std::isfinite(v) && v < best) {
            best = v;
            idx = i;
        }
    }
    if (idx < 0) return {};
    const auto value_at = [&](double k) { return beta * energy_at(k) - sector_entropy(k); };
    const double a = scan.k[std::max(idx - 1, 0)];
    const double b = scan.k[std::min(idx + 1, kLineGrid - 1)];
    LineMinimum res;
    res.k = golden_minimize(value_at, a, b, 1e-13);
    res.energy = energy_at(res.k);
    res.value = beta * res.energy - sector_entropy(res.k);
    if (best < res.value) {
        res.k = scan.k[idx];
        res.energy = scan.energy[idx];
        res.value = best;
    }
    return res;
}

LineMinimum left_line_minimum(const PotentialSpec& spec, double s, double beta) {
    const double k_hi = 0.5 * (1.0 - 1e-9);
    const auto scan = scan_line(spec, s, k_hi, WellSide::Left);
    return polish_line_minimum(scan, beta, [&](double k) { return left_energy(spec, s, k); });
}

LineMinimum right_line_minimum(const PotentialSpec& spec, double s, double beta,
                               double k_star_val) {
    const double k_hi = std::max(k_star_val * (1.0 - 1e-9) - 1e-12, 0.0);
    const auto scan = scan_line(spec, s, k_hi, WellSide::Right);
    return polish_line_minimum(scan, beta, [&](double k) { return right_energy(spec, s, k); });
}

}  // namespace

std::optional<FreeEnergyWell> well_free_energy(const PotentialSpec& spec,
                                               const AnnealPoint& point, WellSide side) {
    spec.validate();
    point.validate();
    const double s = point.s;
    if (side == WellSide::Right) {
        const auto ks = k_star(spec, s);
        if (!ks) return std::nullopt;
        if (point.zero_temperature()) {
            const Landscape land = landscape(spec, 0.0, s);
            if (!land.right_min) return std::nullopt;
            const double e = land.right_min->energy;
            return FreeEnergyWell{side, 0.0, e, e == 0.0 ? 0.0 : (e > 0 ? kInf : -kInf)};
        }
        const auto lm = right_line_minimum(spec, s, point.beta, *ks);
        return FreeEnergyWell{side, lm.k, lm.energy, lm.value};
    }
    if (point.zero_temperature()) {
        const double e = left_energy(spec, s, 0.0);
        return FreeEnergyWell{side, 0.0, e, e == 0.0 ? 0.0 : (e > 0 ? kInf : -kInf)};
    }
    const auto lm = left_line_minimum(spec, s, point.beta);
    return FreeEnergyWell{side, lm.k, lm.energy, lm.value};
}

namespace {

// Inner minimization of sigma(k,E) + beta*E over the feasible energy window
// at fixed k. The period T(E) is non-monotone (first-order structure), so the
// objective may have two local minima: scan a grid, then polish with golden
// sections around the best bracket.
struct InnerResult {
    double energy = 0.0;
    double value = kInf;       // sigma + beta * E
    double sigma = 0.0;
    bool at_top = false;
    bool at_bottom = false;
};

InnerResult minimize_energy(const PotentialSpec& spec, double k, const AnnealPoint& point,
                            const Landscape& land, int n_energy = 33) {
    InnerResult res;
    const double e_lo = std::max(land.left_min.energy, land.right_min->energy);
    const double e_hi = land.barrier_top->energy;
    const double beta = point.beta;
    if (e_hi - e_lo < 1e-14) {
        res.energy = e_hi;
        res.sigma = 0.0;
        res.value = beta * e_hi;
        res.at_top = true;
        return res;
    }
    const auto objective = [&](double E) {
        return barrier_action(spec, k, E, point, land).sigma + beta * E;
    };
    std::vector<double> es(n_energy), vals(n_energy);
    for (int i = 0; i < n_energy; ++i) {
        es[i] = e_lo + (e_hi - e_lo) * i / (n_energy - 1);
        vals[i] = objective(es[i]);
    }
    int idx = 0;
    for (int i = 1; i < n_energy; ++i)
        if (vals[i] < vals[idx]) idx = i;
    const double a = es[std::max(idx - 1, 0)];
    const double b = es[std::min(idx + 1, n_energy - 1)];
    double e_best = golden_minimize(objective, a, b, 1e-13 * std::max(1.0, std::abs(e_hi)));
    double v_best = objective(e_best);
    if (vals[idx] < v_best) {
        e_best = es[idx];
        v_best = vals[idx];
    }
    res.energy = e_best;
    res.value = v_best;
    res.sigma = v_best - beta * e_best;
    const double tol = 1e-9 * std::max(1.0, e_hi - e_lo);
    res.at_top = (e_hi - e_best) < tol;
    res.at_bottom = (e_best - e_lo) < tol;
    return res;
}

}  // namespace

RateResult optimal_quantum_action(const PotentialSpec& spec, const AnnealPoint& point) {
    spec.validate();
    point.validate();
    const double s = point.s;
    const Landscape land0 = landscape(spec, 0.0, s);
    if (!land0.two_wells())
        throw std::domain_error("optimal_quantum_action: two coexisting wells required");

    if (point.zero_temperature()) {
        // tunneling from the lowest metastable level, k = 0; no entropy input
        RateResult res;
        res.mechanism = EscapeMechanism::QuantumTunneling;
        res.k_opt = 0.0;
        res.energy_opt = land0.left_min.energy;
        if (land0.right_min->energy > land0.left_min.energy) {
            res.constrained = true;
            res.sigma_opt = kInf;
            return res;
        }
        res.sigma_opt = barrier_action(spec, 0.0, res.energy_opt, point, land0).sigma;
        return res;
    }

    const double beta = point.beta;
    const auto ks = k_star(spec, s);
    const double k_hi = *ks;

    struct KEntry {
        double k = 0.0;
        InnerResult inner;
        double g = kInf;  // inner.value - Q_k
    };
    const int nk = kLineGrid;
    std::vector<KEntry> entries(nk);
    parallel_for(nk, [&](std::size_t i) {
        const double k = k_hi * static_cast<double>(i) / (nk - 1);
        entries[i].k = k;
        const Landscape land = landscape(spec, k, s);
        if (!land.two_wells()) return;
        entries[i].inner = minimize_energy(spec, k, point, land);
        entries[i].g = entries[i].inner.value - sector_entropy(k);
    });
    int idx = 0;
    for (int i = 1; i < nk; ++i)
        if (entries[i].g < entries[idx].g) idx = i;

    const auto g_at = [&](double k) {
        const Landscape land = landscape(spec, k, s);
        if (!land.two_wells()) return kInf;
        return minimize_energy(spec, k, point, land).value - sector_entropy(k);
    };
    const double ka = entries[std::max(idx - 1, 0)].k;
    const double kb = entries[std::min(idx + 1, nk - 1)].k;
    double k_opt = golden_minimize(g_at, ka, kb, 1e-11);
    const Landscape land_opt0 = landscape(spec, k_opt, s);
    InnerResult inner;
    double g_opt;
    if (land_opt0.two_wells()) {
        inner = minimize_energy(spec, k_opt, point, land_opt0);
        g_opt = inner.value - sector_entropy(k_opt);
    } else {
        g_opt = kInf;
    }
    if (entries[idx].g < g_opt) {
        k_opt = entries[idx].k;
        inner = entries[idx].inner;
        g_opt = entries[idx].g;
    }

    const auto metastable = left_line_minimum(spec, s, beta);
    const Landscape land_opt = landscape(spec, k_opt, s);

    RateResult res;
    res.sigma_opt = g_opt - metastable.value;
    res.k_opt = k_opt;
    res.energy_opt = inner.energy;
    res.mechanism = inner.at_top ? EscapeMechanism::ClassicalOverBarrier
                                 : EscapeMechanism::QuantumTunneling;
    res.constrained = inner.at_bottom && land_opt.two_wells() &&
                      land_opt.right_min->energy > land_opt.left_min.energy + 1e-12;
    if (res.mechanism == EscapeMechanism::ClassicalOverBarrier && land_opt.barrier_top)
        res.q_saddle = land_opt.barrier_top->q;
    return res;
}

namespace {

// One 2-D Newton polish of grad F = 0 for F(k,q) = beta U - Q_k, with an
// indefinite-Hessian acceptance check.
bool newton_saddle(const PotentialSpec& spec, double s, double beta, double k_max, double& k,
                   double& q) {
    for (int iter = 0; iter < 40; ++iter) {
        if (!(k > 1e-12 && k < k_max - 1e-12)) return false;
        const double e = 1.0 - 2.0 * k;
        if (!(std::abs(q) < e * (1.0 - 1e-12))) return false;
        const double gk = beta * effective_potential_dk(spec, k, q, s) - sector_entropy_slope(k);
        const double gq = beta * effective_potential_slope(spec, k, q, s);
        const double hkk =
            beta * effective_potential_d2k(spec, k, q, s) + 1.0 / (k * (1.0 - k));
        const double hqq = beta * effective_potential_d2q(spec, k, q, s);
        const double hkq = beta * effective_potential_dkdq(spec, k, q, s);
        const double det = hkk * hqq - hkq * hkq;
        if (std::abs(det) < 1e-300) return false;
        const double dk = (-gk * hqq + gq * hkq) / det;
        const double dq = (-gq * hkk + gk * hkq) / det;
        const double scale = std::max(std::abs(dk), std::abs(dq));
        const double damp = scale > 0.01 ? 0.01 / scale : 1.0;
        k += damp * dk;
        q += damp * dq;
        if (scale < 1e-13) {
            // converged; accept only genuine saddles
            return det < 0.0;
        }
    }
    return false;
}

}  // namespace

RateResult classical_escape_action(const PotentialSpec& spec, const AnnealPoint& point) {
    spec.validate();
    point.validate();
    const double s = point.s;
    RateResult res;
    res.mechanism = EscapeMechanism::ClassicalOverBarrier;
    if (point.zero_temperature()) {
        res.sigma_opt = kInf;
        return res;
    }
    const double beta = point.beta;
    const auto ks = k_star(spec, s);
    if (!ks || !landscape(spec, 0.0, s).two_wells())
        throw std::domain_error("classical_escape_action: two coexisting wells required");

    // ridge minimization: the separating saddle lies on the line of barrier
    // tops q_top(k), k in [0, k_star]
    const double k_hi = std::max(*ks * (1.0 - 1e-9) - 1e-12, 0.0);
    const auto ridge_at = [&](double k) -> double {
        const Landscape land = landscape(spec, k, s);
        if (!land.barrier_top) return kInf;
        return beta * land.barrier_top->energy - sector_entropy(k);
    };
    std::vector<double> kg(kLineGrid), vals(kLineGrid);
    for (int i = 0; i < kLineGrid; ++i) {
        kg[i] = k_hi * i / (kLineGrid - 1);
        vals[i] = ridge_at(kg[i]);
    }
    int idx = 0;
    for (int i = 1; i < kLineGrid; ++i)
        if (vals[i] < vals[idx]) idx = i;
    double k_sad = golden_minimize(ridge_at, kg[std::max(idx - 1, 0)],
                                   kg[std::min(idx + 1, kLineGrid - 1)], 1e-13);
    double f_sad = ridge_at(k_sad);
    if (vals[idx] < f_sad) {
        k_sad = kg[idx];
        f_sad = vals[idx];
    }
    Landscape land_sad = landscape(spec, k_sad, s);
    double q_sad = land_sad.barrier_top ? land_sad.barrier_top->q : 0.0;

    // interior saddles get a Newton polish on grad F = 0
    if (s < 1.0 && k_sad > 1e-9 && k_sad < k_hi * (1.0 - 1e-6)) {
        double kn = k_sad, qn = q_sad;
        if (newton_saddle(spec, s, beta, *ks, kn, qn)) {
            const double fn = beta * effective_potential(spec, kn, qn, s) - sector_entropy(kn);
            if (fn <= f_sad + 1e-10) {
                k_sad = kn;
                q_sad = qn;
                f_sad = fn;
            }
        }
    }

    const auto metastable = left_line_minimum(spec, s, beta);
    res.sigma_opt = f_sad - metastable.value;
    res.k_opt = k_sad;
    res.q_saddle = q_sad;
    res.energy_opt = s == 1.0 ? potential(spec, q_sad)
                              : effective_potential(spec, k_sad, q_sad, s);
    return res;
}

std::optional<double> qpt_point(const PotentialSpec& spec) {
    spec.validate();
    // difference of well minima at k = 0; defined where both wells exist
    const auto diff = [&](double s) -> std::optional<double> {
        const Landscape land = landscape(spec, 0.0, s);
        if (!land.two_wells()) return std::nullopt;
        return land.right_min->energy - land.left_min.energy;
    };
    // scan s upward on a grid geometric in 1-s: D > 0 below the transition,
    // D < 0 above it, undefined below the spinodal where the right well is
    // missing (and unresolvably close to s = 1)
    const int n = 700;
    double prev_s = 0.0, prev_d = 0.0;
    bool have_prev = false;
    for (int i = 0; i < n; ++i) {
        const double oms = 0.95 * std::pow(1e-12 / 0.95, static_cast<double>(i) / (n - 1));
        const double s = 1.0 - oms;
        const auto d = diff(s);
        if (!d) {
            have_prev = false;
            continue;
        }
        if (have_prev && prev_d >= 0.0 && *d < 0.0) {
            const auto f = [&](double x) {
                const auto v = diff(x);
                return v ? *v : 1.0;
            };
            return bisect_root(f, prev_s, s, 1e-13);
        }
        prev_s = s;
        prev_d = *d;
        have_prev = true;
    }
    return std::nullopt;
}

std::optional<double> critical_line(const PotentialSpec& spec, double s) {
    spec.validate();
    const auto sq = qpt_point(spec);
    if (!sq || s < *sq) return std::nullopt;
    const auto ks = k_star(spec, s);
    if (!ks) return std::nullopt;

    // precompute both well lines once; the beta bisection then reduces to
    // vector minima
    const auto left = scan_line(spec, s, 0.5 * (1.0 - 1e-9), WellSide::Left);
    const auto right =
        scan_line(spec, s, std::max(*ks * (1.0 - 1e-9) - 1e-12, 0.0), WellSide::Right);
    const auto line_min = [](const WellLineScan& scan, double beta) {
        double best = kInf;
        for (int i = 0; i < kLineGrid; ++i) {
            const double v = beta * scan.energy[i] - scan.entropy[i];
            if (std::isfinite(v)) best = std::min(best, v);
        }
        return best;
    };
    const auto gap = [&](double beta) { return line_min(right, beta) - line_min(left, beta); };
    const double lo = 1e-8;
    if (gap(lo) <= 0.0) return std::nullopt;
    double hi = 1.0;
    while (gap(hi) > 0.0) {
        hi *= 2.0;
        if (hi > 1e9) return std::nullopt;  // effectively infinite at s ~ s_QPT
    }
    return bisect_root(gap, lo, hi, 1e-11 * std::max(1.0, hi));
}

ClassicalBounds classical_bounds(const PotentialSpec& spec, double s) {
    spec.validate();
    const auto ks = k_star(spec, s);
    if (!ks) throw std::domain_error("classical_bounds: no right well at k = 0");
    ClassicalBounds bounds;
    bounds.k_star = *ks;
    const Landscape land0 = landscape(spec, 0.0, s);
    const double e_left0 = land0.left_min.energy;
    bounds.k0_slope = land0.barrier_top->energy - e_left0;
    const double k_edge = std::max(*ks * (1.0 - 1e-6) - 1e-12, 0.0);
    const Landscape land_star = landscape(spec, k_edge, s);
    const double top_star =
        land_star.barrier_top ? land_star.barrier_top->energy : land_star.left_min.energy;
    bounds.ridge_slope = top_star - e_left0;
    bounds.ridge_offset = sector_entropy(0.5) - sector_entropy(*ks);
    return bounds;
}

}  // namespace pspin
