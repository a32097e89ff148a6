#include "pspin/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pspin/numerics.hpp"

namespace pspin {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLn2 = 0.6931471805599453;
}  // namespace

double qa_exponent(const PotentialSpec& spec, double beta, double s_freeze) {
    spec.validate();
    const AnnealPoint point{s_freeze, beta};
    point.validate();
    const auto left = well_free_energy(spec, point, WellSide::Left);
    const auto right = well_free_energy(spec, point, WellSide::Right);
    if (!left || !right)
        throw std::domain_error("qa_exponent: both wells must exist at the freezing point");
    const double s_opt = optimal_quantum_action(spec, point).sigma_opt;
    if (point.zero_temperature()) {
        // occupation deficit vanishes when the right well is the deeper one
        return right->energy <= left->energy ? s_opt : kInf;
    }
    return s_opt + std::max(0.0, right->free_energy - left->free_energy);
}

ScheduleResult optimize_qa(const PotentialSpec& spec) {
    spec.validate();
    ScheduleResult result;
    result.algorithm = Algorithm::QA;
    const double cap = classical_entropy(spec.q_min);

    const auto sq = qpt_point(spec);
    if (!sq) {
        // no two-well window (degenerate or barrierless): local exhaustive search
        result.xi = cap;
        result.capped = true;
        result.divergent = spec.is_degenerate();
        result.algorithm = Algorithm::Exhaustive;
        result.s_freeze = 1.0;
        result.beta = 0.0;
        return result;
    }

    // freezing-point scan, log-spaced in 1-s: near-degenerate potentials have
    // all structure within (1-s_QPT) of s = 1
    const int n_s = 48;
    const double r_lo = 1e-3, r_hi = 0.9995;
    double best = kInf, best_s = *sq, best_beta = kInf;
    const auto zero_t_branch = [&](double s) {
        const AnnealPoint point{s, kInf};
        return optimal_quantum_action(spec, point).sigma_opt;
    };
    const auto critical_branch = [&](double s) -> double {
        const auto beta_pt = critical_line(spec, s);
        if (!beta_pt) return kInf;
        return optimal_quantum_action(spec, {s, *beta_pt}).sigma_opt;
    };
    std::vector<double> svals(n_s), a_vals(n_s), b_vals(n_s);
    for (int i = 0; i < n_s; ++i) {
        const double r = r_lo * std::pow(r_hi / r_lo, static_cast<double>(i) / (n_s - 1));
        svals[i] = 1.0 - (1.0 - *sq) * r;
    }
    std::sort(svals.begin(), svals.end());
    parallel_for(n_s, [&](std::size_t i) {
        a_vals[i] = zero_t_branch(svals[i]);
        b_vals[i] = critical_branch(svals[i]);
    });
    int best_i = -1;
    bool best_zero_t = true;
    for (int i = 0; i < n_s; ++i) {
        if (a_vals[i] < best) {
            best = a_vals[i];
            best_i = i;
            best_zero_t = true;
        }
        if (b_vals[i] < best) {
            best = b_vals[i];
            best_i = i;
            best_zero_t = false;
        }
    }
    if (best_i >= 0) {
        const auto branch = [&](double s) {
            return best_zero_t ? zero_t_branch(s) : critical_branch(s);
        };
        const double sa = svals[std::max(best_i - 1, 0)];
        const double sb = svals[std::min(best_i + 1, n_s - 1)];
        const double s_pol = golden_minimize(branch, sa, sb, 1e-7 * (1.0 - *sq));
        const double v_pol = branch(s_pol);
        if (v_pol < best) {
            best = v_pol;
            best_s = s_pol;
        } else {
            best_s = svals[best_i];
        }
        if (!best_zero_t) {
            const auto bpt = critical_line(spec, best_s);
            best_beta = bpt ? *bpt : kInf;
        }
    }

    result.s_freeze = best_s;
    result.beta = best_beta;
    result.xi = best;
    if (!(best < cap)) {
        result.xi = cap;
        result.capped = true;
        result.algorithm = Algorithm::Exhaustive;
        result.divergent = !std::isfinite(best);
    }
    return result;
}

ScheduleResult sa_exponent(const PotentialSpec& spec) {
    spec.validate();
    ScheduleResult result;
    result.algorithm = Algorithm::SA;
    result.s_freeze = 1.0;
    const double f_meta = potential(spec, spec.q_min);
    const double f_top = potential(spec, spec.q_max);
    const double f_ground = potential(spec, 1.0);
    const double gap = f_meta - f_ground;
    const double entropy_cost = classical_entropy(spec.q_min) - classical_entropy(spec.q_max);
    if (gap <= 1e-300) {
        result.xi = kLn2;
        result.capped = true;
        result.divergent = true;
        result.algorithm = Algorithm::Exhaustive;
        result.beta = 0.0;
        return result;
    }
    const double beta_pt = classical_entropy(spec.q_min) / gap;
    const double relax = beta_pt * (f_top - f_meta) + entropy_cost;
    if (relax >= kLn2) {
        result.xi = kLn2;
        result.capped = true;
        result.algorithm = Algorithm::Exhaustive;
        result.beta = 0.0;
        return result;
    }
    result.xi = relax;
    result.beta = beta_pt;
    return result;
}

std::vector<SweepCell> comparison_sweep(std::span<const double> q_min_grid,
                                        std::span<const double> q_max_grid) {
    const std::size_t n = q_min_grid.size() * q_max_grid.size();
    std::vector<SweepCell> cells(n);
    parallel_for(n, [&](std::size_t idx) {
        SweepCell& cell = cells[idx];
        cell.q_min = q_min_grid[idx / q_max_grid.size()];
        cell.q_max = q_max_grid[idx % q_max_grid.size()];
        PotentialSpec spec;
        spec.q_min = cell.q_min;
        spec.q_max = cell.q_max;
        try {
            spec.validate();
        } catch (const std::invalid_argument&) {
            cell.feasible = false;
            return;
        }
        cell.feasible = true;
        cell.qa = optimize_qa(spec);
        cell.sa = sa_exponent(spec);
        cell.winner = cell.qa.xi < cell.sa.xi ? Algorithm::QA : Algorithm::SA;
    });
    return cells;
}

}  // namespace pspin
