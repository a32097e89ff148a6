#include "pspin/exact.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pspin/numerics.hpp"
#include "pspin/rates.hpp"
#include "pspin/wkb.hpp"

namespace pspin {

namespace {

double log_binomial(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// exact binomial via Pascal recurrence; valid without overflow for n <= 62
std::uint64_t binomial_u64(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t c = 1;
    for (int i = 1; i <= k; ++i) {
        // multiply first where exact: c * (n-k+i) always divisible by i here
        c = c / i * (n - k + i) + c % i * (n - k + i) / i;
    }
    return c;
}

}  // namespace

double log_sector_degeneracy(int n_spins, int sector) {
    if (sector == 0) return 0.0;
    const double a = log_binomial(n_spins, sector);
    const double b = log_binomial(n_spins, sector - 1);
    return a + std::log1p(-std::exp(b - a));
}

SectorMatrix build_sector(int n_spins, int sector, const PotentialSpec& spec, double s) {
    if (n_spins < 1) throw std::domain_error("build_sector: N must be >= 1");
    if (sector < 0 || sector > n_spins / 2)
        throw std::domain_error("build_sector: K must lie in [0, floor(N/2)]");
    SectorMatrix m;
    m.n_spins = n_spins;
    m.sector = sector;
    const double S = m.spin();
    const int dim = static_cast<int>(std::lround(2.0 * S)) + 1;
    m.diagonal.resize(dim);
    m.offdiagonal.resize(dim - 1);
    for (int i = 0; i < dim; ++i) {
        const double mz = -S + i;
        m.diagonal[i] = s * n_spins * potential(spec, 2.0 * mz / n_spins);
    }
    // transverse element in the convention whose large-N limit reproduces the
    // kinetic term (1-s)/2 sqrt((1-2k)^2 - q^2) cos p
    for (int i = 0; i + 1 < dim; ++i) {
        const double mz = -S + i;
        m.offdiagonal[i] = -(1.0 - s) * 0.5 * std::sqrt(S * (S + 1.0) - mz * (mz + 1.0));
    }
    if (n_spins <= 62) {
        const std::uint64_t a = binomial_u64(n_spins, sector);
        const std::uint64_t b = sector > 0 ? binomial_u64(n_spins, sector - 1) : 0;
        m.degeneracy = a - b;
    }
    m.log_degeneracy = log_sector_degeneracy(n_spins, sector);
    return m;
}

std::vector<double> sector_spectrum(const SectorMatrix& m) {
    const int dim = m.dim();
    if (dim == 1) return {m.diagonal[0]};
    Eigen::Map<const Eigen::VectorXd> diag(m.diagonal.data(), dim);
    Eigen::Map<const Eigen::VectorXd> off(m.offdiagonal.data(), dim - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("sector_spectrum: eigensolver failed");
    std::vector<double> out(dim);
    Eigen::Map<Eigen::VectorXd>(out.data(), dim) = solver.eigenvalues();
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<double> sector_lowest(int n_spins, int sector, const PotentialSpec& spec, double s,
                                  int n_low) {
    const auto m = build_sector(n_spins, sector, spec, s);
    auto all = sector_spectrum(m);
    all.resize(std::min<std::size_t>(n_low, all.size()));
    return all;
}

double initial_final_overlap(int n_spins, int sector) {
    if (sector < 0 || sector > n_spins / 2)
        throw std::domain_error("initial_final_overlap: K outside [0, floor(N/2)]");
    return std::exp(0.5 * (log_binomial(n_spins, sector) - n_spins * std::log(2.0)));
}

namespace {

double doublet_gap(const PotentialSpec& spec, double s, int n_spins) {
    const auto low = sector_lowest(n_spins, 0, spec, s, 2);
    return low[1] - low[0];
}

// Minimal K=0 doublet gap over s around s_center: the finite-N resonance where
// the two well-bottom levels anticross.
GapPoint min_gap(const PotentialSpec& spec, double s_center, int n_spins) {
    GapPoint point;
    point.n_spins = n_spins;
    const double width = std::min({0.05, 0.5 * (1.0 - s_center), 0.5 * s_center});
    const double lo = s_center - width;
    const double hi = std::min(s_center + width, 0.99999);
    const int n_scan = 161;
    int idx = 0;
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> svals(n_scan);
    for (int i = 0; i < n_scan; ++i) {
        svals[i] = lo + (hi - lo) * i / (n_scan - 1);
        const double g = doublet_gap(spec, svals[i], n_spins);
        if (g < best) {
            best = g;
            idx = i;
        }
    }
    const double a = svals[std::max(idx - 1, 0)];
    const double b = svals[std::min(idx + 1, n_scan - 1)];
    const double s_opt =
        golden_minimize([&](double s) { return doublet_gap(spec, s, n_spins); }, a, b, 1e-14);
    const double g_opt = doublet_gap(spec, s_opt, n_spins);
    if (g_opt < best) {
        point.s_resonance = s_opt;
        point.gap = g_opt;
    } else {
        point.s_resonance = svals[idx];
        point.gap = best;
    }
    return point;
}

}  // namespace

ScalingReport wkb_scaling_check(const PotentialSpec& spec, double s,
                                const std::vector<int>& n_list) {
    spec.validate();
    if (n_list.size() < 4)
        throw std::invalid_argument("wkb_scaling_check: need at least 4 system sizes");
    ScalingReport report;

    const Landscape land = landscape(spec, 0.0, s);
    const bool have_barrier = land.two_wells();
    if (have_barrier) {
        const AnnealPoint point{s, std::numeric_limits<double>::infinity()};
        const double e_bottom = std::max(land.left_min.energy, land.right_min->energy);
        report.sigma_wkb = barrier_action(spec, 0.0, e_bottom, point, land).sigma;
        report.u_min = land.left_min.energy;
    } else {
        report.sigma_wkb = std::numeric_limits<double>::quiet_NaN();
        report.u_min = land.left_min.energy;
    }

    report.gaps.resize(n_list.size());
    report.ground_energy_per_spin.resize(n_list.size());
    parallel_for(n_list.size(), [&](std::size_t i) {
        report.gaps[i] = min_gap(spec, s, n_list[i]);
        report.ground_energy_per_spin[i] =
            sector_lowest(n_list[i], 0, spec, s, 1)[0] / n_list[i];
    });

    std::vector<double> xs, ys;
    for (const auto& g : report.gaps) {
        if (g.gap > 1e-300) {
            xs.push_back(g.n_spins);
            ys.push_back(std::log(g.gap));
        }
    }
    if (xs.size() >= 2) {
        const auto fit = fit_line(xs, ys);
        report.slope = fit.slope;
        report.intercept = fit.intercept;
        report.r2 = fit.r2;
        if (have_barrier && report.sigma_wkb > 0.0)
            report.relative_deviation =
                std::abs(-2.0 * fit.slope - report.sigma_wkb) / report.sigma_wkb;
        else
            report.relative_deviation = std::numeric_limits<double>::quiet_NaN();
        report.exponential = have_barrier && report.r2 >= 0.99 && report.slope < 0.0;
    }

    // ground-state convergence: delta(N) = E0/N - U_min ~ C/N
    std::vector<double> inv_n, delta_n;  // fit delta * N = C + D / N
    for (std::size_t i = 0; i < n_list.size(); ++i) {
        inv_n.push_back(1.0 / n_list[i]);
        delta_n.push_back((report.ground_energy_per_spin[i] - report.u_min) * n_list[i]);
    }
    const auto gfit = fit_line(inv_n, delta_n);
    report.ground_c = gfit.intercept;
    report.ground_fit_r2 = gfit.r2;
    return report;
}

LevelSet build_level_set(const PotentialSpec& spec, double s, int n_spins) {
    spec.validate();
    LevelSet levels;
    levels.n_spins = n_spins;
    const Landscape land = landscape(spec, 0.0, s);
    if (!land.barrier_top)
        throw std::domain_error("build_level_set: no barrier separating wells at k = 0");
    levels.q_threshold = land.barrier_top->q;

    const int n_sectors = n_spins / 2 + 1;
    std::vector<std::vector<double>> sec_energy(n_sectors), sec_q(n_sectors);
    parallel_for(n_sectors, [&](std::size_t ik) {
        const int sector = static_cast<int>(ik);
        const auto m = build_sector(n_spins, sector, spec, s);
        const int dim = m.dim();
        if (dim == 1) {
            sec_energy[ik] = {m.diagonal[0]};
            sec_q[ik] = {0.0};
            return;
        }
        Eigen::Map<const Eigen::VectorXd> diag(m.diagonal.data(), dim);
        Eigen::Map<const Eigen::VectorXd> off(m.offdiagonal.data(), dim - 1);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
        solver.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
        if (solver.info() != Eigen::Success)
            throw std::runtime_error("build_level_set: eigensolver failed");
        sec_energy[ik].resize(dim);
        sec_q[ik].resize(dim);
        const double S = m.spin();
        for (int j = 0; j < dim; ++j) {
            sec_energy[ik][j] = solver.eigenvalues()[j];
            double q_mean = 0.0;
            const auto& v = solver.eigenvectors().col(j);
            for (int i = 0; i < dim; ++i) q_mean += v[i] * v[i] * (-S + i);
            sec_q[ik][j] = 2.0 * q_mean / n_spins;
        }
    });
    for (int sector = 0; sector < n_sectors; ++sector) {
        const double ld = log_sector_degeneracy(n_spins, sector);
        for (std::size_t j = 0; j < sec_energy[sector].size(); ++j) {
            levels.energy.push_back(sec_energy[sector][j]);
            levels.q_expectation.push_back(sec_q[sector][j]);
            levels.log_degeneracy.push_back(ld);
        }
    }
    return levels;
}

Occupations occupations_at(const LevelSet& levels, double beta) {
    Occupations occ;
    std::vector<double> lw_left, lw_right;
    const double amb_tol = 1.0 / levels.n_spins;  // one spin flip in <q>
    double shift = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < levels.energy.size(); ++i)
        shift = std::max(shift, levels.log_degeneracy[i] - beta * levels.energy[i]);
    for (std::size_t i = 0; i < levels.energy.size(); ++i) {
        const double lw = levels.log_degeneracy[i] - beta * levels.energy[i] - shift;
        if (std::abs(levels.q_expectation[i] - levels.q_threshold) < amb_tol) ++occ.ambiguous;
        if (levels.q_expectation[i] < levels.q_threshold)
            lw_left.push_back(lw);
        else
            lw_right.push_back(lw);
    }
    const double ll = log_sum_exp(lw_left);
    const double lr = log_sum_exp(lw_right);
    const double norm = log_sum_exp(std::vector<double>{ll, lr});
    occ.p_left = std::exp(ll - norm);
    occ.p_right = std::exp(lr - norm);
    return occ;
}

Occupations thermal_occupations(const PotentialSpec& spec, double s, double beta, int n_spins) {
    return occupations_at(build_level_set(spec, s, n_spins), beta);
}

std::optional<double> occupation_crossing(const LevelSet& levels, double beta_lo,
                                          double beta_hi) {
    const auto balance = [&](double beta) {
        const auto occ = occupations_at(levels, beta);
        return occ.p_left - occ.p_right;
    };
    if (balance(beta_lo) <= 0.0 || balance(beta_hi) >= 0.0) return std::nullopt;
    return bisect_root(balance, beta_lo, beta_hi, 1e-10 * std::max(1.0, beta_hi));
}

}  // namespace pspin
