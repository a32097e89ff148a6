#pragma once

#include <cstdint>
#include <vector>

#include "pspin/model.hpp"

namespace pspin {

// One permutation-symmetry block of the finite-N Hamiltonian: a real
// symmetric tridiagonal matrix of dimension 2S+1, S = N/2 - K, carrying the
// representation degeneracy C(N,K) - C(N,K-1).
struct SectorMatrix {
    int n_spins = 0;
    int sector = 0;  // K
    std::vector<double> diagonal;
    std::vector<double> offdiagonal;      // size dim-1
    std::uint64_t degeneracy = 0;         // exact; 0 when not representable
    double log_degeneracy = 0.0;          // always valid

    int dim() const { return static_cast<int>(diagonal.size()); }
    double spin() const { return 0.5 * n_spins - sector; }
};

SectorMatrix build_sector(int n_spins, int sector, const PotentialSpec& spec, double s);

// All eigenvalues of the block, ascending.
std::vector<double> sector_spectrum(const SectorMatrix& m);

// Lowest n_low eigenvalues of the K sector (full solve, truncated return).
std::vector<double> sector_lowest(int n_spins, int sector, const PotentialSpec& spec, double s,
                                  int n_low);

// log of C(N,K) - C(N,K-1).
double log_sector_degeneracy(int n_spins, int sector);

// Overlap of the x-polarized initial eigenstate (sector K) with the fully
// z-polarized classical ground state: [2^-N C(N,K)]^(1/2).
double initial_final_overlap(int n_spins, int sector);

struct GapPoint {
    int n_spins = 0;
    double s_resonance = 0.0;  // location of the minimal doublet gap
    double gap = 0.0;
};

// Exact-diagonalization check of the WKB barrier action. For each N the
// tunneling splitting is the minimal K=0 doublet gap over s near the given
// transition point (the finite-N resonance drifts by O(1/N)); ln(gap) vs N is
// fitted against the prediction gap ~ exp(-N sigma_WKB / 2).
struct ScalingReport {
    std::vector<GapPoint> gaps;
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    double sigma_wkb = 0.0;            // barrier_action at (k=0, E_L(0))
    double relative_deviation = 0.0;   // |(-2 slope) - sigma| / sigma
    bool exponential = false;          // r2 >= 0.99 and a barrier exists

    // ground-state energy convergence, E0(N)/N -> min_q U(0,q) as C/N
    std::vector<double> ground_energy_per_spin;
    double u_min = 0.0;
    double ground_c = 0.0;             // fitted C
    double ground_fit_r2 = 0.0;
};

ScalingReport wkb_scaling_check(const PotentialSpec& spec, double s,
                                const std::vector<int>& n_list);

struct Occupations {
    double p_left = 0.0;
    double p_right = 0.0;
    int ambiguous = 0;  // eigenstates within one spin flip of the threshold
};

// Thermal well occupations at finite N: degeneracy-weighted Boltzmann sums
// over all sectors, with eigenstates assigned to wells by <q> against the
// k=0 barrier-top position.
Occupations thermal_occupations(const PotentialSpec& spec, double s, double beta, int n_spins);

// Precomputed spectra for repeated occupation evaluations over beta.
struct LevelSet {
    std::vector<double> energy;          // total energies (extensive)
    std::vector<double> q_expectation;
    std::vector<double> log_degeneracy;  // per level
    double q_threshold = 0.0;
    int n_spins = 0;
};
LevelSet build_level_set(const PotentialSpec& spec, double s, int n_spins);
Occupations occupations_at(const LevelSet& levels, double beta);

// Bisects P_L(beta) = P_R(beta); empty when no crossing in [beta_lo, beta_hi].
std::optional<double> occupation_crossing(const LevelSet& levels, double beta_lo,
                                          double beta_hi);

}  // namespace pspin
