#pragma once

#include <optional>

#include "pspin/model.hpp"
#include "pspin/wkb.hpp"

namespace pspin {

enum class WellSide { Left, Right };
enum class EscapeMechanism { QuantumTunneling, ClassicalOverBarrier };

// Entropy-weighted free-energy minimum of one potential well.
// free_energy = beta * energy - Q_k, per spin.
struct FreeEnergyWell {
    WellSide well = WellSide::Left;
    double k_min = 0.0;
    double energy = 0.0;
    double free_energy = 0.0;
};

// Escape exponent together with its optimizer. For quantum tunneling the
// optimizer is (k_opt, energy_opt); for classical over-barrier escape it is
// the free-energy saddle (k_opt, q_saddle) with energy_opt = U there.
struct RateResult {
    double sigma_opt = 0.0;
    EscapeMechanism mechanism = EscapeMechanism::QuantumTunneling;
    double k_opt = 0.0;
    double energy_opt = 0.0;
    double q_saddle = 0.0;
    bool constrained = false;  // the E >= E_R(k) bound is active
};

// Minimizes beta*E_well(k) - Q_k over k. The right well is defined only up to
// the inflection point k_star. Empty when the requested well does not exist.
std::optional<FreeEnergyWell> well_free_energy(const PotentialSpec& spec,
                                               const AnnealPoint& point, WellSide side);

// Thermally averaged quantum escape exponent: minimum over feasible (k, E) of
// sigma_WKB(k,E) + beta E - Q_k, measured from the metastable free-energy
// minimum. Feasible set: k in [0, k_star], E between max(E_L, E_R) and the
// barrier top. Returns the over-barrier saddle (mechanism classical) when the
// boundary E = U_top wins, i.e. below the quantum-to-classical temperature.
// At beta = infinity this reduces to sigma_WKB(0, E_L(0)).
RateResult optimal_quantum_action(const PotentialSpec& spec, const AnnealPoint& point);

// Glauber over-barrier escape exponent: lowest saddle of beta*U(k,q) - Q_k on
// the barrier ridge minus the metastable free-energy minimum. k is not
// conserved by the classical dynamics, so the full ridge k in [0, k_star]
// competes.
RateResult classical_escape_action(const PotentialSpec& spec, const AnnealPoint& point);

// Inverse critical temperature beta_PT(s): equal free energy (hence equal
// occupation) of the two wells. Empty when s <= s_QPT or no finite crossing.
std::optional<double> critical_line(const PotentialSpec& spec, double s);

// Zero-temperature transition point: the s at which the two minima of U(0,q)
// are degenerate. Empty when the spec never develops two degenerate wells.
std::optional<double> qpt_point(const PotentialSpec& spec);

// Linear-in-beta bounds on the classical action (Fig.-2 style dashed lines):
// escape at k = 0, and across the ridge max near k_star with entropy offset.
struct ClassicalBounds {
    double k0_slope = 0.0;       // U_top(0) - E_L(0)
    double ridge_slope = 0.0;    // U_top(k_star) - E_L(0)
    double ridge_offset = 0.0;   // Q_{1/2} - Q_{k_star}
    double k_star = 0.0;
};
ClassicalBounds classical_bounds(const PotentialSpec& spec, double s);

}  // namespace pspin
