#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "pspin/model.hpp"

namespace pspin {

// Continuous sector/energy pair at a given anneal point, with the turning
// points |u(q)| = 1 cached. Energies are per spin throughout.
struct WkbState {
    double k = 0.0;
    double energy = 0.0;
    AnnealPoint point;
    std::vector<double> turning_points;
};

WkbState make_wkb_state(const PotentialSpec& spec, double k, double energy,
                        const AnnealPoint& point);

// Secular-equation ratio u(q) = 2 (s f(q) - E) / ((1-s) sqrt((1-2k)^2 - q^2)).
// |u| <= 1 marks the classically allowed region.
double wkb_ratio(const PotentialSpec& spec, double k, double energy, double s, double q);

// Quasiclassical momentum: arccos(u) when |u| <= 1, i*arccosh(|u|) shifted by
// the band-top phase when u < -1. The imaginary part is reported >= 0.
std::complex<double> momentum(const PotentialSpec& spec, const WkbState& state, double q);

// All roots of |u(q)| = 1 on the open band, sorted ascending: boundaries of
// classically allowed intervals against both the potential and the band top.
std::vector<double> turning_points(const PotentialSpec& spec, double k, double energy,
                                   const AnnealPoint& point);

struct BarrierAction {
    double sigma = 0.0;       // per-spin reduced action; rate ~ exp(-N sigma)
    bool over_barrier = false;  // energy at/above the barrier top, sigma = 0
    double q_left = 0.0;      // forbidden segment, valid when !over_barrier
    double q_right = 0.0;
};

// Reduced barrier action sigma(k,E) = integral of arccosh(u) across the
// forbidden segment between the two wells. Requires a two-well landscape and
// E >= both well bottoms; s = 1 yields +infinity (vanishing kinetic term).
BarrierAction barrier_action(const PotentialSpec& spec, double k, double energy,
                             const AnnealPoint& point, int quad_nodes = 48);
// Overload reusing a precomputed landscape for the same (spec, k, s).
BarrierAction barrier_action(const PotentialSpec& spec, double k, double energy,
                             const AnnealPoint& point, const Landscape& land,
                             int quad_nodes = 48);

// Period of motion in the inverted potential, T(E) = -d sigma / dE at fixed k.
// Diverges at the well bottom; empty at/above the barrier top.
std::optional<double> period(const PotentialSpec& spec, double k, double energy,
                             const AnnealPoint& point, int quad_nodes = 48);
std::optional<double> period(const PotentialSpec& spec, double k, double energy,
                             const AnnealPoint& point, const Landscape& land,
                             int quad_nodes = 48);

}  // namespace pspin
