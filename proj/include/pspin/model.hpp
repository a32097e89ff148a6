#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>

namespace pspin {

enum class PotentialKind { Cubic, Monomial };

// Classical cost function f(q) on the magnetization q in [-1,1].
//
// Cubic family: f(q) = -c (q - q_min)^2 (q - (3 q_max - q_min)/2), the most
// general cubic with a metastable minimum at q_min and barrier top at q_max.
// q_max < (2 + q_min)/3 keeps q = 1 the global minimum; equality makes the
// ground state degenerate (is_degenerate()).
struct PotentialSpec {
    PotentialKind kind = PotentialKind::Cubic;
    double q_min = 0.0;
    double q_max = 0.5;
    double c = 1.0;
    int p = 3;  // monomial exponent

    static PotentialSpec cubic(double q_min, double q_max, double c = 1.0);
    static PotentialSpec monomial(int p);

    void validate() const;  // throws std::invalid_argument
    bool is_degenerate() const;  // cubic with f(q_min) == f(1)
    std::string describe() const;
};

// Algorithm control coordinates. beta = +infinity is a first-class value.
struct AnnealPoint {
    double s = 0.0;
    double beta = std::numeric_limits<double>::infinity();

    bool zero_temperature() const { return std::isinf(beta); }
    void validate() const;
};

double potential(const PotentialSpec& spec, double q);        // f(q)
double potential_slope(const PotentialSpec& spec, double q);  // f'(q)
double potential_curvature(const PotentialSpec& spec, double q);

// Per-spin entropy of the total-spin sector k = K/N, k in [0, 1/2].
double sector_entropy(double k);
double sector_entropy_slope(double k);  // d Q_k / dk = ln((1-k)/k)

// Per-spin entropy of the classical state with magnetization q.
// Equals sector_entropy((1-q)/2).
double classical_entropy(double q);

// Effective classical potential U(k,q) = s f(q) - (1-s)/2 sqrt((1-2k)^2 - q^2),
// defined on the reachable band |q| <= 1-2k.
double effective_potential(const PotentialSpec& spec, double k, double q, double s);
double effective_potential_slope(const PotentialSpec& spec, double k, double q, double s);

// Upper edge of the local kinetic band, s f(q) + (1-s)/2 sqrt((1-2k)^2 - q^2).
double band_top(const PotentialSpec& spec, double k, double q, double s);

// Position-dependent mass of the collective coordinate,
// m(q) = [ (1-s)/2 sqrt((1-2k)^2 - q^2) ]^{-1}.
double effective_mass(const PotentialSpec& spec, double k, double q, double s);

// Second derivatives of U, used by saddle polishing.
double effective_potential_d2q(const PotentialSpec& spec, double k, double q, double s);
double effective_potential_dk(const PotentialSpec& spec, double k, double q, double s);
double effective_potential_d2k(const PotentialSpec& spec, double k, double q, double s);
double effective_potential_dkdq(const PotentialSpec& spec, double k, double q, double s);

struct Extremum {
    double q = 0.0;
    double energy = 0.0;
};

// Stationary structure of U(k,.) on the band at fixed (k,s).
// barrier_top/right_min are absent for single-well profiles (k beyond the
// inflection point, or s below the spinodal).
struct Landscape {
    Extremum left_min;
    std::optional<Extremum> barrier_top;
    std::optional<Extremum> right_min;

    bool two_wells() const { return barrier_top.has_value() && right_min.has_value(); }
};

Landscape landscape(const PotentialSpec& spec, double k, double s);

// Largest k for which the right (ground-state) well exists: the inflection
// point where the right minimum merges with the barrier top. Empty when there
// is no right well even at k = 0.
std::optional<double> k_star(const PotentialSpec& spec, double s);

}  // namespace pspin
