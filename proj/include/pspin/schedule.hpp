#pragma once

#include <span>
#include <vector>

#include "pspin/rates.hpp"

namespace pspin {

enum class Algorithm { QA, SA, Exhaustive };

// Per-spin log computation time xi = (1/N) log tau and the schedule that
// attains it. For QA, s_freeze is the freezing point and beta the operating
// inverse temperature (infinity for the zero-temperature branch). capped
// marks xi clipped by the exhaustive-search bound (ln 2 for SA, the local
// bound Q_cl(q_min) for QA); divergent marks an underlying action that blew
// up on a degenerate ground state.
struct ScheduleResult {
    double xi = 0.0;
    double s_freeze = 0.0;
    double beta = 0.0;
    Algorithm algorithm = Algorithm::QA;
    bool capped = false;
    bool divergent = false;
};

// QA computation-time exponent at a fixed freezing point and temperature:
// xi = S_opt + max(0, F_R - F_L). Both wells must exist at s_freeze.
double qa_exponent(const PotentialSpec& spec, double beta, double s_freeze);

// Optimal QA schedule: minimizes over the freezing point s_F in (s_QPT, 1),
// with beta evaluated at the two candidate edges {beta_PT(s_F), infinity},
// clipped by the local-exhaustive-search bound Q_cl(q_min).
ScheduleResult optimize_qa(const PotentialSpec& spec);

// Optimal SA computation time from the classical (s = 1) escape analysis:
// min( (f(q_max)-f(q_min))/(f(q_min)-f(1)) * Q_cl(q_min) + Q_cl(q_min)
//      - Q_cl(q_max),  ln 2 ).
ScheduleResult sa_exponent(const PotentialSpec& spec);

struct SweepCell {
    double q_min = 0.0;
    double q_max = 0.0;
    bool feasible = false;
    ScheduleResult qa;
    ScheduleResult sa;
    Algorithm winner = Algorithm::SA;
};

// Full (q_min, q_max) comparison surface. Infeasible cells are marked, not
// computed. Cells are distributed across the worker pool; output order is the
// row-major grid order regardless of completion order.
std::vector<SweepCell> comparison_sweep(std::span<const double> q_min_grid,
                                        std::span<const double> q_max_grid);

}  // namespace pspin
