#include "pspin/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "pspin/exact.hpp"
#include "pspin/numerics.hpp"
#include "pspin/rates.hpp"
#include "pspin/schedule.hpp"
#include "pspin/wkb.hpp"

namespace pspin {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLn2 = 0.6931471805599453;

const char* algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::QA: return "QA";
        case Algorithm::SA: return "SA";
        default: return "exhaustive";
    }
}
}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void RunConfig::validate() const {
    try {
        spec.validate();
    } catch (const std::invalid_argument& err) {
        throw ConfigError(err.what());
    }
    if (!(s >= 0.0 && s <= 1.0)) throw ConfigError("s must lie in [0,1]");
    if (!(beta >= 0.0)) throw ConfigError("beta must be >= 0");
    for (int g : {grids.s, grids.beta, grids.k, grids.q, grids.q_min, grids.q_max})
        if (g < 8) throw ConfigError("grid resolutions must be >= 8");
    if (out_path.empty()) throw ConfigError("output path must be set");
    if (oracle_n.size() < 4) throw ConfigError("oracle N list needs at least 4 entries");
    for (std::size_t i = 1; i < oracle_n.size(); ++i)
        if (oracle_n[i] <= oracle_n[i - 1]) throw ConfigError("oracle N list must be ascending");
    if (occupation_n < 8) throw ConfigError("occupation N must be >= 8");
}

std::vector<std::pair<std::string, std::string>> RunConfig::reproducibility_keys() const {
    std::vector<std::pair<std::string, std::string>> keys;
    keys.emplace_back("tool", "pspin");
    keys.emplace_back("version", kToolVersion);
    keys.emplace_back("subcommand", subcommand);
    keys.emplace_back("spec-kind", spec.kind == PotentialKind::Cubic ? "cubic" : "monomial");
    keys.emplace_back("spec-qmin", format_double(spec.q_min));
    keys.emplace_back("spec-qmax", format_double(spec.q_max));
    keys.emplace_back("spec-c", format_double(spec.c));
    keys.emplace_back("spec-p", std::to_string(spec.p));
    keys.emplace_back("s", format_double(s));
    keys.emplace_back("beta", format_double(beta));
    keys.emplace_back("grid-s", std::to_string(grids.s));
    keys.emplace_back("grid-beta", std::to_string(grids.beta));
    keys.emplace_back("grid-k", std::to_string(grids.k));
    keys.emplace_back("grid-q", std::to_string(grids.q));
    keys.emplace_back("grid-qmin", std::to_string(grids.q_min));
    keys.emplace_back("grid-qmax", std::to_string(grids.q_max));
    keys.emplace_back("format", format == OutFormat::Csv ? "csv" : "json");
    std::ostringstream ns;
    for (std::size_t i = 0; i < oracle_n.size(); ++i) ns << (i ? "," : "") << oracle_n[i];
    keys.emplace_back("oracle-n", ns.str());
    keys.emplace_back("occupation-n", std::to_string(occupation_n));
    return keys;
}

void Table::add_row(std::vector<std::string> cells) {
    if (cells.size() != columns_.size())
        throw std::logic_error("Table: row width does not match columns");
    rows_.push_back(std::move(cells));
}

void Table::write_csv(std::ostream& os) const {
    for (const auto& [key, value] : meta_) os << "# " << key << "=" << value << "\n";
    for (std::size_t i = 0; i < columns_.size(); ++i) os << (i ? "," : "") << columns_[i];
    os << "\n";
    for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
        os << "\n";
    }
}

void Table::write_json(std::ostream& os) const {
    nlohmann::ordered_json doc;
    auto& meta = doc["meta"];
    for (const auto& [key, value] : meta_) meta[key] = value;
    doc["columns"] = columns_;
    auto& rows = doc["rows"];
    rows = nlohmann::ordered_json::array();
    for (const auto& row : rows_) {
        nlohmann::ordered_json jrow = nlohmann::ordered_json::array();
        for (const auto& cell : row) jrow.push_back(cell);
        rows.push_back(std::move(jrow));
    }
    os << doc.dump(1) << "\n";
}

void Table::write_file(const std::string& path, OutFormat format) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open output file: " + path);
    if (format == OutFormat::Csv)
        write_csv(os);
    else
        write_json(os);
    os.flush();
    if (!os) throw IoError("write failed: " + path);
}

std::vector<double> sweep_grid(double start, double end, int count) {
    std::vector<double> grid(count);
    for (int i = 0; i < count; ++i) grid[i] = start + (end - start) * i / (count - 1);
    return grid;
}

int run_potential(const RunConfig& config) {
    config.validate();
    const auto sq = qpt_point(config.spec);
    if (!sq) throw InfeasibleError("spec has no quantum phase transition point");

    auto meta = config.reproducibility_keys();
    meta.emplace_back("s-qpt", format_double(*sq));
    Table table(std::move(meta), {"s", "k", "q", "u"});
    const double svals[3] = {0.0, *sq, 1.0};
    for (double s : svals) {
        for (int ik = 0; ik <= 10; ++ik) {
            const double k = 0.05 * ik;
            const double e = 1.0 - 2.0 * k;
            for (int iq = 0; iq < config.grids.q; ++iq) {
                const double q = -e + 2.0 * e * iq / (config.grids.q - 1);
                const double u = effective_potential(config.spec, k, q, s);
                table.add_row({format_double(s), format_double(k), format_double(q),
                               format_double(u)});
            }
        }
    }
    table.write_file(config.out_path, config.format);
    return 0;
}

int run_action_vs_beta(const RunConfig& config) {
    config.validate();
    const auto sq = qpt_point(config.spec);
    if (!sq || config.s <= *sq)
        throw InfeasibleError("action-vs-beta requires s > s_QPT (two coexisting wells)");
    const auto beta_pt = critical_line(config.spec, config.s);
    if (!beta_pt) throw InfeasibleError("no finite critical temperature at this s");

    const AnnealPoint zero_t{config.s, kInf};
    const double plateau = optimal_quantum_action(config.spec, zero_t).sigma_opt;
    const auto bounds = classical_bounds(config.spec, config.s);

    auto meta = config.reproducibility_keys();
    meta.emplace_back("s-qpt", format_double(*sq));
    meta.emplace_back("beta-pt", format_double(*beta_pt));
    meta.emplace_back("plateau", format_double(plateau));
    meta.emplace_back("k-star", format_double(bounds.k_star));
    Table table(std::move(meta),
                {"beta", "sigma_opt", "mechanism", "k_opt", "energy_opt", "constrained",
                 "sigma_classical", "k_saddle", "plateau", "bound_k0", "bound_ridge",
                 "beta_pt"});

    const double beta_lo = *beta_pt / 8.0;
    const double beta_hi = 10.0 * *beta_pt;
    std::vector<std::vector<std::string>> rows(config.grids.beta);
    parallel_for(config.grids.beta, [&](std::size_t i) {
        const double beta =
            beta_lo + (beta_hi - beta_lo) * static_cast<double>(i) / (config.grids.beta - 1);
        const AnnealPoint point{config.s, beta};
        const RateResult quantum = optimal_quantum_action(config.spec, point);
        const RateResult classical = classical_escape_action(config.spec, point);
        rows[i] = {format_double(beta),
                   format_double(quantum.sigma_opt),
                   quantum.mechanism == EscapeMechanism::QuantumTunneling ? "quantum-tunneling"
                                                                          : "classical-over-barrier",
                   format_double(quantum.k_opt),
                   format_double(quantum.energy_opt),
                   quantum.constrained ? "1" : "0",
                   format_double(classical.sigma_opt),
                   format_double(classical.k_opt),
                   format_double(plateau),
                   format_double(bounds.k0_slope * beta),
                   format_double(bounds.ridge_slope * beta + bounds.ridge_offset),
                   format_double(*beta_pt)};
    });
    for (auto& row : rows) table.add_row(std::move(row));
    table.write_file(config.out_path, config.format);
    return 0;
}

int run_compare(const RunConfig& config) {
    config.validate();
    const auto q_min_grid = sweep_grid(kSweepQminStart, kSweepQminEnd, config.grids.q_min);
    const auto q_max_grid = sweep_grid(kSweepQmaxStart, kSweepQmaxEnd, config.grids.q_max);
    const auto cells = comparison_sweep(q_min_grid, q_max_grid);
    std::size_t feasible = 0;
    for (const auto& cell : cells) feasible += cell.feasible ? 1 : 0;
    if (feasible == 0) throw InfeasibleError("empty feasible region in the sweep grids");

    auto meta = config.reproducibility_keys();
    meta.emplace_back("qmin-grid-start", format_double(kSweepQminStart));
    meta.emplace_back("qmin-grid-end", format_double(kSweepQminEnd));
    meta.emplace_back("qmax-grid-start", format_double(kSweepQmaxStart));
    meta.emplace_back("qmax-grid-end", format_double(kSweepQmaxEnd));
    meta.emplace_back("feasible-cells", std::to_string(feasible));
    Table table(std::move(meta),
                {"q_min", "q_max", "feasible", "xi_qa", "xi_qa_cap", "qa_capped", "qa_s_freeze",
                 "qa_beta", "xi_sa", "xi_sa_cap", "sa_capped", "winner", "qmax_feasible_lo",
                 "qmax_feasible_hi"});
    for (const auto& cell : cells) {
        const double qa_cap = cell.feasible ? classical_entropy(cell.q_min) : 0.0;
        std::vector<std::string> row;
        row.push_back(format_double(cell.q_min));
        row.push_back(format_double(cell.q_max));
        row.push_back(cell.feasible ? "1" : "0");
        if (!cell.feasible) {
            row.insert(row.end(), {"", "", "", "", "", "", "", "", ""});
            row.push_back(format_double(cell.q_min));
            row.push_back(format_double((2.0 + cell.q_min) / 3.0));
            table.add_row(std::move(row));
            continue;
        }
        row.push_back(cell.qa.divergent ? kDivergentSentinel : format_double(cell.qa.xi));
        row.push_back(format_double(qa_cap));
        row.push_back(cell.qa.capped ? "1" : "0");
        row.push_back(format_double(cell.qa.s_freeze));
        row.push_back(std::isfinite(cell.qa.beta) ? format_double(cell.qa.beta) : "inf");
        row.push_back(cell.sa.divergent ? kDivergentSentinel : format_double(cell.sa.xi));
        row.push_back(format_double(kLn2));
        row.push_back(cell.sa.capped ? "1" : "0");
        row.push_back(algorithm_name(cell.winner));
        row.push_back(format_double(cell.q_min));
        row.push_back(format_double((2.0 + cell.q_min) / 3.0));
        table.add_row(std::move(row));
    }
    table.write_file(config.out_path, config.format);
    return 0;
}

int run_oracle(const RunConfig& config) {
    config.validate();
    const auto sq = qpt_point(config.spec);
    if (!sq) throw InfeasibleError("oracle checks need a spec with a transition point");

    const auto report = wkb_scaling_check(config.spec, *sq, config.oracle_n);

    // occupation crossing at a representative s above the transition
    const double s_occ = *sq + 0.5 * (1.0 - *sq);
    const auto beta_pt = critical_line(config.spec, s_occ);
    std::optional<double> crossing;
    if (beta_pt) {
        const auto levels = build_level_set(config.spec, s_occ, config.occupation_n);
        crossing = occupation_crossing(levels, 0.2 * *beta_pt, 5.0 * *beta_pt);
    }

    auto meta = config.reproducibility_keys();
    meta.emplace_back("s-qpt", format_double(*sq));
    meta.emplace_back("s-occupation", format_double(s_occ));
    Table table(std::move(meta), {"record", "n", "k", "field", "value"});
    for (const auto& gap : report.gaps) {
        table.add_row({"gap", std::to_string(gap.n_spins), "", "s_resonance",
                       format_double(gap.s_resonance)});
        table.add_row({"gap", std::to_string(gap.n_spins), "", "gap", format_double(gap.gap)});
    }
    table.add_row({"gap_fit", "", "", "slope", format_double(report.slope)});
    table.add_row({"gap_fit", "", "", "intercept", format_double(report.intercept)});
    table.add_row({"gap_fit", "", "", "r2", format_double(report.r2)});
    table.add_row({"gap_fit", "", "", "sigma_wkb", format_double(report.sigma_wkb)});
    table.add_row(
        {"gap_fit", "", "", "relative_deviation", format_double(report.relative_deviation)});
    table.add_row({"gap_fit", "", "", "exponential", report.exponential ? "1" : "0"});
    for (std::size_t i = 0; i < config.oracle_n.size(); ++i)
        table.add_row({"ground", std::to_string(config.oracle_n[i]), "", "e0_per_spin",
                       format_double(report.ground_energy_per_spin[i])});
    table.add_row({"ground_fit", "", "", "u_min", format_double(report.u_min)});
    table.add_row({"ground_fit", "", "", "c", format_double(report.ground_c)});
    table.add_row({"ground_fit", "", "", "r2", format_double(report.ground_fit_r2)});
    if (beta_pt)
        table.add_row({"occupation", std::to_string(config.occupation_n), "", "beta_pt",
                       format_double(*beta_pt)});
    if (crossing) {
        table.add_row({"occupation", std::to_string(config.occupation_n), "", "beta_crossing",
                       format_double(*crossing)});
        table.add_row({"occupation", std::to_string(config.occupation_n), "", "ratio",
                       format_double(*crossing / *beta_pt)});
    }
    for (int n : {2, 4, 10}) {
        for (int k = 0; k <= n / 2; ++k)
            table.add_row({"overlap", std::to_string(n), std::to_string(k), "amplitude",
                           format_double(initial_final_overlap(n, k))});
    }
    table.write_file(config.out_path, config.format);

    const bool fit_ok = report.exponential && report.relative_deviation < 0.10;
    return fit_ok ? 0 : 4;
}

int run_command(const RunConfig& config) {
    if (config.subcommand == "potential") return run_potential(config);
    if (config.subcommand == "action-vs-beta") return run_action_vs_beta(config);
    if (config.subcommand == "compare") return run_compare(config);
    if (config.subcommand == "oracle") return run_oracle(config);
    throw ConfigError("unknown subcommand: " + config.subcommand);
}

}  // namespace pspin
