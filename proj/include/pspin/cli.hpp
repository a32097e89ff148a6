#pragma once

#include <iosfwd>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pspin/model.hpp"

namespace pspin {

inline constexpr const char* kToolVersion = "0.1.0";

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class OutFormat { Csv, Json };

// Grid resolutions; every resolution must be >= 8.
struct GridSpec {
    int s = 64;
    int beta = 64;
    int k = 512;
    int q = 201;
    int q_min = 64;
    int q_max = 64;
};

// Fixed sweep ranges: the default 64-point grids step exactly 0.016 / 0.010
// so the showcase cell (0.88, 0.955) lies on grid nodes.
inline constexpr double kSweepQminStart = 0.0;
inline constexpr double kSweepQminEnd = 1.008;
inline constexpr double kSweepQmaxStart = 0.325;
inline constexpr double kSweepQmaxEnd = 0.955;

struct RunConfig {
    std::string subcommand;
    PotentialSpec spec = PotentialSpec{};  // cubic(0, 0.533) by default
    double s = 0.85;
    double beta = std::numeric_limits<double>::infinity();
    GridSpec grids;
    std::string out_path = "out.csv";
    OutFormat format = OutFormat::Csv;
    std::vector<int> oracle_n = {100, 150, 200, 250, 300, 350, 400};
    int occupation_n = 160;

    void validate() const;  // throws ConfigError
    std::vector<std::pair<std::string, std::string>> reproducibility_keys() const;
};

// Deterministic float formatting used in every emitted file.
std::string format_double(double v);

// Self-describing table: '#' key=value header lines, a column-name row, then
// data rows. Divergent values are serialized as the "inf-capped" sentinel
// with the numeric cap carried in a companion column, never as NaN.
class Table {
  public:
    Table(std::vector<std::pair<std::string, std::string>> meta,
          std::vector<std::string> columns)
        : meta_(std::move(meta)), columns_(std::move(columns)) {}

    void add_row(std::vector<std::string> cells);
    void write_csv(std::ostream& os) const;
    void write_json(std::ostream& os) const;
    void write_file(const std::string& path, OutFormat format) const;

    std::size_t row_count() const { return rows_.size(); }

  private:
    std::vector<std::pair<std::string, std::string>> meta_;
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

inline constexpr const char* kDivergentSentinel = "inf-capped";

std::vector<double> sweep_grid(double start, double end, int count);

// Subcommand drivers; return process exit codes (0 ok, 2 invalid config,
// 3 infeasible parameters, 4 oracle-check failure).
int run_potential(const RunConfig& config);
int run_action_vs_beta(const RunConfig& config);
int run_compare(const RunConfig& config);
int run_oracle(const RunConfig& config);
int run_command(const RunConfig& config);

}  // namespace pspin
