#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "pspin/cli.hpp"

namespace {

void add_common_options(CLI::App* cmd, pspin::RunConfig& config) {
    cmd->add_option("--spec-qmin", config.spec.q_min, "metastable minimum q_min")
        ->capture_default_str();
    cmd->add_option("--spec-qmax", config.spec.q_max, "barrier top q_max")
        ->capture_default_str();
    cmd->add_option("--spec-c", config.spec.c, "cubic strength c")->capture_default_str();
    cmd->add_option("--s", config.s, "transverse-field parameter s")->capture_default_str();
    cmd->add_option("--beta", config.beta, "inverse temperature (inf allowed)")
        ->capture_default_str();
    cmd->add_option("--grid-s", config.grids.s, "s grid resolution")->capture_default_str();
    cmd->add_option("--grid-beta", config.grids.beta, "beta grid resolution")
        ->capture_default_str();
    cmd->add_option("--grid-k", config.grids.k, "k grid resolution")->capture_default_str();
    cmd->add_option("--grid-q", config.grids.q, "q grid resolution")->capture_default_str();
    cmd->add_option("--grid-qmin", config.grids.q_min, "sweep q_min resolution")
        ->capture_default_str();
    cmd->add_option("--grid-qmax", config.grids.q_max, "sweep q_max resolution")
        ->capture_default_str();
    cmd->add_option("--out", config.out_path, "output file path")->capture_default_str();
    cmd->add_option_function<std::string>(
           "--format",
           [&config](const std::string& v) {
               if (v == "csv")
                   config.format = pspin::OutFormat::Csv;
               else if (v == "json")
                   config.format = pspin::OutFormat::Json;
               else
                   throw CLI::ValidationError("--format", "must be csv or json");
           },
           "output format: csv or json")
        ->default_str("csv");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mean-field p-spin annealing exponents: WKB analysis and exact-"
                 "diagonalization oracle"};
    app.set_config("--config", "", "flat key=value config file overriding defaults");
    app.require_subcommand(1);

    pspin::RunConfig config;
    auto* potential = app.add_subcommand(
        "potential", "effective classical potential curves U(k,q) for s in {0, s_QPT, 1}");
    add_common_options(potential, config);
    auto* action = app.add_subcommand(
        "action-vs-beta",
        "optimal tunneling action, classical escape branch and bounds vs inverse temperature");
    add_common_options(action, config);
    auto* compare = app.add_subcommand(
        "compare", "QA vs SA computation-time exponents over the (q_min, q_max) plane");
    add_common_options(compare, config);
    auto* oracle = app.add_subcommand(
        "oracle", "finite-N exact-diagonalization checks of the WKB predictions");
    add_common_options(oracle, config);
    oracle->add_option("--oracle-n", config.oracle_n, "system sizes for the scaling fit")
        ->delimiter(',')
        ->capture_default_str();
    oracle->add_option("--occupation-n", config.occupation_n,
                       "system size for the occupation crossing")
        ->capture_default_str();

    // the oracle check wants a shallow barrier; see README
    oracle->parse_complete_callback([&config, oracle] {
        if (oracle->count("--spec-qmin") == 0 && oracle->count("--spec-qmax") == 0) {
            config.spec.q_min = 0.88;
            config.spec.q_max = 0.91;
        }
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int rc = app.exit(err);
        return rc == 0 ? 0 : 2;
    }

    for (auto* cmd : {potential, action, compare, oracle})
        if (cmd->parsed()) config.subcommand = cmd->get_name();

    try {
        return pspin::run_command(config);
    } catch (const pspin::ConfigError& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return 2;
    } catch (const pspin::InfeasibleError& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return 3;
    } catch (const pspin::IoError& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return 1;
    } catch (const std::exception& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return 1;
    }
}
