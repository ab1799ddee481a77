// Command-line front end: run a configured experiment, the built-in
// spectral/lemma identity checks, or the stationary-continuation driver.

#include <cstdio>
#include <fstream>
#include <string>

#include <CLI11.hpp>

#include "muskat/errors.hpp"
#include "muskat/io.hpp"

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw muskat::ConfigError("cannot read config file " + path);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pseudo-spectral Muskat contour simulator and verification harness"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_dir;
    int threads = 0;

    auto* run_cmd = app.add_subcommand("run", "run a configured family evolution");
    run_cmd->add_option("config", config_path, "JSON config file")->required();
    run_cmd->add_option("--output-dir", output_dir, "override output directory");
    run_cmd->add_option("--threads", threads, "override worker thread count");

    auto* vs_cmd = app.add_subcommand("verify-spectral", "spectral operator identity checks");
    auto* vl_cmd = app.add_subcommand("verify-lemmas", "commutation lemma residual checks");

    std::string st_config_path;
    std::string st_output_dir;
    auto* st_cmd = app.add_subcommand("stationary", "stationary-solution continuation");
    st_cmd->add_option("config", st_config_path, "JSON config file")->required();
    st_cmd->add_option("--output-dir", st_output_dir, "override output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            muskat::RunConfig config = muskat::parse_config(slurp(config_path));
            if (!output_dir.empty()) config.output_dir = output_dir;
            if (threads > 0) config.threads = threads;
            const muskat::RunOutcome outcome = muskat::run(config);
            std::printf("stop_reason=%s chosen_delta=%s direction=%d\n",
                        outcome.stop_reason.c_str(),
                        muskat::format_g17(outcome.chosen_delta).c_str(), outcome.direction);
            return outcome.exit_code;
        }
        if (vs_cmd->parsed()) return muskat::verify_spectral();
        if (vl_cmd->parsed()) return muskat::verify_lemmas();
        if (st_cmd->parsed()) {
            muskat::StationaryConfig config =
                muskat::parse_stationary_config(slurp(st_config_path));
            if (!st_output_dir.empty()) config.output_dir = st_output_dir;
            return muskat::run_stationary(config);
        }
    } catch (const muskat::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    }
    return 0;
}
