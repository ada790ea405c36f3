#include <CLI11.hpp>

#include <exception>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kerrcav/kerrcav.hpp"
#include "kerrcav/runner/commands.hpp"

namespace {

enum Exit : int { ok = 0, config_error = 2, runtime_error = 3, io_error = 4 };

}  // namespace

int main(int argc, char** argv) {
    using namespace kerrcav;

    CLI::App app{"Two atoms crossing a Kerr cavity: concurrence sweeps, Husimi Q grids and formula audits"};
    app.set_version_flag("--version", std::string(KERRCAV_VERSION));
    app.require_subcommand(1);

    std::optional<std::string> config_path;
    std::string out_dir = ".";
    unsigned threads = 0;
    app.add_option("--config", config_path, "flat key = value config file")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--threads", threads, "worker threads, 0 = auto");

    // Every config key is mirrored as --key; values are parsed by the same
    // code as the file so messages and ranges match.
    std::map<std::string, std::string> flag_values;
    for (const auto& key : runner::config_keys())
        app.add_option("--" + key, flag_values[key], "config key " + key);

    auto* sweep = app.add_subcommand("sweep", "time sweep of concurrence and populations -> sweep.csv");
    auto* qgrid = app.add_subcommand("qgrid", "Husimi Q on a phase-space grid -> qgrid.csv");
    auto* audit = app.add_subcommand("audit", "published formulas vs partial-trace results -> audit.txt");
    for (auto* sub : {sweep, qgrid, audit}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? Exit::ok : Exit::config_error;
    }

    try {
        std::vector<std::pair<std::string, std::string>> flags;
        for (const auto& key : runner::config_keys())
            if (app.count("--" + key) > 0) flags.emplace_back(key, flag_values[key]);
        const runner::RunConfig cfg = runner::build_config(config_path, flags);

        runner::CommandResult result;
        if (sweep->parsed()) result = runner::cmd_sweep(cfg, out_dir, threads);
        else if (qgrid->parsed()) result = runner::cmd_qgrid(cfg, out_dir, threads);
        else result = runner::cmd_audit(cfg, out_dir);
        for (const auto& f : result.files) std::cout << f.string() << '\n';
        return Exit::ok;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return Exit::config_error;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return Exit::io_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return Exit::runtime_error;
    }
}
