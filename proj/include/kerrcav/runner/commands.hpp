#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include <json.hpp>

#include "kerrcav/audit.hpp"
#include "kerrcav/entanglement.hpp"
#include "kerrcav/husimi.hpp"
#include "kerrcav/joint_state.hpp"
#include "kerrcav/parallel.hpp"
#include "kerrcav/runner/config.hpp"
#include "kerrcav/runner/csv.hpp"

#ifndef KERRCAV_VERSION
#define KERRCAV_VERSION "0.1.0"
#endif

namespace kerrcav::runner {

inline constexpr const char* kSweepHeader = "rabi_angle_over_pi,concurrence,eof,pop11,pop22,pop33,pop44,pop22_plus_33";

struct SweepRow {
    double rabi_angle_over_pi = 0.0;
    double concurrence = 0.0;
    double eof = 0.0;
    std::array<double, 4> populations{};
    TwoQubitDensity rho;
    bool closed_form_fallback = false;
    double trace_error = 0.0;
    double min_eigenvalue = 0.0;
};

inline double sample_angle(const RunConfig& cfg, int i) {
    if (i == cfg.samples - 1) return cfg.stop;
    return cfg.start + (cfg.stop - cfg.start) * i / (cfg.samples - 1);
}

/// One row per sample; each row depends only on its own time, so the
/// result does not depend on the thread count.
inline std::vector<SweepRow> compute_sweep(const RunConfig& cfg, unsigned threads) {
    const int cutoff = resolved_truncation(cfg.params);
    std::vector<SweepRow> rows(static_cast<std::size_t>(cfg.samples));
    parallel_for(rows.size(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            SweepRow& row = rows[i];
            row.rabi_angle_over_pi = sample_angle(cfg, static_cast<int>(i));
            const double t = row.rabi_angle_over_pi * std::numbers::pi / cfg.params.coupling;
            const RabiTable table(cfg.params, t, cutoff);
            row.rho = reduce_to_atoms(build_joint_state(cfg.scenario, table, cfg.params));
            row.concurrence = concurrence(row.rho);
            row.eof = eof_from_concurrence(row.concurrence);
            for (int k = 0; k < 4; ++k) row.populations[static_cast<std::size_t>(k)] = row.rho.matrix(k, k).real();
            row.trace_error = std::fabs(row.rho.matrix.trace().real() - 1.0);
            row.min_eigenvalue = Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd>(row.rho.matrix).eigenvalues()(0);
            row.closed_form_fallback = t_eigenvalues_closed_form(row.rho.canonical()).path == EigenPath::numeric_fallback;
        }
    });
    return rows;
}

inline std::string comment_block(const RunConfig& cfg, const std::string& command) {
    std::string s = "# kerrcav " + std::string(KERRCAV_VERSION) + " " + command + "\n";
    for (const auto& [k, v] : config_echo(cfg)) s += "# " + k + "=" + v + "\n";
    s += "# fock_cutoff=" + std::to_string(resolved_truncation(cfg.params)) + "\n";
    return s;
}

inline std::string sweep_csv(const RunConfig& cfg, const std::vector<SweepRow>& rows) {
    std::string s = comment_block(cfg, "sweep");
    s += kSweepHeader;
    s += '\n';
    for (const auto& r : rows) {
        s += format_real(r.rabi_angle_over_pi) + ',' + format_real(r.concurrence) + ',' + format_real(r.eof);
        for (double p : r.populations) s += ',' + format_real(p);
        s += ',' + format_real(r.populations[1] + r.populations[2]) + '\n';
    }
    return s;
}

/// Upper triangle of rho in the scenario ordering, real and imaginary parts.
inline std::string sweep_density_csv(const RunConfig& cfg, const std::vector<SweepRow>& rows) {
    std::string s = comment_block(cfg, "sweep density");
    s += "rabi_angle_over_pi";
    for (int i = 1; i <= 4; ++i)
        for (int j = i; j <= 4; ++j) {
            const std::string ij = std::to_string(i) + std::to_string(j);
            s += ",re_rho" + ij + ",im_rho" + ij;
        }
    s += '\n';
    for (const auto& r : rows) {
        s += format_real(r.rabi_angle_over_pi);
        for (int i = 1; i <= 4; ++i)
            for (int j = i; j <= 4; ++j) {
                const cplx v = r.rho.element(i, j);
                s += ',' + format_real(v.real()) + ',' + format_real(v.imag());
            }
        s += '\n';
    }
    return s;
}

struct CommandResult {
    std::vector<std::filesystem::path> files;
    nlohmann::ordered_json summary;
};

inline void write_manifest(const std::filesystem::path& out_dir, const std::string& command, const RunConfig& cfg,
                           CommandResult& result, double seconds) {
    nlohmann::ordered_json m;
    m["command"] = command;
    m["version"] = KERRCAV_VERSION;
    nlohmann::ordered_json echo;
    for (const auto& [k, v] : config_echo(cfg)) echo[k] = v;
    m["config"] = echo;
    m["fock_cutoff"] = resolved_truncation(cfg.params);
    m["wall_clock_seconds"] = seconds;
    nlohmann::ordered_json files = nlohmann::ordered_json::array();
    for (const auto& f : result.files) {
        std::error_code ec;
        const auto size = std::filesystem::file_size(f, ec);
        if (ec || size == 0) throw IoError(f.string(), "output missing or empty");
        files.push_back({{"path", f.filename().string()}, {"bytes", size}});
    }
    m["outputs"] = files;
    m["audit"] = result.summary;
    const auto path = out_dir / (command + "_manifest.json");
    write_text_file(path, m.dump(2) + "\n");
    result.files.push_back(path);
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline CommandResult cmd_sweep(const RunConfig& cfg, const std::filesystem::path& out_dir, unsigned threads) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto rows = compute_sweep(cfg, threads);
    ensure_directory(out_dir);

    CommandResult result;
    const auto csv = out_dir / "sweep.csv";
    write_text_file(csv, sweep_csv(cfg, rows));
    result.files.push_back(csv);
    if (cfg.outputs.count("all_density_entries")) {
        const auto dens = out_dir / "sweep_density.csv";
        write_text_file(dens, sweep_density_csv(cfg, rows));
        result.files.push_back(dens);
    }

    double max_c = 0.0, max_trace = 0.0, min_eig = 1.0;
    int fallbacks = 0;
    for (const auto& r : rows) {
        max_c = std::max(max_c, r.concurrence);
        max_trace = std::max(max_trace, r.trace_error);
        min_eig = std::min(min_eig, r.min_eigenvalue);
        fallbacks += r.closed_form_fallback ? 1 : 0;
    }
    result.summary = {{"max_concurrence", max_c},
                      {"max_trace_error", max_trace},
                      {"min_density_eigenvalue", min_eig},
                      {"closed_form_fallbacks", fallbacks},
                      {"samples", cfg.samples}};
    write_manifest(out_dir, "sweep", cfg, result, seconds_since(t0));
    return result;
}

struct QGridRun {
    QGrid grid;
    QMoments moments;
    double block_population = 0.0;  ///< independent value for the sum rule
};

inline QGridRun compute_qgrid(const RunConfig& cfg, unsigned threads) {
    const double t = cfg.time * std::numbers::pi / cfg.params.coupling;
    const JointState state = build_joint_state(cfg.scenario, t, cfg.params);
    QGridRun run;
    run.grid = q_grid(state, cfg.window, cfg.nx, cfg.ny, cfg.full_field ? QBlocks::full_field : QBlocks::diagonal_pair,
                      threads);
    run.moments = q_moment_summary(run.grid);
    const TwoQubitDensity rho = reduce_to_atoms(state);
    run.block_population = cfg.full_field ? rho.matrix.trace().real()
                                          : rho.population(AtomPair::pp) + rho.population(AtomPair::mm);
    return run;
}

inline std::string qgrid_csv(const RunConfig& cfg, const QGridRun& run) {
    std::string s = comment_block(cfg, "qgrid");
    s += "# sum_rule_grid_mass=" + format_real(run.moments.mass) + "\n";
    s += "# sum_rule_block_population=" + format_real(run.block_population) + "\n";
    s += "# sum_rule_abs_diff=" + format_real(std::fabs(run.moments.mass - run.block_population)) + "\n";
    s += "X,Y,Q\n";
    const QGrid& g = run.grid;
    s.reserve(s.size() + static_cast<std::size_t>(g.nx) * g.ny * 64);
    for (int iy = 0; iy < g.ny; ++iy) {
        const std::string y = format_real(g.y(iy));
        for (int ix = 0; ix < g.nx; ++ix) s += format_real(g.x(ix)) + ',' + y + ',' + format_real(g.at(ix, iy)) + '\n';
    }
    return s;
}

inline CommandResult cmd_qgrid(const RunConfig& cfg, const std::filesystem::path& out_dir, unsigned threads) {
    const auto t0 = std::chrono::steady_clock::now();
    const QGridRun run = compute_qgrid(cfg, threads);
    ensure_directory(out_dir);

    CommandResult result;
    const auto csv = out_dir / "qgrid.csv";
    write_text_file(csv, qgrid_csv(cfg, run));
    result.files.push_back(csv);
    result.summary = {{"grid_mass", run.moments.mass},
                      {"block_population", run.block_population},
                      {"sum_rule_abs_diff", std::fabs(run.moments.mass - run.block_population)},
                      {"right_half_mass", run.moments.right_half_mass},
                      {"centroid", {run.moments.centroid_x, run.moments.centroid_y}},
                      {"peak", {run.moments.peak_x, run.moments.peak_y}},
                      {"peak_value", run.moments.peak_value}};
    write_manifest(out_dir, "qgrid", cfg, result, seconds_since(t0));
    return result;
}

inline CommandResult cmd_audit(const RunConfig& cfg, const std::filesystem::path& out_dir) {
    const auto t0 = std::chrono::steady_clock::now();
    const AuditReport report = run_audit(cfg.params, cfg.audit);
    ensure_directory(out_dir);

    CommandResult result;
    const auto txt = out_dir / "audit.txt";
    write_text_file(txt, format_audit(report));
    result.files.push_back(txt);
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& r : report.rows) rows.push_back({{"check", r.check}, {"max_abs", r.max_abs}, {"note", r.note}});
    result.summary = {{"rows", rows},
                      {"quartic_trials", report.quartic_trials},
                      {"quartic_transcribed", report.quartic_transcribed},
                      {"quartic_corrected", report.quartic_corrected},
                      {"quartic_fallback", report.quartic_fallback},
                      {"quartic_max_path_gap", report.quartic_max_path_gap},
                      {"coefficient_max_gap", report.coefficient_max_gap}};
    write_manifest(out_dir, "audit", cfg, result, seconds_since(t0));
    return result;
}

}  // namespace kerrcav::runner
