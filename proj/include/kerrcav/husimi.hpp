#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "kerrcav/joint_state.hpp"
#include "kerrcav/parallel.hpp"

namespace kerrcav {

/// Which atomic blocks contribute to the field Q function. `diagonal_pair`
/// keeps only |++> and |-->; `full_field` sums all four blocks and gives the
/// Q function of the complete reduced field state.
enum class QBlocks { diagonal_pair, full_field };

/// Precomputed projectors for repeated Q evaluations on one state.
class QEvaluator {
public:
    QEvaluator(const JointState& state, QBlocks blocks = QBlocks::diagonal_pair) {
        const std::array<AtomPair, 2> pair{AtomPair::pp, AtomPair::mm};
        const std::array<AtomPair, 4> all{AtomPair::pp, AtomPair::pm, AtomPair::mp, AtomPair::mm};
        if (blocks == QBlocks::full_field)
            for (AtomPair p : all) projectors_.emplace_back(state.block(p));
        else
            for (AtomPair p : pair) projectors_.emplace_back(state.block(p));
    }

    double operator()(cplx alpha) const {
        double s = 0.0;
        for (const auto& p : projectors_) s += std::norm(p.overlap(alpha));
        return s / std::numbers::pi;
    }

private:
    std::vector<BlockProjector> projectors_;
};

inline double q_value(const JointState& state, cplx alpha, QBlocks blocks = QBlocks::diagonal_pair) {
    return QEvaluator(state, blocks)(alpha);
}

inline double q_value(Scenario scenario, double t, cplx alpha, const ModelParams& params,
                      QBlocks blocks = QBlocks::diagonal_pair) {
    return q_value(build_joint_state(scenario, t, params), alpha, blocks);
}

struct PhaseWindow {
    double x_min = -8.0;
    double x_max = 8.0;
    double y_min = -8.0;
    double y_max = 8.0;
};

/// Q on a uniform node grid; values[iy * nx + ix] holds Q(x(ix) + i y(iy)).
struct QGrid {
    PhaseWindow window;
    int nx = 0;
    int ny = 0;
    std::vector<double> values;
    Scenario scenario = Scenario::EE;
    double t = 0.0;

    double dx() const { return (window.x_max - window.x_min) / (nx - 1); }
    double dy() const { return (window.y_max - window.y_min) / (ny - 1); }
    double x(int ix) const { return window.x_min + ix * dx(); }
    double y(int iy) const { return window.y_min + iy * dy(); }
    double at(int ix, int iy) const { return values[static_cast<std::size_t>(iy) * nx + ix]; }
};

inline void validate_grid(const PhaseWindow& w, int nx, int ny) {
    if (!(w.x_max > w.x_min) || !(w.y_max > w.y_min)) throw std::invalid_argument("phase-space window is empty");
    if (nx < 2 || ny < 2) throw std::invalid_argument("grid resolution must be at least 2 x 2");
}

inline QGrid q_grid(const JointState& state, const PhaseWindow& window, int nx, int ny,
                    QBlocks blocks = QBlocks::diagonal_pair, unsigned threads = 1) {
    validate_grid(window, nx, ny);
    QGrid grid;
    grid.window = window;
    grid.nx = nx;
    grid.ny = ny;
    grid.scenario = state.scenario();
    grid.t = state.time();
    grid.values.assign(static_cast<std::size_t>(nx) * ny, 0.0);

    const QEvaluator q(state, blocks);
    parallel_for(static_cast<std::size_t>(ny), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t iy = begin; iy < end; ++iy) {
            const double y = grid.y(static_cast<int>(iy));
            for (int ix = 0; ix < nx; ++ix) grid.values[iy * nx + ix] = std::max(0.0, q(cplx(grid.x(ix), y)));
        }
    });
    return grid;
}

inline QGrid q_grid(Scenario scenario, double t, const PhaseWindow& window, int nx, int ny, const ModelParams& params,
                    QBlocks blocks = QBlocks::diagonal_pair, unsigned threads = 1) {
    return q_grid(build_joint_state(scenario, t, params), window, nx, ny, blocks, threads);
}

struct QMoments {
    double mass = 0.0;
    double centroid_x = 0.0;
    double centroid_y = 0.0;
    double peak_x = 0.0;
    double peak_y = 0.0;
    double peak_value = 0.0;
    double right_half_mass = 0.0;  ///< mass over nodes with X > 0
};

/// Riemann sums over the nodes (cell area dx dy), and the first node in
/// row-major order holding the maximum.
inline QMoments q_moment_summary(const QGrid& grid) {
    QMoments m;
    const double cell = grid.dx() * grid.dy();
    double sx = 0.0, sy = 0.0;
    bool have_peak = false;
    for (int iy = 0; iy < grid.ny; ++iy) {
        for (int ix = 0; ix < grid.nx; ++ix) {
            const double q = grid.at(ix, iy);
            m.mass += q * cell;
            sx += q * grid.x(ix) * cell;
            sy += q * grid.y(iy) * cell;
            if (grid.x(ix) > 0.0) m.right_half_mass += q * cell;
            if (!have_peak || q > m.peak_value) {
                have_peak = true;
                m.peak_value = q;
                m.peak_x = grid.x(ix);
                m.peak_y = grid.y(iy);
            }
        }
    }
    if (m.mass > 0.0) {
        m.centroid_x = sx / m.mass;
        m.centroid_y = sy / m.mass;
    }
    return m;
}

}  // namespace kerrcav
