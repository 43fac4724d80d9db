#pragma once

#include <nlohmann/json.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include "nigrid/controller.hpp"
#include "nigrid/errors.hpp"
#include "nigrid/ni.hpp"
#include "nigrid/scenario.hpp"
#include "nigrid/swing.hpp"

namespace nigrid {

/// How the trajectory settled: time after which all bus frequencies stay
/// within the threshold, plus terminal deviation norms.
struct ConvergenceMetrics {
    double settling_time_s = std::numeric_limits<double>::quiet_NaN();
    double terminal_max_freq_dev_hz = 0.0;
    double terminal_max_ytilde = 0.0;   // max |theta_dev_i - theta_dev_j| over edges
    double terminal_max_pst_dev = 0.0;
    double freq_threshold_hz = 1e-3;
};

/// All verdicts and figures for one scenario, serialized into the CLI
/// report. Deterministic for a given config and seed.
struct RunReport {
    int n_buses = 0;
    int n_lines = 0;
    int n_controller_edges = 0;
    double laplacian_max_eig = 0.0;          // of the controller graph
    double laplacian_max_eig_physical = 0.0; // of the physical lines
    NiVerdict plant_sni;          // classification of diag{G_i}
    Theorem1Verdict theorem1;     // includes Q^T G Q NI check and controller SNI check
    Prop1Verdict prop1;
    HurwitzVerdict closed_loop;
    std::optional<ConvergenceMetrics> convergence;
    std::optional<double> diverged_at;

    /// Exit-status criterion for `verify`: the Theorem 1 certificate and its
    /// side conditions.
    bool verified() const { return theorem1.certified(); }
};

/// Runs the full certificate stack on a scenario (no simulation).
inline RunReport verify_scenario(const ScenarioSystem& sys,
                                 const FrequencyGrid& grid = FrequencyGrid::log_spaced(),
                                 NiOptions opts = {}) {
    RunReport report;
    report.n_buses = sys.grid.n_buses;
    report.n_lines = sys.grid.n_edges();
    report.n_controller_edges = sys.controller.n_edges();
    report.laplacian_max_eig = laplacian_max_eigenvalue(sys.controller.graph());
    report.laplacian_max_eig_physical = laplacian_max_eigenvalue(sys.grid);

    const TfMatrix controller_tf = sys.controller.transfer_matrix();
    report.plant_sni = classify_ni(sys.plant_tf, grid, opts);
    report.theorem1 = theorem1_certificate(sys.plant_congruence, controller_tf, grid, opts);
    report.prop1 = prop1_sufficient(sys.plant_tf, controller_tf, sys.controller.graph());

    try {
        report.closed_loop = closed_loop_hurwitz(overall_plant_ss(sys.buses),
                                                 sys.controller.state_space(),
                                                 sys.controller.graph());
    } catch (const ValidationError&) {
        // degenerate bus parameters (e.g. K = 0) have no strict plant
        // realization here; the certificate side already reports the failure
        report.closed_loop = HurwitzVerdict{};
    }
    return report;
}

/// Settling/terminal metrics of a finished trajectory.
inline ConvergenceMetrics compute_convergence(const Trajectory& traj,
                                              const ClosedLoopController& controller,
                                              double freq_threshold_hz = 1e-3) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    ConvergenceMetrics metrics;
    metrics.freq_threshold_hz = freq_threshold_hz;

    const Eigen::Index last = traj.size() - 1;
    metrics.terminal_max_freq_dev_hz =
        traj.theta_dev_rate().row(last).cwiseAbs().maxCoeff() / two_pi;
    metrics.terminal_max_pst_dev = traj.p_storage_dev().row(last).cwiseAbs().maxCoeff();

    const Eigen::VectorXd y_tilde = edge_outputs(
        traj.theta_dev().row(last).transpose(), controller.graph());
    metrics.terminal_max_ytilde = y_tilde.size() > 0 ? y_tilde.cwiseAbs().maxCoeff() : 0.0;

    // earliest time after which every bus frequency stays inside the band
    Eigen::Index settle = last + 1;
    for (Eigen::Index k = last; k >= 0; --k) {
        const double dev_hz = traj.theta_dev_rate().row(k).cwiseAbs().maxCoeff() / two_pi;
        if (dev_hz >= freq_threshold_hz) break;
        settle = k;
    }
    if (settle <= last) metrics.settling_time_s = traj.time(settle);
    return metrics;
}

namespace detail {

inline nlohmann::ordered_json json_number(double v) {
    if (std::isfinite(v)) return v;
    return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

inline nlohmann::ordered_json ni_to_json(const NiVerdict& v) {
    return {{"pole_check", v.pole_check},
            {"is_ni", v.is_ni},
            {"is_sni", v.is_sni},
            {"worst_frequency_rad_s", json_number(v.worst_frequency)},
            {"worst_defect_eigenvalue", json_number(v.worst_eigenvalue)}};
}

}  // namespace detail

inline nlohmann::ordered_json report_to_json(const RunReport& report) {
    using detail::json_number;
    nlohmann::ordered_json j;
    j["topology"] = {{"n_buses", report.n_buses},
                     {"n_lines", report.n_lines},
                     {"n_controller_edges", report.n_controller_edges},
                     {"laplacian_max_eig", json_number(report.laplacian_max_eig)},
                     {"laplacian_max_eig_physical",
                      json_number(report.laplacian_max_eig_physical)}};
    j["plant"] = detail::ni_to_json(report.plant_sni);
    j["plant_congruence"] = detail::ni_to_json(report.theorem1.plant);
    j["controller"] = detail::ni_to_json(report.theorem1.controller);
    j["theorem1"] = {{"lambda_max", json_number(report.theorem1.lambda_max)},
                     {"dc_condition", report.theorem1.dc_condition},
                     {"side_conditions_ok", report.theorem1.side_conditions_ok},
                     {"certified", report.theorem1.certified()}};
    j["proposition1"] = {{"plant_dc_max", json_number(report.prop1.plant_dc_max)},
                         {"controller_dc_max", json_number(report.prop1.controller_dc_max)},
                         {"dc_product", json_number(report.prop1.plant_dc_max *
                                                    report.prop1.controller_dc_max)},
                         {"bound", json_number(report.prop1.laplacian_bound)},
                         {"holds", report.prop1.holds}};
    nlohmann::ordered_json eigs = nlohmann::ordered_json::array();
    for (Eigen::Index i = 0; i < report.closed_loop.eigenvalues.size(); ++i) {
        eigs.push_back({{"re", json_number(report.closed_loop.eigenvalues(i).real())},
                        {"im", json_number(report.closed_loop.eigenvalues(i).imag())}});
    }
    j["closed_loop"] = {{"max_real_part", json_number(report.closed_loop.max_real_part)},
                        {"hurwitz", report.closed_loop.hurwitz},
                        {"eigenvalues", eigs}};
    if (report.convergence) {
        const auto& m = *report.convergence;
        j["convergence"] = {{"settling_time_s", json_number(m.settling_time_s)},
                            {"freq_threshold_hz", json_number(m.freq_threshold_hz)},
                            {"terminal_max_freq_dev_hz",
                             json_number(m.terminal_max_freq_dev_hz)},
                            {"terminal_max_ytilde", json_number(m.terminal_max_ytilde)},
                            {"terminal_max_pst_dev", json_number(m.terminal_max_pst_dev)}};
    }
    if (report.diverged_at) {
        j["diverged_at_s"] = json_number(*report.diverged_at);
    }
    j["verified"] = report.verified();
    return j;
}

}  // namespace nigrid
