#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "nigrid/controller.hpp"
#include "nigrid/errors.hpp"
#include "nigrid/grid.hpp"

namespace nigrid {

/// Plant state in deviation coordinates: theta_dev is the phase angle
/// deviation from steady state, theta_dev_rate its derivative (so the bus
/// frequency is omega0 + theta_dev_rate).
struct GridState {
    Eigen::VectorXd theta_dev;       // rad
    Eigen::VectorXd theta_dev_rate;  // rad/s
    double time = 0.0;               // s

    static GridState zero(int n_buses) {
        return GridState{Eigen::VectorXd::Zero(n_buses), Eigen::VectorXd::Zero(n_buses), 0.0};
    }
};

/// Linearized input u and the storage power deviation realizing it.
struct ActuatorCommand {
    Eigen::VectorXd u;              // pu
    Eigen::VectorXd p_storage_dev;  // pu
};

/// Width of the uniform initial-state perturbation modeling a fault.
struct FaultSpec {
    double dtheta_max = 0.0;  // rad
    double domega_max = 0.0;  // rad/s
};

/// Uniformly sampled simulation record: one row per integration step plus
/// the initial state.
class Trajectory {
public:
    Trajectory(int n_buses, int n_edges, Eigen::Index n_samples)
        : times_(n_samples),
          theta_dev_(n_samples, n_buses),
          theta_dev_rate_(n_samples, n_buses),
          u_(n_samples, n_buses),
          p_storage_dev_(n_samples, n_buses),
          angle_diff_(n_samples, n_edges),
          line_flow_(n_samples, n_edges) {}

    Eigen::Index size() const { return times_.size(); }
    int n_buses() const { return static_cast<int>(theta_dev_.cols()); }
    int n_edges() const { return static_cast<int>(angle_diff_.cols()); }

    double time(Eigen::Index k) const { return times_(k); }
    Eigen::VectorXd& times() { return times_; }
    const Eigen::VectorXd& times() const { return times_; }

    Eigen::MatrixXd& theta_dev() { return theta_dev_; }
    const Eigen::MatrixXd& theta_dev() const { return theta_dev_; }
    Eigen::MatrixXd& theta_dev_rate() { return theta_dev_rate_; }
    const Eigen::MatrixXd& theta_dev_rate() const { return theta_dev_rate_; }
    Eigen::MatrixXd& u() { return u_; }
    const Eigen::MatrixXd& u() const { return u_; }
    Eigen::MatrixXd& p_storage_dev() { return p_storage_dev_; }
    const Eigen::MatrixXd& p_storage_dev() const { return p_storage_dev_; }
    /// Rotor angle differences delta_i - delta_j per edge (the steady-state
    /// value is psi_bar).
    Eigen::MatrixXd& angle_diff() { return angle_diff_; }
    const Eigen::MatrixXd& angle_diff() const { return angle_diff_; }
    Eigen::MatrixXd& line_flow() { return line_flow_; }
    const Eigen::MatrixXd& line_flow() const { return line_flow_; }

private:
    Eigen::VectorXd times_;
    Eigen::MatrixXd theta_dev_, theta_dev_rate_, u_, p_storage_dev_, angle_diff_, line_flow_;
};

/// Interconnected swing dynamics of one transmission network, in phase
/// deviation coordinates, with the storage actuator law.
///
/// Two right-hand sides are exposed: the "physical" one integrates the
/// sine-coupled equations driven by the storage power deviation, the
/// "linearized" one integrates M theta'' + D theta' + K theta = u directly.
/// Driving the physical dynamics with the storage command of
/// linearize_storage_command reproduces the linearized dynamics exactly
/// (an algebraic cancellation, not an approximation); the pair is the
/// linearization test oracle.
class SwingModel {
public:
    enum class Mode { physical, linearized };

    SwingModel(std::vector<BusParams> buses, Topology topo, NominalFrequency w0)
        : buses_(std::move(buses)), topo_(std::move(topo)), w0_(w0) {
        const int n = topo_.n_buses;
        if (static_cast<int>(buses_.size()) != n) {
            throw DimensionError("bus parameter count must match the topology");
        }
        inertia_.resize(n);
        damping_.resize(n);
        stiffness_.resize(n);
        for (int i = 0; i < n; ++i) {
            const auto& bus = buses_[static_cast<size_t>(i)];
            inertia_(i) = bus.m_inertia;
            damping_(i) = bus.d_damping;
            stiffness_(i) = bus.k_stiffness;
        }
    }

    int n_buses() const { return topo_.n_buses; }
    int n_lines() const { return topo_.n_edges(); }
    const std::vector<BusParams>& buses() const { return buses_; }
    const Topology& topology() const { return topo_; }
    const NominalFrequency& nominal_frequency() const { return w0_; }

    /// Net sine coupling relief at each bus:
    ///   c_i = sum_j p_max_ij (sin psi_bar_ij - sin(dev_i - dev_j + psi_bar_ij)).
    Eigen::VectorXd coupling_relief(const Eigen::VectorXd& dev) const {
        Eigen::VectorXd c = Eigen::VectorXd::Zero(n_buses());
        for (const auto& line : topo_.edges) {
            const int i = line.from - 1;
            const int j = line.to - 1;
            const double term =
                line.p_max * (std::sin(line.psi_bar) - std::sin(dev(i) - dev(j) + line.psi_bar));
            c(i) += term;
            c(j) -= term;
        }
        return c;
    }

    /// Acceleration under the linearized dynamics M a = -D r - K d + u.
    Eigen::VectorXd acceleration_linearized(const Eigen::VectorXd& dev,
                                            const Eigen::VectorXd& rate,
                                            const Eigen::VectorXd& u) const {
        check_dim(dev, rate, u);
        return (-damping_.cwiseProduct(rate) - stiffness_.cwiseProduct(dev) + u)
            .cwiseQuotient(inertia_);
    }

    /// Acceleration under the physical dynamics
    ///   M a = -D r + p_storage_dev + coupling_relief(dev).
    Eigen::VectorXd acceleration_physical(const Eigen::VectorXd& dev,
                                          const Eigen::VectorXd& rate,
                                          const Eigen::VectorXd& p_storage_dev) const {
        check_dim(dev, rate, p_storage_dev);
        return (-damping_.cwiseProduct(rate) + p_storage_dev + coupling_relief(dev))
            .cwiseQuotient(inertia_);
    }

    /// Storage power deviation realizing the linearized input u:
    ///   p_st_i = u_i - coupling_relief_i - K_i dev_i.
    Eigen::VectorXd linearize_storage_command(const Eigen::VectorXd& u,
                                              const Eigen::VectorXd& dev) const {
        if (u.size() != n_buses() || dev.size() != n_buses()) {
            throw DimensionError("linearize_storage_command: dimension mismatch");
        }
        return u - coupling_relief(dev) - stiffness_.cwiseProduct(dev);
    }

    /// Rotor angle differences delta_i - delta_j = dev_i - dev_j + psi_bar
    /// per edge.
    Eigen::VectorXd angle_differences(const Eigen::VectorXd& dev) const {
        Eigen::VectorXd diff(n_lines());
        for (int e = 0; e < n_lines(); ++e) {
            const auto& line = topo_.edges[static_cast<size_t>(e)];
            diff(e) = dev(line.from - 1) - dev(line.to - 1) + line.psi_bar;
        }
        return diff;
    }

    /// Branch power flows p_max * sin(delta_i - delta_j) per edge.
    Eigen::VectorXd line_flows(const Eigen::VectorXd& dev) const {
        Eigen::VectorXd flow(n_lines());
        const Eigen::VectorXd diff = angle_differences(dev);
        for (int e = 0; e < n_lines(); ++e) {
            flow(e) = topo_.edges[static_cast<size_t>(e)].p_max * std::sin(diff(e));
        }
        return flow;
    }

private:
    void check_dim(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                   const Eigen::VectorXd& c) const {
        if (a.size() != n_buses() || b.size() != n_buses() || c.size() != n_buses()) {
            throw DimensionError("state/input dimension must match the bus count");
        }
    }

    std::vector<BusParams> buses_;
    Topology topo_;
    NominalFrequency w0_;
    Eigen::VectorXd inertia_, damping_, stiffness_;
};

/// State derivative of the plant alone for a given input vector. In
/// linearized mode the input is u; in physical mode it is the storage power
/// deviation.
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> swing_rhs(const GridState& state,
                                                             const Eigen::VectorXd& input,
                                                             const SwingModel& model,
                                                             SwingModel::Mode mode) {
    const Eigen::VectorXd acc =
        mode == SwingModel::Mode::linearized
            ? model.acceleration_linearized(state.theta_dev, state.theta_dev_rate, input)
            : model.acceleration_physical(state.theta_dev, state.theta_dev_rate, input);
    return {state.theta_dev_rate, acc};
}

/// Adds independent uniform perturbations to angles and rates. Draw order:
/// theta_dev for buses 1..n, then theta_dev_rate for buses 1..n. The
/// mapping from generator output to [lo, hi) is fixed (top 53 bits), so a
/// seed reproduces bit-identical faults on every platform.
inline GridState inject_fault(const GridState& state, const FaultSpec& spec, std::uint64_t seed) {
    if (spec.dtheta_max < 0.0 || spec.domega_max < 0.0) {
        throw ValidationError("fault bounds must be nonnegative");
    }
    std::mt19937_64 rng(seed);
    auto uniform = [&rng](double half_width) {
        const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
        return half_width * (2.0 * unit - 1.0);
    };
    GridState out = state;
    for (Eigen::Index i = 0; i < out.theta_dev.size(); ++i) {
        out.theta_dev(i) += uniform(spec.dtheta_max);
    }
    for (Eigen::Index i = 0; i < out.theta_dev_rate.size(); ++i) {
        out.theta_dev_rate(i) += uniform(spec.domega_max);
    }
    return out;
}

struct IntegrationOptions {
    double t_end = 120.0;  // s
    double dt = 1e-3;      // s
    SwingModel::Mode mode = SwingModel::Mode::physical;
};

/// Classical fixed-step RK4 on the joint plant + controller state
/// [theta_dev, theta_dev_rate, z]. Every step is recorded; throws
/// DivergedError with the failure time if the state leaves the finite
/// range.
inline Trajectory integrate(const SwingModel& model, const ClosedLoopController& controller,
                            const GridState& initial, const IntegrationOptions& opts) {
    if (!(opts.dt > 0.0) || !(opts.t_end >= opts.dt)) {
        throw ValidationError("integration requires dt > 0 and t_end >= dt");
    }
    const int n = model.n_buses();
    const int l = controller.n_edges();
    if (initial.theta_dev.size() != n || initial.theta_dev_rate.size() != n) {
        throw DimensionError("initial state dimension must match the bus count");
    }
    if (controller.graph().n_buses != n) {
        throw DimensionError("controller graph bus count must match the model");
    }

    const auto n_steps = static_cast<Eigen::Index>(std::llround(opts.t_end / opts.dt));
    const Eigen::MatrixXd& qc = controller.graph().incidence;
    const bool physical = opts.mode == SwingModel::Mode::physical;

    // joint vector field; x = [dev(n), rate(n), z(l)]
    Eigen::VectorXd x(2 * n + l);
    x.segment(0, n) = initial.theta_dev;
    x.segment(n, n) = initial.theta_dev_rate;
    x.segment(2 * n, l).setZero();

    auto rhs = [&](const Eigen::VectorXd& s, Eigen::VectorXd& ds) {
        const auto dev = s.segment(0, n);
        const auto rate = s.segment(n, n);
        const auto z = s.segment(2 * n, l);
        const Eigen::VectorXd y_tilde = qc.transpose() * dev;
        const Eigen::VectorXd u = qc * controller.output_command(z);
        if (physical) {
            const Eigen::VectorXd pst = model.linearize_storage_command(u, dev);
            ds.segment(n, n) = model.acceleration_physical(dev, rate, pst);
        } else {
            ds.segment(n, n) = model.acceleration_linearized(dev, rate, u);
        }
        ds.segment(0, n) = rate;
        ds.segment(2 * n, l) = controller.state_rate(z, y_tilde);
    };

    Trajectory traj(n, model.n_lines(), n_steps + 1);
    auto record = [&](Eigen::Index k, double t) {
        const auto dev = x.segment(0, n);
        const Eigen::VectorXd u = qc * controller.output_command(x.segment(2 * n, l));
        traj.times()(k) = t;
        traj.theta_dev().row(k) = dev.transpose();
        traj.theta_dev_rate().row(k) = x.segment(n, n).transpose();
        traj.u().row(k) = u.transpose();
        traj.p_storage_dev().row(k) = model.linearize_storage_command(u, dev).transpose();
        traj.angle_diff().row(k) = model.angle_differences(dev).transpose();
        traj.line_flow().row(k) = model.line_flows(dev).transpose();
    };

    Eigen::VectorXd k1(2 * n + l), k2(2 * n + l), k3(2 * n + l), k4(2 * n + l);
    Eigen::VectorXd x_tmp(2 * n + l);

    record(0, initial.time);
    for (Eigen::Index step = 0; step < n_steps; ++step) {
        rhs(x, k1);
        x_tmp = x + (0.5 * opts.dt) * k1;
        rhs(x_tmp, k2);
        x_tmp = x + (0.5 * opts.dt) * k2;
        rhs(x_tmp, k3);
        x_tmp = x + opts.dt * k3;
        rhs(x_tmp, k4);
        x += (opts.dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

        const double t_next = initial.time + static_cast<double>(step + 1) * opts.dt;
        if (!x.allFinite()) {
            throw DivergedError("simulation diverged at t = " + std::to_string(t_next) + " s",
                                t_next);
        }
        record(step + 1, t_next);
    }
    return traj;
}

}  // namespace nigrid
