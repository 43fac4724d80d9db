#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "nigrid/errors.hpp"

namespace nigrid {

/// Nominal grid frequency. Stored in rad/s; construct from Hz for configs.
struct NominalFrequency {
    double omega0 = 2.0 * std::numbers::pi * 50.0;  // rad/s

    static NominalFrequency from_hz(double hz) {
        if (!(hz > 0.0)) throw ValidationError("nominal frequency must be positive");
        return NominalFrequency{2.0 * std::numbers::pi * hz};
    }

    double hz() const { return omega0 / (2.0 * std::numbers::pi); }
};

/// Physical and design constants of one generator bus.
///
/// Inertia M, damping D and the synthetic stiffness K define the per-bus
/// plant 1/(Ms^2 + Ds + K); theta_bar is the steady-state phase angle.
/// Steady-state powers are per-unit and enter only the equilibrium relation.
struct BusParams {
    int id = 0;  // 1-based
    double m_inertia = 0.0;
    double d_damping = 0.0;
    double k_stiffness = 0.0;
    double theta_bar = 0.0;   // rad
    double p_mech_bar = 0.0;  // pu
    double p_load_bar = 0.0;  // pu
    double p_storage_bar = 0.0;  // pu
};

/// One transmission line. psi_bar is the steady-state angle difference
/// theta_bar(from) - theta_bar(to); p_max the maximum power transfer.
struct LineParams {
    int from = 0;
    int to = 0;
    double p_max = 0.0;    // pu
    double psi_bar = 0.0;  // rad
};

/// Bus/line graph with its signed incidence and adjacency matrices.
///
/// Column e of the incidence matrix holds +1 at the edge's first-listed
/// endpoint and -1 at the second; every column sums to zero and, for a
/// connected graph, ones(n) spans the null space of Q^T.
struct Topology {
    int n_buses = 0;
    std::vector<LineParams> edges;
    Eigen::MatrixXd incidence;  // n x l
    Eigen::MatrixXd adjacency;  // n x n, entries 0/1

    int n_edges() const { return static_cast<int>(edges.size()); }
};

/// Builds and validates a Topology from an edge list.
///
/// Rejects self-loops, duplicate unordered pairs, out-of-range endpoints and
/// disconnected graphs (a single isolated bus is the one connected case with
/// no edges).
inline Topology build_topology(int n_buses, std::vector<LineParams> lines) {
    if (n_buses < 1) throw ValidationError("topology needs at least one bus");

    const int l = static_cast<int>(lines.size());
    Topology topo;
    topo.n_buses = n_buses;
    topo.incidence = Eigen::MatrixXd::Zero(n_buses, l);
    topo.adjacency = Eigen::MatrixXd::Zero(n_buses, n_buses);

    for (int e = 0; e < l; ++e) {
        const auto& line = lines[e];
        if (line.from < 1 || line.from > n_buses || line.to < 1 || line.to > n_buses) {
            throw ValidationError("line (" + std::to_string(line.from) + "," +
                                  std::to_string(line.to) + ") references a bus outside 1.." +
                                  std::to_string(n_buses));
        }
        if (line.from == line.to) {
            throw ValidationError("self-loop on bus " + std::to_string(line.from));
        }
        const int i = line.from - 1;
        const int j = line.to - 1;
        if (topo.adjacency(i, j) != 0.0) {
            throw ValidationError("duplicate line between buses " + std::to_string(line.from) +
                                  " and " + std::to_string(line.to));
        }
        topo.incidence(i, e) = 1.0;   // first-listed endpoint is the initial node
        topo.incidence(j, e) = -1.0;
        topo.adjacency(i, j) = 1.0;
        topo.adjacency(j, i) = 1.0;
    }

    // connectivity via BFS over the adjacency matrix
    if (n_buses > 1) {
        std::vector<char> seen(static_cast<size_t>(n_buses), 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        int reached = 1;
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            for (int w = 0; w < n_buses; ++w) {
                if (topo.adjacency(v, w) != 0.0 && !seen[static_cast<size_t>(w)]) {
                    seen[static_cast<size_t>(w)] = 1;
                    ++reached;
                    stack.push_back(w);
                }
            }
        }
        if (reached != n_buses) throw ValidationError("graph is disconnected");
    }

    topo.edges = std::move(lines);
    return topo;
}

/// Largest eigenvalue of Q Q^T (the unweighted graph Laplacian).
inline double laplacian_max_eigenvalue(const Topology& topo) {
    if (topo.n_edges() == 0) return 0.0;
    const Eigen::MatrixXd laplacian = topo.incidence * topo.incidence.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(laplacian, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().maxCoeff();
}

/// Equilibrium defect at one bus:
///   D_i w0 - (Pmech + Pstorage - Pload - sum of steady line flows out of i).
/// Zero iff the bus satisfies the steady-state power balance. Edge (i,j)
/// contributes +p_max*sin(psi_bar) at its initial node and the negative at
/// its terminal node.
inline double steady_state_residual(const BusParams& bus, const Topology& topo,
                                    const NominalFrequency& w0) {
    double flow_sum = 0.0;
    for (const auto& line : topo.edges) {
        if (line.from == bus.id) {
            flow_sum += line.p_max * std::sin(line.psi_bar);
        } else if (line.to == bus.id) {
            flow_sum -= line.p_max * std::sin(line.psi_bar);
        }
    }
    return bus.d_damping * w0.omega0 -
           (bus.p_mech_bar + bus.p_storage_bar - bus.p_load_bar - flow_sum);
}

/// Solves the equilibrium relation for the mechanical power of every bus,
/// holding the other steady-state powers fixed. Used when a scenario omits
/// the power set: afterwards every steady_state_residual is zero.
inline void balance_mech_power(std::vector<BusParams>& buses, const Topology& topo,
                               const NominalFrequency& w0) {
    for (auto& bus : buses) {
        bus.p_mech_bar = 0.0;
        bus.p_mech_bar = steady_state_residual(bus, topo, w0);
    }
}

}  // namespace nigrid
