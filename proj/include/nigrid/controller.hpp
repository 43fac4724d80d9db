#pragma once

#include <Eigen/Dense>

#include <utility>
#include <vector>

#include "nigrid/errors.hpp"
#include "nigrid/grid.hpp"
#include "nigrid/ni.hpp"
#include "nigrid/state_space.hpp"
#include "nigrid/transfer_function.hpp"

namespace nigrid {

/// One first-order SNI edge controller G^c_e(s) = gain/(tau*s + 1), acting
/// on the angle difference across edge e. A zero gain disables the edge.
struct EdgeController {
    int edge = 0;  // index into the controller graph's edge list
    double gain = 0.0;
    double tau = 1.0;  // s
};

/// Edge difference extraction y_tilde = Q^T y; component e is y_i - y_j for
/// edge e = (i, j).
inline Eigen::VectorXd edge_outputs(const Eigen::VectorXd& y, const Topology& topo) {
    if (y.size() != topo.n_buses) throw DimensionError("edge_outputs: y must have one entry per bus");
    return topo.incidence.transpose() * y;
}

/// Bus command synthesis u = Q u_tilde: each edge command is injected with
/// +1 at its initial node and -1 at its terminal node, so bus commands are
/// balanced network-wide.
inline Eigen::VectorXd bus_inputs(const Eigen::VectorXd& u_tilde, const Topology& topo) {
    if (u_tilde.size() != topo.n_edges()) {
        throw DimensionError("bus_inputs: u_tilde must have one entry per edge");
    }
    return topo.incidence * u_tilde;
}

/// Same synthesis evaluated bus-by-bus from incident edges only, the way a
/// local controller would compute it. Must agree with bus_inputs exactly.
inline Eigen::VectorXd bus_inputs_distributed(const Eigen::VectorXd& u_tilde,
                                              const Topology& topo) {
    if (u_tilde.size() != topo.n_edges()) {
        throw DimensionError("bus_inputs_distributed: u_tilde must have one entry per edge");
    }
    Eigen::VectorXd u = Eigen::VectorXd::Zero(topo.n_buses);
    for (int bus = 1; bus <= topo.n_buses; ++bus) {
        double acc = 0.0;
        for (int e = 0; e < topo.n_edges(); ++e) {
            const auto& line = topo.edges[static_cast<size_t>(e)];
            if (line.from == bus) {
                acc += u_tilde(e);
            } else if (line.to == bus) {
                acc -= u_tilde(e);
            }
        }
        u(bus - 1) = acc;
    }
    return u;
}

/// The distributed controller layer: one first-order lag per edge of its
/// graph. The graph defaults to the physical topology but may be a
/// supergraph of it (virtual lines), in which case every certificate is
/// evaluated with this graph's incidence matrix.
class ClosedLoopController {
public:
    ClosedLoopController(Topology graph, std::vector<EdgeController> edges)
        : graph_(std::move(graph)), edges_(std::move(edges)) {
        if (static_cast<int>(edges_.size()) != graph_.n_edges()) {
            throw DimensionError("need exactly one controller per edge");
        }
        gains_.resize(graph_.n_edges());
        taus_.resize(graph_.n_edges());
        for (int e = 0; e < graph_.n_edges(); ++e) {
            const auto& ctrl = edges_[static_cast<size_t>(e)];
            if (!(ctrl.tau > 0.0)) throw ValidationError("controller time constant must be positive");
            if (ctrl.gain < 0.0) throw ValidationError("controller gain must be nonnegative");
            gains_(e) = ctrl.gain;
            taus_(e) = ctrl.tau;
        }
    }

    const Topology& graph() const { return graph_; }
    const std::vector<EdgeController>& edges() const { return edges_; }
    int n_edges() const { return graph_.n_edges(); }

    /// diag{gain_e/(tau_e s + 1)}.
    TfMatrix transfer_matrix() const {
        std::vector<RationalTf> blocks;
        blocks.reserve(edges_.size());
        for (const auto& ctrl : edges_) {
            blocks.push_back(RationalTf::first_order_lag(ctrl.gain, ctrl.tau));
        }
        return TfMatrix(std::move(blocks));
    }

    /// Block-diagonal first-order realization of the whole layer.
    StateSpaceModel state_space() const {
        const int l = n_edges();
        Eigen::MatrixXd a = (-taus_.cwiseInverse()).asDiagonal();
        Eigen::MatrixXd b = taus_.cwiseInverse().asDiagonal();
        Eigen::MatrixXd c = gains_.asDiagonal();
        Eigen::MatrixXd d = Eigen::MatrixXd::Zero(l, l);
        return StateSpaceModel(std::move(a), std::move(b), std::move(c), std::move(d));
    }

    /// Edge command u_tilde = gain .* z.
    Eigen::VectorXd output_command(const Eigen::VectorXd& z) const {
        if (z.size() != n_edges()) throw DimensionError("controller state dimension mismatch");
        return gains_.cwiseProduct(z);
    }

    /// Lag dynamics z_e' = (y_tilde_e - z_e)/tau_e; integrated jointly with
    /// the plant inside the simulator.
    Eigen::VectorXd state_rate(const Eigen::VectorXd& z, const Eigen::VectorXd& y_tilde) const {
        if (z.size() != n_edges() || y_tilde.size() != n_edges()) {
            throw DimensionError("controller state dimension mismatch");
        }
        return (y_tilde - z).cwiseQuotient(taus_);
    }

private:
    Topology graph_;
    std::vector<EdgeController> edges_;
    Eigen::VectorXd gains_;
    Eigen::VectorXd taus_;
};

/// Autonomous closed loop of the block-diagonal plant and the edge
/// controller layer under positive feedback u = Q u_tilde, y_tilde = Q^T y:
///
///   A_cl = [[A, B Q C_c], [B_c Q^T C, A_c]]
///
/// The returned model has no inputs; its output is y_tilde.
inline StateSpaceModel assemble_closed_loop(const StateSpaceModel& plant,
                                            const ClosedLoopController& controller,
                                            const Topology& topo) {
    if (topo.n_edges() != controller.n_edges() || topo.n_buses != controller.graph().n_buses) {
        throw DimensionError("controller does not match the given topology");
    }
    const StateSpaceModel ctrl_ss = controller.state_space();
    const Eigen::MatrixXd& q = topo.incidence;
    if (plant.n_outputs() != topo.n_buses || plant.n_inputs() != topo.n_buses) {
        throw DimensionError("plant I/O dimension must equal the bus count");
    }

    const int np = plant.n_states();
    const int nc = ctrl_ss.n_states();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(np + nc, np + nc);
    a.topLeftCorner(np, np) = plant.A;
    a.topRightCorner(np, nc) = plant.B * q * ctrl_ss.C;
    a.bottomLeftCorner(nc, np) = ctrl_ss.B * q.transpose() * plant.C;
    a.bottomRightCorner(nc, nc) = ctrl_ss.A;

    Eigen::MatrixXd b(np + nc, 0);
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(topo.n_edges(), np + nc);
    c.leftCols(np) = q.transpose() * plant.C;
    Eigen::MatrixXd d(topo.n_edges(), 0);
    return StateSpaceModel(std::move(a), std::move(b), std::move(c), std::move(d));
}

}  // namespace nigrid
