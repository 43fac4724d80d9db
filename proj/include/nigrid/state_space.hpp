#pragma once

#include <Eigen/Dense>

#include <utility>
#include <vector>

#include "nigrid/errors.hpp"
#include "nigrid/grid.hpp"
#include "nigrid/transfer_function.hpp"

namespace nigrid {

/// Continuous-time state-space realization (A, B, C, D).
struct StateSpaceModel {
    Eigen::MatrixXd A, B, C, D;

    StateSpaceModel(Eigen::MatrixXd a, Eigen::MatrixXd b, Eigen::MatrixXd c, Eigen::MatrixXd d)
        : A(std::move(a)), B(std::move(b)), C(std::move(c)), D(std::move(d)) {
        if (A.rows() != A.cols()) throw DimensionError("A must be square");
        if (B.rows() != A.rows()) throw DimensionError("B row count must match A");
        if (C.cols() != A.cols()) throw DimensionError("C column count must match A");
        if (D.rows() != C.rows() || D.cols() != B.cols()) {
            throw DimensionError("D must be (outputs x inputs)");
        }
    }

    int n_states() const { return static_cast<int>(A.rows()); }
    int n_inputs() const { return static_cast<int>(B.cols()); }
    int n_outputs() const { return static_cast<int>(C.rows()); }

    /// Frequency response C (sI - A)^{-1} B + D.
    Eigen::MatrixXcd transfer_at(Complex s) const {
        const int n = n_states();
        Eigen::MatrixXcd resolvent = Complex(s) * Eigen::MatrixXcd::Identity(n, n) - A.cast<Complex>();
        return C.cast<Complex>() * resolvent.partialPivLu().solve(B.cast<Complex>()) +
               D.cast<Complex>();
    }
};

/// Direct sum of state-space blocks, preserving order.
inline StateSpaceModel block_diag(const std::vector<StateSpaceModel>& blocks) {
    if (blocks.empty()) throw ValidationError("block_diag needs at least one block");
    int ns = 0, ni = 0, no = 0;
    for (const auto& blk : blocks) {
        ns += blk.n_states();
        ni += blk.n_inputs();
        no += blk.n_outputs();
    }
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(ns, ns);
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(ns, ni);
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(no, ns);
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(no, ni);
    int rs = 0, ri = 0, ro = 0;
    for (const auto& blk : blocks) {
        a.block(rs, rs, blk.n_states(), blk.n_states()) = blk.A;
        b.block(rs, ri, blk.n_states(), blk.n_inputs()) = blk.B;
        c.block(ro, rs, blk.n_outputs(), blk.n_states()) = blk.C;
        d.block(ro, ri, blk.n_outputs(), blk.n_inputs()) = blk.D;
        rs += blk.n_states();
        ri += blk.n_inputs();
        ro += blk.n_outputs();
    }
    return StateSpaceModel(std::move(a), std::move(b), std::move(c), std::move(d));
}

inline TfMatrix block_diag(std::vector<RationalTf> blocks) {
    return TfMatrix(std::move(blocks));
}

/// Controllable canonical realization of k/(tau*s + 1):
///   A = [-1/tau], B = [1/tau], C = [k], D = [0].
inline StateSpaceModel realize_first_order(const RationalTf& tf) {
    if (tf.den_degree() != 1 || tf.num_degree() != 0) {
        throw ValidationError("realize_first_order expects k/(tau*s + 1)");
    }
    const double a0 = tf.den()[0];  // = 1/tau after canonicalization
    if (!(a0 > 0.0)) throw ValidationError("realize_first_order expects tau > 0");
    const double k = tf.num()[0] / a0;
    Eigen::MatrixXd a(1, 1), b(1, 1), c(1, 1), d(1, 1);
    a << -a0;
    b << a0;
    c << k;
    d << 0.0;
    return StateSpaceModel(std::move(a), std::move(b), std::move(c), std::move(d));
}

/// Per-bus plant transfer function 1/(M s^2 + D s + K).
inline RationalTf bus_plant_tf(const BusParams& bus) {
    if (!(bus.m_inertia > 0.0) || !(bus.d_damping > 0.0) || !(bus.k_stiffness > 0.0)) {
        throw ValidationError("bus plant requires positive inertia, damping and stiffness");
    }
    return RationalTf({1.0}, {bus.k_stiffness, bus.d_damping, bus.m_inertia});
}

/// Per-bus plant realization with state [rate, deviation] and output the
/// angle deviation:
///   A = [[-D/M, -K/M], [1, 0]], B = [1/M, 0]^T, C = [0, 1], D = 0.
inline StateSpaceModel bus_plant_ss(const BusParams& bus) {
    if (!(bus.m_inertia > 0.0) || !(bus.d_damping > 0.0) || !(bus.k_stiffness > 0.0)) {
        throw ValidationError("bus plant requires positive inertia, damping and stiffness");
    }
    Eigen::MatrixXd a(2, 2), b(2, 1), c(1, 2), d(1, 1);
    a << -bus.d_damping / bus.m_inertia, -bus.k_stiffness / bus.m_inertia,
         1.0, 0.0;
    b << 1.0 / bus.m_inertia, 0.0;
    c << 0.0, 1.0;
    d << 0.0;
    return StateSpaceModel(std::move(a), std::move(b), std::move(c), std::move(d));
}

inline TfMatrix overall_plant_tf(const std::vector<BusParams>& buses) {
    std::vector<RationalTf> blocks;
    blocks.reserve(buses.size());
    for (const auto& bus : buses) blocks.push_back(bus_plant_tf(bus));
    return TfMatrix(std::move(blocks));
}

inline StateSpaceModel overall_plant_ss(const std::vector<BusParams>& buses) {
    std::vector<StateSpaceModel> blocks;
    blocks.reserve(buses.size());
    for (const auto& bus : buses) blocks.push_back(bus_plant_ss(bus));
    return block_diag(blocks);
}

}  // namespace nigrid
