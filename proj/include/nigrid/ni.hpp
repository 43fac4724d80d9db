#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "nigrid/errors.hpp"
#include "nigrid/grid.hpp"
#include "nigrid/state_space.hpp"
#include "nigrid/transfer_function.hpp"

namespace nigrid {

/// Strictly positive frequencies used as the numerical surrogate for the
/// "for all alpha" quantifier; alpha = 0 is handled separately by the NI
/// check. Default: 2000 log-spaced points over [1e-3, 1e3] rad/s, three
/// decades past the time constants of every in-scope system.
struct FrequencyGrid {
    std::vector<double> points;

    static FrequencyGrid log_spaced(double lo = 1e-3, double hi = 1e3, int count = 2000) {
        if (!(lo > 0.0) || !(hi > lo) || count < 2) {
            throw ValidationError("frequency grid requires 0 < lo < hi and count >= 2");
        }
        FrequencyGrid grid;
        grid.points.resize(static_cast<size_t>(count));
        const double log_lo = std::log10(lo);
        const double log_hi = std::log10(hi);
        for (int i = 0; i < count; ++i) {
            grid.points[static_cast<size_t>(i)] =
                std::pow(10.0, log_lo + (log_hi - log_lo) * i / (count - 1));
        }
        return grid;
    }

    void validate() const {
        if (points.empty()) throw ValidationError("frequency grid is empty");
        double prev = 0.0;
        for (double a : points) {
            if (!(a > prev)) throw ValidationError("frequency grid must be positive and strictly increasing");
            prev = a;
        }
    }
};

/// Tolerances for the numerical NI/SNI checks.
///
/// sni_tol defaults to exact float positivity: the imaginary-part defect of
/// any strictly proper system decays like 1/alpha^3, so at the top of the
/// grid it sits far below any fixed margin while remaining strictly
/// positive in a cancellation-free evaluation.
struct NiOptions {
    double psd_tol = 1e-9;   // slack on min eigenvalue for the NI inequality
    double sni_tol = 0.0;    // strictness margin for the SNI inequality
    double pole_tol = 1e-9;  // required distance of poles from the imaginary axis
};

/// Outcome of an NI/SNI classification over a grid.
struct NiVerdict {
    bool pole_check = false;
    bool is_ni = false;
    bool is_sni = false;
    double worst_frequency = 0.0;   // argmin over alpha > 0 of the defect's min eigenvalue
    double worst_eigenvalue = 0.0;  // that minimum
};

/// The NI defect j[M(j*alpha) - M(j*alpha)^*], symmetrized so it is exactly
/// Hermitian. Positive semidefiniteness of this matrix for all alpha >= 0 is
/// the frequency-domain NI condition.
template <FrequencyResponse M>
Eigen::MatrixXcd ni_defect(const M& m, double alpha) {
    if (alpha < 0.0) throw ValidationError("ni_defect requires alpha >= 0");
    const Eigen::MatrixXcd g = m.eval(Complex(0.0, alpha));
    Eigen::MatrixXcd defect = Complex(0.0, 1.0) * (g - g.adjoint().eval());
    defect = (0.5 * (defect + defect.adjoint().eval())).eval();
    return defect;
}

namespace detail {

inline double min_eigenvalue_hermitian(const Eigen::MatrixXcd& h) {
    if (h.rows() == 1) return h(0, 0).real();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

inline double max_eigenvalue_hermitian(const Eigen::MatrixXcd& h) {
    if (h.rows() == 1) return h(0, 0).real();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().maxCoeff();
}

/// Max real part of the spectrum of a general (possibly non-Hermitian)
/// matrix. The certificate products have real spectra; taking the real part
/// keeps the verdict well-defined regardless.
inline double max_real_eigenvalue(const Eigen::MatrixXcd& m) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m, false);
    return solver.eigenvalues().real().maxCoeff();
}

}  // namespace detail

/// Classifies a transfer matrix against the NI and SNI definitions: all
/// poles strictly in the open left half-plane, and the NI defect PSD at
/// alpha = 0 and on every grid point (strictly positive definite on every
/// positive point for SNI).
template <FrequencyResponse M>
NiVerdict classify_ni(const M& m, const FrequencyGrid& grid, NiOptions opts = {}) {
    grid.validate();

    NiVerdict verdict;
    verdict.pole_check = true;
    for (const auto& p : m.poles()) {
        if (!(p.real() < -opts.pole_tol)) {
            verdict.pole_check = false;
            break;
        }
    }

    bool psd_everywhere = detail::min_eigenvalue_hermitian(ni_defect(m, 0.0)) >= -opts.psd_tol;
    bool strict_everywhere = true;
    double worst = std::numeric_limits<double>::infinity();
    double worst_alpha = grid.points.front();
    for (double alpha : grid.points) {
        const double min_eig = detail::min_eigenvalue_hermitian(ni_defect(m, alpha));
        if (min_eig < worst) {
            worst = min_eig;
            worst_alpha = alpha;
        }
        if (min_eig < -opts.psd_tol) psd_everywhere = false;
        if (!(min_eig > opts.sni_tol)) strict_everywhere = false;
    }
    verdict.worst_frequency = worst_alpha;
    verdict.worst_eigenvalue = worst;
    verdict.is_ni = verdict.pole_check && psd_everywhere;
    // SNI implies NI; keep that structural on the same grid
    verdict.is_sni = verdict.is_ni && strict_everywhere;
    return verdict;
}

/// Lemma check M(0) - M(inf) >= 0 (holds for every NI system). Returns the
/// difference matrix and whether its minimum eigenvalue clears -tol.
template <FrequencyResponse M>
std::pair<bool, Eigen::MatrixXd> dc_gain_lemma_check(const M& m, double tol = 1e-9) {
    const Eigen::MatrixXd diff = m.dc_gain() - m.infinity_gain();
    const double min_eig =
        detail::min_eigenvalue_hermitian(diff.cast<Complex>());
    return {min_eig >= -tol, diff};
}

/// Both sides of the eigenvalue product bound
/// lambda_max(M N) <= lambda_max(M) lambda_max(N) for Hermitian M with
/// lambda_max(M) >= 0 and Hermitian N >= 0.
struct EigenProductBound {
    double lhs = 0.0;  // lambda_max(M N)
    double rhs = 0.0;  // lambda_max(M) * lambda_max(N)
    bool holds = false;
};

inline EigenProductBound eigen_product_bound(const Eigen::MatrixXcd& m,
                                             const Eigen::MatrixXcd& n,
                                             double tol = 1e-9) {
    const double scale_m = std::max(1.0, m.norm());
    const double scale_n = std::max(1.0, n.norm());
    if ((m - m.adjoint().eval()).norm() > 1e-12 * scale_m) {
        throw ValidationError("eigen_product_bound: M must be Hermitian");
    }
    if ((n - n.adjoint().eval()).norm() > 1e-12 * scale_n) {
        throw ValidationError("eigen_product_bound: N must be Hermitian");
    }
    const double max_m = detail::max_eigenvalue_hermitian(m);
    if (max_m < -tol) throw ValidationError("eigen_product_bound: lambda_max(M) must be >= 0");
    const double min_n = detail::min_eigenvalue_hermitian(n);
    if (min_n < -tol) throw ValidationError("eigen_product_bound: N must be PSD");

    EigenProductBound out;
    out.lhs = detail::max_real_eigenvalue(m * n);
    out.rhs = max_m * detail::max_eigenvalue_hermitian(n);
    out.holds = out.lhs <= out.rhs + tol;
    return out;
}

/// Internal-stability certificate for the positive-feedback interconnection
/// of the NI plant Q^T G(s) Q and the SNI controller G^c(s): the loop is
/// internally stable iff lambda_max(Q^T G(0) Q G^c(0)) < 1, provided
/// Q^T G(inf) Q G^c(inf) = 0 and G^c(inf) >= 0.
struct Theorem1Verdict {
    double lambda_max = std::numeric_limits<double>::quiet_NaN();
    bool dc_condition = false;        // lambda_max < 1 - tol
    bool side_conditions_ok = false;  // product at infinity vanishes, G^c(inf) PSD
    NiVerdict plant;                  // NI classification of Q^T G Q
    NiVerdict controller;             // SNI classification of G^c

    bool certified() const {
        return dc_condition && side_conditions_ok && plant.is_ni && controller.is_sni;
    }
};

inline Theorem1Verdict theorem1_certificate(const CongruenceTf& plant,
                                            const TfMatrix& controller,
                                            const FrequencyGrid& grid,
                                            NiOptions opts = {},
                                            double tol = 1e-9) {
    if (plant.dim() != controller.dim()) {
        throw DimensionError("plant and controller dimensions differ");
    }
    Theorem1Verdict verdict;
    verdict.plant = classify_ni(plant, grid, opts);
    verdict.controller = classify_ni(controller, grid, opts);

    const Eigen::MatrixXd product_inf = plant.infinity_gain() * controller.infinity_gain();
    const double gc_inf_min =
        detail::min_eigenvalue_hermitian(controller.infinity_gain().cast<Complex>());
    verdict.side_conditions_ok =
        product_inf.norm() < 1e-12 && gc_inf_min >= -opts.psd_tol;

    try {
        const Eigen::MatrixXd product = plant.dc_gain() * controller.dc_gain();
        verdict.lambda_max = detail::max_real_eigenvalue(product.cast<Complex>());
        verdict.dc_condition = verdict.lambda_max < 1.0 - tol;
    } catch (const PoleEvaluationError&) {
        // pole at the origin: no DC gain, and the pole check already failed
        verdict.dc_condition = false;
    }
    return verdict;
}

/// The sufficient (not necessary) condition
/// lambda_max(G(0)) * lambda_max(G^c(0)) < 1 / lambda_max(Q Q^T).
struct Prop1Verdict {
    double plant_dc_max = 0.0;
    double controller_dc_max = 0.0;
    double laplacian_bound = 0.0;  // 1 / lambda_max(Q Q^T)
    bool holds = false;
};

inline Prop1Verdict prop1_sufficient(const TfMatrix& plant, const TfMatrix& controller,
                                     const Topology& topo, double tol = 1e-9) {
    Prop1Verdict verdict;
    verdict.plant_dc_max =
        detail::max_eigenvalue_hermitian(plant.dc_gain().cast<Complex>());
    verdict.controller_dc_max =
        detail::max_eigenvalue_hermitian(controller.dc_gain().cast<Complex>());
    const double lap_max = laplacian_max_eigenvalue(topo);
    verdict.laplacian_bound = 1.0 / lap_max;
    verdict.holds =
        verdict.plant_dc_max * verdict.controller_dc_max < verdict.laplacian_bound - tol;
    return verdict;
}

/// Direct eigenvalue test of the assembled positive-feedback loop
///   A_cl = [[A, B Q C_c], [B_c Q^T C, A_c]].
/// Cross-checks the certificate: Theorem 1 holds iff A_cl is Hurwitz.
struct HurwitzVerdict {
    Eigen::VectorXcd eigenvalues;
    double max_real_part = 0.0;
    bool hurwitz = false;
};

inline HurwitzVerdict closed_loop_hurwitz(const StateSpaceModel& plant,
                                          const StateSpaceModel& controller,
                                          const Topology& topo, double tol = 0.0) {
    const Eigen::MatrixXd& q = topo.incidence;
    if (plant.n_outputs() != static_cast<int>(q.rows()) ||
        plant.n_inputs() != static_cast<int>(q.rows())) {
        throw DimensionError("plant I/O dimension must equal the bus count");
    }
    if (controller.n_inputs() != static_cast<int>(q.cols()) ||
        controller.n_outputs() != static_cast<int>(q.cols())) {
        throw DimensionError("controller I/O dimension must equal the edge count");
    }
    if (controller.D.norm() > 1e-14) {
        throw SideConditionError("closed_loop_hurwitz requires a strictly proper controller");
    }

    const int np = plant.n_states();
    const int nc = controller.n_states();
    Eigen::MatrixXd a_cl = Eigen::MatrixXd::Zero(np + nc, np + nc);
    a_cl.topLeftCorner(np, np) = plant.A;
    a_cl.topRightCorner(np, nc) = plant.B * q * controller.C;
    a_cl.bottomLeftCorner(nc, np) = controller.B * q.transpose() * plant.C;
    a_cl.bottomRightCorner(nc, nc) = controller.A;

    Eigen::EigenSolver<Eigen::MatrixXd> solver(a_cl, false);
    HurwitzVerdict verdict;
    verdict.eigenvalues = solver.eigenvalues();
    verdict.max_real_part = verdict.eigenvalues.real().maxCoeff();
    verdict.hurwitz = verdict.max_real_part < -tol;
    return verdict;
}

}  // namespace nigrid
