#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <concepts>
#include <utility>
#include <vector>

#include "nigrid/errors.hpp"

namespace nigrid {

using Complex = std::complex<double>;

/// Proper rational transfer function with real coefficients.
///
/// Coefficients are stored in ascending powers of s and canonicalized on
/// construction: trailing (highest-power) zeros are stripped and both
/// polynomials are scaled so the denominator is monic.
class RationalTf {
public:
    RationalTf(std::vector<double> num, std::vector<double> den)
        : num_(std::move(num)), den_(std::move(den)) {
        strip_high_zeros(den_);
        if (den_.empty()) throw ValidationError("transfer function denominator is zero");
        strip_high_zeros(num_);
        if (num_.empty()) num_.push_back(0.0);
        if (num_.size() > den_.size()) {
            throw ValidationError("transfer function is improper (deg num > deg den)");
        }
        const double lead = den_.back();
        for (auto& c : num_) c /= lead;
        for (auto& c : den_) c /= lead;
        den_.back() = 1.0;
    }

    static RationalTf constant(double c) { return RationalTf({c}, {1.0}); }

    /// First-order lag k/(tau*s + 1).
    static RationalTf first_order_lag(double k, double tau) {
        if (!(tau > 0.0)) throw ValidationError("lag time constant must be positive");
        return RationalTf({k}, {1.0, tau});
    }

    const std::vector<double>& num() const { return num_; }
    const std::vector<double>& den() const { return den_; }
    int num_degree() const { return static_cast<int>(num_.size()) - 1; }
    int den_degree() const { return static_cast<int>(den_.size()) - 1; }
    bool strictly_proper() const { return num_.size() < den_.size(); }

    /// Pointwise evaluation num(s)/den(s) by Horner's scheme. Throws
    /// PoleEvaluationError when |den(s)| vanishes relative to the
    /// coefficient magnitude at s.
    Complex eval(Complex s) const {
        const Complex den_val = horner(den_, s);
        const double den_scale = horner_abs(den_, std::abs(s));
        if (std::abs(den_val) <= 1e-14 * den_scale) {
            throw PoleEvaluationError("transfer function evaluated at a pole");
        }
        return horner(num_, s) / den_val;
    }

    double dc_gain() const {
        if (den_.front() == 0.0) throw PoleEvaluationError("pole at s = 0, DC gain undefined");
        return num_.front() / den_.front();
    }

    /// Value of the proper part as s -> infinity (0 for strictly proper).
    double infinity_gain() const { return strictly_proper() ? 0.0 : num_.back(); }

    /// Denominator roots with multiplicity. Closed form through degree 2,
    /// companion-matrix eigenvalues beyond.
    std::vector<Complex> poles() const {
        const int deg = den_degree();
        if (deg == 0) return {};
        if (deg == 1) return {Complex(-den_[0], 0.0)};
        if (deg == 2) return quadratic_roots(den_[0], den_[1]);
        Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(deg, deg);
        for (int i = 1; i < deg; ++i) companion(i, i - 1) = 1.0;
        for (int i = 0; i < deg; ++i) companion(i, deg - 1) = -den_[static_cast<size_t>(i)];
        Eigen::EigenSolver<Eigen::MatrixXd> solver(companion);
        std::vector<Complex> roots(static_cast<size_t>(deg));
        for (int i = 0; i < deg; ++i) roots[static_cast<size_t>(i)] = solver.eigenvalues()(i);
        return roots;
    }

private:
    static void strip_high_zeros(std::vector<double>& coeffs) {
        while (!coeffs.empty() && coeffs.back() == 0.0) coeffs.pop_back();
    }

    static Complex horner(const std::vector<double>& coeffs, Complex s) {
        Complex acc(0.0, 0.0);
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * s + *it;
        return acc;
    }

    static double horner_abs(const std::vector<double>& coeffs, double r) {
        double acc = 0.0;
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * r + std::abs(*it);
        return acc;
    }

    // roots of s^2 + b s + c, cancellation-safe
    static std::vector<Complex> quadratic_roots(double c, double b) {
        const double disc = b * b - 4.0 * c;
        if (disc < 0.0) {
            const double re = -b / 2.0;
            const double im = std::sqrt(-disc) / 2.0;
            return {Complex(re, im), Complex(re, -im)};
        }
        const double q = -(b + std::copysign(std::sqrt(disc), b)) / 2.0;
        const double r1 = q;
        const double r2 = (q != 0.0) ? c / q : 0.0;
        return {Complex(r1, 0.0), Complex(r2, 0.0)};
    }

    std::vector<double> num_;
    std::vector<double> den_;
};

/// Block-diagonal square matrix of rational transfer functions.
class TfMatrix {
public:
    explicit TfMatrix(std::vector<RationalTf> blocks) : blocks_(std::move(blocks)) {
        if (blocks_.empty()) throw ValidationError("TfMatrix needs at least one block");
    }

    int dim() const { return static_cast<int>(blocks_.size()); }
    const RationalTf& block(int i) const { return blocks_[static_cast<size_t>(i)]; }
    const std::vector<RationalTf>& blocks() const { return blocks_; }

    Eigen::MatrixXcd eval(Complex s) const {
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim(), dim());
        for (int i = 0; i < dim(); ++i) m(i, i) = blocks_[static_cast<size_t>(i)].eval(s);
        return m;
    }

    Eigen::MatrixXd dc_gain() const {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim(), dim());
        for (int i = 0; i < dim(); ++i) m(i, i) = blocks_[static_cast<size_t>(i)].dc_gain();
        return m;
    }

    Eigen::MatrixXd infinity_gain() const {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim(), dim());
        for (int i = 0; i < dim(); ++i) m(i, i) = blocks_[static_cast<size_t>(i)].infinity_gain();
        return m;
    }

    std::vector<Complex> poles() const {
        std::vector<Complex> all;
        for (const auto& block : blocks_) {
            auto p = block.poles();
            all.insert(all.end(), p.begin(), p.end());
        }
        return all;
    }

private:
    std::vector<RationalTf> blocks_;
};

/// The congruence Q^T G(s) Q of a block-diagonal G — the post-processed
/// plant seen by the edge controllers. Dense in general, so kept as a view
/// rather than a TfMatrix.
class CongruenceTf {
public:
    CongruenceTf(Eigen::MatrixXd q, TfMatrix inner)
        : q_(std::move(q)), inner_(std::move(inner)) {
        if (q_.rows() != inner_.dim()) {
            throw DimensionError("incidence rows must match inner transfer matrix dimension");
        }
    }

    int dim() const { return static_cast<int>(q_.cols()); }
    const Eigen::MatrixXd& q() const { return q_; }
    const TfMatrix& inner() const { return inner_; }

    Eigen::MatrixXcd eval(Complex s) const {
        return q_.transpose() * inner_.eval(s) * q_;
    }

    Eigen::MatrixXd dc_gain() const { return q_.transpose() * inner_.dc_gain() * q_; }

    Eigen::MatrixXd infinity_gain() const {
        return q_.transpose() * inner_.infinity_gain() * q_;
    }

    // every pole of Q^T G Q is a pole of G
    std::vector<Complex> poles() const { return inner_.poles(); }

private:
    Eigen::MatrixXd q_;
    TfMatrix inner_;
};

/// Anything with a square frequency response: evaluable on the imaginary
/// axis, with a pole list and a proper-part limit.
template <typename M>
concept FrequencyResponse = requires(const M& m, Complex s) {
    { m.dim() } -> std::convertible_to<int>;
    { m.eval(s) } -> std::convertible_to<Eigen::MatrixXcd>;
    { m.poles() } -> std::convertible_to<std::vector<Complex>>;
    { m.infinity_gain() } -> std::convertible_to<Eigen::MatrixXd>;
};

}  // namespace nigrid
