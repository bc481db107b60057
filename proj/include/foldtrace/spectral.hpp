#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace foldtrace {

/// d^order/dtheta^order on m equispaced nodes of [0, 2pi), built from the Fourier
/// multipliers (ik)^order for k = -m/2+1..m/2. The Nyquist multiplier is dropped for
/// odd orders so the matrix stays real.
inline Eigen::MatrixXd fourier_diff_matrix(int m, int order) {
    if (m < 8 || m % 2 != 0) {
        throw std::invalid_argument("fourier_diff_matrix: m must be even and >= 8, got " + std::to_string(m));
    }
    if (order < 1) {
        throw std::invalid_argument("fourier_diff_matrix: order must be >= 1");
    }
    using cd = std::complex<double>;
    const double two_pi = 2.0 * std::numbers::pi;
    std::vector<cd> twiddle(static_cast<std::size_t>(m));
    for (int q = 0; q < m; ++q) {
        twiddle[q] = std::polar(1.0, two_pi * q / m);
    }

    // The matrix is circulant: D(j, l) = c(j - l mod m) with c(d) = (1/m) sum_k (ik)^p e^{2 pi i k d / m}.
    std::vector<double> kernel(static_cast<std::size_t>(m));
    for (int d = 0; d < m; ++d) {
        cd sum = 0.0;
        for (int k = -m / 2 + 1; k <= m / 2; ++k) {
            if (k == m / 2 && order % 2 == 1) {
                continue;
            }
            const cd multiplier = std::pow(cd(0.0, static_cast<double>(k)), order);
            const int q = ((k * d) % m + m) % m;
            sum += multiplier * twiddle[q];
        }
        sum /= static_cast<double>(m);
        const double scale = std::pow(m / 2.0, order);
        if (std::abs(sum.imag()) > 1e-12 * scale) {
            throw std::logic_error("fourier_diff_matrix: non-real kernel");
        }
        kernel[d] = sum.real();
    }

    Eigen::MatrixXd out(m, m);
    for (int j = 0; j < m; ++j) {
        for (int l = 0; l < m; ++l) {
            out(j, l) = kernel[((j - l) % m + m) % m];
        }
    }
    return out;
}

/// Periodic grid theta_i = 2 pi i / m with its differentiation matrices.
class SpectralGrid {
public:
    explicit SpectralGrid(int m) : m_(m), d1_(fourier_diff_matrix(m, 1)), d3_(fourier_diff_matrix(m, 3)) {
        nodes_.resize(m);
        cos_.resize(m);
        for (int i = 0; i < m; ++i) {
            nodes_[i] = 2.0 * std::numbers::pi * i / m;
            cos_[i] = std::cos(nodes_[i]);
        }
        d13_ = d1_ + d3_;
    }

    int m() const { return m_; }
    const Eigen::VectorXd& nodes() const { return nodes_; }
    const Eigen::VectorXd& cos_nodes() const { return cos_; }
    const Eigen::MatrixXd& d1() const { return d1_; }
    const Eigen::MatrixXd& d3() const { return d3_; }
    const Eigen::MatrixXd& d1_plus_d3() const { return d13_; }

    /// Rectangle-rule weight 2 pi / m.
    double weight() const { return 2.0 * std::numbers::pi / m_; }

    /// Rectangle rule for the integral over one period.
    double integrate(const Eigen::VectorXd& v) const { return weight() * v.sum(); }

private:
    int m_;
    Eigen::MatrixXd d1_;
    Eigen::MatrixXd d3_;
    Eigen::MatrixXd d13_;
    Eigen::VectorXd nodes_;
    Eigen::VectorXd cos_;
};

}  // namespace foldtrace
