#pragma once

// Generators and independent reference computations shared by the test binaries.

#include "cvloss/graph_states.hpp"
#include "cvloss/loss_channel.hpp"
#include "cvloss/phase_space.hpp"
#include "cvloss/subtraction.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

namespace cvloss::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

inline PhaseSpaceVector random_vector(int m, Rng& rng) {
    std::normal_distribution<double> normal;
    Vec v(2 * m);
    for (int i = 0; i < 2 * m; ++i) v[i] = normal(rng);
    return PhaseSpaceVector(std::move(v));
}

inline PhaseSpaceVector random_mode(int m, Rng& rng) { return random_vector(m, rng).normalized(); }

inline CMat random_unitary(int m, Rng& rng) {
    std::normal_distribution<double> normal;
    CMat z(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) z(i, j) = {normal(rng), normal(rng)};
    Eigen::HouseholderQR<CMat> qr(z);
    CMat q = qr.householderQ() * CMat::Identity(m, m);
    for (int j = 0; j < m; ++j) q.col(j) *= qr.matrixQR()(j, j) / std::abs(qr.matrixQR()(j, j));
    return q;
}

inline PhaseSpaceVector from_amplitudes(const CVec& c) {
    Vec v(2 * c.size());
    v.head(c.size()) = c.real();
    v.tail(c.size()) = c.imag();
    return PhaseSpaceVector(std::move(v));
}

/// O1 Z O2 N O2^T Z O1^T with passive O1, O2, squeezing Z and thermal noise N.
inline GaussianState random_gaussian(int m, Rng& rng, double max_db = 10.0, double max_noise = 1.5) {
    const Mat o1 = passive_from_unitary(random_unitary(m, rng));
    const Mat o2 = passive_from_unitary(random_unitary(m, rng));
    Vec z(2 * m), n(2 * m);
    for (int j = 0; j < m; ++j) {
        const double s = squeezing_factor(uniform(rng, 0.5, max_db));
        z[j] = std::sqrt(s);
        z[m + j] = 1.0 / std::sqrt(s);
        n[j] = n[m + j] = uniform(rng, 1.0, max_noise);
    }
    const Mat core = o2 * n.asDiagonal() * o2.transpose();
    return validate_covariance(o1 * z.asDiagonal() * core * z.asDiagonal() * o1.transpose());
}

/// Loss modes from the columns of a random unitary; some rates are zero and
/// some columns are dropped so that D is often singular.
inline LossChannel random_channel(int m, Rng& rng) {
    const CMat u = random_unitary(m, rng);
    const int count = uniform_int(rng, 1, m);
    std::vector<LossMode> entries;
    for (int j = 0; j < count; ++j) {
        const double rate = uniform(rng, 0.0, 1.0) < 0.15 ? 0.0 : uniform(rng, 0.1, 2.5);
        entries.push_back({from_amplitudes(u.col(j)), rate});
    }
    return LossChannel(m, std::move(entries));
}

/// D assembled directly from the definition, independent of the library's spectral cache.
inline Mat reference_d(const LossChannel& channel) {
    const int n = 2 * channel.mode_count();
    Mat d = Mat::Zero(n, n);
    for (const auto& e : channel.entries()) {
        const Vec& h = e.mode.coords();
        const Vec jh = symplectic_form(channel.mode_count()) * h;
        d += 0.5 * e.rate * (h * h.transpose() + jh * jh.transpose());
    }
    return d;
}

/// Dense matrix exponential by Pade scaling and squaring.
inline Mat dense_exp(const Mat& a) { return a.exp(); }

/// |eigenvalues of i J V|, each appearing twice, reduced to one per mode.
inline Vec reference_symplectic_eigenvalues(const Mat& v) {
    const int m = static_cast<int>(v.rows() / 2);
    const CMat ijv = std::complex<double>(0.0, 1.0) * (symplectic_form(m) * v).cast<std::complex<double>>();
    Eigen::ComplexEigenSolver<CMat> es(ijv, false);
    std::vector<double> mags;
    for (int i = 0; i < 2 * m; ++i) mags.push_back(std::abs(es.eigenvalues()[i]));
    std::sort(mags.begin(), mags.end());
    Vec out(m);
    for (int j = 0; j < m; ++j) out[j] = 0.5 * (mags[2 * j] + mags[2 * j + 1]);
    return out;
}

/// Gauss-Legendre nodes and weights on [-1, 1] (Golub-Welsch).
struct Quadrature {
    std::vector<double> nodes;
    std::vector<double> weights;
};

inline Quadrature gauss_legendre(int n) {
    Mat t = Mat::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double b = k / std::sqrt(4.0 * k * k - 1.0);
        t(k, k - 1) = t(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(t);
    Quadrature q;
    for (int i = 0; i < n; ++i) {
        q.nodes.push_back(es.eigenvalues()[i]);
        q.weights.push_back(2.0 * es.eigenvectors()(0, i) * es.eigenvectors()(0, i));
    }
    return q;
}

/// Integral of f over the square [-r, r]^2, composite over `panels`^2 cells.
inline double integrate_plane(const std::function<double(double, double)>& f, double r, int panels, int order) {
    const Quadrature q = gauss_legendre(order);
    const double h = 2.0 * r / panels;
    double total = 0.0;
    for (int a = 0; a < panels; ++a) {
        for (int b = 0; b < panels; ++b) {
            const double ca = -r + (a + 0.5) * h;
            const double cb = -r + (b + 0.5) * h;
            for (int i = 0; i < order; ++i)
                for (int j = 0; j < order; ++j)
                    total += q.weights[i] * q.weights[j] * f(ca + 0.5 * h * q.nodes[i], cb + 0.5 * h * q.nodes[j]);
        }
    }
    return total * 0.25 * h * h;
}

inline double max_abs_diff(const Mat& a, const Mat& b) { return (a - b).cwiseAbs().maxCoeff(); }

inline double max_param_diff(const PolyGaussianWigner& a, const PolyGaussianWigner& b) {
    return std::max({max_abs_diff(a.sigma(), b.sigma()), max_abs_diff(a.quadratic(), b.quadratic()),
                     std::abs(a.constant() - b.constant())});
}

/// Single-mode state diag(n s, n / s) with s from dB.
inline GaussianState squeezed_thermal(double s_db, double n) {
    const double s = squeezing_factor(s_db);
    Mat v(2, 2);
    v << n * s, 0.0, 0.0, n / s;
    return validate_covariance(v);
}

inline int rank_of(const Mat& a, double tol = 1e-9) {
    Eigen::SelfAdjointEigenSolver<Mat> es(a, Eigen::EigenvaluesOnly);
    const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    int r = 0;
    for (int i = 0; i < a.rows(); ++i)
        if (std::abs(es.eigenvalues()[i]) > tol * scale) ++r;
    return r;
}

inline double min_eigenvalue(const Mat& a) {
    Eigen::SelfAdjointEigenSolver<Mat> es(a, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

}  // namespace cvloss::testing
