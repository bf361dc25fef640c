#include "cvloss/phase_space.hpp"

#include "cvloss/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cvloss {

PhaseSpaceVector::PhaseSpaceVector(Vec coords) : coords_(std::move(coords)) {
    if (coords_.size() % 2 != 0) {
        throw DimensionMismatch("phase-space vector must have even length, got " +
                                std::to_string(coords_.size()));
    }
}

PhaseSpaceVector PhaseSpaceVector::zero(int modes) { return PhaseSpaceVector(Vec::Zero(2 * modes)); }

PhaseSpaceVector PhaseSpaceVector::x_axis(int modes, int j) {
    if (j < 0 || j >= modes) throw InvalidArgument("mode index out of range");
    Vec v = Vec::Zero(2 * modes);
    v[j] = 1.0;
    return PhaseSpaceVector(std::move(v));
}

PhaseSpaceVector PhaseSpaceVector::p_axis(int modes, int j) {
    if (j < 0 || j >= modes) throw InvalidArgument("mode index out of range");
    Vec v = Vec::Zero(2 * modes);
    v[modes + j] = 1.0;
    return PhaseSpaceVector(std::move(v));
}

PhaseSpaceVector PhaseSpaceVector::superposition(int modes, std::span<const int> which) {
    if (which.empty()) throw InvalidArgument("superposition needs at least one mode");
    Vec v = Vec::Zero(2 * modes);
    for (int j : which) {
        if (j < 0 || j >= modes) throw InvalidArgument("mode index out of range");
        v[j] += 1.0;
    }
    return PhaseSpaceVector(std::move(v)).normalized();
}

double PhaseSpaceVector::dot(const PhaseSpaceVector& other) const {
    if (dim() != other.dim()) throw DimensionMismatch("inner product of vectors of different length");
    return coords_.dot(other.coords_);
}

bool PhaseSpaceVector::is_mode(double tol) const { return std::abs(norm() - 1.0) <= tol; }

PhaseSpaceVector PhaseSpaceVector::normalized() const {
    const double n = norm();
    if (!(n > 0.0)) throw NotNormalized("cannot normalize a zero vector");
    return PhaseSpaceVector(Vec(coords_ / n));
}

PhaseSpaceVector PhaseSpaceVector::operator+(const PhaseSpaceVector& o) const {
    if (dim() != o.dim()) throw DimensionMismatch("sum of vectors of different length");
    return PhaseSpaceVector(Vec(coords_ + o.coords_));
}

PhaseSpaceVector PhaseSpaceVector::operator-(const PhaseSpaceVector& o) const {
    if (dim() != o.dim()) throw DimensionMismatch("difference of vectors of different length");
    return PhaseSpaceVector(Vec(coords_ - o.coords_));
}

PhaseSpaceVector operator*(const Mat& m, const PhaseSpaceVector& f) {
    if (m.cols() != f.dim()) throw DimensionMismatch("matrix-vector dimension mismatch");
    return PhaseSpaceVector(Vec(m * f.coords()));
}

Mat symplectic_form(int modes) {
    Mat j = Mat::Zero(2 * modes, 2 * modes);
    j.topRightCorner(modes, modes) = -Mat::Identity(modes, modes);
    j.bottomLeftCorner(modes, modes) = Mat::Identity(modes, modes);
    return j;
}

PhaseSpaceVector apply_j(const PhaseSpaceVector& f) {
    const int m = f.mode_count();
    Vec out(2 * m);
    out.head(m) = -f.coords().tail(m);
    out.tail(m) = f.coords().head(m);
    return PhaseSpaceVector(std::move(out));
}

void require_mode(const PhaseSpaceVector& f, const char* what, double tol) {
    if (!f.is_mode(tol)) {
        std::ostringstream os;
        os << what << " must be normalized (norm = " << f.norm() << ")";
        throw NotNormalized(os.str());
    }
}

double commutator_form(const PhaseSpaceVector& f1, const PhaseSpaceVector& f2) {
    if (f1.dim() != f2.dim()) throw DimensionMismatch("commutator of vectors of different length");
    return -2.0 * f1.dot(apply_j(f2));
}

Mat mode_projector(const PhaseSpaceVector& f) {
    require_mode(f, "projector mode");
    const Vec& a = f.coords();
    const Vec b = apply_j(f).coords();
    return a * a.transpose() + b * b.transpose();
}

CVec mode_amplitudes(const PhaseSpaceVector& f) {
    const int m = f.mode_count();
    CVec c(m);
    for (int j = 0; j < m; ++j) c[j] = {f[j], f[m + j]};
    return c;
}

Mat passive_from_unitary(const CMat& u) {
    const auto m = u.rows();
    Mat o(2 * m, 2 * m);
    o.topLeftCorner(m, m) = u.real();
    o.topRightCorner(m, m) = -u.imag();
    o.bottomLeftCorner(m, m) = u.imag();
    o.bottomRightCorner(m, m) = u.real();
    return o;
}

CMat unitary_from_passive(const Mat& o) {
    if (o.rows() != o.cols() || o.rows() % 2 != 0) throw DimensionMismatch("passive map must be 2m x 2m");
    const auto m = o.rows() / 2;
    CMat u(m, m);
    u.real() = o.topLeftCorner(m, m);
    u.imag() = o.bottomLeftCorner(m, m);
    return u;
}

bool is_symplectic_orthogonal(const Mat& o) {
    if (o.rows() != o.cols() || o.rows() % 2 != 0) return false;
    const int m = static_cast<int>(o.rows() / 2);
    const Mat j = symplectic_form(m);
    const Mat id = Mat::Identity(2 * m, 2 * m);
    return (o.transpose() * o - id).cwiseAbs().maxCoeff() <= k_basis_change_tol &&
           (o.transpose() * j * o - j).cwiseAbs().maxCoeff() <= k_basis_change_tol;
}

std::vector<int> quadrature_indices(int modes, std::span<const int> which) {
    std::vector<int> idx;
    idx.reserve(2 * which.size());
    for (int j : which) idx.push_back(j);
    for (int j : which) idx.push_back(modes + j);
    return idx;
}

Vec symplectic_eigenvalues(const Mat& v) {
    const int n = static_cast<int>(v.rows());
    const int m = n / 2;
    Eigen::SelfAdjointEigenSolver<Mat> sym(v);
    if (sym.info() != Eigen::Success || sym.eigenvalues().minCoeff() <= 0.0) {
        throw UnphysicalCovariance("covariance is not positive definite");
    }
    const Mat root = sym.eigenvectors() * sym.eigenvalues().cwiseSqrt().asDiagonal() *
                     sym.eigenvectors().transpose();
    // i V^{1/2} J V^{1/2} is Hermitian with eigenvalues +-nu_k.
    const CMat h = std::complex<double>(0.0, 1.0) * (root * symplectic_form(m) * root).cast<std::complex<double>>();
    Eigen::SelfAdjointEigenSolver<CMat> herm(h);
    Vec ev = herm.eigenvalues();
    Vec nu = ev.tail(m);
    std::sort(nu.data(), nu.data() + m);
    return nu;
}

GaussianState GaussianState::vacuum(int modes) { return GaussianState(Mat::Identity(2 * modes, 2 * modes)); }

GaussianState validate_covariance(const Mat& v) {
    if (v.rows() != v.cols()) throw DimensionMismatch("covariance must be square");
    if (v.rows() == 0 || v.rows() % 2 != 0) throw DimensionMismatch("covariance must have even dimension");
    if (!v.allFinite()) throw UnphysicalCovariance("covariance has non-finite entries");
    Mat sym = 0.5 * (v + v.transpose());
    const Vec nu = symplectic_eigenvalues(sym);
    if (nu.minCoeff() < 1.0 - k_physicality_slack) {
        std::ostringstream os;
        os << "unphysical covariance: smallest symplectic eigenvalue " << nu.minCoeff() << " < 1";
        throw UnphysicalCovariance(os.str());
    }
    return GaussianState(std::move(sym));
}

double mean_photon_number(const GaussianState& state, const PhaseSpaceVector& f) {
    require_mode(f, "photon-number mode");
    if (f.dim() != state.dim()) throw DimensionMismatch("mode and state dimensions differ");
    const Mat& v = state.covariance();
    const PhaseSpaceVector jf = apply_j(f);
    return (f.coords().dot(v * f.coords()) + jf.coords().dot(v * jf.coords()) - 2.0) / 4.0;
}

}  // namespace cvloss
