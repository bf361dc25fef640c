#pragma once

// Phase-space substrate for m optical modes.
//
// Coordinates are ordered (x_1..x_m, p_1..p_m) in vacuum units, [x, p] = 2i,
// so the vacuum covariance is the identity. The symplectic form maps the
// x-block onto the p-block: J e_j = e_{m+j}, J e_{m+j} = -e_j.

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace cvloss {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

inline constexpr double k_symmetry_tol = 1e-12;
inline constexpr double k_normalization_tol = 1e-12;
inline constexpr double k_physicality_slack = 1e-9;
inline constexpr double k_basis_change_tol = 1e-10;

/// Real vector in R^{2m}. A "mode" is a PhaseSpaceVector of unit norm.
class PhaseSpaceVector {
public:
    PhaseSpaceVector() = default;
    explicit PhaseSpaceVector(Vec coords);

    static PhaseSpaceVector zero(int modes);
    /// e_j: the x-quadrature direction of mode j (0-based).
    static PhaseSpaceVector x_axis(int modes, int j);
    /// J e_j: the p-quadrature direction of mode j.
    static PhaseSpaceVector p_axis(int modes, int j);
    /// Balanced superposition of the x-axes of the listed modes, normalized.
    static PhaseSpaceVector superposition(int modes, std::span<const int> which);

    const Vec& coords() const { return coords_; }
    int dim() const { return static_cast<int>(coords_.size()); }
    int mode_count() const { return dim() / 2; }
    double operator[](int i) const { return coords_[i]; }

    double norm() const { return coords_.norm(); }
    double dot(const PhaseSpaceVector& other) const;
    bool is_mode(double tol = k_normalization_tol) const;
    PhaseSpaceVector normalized() const;

    PhaseSpaceVector operator*(double s) const { return PhaseSpaceVector(Vec(coords_ * s)); }
    PhaseSpaceVector operator+(const PhaseSpaceVector& o) const;
    PhaseSpaceVector operator-(const PhaseSpaceVector& o) const;

private:
    Vec coords_;
};

PhaseSpaceVector operator*(const Mat& m, const PhaseSpaceVector& f);

Mat symplectic_form(int modes);

/// J f without materializing J.
PhaseSpaceVector apply_j(const PhaseSpaceVector& f);

/// Throws NotNormalized unless |f| = 1 within tol.
void require_mode(const PhaseSpaceVector& f, const char* what, double tol = k_normalization_tol);

/// -2 (f1, J f2); the commutator [Q(f1), Q(f2)] equals i times this value.
double commutator_form(const PhaseSpaceVector& f1, const PhaseSpaceVector& f2);

/// P_f + P_{Jf}: the rank-two orthogonal projector onto span{f, Jf}.
Mat mode_projector(const PhaseSpaceVector& f);

/// Complex mode amplitudes c_j = f_j + i f_{m+j}, so that
/// a†(f) = sum_j c_j a†_j and a(f) = sum_j conj(c_j) a_j.
CVec mode_amplitudes(const PhaseSpaceVector& f);

/// Real 2m x 2m representation [[Re u, -Im u], [Im u, Re u]] of a complex
/// m x m matrix. For unitary u this is a passive (orthogonal symplectic) map.
Mat passive_from_unitary(const CMat& u);

/// Inverse of passive_from_unitary for block-structured O.
CMat unitary_from_passive(const Mat& o);

/// True iff O^T O = 1 and O^T J O = J within 1e-10.
bool is_symplectic_orthogonal(const Mat& o);

/// Quadrature indices (x block then p block) of the listed modes.
std::vector<int> quadrature_indices(int modes, std::span<const int> which);

/// Symplectic eigenvalues of a positive-definite covariance, ascending, one per mode.
Vec symplectic_eigenvalues(const Mat& v);

/// Zero-mean Gaussian state described by its covariance (vacuum = identity).
class GaussianState {
public:
    int mode_count() const { return static_cast<int>(cov_.rows() / 2); }
    int dim() const { return static_cast<int>(cov_.rows()); }
    const Mat& covariance() const { return cov_; }

    static GaussianState vacuum(int modes);

private:
    explicit GaussianState(Mat v) : cov_(std::move(v)) {}
    friend GaussianState validate_covariance(const Mat& v);

    Mat cov_;
};

/// Symmetrizes V and checks physicality (symplectic eigenvalues >= 1 - 1e-9).
GaussianState validate_covariance(const Mat& v);

/// [(f, V f) + (Jf, V Jf) - 2] / 4.
double mean_photon_number(const GaussianState& state, const PhaseSpaceVector& f);

}  // namespace cvloss
