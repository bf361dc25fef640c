#pragma once

// Brute-force truncated Fock-space simulator for up to three modes.
//
// States live in the span of Fock states with total photon number <= N.
// Annihilators, pure-loss Kraus maps and passive mode rotations never leave
// that span, so they are exact; only the construction of a Gaussian state
// from its recipe is affected by truncation, and that error is tracked as
// leakage.

#include "cvloss/loss_channel.hpp"
#include "cvloss/phase_space.hpp"

#include <Eigen/SparseCore>

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <variant>
#include <vector>

namespace cvloss::fock {

using SpCMat = Eigen::SparseMatrix<std::complex<double>>;

inline constexpr int k_max_modes = 3;
inline constexpr double k_leakage_threshold = 1e-6;

/// Largest total photon number accepted for a given mode count.
int max_cutoff(int modes);

/// Fock states |n_1 .. n_m> with n_1 + .. + n_m <= cutoff, ordered by total
/// photon number, then lexicographically. Spaces with a larger cutoff extend
/// smaller ones: indices of shared states coincide.
class FockSpace {
public:
    using Occupation = std::array<int, k_max_modes>;

    FockSpace(int modes, int cutoff);

    int modes() const { return modes_; }
    int cutoff() const { return cutoff_; }
    int dim() const { return static_cast<int>(states_.size()); }
    const Occupation& occupation(int index) const { return states_[index]; }
    int total(int index) const;
    /// -1 if the occupation lies outside the space.
    int index(const Occupation& n) const;
    int shell_begin(int n) const { return shell_begin_[n]; }
    int shell_size(int n) const { return shell_begin_[n + 1] - shell_begin_[n]; }

    SpCMat lowering(int mode) const;
    SpCMat raising(int mode) const;
    /// a(f) = sum_j conj(c_j) a_j with c_j = f_j + i f_{m+j}; f need not be normalized.
    SpCMat annihilator(const PhaseSpaceVector& f) const;
    /// Q(f) = a(f) + a†(f).
    SpCMat quadrature(const PhaseSpaceVector& f) const;

private:
    int modes_;
    int cutoff_;
    std::vector<Occupation> states_;
    std::vector<int> shell_begin_;
    std::vector<int> lookup_;
};

struct FockDensityMatrix {
    FockSpace space;
    CMat rho;
    double leakage = 0.0;  ///< truncated population recorded while building the state

    bool reliable() const { return leakage < k_leakage_threshold; }
    double trace() const { return rho.trace().real(); }
};

/// Hermitian to 1e-10, unit trace to 1e-8, eigenvalues >= -1e-8.
void check_density_matrix(const FockDensityMatrix& state);

/// Multiplies the x variance of `mode` by `factor` and the p variance by 1/factor.
struct Squeeze {
    int mode;
    double factor;
};

/// exp(i x_first x_second / 2): p_first -> p_first + x_second and vice versa.
struct ControlledZ {
    int first;
    int second;
};

/// Thermal occupation of `mode` with quadrature variance n = 2 nbar + 1.
/// Must precede every unitary step.
struct Thermal {
    int mode;
    double n;
};

/// Passive interferometer with phase-space matrix O (orthogonal symplectic).
struct Passive {
    Mat o;
};

using Step = std::variant<Squeeze, ControlledZ, Thermal, Passive>;
using Recipe = std::vector<Step>;

struct BuildOptions {
    int padding = -1;               ///< extra photons in the working space; -1 picks a default
    bool allow_unreliable = false;  ///< return leaky states instead of throwing TruncationLeakage
};

FockDensityMatrix vacuum(int modes, int cutoff);
FockDensityMatrix fock_state(int cutoff, std::span<const int> occupation);
/// Coherent state with <a_j> = (beta_j + i beta_{m+j}) / 2; leakage is the discarded population.
FockDensityMatrix coherent_state(int cutoff, const PhaseSpaceVector& beta);

FockDensityMatrix build_state(int modes, const Recipe& recipe, int cutoff, const BuildOptions& options = {});

/// The covariance the recipe produces, from the phase-space action of each step.
GaussianState recipe_covariance(int modes, const Recipe& recipe);

/// a(g) rho a†(g) / tr; throws VacuumSubtraction when the trace is <= 1e-12.
FockDensityMatrix annihilate(const FockDensityMatrix& state, const PhaseSpaceVector& g);

/// a(alpha) rho a†(alpha) without renormalization; alpha may have any norm.
FockDensityMatrix apply_annihilator(const FockDensityMatrix& state, const PhaseSpaceVector& alpha);

/// Pure-loss beamsplitters with t_j = exp(-xi gamma_j / 2) on each loss mode.
FockDensityMatrix kraus_loss(const FockDensityMatrix& state, const LossChannel& channel, LossStrength xi);

/// U rho U† with U a†(c) U† = a†(u c).
FockDensityMatrix apply_passive(const FockDensityMatrix& state, const CMat& u);

struct OracleReading {
    double value = 0.0;
    bool reliable = true;
};

/// Displaced-parity Wigner function, normalized so the vacuum gives (2 pi)^{-m} exp(-|beta|^2 / 2).
OracleReading wigner_point(const FockDensityMatrix& state, const PhaseSpaceVector& beta);

/// Symmetrized quadrature covariance, measured exactly in an enlarged space.
Mat covariance(const FockDensityMatrix& state);

/// tr(rho Q(f)^order).
double quadrature_moment(const FockDensityMatrix& state, const PhaseSpaceVector& f, int order);

/// tr(rho a†(f) a(f)).
double mean_photon_number(const FockDensityMatrix& state, const PhaseSpaceVector& f);

double trace_distance(const FockDensityMatrix& a, const FockDensityMatrix& b);

/// Ginibre-type random state supported on total photon number <= support.
FockDensityMatrix random_density_matrix(int modes, int cutoff, int support, int rank, std::mt19937_64& rng);

/// Max entrywise deviation between loss applied after the subtractions and
/// subtraction in the modes e^{xi D} g_j applied after the loss. Neither side
/// is renormalized.
double subtraction_loss_identity_deviation(const FockDensityMatrix& state, std::span<const PhaseSpaceVector> gs,
                                           const LossChannel& channel, LossStrength xi);

}  // namespace cvloss::fock
