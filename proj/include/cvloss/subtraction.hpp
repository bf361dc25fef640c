#pragma once

// Single-photon subtraction from zero-mean Gaussian states and its
// interplay with the loss channel.
//
// Every single-photon-subtracted Gaussian state (lossy or not) and every
// marginal of one has a Wigner function of the form
//
//     W(beta) = 1/2 [(beta, M beta) + c] G_Sigma(beta),
//
// with G_Sigma the normalized zero-mean Gaussian of covariance Sigma and
// tr(M Sigma) + c = 2. PolyGaussianWigner is that family.

#include "cvloss/loss_channel.hpp"
#include "cvloss/phase_space.hpp"

#include <span>
#include <vector>

namespace cvloss {

inline constexpr double k_vacuum_subtraction_eps = 1e-12;
inline constexpr double k_psd_tol = 1e-10;

class PolyGaussianWigner {
public:
    PolyGaussianWigner(Mat sigma, Mat quadratic, double constant);

    /// The Gaussian itself: M = 0, c = 2.
    static PolyGaussianWigner gaussian(const GaussianState& state);

    int mode_count() const { return static_cast<int>(sigma_.rows() / 2); }
    int dim() const { return static_cast<int>(sigma_.rows()); }
    const Mat& sigma() const { return sigma_; }
    const Mat& quadratic() const { return quad_; }
    double constant() const { return c_; }

    double operator()(const Vec& beta) const;
    double gaussian_factor(const Vec& beta) const;

    /// tr(M Sigma) + c; equals 2 for a normalized Wigner function.
    double normalization() const;

    /// Integrates out every mode not listed in `keep` (0-based mode indices).
    PolyGaussianWigner marginal(std::span<const int> keep) const;

private:
    Mat sigma_;
    Mat quad_;
    double c_;
    Mat sigma_inv_;
    double prefactor_;  ///< 1 / ((2 pi)^k sqrt(det Sigma))
};

struct SubtractedState {
    GaussianState base;              ///< V (lossless or lose-first) or V_xi (subtract-first)
    PhaseSpaceVector mode;           ///< effective subtraction mode: g, or g~ after loss
    Mat a;                           ///< rank <= 2 non-Gaussian matrix
    PolyGaussianWigner wigner;
    PhaseSpaceVector origin_mode;    ///< g as originally subtracted
    Mat lift;                        ///< e^{xi D} if loss acted after subtraction, identity otherwise
};

/// A_g = 2 (V-1)(P_g + P_Jg)(V-1) / tr[(V-1)(P_g + P_Jg)].
/// Throws VacuumSubtraction when the denominator is <= 1e-12.
Mat a_matrix(const GaussianState& state, const PhaseSpaceVector& g);

/// Lossless single-photon subtraction in mode g.
SubtractedState subtract(const GaussianState& state, const PhaseSpaceVector& g);

/// Photon subtracted in g, then the channel acts: base V_xi, A^xi = e^{-xi D} A_g e^{-xi D}, mode g~.
SubtractedState subtract_then_lose(const GaussianState& state, const PhaseSpaceVector& g, const DecayGenerator& gen,
                                   LossStrength xi);

/// The channel acts on the Gaussian state, then a photon is subtracted in g.
SubtractedState lose_then_subtract(const GaussianState& state, const DecayGenerator& gen, LossStrength xi,
                                   const PhaseSpaceVector& g);

double wigner_eval(const SubtractedState& s, const PhaseSpaceVector& beta);

struct NegativityWitness {
    double lhs = 0.0;        ///< tr{V_xi^-1 e^{-xi D} A_g e^{-xi D}}
    double threshold = 2.0;
    double lifted_lhs = 0.0; ///< (g, L V_xi^-1 L g) + (Jg, L V_xi^-1 L Jg), L = e^{xi D}
    double lifted_rhs = 0.0; ///< (g, L^2 g) + (Jg, L^2 Jg)
    double gap = 0.0;        ///< |lhs - lhs reconstructed from the lifted form|
    bool negative = false;   ///< lhs > 2
    bool lifted_negative = false;
};

/// Necessary and sufficient condition for W to take negative values, in both
/// the trace form and the lifted mode form.
NegativityWitness negativity_witness(const SubtractedState& s);

PolyGaussianWigner marginal(const SubtractedState& s, std::span<const int> keep);

/// Phase-space moment of (f, beta)^order, closed form via Wick pairings.
double quadrature_moment(const PolyGaussianWigner& w, const PhaseSpaceVector& f, int order);

struct KurtosisMinimum {
    double kappa = 0.0;
    double theta = 0.0;
};

/// min over theta of <Q(f_theta)^4>/<Q(f_theta)^2>^2 - 3, f_theta = cos(theta) f + sin(theta) J f.
/// The objective has period pi; theta is reported in [0, pi).
KurtosisMinimum min_excess_kurtosis(const PolyGaussianWigner& w, const PhaseSpaceVector& f);

/// Drifted modes g~_j and scales |e^{xi D} g_j| for an n-photon subtraction.
/// The g_j need not be orthogonal.
std::vector<TildeMode> n_photon_loss_map(std::span<const PhaseSpaceVector> gs, const DecayGenerator& gen,
                                         LossStrength xi);

}  // namespace cvloss
