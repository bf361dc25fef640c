#pragma once

// Gaussian Markovian loss channel generated by Lindblad operators
// l_j = sqrt(gamma_j) a(h_j). Its phase-space generator is
//
//     D = sum_j (gamma_j / 2) (P_{h_j} + P_{J h_j}),
//
// and the channel of strength xi damps quadratures by exp(-xi D).

#include "cvloss/phase_space.hpp"

#include <vector>

namespace cvloss {

inline constexpr double k_loss_orthogonality_tol = 1e-10;
inline constexpr double k_eigenvector_tol = 1e-10;

struct LossMode {
    PhaseSpaceVector mode;
    double rate = 0.0;  ///< gamma_j >= 0, multiplies xi
};

/// A set of mutually orthogonal loss modes: (h_j, h_k) = (h_j, J h_k) = 0 for j != k.
class LossChannel {
public:
    LossChannel(int modes, std::vector<LossMode> entries);

    /// gamma on every x-axis mode, i.e. D = gamma/2 * identity.
    static LossChannel uniform(int modes, double rate);
    static LossChannel single(const PhaseSpaceVector& mode, double rate);

    int mode_count() const { return modes_; }
    const std::vector<LossMode>& entries() const { return entries_; }

private:
    int modes_;
    std::vector<LossMode> entries_;
};

/// Overall loss strength xi in [0, inf]. Not a time.
class LossStrength {
public:
    explicit LossStrength(double xi);
    double value() const { return xi_; }
    bool is_infinite() const;

private:
    double xi_;
};

enum class DecaySign { minus, plus };

/// D together with its spectral decomposition, which is known from the loss modes.
class DecayGenerator {
public:
    struct Block {
        double eigenvalue;  ///< gamma_j / 2, or 0 for the undamped complement
        Mat projector;
    };

    int mode_count() const { return static_cast<int>(d_.rows() / 2); }
    const Mat& matrix() const { return d_; }
    const std::vector<Block>& spectrum() const { return blocks_; }

    /// sum_k exp(s * lambda_k) Pi_k; s may be +-inf only where the result stays finite.
    Mat exponential(double s) const;

private:
    friend DecayGenerator build_decay_generator(const LossChannel& channel);
    DecayGenerator(Mat d, std::vector<Block> blocks) : d_(std::move(d)), blocks_(std::move(blocks)) {}

    Mat d_;
    std::vector<Block> blocks_;
};

DecayGenerator build_decay_generator(const LossChannel& channel);

/// exp(-xi D) for DecaySign::minus, exp(+xi D) for DecaySign::plus.
Mat decay_matrix(const DecayGenerator& gen, LossStrength xi, DecaySign sign);

/// V -> e^{-xi D} V e^{-xi D} + (1 - e^{-2 xi D}).
GaussianState apply_to_covariance(const GaussianState& state, const DecayGenerator& gen, LossStrength xi);

/// Heisenberg action on a quadrature: Q(f) -> Q(e^{-xi D} f). Not renormalized.
PhaseSpaceVector propagate_quadrature(const PhaseSpaceVector& f, const DecayGenerator& gen, LossStrength xi);

struct TildeMode {
    PhaseSpaceVector mode;  ///< e^{xi D} g / |e^{xi D} g|
    double scale = 1.0;     ///< |e^{xi D} g| >= 1
};

/// Drifted subtraction mode. Evaluated in a rescaled form so that large xi
/// (including xi = inf) stays finite in direction.
TildeMode tilde_mode(const PhaseSpaceVector& g, const DecayGenerator& gen, LossStrength xi);

/// True iff g is an eigenvector of D, in which case loss and subtraction in g commute.
bool commutes_with_subtraction(const PhaseSpaceVector& g, const DecayGenerator& gen);

struct Transmittance {
    PhaseSpaceVector mode;
    double rate = 0.0;
    double amplitude = 1.0;  ///< t_j = exp(-xi gamma_j / 2)
    double energy() const { return amplitude * amplitude; }
};

/// Beamsplitter picture of the channel: one beamsplitter per loss mode.
std::vector<Transmittance> beamsplitter_transmittances(const LossChannel& channel, LossStrength xi);

}  // namespace cvloss
