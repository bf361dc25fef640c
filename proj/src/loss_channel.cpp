#include "cvloss/loss_channel.hpp"

#include "cvloss/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace cvloss {

namespace {

// exp(s * lambda) with the conventions 0 * inf = 0 for the undamped block.
double block_factor(double s, double lambda) {
    if (lambda == 0.0) return 1.0;
    return std::exp(s * lambda);
}

}  // namespace

LossChannel::LossChannel(int modes, std::vector<LossMode> entries) : modes_(modes), entries_(std::move(entries)) {
    if (modes_ <= 0) throw InvalidArgument("loss channel needs at least one mode");
    for (const auto& e : entries_) {
        if (e.mode.mode_count() != modes_) throw DimensionMismatch("loss mode has wrong dimension");
        require_mode(e.mode, "loss mode");
        if (!(e.rate >= 0.0) || !std::isfinite(e.rate)) throw InvalidArgument("loss rates must be finite and >= 0");
    }
    for (std::size_t a = 0; a < entries_.size(); ++a) {
        const PhaseSpaceVector ja = apply_j(entries_[a].mode);
        for (std::size_t b = a + 1; b < entries_.size(); ++b) {
            const double overlap = std::abs(entries_[a].mode.dot(entries_[b].mode));
            const double twisted = std::abs(ja.dot(entries_[b].mode));
            if (overlap > k_loss_orthogonality_tol || twisted > k_loss_orthogonality_tol) {
                std::ostringstream os;
                os << "loss modes " << a << " and " << b << " are not orthogonal (overlap " << overlap
                   << ", symplectic overlap " << twisted << ")";
                throw NonOrthogonalLossModes(os.str());
            }
        }
    }
}

LossChannel LossChannel::uniform(int modes, double rate) {
    std::vector<LossMode> entries;
    for (int j = 0; j < modes; ++j) entries.push_back({PhaseSpaceVector::x_axis(modes, j), rate});
    return LossChannel(modes, std::move(entries));
}

LossChannel LossChannel::single(const PhaseSpaceVector& mode, double rate) {
    return LossChannel(mode.mode_count(), {LossMode{mode, rate}});
}

LossStrength::LossStrength(double xi) : xi_(xi) {
    if (!(xi >= 0.0)) throw InvalidArgument("loss strength must be >= 0");
}

bool LossStrength::is_infinite() const { return std::isinf(xi_); }

Mat DecayGenerator::exponential(double s) const {
    const int n = static_cast<int>(d_.rows());
    Mat out = Mat::Zero(n, n);
    for (const auto& b : blocks_) {
        const double f = block_factor(s, b.eigenvalue);
        if (f == 0.0) continue;
        if (!std::isfinite(f)) throw InvalidArgument("exp(xi D) diverges for infinite xi");
        out += f * b.projector;
    }
    return out;
}

DecayGenerator build_decay_generator(const LossChannel& channel) {
    const int m = channel.mode_count();
    const int n = 2 * m;
    Mat d = Mat::Zero(n, n);
    Mat covered = Mat::Zero(n, n);
    std::vector<DecayGenerator::Block> blocks;
    for (const auto& e : channel.entries()) {
        Mat p = mode_projector(e.mode);
        d += 0.5 * e.rate * p;
        covered += p;
        blocks.push_back({0.5 * e.rate, std::move(p)});
    }
    Mat rest = Mat::Identity(n, n) - covered;
    if (rest.trace() > 0.5) blocks.push_back({0.0, std::move(rest)});
    return DecayGenerator(std::move(d), std::move(blocks));
}

Mat decay_matrix(const DecayGenerator& gen, LossStrength xi, DecaySign sign) {
    if (xi.value() == 0.0) return Mat::Identity(2 * gen.mode_count(), 2 * gen.mode_count());
    const double s = sign == DecaySign::minus ? -xi.value() : xi.value();
    return gen.exponential(s);
}

GaussianState apply_to_covariance(const GaussianState& state, const DecayGenerator& gen, LossStrength xi) {
    if (state.dim() != 2 * gen.mode_count()) throw DimensionMismatch("state and channel dimensions differ");
    const Mat e = decay_matrix(gen, xi, DecaySign::minus);
    const Mat id = Mat::Identity(state.dim(), state.dim());
    return validate_covariance(e * state.covariance() * e + (id - e * e));
}

PhaseSpaceVector propagate_quadrature(const PhaseSpaceVector& f, const DecayGenerator& gen, LossStrength xi) {
    if (f.dim() != 2 * gen.mode_count()) throw DimensionMismatch("vector and channel dimensions differ");
    return decay_matrix(gen, xi, DecaySign::minus) * f;
}

TildeMode tilde_mode(const PhaseSpaceVector& g, const DecayGenerator& gen, LossStrength xi) {
    require_mode(g, "subtraction mode");
    if (g.dim() != 2 * gen.mode_count()) throw DimensionMismatch("mode and channel dimensions differ");
    if (xi.value() == 0.0) return {g, 1.0};

    // e^{xi D} g = e^{xi lambda_ref} sum_k e^{xi (lambda_k - lambda_ref)} Pi_k g,
    // lambda_ref the largest eigenvalue that g overlaps.
    std::vector<Vec> parts;
    double lambda_ref = -std::numeric_limits<double>::infinity();
    for (const auto& b : gen.spectrum()) {
        parts.push_back(b.projector * g.coords());
        if (parts.back().norm() > k_normalization_tol) lambda_ref = std::max(lambda_ref, b.eigenvalue);
    }
    Vec v = Vec::Zero(g.dim());
    const auto& blocks = gen.spectrum();
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        if (parts[k].norm() <= k_normalization_tol) continue;
        const double delta = blocks[k].eigenvalue - lambda_ref;
        double f;
        if (xi.is_infinite()) {
            f = delta == 0.0 ? 1.0 : (delta < 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
        } else {
            f = std::exp(xi.value() * delta);
        }
        if (f == 0.0) continue;
        v += f * parts[k];
    }
    const double rel = v.norm();
    double scale = rel;
    if (lambda_ref > 0.0)
        scale = xi.is_infinite() ? std::numeric_limits<double>::infinity() : rel * std::exp(xi.value() * lambda_ref);
    return {PhaseSpaceVector(Vec(v / rel)), scale};
}

bool commutes_with_subtraction(const PhaseSpaceVector& g, const DecayGenerator& gen) {
    require_mode(g, "subtraction mode");
    const Mat& d = gen.matrix();
    const Vec dg = d * g.coords();
    const Vec residual = dg - g.coords().dot(dg) * g.coords();
    const double norm_d = d.cwiseAbs().maxCoeff();
    return residual.norm() <= k_eigenvector_tol * std::max(1.0, norm_d);
}

std::vector<Transmittance> beamsplitter_transmittances(const LossChannel& channel, LossStrength xi) {
    std::vector<Transmittance> out;
    for (const auto& e : channel.entries()) {
        const double t = e.rate == 0.0 ? 1.0 : std::exp(-0.5 * xi.value() * e.rate);
        out.push_back({e.mode, e.rate, t});
    }
    return out;
}

}  // namespace cvloss
