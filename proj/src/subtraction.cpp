#include "cvloss/subtraction.hpp"

#include "cvloss/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace cvloss {

namespace {

double double_factorial(int n) {
    double r = 1.0;
    for (int k = n; k > 1; k -= 2) r *= k;
    return r;
}

void require_psd(const Mat& m, const char* what) {
    if (m.rows() == 0) return;
    Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if (es.eigenvalues().minCoeff() < -k_psd_tol * scale) {
        std::ostringstream os;
        os << what << " is not positive semidefinite (min eigenvalue " << es.eigenvalues().minCoeff() << ")";
        throw InvalidArgument(os.str());
    }
}

PolyGaussianWigner wigner_from(const GaussianState& base, const Mat& a) {
    Eigen::LDLT<Mat> ldlt(base.covariance());
    const Mat vinv_a = ldlt.solve(a);
    Mat quad = ldlt.solve(vinv_a.transpose()).transpose();
    quad = 0.5 * (quad + quad.transpose());
    return PolyGaussianWigner(base.covariance(), std::move(quad), 2.0 - vinv_a.trace());
}

std::vector<int> complement(int modes, std::span<const int> keep) {
    std::vector<char> kept(modes, 0);
    for (int j : keep) kept[j] = 1;
    std::vector<int> rest;
    for (int j = 0; j < modes; ++j)
        if (!kept[j]) rest.push_back(j);
    return rest;
}

Mat take(const Mat& m, const std::vector<int>& rows, const std::vector<int>& cols) {
    Mat out(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = m(rows[i], cols[j]);
    return out;
}

}  // namespace

PolyGaussianWigner::PolyGaussianWigner(Mat sigma, Mat quadratic, double constant)
    : sigma_(std::move(sigma)), quad_(std::move(quadratic)), c_(constant) {
    if (sigma_.rows() != sigma_.cols() || sigma_.rows() == 0 || sigma_.rows() % 2 != 0)
        throw DimensionMismatch("Gaussian factor covariance must be 2k x 2k");
    if (quad_.rows() != sigma_.rows() || quad_.cols() != sigma_.cols())
        throw DimensionMismatch("quadratic coefficient must match the Gaussian factor");
    require_psd(quad_, "quadratic coefficient");
    Eigen::LLT<Mat> llt(sigma_);
    if (llt.info() != Eigen::Success) throw UnphysicalCovariance("Gaussian factor covariance is singular");
    sigma_inv_ = llt.solve(Mat::Identity(sigma_.rows(), sigma_.cols()));
    const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    const int k = mode_count();
    prefactor_ = std::exp(-k * std::log(2.0 * std::numbers::pi) - 0.5 * log_det);
}

PolyGaussianWigner PolyGaussianWigner::gaussian(const GaussianState& state) {
    return PolyGaussianWigner(state.covariance(), Mat::Zero(state.dim(), state.dim()), 2.0);
}

double PolyGaussianWigner::gaussian_factor(const Vec& beta) const {
    if (beta.size() != dim()) throw DimensionMismatch("phase-space point has wrong dimension");
    return prefactor_ * std::exp(-0.5 * beta.dot(sigma_inv_ * beta));
}

double PolyGaussianWigner::operator()(const Vec& beta) const {
    return 0.5 * (beta.dot(quad_ * beta) + c_) * gaussian_factor(beta);
}

double PolyGaussianWigner::normalization() const { return (quad_ * sigma_).trace() + c_; }

PolyGaussianWigner PolyGaussianWigner::marginal(std::span<const int> keep) const {
    const int m = mode_count();
    if (keep.empty()) throw InvalidArgument("marginal needs at least one kept mode");
    std::vector<int> sorted(keep.begin(), keep.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw InvalidArgument("marginal mode list has duplicates");
    if (sorted.front() < 0 || sorted.back() >= m) throw InvalidArgument("marginal mode index out of range");
    if (static_cast<int>(sorted.size()) == m) return *this;

    const std::vector<int> kidx = quadrature_indices(m, sorted);
    const std::vector<int> rest = complement(m, sorted);
    const std::vector<int> ridx = quadrature_indices(m, rest);

    // beta_R | beta_K ~ N(L beta_K, C), L = S_RK S_KK^-1, C = S_RR - L S_KR.
    const Mat skk = take(sigma_, kidx, kidx);
    const Mat srk = take(sigma_, ridx, kidx);
    const Mat srr = take(sigma_, ridx, ridx);
    Eigen::LLT<Mat> llt(skk);
    const Mat l = llt.solve(srk.transpose()).transpose();
    const Mat cond = srr - l * srk.transpose();

    const Mat mkk = take(quad_, kidx, kidx);
    const Mat mkr = take(quad_, kidx, ridx);
    const Mat mrr = take(quad_, ridx, ridx);
    Mat mk = mkk + mkr * l + l.transpose() * mkr.transpose() + l.transpose() * mrr * l;
    mk = 0.5 * (mk + mk.transpose());
    const double ck = c_ + (mrr * cond).trace();
    return PolyGaussianWigner(skk, std::move(mk), ck);
}

Mat a_matrix(const GaussianState& state, const PhaseSpaceVector& g) {
    require_mode(g, "subtraction mode");
    if (g.dim() != state.dim()) throw DimensionMismatch("mode and state dimensions differ");
    const Mat excess = state.covariance() - Mat::Identity(state.dim(), state.dim());
    const Mat p = mode_projector(g);
    const double denom = (excess * p).trace();
    if (!(denom > k_vacuum_subtraction_eps)) {
        std::ostringstream os;
        os << "photon subtraction from a mode in vacuum (tr[(V-1)P] = " << denom << ")";
        throw VacuumSubtraction(os.str());
    }
    Mat a = 2.0 * excess * p * excess / denom;
    return 0.5 * (a + a.transpose());
}

SubtractedState subtract(const GaussianState& state, const PhaseSpaceVector& g) {
    Mat a = a_matrix(state, g);
    PolyGaussianWigner w = wigner_from(state, a);
    return {state, g, std::move(a), std::move(w), g, Mat::Identity(state.dim(), state.dim())};
}

SubtractedState subtract_then_lose(const GaussianState& state, const PhaseSpaceVector& g, const DecayGenerator& gen,
                                   LossStrength xi) {
    const Mat a_g = a_matrix(state, g);
    const Mat e = decay_matrix(gen, xi, DecaySign::minus);
    GaussianState base = apply_to_covariance(state, gen, xi);
    Mat a = e * a_g * e;
    a = 0.5 * (a + a.transpose());
    PolyGaussianWigner w = wigner_from(base, a);
    TildeMode tilde = tilde_mode(g, gen, xi);
    Mat lift = xi.is_infinite() ? Mat(Mat::Zero(state.dim(), state.dim())) : decay_matrix(gen, xi, DecaySign::plus);
    return {std::move(base), std::move(tilde.mode), std::move(a), std::move(w), g, std::move(lift)};
}

SubtractedState lose_then_subtract(const GaussianState& state, const DecayGenerator& gen, LossStrength xi,
                                   const PhaseSpaceVector& g) {
    return subtract(apply_to_covariance(state, gen, xi), g);
}

double wigner_eval(const SubtractedState& s, const PhaseSpaceVector& beta) { return s.wigner(beta.coords()); }

NegativityWitness negativity_witness(const SubtractedState& s) {
    NegativityWitness w;
    const Mat& v = s.base.covariance();
    Eigen::LDLT<Mat> ldlt(v);
    w.lhs = ldlt.solve(s.a).trace();
    w.negative = w.lhs > w.threshold;

    // Lifted form: B = L (P_g + P_Jg) L; W has negative values iff tr(B V^-1) > tr(B).
    const Vec g = s.origin_mode.coords();
    const Vec jg = apply_j(s.origin_mode).coords();
    const Vec lg = s.lift * g;
    const Vec ljg = s.lift * jg;
    w.lifted_lhs = lg.dot(ldlt.solve(lg)) + ljg.dot(ldlt.solve(ljg));
    w.lifted_rhs = lg.squaredNorm() + ljg.squaredNorm();
    w.lifted_negative = w.lifted_lhs > w.lifted_rhs;

    // lhs - 2 = 2 (tr(B V^-1) - tr(B)) / tr(B (V - 1)).
    const double excess = lg.dot(v * lg) + ljg.dot(v * ljg) - w.lifted_rhs;
    if (std::isfinite(excess) && excess > 0.0) {
        const double reconstructed = 2.0 + 2.0 * (w.lifted_lhs - w.lifted_rhs) / excess;
        w.gap = std::abs(reconstructed - w.lhs);
    }
    return w;
}

PolyGaussianWigner marginal(const SubtractedState& s, std::span<const int> keep) { return s.wigner.marginal(keep); }

double quadrature_moment(const PolyGaussianWigner& w, const PhaseSpaceVector& f, int order) {
    if (f.dim() != w.dim()) throw DimensionMismatch("moment direction has wrong dimension");
    if (order < 0) throw InvalidArgument("moment order must be >= 0");
    if (order % 2 != 0) return 0.0;
    const Vec u = w.sigma() * f.coords();
    const double var = f.coords().dot(u);
    const double trace_term = (w.quadratic() * w.sigma()).trace();
    const double gauss = double_factorial(order - 1) * std::pow(var, order / 2);
    double with_quadratic = gauss * trace_term;
    if (order >= 2) {
        with_quadratic += order * (order - 1) * double_factorial(order - 3) * std::pow(var, order / 2 - 1) *
                          u.dot(w.quadratic() * u);
    }
    return 0.5 * (with_quadratic + w.constant() * gauss);
}

KurtosisMinimum min_excess_kurtosis(const PolyGaussianWigner& w, const PhaseSpaceVector& f) {
    require_mode(f, "kurtosis mode");
    if (f.dim() != w.dim()) throw DimensionMismatch("kurtosis mode has wrong dimension");
    const Vec a = f.coords();
    const Vec b = apply_j(f).coords();
    auto objective = [&](double theta) {
        const PhaseSpaceVector ft(Vec(std::cos(theta) * a + std::sin(theta) * b));
        const double m2 = quadrature_moment(w, ft, 2);
        return quadrature_moment(w, ft, 4) / (m2 * m2) - 3.0;
    };

    constexpr int grid = 360;
    const double step = 2.0 * std::numbers::pi / grid;
    int best = 0;
    double best_val = objective(0.0);
    for (int i = 1; i < grid; ++i) {
        const double v = objective(i * step);
        if (v < best_val) {
            best_val = v;
            best = i;
        }
    }

    double lo = (best - 1) * step;
    double hi = (best + 1) * step;
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = objective(x1);
    double f2 = objective(x2);
    while (hi - lo > 1e-6) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = objective(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = objective(x2);
        }
    }
    double theta = 0.5 * (lo + hi);
    double kappa = objective(theta);
    if (best_val < kappa) {
        theta = best * step;
        kappa = best_val;
    }
    theta = std::fmod(theta, std::numbers::pi);
    if (theta < 0.0) theta += std::numbers::pi;
    return {kappa, theta};
}

std::vector<TildeMode> n_photon_loss_map(std::span<const PhaseSpaceVector> gs, const DecayGenerator& gen,
                                         LossStrength xi) {
    std::vector<TildeMode> out;
    out.reserve(gs.size());
    for (const auto& g : gs) out.push_back(tilde_mode(g, gen, xi));
    return out;
}

}  // namespace cvloss
