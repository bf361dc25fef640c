#include "cvloss/fock_oracle.hpp"

#include "cvloss/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace cvloss::fock {

namespace {

using cd = std::complex<double>;
constexpr cd k_i{0.0, 1.0};

void check_modes(int modes) {
    if (modes < 1 || modes > k_max_modes) throw InvalidArgument("the Fock oracle supports 1 to 3 modes");
}

void check_ceiling(int modes, int cutoff) {
    check_modes(modes);
    if (cutoff < 0 || cutoff > max_cutoff(modes)) {
        std::ostringstream os;
        os << "cutoff " << cutoff << " outside [0, " << max_cutoff(modes) << "] for " << modes << " modes";
        throw InvalidArgument(os.str());
    }
}

double top_shell_population(const FockSpace& space, const CVec& psi) {
    const int n = space.cutoff();
    return psi.segment(space.shell_begin(n), space.shell_size(n)).squaredNorm();
}

double shells_from(const FockSpace& space, const CVec& psi, int from) {
    if (from > space.cutoff()) return 0.0;
    const int b = space.shell_begin(from);
    return psi.segment(b, space.dim() - b).squaredNorm();
}

double one_norm(const SpCMat& g) {
    double best = 0.0;
    for (int k = 0; k < g.outerSize(); ++k) {
        double col = 0.0;
        for (SpCMat::InnerIterator it(g, k); it; ++it) col += std::abs(it.value());
        best = std::max(best, col);
    }
    return best;
}

// exp(G) v by scaled Taylor series; G is applied through sparse products only.
void expv(const SpCMat& g, CVec& v) {
    const double norm = one_norm(g);
    const int steps = std::max(1, static_cast<int>(std::ceil(norm / 2.0)));
    const cd scale = 1.0 / static_cast<double>(steps);
    for (int s = 0; s < steps; ++s) {
        CVec term = v;
        CVec acc = v;
        for (int k = 1; k < 200; ++k) {
            term = (g * term) * (scale / static_cast<double>(k));
            acc += term;
            if (term.norm() <= 1e-17 * acc.norm()) break;
        }
        v = std::move(acc);
    }
}

// Matrix log of a unitary through its (numerically diagonal) Schur form.
CMat unitary_log(const CMat& u) {
    Eigen::ComplexSchur<CMat> schur(u);
    const CMat& t = schur.matrixT();
    CMat d = CMat::Zero(u.rows(), u.cols());
    for (Eigen::Index i = 0; i < u.rows(); ++i) d(i, i) = cd(0.0, std::arg(t(i, i)));
    CMat x = schur.matrixU() * d * schur.matrixU().adjoint();
    return 0.5 * (x - x.adjoint());
}

void require_unitary(const CMat& u, int modes) {
    if (u.rows() != modes || u.cols() != modes) throw DimensionMismatch("mode unitary has wrong size");
    if ((u.adjoint() * u - CMat::Identity(modes, modes)).cwiseAbs().maxCoeff() > k_basis_change_tol)
        throw InvalidArgument("mode transformation is not unitary");
}

// Blocks of U on each shell, for U a†(c) U† = a†(u c).
std::vector<CMat> shell_unitaries(const FockSpace& space, const CMat& u) {
    require_unitary(u, space.modes());
    const CMat x = unitary_log(u);
    SpCMat gen(space.dim(), space.dim());
    for (int l = 0; l < space.modes(); ++l) {
        const SpCMat up = space.raising(l);
        for (int k = 0; k < space.modes(); ++k) {
            if (x(l, k) == cd(0.0)) continue;
            gen += x(l, k) * (up * space.lowering(k));
        }
    }
    std::vector<CMat> blocks;
    blocks.reserve(space.cutoff() + 1);
    for (int n = 0; n <= space.cutoff(); ++n) {
        const int b = space.shell_begin(n);
        const int d = space.shell_size(n);
        CMat h = CMat::Zero(d, d);
        for (int k = b; k < b + d; ++k)
            for (SpCMat::InnerIterator it(gen, k); it; ++it) h(it.row() - b, k - b) = it.value();
        // exp(h) with h anti-Hermitian: diagonalize the Hermitian i h.
        CMat herm = k_i * h;
        herm = 0.5 * (herm + herm.adjoint());
        Eigen::SelfAdjointEigenSolver<CMat> es(herm);
        CVec phases(d);
        for (int i = 0; i < d; ++i) phases[i] = std::exp(-k_i * es.eigenvalues()[i]);
        blocks.push_back(es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint());
    }
    return blocks;
}

CMat rotate(const FockSpace& space, const CMat& rho, const std::vector<CMat>& blocks) {
    CMat out(rho.rows(), rho.cols());
    const int shells = space.cutoff() + 1;
    for (int a = 0; a < shells; ++a) {
        const int ba = space.shell_begin(a);
        const int da = space.shell_size(a);
        for (int b = 0; b < shells; ++b) {
            const int bb = space.shell_begin(b);
            const int db = space.shell_size(b);
            out.block(ba, bb, da, db).noalias() = blocks[a] * rho.block(ba, bb, da, db) * blocks[b].adjoint();
        }
    }
    return out;
}

void rotate_vector(const FockSpace& space, CVec& psi, const std::vector<CMat>& blocks) {
    for (int n = 0; n <= space.cutoff(); ++n) {
        const int b = space.shell_begin(n);
        const int d = space.shell_size(n);
        psi.segment(b, d) = blocks[n] * psi.segment(b, d);
    }
}

// Pure loss with amplitude transmittance t on an axis mode:
// rho' = sum_k ((1 - t^2)^k / k!) t^n a^k rho a†^k t^n. The k-th term lives on
// shells <= N - k, so each iteration works on a shrinking corner.
CMat axis_loss(const FockSpace& space, const CMat& rho, int mode, double t) {
    if (t == 1.0) return rho;
    const int dim = space.dim();
    const int cutoff = space.cutoff();
    const double r2 = 1.0 - t * t;

    std::vector<int> up(dim, -1);
    std::vector<double> factor(dim, 0.0);
    std::vector<double> tpow(dim);
    for (int i = 0; i < dim; ++i) {
        FockSpace::Occupation occ = space.occupation(i);
        tpow[i] = std::pow(t, occ[mode]);
        occ[mode] += 1;
        up[i] = space.index(occ);
        factor[i] = std::sqrt(static_cast<double>(occ[mode]));
    }

    CMat acc = rho;
    CMat term = rho;
    CMat next(dim, dim);
    double weight = 1.0;
    for (int k = 1; k <= cutoff && r2 > 0.0; ++k) {
        weight *= r2 / k;
        const int d = space.shell_begin(cutoff - k + 1);
        for (int col = 0; col < d; ++col) {
            const int uc = up[col];
            const double fc = factor[col];
            for (int row = 0; row < d; ++row) next(row, col) = (factor[row] * fc) * term(up[row], uc);
        }
        term.topLeftCorner(d, d) = next.topLeftCorner(d, d);
        acc.topLeftCorner(d, d) += weight * term.topLeftCorner(d, d);
    }
    for (int col = 0; col < dim; ++col)
        for (int row = 0; row < dim; ++row) acc(row, col) *= tpow[row] * tpow[col];
    return acc;
}

// Matrix elements <n| D(gamma) |m> for n, m <= cutoff.
CMat displacement_elements(int cutoff, cd gamma) {
    const int n = cutoff + 1;
    CMat d(n, n);
    d(0, 0) = std::exp(-0.5 * std::norm(gamma));
    for (int m = 1; m < n; ++m) d(0, m) = d(0, m - 1) * (-std::conj(gamma)) / std::sqrt(static_cast<double>(m));
    for (int r = 0; r + 1 < n; ++r) {
        const double inv = 1.0 / std::sqrt(static_cast<double>(r + 1));
        d(r + 1, 0) = gamma * d(r, 0) * inv;
        for (int m = 1; m < n; ++m)
            d(r + 1, m) = (std::sqrt(static_cast<double>(m)) * d(r, m - 1) + gamma * d(r, m)) * inv;
    }
    return d;
}

FockDensityMatrix sandwich(const FockDensityMatrix& state, const SpCMat& op) {
    CMat left = op * state.rho;
    CMat out = (op * left.adjoint()).adjoint();
    out = 0.5 * (out + out.adjoint());
    return {state.space, std::move(out), state.leakage};
}

// Embed rho into a space with a larger cutoff (shared indices coincide).
CMat embed(const FockDensityMatrix& state, const FockSpace& big) {
    CMat out = CMat::Zero(big.dim(), big.dim());
    out.topLeftCorner(state.space.dim(), state.space.dim()) = state.rho;
    return out;
}

cd trace_product(const SpCMat& op, const CMat& b) {
    // tr(op b) = sum_{ij} op_ij b_ji
    cd acc = 0.0;
    for (int k = 0; k < op.outerSize(); ++k)
        for (SpCMat::InnerIterator it(op, k); it; ++it) acc += it.value() * b(k, it.row());
    return acc;
}

Mat passive_check(const Mat& o, int modes) {
    if (o.rows() != 2 * modes || o.cols() != 2 * modes) throw DimensionMismatch("passive step has wrong size");
    if (!is_symplectic_orthogonal(o)) throw InvalidArgument("passive step is not orthogonal symplectic");
    return o;
}

void check_mode_index(int j, int modes) {
    if (j < 0 || j >= modes) throw InvalidArgument("recipe mode index out of range");
}

}  // namespace

int max_cutoff(int modes) {
    switch (modes) {
        case 1: return 200;
        case 2: return 80;
        case 3: return 24;
        default: return 0;
    }
}

FockSpace::FockSpace(int modes, int cutoff) : modes_(modes), cutoff_(cutoff) {
    check_modes(modes);
    if (cutoff < 0) throw InvalidArgument("cutoff must be >= 0");
    int stride = 1;
    for (int j = 0; j < modes; ++j) stride *= cutoff + 1;
    lookup_.assign(stride, -1);
    shell_begin_.push_back(0);
    for (int n = 0; n <= cutoff; ++n) {
        // lexicographic enumeration of occupations with total n
        Occupation occ{0, 0, 0};
        occ[0] = n;
        while (true) {
            int key = 0;
            for (int j = modes - 1; j >= 0; --j) key = key * (cutoff + 1) + occ[j];
            lookup_[key] = static_cast<int>(states_.size());
            states_.push_back(occ);
            // next composition of n into `modes` parts, first part decreasing
            int j = modes - 2;
            while (j >= 0 && occ[j] == 0) --j;
            if (j < 0) break;
            occ[j] -= 1;
            const int rest = occ[modes - 1] + 1;
            occ[modes - 1] = 0;
            occ[j + 1] = rest;
        }
        shell_begin_.push_back(static_cast<int>(states_.size()));
    }
}

int FockSpace::total(int index) const {
    int s = 0;
    for (int j = 0; j < modes_; ++j) s += states_[index][j];
    return s;
}

int FockSpace::index(const Occupation& n) const {
    int key = 0;
    int sum = 0;
    for (int j = modes_ - 1; j >= 0; --j) {
        if (n[j] < 0) return -1;
        sum += n[j];
        key = key * (cutoff_ + 1) + n[j];
    }
    if (sum > cutoff_) return -1;
    return lookup_[key];
}

SpCMat FockSpace::lowering(int mode) const {
    if (mode < 0 || mode >= modes_) throw InvalidArgument("mode index out of range");
    std::vector<Eigen::Triplet<cd>> trip;
    for (int i = 0; i < dim(); ++i) {
        Occupation occ = states_[i];
        const int n = occ[mode];
        if (n == 0) continue;
        occ[mode] = n - 1;
        trip.emplace_back(index(occ), i, std::sqrt(static_cast<double>(n)));
    }
    SpCMat a(dim(), dim());
    a.setFromTriplets(trip.begin(), trip.end());
    return a;
}

SpCMat FockSpace::raising(int mode) const { return SpCMat(lowering(mode).adjoint()); }

SpCMat FockSpace::annihilator(const PhaseSpaceVector& f) const {
    if (f.mode_count() != modes_) throw DimensionMismatch("mode vector and Fock space differ in mode count");
    const CVec c = mode_amplitudes(f);
    SpCMat a(dim(), dim());
    for (int j = 0; j < modes_; ++j)
        if (c[j] != cd(0.0)) a += std::conj(c[j]) * lowering(j);
    return a;
}

SpCMat FockSpace::quadrature(const PhaseSpaceVector& f) const {
    const SpCMat a = annihilator(f);
    return a + SpCMat(a.adjoint());
}

void check_density_matrix(const FockDensityMatrix& s) {
    const CMat& r = s.rho;
    if ((r - r.adjoint()).cwiseAbs().maxCoeff() > 1e-10) throw InvalidArgument("density matrix is not Hermitian");
    if (std::abs(s.trace() - 1.0) > 1e-8) throw InvalidArgument("density matrix trace differs from 1");
    Eigen::SelfAdjointEigenSolver<CMat> es(r, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-8) throw InvalidArgument("density matrix is not positive semidefinite");
}

FockDensityMatrix vacuum(int modes, int cutoff) {
    check_ceiling(modes, cutoff);
    FockSpace space(modes, cutoff);
    CMat rho = CMat::Zero(space.dim(), space.dim());
    rho(0, 0) = 1.0;
    return {std::move(space), std::move(rho), 0.0};
}

FockDensityMatrix fock_state(int cutoff, std::span<const int> occupation) {
    const int modes = static_cast<int>(occupation.size());
    check_ceiling(modes, cutoff);
    FockSpace space(modes, cutoff);
    FockSpace::Occupation occ{0, 0, 0};
    for (int j = 0; j < modes; ++j) occ[j] = occupation[j];
    const int idx = space.index(occ);
    if (idx < 0) throw InvalidArgument("Fock state outside the truncated space");
    CMat rho = CMat::Zero(space.dim(), space.dim());
    rho(idx, idx) = 1.0;
    const double leak = space.total(idx) == cutoff && cutoff > 0 ? 1.0 : 0.0;
    return {std::move(space), std::move(rho), leak};
}

FockDensityMatrix coherent_state(int cutoff, const PhaseSpaceVector& beta) {
    const int modes = beta.mode_count();
    check_ceiling(modes, cutoff);
    FockSpace space(modes, cutoff);
    const CVec alpha = 0.5 * mode_amplitudes(beta);
    CVec psi(space.dim());
    double norm_factor = 0.0;
    for (int j = 0; j < modes; ++j) norm_factor += std::norm(alpha[j]);
    for (int i = 0; i < space.dim(); ++i) {
        cd amp = std::exp(-0.5 * norm_factor);
        for (int j = 0; j < modes; ++j) {
            const int n = space.occupation(i)[j];
            for (int k = 1; k <= n; ++k) amp *= alpha[j] / std::sqrt(static_cast<double>(k));
        }
        psi[i] = amp;
    }
    const double kept = psi.squaredNorm();
    const double leak = std::max(1.0 - kept, top_shell_population(space, psi) / kept);
    psi /= std::sqrt(kept);
    CMat rho = psi * psi.adjoint();
    return {std::move(space), std::move(rho), leak};
}

GaussianState recipe_covariance(int modes, const Recipe& recipe) {
    check_modes(modes);
    Mat v = Mat::Identity(2 * modes, 2 * modes);
    for (const Step& step : recipe) {
        Mat s = Mat::Identity(2 * modes, 2 * modes);
        if (const auto* sq = std::get_if<Squeeze>(&step)) {
            check_mode_index(sq->mode, modes);
            if (!(sq->factor > 0.0)) throw InvalidArgument("squeezing factor must be > 0");
            s(sq->mode, sq->mode) = std::sqrt(sq->factor);
            s(modes + sq->mode, modes + sq->mode) = 1.0 / std::sqrt(sq->factor);
        } else if (const auto* cz = std::get_if<ControlledZ>(&step)) {
            check_mode_index(cz->first, modes);
            check_mode_index(cz->second, modes);
            if (cz->first == cz->second) throw InvalidArgument("controlled-Z needs two distinct modes");
            s(modes + cz->first, cz->second) = 1.0;
            s(modes + cz->second, cz->first) = 1.0;
        } else if (const auto* th = std::get_if<Thermal>(&step)) {
            check_mode_index(th->mode, modes);
            if (!(th->n >= 1.0)) throw InvalidArgument("thermal variance must be >= 1");
            s(th->mode, th->mode) = std::sqrt(th->n);
            s(modes + th->mode, modes + th->mode) = std::sqrt(th->n);
        } else {
            s = passive_check(std::get<Passive>(step).o, modes);
        }
        v = s * v * s.transpose();
    }
    return validate_covariance(v);
}

FockDensityMatrix build_state(int modes, const Recipe& recipe, int cutoff, const BuildOptions& options) {
    check_ceiling(modes, cutoff);
    const int pad = options.padding >= 0 ? options.padding : std::max(10, cutoff / 2);
    const FockSpace work(modes, cutoff + pad);
    const FockSpace space(modes, cutoff);

    // Thermal steps define the initial diagonal mixture.
    std::vector<double> nbar(modes, 0.0);
    std::vector<char> seen(modes, 0);
    std::size_t first_unitary = 0;
    for (; first_unitary < recipe.size(); ++first_unitary) {
        const auto* th = std::get_if<Thermal>(&recipe[first_unitary]);
        if (!th) break;
        check_mode_index(th->mode, modes);
        if (!(th->n >= 1.0)) throw InvalidArgument("thermal variance must be >= 1");
        if (seen[th->mode]) throw InvalidArgument("thermal noise set twice on one mode");
        seen[th->mode] = 1;
        nbar[th->mode] = 0.5 * (th->n - 1.0);
    }
    for (std::size_t k = first_unitary; k < recipe.size(); ++k)
        if (std::holds_alternative<Thermal>(recipe[k]))
            throw InvalidArgument("thermal steps must precede unitary steps");
    recipe_covariance(modes, recipe);

    struct Member {
        double weight;
        CVec psi;
    };
    std::vector<Member> ensemble;
    double kept_weight = 0.0;
    for (int i = 0; i < work.dim(); ++i) {
        double w = 1.0;
        for (int j = 0; j < modes; ++j) {
            const double nu = nbar[j] / (nbar[j] + 1.0);
            const int k = work.occupation(i)[j];
            w *= (1.0 - nu) * (k == 0 ? 1.0 : std::pow(nu, k));
        }
        if (w < 1e-14) continue;
        CVec psi = CVec::Zero(work.dim());
        psi[i] = 1.0;
        ensemble.push_back({w, std::move(psi)});
        kept_weight += w;
    }

    double leakage = 1.0 - kept_weight;
    for (std::size_t k = first_unitary; k < recipe.size(); ++k) {
        const Step& step = recipe[k];
        if (const auto* p = std::get_if<Passive>(&step)) {
            const auto blocks = shell_unitaries(work, unitary_from_passive(passive_check(p->o, modes)));
            for (auto& mem : ensemble) rotate_vector(work, mem.psi, blocks);
            continue;
        }
        SpCMat gen;
        if (const auto* sq = std::get_if<Squeeze>(&step)) {
            const double r = -0.5 * std::log(sq->factor);
            const SpCMat a = work.lowering(sq->mode);
            const SpCMat a2 = a * a;
            gen = (0.5 * r) * (a2 - SpCMat(a2.adjoint()));
        } else {
            const auto& cz = std::get<ControlledZ>(step);
            const SpCMat xi = work.quadrature(PhaseSpaceVector::x_axis(modes, cz.first));
            const SpCMat xj = work.quadrature(PhaseSpaceVector::x_axis(modes, cz.second));
            gen = (0.25 * k_i) * (SpCMat(xi * xj) + SpCMat(xj * xi));
        }
        gen.makeCompressed();
        double edge = 0.0;
        for (auto& mem : ensemble) {
            expv(gen, mem.psi);
            edge += mem.weight * top_shell_population(work, mem.psi);
        }
        leakage = std::max(leakage, edge / kept_weight);
    }

    CMat rho = CMat::Zero(space.dim(), space.dim());
    double beyond = 0.0;
    double top = 0.0;
    for (const auto& mem : ensemble) {
        const CVec head = mem.psi.head(space.dim());
        rho.noalias() += mem.weight * (head * head.adjoint());
        beyond += mem.weight * shells_from(work, mem.psi, cutoff + 1);
        top += mem.weight * top_shell_population(space, head);
    }
    const double tr = rho.trace().real();
    rho /= tr;
    rho = 0.5 * (rho + rho.adjoint());
    leakage = std::max({leakage, beyond / kept_weight, top / tr});

    FockDensityMatrix out{space, std::move(rho), leakage};
    if (!out.reliable() && !options.allow_unreliable) {
        std::ostringstream os;
        os << "truncation leakage " << leakage << " exceeds " << k_leakage_threshold << " at cutoff " << cutoff;
        throw TruncationLeakage(os.str());
    }
    return out;
}

FockDensityMatrix apply_annihilator(const FockDensityMatrix& state, const PhaseSpaceVector& alpha) {
    return sandwich(state, state.space.annihilator(alpha));
}

FockDensityMatrix annihilate(const FockDensityMatrix& state, const PhaseSpaceVector& g) {
    require_mode(g, "subtraction mode");
    FockDensityMatrix out = apply_annihilator(state, g);
    const double tr = out.trace();
    if (!(tr > 1e-12)) {
        std::ostringstream os;
        os << "photon subtraction has probability " << tr;
        throw VacuumSubtraction(os.str());
    }
    out.rho /= tr;
    return out;
}

FockDensityMatrix apply_passive(const FockDensityMatrix& state, const CMat& u) {
    const auto blocks = shell_unitaries(state.space, u);
    CMat rho = rotate(state.space, state.rho, blocks);
    return {state.space, std::move(rho), state.leakage};
}

FockDensityMatrix kraus_loss(const FockDensityMatrix& state, const LossChannel& channel, LossStrength xi) {
    const int m = state.space.modes();
    if (channel.mode_count() != m) throw DimensionMismatch("channel and state differ in mode count");
    if (xi.value() == 0.0) return state;
    const auto transmit = beamsplitter_transmittances(channel, xi);
    std::vector<std::pair<int, double>> lossy;

    // Rows conj(c(h_j)) send each loss mode onto axis mode j; complete to a unitary.
    CMat u = CMat::Zero(m, m);
    int filled = 0;
    for (const auto& t : transmit) {
        if (t.amplitude == 1.0) continue;
        u.row(filled) = mode_amplitudes(t.mode).conjugate().transpose();
        lossy.emplace_back(filled, t.amplitude);
        ++filled;
    }
    if (lossy.empty()) return state;
    for (int e = 0; e < m && filled < m; ++e) {
        CVec v = CVec::Zero(m);
        v[e] = 1.0;
        for (int pass = 0; pass < 2; ++pass) {
            for (int r = 0; r < filled; ++r) {
                const CVec c = u.row(r).adjoint();
                v -= c * c.dot(v);
            }
        }
        if (v.norm() < 1e-6) continue;
        u.row(filled++) = (v / v.norm()).adjoint();
    }
    const bool axis_aligned = (u - CMat::Identity(m, m)).cwiseAbs().maxCoeff() <= 1e-15;
    CMat rho = state.rho;
    std::vector<CMat> blocks;
    if (!axis_aligned) {
        blocks = shell_unitaries(state.space, u);
        rho = rotate(state.space, rho, blocks);
    }
    for (const auto& [mode, t] : lossy) rho = axis_loss(state.space, rho, mode, t);
    if (!axis_aligned) {
        for (auto& b : blocks) b.adjointInPlace();
        rho = rotate(state.space, rho, blocks);
    }
    rho = 0.5 * (rho + rho.adjoint());
    return {state.space, std::move(rho), state.leakage};
}

OracleReading wigner_point(const FockDensityMatrix& state, const PhaseSpaceVector& beta) {
    const FockSpace& space = state.space;
    const int m = space.modes();
    if (beta.mode_count() != m) throw DimensionMismatch("phase-space point has wrong dimension");
    const CVec alpha = 0.5 * mode_amplitudes(beta);
    // D(alpha) Parity D(alpha)† = D(2 alpha) Parity.
    std::vector<CMat> x;
    for (int j = 0; j < m; ++j) {
        CMat d = displacement_elements(space.cutoff(), 2.0 * alpha[j]);
        for (int c = 1; c < d.cols(); c += 2) d.col(c) *= -1.0;
        x.push_back(std::move(d));
    }
    cd acc = 0.0;
    for (int col = 0; col < space.dim(); ++col) {
        const auto& oc = space.occupation(col);
        for (int row = 0; row < space.dim(); ++row) {
            const cd r = state.rho(row, col);
            if (r == cd(0.0)) continue;
            const auto& orow = space.occupation(row);
            cd f = r;
            for (int j = 0; j < m; ++j) f *= x[j](oc[j], orow[j]);
            acc += f;
        }
    }
    const double norm = std::pow(2.0 * std::numbers::pi, -m);
    return {acc.real() * norm, state.reliable()};
}

Mat covariance(const FockDensityMatrix& state) {
    const int m = state.space.modes();
    const FockSpace big(m, state.space.cutoff() + 2);
    const CMat rho = embed(state, big);
    std::vector<SpCMat> r;
    for (int j = 0; j < m; ++j) r.push_back(big.quadrature(PhaseSpaceVector::x_axis(m, j)));
    for (int j = 0; j < m; ++j) r.push_back(big.quadrature(PhaseSpaceVector::p_axis(m, j)));
    Mat v(2 * m, 2 * m);
    for (int l = 0; l < 2 * m; ++l) {
        const CMat b = r[l] * rho;
        for (int k = 0; k < 2 * m; ++k) v(k, l) = trace_product(r[k], b).real();
    }
    return 0.5 * (v + v.transpose());
}

double quadrature_moment(const FockDensityMatrix& state, const PhaseSpaceVector& f, int order) {
    if (order < 0) throw InvalidArgument("moment order must be >= 0");
    const FockSpace big(state.space.modes(), state.space.cutoff() + order);
    const SpCMat q = big.quadrature(f);
    CMat b = embed(state, big);
    const int half = order / 2;
    for (int k = 0; k < half; ++k) b = q * b;
    SpCMat rest(big.dim(), big.dim());
    rest.setIdentity();
    for (int k = 0; k < order - half; ++k) rest = rest * q;
    return trace_product(rest, b).real();
}

double mean_photon_number(const FockDensityMatrix& state, const PhaseSpaceVector& f) {
    const SpCMat a = state.space.annihilator(f);
    const CMat b = a * state.rho;
    return trace_product(SpCMat(a.adjoint()), b).real();
}

double trace_distance(const FockDensityMatrix& a, const FockDensityMatrix& b) {
    if (a.space.dim() != b.space.dim() || a.space.modes() != b.space.modes())
        throw DimensionMismatch("states live in different spaces");
    CMat diff = a.rho - b.rho;
    diff = 0.5 * (diff + diff.adjoint());
    Eigen::SelfAdjointEigenSolver<CMat> es(diff, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

FockDensityMatrix random_density_matrix(int modes, int cutoff, int support, int rank, std::mt19937_64& rng) {
    check_ceiling(modes, cutoff);
    if (support < 0 || support > cutoff) throw InvalidArgument("support must lie within the cutoff");
    if (rank < 1) throw InvalidArgument("rank must be >= 1");
    FockSpace space(modes, cutoff);
    const int active = space.shell_begin(support + 1);
    std::normal_distribution<double> normal;
    CMat g = CMat::Zero(space.dim(), rank);
    for (int i = 0; i < active; ++i)
        for (int k = 0; k < rank; ++k) g(i, k) = cd(normal(rng), normal(rng));
    CMat rho = g * g.adjoint();
    rho /= rho.trace().real();
    return {std::move(space), std::move(rho), 0.0};
}

double subtraction_loss_identity_deviation(const FockDensityMatrix& state, std::span<const PhaseSpaceVector> gs,
                                           const LossChannel& channel, LossStrength xi) {
    const auto gen = build_decay_generator(channel);
    FockDensityMatrix lhs = state;
    for (const auto& g : gs) lhs = apply_annihilator(lhs, g);
    lhs = kraus_loss(lhs, channel, xi);

    FockDensityMatrix rhs = kraus_loss(state, channel, xi);
    const Mat lift = decay_matrix(gen, xi, DecaySign::plus);
    for (const auto& g : gs) rhs = apply_annihilator(rhs, lift * g);
    return (lhs.rho - rhs.rho).cwiseAbs().maxCoeff();
}

}  // namespace cvloss::fock
