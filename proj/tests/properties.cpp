#include "properties.hpp"

#include "support.hpp"

#include "cvloss/errors.hpp"
#include "cvloss/graph_states.hpp"
#include "cvloss/loss_channel.hpp"
#include "cvloss/subtraction.hpp"

#include <Eigen/Cholesky>

#include <sstream>

namespace cvloss::testing {

namespace {

class Tally {
public:
    explicit Tally(std::string name) { r_.name = std::move(name); }

    /// Records one instance whose deviation must stay below `tol`.
    void below(double deviation, double tol, int instance) {
        ++r_.instances;
        r_.worst = std::max(r_.worst, deviation);
        if (!(deviation < tol)) fail(instance, deviation);
    }

    /// Records one instance checked by a boolean condition; `margin` is reported as the worst value.
    void holds(bool ok, double margin, int instance) {
        ++r_.instances;
        r_.worst = std::max(r_.worst, margin);
        if (!ok) fail(instance, margin);
    }

    PropertyResult result() const { return r_; }

private:
    void fail(int instance, double value) {
        if (r_.failures++ == 0) {
            std::ostringstream os;
            os << "instance " << instance << ": value " << value;
            r_.first_failure = os.str();
        }
    }

    PropertyResult r_;
};

double uniform_xi(Rng& rng) { return uniform(rng, 0.0, 3.0); }

GraphSpec random_graph(Rng& rng, int min_modes, int max_modes) {
    const int m = uniform_int(rng, min_modes, max_modes);
    Mat a = Mat::Zero(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            if (uniform(rng, 0.0, 1.0) < 0.5) a(i, j) = a(j, i) = 1.0;
    std::vector<double> db;
    for (int j = 0; j < m; ++j) db.push_back(uniform(rng, 1.0, 12.0));
    return GraphSpec(a, db);
}

/// A random lossy single-photon-subtracted state in either order.
struct LossyCase {
    GaussianState v;
    PhaseSpaceVector g;
    LossChannel channel;
    double xi;
    bool subtract_first;
};

LossyCase random_case(Rng& rng, int min_modes, int max_modes) {
    const int m = uniform_int(rng, min_modes, max_modes);
    GaussianState v = random_gaussian(m, rng);
    PhaseSpaceVector g = random_mode(m, rng);
    LossChannel ch = random_channel(m, rng);
    return {std::move(v), std::move(g), std::move(ch), uniform_xi(rng), uniform(rng, 0.0, 1.0) < 0.5};
}

SubtractedState realize(const LossyCase& c) {
    const auto gen = build_decay_generator(c.channel);
    return c.subtract_first ? subtract_then_lose(c.v, c.g, gen, LossStrength(c.xi))
                            : lose_then_subtract(c.v, gen, LossStrength(c.xi), c.g);
}

/// Loss modes confined to the listed modes of an m-mode system.
LossChannel channel_on(int m, const std::vector<int>& support, Rng& rng) {
    const int k = static_cast<int>(support.size());
    const CMat u = random_unitary(k, rng);
    std::vector<LossMode> entries;
    for (int j = 0; j < k; ++j) {
        CVec c = CVec::Zero(m);
        for (int i = 0; i < k; ++i) c[support[i]] = u(i, j);
        entries.push_back({from_amplitudes(c), uniform(rng, 0.2, 2.0)});
    }
    return LossChannel(m, std::move(entries));
}

}  // namespace

PropertyResult semigroup_law(std::uint64_t seed, int n) {
    Rng rng(seed);
    Tally t("semigroup law");
    for (int i = 0; i < n; ++i) {
        const int m = uniform_int(rng, 1, 4);
        const GaussianState v = random_gaussian(m, rng);
        const auto gen = build_decay_generator(random_channel(m, rng));
        const double xi = uniform_xi(rng), zeta = uniform_xi(rng);
        const Mat two = apply_to_covariance(apply_to_covariance(v, gen, LossStrength(xi)), gen, LossStrength(zeta))
                            .covariance();
        const Mat one = apply_to_covariance(v, gen, LossStrength(xi + zeta)).covariance();
        t.below(max_abs_diff(two, one), 1e-10, i);
    }
    return t.result();
}

PropertyResult vacuum_fixed_point(std::uint64_t seed, int n) {
    Rng rng(seed);
    Tally t("vacuum fixed point");
    for (int i = 0; i < n; ++i) {
        const int m = uniform_int(rng, 1, 6);
        const auto gen = build_decay_generator(random_channel(m, rng));
        const Mat out = apply_to_covariance(GaussianState::vacuum(m), gen, LossStrength(uniform(rng, 0.0, 10.0)))
                            .covariance();
        t.below(max_abs_diff(out, Mat::Identity(2 * m, 2 * m)), 1e-13, i);
    }
    return t.result();
}

PropertyResult photon_number_monotone(std::uint64_t seed, int n) {
    Rng rng(seed);
    Tally t("photon number non-increasing in xi");
    for (int i = 0; i < n; ++i) {
        const int m = uniform_int(rng, 1, 4);
        const GaussianState v = random_gaussian(m, rng);
        const auto gen = build_decay_generator(random_channel(m, rng));
        // A mode inside one spectral block of D; off-block modes can gain photons from their neighbours.
        const auto& blocks = gen.spectrum();
        const Mat& pi = blocks[uniform_int(rng, 0, static_cast<int>(blocks.size()) - 1)].projector;
        Vec c = pi * random_vector(m, rng).coords();
        while (c.norm() < 1e-3) c = pi * random_vector(m, rng).coords();
        const PhaseSpaceVector f(c / c.norm());
        auto total = [m](const GaussianState& s) {
            double acc = 0.0;
            for (int j = 0; j < m; ++j) acc += mean_photon_number(s, PhaseSpaceVector::x_axis(m, j));
            return acc;
        };
        double prev_f = mean_photon_number(v, f), prev_total = total(v);
        double worst_rise = -INFINITY;
        for (double xi = 0.1; xi <= 4.0 + 1e-12; xi += 0.1) {
            const GaussianState out = apply_to_covariance(v, gen, LossStrength(xi));
            const double now_f = mean_photon_number(out, f), now_total = total(out);
            worst_rise = std::max({worst_rise, now_f - prev_f, now_total - prev_total});
            prev_f = now_f;
            prev_total = now_total;
        }
        t.holds(worst_rise <= 1e-12, worst_rise, i);
    }
    return t.result();
}

PropertyResult vacuum_asymptotics(std::uint64_t seed, int n) {
    Rng rng(seed);
    Tally t("full-rank loss drives the state to the vacuum");
    for (int i = 0; i < n; ++i) {
        const int m = uniform_int(rng, 1, 4);
        const CMat u = random_unitary(m, rng);
        std::vector<LossMode> entries;
        for (int j = 0; j < m; ++j) entries.push_back({from_amplitudes(u.col(j)), uniform(rng, 0.5, 2.0)});
        const auto gen = build_decay_generator(LossChannel(m, std::move(entries)));
        const GaussianState v = random_gaussian(m, rng);
        const Mat out = apply_to_covariance(v, gen, LossStrength(100.0)).covariance();
        t.below(max_abs_diff(out, Mat::Identity(2 * m, 2 * m)), 1e-10, i);
    }
    return t.result();
}

PropertyResult decay_inverse(std::uint64_t seed, int n) {
    Rng rng(seed);
    Tally t("e^{-xi D} e^{xi D} = 1");
    for (int i = 0; i < n; ++i) {
        const int m = uniform_int(rng, 1, 5);
        const auto gen = build_decay_generator(random_channel(m, rng));
        const LossStrength xi(uniform_xi(rng));
        const Mat prod = decay_matrix(gen, xi, DecaySign::minus) * decay_matrix(gen, xi, DecaySign::plus);
        t.below(max_abs_diff(prod, Mat::Identity(2 * m, 2 * m)), 1e-10, i);
    }
    return t.result();
}

PropertyResult equal_rates_keep_mode(std::uint64_t seed, int n) {
    Rng rng(seed);
    Tally t("equal rates leave every subtraction mode fixed");
    for (int i = 0; i < n; ++i) {
        const int m = uniform_int(rng, 1, 5);
        const CMat u = random_unitary(m, rng);
        const double rate = uniform(rng, 0.1, 3.0);
        std::vector<LossMode> entries;
        for (int j = 0; j < m; ++j) entries.push_back({from_amplitudes(u.col(j)), rate});
        const auto gen = build_decay_generator(LossChannel(m, std::move(entries)));
        const PhaseSpaceVector g = random_mode(m, rng);
        const TildeMode tm = tilde_mode(g, gen, LossStrength(uniform_xi(rng)));
        const double dev = max_abs_diff(tm.mode.coords(), g.coords());
        t.below(commutes_with_subtraction(g, gen) ? dev : INFINITY, 1e-12, i);
    }
    return t.result();
}

PropertyResult projector_properties(std::uint64_t seed, int n) {
    Rng rng(seed);
    Tally t("mode projector is a rank-two symmetric idempotent commuting with J");
    for (int i = 0; i < n; ++i) {
        const int m = uniform_int(rng, 1, 6);
        const Mat p = mode_projector(random_mode(m, rng));
        const Mat j = symplectic_form(m);
        const double dev = std::max({max_abs_diff(p, p.transpose()), max_abs_diff(p * p, p), std::abs(p.trace() - 2.0),
                                     max_abs_diff(p * j, j * p)});
        t.below(dev, 1e-12, i);
    }
    return t.result();
}

PropertyResult physicality_basis_independent(std::uint64_t seed, int n) {
    Rng rng(seed);
    Tally t("physicality survives passive basis changes");
    for (int i = 0; i < n; ++i) {
        const int m = uniform_int(rng, 1, 5);
        const GaussianState v = random_gaussian(m, rng);
        const Mat o = passive_from_unitary(random_unitary(m, rng));
        bool ok = true;
        double dev = 0.0;
        try {
            const GaussianState w = validate_covariance(o.transpose() * v.covariance() * o);
            dev = max_abs_diff(symplectic_eigenvalues(w.covariance()), symplectic_eigenvalues(v.covariance()));
        } catch (const UnphysicalCovariance&) {
            ok = false;
        }
        t.holds(ok && dev < 1e-9, dev, i);
    }
    return t.result();
}

PropertyResult commutator_antisymmetric(std::uint64_t seed, int n) {
    Rng rng(seed);
    Tally t("commutator form is antisymmetric");
    for (int i = 0; i < n; ++i) {
        const int m = uniform_int(rng, 1, 6);
        const PhaseSpaceVector f = random_vector(m, rng), g = random_vector(m, rng);
        t.below(std::abs(commutator_form(f, g) + commutator_form(g, f)), 1e-13, i);
    }
    return t.result();
}

PropertyResult wigner_normalization(std::uint64_t seed, int n) {
    Rng rng(seed);
    Tally t("tr(M Sigma) + c = 2 for states and marginals");
    for (int i = 0; i < n; ++i) {
        const LossyCase c = random_case(rng, 1, 4);
        const SubtractedState s = realize(c);
        double dev = std::abs(s.wigner.normalization() - 2.0);
        const int m = c.v.mode_count();
        std::vector<int> keep;
        for (int j = 0; j < m; ++j)
            if (uniform(rng, 0.0, 1.0) < 0.5) keep.push_back(j);
        if (keep.empty()) keep.push_back(uniform_int(rng, 0, m - 1));
        dev = std::max(dev, std::abs(marginal(s, keep).normalization() - 2.0));
        t.below(dev, 1e-10, i);
    }
    return t.result();
}

PropertyResult witness_forms_agree(std::uint64_t seed, int n) {
    Rng rng(seed);
    Tally t("trace and lifted witness forms agree");
    for (int i = 0; i < n; ++i) {
        const LossyCase c = random_case(rng, 1, 4);
        const NegativityWitness w = negativity_witness(realize(c));
        const bool same_verdict = w.negative == w.lifted_negative || std::abs(w.lhs - 2.0) < 1e-9;
        t.below(same_verdict ? w.gap : INFINITY, 1e-9, i);
    }
    return t.result();
}

PropertyResult a_matrix_rank_psd(std::uint64_t seed, int n) {
    Rng rng(seed);
    Tally t("A has rank at most two and is positive semidefinite");
    for (int i = 0; i < n; ++i) {
        const LossyCase c = random_case(rng, 1, 5);
        const Mat a = realize(c).a;
        const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
        const bool ok = rank_of(a) <= 2 && min_eigenvalue(a) > -1e-12 * scale && max_abs_diff(a, a.transpose()) < 1e-12;
        t.holds(ok, rank_of(a), i);
    }
    return t.result();
}

PropertyResult marginal_matches_quadrature(std::uint64_t seed, int n) {
    Rng rng(seed);
    Tally t("single-mode marginal matches Gauss-Legendre integration");
    for (int i = 0; i < n; ++i) {
        const LossyCase c = random_case(rng, 2, 2);
        const SubtractedState s = realize(c);
        const int kept = i % 2;
        const int dropped = 1 - kept;
        const int keep[] = {kept};
        const PolyGaussianWigner marg = marginal(s, keep);
        // Integrate over the dropped plane in coordinates whitened by its covariance block.
        Mat block(2, 2);
        const Mat& sig = s.base.covariance();
        block << sig(dropped, dropped), sig(dropped, dropped + 2), sig(dropped + 2, dropped), sig(dropped + 2, dropped + 2);
        const Mat l = Eigen::LLT<Mat>(block).matrixL();
        const double jac = l.determinant();
        double dev = 0.0;
        for (int k = 0; k < 2; ++k) {
            const double bx = uniform(rng, -1.5, 1.5), bp = uniform(rng, -1.5, 1.5);
            const auto f = [&](double u1, double u2) {
                const double y1 = l(0, 0) * u1;
                const double y2 = l(1, 0) * u1 + l(1, 1) * u2;
                Vec b(4);
                b[kept] = bx;
                b[kept + 2] = bp;
                b[dropped] = y1;
                b[dropped + 2] = y2;
                return s.wigner(b) * jac;
            };
            const double numeric = integrate_plane(f, 11.0, 11, 12);
            Vec bk(2);
            bk << bx, bp;
            dev = std::max(dev, std::abs(numeric - marg(bk)));
        }
        t.below(dev, 1e-6, i);
    }
    return t.result();
}

PropertyResult gaussian_kurtosis_zero(std::uint64_t seed, int n) {
    Rng rng(seed);
    Tally t("Gaussian states have zero minimal excess kurtosis");
    for (int i = 0; i < n; ++i) {
        const int m = uniform_int(rng, 1, 4);
        const auto w = PolyGaussianWigner::gaussian(random_gaussian(m, rng));
        t.below(std::abs(min_excess_kurtosis(w, random_mode(m, rng)).kappa), 1e-12, i);
    }
    return t.result();
}

PropertyResult subtraction_vertex_kurtosis_negative(std::uint64_t seed, int n) {
    Rng rng(seed);
    Tally t("lossless subtraction vertex has negative minimal excess kurtosis");
    for (int i = 0; i < n; ++i) {
        const GraphSpec spec = random_graph(rng, 1, 5);
        const int k = uniform_int(rng, 0, spec.vertex_count() - 1);
        const auto s = subtract(graph_cov(spec), PhaseSpaceVector::x_axis(spec.vertex_count(), k));
        const int keep[] = {k};
        const double kappa = min_excess_kurtosis(marginal(s, keep), PhaseSpaceVector::x_axis(1, 0)).kappa;
        t.holds(kappa < 0.0, kappa, i);
    }
    return t.result();
}

PropertyResult grid_negativity_matches_witness(std::uint64_t seed, int n) {
    Rng rng(seed);
    Tally t("grid negativity agrees with the witness");
    for (int i = 0; i < n; ++i) {
        const LossyCase c = random_case(rng, 1, 2);
        const SubtractedState s = realize(c);
        const NegativityWitness w = negativity_witness(s);
        const int m = c.v.mode_count();
        // Radius 6, step 0.05. Two-mode states are scanned on the (x1, p1) and (x1, x2) planes
        // through the origin.
        const int planes = m == 1 ? 1 : 2;
        double lowest = INFINITY;
        Vec b = Vec::Zero(2 * m);
        for (int plane = 0; plane < planes; ++plane) {
            const int a0 = 0;
            const int a1 = m == 1 ? 1 : (plane == 0 ? 2 : 1);
            for (int ix = -120; ix <= 120; ++ix) {
                for (int ip = -120; ip <= 120; ++ip) {
                    b.setZero();
                    b[a0] = 0.05 * ix;
                    b[a1] = 0.05 * ip;
                    lowest = std::min(lowest, s.wigner(b));
                }
            }
        }
        t.holds((lowest < 0.0) == w.negative, std::abs(w.lhs - 2.0), i);
    }
    return t.result();
}

PropertyResult commutation_dichotomy(std::uint64_t seed, int n) {
    Rng rng(seed);
    Tally t("orders agree exactly when g is an eigenvector of D");
    for (int i = 0; i < n; ++i) {
        const int m = uniform_int(rng, 2, 4);
        const CMat u = random_unitary(m, rng);
        std::vector<LossMode> entries;
        for (int j = 0; j < m; ++j) entries.push_back({from_amplitudes(u.col(j)), 0.3 + 0.6 * j});
        const LossChannel ch(m, std::move(entries));
        const auto gen = build_decay_generator(ch);
        const GaussianState v = random_gaussian(m, rng);
        PhaseSpaceVector g;
        switch (i % 3) {
            case 0: g = ch.entries()[uniform_int(rng, 0, m - 1)].mode; break;
            case 1: g = apply_j(ch.entries()[0].mode); break;
            default: {
                const double a = uniform(rng, 0.3, 1.2);
                g = (ch.entries()[0].mode * std::cos(a) + ch.entries()[1].mode * std::sin(a)).normalized();
            }
        }
        const LossStrength xi(uniform(rng, 0.5, 3.0));
        const double diff =
            max_param_diff(subtract_then_lose(v, g, gen, xi).wigner, lose_then_subtract(v, gen, xi, g).wigner);
        const bool commutes = commutes_with_subtraction(g, gen);
        const bool ok = commutes ? diff < 1e-10 : diff > 1e-6;
        t.holds(ok && commutes == (i % 3 != 2), diff, i);
    }
    return t.result();
}

PropertyResult no_signalling_subtract_first(std::uint64_t seed, int n) {
    Rng rng(seed);
    Tally t("loss away from a mode set leaves its marginal unchanged");
    for (int i = 0; i < n; ++i) {
        const int m = uniform_int(rng, 2, 4);
        const int k = uniform_int(rng, 1, m - 1);
        std::vector<int> kept, lossy;
        for (int j = 0; j < m; ++j) (j < k ? kept : lossy).push_back(j);
        const GaussianState v = random_gaussian(m, rng);
        const PhaseSpaceVector g = random_mode(m, rng);
        const auto gen = build_decay_generator(channel_on(m, lossy, rng));
        const auto before = marginal(subtract(v, g), kept);
        const auto after = marginal(subtract_then_lose(v, g, gen, LossStrength(uniform(rng, 0.1, 5.0))), kept);
        t.below(max_param_diff(before, after), 1e-10, i);
    }
    return t.result();
}

PropertyResult graph_states_pure(std::uint64_t seed, int n) {
    Rng rng(seed);
    Tally t("graph states are pure");
    for (int i = 0; i < n; ++i) {
        const Vec nu = reference_symplectic_eigenvalues(graph_cov(random_graph(rng, 1, 6)).covariance());
        t.below((nu.array() - 1.0).abs().maxCoeff(), 1e-9, i);
    }
    return t.result();
}

std::vector<PropertyResult> all_properties(std::uint64_t seed) {
    return {semigroup_law(seed),
            vacuum_fixed_point(seed + 1),
            photon_number_monotone(seed + 2),
            vacuum_asymptotics(seed + 3),
            decay_inverse(seed + 4),
            equal_rates_keep_mode(seed + 5),
            projector_properties(seed + 6),
            physicality_basis_independent(seed + 7),
            commutator_antisymmetric(seed + 8),
            wigner_normalization(seed + 9),
            witness_forms_agree(seed + 10),
            a_matrix_rank_psd(seed + 11),
            marginal_matches_quadrature(seed + 12),
            gaussian_kurtosis_zero(seed + 13),
            subtraction_vertex_kurtosis_negative(seed + 14),
            grid_negativity_matches_witness(seed + 15),
            commutation_dichotomy(seed + 16),
            no_signalling_subtract_first(seed + 17),
            graph_states_pure(seed + 18)};
}

}  // namespace cvloss::testing
