#include "oracle_suite.hpp"

#include "cvloss/errors.hpp"
#include "cvloss/fock_oracle.hpp"
#include "cvloss/graph_states.hpp"
#include "cvloss/subtraction.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace cvloss::cli {

namespace {

using cd = std::complex<double>;

CMat random_unitary(int m, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    CMat z(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) z(i, j) = cd(normal(rng), normal(rng));
    Eigen::HouseholderQR<CMat> qr(z);
    CMat q = qr.householderQ() * CMat::Identity(m, m);
    const CMat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < m; ++j) q.col(j) *= r(j, j) / std::abs(r(j, j));
    return q;
}

PhaseSpaceVector from_amplitudes(const CVec& c) {
    const auto m = c.size();
    Vec v(2 * m);
    v.head(m) = c.real();
    v.tail(m) = c.imag();
    return PhaseSpaceVector(std::move(v));
}

PhaseSpaceVector random_mode(int m, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    Vec v(2 * m);
    for (int i = 0; i < 2 * m; ++i) v[i] = normal(rng);
    return PhaseSpaceVector(Vec(v / v.norm()));
}

LossChannel random_channel(int m, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> rate(0.2, 2.0);
    const CMat u = random_unitary(m, rng);
    std::vector<LossMode> entries;
    for (int j = 0; j < m; ++j) entries.push_back({from_amplitudes(u.col(j)), rate(rng)});
    return LossChannel(m, std::move(entries));
}

fock::Recipe random_recipe(int m, double max_db, bool thermal, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> db(1.0, max_db);
    std::uniform_real_distribution<double> noise(1.0, 1.3);
    fock::Recipe recipe;
    if (thermal) recipe.push_back(fock::Thermal{0, noise(rng)});
    for (int j = 0; j < m; ++j) {
        const double s = squeezing_factor(db(rng));
        recipe.push_back(fock::Squeeze{j, (j % 2 == 0) ? s : 1.0 / s});
    }
    recipe.push_back(fock::Passive{passive_from_unitary(random_unitary(m, rng))});
    return recipe;
}

std::vector<PhaseSpaceVector> wigner_points(int m) {
    const double ticks[] = {-2.4, -1.2, 0.0, 1.2, 2.4};
    std::vector<PhaseSpaceVector> pts;
    for (double x : ticks) {
        for (double p : ticks) {
            if (m == 1) {
                Vec b(2);
                b << x, p;
                pts.emplace_back(std::move(b));
            } else {
                Vec b1(4);
                b1 << x, 0.5, p, -0.5;
                pts.emplace_back(std::move(b1));
                Vec b2(4);
                b2 << 0.3, x, 0.2, p;
                pts.emplace_back(std::move(b2));
            }
        }
    }
    return pts;
}

void record(OracleCheck& c, double deviation, bool reliable) {
    if (c.instances == 0) {
        c.max_deviation = deviation;
        c.min_deviation = deviation;
    } else {
        c.max_deviation = std::max(c.max_deviation, deviation);
        c.min_deviation = std::min(c.min_deviation, deviation);
    }
    ++c.instances;
    c.reliable = c.reliable && reliable;
}

double max_wigner_deviation(const SubtractedState& analytic, const fock::FockDensityMatrix& oracle) {
    double dev = 0.0;
    for (const auto& b : wigner_points(analytic.base.mode_count()))
        dev = std::max(dev, std::abs(wigner_eval(analytic, b) - fock::wigner_point(oracle, b).value));
    return dev;
}

}  // namespace

bool OracleCheck::passed() const {
    if (instances == 0) return false;
    return criterion == "above" ? min_deviation > tolerance : max_deviation < tolerance;
}

bool OracleSuiteReport::inconclusive() const {
    return std::any_of(checks.begin(), checks.end(), [](const OracleCheck& c) { return !c.reliable; });
}

bool OracleSuiteReport::all_passed() const {
    return !inconclusive() &&
           std::all_of(checks.begin(), checks.end(), [](const OracleCheck& c) { return c.passed(); });
}

nlohmann::json OracleSuiteReport::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : checks) {
        arr.push_back({{"name", c.name},
                       {"criterion", c.criterion},
                       {"tolerance", c.tolerance},
                       {"max_deviation", c.max_deviation},
                       {"min_deviation", c.min_deviation},
                       {"instances", c.instances},
                       {"reliable", c.reliable},
                       {"passed", c.passed() && c.reliable}});
    }
    const char* status = inconclusive() ? "inconclusive" : (all_passed() ? "pass" : "fail");
    return {{"status", status}, {"max_leakage", max_leakage}, {"checks", std::move(arr)}};
}

OracleSuiteReport run_oracle_suite(const OracleSuiteOptions& opt) {
    std::mt19937_64 rng(opt.seed);
    OracleSuiteReport report;
    const bool trivial = opt.identity_channel_only;
    const std::vector<double> xis = trivial ? std::vector<double>{0.0} : opt.xis;
    const double tight = 1e-12;

    OracleCheck cov{"loss_covariance", 0, trivial ? tight : 1e-6};
    OracleCheck channel_action{"identity_channel_action", 0, tight};
    OracleCheck wig_sl{"wigner_subtract_then_lose", 0, 1e-6};
    OracleCheck wig_ls{"wigner_lose_then_subtract", 0, 1e-6};
    OracleCheck id1{"subtraction_loss_identity_single", 0, trivial ? tight : 1e-7};
    OracleCheck id2{"subtraction_loss_identity_double", 0, trivial ? tight : 1e-7};
    OracleCheck prob{"subtraction_probability_identity", 0, trivial ? tight : 1e-7};
    OracleCheck commuting{"commuting_orders_trace_distance", 0, 1e-8};
    OracleCheck noncommuting{"noncommuting_orders_trace_distance", 0, 1e-4};
    noncommuting.criterion = "above";

    // Gaussian states built in Fock space against the phase-space formulas.
    for (int m = 1; m <= 2; ++m) {
        const int count = m == 1 ? opt.single_mode_states : opt.two_mode_states;
        const int cutoff = opt.cutoff.value_or(m == 1 ? opt.single_mode_cutoff : opt.two_mode_cutoff);
        for (int k = 0; k < count; ++k) {
            const auto recipe = random_recipe(m, opt.max_squeezing_db, k % 2 == 1, rng);
            const GaussianState v = fock::recipe_covariance(m, recipe);
            fock::BuildOptions bo;
            bo.allow_unreliable = true;
            const auto rho = fock::build_state(m, recipe, cutoff, bo);
            report.max_leakage = std::max(report.max_leakage, rho.leakage);
            const bool ok = rho.reliable();
            const LossChannel channel = random_channel(m, rng);
            const DecayGenerator gen = build_decay_generator(channel);
            const PhaseSpaceVector g = random_mode(m, rng);
            const auto rho_sub = fock::annihilate(rho, g);
            const Mat cov_before = fock::covariance(rho);
            for (double x : xis) {
                const LossStrength xi(x);
                const auto lossy = fock::kraus_loss(rho, channel, xi);
                if (trivial) {
                    record(cov, (fock::covariance(lossy) - cov_before).cwiseAbs().maxCoeff(), ok);
                    record(channel_action, (lossy.rho - rho.rho).cwiseAbs().maxCoeff(), ok);
                    continue;
                }
                record(cov, (fock::covariance(lossy) - apply_to_covariance(v, gen, xi).covariance()).cwiseAbs().maxCoeff(),
                       ok);
                record(wig_sl,
                       max_wigner_deviation(subtract_then_lose(v, g, gen, xi), fock::kraus_loss(rho_sub, channel, xi)),
                       ok);
                record(wig_ls, max_wigner_deviation(lose_then_subtract(v, gen, xi, g), fock::annihilate(lossy, g)),
                       ok);
            }
        }
    }

    // Operator identities on random density matrices; exact under the truncation.
    for (int m = 1; m <= 2; ++m) {
        for (int k = 0; k < opt.random_density_matrices; ++k) {
            const auto rho = m == 1 ? fock::random_density_matrix(1, 16, 12, 3, rng)
                                    : fock::random_density_matrix(2, 14, 10, 3, rng);
            const LossChannel channel = random_channel(m, rng);
            const DecayGenerator gen = build_decay_generator(channel);
            const PhaseSpaceVector g1 = random_mode(m, rng);
            const PhaseSpaceVector g2 = random_mode(m, rng);
            const PhaseSpaceVector single[] = {g1};
            const PhaseSpaceVector pair[] = {g1, g2};
            for (double x : xis) {
                const LossStrength xi(x);
                record(id1, fock::subtraction_loss_identity_deviation(rho, single, channel, xi), true);
                record(id2, fock::subtraction_loss_identity_deviation(rho, pair, channel, xi), true);
                const TildeMode t = tilde_mode(g1, gen, xi);
                const double before = fock::apply_annihilator(rho, g1).trace();
                const double after =
                    t.scale * t.scale * fock::apply_annihilator(fock::kraus_loss(rho, channel, xi), t.mode).trace();
                record(prob, std::abs(before - after), true);
            }
        }
    }

    // Order of subtraction and loss on the two-vertex graph.
    const double xi_max = *std::max_element(xis.begin(), xis.end());
    if (!trivial && xi_max > 0.0) {
        Mat adj = Mat::Zero(2, 2);
        adj(0, 1) = adj(1, 0) = 1.0;
        const double s = squeezing_factor(3.0);
        const fock::Recipe recipe{fock::Squeeze{0, s}, fock::Squeeze{1, s}, fock::ControlledZ{0, 1}};
        fock::BuildOptions bo;
        bo.allow_unreliable = true;
        const auto rho = fock::build_state(2, recipe, opt.cutoff.value_or(opt.graph_cutoff), bo);
        report.max_leakage = std::max(report.max_leakage, rho.leakage);
        const PhaseSpaceVector g = PhaseSpaceVector::x_axis(2, 0);
        const int both[] = {0, 1};
        const std::vector<std::pair<LossChannel, bool>> cases{
            {LossChannel::single(PhaseSpaceVector::x_axis(2, 0), 1.0), true},
            {LossChannel::uniform(2, 1.0), true},
            {LossChannel::single(PhaseSpaceVector::x_axis(2, 1), 1.0), true},
            {LossChannel::single(PhaseSpaceVector::superposition(2, both), 1.0), false},
        };
        const LossStrength xi(xi_max);
        for (const auto& [channel, commutes] : cases) {
            const auto a = fock::kraus_loss(fock::annihilate(rho, g), channel, xi);
            const auto b = fock::annihilate(fock::kraus_loss(rho, channel, xi), g);
            record(commutes ? commuting : noncommuting, fock::trace_distance(a, b), rho.reliable());
        }
    }

    if (trivial) {
        report.checks = {cov, channel_action, id1, id2, prob};
    } else {
        report.checks = {cov, wig_sl, wig_ls, id1, id2, prob, commuting, noncommuting};
    }
    return report;
}

}  // namespace cvloss::cli
