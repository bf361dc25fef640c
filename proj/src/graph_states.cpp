#include "cvloss/graph_states.hpp"

#include "cvloss/errors.hpp"

#include <cmath>
#include <sstream>

namespace cvloss {

void validate_adjacency(const Mat& a) {
    if (a.rows() != a.cols() || a.rows() == 0) throw InvalidArgument("adjacency must be a non-empty square matrix");
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        if (a(i, i) != 0.0) throw InvalidArgument("adjacency must have a zero diagonal");
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            if (a(i, j) != 0.0 && a(i, j) != 1.0) {
                std::ostringstream os;
                os << "adjacency weights must be 0 or 1, got " << a(i, j) << " at (" << i << ", " << j << ")";
                throw InvalidArgument(os.str());
            }
            if (a(i, j) != a(j, i)) throw InvalidArgument("adjacency must be symmetric");
        }
    }
}

GraphSpec::GraphSpec(Mat adjacency, std::vector<double> squeezing_db)
    : adjacency_(std::move(adjacency)), squeezing_db_(std::move(squeezing_db)) {
    validate_adjacency(adjacency_);
    if (static_cast<Eigen::Index>(squeezing_db_.size()) != adjacency_.rows())
        throw DimensionMismatch("one squeezing value per vertex required");
    for (double db : squeezing_db_)
        if (!std::isfinite(db)) throw InvalidArgument("squeezing must be finite");
}

GraphSpec GraphSpec::uniform(Mat adjacency, double squeezing_db) {
    const auto m = adjacency.rows();
    return GraphSpec(std::move(adjacency), std::vector<double>(m, squeezing_db));
}

GraphSpec GraphSpec::square(double squeezing_db) {
    Mat a = Mat::Zero(4, 4);
    for (int i = 0; i < 4; ++i) {
        const int j = (i + 1) % 4;
        a(i, j) = a(j, i) = 1.0;
    }
    return uniform(std::move(a), squeezing_db);
}

double squeezing_factor(double db) { return std::pow(10.0, db / 10.0); }

GaussianState initial_cov(const std::vector<double>& squeezing_db) {
    const int m = static_cast<int>(squeezing_db.size());
    if (m == 0) throw InvalidArgument("at least one mode required");
    Vec diag(2 * m);
    for (int j = 0; j < m; ++j) {
        if (!std::isfinite(squeezing_db[j])) throw InvalidArgument("squeezing must be finite");
        const double s = squeezing_factor(squeezing_db[j]);
        diag[j] = s;
        diag[m + j] = 1.0 / s;
    }
    return validate_covariance(diag.asDiagonal());
}

Mat cz_symplectic(const Mat& adjacency) {
    validate_adjacency(adjacency);
    const auto m = adjacency.rows();
    Mat g = Mat::Identity(2 * m, 2 * m);
    g.topRightCorner(m, m) = adjacency;
    return g;
}

GaussianState graph_cov(const GraphSpec& spec) {
    const Mat g = cz_symplectic(spec.adjacency());
    const GaussianState v0 = initial_cov(spec.squeezing_db());
    return validate_covariance(g.transpose() * v0.covariance() * g);
}

Scenario parse_scenario(std::string_view name) {
    if (name == "vertex-loss") return Scenario::vertex_loss;
    if (name == "uniform") return Scenario::uniform;
    if (name == "off-support") return Scenario::off_support;
    if (name == "overlapping") return Scenario::overlapping;
    throw InvalidArgument("unknown scenario '" + std::string(name) + "'");
}

std::string scenario_name(Scenario s) {
    switch (s) {
        case Scenario::vertex_loss: return "vertex-loss";
        case Scenario::uniform: return "uniform";
        case Scenario::off_support: return "off-support";
        case Scenario::overlapping: return "overlapping";
    }
    return "unknown";
}

const std::vector<Scenario>& all_scenarios() {
    static const std::vector<Scenario> all{Scenario::vertex_loss, Scenario::uniform, Scenario::off_support,
                                           Scenario::overlapping};
    return all;
}

ScenarioSetup reference_scenario(Scenario s, double squeezing_db) {
    constexpr int m = 4;
    GraphSpec graph = GraphSpec::square(squeezing_db);
    PhaseSpaceVector g = PhaseSpaceVector::x_axis(m, 0);
    switch (s) {
        case Scenario::vertex_loss:
            return {std::move(graph), g, LossChannel::single(PhaseSpaceVector::x_axis(m, 0), 1.0)};
        case Scenario::uniform:
            return {std::move(graph), g, LossChannel::uniform(m, 1.0)};
        case Scenario::off_support: {
            const int which[] = {1, 2, 3};
            return {std::move(graph), g, LossChannel::single(PhaseSpaceVector::superposition(m, which), 1.0)};
        }
        case Scenario::overlapping: {
            const int which[] = {0, 3};
            return {std::move(graph), g, LossChannel::single(PhaseSpaceVector::superposition(m, which), 1.0)};
        }
    }
    throw InvalidArgument("unknown scenario");
}

}  // namespace cvloss
