#pragma once

// Finitely squeezed CV graph states, V = G^T V0 G with G = [[1, A], [0, 1]],
// and the four loss scenarios on the square graph.

#include "cvloss/loss_channel.hpp"
#include "cvloss/phase_space.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace cvloss {

/// Adjacency with 0/1 weights, symmetric, zero diagonal; squeezing per vertex in dB.
class GraphSpec {
public:
    GraphSpec(Mat adjacency, std::vector<double> squeezing_db);

    /// Same squeezing on every vertex.
    static GraphSpec uniform(Mat adjacency, double squeezing_db);
    /// Cycle 1-2-3-4-1.
    static GraphSpec square(double squeezing_db);

    int vertex_count() const { return static_cast<int>(adjacency_.rows()); }
    const Mat& adjacency() const { return adjacency_; }
    const std::vector<double>& squeezing_db() const { return squeezing_db_; }

private:
    Mat adjacency_;
    std::vector<double> squeezing_db_;
};

/// Throws InvalidArgument unless the matrix is square, symmetric, hollow and 0/1.
void validate_adjacency(const Mat& adjacency);

/// 10^{dB/10}: the anti-squeezed x variance, the p variance being its inverse.
double squeezing_factor(double db);

/// V0 = diag(s_1..s_m, 1/s_1..1/s_m).
GaussianState initial_cov(const std::vector<double>& squeezing_db);

Mat cz_symplectic(const Mat& adjacency);

GaussianState graph_cov(const GraphSpec& spec);

enum class Scenario { vertex_loss, uniform, off_support, overlapping };

Scenario parse_scenario(std::string_view name);
std::string scenario_name(Scenario s);
const std::vector<Scenario>& all_scenarios();

struct ScenarioSetup {
    GraphSpec graph;
    PhaseSpaceVector subtraction_mode;
    LossChannel channel;
};

/// Square graph at 10 dB by default, photon subtracted at vertex 1, gamma = 1.
ScenarioSetup reference_scenario(Scenario s, double squeezing_db = 10.0);

}  // namespace cvloss
