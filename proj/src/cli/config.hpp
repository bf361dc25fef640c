#pragma once

#include "cvloss/errors.hpp"
#include "cvloss/graph_states.hpp"
#include "cvloss/loss_channel.hpp"
#include "cvloss/phase_space.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace cvloss::cli {

class ConfigError : public Error {
public:
    using Error::Error;
};

enum class Order { subtract_first, lose_first, both };

Order parse_order(const std::string& s);
std::string order_name(Order o);

/// A Gaussian state, a subtraction mode and a loss channel.
struct System {
    std::string label;
    std::optional<Scenario> scenario;
    std::optional<GraphSpec> graph;
    GaussianState state;
    PhaseSpaceVector subtraction_mode;
    LossChannel channel;
};

struct Grid {
    double radius = 6.0;
    double step = 0.1;
};

struct SingleModeSweep {
    std::vector<double> s_db{2.0, 4.0, 6.0, 8.0, 10.0};
    double n = 1.0;
    double gamma = 2.0;
    double step = 0.01;
};

struct ThresholdSearch {
    double xi_max = 20.0;
    double tolerance = 1e-10;
};

struct OracleOptions {
    std::string suite = "default";
    std::optional<int> cutoff;
};

struct RunConfig {
    nlohmann::json source;
    std::optional<System> system;
    Order order = Order::subtract_first;
    std::vector<double> xi{0.0, 1.0, 2.0};
    Grid grid;
    SingleModeSweep single_mode;
    ThresholdSearch threshold;
    OracleOptions oracle;
};

/// Parses and validates a config document; throws ConfigError.
RunConfig parse_config(const nlohmann::json& doc);

/// Reads a file and parses it; an empty path yields the defaults.
RunConfig load_config(const std::string& path);

/// "0,1,2.5" -> {0, 1, 2.5}; throws ConfigError.
std::vector<double> parse_xi_list(const std::string& text);

const System& require_system(const RunConfig& cfg, const char* command);

}  // namespace cvloss::cli
