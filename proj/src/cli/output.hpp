#pragma once

#include "cvloss/phase_space.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace cvloss::cli {

inline constexpr const char* k_artifact_version = "0.1.0";

/// printf("%.17g").
std::string format_double(double v);

nlohmann::json to_json(const Mat& m);
nlohmann::json to_json(const Vec& v);

/// CSV with a fixed header; every float written with 17 significant digits.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

    CsvWriter& field(double v);
    CsvWriter& field(const std::string& s);
    CsvWriter& field(int v);
    void end_row();

private:
    std::ofstream out_;
    std::size_t columns_;
    std::size_t pending_ = 0;
};

void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

/// The configuration JSON schema shipped with the tool.
const std::string& config_schema_text();

/// Creates the output directory and drops schema.json into it.
void prepare_output(const std::filesystem::path& dir);

}  // namespace cvloss::cli
