#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cfbkit/cfb.hpp"

namespace cfbkit {

using json = nlohmann::json;

inline constexpr const char* kArtifactVersion = "0.1.0";

struct TaskDecl {
    std::string kind;
    json params;
};

struct ExperimentConfig {
    std::uint64_t seed = 20240611;
    int truncation = 16;
    std::map<std::string, json> operators;
    std::vector<TaskDecl> tasks;
    std::string report = "report.jsonl";
    bool fail_fast = false;
    double tolerance_scale = 1.0;

    /// Normalized form that re-parses to an equivalent experiment.
    json resolved() const;
};

const std::vector<std::string>& task_kinds();

/// Errors carry the JSON pointer of the offending value.
ExperimentConfig parse_config(const json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Complex scalar from a number or an [re, im] pair.
cplx parse_complex(const json& j);
json complex_to_json(cplx z);
/// Coefficient list, or {"roots": [...], "scale": c}.
AnalyticSymbol parse_symbol(const json& j);
/// {"lambda": x} or {"coeffs": [...]}.
DiagonalKernel parse_kernel(const json& j, int N);
CfbSpec parse_operator(const json& j, int default_N);

struct RunOptions {
    std::filesystem::path out_dir;
    /// Write CSV and matrix side files; disabled for stdout-only runs.
    bool write_files = false;
};

/// Executes one task and returns its result object; throws cfbkit::Error on task failure.
json run_task(const ExperimentConfig& cfg, const TaskDecl& task, const RunOptions& opts);

/// Runs every task, appending one record per line to report. Returns the exit code.
int run_experiment(const ExperimentConfig& cfg, std::ostream& report, const RunOptions& opts);

/// Header "CDMX", uint64 rows and cols, then row-major (re, im) doubles, all little-endian.
void write_matrix_binary(const std::filesystem::path& path, const Mat& m);
Mat read_matrix_binary(const std::filesystem::path& path);

/// CSV with columns re_w, im_w, value.
void write_grid_csv(const std::filesystem::path& path, const std::vector<cplx>& grid, const std::vector<double>& values);

}  // namespace cfbkit
