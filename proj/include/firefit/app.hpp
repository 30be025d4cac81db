#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "firefit/concentric.hpp"
#include "firefit/detection.hpp"
#include "firefit/optimizer.hpp"
#include "firefit/smoother.hpp"

namespace firefit::app {

/// Raised for anything wrong with the configuration or its inputs; maps to exit code 2.
class ValidationError : public Error {
public:
    using Error::Error;
};

struct Options {
    nlohmann::json config = nlohmann::json::object();
    std::filesystem::path base_dir = ".";  // relative input paths resolve here
    std::filesystem::path out_dir = "out";
    std::optional<std::uint64_t> seed;
};

/// Reads a JSON config and applies `section.key=value` overrides (values parsed
/// as JSON when possible, else taken as strings).
Options load_options(const std::optional<std::filesystem::path>& config_path,
                     const std::vector<std::string>& overrides);

struct GenCaseResult {
    std::vector<std::filesystem::path> files;
    ConcentricCase data;
};
struct InitRun {
    double alpha;
    InitialField field;
    double funnel;  // NaN without an ignition node
    std::filesystem::path file;
};
struct InitResult {
    std::vector<InitRun> runs;
};
struct FitOutput {
    InitialField initial;
    FitResult fit;
    std::optional<double> initial_error, final_error;
    std::vector<std::filesystem::path> files;
};
struct IgnitionResult {
    std::vector<RankedIgnition> ranked;
    std::filesystem::path file;
};

/// Each command validates its whole configuration (and reads every input)
/// before creating the output directory. Validation failures throw ValidationError.
GenCaseResult cmd_gen_case(const Options& opts);
InitResult cmd_init(const Options& opts);
FitOutput cmd_fit(const Options& opts);
IgnitionResult cmd_ignition(const Options& opts);

/// Entry point: returns the process exit code (0 ok, 2 validation, 1 runtime).
int run(int argc, char** argv);

}  // namespace firefit::app
