#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pxeig/domain_grid.hpp"
#include "pxeig/eigensolver.hpp"
#include "pxeig/exponent_field.hpp"
#include "pxeig/infinity_limit.hpp"
#include "pxeig/luxemburg_norms.hpp"

namespace pxeig {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

struct NormParams {
    std::string field = "distance";  // "distance" or a field CSV path
    WeightMode mode = WeightMode::OneOverP;
    std::vector<std::int64_t> j_list{1, 2, 4, 8, 16, 32, 64, 128, 256};
};

struct SweepParams {
    std::vector<std::int64_t> j_list{1, 2, 4, 8, 16, 32, 64};
    SweepStart start = SweepStart::Warm;
    bool snapshots = false;
};

struct DiagnoseParams {
    double A = 1.5;
    double alpha = 2.0;
    int samples = 10000;
    double t_max = 10.0;
    double v_scale = 1.5;  // v = ln(v_scale * u / max u)
    std::string source = "solve";  // "solve" or "sweep"
};

struct AnalyticParams {
    double A = 1.0;
    std::vector<double> c_list{0.01, 0.1, 1.0, 10.0};
};

struct RunConfig {
    nlohmann::json raw;
    std::filesystem::path base_dir;
    DomainPtr domain;
    std::optional<VariableExponent> exponent;
    SolverOptions solver;
    std::uint64_t seed = 0;
    std::string hash;  // FNV-1a of the canonical config with the effective seed

    NormParams norm;
    SweepParams sweep;
    DiagnoseParams diagnose;
    AnalyticParams analytic;
};

// Throws ConfigError (field path + reason) on anything invalid.
RunConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir,
                       std::optional<std::uint64_t> seed_override = std::nullopt);
RunConfig load_config(const std::filesystem::path& path, std::optional<std::uint64_t> seed_override = std::nullopt);

const std::vector<std::string>& subcommands();

// Runs one subcommand, writing artifacts under out_dir and the JSON summary to out.
// Returns the JSON summary. Exceptions propagate.
nlohmann::ordered_json run(const RunConfig& cfg, const std::string& subcommand, const std::filesystem::path& out_dir);

// Loads, runs and maps failures to exit codes: 0 ok, 2 config error, 3 runtime error.
int run_command(const std::string& subcommand, const std::filesystem::path& config_path,
                const std::filesystem::path& out_dir, std::optional<std::uint64_t> seed, std::ostream& out,
                std::ostream& err);

std::string fnv1a_hex(const std::string& bytes);

}  // namespace pxeig
