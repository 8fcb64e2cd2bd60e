#pragma once

#include "gcas/lifshitz.hpp"
#include "gcas/params.hpp"

#include <json.hpp>

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace gcas::cli {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitNumeric = 3, kExitIo = 4 };

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Format { Csv, Json };
enum class Axis { Real, Imaginary };

/// One permittivity/reflection sample: (q, omega) on the real axis or (q, l)
/// on the imaginary axis.
struct GridPoint {
    double q_per_m = 0.0;
    double omega_rad_s = 0.0;
    int l = 0;
};

/// Everything a command needs, in SI units. Built from a JSON document whose
/// unknown keys are rejected; scalar fields can then be overridden by flags.
struct RunConfig {
    PhysicalParams params;
    SummationConfig summation;
    bool real_frequency = false;
    bool real_frequency_set = false;
    std::vector<double> separations_m;
    bool grid_set = false;
    Axis axis = Axis::Real;
    std::vector<GridPoint> points;
    Format format = Format::Csv;
    std::string out;  // empty: standard output
    int threads = 1;

    /// Throws ConfigError.
    void validate() const;
};

RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

/// n log-spaced points with exact end points.
std::vector<double> log_grid(double lo, double hi, int n);
/// 25 log-spaced separations from 200 nm to 4 um.
std::vector<double> default_grid();
/// The default grid plus 2 um, where reference ratios are quoted.
std::vector<double> acceptance_grid();

inline constexpr int kSchemaVersion = 1;

using Cell = std::variant<std::monostate, double, long long, std::string>;

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

/// Shortest decimal form that parses back to the same double.
std::string format_number(double x);

/// CSV starts with "# schema=<name> version=<n>", then the column header.
/// JSON is one object with schema, version, columns and rows.
void write_table(std::ostream& os, const Table& t, Format f);

Table permittivity_table(const RunConfig& cfg, bool& all_converged);
Table reflection_table(const RunConfig& cfg, bool& all_converged);
Table pressure_table(const RunConfig& cfg, bool split, bool& converged);
/// Real-frequency columns are left empty when the split was not computed.
Table sweep_table(const std::vector<SweepRow>& rows, bool with_real_frequency = true);

/// Sweep CSV columns needed to judge the reference criteria.
struct SweepRecord {
    double a_m = 0.0;
    double P_TM = 0.0, P_TE = 0.0, P_total = 0.0, P_IM = 0.0;
    double P_TM_evan = 0.0, P_TM_prop = 0.0, P_TM_prop_err = 0.0;
    double P_TM_evan_plasmonic = 0.0, P_TM_evan_deep = 0.0;
    double ratio_TM_TE = 0.0, ratio_TM_total = 0.0;
    std::string status;
};

/// Reads a sweep CSV written by write_table; throws ConfigError on a schema
/// mismatch or malformed row.
std::vector<SweepRecord> parse_sweep_csv(std::istream& is);

struct Criterion {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Ratio (with the per-point time budget), fraction, sign and decomposition checks on
/// a sweep over acceptance_grid().
std::vector<Criterion> sweep_criteria(const std::vector<SweepRecord>& rows, double max_point_time_s);

struct EquivalencePoint {
    double a_m = 0.0;
    PressureValue matsubara, evanescent, direct;
};

/// P_TM from the Matsubara sum and from evanescent + direct propagating parts.
/// The direct part is credited with a 1% error.
EquivalencePoint equivalence_at(double a_m, double temperature_K, const SummationConfig& cfg);
Criterion equivalence_criterion(const std::vector<EquivalencePoint>& points);

/// Command-line entry point; returns an ExitCode.
int run(int argc, char** argv);

}  // namespace gcas::cli
