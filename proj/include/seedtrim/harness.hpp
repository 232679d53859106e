#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "seedtrim/byteviz.hpp"
#include "seedtrim/core.hpp"
#include "seedtrim/fuzzer.hpp"
#include "seedtrim/oracle.hpp"
#include "seedtrim/reducer.hpp"

// Experiment harness behind the CLI subcommands: wires reduction, campaigns
// and visualization together, owns the on-disk layout (CSV files, campaign
// run directories, dump files) and the JSON plan format.

namespace seedtrim {

// "300s", "5m", "1500ms", "2h", or a plain number of seconds.
Duration parse_duration(const std::string& text);

// Text when every byte is printable ASCII or common whitespace.
SeedType infer_seed_type(const Bytes& bytes);

Bytes read_file_bytes(const std::string& path);
void write_file_bytes(const std::string& path, const Bytes& bytes);
void write_text_file(const std::string& path, const std::string& text);

// How a target is specified on the command line / in a plan: either a
// sim:<name> spec or an external command plus its report path and limits.
struct TargetOptions {
    std::string spec;           // "sim:..."; empty means external
    std::string command;        // external command template with @@
    std::string report_path;    // coverage report path template
    std::string workdir;
    Duration timeout{5000};
    std::vector<std::string> env;

    TargetSpec build() const;  // throws std::invalid_argument
};

struct ReduceOptions {
    TargetOptions target;
    std::string seed_path;
    double c_percent = 75.0;
    double r_percent = 40.0;
    Duration budget{300000};  // five minutes
    std::optional<SeedType> seed_type;     // inferred from content when unset
    std::optional<std::size_t> unit_size;  // default: 1 (text) / 1024 (binary)
    std::string output_dir = ".";
};

struct FuzzOptions {
    TargetOptions target;
    std::string seed_path;
    CampaignConfig campaign;
    bool emit_dump = false;  // writes <output_dir>/tests_generated
    std::string output_dir = "out";
};

struct CompareOptions {
    TargetOptions target;
    std::string seed_path;
    double c_percent = 75.0;
    double r_percent = 40.0;
    Duration budget{300000};
    std::optional<SeedType> seed_type;
    std::optional<std::size_t> unit_size;
    CampaignConfig campaign;  // rng_seed is the base seed, see below
    std::size_t repetitions = 3;
    std::int64_t bucket_ms = 1000;
    std::string output_dir = "out";
};

struct VizOptions {
    std::string dump_path;
    std::string output_dir = "frames";
    ImageLayout layout;
};

struct ReportOptions {
    std::string input_dir;
};

// reduce: writes <seed>.reduced and <output_dir>/reduction.csv, logs the
// Table-2-shaped block. Rejected reductions are not errors.
ReductionReport run_reduce(const ReduceOptions& opts, std::ostream& log);

// fuzz: one campaign; writes paths.csv / crashes.csv (and the color dump
// when emit_dump is set) under output_dir.
CampaignStats run_fuzz(const FuzzOptions& opts, std::ostream& log);

struct CompareResult {
    ReductionReport reduction;
    std::vector<CampaignStats> original_runs;
    std::vector<CampaignStats> reduced_runs;
};

// compare: reduces the seed, then runs `repetitions` campaigns per arm.
// Repetition k (0-based) uses rng seed base+2k for the original arm and
// base+2k+1 for the reduced arm. Writes per-run CSVs under
// original/run_<k>/ and reduced/run_<k>/, plus reduction.csv,
// reduced_seed.bin, paths_avg.csv, crash_summary.csv and
// coverage_summary.csv at the top of output_dir. A failed campaign leaves a
// FAILED.txt marker in its run directory and rethrows.
CompareResult run_compare(const CompareOptions& opts, std::ostream& log);

std::vector<std::string> run_viz(const VizOptions& opts, std::ostream& log);

// report: pretty-prints the summary CSVs found in a compare output dir.
void run_report(const ReportOptions& opts, std::ostream& out);

// Path count of one run at time t: the last total_paths at or before t
// (path events are carried forward between discoveries).
std::size_t paths_at(const CampaignStats& run, std::int64_t t_ms);

// Bucketed average curves, one row per bucket boundary from 0 to the
// campaign duration: "elapsed_ms,original_avg_paths,reduced_avg_paths".
std::string paths_avg_csv(const std::vector<CampaignStats>& original,
                          const std::vector<CampaignStats>& reduced,
                          std::int64_t bucket_ms, std::int64_t duration_ms);

// One row per target: unique crashes per job, then per-arm line/branch
// totals over all seeds the campaigns generated.
std::string crash_summary_csv(const std::string& target,
                              const std::vector<CampaignStats>& original,
                              const std::vector<CampaignStats>& reduced);
std::string coverage_summary_csv(const std::string& target,
                                 const std::vector<CampaignStats>& original,
                                 const std::vector<CampaignStats>& reduced);

// Column-aligned rendering of one of our own CSVs (no quoting involved).
std::string format_csv_table(const std::string& csv);

// JSON plan file mirroring the option structs; all fields optional, CLI
// flags override. load_plan throws std::invalid_argument on malformed JSON.
struct ExperimentPlan {
    std::optional<std::string> target;
    std::optional<std::string> command;
    std::optional<std::string> report_path;
    std::optional<std::string> workdir;
    std::optional<Duration> timeout;
    std::vector<std::string> env;
    std::optional<std::string> seed_path;
    std::optional<double> c_percent;
    std::optional<double> r_percent;
    std::optional<Duration> budget;
    std::optional<SeedType> seed_type;
    std::optional<std::size_t> unit_size;
    std::optional<Duration> duration;
    std::optional<std::uint64_t> rng_seed;
    std::optional<std::size_t> max_input_size;
    std::optional<std::size_t> mutation_stack_max;
    std::optional<std::size_t> repetitions;
    std::optional<std::int64_t> bucket_ms;
    std::optional<std::string> output_dir;
};

ExperimentPlan load_plan(const std::string& path);
void apply_plan(const ExperimentPlan& plan, ReduceOptions& opts);
void apply_plan(const ExperimentPlan& plan, FuzzOptions& opts);
void apply_plan(const ExperimentPlan& plan, CompareOptions& opts);

// Effective configuration as plan-shaped JSON (what --print-config emits).
std::string config_json(const ReduceOptions& opts);
std::string config_json(const FuzzOptions& opts);
std::string config_json(const CompareOptions& opts);

}  // namespace seedtrim
