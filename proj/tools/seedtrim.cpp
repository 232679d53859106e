#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "seedtrim/harness.hpp"

// seedtrim: reduce fuzzing seeds by delta debugging under coverage-similarity
// / reduction-ratio / exit-status constraints, rerun original-vs-reduced
// campaigns on deterministic built-in targets, and render byte-grid images
// of generated test inputs.
//
// Exit codes: 0 success (a rejected reduction is still success), 2 usage
// error, 3 oracle/target error.

namespace {

using namespace seedtrim;

struct TargetFlags {
    std::string spec;
    std::string command;
    std::string report;
    std::string workdir;
    std::string timeout = "5s";
    std::vector<std::string> env;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--target", spec,
                        "built-in target: sim:header-payload, sim:xml-like, "
                        "sim:constant or sim:distinct-bytes");
        cmd->add_option("--target-cmd", command,
                        "external command template with one @@ placeholder");
        cmd->add_option("--coverage-report", report,
                        "coverage report path template (@@ expands to the "
                        "input file path)");
        cmd->add_option("--workdir", workdir,
                        "working directory for external runs");
        cmd->add_option("--run-timeout", timeout,
                        "per-run timeout for external targets (e.g. 5s)");
        cmd->add_option("--env", env, "extra KEY=VALUE env entries for the child");
    }

    void fill(CLI::App* cmd, TargetOptions& target) const {
        if (cmd->count("--target")) target.spec = spec;
        if (cmd->count("--target-cmd")) target.command = command;
        if (cmd->count("--coverage-report")) target.report_path = report;
        if (cmd->count("--workdir")) target.workdir = workdir;
        if (cmd->count("--run-timeout")) target.timeout = parse_duration(timeout);
        if (cmd->count("--env")) target.env = env;
    }
};

struct ReductionFlags {
    double c = 75.0;
    double r = 40.0;
    std::string budget = "300s";
    std::string seed_type;
    std::size_t unit_size = 0;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--c", c, "coverage similarity floor C, percent")
            ->check(CLI::Range(0.0, 100.0));
        cmd->add_option("--r", r, "size reduction floor R, percent")
            ->check(CLI::Range(0.0, 100.0));
        cmd->add_option("--budget", budget, "reduction time budget (e.g. 300s)");
        cmd->add_option("--seed-type", seed_type,
                        "seed type; default inferred from content")
            ->check(CLI::IsMember({"text", "binary"}));
        cmd->add_option("--unit-size", unit_size,
                        "bytes per chunk unit; default 1 (text) / 1024 (binary)")
            ->check(CLI::PositiveNumber);
    }

    template <typename Opts>
    void fill(CLI::App* cmd, Opts& opts) const {
        if (cmd->count("--c")) opts.c_percent = c;
        if (cmd->count("--r")) opts.r_percent = r;
        if (cmd->count("--budget")) opts.budget = parse_duration(budget);
        if (cmd->count("--seed-type"))
            opts.seed_type = seed_type == "text" ? SeedType::Text : SeedType::Binary;
        if (cmd->count("--unit-size")) opts.unit_size = unit_size;
    }
};

struct CampaignFlags {
    std::string duration = "60s";
    std::uint64_t rng_seed = 1;
    std::size_t max_input_size = 1 << 20;
    std::size_t stack_max = 4;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--duration", duration, "campaign duration (e.g. 60s)");
        cmd->add_option("--rng-seed", rng_seed, "campaign RNG seed");
        cmd->add_option("--max-input-size", max_input_size,
                        "mutated input size cap in bytes")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--max-stack", stack_max,
                        "max mutation operators stacked per input")
            ->check(CLI::PositiveNumber);
    }

    void fill(CLI::App* cmd, CampaignConfig& config) const {
        if (cmd->count("--duration")) config.duration = parse_duration(duration);
        if (cmd->count("--rng-seed")) config.rng_seed = rng_seed;
        if (cmd->count("--max-input-size")) config.max_input_size = max_input_size;
        if (cmd->count("--max-stack")) config.mutation_stack_max = stack_max;
    }
};

void require_seed(const std::string& seed_path) {
    if (seed_path.empty())
        throw std::invalid_argument("no seed file given (use --seed)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "seedtrim: constraint-preserving seed reduction, desk-scale fuzzing "
        "campaigns, and byte-grid visualization of test inputs"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "seedtrim 0.1.0");

    std::string plan_path, seed_path, out_dir, dump_path, report_dir;
    bool print_config = false, emit_dump = false;
    TargetFlags target_flags;
    ReductionFlags reduction_flags;
    CampaignFlags campaign_flags;
    std::size_t repetitions = 3;
    std::int64_t bucket_ms = 1000;
    std::size_t box_px = 8, boxes_per_row = 32, max_bytes = 0;

    CLI::App* cmd_reduce = app.add_subcommand(
        "reduce", "delta-debug a seed under coverage / size / exit-status "
                  "constraints");
    target_flags.add_to(cmd_reduce);
    reduction_flags.add_to(cmd_reduce);
    cmd_reduce->add_option("--seed", seed_path, "seed file to reduce");
    cmd_reduce->add_option("--out", out_dir, "output directory for reduction.csv");
    cmd_reduce->add_option("--plan", plan_path, "JSON plan file (flags override)");
    cmd_reduce->add_flag("--print-config", print_config,
                         "print the effective configuration as JSON and exit");

    CLI::App* cmd_fuzz =
        app.add_subcommand("fuzz", "run one mutational fuzzing campaign");
    target_flags.add_to(cmd_fuzz);
    campaign_flags.add_to(cmd_fuzz);
    cmd_fuzz->add_option("--seed", seed_path, "initial seed file");
    cmd_fuzz->add_option("--out", out_dir, "output directory");
    cmd_fuzz->add_flag("--emit-dump", emit_dump,
                       "append every executed input to <out>/tests_generated");
    cmd_fuzz->add_option("--plan", plan_path, "JSON plan file (flags override)");
    cmd_fuzz->add_flag("--print-config", print_config,
                       "print the effective configuration as JSON and exit");

    CLI::App* cmd_compare = app.add_subcommand(
        "compare", "reduce a seed, then fuzz original vs reduced over N "
                   "repetitions and summarize");
    target_flags.add_to(cmd_compare);
    reduction_flags.add_to(cmd_compare);
    campaign_flags.add_to(cmd_compare);
    cmd_compare->add_option("--seed", seed_path, "seed file");
    cmd_compare->add_option("--reps", repetitions, "campaign repetitions per arm")
        ->check(CLI::PositiveNumber);
    cmd_compare->add_option("--bucket-ms", bucket_ms,
                            "time bucket for averaged path curves")
        ->check(CLI::PositiveNumber);
    cmd_compare->add_option("--out", out_dir, "output directory");
    cmd_compare->add_option("--plan", plan_path, "JSON plan file (flags override)");
    cmd_compare->add_flag("--print-config", print_config,
                          "print the effective configuration as JSON and exit");

    CLI::App* cmd_viz = app.add_subcommand(
        "viz", "render a color dump as one PNG frame per test input");
    cmd_viz->add_option("--dump", dump_path, "color dump file (hex lines)");
    cmd_viz->add_option("--out", out_dir, "frame output directory");
    cmd_viz->add_option("--box-px", box_px, "pixels per byte box")
        ->check(CLI::PositiveNumber);
    cmd_viz->add_option("--row", boxes_per_row, "byte boxes per row")
        ->check(CLI::PositiveNumber);
    cmd_viz->add_option("--max-bytes", max_bytes,
                        "cap on bytes rendered per frame")
        ->check(CLI::PositiveNumber);

    CLI::App* cmd_report = app.add_subcommand(
        "report", "pretty-print the summary CSVs of a compare output directory");
    cmd_report->add_option("--in", report_dir, "compare output directory")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (cmd_reduce->parsed()) {
            ReduceOptions opts;
            if (cmd_reduce->count("--plan"))
                apply_plan(load_plan(plan_path), opts);
            target_flags.fill(cmd_reduce, opts.target);
            reduction_flags.fill(cmd_reduce, opts);
            if (cmd_reduce->count("--seed")) opts.seed_path = seed_path;
            if (cmd_reduce->count("--out")) opts.output_dir = out_dir;
            if (print_config) {
                std::cout << config_json(opts);
                return 0;
            }
            require_seed(opts.seed_path);
            run_reduce(opts, std::cout);
            return 0;
        }
        if (cmd_fuzz->parsed()) {
            FuzzOptions opts;
            if (cmd_fuzz->count("--plan")) apply_plan(load_plan(plan_path), opts);
            target_flags.fill(cmd_fuzz, opts.target);
            campaign_flags.fill(cmd_fuzz, opts.campaign);
            if (cmd_fuzz->count("--seed")) opts.seed_path = seed_path;
            if (cmd_fuzz->count("--out")) opts.output_dir = out_dir;
            if (emit_dump) opts.emit_dump = true;
            if (print_config) {
                std::cout << config_json(opts);
                return 0;
            }
            require_seed(opts.seed_path);
            run_fuzz(opts, std::cout);
            return 0;
        }
        if (cmd_compare->parsed()) {
            CompareOptions opts;
            if (cmd_compare->count("--plan"))
                apply_plan(load_plan(plan_path), opts);
            target_flags.fill(cmd_compare, opts.target);
            reduction_flags.fill(cmd_compare, opts);
            campaign_flags.fill(cmd_compare, opts.campaign);
            if (cmd_compare->count("--seed")) opts.seed_path = seed_path;
            if (cmd_compare->count("--reps")) opts.repetitions = repetitions;
            if (cmd_compare->count("--bucket-ms")) opts.bucket_ms = bucket_ms;
            if (cmd_compare->count("--out")) opts.output_dir = out_dir;
            if (print_config) {
                std::cout << config_json(opts);
                return 0;
            }
            require_seed(opts.seed_path);
            run_compare(opts, std::cout);
            return 0;
        }
        if (cmd_viz->parsed()) {
            VizOptions opts;
            if (dump_path.empty())
                throw std::invalid_argument("no dump file given (use --dump)");
            opts.dump_path = dump_path;
            if (cmd_viz->count("--out")) opts.output_dir = out_dir;
            opts.layout.box_px = box_px;
            opts.layout.boxes_per_row = boxes_per_row;
            if (cmd_viz->count("--max-bytes")) opts.layout.max_bytes = max_bytes;
            run_viz(opts, std::cout);
            return 0;
        }
        if (cmd_report->parsed()) {
            run_report(ReportOptions{report_dir}, std::cout);
            return 0;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
