#include "seedtrim/harness.hpp"

#include <json.hpp>

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace seedtrim {

namespace fs = std::filesystem;
using nlohmann::json;

Duration parse_duration(const std::string& text) {
    std::size_t i = 0;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])))
        ++i;
    if (i == 0)
        throw std::invalid_argument("bad duration '" + text +
                                    "' (use e.g. 300s, 5m, 1500ms)");
    const unsigned long long value = std::stoull(text.substr(0, i));
    const std::string suffix = text.substr(i);
    std::int64_t ms;
    if (suffix == "ms")
        ms = static_cast<std::int64_t>(value);
    else if (suffix == "s" || suffix.empty())
        ms = static_cast<std::int64_t>(value) * 1000;
    else if (suffix == "m")
        ms = static_cast<std::int64_t>(value) * 60000;
    else if (suffix == "h")
        ms = static_cast<std::int64_t>(value) * 3600000;
    else
        throw std::invalid_argument("bad duration '" + text +
                                    "' (use e.g. 300s, 5m, 1500ms)");
    if (ms <= 0) throw std::invalid_argument("duration must be positive");
    return Duration(ms);
}

SeedType infer_seed_type(const Bytes& bytes) {
    for (std::uint8_t b : bytes) {
        const bool printable = b >= 0x20 && b <= 0x7E;
        if (!printable && b != '\t' && b != '\n' && b != '\r')
            return SeedType::Binary;
    }
    return SeedType::Text;
}

Bytes read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string& s = ss.str();
    return Bytes(s.begin(), s.end());
}

void write_file_bytes(const std::string& path, const Bytes& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    out.close();
    if (!out) throw std::runtime_error("write failed: " + path);
}

void write_text_file(const std::string& path, const std::string& text) {
    write_file_bytes(path, Bytes(text.begin(), text.end()));
}

namespace {

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string format_ms(Duration d) { return std::to_string(d.count()) + "ms"; }

struct SeedSetup {
    Seed seed;
    ReductionConfig config;
    SeedType type = SeedType::Binary;
};

SeedSetup prepare_seed(const std::string& seed_path,
                       std::optional<SeedType> seed_type,
                       std::optional<std::size_t> unit_size, double c, double r,
                       Duration budget) {
    Bytes bytes = read_file_bytes(seed_path);
    if (bytes.empty())
        throw std::invalid_argument("seed file is empty: " + seed_path);

    SeedSetup setup;
    setup.type = seed_type.value_or(infer_seed_type(bytes));
    const ChunkUnit unit =
        setup.type == SeedType::Text ? ChunkUnit::Char : ChunkUnit::Byte;
    const std::size_t usize =
        unit_size.value_or(setup.type == SeedType::Text ? 1 : 1024);
    setup.config = ReductionConfig(c, r, budget, unit, usize);
    setup.seed = Seed(std::move(bytes), unit, usize);
    return setup;
}

void warn_if_vacuous(const ReductionReport& report, std::ostream& log) {
    if (report.similarity_vacuous)
        log << "warning: original seed covers no statements; the coverage "
               "similarity constraint is vacuous\n";
}

void write_campaign_csvs(const std::string& dir, const CampaignStats& stats) {
    write_text_file((fs::path(dir) / "paths.csv").string(), paths_csv(stats));
    write_text_file((fs::path(dir) / "crashes.csv").string(), crashes_csv(stats));
}

double mean_final_paths(const std::vector<CampaignStats>& runs) {
    if (runs.empty()) return 0.0;
    double sum = 0;
    for (const auto& r : runs) sum += static_cast<double>(r.total_paths());
    return sum / static_cast<double>(runs.size());
}

}  // namespace

TargetSpec TargetOptions::build() const {
    if (!spec.empty() && !command.empty())
        throw std::invalid_argument(
            "give either a sim:<name> target or an external command, not both");
    if (!spec.empty()) return parse_target_spec(spec);
    if (command.empty())
        throw std::invalid_argument(
            "no target given (use --target sim:<name> or --target-cmd)");
    ExternalTarget ext;
    ext.command_template = command;
    ext.coverage_report_path = report_path;
    ext.workdir = workdir;
    ext.per_run_timeout = timeout;
    ext.env = env;
    return TargetSpec::external_cmd(std::move(ext));
}

ReductionReport run_reduce(const ReduceOptions& opts, std::ostream& log) {
    const SeedSetup setup =
        prepare_seed(opts.seed_path, opts.seed_type, opts.unit_size,
                     opts.c_percent, opts.r_percent, opts.budget);
    const TargetSpec target = opts.target.build();

    ReductionReport report = reduce(target, setup.seed, setup.config);
    warn_if_vacuous(report, log);

    fs::create_directories(opts.output_dir);
    write_file_bytes(opts.seed_path + ".reduced", report.reduced_bytes);
    write_text_file((fs::path(opts.output_dir) / "reduction.csv").string(),
                    reduction_csv_header() + reduction_csv_row(report));
    log << reduction_table(report);
    return report;
}

CampaignStats run_fuzz(const FuzzOptions& opts, std::ostream& log) {
    const Bytes bytes = read_file_bytes(opts.seed_path);
    const TargetSpec target = opts.target.build();
    const Seed seed(bytes, ChunkUnit::Byte, 1);

    fs::create_directories(opts.output_dir);
    std::optional<ColorDumpWriter> dump;
    InputObserver observer;
    if (opts.emit_dump) {
        const std::string dump_path =
            (fs::path(opts.output_dir) / "tests_generated").string();
        std::error_code ec;
        fs::remove(dump_path, ec);  // fresh dump per campaign
        dump.emplace(dump_path, 256);
        observer = [&dump](const Bytes& input) { dump->append(input); };
    }

    CampaignStats stats = run_campaign(target, seed, opts.campaign, observer);
    if (dump) dump->flush();

    write_campaign_csvs(opts.output_dir, stats);
    log << "paths=" << stats.total_paths()
        << " unique_crashes=" << stats.unique_crashes
        << " lines=" << stats.cumulative_statements
        << " branches=" << stats.cumulative_branches
        << " executions=" << stats.executions << "\n";
    return stats;
}

CompareResult run_compare(const CompareOptions& opts, std::ostream& log) {
    if (opts.repetitions == 0)
        throw std::invalid_argument("repetitions must be >= 1");
    const SeedSetup setup =
        prepare_seed(opts.seed_path, opts.seed_type, opts.unit_size,
                     opts.c_percent, opts.r_percent, opts.budget);
    const TargetSpec target = opts.target.build();
    fs::create_directories(opts.output_dir);

    CompareResult result;
    result.reduction = reduce(target, setup.seed, setup.config);
    warn_if_vacuous(result.reduction, log);
    write_text_file((fs::path(opts.output_dir) / "reduction.csv").string(),
                    reduction_csv_header() + reduction_csv_row(result.reduction));
    write_file_bytes((fs::path(opts.output_dir) / "reduced_seed.bin").string(),
                     result.reduction.reduced_bytes);
    log << reduction_table(result.reduction);
    if (result.reduction.status != ReductionStatus::Reduced)
        log << "note: reduction kept the original bytes; the reduced arm "
               "reruns them\n";

    const Seed reduced_seed(result.reduction.reduced_bytes, setup.seed.unit,
                            setup.seed.unit_size);
    struct Arm {
        const char* name;
        const Seed* seed;
        std::uint64_t seed_offset;
        std::vector<CampaignStats>* runs;
    };
    const Arm arms[2] = {{"original", &setup.seed, 0, &result.original_runs},
                         {"reduced", &reduced_seed, 1, &result.reduced_runs}};

    for (const Arm& arm : arms) {
        for (std::size_t rep = 0; rep < opts.repetitions; ++rep) {
            CampaignConfig config = opts.campaign;
            config.rng_seed = opts.campaign.rng_seed + 2 * rep + arm.seed_offset;
            const std::string dir =
                (fs::path(opts.output_dir) / arm.name / ("run_" + std::to_string(rep + 1)))
                    .string();
            fs::create_directories(dir);
            try {
                CampaignStats stats = run_campaign(target, *arm.seed, config);
                write_campaign_csvs(dir, stats);
                arm.runs->push_back(std::move(stats));
            } catch (const std::exception& e) {
                write_text_file((fs::path(dir) / "FAILED.txt").string(),
                                std::string(e.what()) + "\n");
                log << "campaign failed (" << arm.name << " run " << rep + 1
                    << "): " << e.what() << "\n";
                throw;
            }
        }
    }

    const std::int64_t duration_ms = opts.campaign.duration.count();
    const std::string avg =
        paths_avg_csv(result.original_runs, result.reduced_runs, opts.bucket_ms,
                      duration_ms);
    const std::string crash_csv = crash_summary_csv(
        target.name(), result.original_runs, result.reduced_runs);
    const std::string cov_csv = coverage_summary_csv(
        target.name(), result.original_runs, result.reduced_runs);
    write_text_file((fs::path(opts.output_dir) / "paths_avg.csv").string(), avg);
    write_text_file((fs::path(opts.output_dir) / "crash_summary.csv").string(),
                    crash_csv);
    write_text_file((fs::path(opts.output_dir) / "coverage_summary.csv").string(),
                    cov_csv);

    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f vs %.2f",
                  mean_final_paths(result.original_runs),
                  mean_final_paths(result.reduced_runs));
    log << "\nunique crashes per job:\n"
        << format_csv_table(crash_csv) << "\ncoverage totals:\n"
        << format_csv_table(cov_csv)
        << "\nmean final paths (original vs reduced): " << buf << "\n";
    return result;
}

std::vector<std::string> run_viz(const VizOptions& opts, std::ostream& log) {
    const auto written = render_dump(opts.dump_path, opts.output_dir, opts.layout);
    log << written.size() << " frames written to " << opts.output_dir << "\n";
    return written;
}

void run_report(const ReportOptions& opts, std::ostream& out) {
    const struct {
        const char* file;
        const char* title;
    } sections[] = {
        {"reduction.csv", "reduction"},
        {"crash_summary.csv", "unique crashes per job"},
        {"coverage_summary.csv", "coverage totals"},
    };
    bool any = false;
    for (const auto& section : sections) {
        const std::string path = (fs::path(opts.input_dir) / section.file).string();
        if (!fs::exists(path)) continue;
        any = true;
        out << "== " << section.title << " ==\n"
            << format_csv_table(read_text_file(path)) << "\n";
    }
    const std::string avg_path =
        (fs::path(opts.input_dir) / "paths_avg.csv").string();
    if (fs::exists(avg_path)) {
        any = true;
        const std::string text = read_text_file(avg_path);
        const auto last_nl = text.find_last_of('\n', text.size() - 2);
        out << "== mean paths over time ==\n"
            << format_csv_table(text)
            << "final: " << text.substr(last_nl + 1);
    }
    if (!any)
        throw std::runtime_error("no summary CSVs found in " + opts.input_dir);
}

std::size_t paths_at(const CampaignStats& run, std::int64_t t_ms) {
    std::size_t value = 0;
    for (const auto& ev : run.path_events) {
        if (ev.elapsed_ms > t_ms) break;
        value = ev.total_paths;
    }
    return value;
}

std::string paths_avg_csv(const std::vector<CampaignStats>& original,
                          const std::vector<CampaignStats>& reduced,
                          std::int64_t bucket_ms, std::int64_t duration_ms) {
    if (bucket_ms <= 0) throw std::invalid_argument("bucket_ms must be positive");
    auto average = [](const std::vector<CampaignStats>& runs, std::int64_t t) {
        if (runs.empty()) return 0.0;
        double sum = 0;
        for (const auto& r : runs) sum += static_cast<double>(paths_at(r, t));
        return sum / static_cast<double>(runs.size());
    };

    std::string out = "elapsed_ms,original_avg_paths,reduced_avg_paths\n";
    std::vector<std::int64_t> ticks;
    for (std::int64_t t = 0; t < duration_ms; t += bucket_ms) ticks.push_back(t);
    ticks.push_back(duration_ms);
    char buf[64];
    for (std::int64_t t : ticks) {
        std::snprintf(buf, sizeof buf, "%lld,%.2f,%.2f",
                      static_cast<long long>(t), average(original, t),
                      average(reduced, t));
        out += buf;
        out += "\n";
    }
    return out;
}

std::string crash_summary_csv(const std::string& target,
                              const std::vector<CampaignStats>& original,
                              const std::vector<CampaignStats>& reduced) {
    std::string header = "target";
    std::string row = target;
    for (std::size_t i = 0; i < original.size(); ++i) {
        header += ",orig_job_" + std::to_string(i + 1);
        row += "," + std::to_string(original[i].unique_crashes);
    }
    for (std::size_t i = 0; i < reduced.size(); ++i) {
        header += ",red_job_" + std::to_string(i + 1);
        row += "," + std::to_string(reduced[i].unique_crashes);
    }
    return header + "\n" + row + "\n";
}

std::string coverage_summary_csv(const std::string& target,
                                 const std::vector<CampaignStats>& original,
                                 const std::vector<CampaignStats>& reduced) {
    auto union_sizes = [](const std::vector<CampaignStats>& runs) {
        std::set<std::string> stmts, branches;
        for (const auto& r : runs) {
            stmts.insert(r.statements_covered.begin(), r.statements_covered.end());
            branches.insert(r.branches_covered.begin(), r.branches_covered.end());
        }
        return std::pair{stmts.size(), branches.size()};
    };
    const auto [ol, ob] = union_sizes(original);
    const auto [rl, rb] = union_sizes(reduced);
    return "target,orig_lines,orig_branches,red_lines,red_branches\n" + target +
           "," + std::to_string(ol) + "," + std::to_string(ob) + "," +
           std::to_string(rl) + "," + std::to_string(rb) + "\n";
}

std::string format_csv_table(const std::string& csv) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream lines(csv);
    std::string line;
    while (std::getline(lines, line)) {
        std::vector<std::string> fields;
        std::istringstream fs_line(line);
        std::string field;
        while (std::getline(fs_line, field, ',')) fields.push_back(field);
        if (line.empty()) fields.clear();
        rows.push_back(std::move(fields));
    }
    std::vector<std::size_t> widths;
    for (const auto& row : rows)
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (widths.size() <= i) widths.resize(i + 1, 0);
            widths[i] = std::max(widths[i], row[i].size());
        }
    std::string out;
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out += row[i];
            if (i + 1 < row.size())
                out += std::string(widths[i] - row[i].size() + 2, ' ');
        }
        out += "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Plan files and --print-config
// ---------------------------------------------------------------------------

namespace {

SeedType parse_seed_type(const std::string& s) {
    if (s == "text") return SeedType::Text;
    if (s == "binary") return SeedType::Binary;
    throw std::invalid_argument("seed type must be 'text' or 'binary', got '" +
                                s + "'");
}

json target_to_json(const TargetOptions& target) {
    if (target.command.empty()) return json(target.spec);
    return json{{"command", target.command},
                {"coverage_report", target.report_path},
                {"workdir", target.workdir},
                {"timeout", format_ms(target.timeout)},
                {"env", target.env}};
}

json campaign_to_json(const CampaignConfig& c) {
    return json{{"duration", format_ms(c.duration)},
                {"rng_seed", c.rng_seed},
                {"max_input_size", c.max_input_size},
                {"mutation_stack_max", c.mutation_stack_max}};
}

json reduction_to_json(double c, double r, Duration budget,
                       const std::optional<SeedType>& seed_type,
                       const std::optional<std::size_t>& unit_size) {
    json j{{"c_percent", c}, {"r_percent", r}, {"budget", format_ms(budget)}};
    j["seed_type"] = seed_type ? to_string(*seed_type) : "auto";
    if (unit_size) j["unit_size"] = *unit_size;
    return j;
}

void apply_target(const ExperimentPlan& plan, TargetOptions& target) {
    if (plan.target) target.spec = *plan.target;
    if (plan.command) target.command = *plan.command;
    if (plan.report_path) target.report_path = *plan.report_path;
    if (plan.workdir) target.workdir = *plan.workdir;
    if (plan.timeout) target.timeout = *plan.timeout;
    if (!plan.env.empty()) target.env = plan.env;
}

void apply_campaign(const ExperimentPlan& plan, CampaignConfig& campaign) {
    if (plan.duration) campaign.duration = *plan.duration;
    if (plan.rng_seed) campaign.rng_seed = *plan.rng_seed;
    if (plan.max_input_size) campaign.max_input_size = *plan.max_input_size;
    if (plan.mutation_stack_max)
        campaign.mutation_stack_max = *plan.mutation_stack_max;
}

}  // namespace

ExperimentPlan load_plan(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open plan file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::invalid_argument("plan parse error in " + path + ": " +
                                    e.what());
    }

    ExperimentPlan plan;
    try {
        if (j.contains("target")) plan.target = j["target"].get<std::string>();
        if (j.contains("external")) {
            const json& e = j["external"];
            if (e.contains("command"))
                plan.command = e["command"].get<std::string>();
            if (e.contains("coverage_report"))
                plan.report_path = e["coverage_report"].get<std::string>();
            if (e.contains("workdir"))
                plan.workdir = e["workdir"].get<std::string>();
            if (e.contains("timeout"))
                plan.timeout = parse_duration(e["timeout"].get<std::string>());
            if (e.contains("env"))
                plan.env = e["env"].get<std::vector<std::string>>();
        }
        if (j.contains("seed_path"))
            plan.seed_path = j["seed_path"].get<std::string>();
        if (j.contains("reduction")) {
            const json& r = j["reduction"];
            if (r.contains("c_percent")) plan.c_percent = r["c_percent"].get<double>();
            if (r.contains("r_percent")) plan.r_percent = r["r_percent"].get<double>();
            if (r.contains("budget"))
                plan.budget = parse_duration(r["budget"].get<std::string>());
            if (r.contains("seed_type")) {
                const auto s = r["seed_type"].get<std::string>();
                if (s != "auto") plan.seed_type = parse_seed_type(s);
            }
            if (r.contains("unit_size"))
                plan.unit_size = r["unit_size"].get<std::size_t>();
        }
        if (j.contains("campaign")) {
            const json& c = j["campaign"];
            if (c.contains("duration"))
                plan.duration = parse_duration(c["duration"].get<std::string>());
            if (c.contains("rng_seed"))
                plan.rng_seed = c["rng_seed"].get<std::uint64_t>();
            if (c.contains("max_input_size"))
                plan.max_input_size = c["max_input_size"].get<std::size_t>();
            if (c.contains("mutation_stack_max"))
                plan.mutation_stack_max =
                    c["mutation_stack_max"].get<std::size_t>();
        }
        if (j.contains("repetitions"))
            plan.repetitions = j["repetitions"].get<std::size_t>();
        if (j.contains("bucket_ms"))
            plan.bucket_ms = j["bucket_ms"].get<std::int64_t>();
        if (j.contains("output_dir"))
            plan.output_dir = j["output_dir"].get<std::string>();
    } catch (const json::exception& e) {
        throw std::invalid_argument("plan field error in " + path + ": " +
                                    e.what());
    }
    return plan;
}

void apply_plan(const ExperimentPlan& plan, ReduceOptions& opts) {
    apply_target(plan, opts.target);
    if (plan.seed_path) opts.seed_path = *plan.seed_path;
    if (plan.c_percent) opts.c_percent = *plan.c_percent;
    if (plan.r_percent) opts.r_percent = *plan.r_percent;
    if (plan.budget) opts.budget = *plan.budget;
    if (plan.seed_type) opts.seed_type = plan.seed_type;
    if (plan.unit_size) opts.unit_size = plan.unit_size;
    if (plan.output_dir) opts.output_dir = *plan.output_dir;
}

void apply_plan(const ExperimentPlan& plan, FuzzOptions& opts) {
    apply_target(plan, opts.target);
    if (plan.seed_path) opts.seed_path = *plan.seed_path;
    apply_campaign(plan, opts.campaign);
    if (plan.output_dir) opts.output_dir = *plan.output_dir;
}

void apply_plan(const ExperimentPlan& plan, CompareOptions& opts) {
    apply_target(plan, opts.target);
    if (plan.seed_path) opts.seed_path = *plan.seed_path;
    if (plan.c_percent) opts.c_percent = *plan.c_percent;
    if (plan.r_percent) opts.r_percent = *plan.r_percent;
    if (plan.budget) opts.budget = *plan.budget;
    if (plan.seed_type) opts.seed_type = plan.seed_type;
    if (plan.unit_size) opts.unit_size = plan.unit_size;
    apply_campaign(plan, opts.campaign);
    if (plan.repetitions) opts.repetitions = *plan.repetitions;
    if (plan.bucket_ms) opts.bucket_ms = *plan.bucket_ms;
    if (plan.output_dir) opts.output_dir = *plan.output_dir;
}

std::string config_json(const ReduceOptions& opts) {
    json j;
    if (opts.target.command.empty())
        j["target"] = opts.target.spec;
    else
        j["external"] = target_to_json(opts.target);
    j["seed_path"] = opts.seed_path;
    j["reduction"] = reduction_to_json(opts.c_percent, opts.r_percent,
                                       opts.budget, opts.seed_type,
                                       opts.unit_size);
    j["output_dir"] = opts.output_dir;
    return j.dump(2) + "\n";
}

std::string config_json(const FuzzOptions& opts) {
    json j;
    if (opts.target.command.empty())
        j["target"] = opts.target.spec;
    else
        j["external"] = target_to_json(opts.target);
    j["seed_path"] = opts.seed_path;
    j["campaign"] = campaign_to_json(opts.campaign);
    j["emit_dump"] = opts.emit_dump;
    j["output_dir"] = opts.output_dir;
    return j.dump(2) + "\n";
}

std::string config_json(const CompareOptions& opts) {
    json j;
    if (opts.target.command.empty())
        j["target"] = opts.target.spec;
    else
        j["external"] = target_to_json(opts.target);
    j["seed_path"] = opts.seed_path;
    j["reduction"] = reduction_to_json(opts.c_percent, opts.r_percent,
                                       opts.budget, opts.seed_type,
                                       opts.unit_size);
    j["campaign"] = campaign_to_json(opts.campaign);
    j["repetitions"] = opts.repetitions;
    j["bucket_ms"] = opts.bucket_ms;
    j["output_dir"] = opts.output_dir;
    return j.dump(2) + "\n";
}

}  // namespace seedtrim
