#include "seedtrim/oracle.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

namespace seedtrim {

namespace {

constexpr const char* kPlaceholder = "@@";

std::size_t count_placeholders(const std::string& s) {
    std::size_t count = 0;
    for (std::size_t pos = s.find(kPlaceholder); pos != std::string::npos;
         pos = s.find(kPlaceholder, pos + 2))
        ++count;
    return count;
}

std::string substitute_placeholder(const std::string& tmpl, const std::string& path) {
    std::string out = tmpl;
    for (std::size_t pos = out.find(kPlaceholder); pos != std::string::npos;
         pos = out.find(kPlaceholder, pos + path.size()))
        out.replace(pos, 2, path);
    return out;
}

// ---------------------------------------------------------------------------
// Simulated targets
// ---------------------------------------------------------------------------

ExecutionOutcome finish_sim(ExitStatus status, CoverageSet cov) {
    ExecutionOutcome out;
    out.status = std::move(status);
    out.coverage = std::move(cov);
    out.wall_time = kSimExecQuantum;
    return out;
}

ExecutionOutcome run_distinct_bytes(const Bytes& input) {
    CoverageSet cov;
    for (std::uint8_t b : input)
        cov.statements.insert("S_" + std::to_string(b));
    return finish_sim(ExitStatus::ok(), std::move(cov));
}

ExecutionOutcome run_constant_coverage(const Bytes&) {
    CoverageSet cov;
    cov.statements.insert("S_0");
    return finish_sim(ExitStatus::ok(), std::move(cov));
}

constexpr std::size_t kHeaderEnd = 64;
constexpr std::size_t kFieldCount = 15;

std::uint32_t read_le32(const Bytes& b, std::size_t off) {
    return static_cast<std::uint32_t>(b[off]) |
           static_cast<std::uint32_t>(b[off + 1]) << 8 |
           static_cast<std::uint32_t>(b[off + 2]) << 16 |
           static_cast<std::uint32_t>(b[off + 3]) << 24;
}

ExecutionOutcome run_header_payload(const Bytes& input) {
    static constexpr std::uint8_t kMagic[4] = {0xDE, 0xAD, 0xBE, 0xEF};

    CoverageSet cov;
    if (input.size() < 4 || !std::equal(kMagic, kMagic + 4, input.begin())) {
        cov.statements.insert("M_fail");
        return finish_sim(ExitStatus::error(1), std::move(cov));
    }
    cov.statements.insert("M_ok");

    if (input.size() < kHeaderEnd) {
        // Truncated header: only fields fully contained in the input parse.
        for (std::size_t i = 0; i < kFieldCount; ++i) {
            const std::size_t off = 4 + 4 * i;
            if (off + 4 > input.size()) break;
            cov.statements.insert("H_" + std::to_string(i));
            if (read_le32(input, off) != 0)
                cov.branches.insert("H_" + std::to_string(i) + ":1");
        }
        return finish_sim(ExitStatus::error(2), std::move(cov));
    }

    std::uint32_t fields[kFieldCount];
    for (std::size_t i = 0; i < kFieldCount; ++i) {
        fields[i] = read_le32(input, 4 + 4 * i);
        cov.statements.insert("H_" + std::to_string(i));
        if (fields[i] != 0) cov.branches.insert("H_" + std::to_string(i) + ":1");
    }

    if (fields[3] == 0xFFFFFFFFu &&
        input.size() < kHeaderEnd + static_cast<std::uint64_t>(fields[7])) {
        return finish_sim(ExitStatus::crash("hdr-overflow"), std::move(cov));
    }

    // The payload loop covers a single statement no matter how long it is.
    if (input.size() > kHeaderEnd) cov.statements.insert("P_loop");
    return finish_sim(ExitStatus::ok(), std::move(cov));
}

ExecutionOutcome run_xml_like(const Bytes& input) {
    CoverageSet cov;
    std::size_t depth = 0;
    std::size_t max_depth = 0;
    bool in_tag = false;
    bool closing_tag = false;
    char prev_in_tag = '\0';
    bool unbalanced = false;

    for (std::uint8_t raw : input) {
        const char c = static_cast<char>(raw);
        if (!in_tag) {
            if (c == '<') {
                in_tag = true;
                closing_tag = false;
                prev_in_tag = '\0';
                cov.statements.insert("X_open");
            } else if (c == '>') {
                unbalanced = true;  // stray close
                break;
            } else if (!std::isspace(static_cast<unsigned char>(raw))) {
                cov.statements.insert("X_text");
            }
        } else {
            if (c == '>') {
                in_tag = false;
                if (closing_tag) {
                    if (depth == 0) {
                        unbalanced = true;
                        break;
                    }
                    --depth;
                } else if (prev_in_tag == '/') {
                    // self-closing: opens and closes in place
                    max_depth = std::max(max_depth, depth + 1);
                } else {
                    ++depth;
                    max_depth = std::max(max_depth, depth);
                }
            } else {
                if (prev_in_tag == '\0' && c == '/') closing_tag = true;
                if (c == '=') cov.statements.insert("X_attr");
                prev_in_tag = c;
            }
        }
    }
    if (in_tag || depth != 0) unbalanced = true;

    if (max_depth > 0)
        cov.statements.insert("X_depth_" +
                              std::to_string(std::min<std::size_t>(max_depth, 8)));

    return finish_sim(unbalanced ? ExitStatus::error(1) : ExitStatus::ok(),
                      std::move(cov));
}

ExecutionOutcome run_simulated(SimTarget target, const Bytes& input) {
    switch (target) {
        case SimTarget::DistinctBytes: return run_distinct_bytes(input);
        case SimTarget::ConstantCoverage: return run_constant_coverage(input);
        case SimTarget::HeaderPayload: return run_header_payload(input);
        case SimTarget::XmlLike: return run_xml_like(input);
    }
    throw std::logic_error("unknown simulated target");
}

// ---------------------------------------------------------------------------
// External command runner
// ---------------------------------------------------------------------------

std::string signal_name(int sig) {
    switch (sig) {
        case SIGSEGV: return "SIGSEGV";
        case SIGABRT: return "SIGABRT";
        case SIGBUS: return "SIGBUS";
        case SIGFPE: return "SIGFPE";
        case SIGILL: return "SIGILL";
        case SIGKILL: return "SIGKILL";
        case SIGTERM: return "SIGTERM";
        case SIGPIPE: return "SIGPIPE";
        default: return "signal-" + std::to_string(sig);
    }
}

// First word of the command template, for the executable pre-check.
std::string command_program(const std::string& tmpl) {
    std::size_t begin = tmpl.find_first_not_of(" \t");
    if (begin == std::string::npos) return {};
    std::size_t end = tmpl.find_first_of(" \t", begin);
    return tmpl.substr(begin, end == std::string::npos ? std::string::npos
                                                       : end - begin);
}

bool program_exists(const std::string& prog) {
    if (prog.find('/') != std::string::npos)
        return ::access(prog.c_str(), X_OK) == 0;
    const char* path = std::getenv("PATH");
    if (!path) return false;
    std::stringstream ss(path);
    std::string dir;
    while (std::getline(ss, dir, ':')) {
        if (dir.empty()) continue;
        if (::access((dir + "/" + prog).c_str(), X_OK) == 0) return true;
    }
    return false;
}

std::string unique_temp_input_path(const std::string& workdir) {
    static std::atomic<std::uint64_t> counter{0};
    namespace fs = std::filesystem;
    const fs::path dir = workdir.empty() ? fs::temp_directory_path()
                                         : fs::path(workdir);
    const auto id = counter.fetch_add(1);
    return (dir / ("seedtrim-" + std::to_string(::getpid()) + "-" +
                   std::to_string(id) + ".in"))
        .string();
}

void write_file_bytes(const std::string& path, const Bytes& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw OracleError("cannot write input file: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    out.close();
    if (!out) throw OracleError("cannot write input file: " + path);
}

struct RunResult {
    ExitStatus status;
    Duration wall_time{0};
};

RunResult run_command(const std::string& cmd, const ExternalTarget& target) {
    const auto start = std::chrono::steady_clock::now();

    pid_t pid = ::fork();
    if (pid < 0) throw OracleError("fork failed");
    if (pid == 0) {
        ::setpgid(0, 0);
        int devnull = ::open("/dev/null", O_RDWR);
        if (devnull >= 0) {
            ::dup2(devnull, STDIN_FILENO);
            ::dup2(devnull, STDOUT_FILENO);
            ::dup2(devnull, STDERR_FILENO);
            if (devnull > STDERR_FILENO) ::close(devnull);
        }
        if (!target.workdir.empty() &&
            ::chdir(target.workdir.c_str()) != 0)
            ::_exit(126);
        for (const auto& kv : target.env) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) continue;
            ::setenv(kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str(), 1);
        }
        ::execl("/bin/sh", "sh", "-c", cmd.c_str(), static_cast<char*>(nullptr));
        ::_exit(127);
    }

    const auto deadline = start + target.per_run_timeout;
    int status = 0;
    bool timed_out = false;
    for (;;) {
        const pid_t r = ::waitpid(pid, &status, WNOHANG);
        if (r == pid) break;
        if (r < 0) throw OracleError("waitpid failed");
        if (std::chrono::steady_clock::now() >= deadline) {
            ::kill(-pid, SIGKILL);
            ::kill(pid, SIGKILL);
            ::waitpid(pid, &status, 0);
            timed_out = true;
            break;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(1));
    }

    RunResult result;
    result.wall_time = std::chrono::duration_cast<Duration>(
        std::chrono::steady_clock::now() - start);
    if (timed_out) {
        result.status = ExitStatus::timeout();
    } else if (WIFEXITED(status)) {
        // The command runs under sh -c, which reports a child killed by
        // signal N as exit code 128+N instead of dying itself; fold that
        // convention back into Crash.
        const int code = WEXITSTATUS(status);
        if (code > 128 && code <= 128 + 64)
            result.status = ExitStatus::crash(signal_name(code - 128));
        else
            result.status = ExitStatus::from_exit_code(code);
    } else if (WIFSIGNALED(status)) {
        result.status = ExitStatus::crash(signal_name(WTERMSIG(status)));
    } else {
        result.status = ExitStatus::crash("unknown-termination");
    }
    return result;
}

std::string read_report_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw OracleError("coverage report not found: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ExecutionOutcome run_external(const ExternalTarget& target, const Bytes& input) {
    const std::string prog = command_program(target.command_template);
    if (prog.empty() || (prog.find('=') == std::string::npos && !program_exists(prog)))
        throw OracleError("command not found: " + prog);

    namespace fs = std::filesystem;
    const std::string input_path = unique_temp_input_path(target.workdir);
    write_file_bytes(input_path, input);

    const std::string report_path =
        substitute_placeholder(target.coverage_report_path, input_path);
    const bool per_run_report =
        target.coverage_report_path.find(kPlaceholder) != std::string::npos;

    std::error_code ec;
    ExecutionOutcome outcome;
    try {
        const std::string cmd =
            substitute_placeholder(target.command_template, input_path);
        const RunResult run = run_command(cmd, target);
        outcome.status = run.status;
        outcome.wall_time = run.wall_time;
        if (outcome.status.kind != ExitStatus::Kind::Timeout) {
            try {
                outcome.coverage = parse_coverage_report(read_report_file(report_path));
            } catch (const OracleError& e) {
                throw OracleError(std::string(e.what()) + " (report: " + report_path +
                                  ")");
            }
        }
    } catch (...) {
        fs::remove(input_path, ec);
        if (per_run_report) fs::remove(report_path, ec);
        throw;
    }
    fs::remove(input_path, ec);
    if (per_run_report) fs::remove(report_path, ec);
    return outcome;
}

}  // namespace

// ---------------------------------------------------------------------------
// TargetSpec
// ---------------------------------------------------------------------------

TargetSpec TargetSpec::sim(SimTarget t) {
    TargetSpec spec;
    spec.simulated = t;
    return spec;
}

TargetSpec TargetSpec::external_cmd(ExternalTarget t) {
    TargetSpec spec;
    spec.external = std::move(t);
    spec.validate();
    return spec;
}

std::string TargetSpec::name() const {
    if (simulated) {
        switch (*simulated) {
            case SimTarget::HeaderPayload: return "sim:header-payload";
            case SimTarget::XmlLike: return "sim:xml-like";
            case SimTarget::ConstantCoverage: return "sim:constant";
            case SimTarget::DistinctBytes: return "sim:distinct-bytes";
        }
    }
    if (external) {
        const std::string prog = command_program(external->command_template);
        const auto slash = prog.rfind('/');
        return slash == std::string::npos ? prog : prog.substr(slash + 1);
    }
    return "<unset>";
}

void TargetSpec::validate() const {
    if (simulated.has_value() == external.has_value())
        throw std::invalid_argument(
            "target must be exactly one of simulated or external");
    if (external) {
        if (count_placeholders(external->command_template) != 1)
            throw std::invalid_argument(
                "command template must contain exactly one @@");
        if (external->coverage_report_path.empty())
            throw std::invalid_argument("coverage report path is required");
        if (external->per_run_timeout <= Duration::zero())
            throw std::invalid_argument("per-run timeout must be positive");
    }
}

TargetSpec parse_target_spec(const std::string& text) {
    if (text == "sim:header-payload") return TargetSpec::sim(SimTarget::HeaderPayload);
    if (text == "sim:xml-like") return TargetSpec::sim(SimTarget::XmlLike);
    if (text == "sim:constant") return TargetSpec::sim(SimTarget::ConstantCoverage);
    if (text == "sim:distinct-bytes") return TargetSpec::sim(SimTarget::DistinctBytes);
    throw std::invalid_argument(
        "unknown target '" + text +
        "' (expected sim:header-payload, sim:xml-like, sim:constant or "
        "sim:distinct-bytes)");
}

// ---------------------------------------------------------------------------
// Coverage report format
// ---------------------------------------------------------------------------

CoverageSet parse_coverage_report(const std::string& text) {
    CoverageSet cov;
    std::size_t line_no = 0;
    std::istringstream stream(text);
    std::string line;
    while (std::getline(stream, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;

        const auto space = line.find(' ');
        if (space == std::string::npos)
            throw OracleError("line " + std::to_string(line_no) +
                              ": malformed record '" + line + "'");
        const std::string kind = line.substr(0, space);
        std::string id = line.substr(space + 1);
        const auto first = id.find_first_not_of(' ');
        if (first == std::string::npos)
            throw OracleError("line " + std::to_string(line_no) +
                              ": record has no identifier");
        id = id.substr(first);

        if (kind == "stmt") {
            cov.statements.insert(id);
        } else if (kind == "branch") {
            cov.branches.insert(id);
        } else {
            throw OracleError("line " + std::to_string(line_no) +
                              ": unknown record kind '" + kind + "'");
        }
    }
    return cov;
}

std::string serialize_coverage_report(const CoverageSet& cov) {
    std::string out;
    for (const auto& s : cov.statements) out += "stmt " + s + "\n";
    for (const auto& b : cov.branches) out += "branch " + b + "\n";
    return out;
}

// ---------------------------------------------------------------------------
// execute
// ---------------------------------------------------------------------------

ExecutionOutcome execute(const TargetSpec& target, const Bytes& input) {
    target.validate();
    if (target.simulated) return run_simulated(*target.simulated, input);
    return run_external(*target.external, input);
}

ExecutionOutcome execute(const TargetSpec& target, const Seed& seed) {
    return execute(target, seed.bytes);
}

}  // namespace seedtrim
