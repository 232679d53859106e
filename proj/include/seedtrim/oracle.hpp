#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "seedtrim/core.hpp"

// Executes a target program on an input and produces an ExecutionOutcome.
// Two backends: an external command runner (AFL-style `@@` placeholder plus
// a coverage report file written by the target or a wrapper script), and
// deterministic built-in simulated targets for tests and desk-scale
// experiments.

namespace seedtrim {

// Failure of the oracle machinery itself (command not found, report missing
// or unparsable). Distinct from ExitStatus, which describes the target run.
class OracleError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Built-in targets. All are pure functions of the input bytes.
//
//  DistinctBytes    Ok always; one statement S_v per distinct byte value v.
//  ConstantCoverage Ok always; statements {S_0} regardless of input.
//  HeaderPayload    binary format: 4-byte magic de ad be ef, then 15
//                   little-endian u32 header fields (statement H_i each,
//                   branch H_i:1 when nonzero), then payload bytes that
//                   cover only P_loop no matter how long they are. Bad magic
//                   is Error(1) with {M_fail}; a valid-magic input shorter
//                   than 64 bytes is Error(2) covering M_ok plus the fields
//                   it fully contains; field 3 == 0xffffffff with total
//                   length < 64 + field 7 crashes with kind "hdr-overflow".
//  XmlLike          text format: X_open once any '<' is consumed, X_attr for
//                   '=' inside a tag, X_text for non-whitespace outside tags,
//                   X_depth_k for the maximum nesting depth k reached
//                   (capped at 8). Unbalanced brackets are Error(1),
//                   balanced input is Ok. Never crashes.
enum class SimTarget { HeaderPayload, XmlLike, ConstantCoverage, DistinctBytes };

// Simulated runs advance a virtual clock instead of the wall clock so that
// campaigns and reductions are exactly reproducible: each execution costs
// 1000 / kSimExecsPerSecond milliseconds of virtual time. The nominal rate
// is deliberately desk-scale; it stands in for the rate of a real
// instrumented target, not for how fast the simulation can go.
inline constexpr std::int64_t kSimExecsPerSecond = 100;
static_assert(1000 % kSimExecsPerSecond == 0,
              "virtual quantum must be a whole number of milliseconds");
inline constexpr Duration kSimExecQuantum{1000 / kSimExecsPerSecond};

struct ExternalTarget {
    std::string command_template;      // must contain exactly one @@
    std::string coverage_report_path;  // @@ inside it expands to the input path
    std::string workdir;  // child cwd and temp input location; empty = inherit
    Duration per_run_timeout{5000};
    std::vector<std::string> env;      // extra KEY=VALUE entries for the child
};

struct TargetSpec {
    std::optional<SimTarget> simulated;
    std::optional<ExternalTarget> external;

    static TargetSpec sim(SimTarget t);
    static TargetSpec external_cmd(ExternalTarget t);

    bool is_simulated() const { return simulated.has_value(); }

    // "sim:<name>" for simulated targets, the command's program name for
    // external ones. Used in reports.
    std::string name() const;

    void validate() const;  // throws std::invalid_argument
};

// Parses "sim:header-payload", "sim:xml-like", "sim:constant",
// "sim:distinct-bytes". External targets are assembled from their own
// options, not from this string. Throws std::invalid_argument.
TargetSpec parse_target_spec(const std::string& text);

// Coverage report text format: one record per line, `stmt <id>` or
// `branch <id>`; blank lines and lines starting with '#' are ignored;
// duplicates are idempotent. Throws OracleError naming the 1-based line
// number of the first malformed record.
CoverageSet parse_coverage_report(const std::string& text);

// Inverse of parse_coverage_report up to set semantics: sorted, LF-separated.
std::string serialize_coverage_report(const CoverageSet& cov);

// Runs the target on the input. For external targets the input is written to
// a fresh temp file substituted for @@, the command runs under /bin/sh -c,
// and the process exit is mapped to an ExitStatus: 0 -> Ok, nonzero ->
// Error, abnormal termination -> Crash (both a raw wait signal and the
// shell's 128+N exit convention), past the deadline -> Timeout. The coverage
// report is then parsed; temp files are deleted afterward. Timeout runs
// carry empty coverage. Simulated targets compute the outcome in-process.
// Throws OracleError for machinery failures.
ExecutionOutcome execute(const TargetSpec& target, const Bytes& input);
ExecutionOutcome execute(const TargetSpec& target, const Seed& seed);

}  // namespace seedtrim
