#pragma once

#include <functional>
#include <optional>
#include <string>

#include "seedtrim/core.hpp"
#include "seedtrim/oracle.hpp"

// Delta-debugging seed reduction: shrink a seed to a 1-minimal one that
// still satisfies three constraints against the *original* seed's run --
// coverage similarity >= C%, size reduction >= R%, and an equal exit status
// -- within a time budget.

namespace seedtrim {

enum class SeedType { Text, Binary };

enum class Violation { ExitStatus, Coverage, Reduction };

struct ConstraintCheck {
    bool pass = false;
    std::optional<Violation> first_violated;

    static ConstraintCheck passed() { return {true, std::nullopt}; }
    static ConstraintCheck failed(Violation v) { return {false, v}; }
};

// Checks a candidate against the original run. Violations are tested in
// order ExitStatus, Coverage, Reduction; the first one is reported. Total
// over valid inputs (a candidate larger than the original simply fails the
// reduction constraint).
ConstraintCheck check_constraints(const ExecutionOutcome& original_outcome,
                                  std::size_t original_size,
                                  const ExecutionOutcome& candidate_outcome,
                                  std::size_t candidate_size,
                                  const ReductionConfig& config);

enum class ReductionStatus { Reduced, Rejected, OriginalRetained };

struct ReductionReport {
    std::string target_name;
    SeedType seed_type = SeedType::Binary;
    std::size_t original_size = 0;
    std::size_t reduced_size = 0;
    double size_reduction = 0.0;       // percent
    double coverage_similarity = 1.0;  // ratio of the final result vs original
    Duration elapsed{0};
    ReductionStatus status = ReductionStatus::OriginalRetained;
    std::string reject_reason;   // set when status == Rejected
    bool budget_expired = false;
    bool similarity_vacuous = false;  // original covered no statements
    std::size_t executions = 0;
    Bytes reduced_bytes;
};

// Test/observer hooks. on_accept fires for every accepted intermediate
// candidate, in acceptance order.
struct ReduceHooks {
    std::function<void(const Bytes& accepted)> on_accept;
};

// Runs ddmin: starting at granularity n=2, try each chunk alone (subset
// pass), then the seed minus each chunk (complement pass); the first passing
// candidate becomes the new current seed, otherwise the granularity doubles
// until it reaches single units. Candidates are checked against the original
// outcome and size at every step, outcomes are cached by content so no input
// is executed twice, and the budget is checked before each execution.
// Simulated targets run on the virtual clock, external ones on the wall
// clock. Throws OracleError when the original seed itself times out.
ReductionReport reduce(const TargetSpec& target, const Seed& seed,
                       const ReductionConfig& config,
                       const ReduceHooks& hooks = {});

// Table 2-shaped rendering: one CSV row and a human-readable block.
std::string reduction_csv_header();
std::string reduction_csv_row(const ReductionReport& report);
std::string reduction_table(const ReductionReport& report);

std::string to_string(ReductionStatus status);
std::string to_string(SeedType type);

}  // namespace seedtrim
