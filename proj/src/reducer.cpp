#include "seedtrim/reducer.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <map>

namespace seedtrim {

namespace {

// Wall clock for external targets, execution-counted virtual clock for
// simulated ones (reproducible elapsed values and budget decisions).
class BudgetClock {
  public:
    explicit BudgetClock(bool use_virtual)
        : virtual_(use_virtual), start_(std::chrono::steady_clock::now()) {}

    Duration elapsed() const {
        if (virtual_) return virtual_elapsed_;
        return std::chrono::duration_cast<Duration>(
            std::chrono::steady_clock::now() - start_);
    }

    void charge_execution() {
        if (virtual_) virtual_elapsed_ += kSimExecQuantum;
    }

  private:
    bool virtual_;
    std::chrono::steady_clock::time_point start_;
    Duration virtual_elapsed_{0};
};

std::string format_percent(double pct) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f%%", pct);
    return buf;
}

std::string format_elapsed(Duration d) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3fs", static_cast<double>(d.count()) / 1000.0);
    return buf;
}

}  // namespace

ConstraintCheck check_constraints(const ExecutionOutcome& original_outcome,
                                  std::size_t original_size,
                                  const ExecutionOutcome& candidate_outcome,
                                  std::size_t candidate_size,
                                  const ReductionConfig& config) {
    if (!(candidate_outcome.status == original_outcome.status))
        return ConstraintCheck::failed(Violation::ExitStatus);

    // Cross-multiplied comparisons keep integral thresholds exact.
    const auto& original_stmts = original_outcome.coverage.statements;
    if (!original_stmts.empty()) {
        std::size_t common = 0;
        for (const auto& stmt : candidate_outcome.coverage.statements)
            if (original_stmts.count(stmt)) ++common;
        if (100.0 * static_cast<double>(common) <
            config.c_percent * static_cast<double>(original_stmts.size()))
            return ConstraintCheck::failed(Violation::Coverage);
    }

    const double removed = static_cast<double>(original_size) -
                           static_cast<double>(candidate_size);
    if (100.0 * removed < config.r_percent * static_cast<double>(original_size))
        return ConstraintCheck::failed(Violation::Reduction);

    return ConstraintCheck::passed();
}

ReductionReport reduce(const TargetSpec& target, const Seed& seed,
                       const ReductionConfig& config, const ReduceHooks& hooks) {
    config.validate();
    target.validate();
    if (seed.empty()) throw std::invalid_argument("seed must not be empty");

    Seed current(seed.bytes, config.unit, config.unit_size);
    const std::size_t original_size = seed.bytes.size();

    BudgetClock clock(target.is_simulated());
    std::map<Bytes, ExecutionOutcome> cache;
    std::size_t executions = 0;
    bool budget_expired = false;

    // Returns the cached or fresh outcome, or nullptr once the budget is
    // spent (checked before each execution; cache hits are free).
    auto evaluate = [&](const Bytes& candidate) -> const ExecutionOutcome* {
        auto it = cache.find(candidate);
        if (it != cache.end()) return &it->second;
        if (clock.elapsed() >= config.time_budget) {
            budget_expired = true;
            return nullptr;
        }
        ExecutionOutcome outcome = execute(target, candidate);
        ++executions;
        clock.charge_execution();
        return &cache.emplace(candidate, std::move(outcome)).first->second;
    };

    const ExecutionOutcome* baseline = evaluate(seed.bytes);
    if (!baseline) throw std::invalid_argument("time budget too small to run the original seed");
    if (baseline->status.kind == ExitStatus::Kind::Timeout)
        throw OracleError("original seed times out");
    const ExecutionOutcome original_outcome = *baseline;

    auto passes = [&](const ExecutionOutcome& outcome, std::size_t size) {
        return check_constraints(original_outcome, original_size, outcome, size,
                                 config)
            .pass;
    };

    bool any_accept = false;
    std::size_t n = 2;
    while (!budget_expired) {
        const std::size_t units = current.unit_count();
        if (units == 0) break;  // empty seed: trivially 1-minimal
        n = std::max<std::size_t>(1, std::min(n, units));
        const auto chunks = partition(current, n);
        bool accepted = false;

        // Subset pass: each chunk alone. At n=1 the only subset is the seed
        // itself, which is never an acceptance (sizes must strictly shrink).
        for (std::size_t i = 0; i < n; ++i) {
            Bytes candidate(current.bytes.begin() +
                                static_cast<std::ptrdiff_t>(chunks[i].offset),
                            current.bytes.begin() +
                                static_cast<std::ptrdiff_t>(chunks[i].offset +
                                                            chunks[i].length));
            if (candidate.size() == current.size()) continue;
            const ExecutionOutcome* outcome = evaluate(candidate);
            if (!outcome) break;
            if (passes(*outcome, candidate.size())) {
                current = Seed(std::move(candidate), config.unit, config.unit_size);
                n = 2;
                accepted = true;
                any_accept = true;
                if (hooks.on_accept) hooks.on_accept(current.bytes);
                break;
            }
        }
        if (budget_expired) break;
        if (accepted) continue;

        // Complement pass: the seed minus each chunk.
        for (std::size_t i = 0; i < n; ++i) {
            Seed candidate = remove_chunk(current, i, n);
            const ExecutionOutcome* outcome = evaluate(candidate.bytes);
            if (!outcome) break;
            if (passes(*outcome, candidate.size())) {
                current = std::move(candidate);
                n = std::max<std::size_t>(n - 1, 2);
                accepted = true;
                any_accept = true;
                if (hooks.on_accept) hooks.on_accept(current.bytes);
                break;
            }
        }
        if (budget_expired) break;
        if (accepted) continue;

        if (n < units) {
            n = std::min(2 * n, units);
        } else {
            break;  // 1-minimal at unit granularity
        }
    }

    ReductionReport report;
    report.target_name = target.name();
    report.seed_type = config.unit == ChunkUnit::Char ? SeedType::Text
                                                      : SeedType::Binary;
    report.original_size = original_size;
    report.elapsed = clock.elapsed();
    report.budget_expired = budget_expired;
    report.similarity_vacuous = original_outcome.coverage.statements.empty();
    report.executions = executions;

    if (any_accept) {
        report.status = ReductionStatus::Reduced;
        report.reduced_bytes = current.bytes;
    } else if (budget_expired) {
        report.status = ReductionStatus::Rejected;
        report.reject_reason = "time budget exceeded";
        report.reduced_bytes = seed.bytes;
    } else if (config.r_percent > 0.0) {
        report.status = ReductionStatus::Rejected;
        report.reject_reason = "no candidate meets R%";
        report.reduced_bytes = seed.bytes;
    } else {
        report.status = ReductionStatus::OriginalRetained;
        report.reduced_bytes = seed.bytes;
    }

    report.reduced_size = report.reduced_bytes.size();
    report.size_reduction = percent_reduction(original_size, report.reduced_size);
    report.coverage_similarity = cov_similarity(
        original_outcome.coverage, cache.at(report.reduced_bytes).coverage);
    return report;
}

std::string to_string(ReductionStatus status) {
    switch (status) {
        case ReductionStatus::Reduced: return "reduced";
        case ReductionStatus::Rejected: return "rejected";
        case ReductionStatus::OriginalRetained: return "original-retained";
    }
    return "?";
}

std::string to_string(SeedType type) {
    return type == SeedType::Text ? "text" : "binary";
}

std::string reduction_csv_header() {
    return "seed_type,target,t_o_bytes,t_r_bytes,size_reduction,"
           "coverage_similarity,reduction_time\n";
}

std::string reduction_csv_row(const ReductionReport& r) {
    return to_string(r.seed_type) + "," + r.target_name + "," +
           std::to_string(r.original_size) + "," + std::to_string(r.reduced_size) +
           "," + format_percent(r.size_reduction) + "," +
           format_percent(100.0 * r.coverage_similarity) + "," +
           format_elapsed(r.elapsed) + "\n";
}

std::string reduction_table(const ReductionReport& r) {
    const std::vector<std::pair<std::string, std::string>> cols = {
        {"seed_type", to_string(r.seed_type)},
        {"target", r.target_name},
        {"t_o_bytes", std::to_string(r.original_size)},
        {"t_r_bytes", std::to_string(r.reduced_size)},
        {"size_reduction", format_percent(r.size_reduction)},
        {"coverage_similarity", format_percent(100.0 * r.coverage_similarity)},
        {"reduction_time", format_elapsed(r.elapsed)},
    };
    std::string header, row;
    for (const auto& [name, value] : cols) {
        const std::size_t width = std::max(name.size(), value.size()) + 2;
        header += name + std::string(width - name.size(), ' ');
        row += value + std::string(width - value.size(), ' ');
    }
    std::string status_line = "status: " + to_string(r.status);
    if (r.status == ReductionStatus::Rejected)
        status_line += " (" + r.reject_reason + ")";
    if (r.budget_expired && r.status == ReductionStatus::Reduced)
        status_line += " [budget expired]";
    status_line += "  executions: " + std::to_string(r.executions);
    return header + "\n" + row + "\n" + status_line + "\n";
}

}  // namespace seedtrim
