#include "seedtrim/fuzzer.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <stdexcept>

namespace seedtrim {

void CampaignConfig::validate() const {
    if (duration <= Duration::zero())
        throw std::invalid_argument("campaign duration must be positive");
    if (max_input_size == 0)
        throw std::invalid_argument("max_input_size must be >= 1");
    if (mutation_stack_max == 0)
        throw std::invalid_argument("mutation_stack_max must be >= 1");
}

namespace mutops {

void flip_bit(Bytes& data, std::size_t pos, unsigned bit) {
    data[pos] ^= static_cast<std::uint8_t>(1u << (bit & 7));
}

void set_byte(Bytes& data, std::size_t pos, std::uint8_t value) {
    data[pos] = value;
}

void add_to_byte(Bytes& data, std::size_t pos, int delta) {
    data[pos] = static_cast<std::uint8_t>(static_cast<int>(data[pos]) + delta);
}

void overwrite_wide(Bytes& data, std::size_t pos, std::uint32_t value,
                    unsigned width, bool big_endian) {
    for (unsigned i = 0; i < width; ++i) {
        const unsigned shift = 8 * (big_endian ? width - 1 - i : i);
        data[pos + i] = static_cast<std::uint8_t>(value >> shift);
    }
}

void delete_block(Bytes& data, std::size_t pos, std::size_t len) {
    data.erase(data.begin() + static_cast<std::ptrdiff_t>(pos),
               data.begin() + static_cast<std::ptrdiff_t>(pos + len));
}

void duplicate_block(Bytes& data, std::size_t src, std::size_t len,
                     std::size_t insert_at) {
    Bytes block(data.begin() + static_cast<std::ptrdiff_t>(src),
                data.begin() + static_cast<std::ptrdiff_t>(src + len));
    data.insert(data.begin() + static_cast<std::ptrdiff_t>(insert_at),
                block.begin(), block.end());
}

// AFL's interesting-value tables (8/16-bit values folded into the wider ones).
const std::vector<std::int16_t>& interesting16() {
    static const std::vector<std::int16_t> values = {
        -128, -1,   0,    1,    16,  32,   64,   100,  127,  -32768,
        -129, 128,  255,  256,  512, 1000, 1024, 4096, 32767};
    return values;
}

const std::vector<std::int32_t>& interesting32() {
    static const std::vector<std::int32_t> values = {
        -128,   -1,     0,     1,        16,         32,        64,
        100,    127,    -32768, -129,    128,        255,       256,
        512,    1000,   1024,  4096,     32767,      INT32_MIN, -100663046,
        -32769, 32768,  65535, 65536,    100663045,  INT32_MAX};
    return values;
}

}  // namespace mutops

namespace {

// Block lengths are biased small the way havoc stages usually take them:
// mostly a handful of bytes, occasionally a larger slice.
std::size_t choose_block_len(Rng& rng, std::size_t hard_cap) {
    const std::uint64_t roll = rng.below(10);
    const std::size_t soft_cap = roll < 7 ? 8 : roll < 9 ? 32 : 128;
    return 1 + rng.below(std::min(soft_cap, hard_cap));
}

}  // namespace

Bytes mutate(const Bytes& input, Rng& rng, std::size_t max_stack,
             std::size_t max_input_size) {
    Bytes data = input;
    const std::size_t stack = 1 + rng.below(std::max<std::size_t>(1, max_stack));

    for (std::size_t s = 0; s < stack; ++s) {
        if (data.empty()) {
            data.push_back(rng.byte());  // insert-only fallback
            continue;
        }
        switch (rng.below(6)) {
            case 0:
                mutops::flip_bit(data, rng.below(data.size()),
                                 static_cast<unsigned>(rng.below(8)));
                break;
            case 1:
                mutops::set_byte(data, rng.below(data.size()), rng.byte());
                break;
            case 2: {
                const std::size_t pos = rng.below(data.size());
                int delta = 1 + static_cast<int>(rng.below(35));
                if (rng.coin()) delta = -delta;
                mutops::add_to_byte(data, pos, delta);
                break;
            }
            case 3: {
                const unsigned width = rng.coin() ? 4 : 2;
                if (data.size() < width) {
                    mutops::set_byte(data, rng.below(data.size()), rng.byte());
                    break;
                }
                const std::size_t pos = rng.below(data.size() - width + 1);
                std::uint32_t value;
                if (width == 4) {
                    const auto& table = mutops::interesting32();
                    value = static_cast<std::uint32_t>(table[rng.below(table.size())]);
                } else {
                    const auto& table = mutops::interesting16();
                    value = static_cast<std::uint16_t>(table[rng.below(table.size())]);
                }
                mutops::overwrite_wide(data, pos, value, width, rng.coin());
                break;
            }
            case 4: {
                if (data.size() < 2) break;  // min-length guard
                const std::size_t len = choose_block_len(rng, data.size() - 1);
                const std::size_t pos = rng.below(data.size() - len + 1);
                mutops::delete_block(data, pos, len);
                break;
            }
            case 5: {
                const std::size_t len = choose_block_len(rng, data.size());
                const std::size_t src = rng.below(data.size() - len + 1);
                const std::size_t at = rng.below(data.size() + 1);
                if (data.size() + len <= max_input_size)
                    mutops::duplicate_block(data, src, len, at);
                break;
            }
        }
    }
    if (data.size() > max_input_size) data.resize(max_input_size);
    return data;
}

std::string crash_signature(const ExecutionOutcome& outcome) {
    if (outcome.status.kind != ExitStatus::Kind::Crash)
        throw std::invalid_argument("crash_signature requires a Crash outcome");

    // FNV-1a, stable across runs and platforms (std::hash is not).
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ull;
        }
        h ^= '\n';
        h *= 1099511628211ull;
    };
    mix(outcome.status.crash_kind);
    for (const auto& stmt : outcome.coverage.statements) mix(stmt);

    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

CampaignStats run_campaign(const TargetSpec& target, const Seed& initial_seed,
                           const CampaignConfig& config,
                           const InputObserver& observer) {
    target.validate();
    config.validate();

    const bool sim = target.is_simulated();
    const auto start = std::chrono::steady_clock::now();
    const std::int64_t duration_ms = config.duration.count();
    // Simulated campaigns stop at an execution budget derived from the
    // duration; the initial seed run is setup and does not consume it.
    const std::uint64_t max_mutated =
        static_cast<std::uint64_t>(duration_ms) * kSimExecsPerSecond / 1000;

    Rng rng(config.rng_seed);
    CampaignStats stats;
    std::set<std::string> seen_signatures;
    std::vector<Bytes> queue;
    std::size_t cursor = 0;

    auto record_crash = [&](const ExecutionOutcome& outcome, std::int64_t t) {
        if (outcome.status.kind != ExitStatus::Kind::Crash) return;
        std::string sig = crash_signature(outcome);
        if (seen_signatures.insert(sig).second)
            stats.crash_events.push_back({t, std::move(sig)});
    };

    if (observer) observer(initial_seed.bytes);
    ExecutionOutcome first = execute(target, initial_seed.bytes);
    stats.executions = 1;
    if (first.status.kind == ExitStatus::Kind::Timeout)
        throw OracleError("initial seed times out");
    stats.statements_covered = first.coverage.statements;
    stats.branches_covered = first.coverage.branches;
    queue.push_back(initial_seed.bytes);
    stats.path_events.push_back({0, 1});
    record_crash(first, 0);

    std::uint64_t mutated = 0;
    for (;;) {
        std::int64_t elapsed_ms;
        if (sim) {
            if (mutated >= max_mutated) break;
        } else {
            elapsed_ms = std::chrono::duration_cast<Duration>(
                             std::chrono::steady_clock::now() - start)
                             .count();
            if (elapsed_ms >= duration_ms) break;
        }

        Bytes input = mutate(queue[cursor % queue.size()], rng,
                             config.mutation_stack_max, config.max_input_size);
        ++cursor;
        if (observer) observer(input);
        ExecutionOutcome outcome = execute(target, input);
        ++stats.executions;
        ++mutated;
        if (sim) {
            elapsed_ms = static_cast<std::int64_t>(mutated) * 1000 /
                         kSimExecsPerSecond;
        } else {
            elapsed_ms = std::chrono::duration_cast<Duration>(
                             std::chrono::steady_clock::now() - start)
                             .count();
        }

        bool novel = false;
        for (const auto& stmt : outcome.coverage.statements)
            if (stats.statements_covered.insert(stmt).second) novel = true;
        for (const auto& br : outcome.coverage.branches)
            if (stats.branches_covered.insert(br).second) novel = true;
        if (novel) {
            stats.path_events.push_back({elapsed_ms, stats.path_events.size() + 1});
            queue.push_back(std::move(input));
        }
        record_crash(outcome, elapsed_ms);
    }

    stats.unique_crashes = seen_signatures.size();
    stats.cumulative_statements = stats.statements_covered.size();
    stats.cumulative_branches = stats.branches_covered.size();
    return stats;
}

std::string paths_csv_header() { return "elapsed_ms,total_paths\n"; }
std::string crashes_csv_header() { return "elapsed_ms,signature\n"; }

std::string paths_csv(const CampaignStats& stats) {
    std::string out = paths_csv_header();
    for (const auto& ev : stats.path_events)
        out += std::to_string(ev.elapsed_ms) + "," +
               std::to_string(ev.total_paths) + "\n";
    return out;
}

std::string crashes_csv(const CampaignStats& stats) {
    std::string out = crashes_csv_header();
    for (const auto& ev : stats.crash_events)
        out += std::to_string(ev.elapsed_ms) + "," + ev.signature + "\n";
    return out;
}

}  // namespace seedtrim
