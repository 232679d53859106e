#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "seedtrim/core.hpp"
#include "seedtrim/oracle.hpp"

// Desk-scale coverage-guided mutational fuzzer for comparing original vs
// reduced seeds. Deliberately simple: a round-robin queue, stacked havoc
// mutations, and "new path" meaning an input that covers a statement or
// branch not seen before in the campaign. No edge-hit-count bitmap, no
// energy scheduling -- absolute path counts are not comparable to AFL's,
// only the original-vs-reduced direction is.

namespace seedtrim {

// mt19937_64 with our own bounded draws so streams are identical across
// standard libraries (std distributions are not portable).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    std::uint64_t below(std::uint64_t n) { return n <= 1 ? 0 : engine_() % n; }
    std::uint8_t byte() { return static_cast<std::uint8_t>(engine_() & 0xFF); }
    bool coin() { return (engine_() & 1) != 0; }

  private:
    std::mt19937_64 engine_;
};

struct CampaignConfig {
    Duration duration{60000};
    std::uint64_t rng_seed = 1;
    std::size_t max_input_size = 1 << 20;
    std::size_t mutation_stack_max = 4;

    void validate() const;  // throws std::invalid_argument
};

struct PathEvent {
    std::int64_t elapsed_ms = 0;
    std::size_t total_paths = 0;
    bool operator==(const PathEvent&) const = default;
};

struct CrashEvent {
    std::int64_t elapsed_ms = 0;
    std::string signature;
    bool operator==(const CrashEvent&) const = default;
};

struct CampaignStats {
    std::vector<PathEvent> path_events;    // one per discovery, counts 1,2,...
    std::vector<CrashEvent> crash_events;  // first sighting of each signature
    std::set<std::string> statements_covered;
    std::set<std::string> branches_covered;
    std::size_t unique_crashes = 0;
    std::size_t cumulative_statements = 0;
    std::size_t cumulative_branches = 0;
    std::size_t executions = 0;

    std::size_t total_paths() const { return path_events.size(); }
    bool operator==(const CampaignStats&) const = default;
};

// Individual mutation operators, exposed for direct testing. All mutate in
// place and assume valid positions.
namespace mutops {
void flip_bit(Bytes& data, std::size_t pos, unsigned bit);
void set_byte(Bytes& data, std::size_t pos, std::uint8_t value);
void add_to_byte(Bytes& data, std::size_t pos, int delta);  // wrapping
void overwrite_wide(Bytes& data, std::size_t pos, std::uint32_t value,
                    unsigned width, bool big_endian);  // width 2 or 4
void delete_block(Bytes& data, std::size_t pos, std::size_t len);
void duplicate_block(Bytes& data, std::size_t src, std::size_t len,
                     std::size_t insert_at);
const std::vector<std::int16_t>& interesting16();
const std::vector<std::int32_t>& interesting32();
}  // namespace mutops

// Applies a stack of 1..max_stack randomly chosen operators: bit flip,
// random byte set, +/-1..35 byte arithmetic, 2/4-byte interesting-value
// overwrite, block delete, block duplicate. The result never becomes empty
// and never exceeds max_input_size. An empty input is grown by one random
// byte (insert-only fallback).
Bytes mutate(const Bytes& input, Rng& rng, std::size_t max_stack,
             std::size_t max_input_size);

// Stable signature for crash dedup: FNV-1a over the crash kind and the
// sorted statement set (a proxy for the crash site). Throws
// std::invalid_argument for non-crash outcomes.
std::string crash_signature(const ExecutionOutcome& outcome);

// Per-execution observer (every executed input, initial seed included);
// used to emit the color dump and for replay tests.
using InputObserver = std::function<void(const Bytes& input)>;

// Runs one campaign. The queue starts with the initial seed (path #1 at
// t=0); each round picks the next queue entry round-robin, mutates it,
// executes, enqueues on coverage novelty and records unseen crash
// signatures. Simulated targets run on the virtual clock (duration maps to
// an execution budget at kSimExecsPerSecond), external targets on the wall
// clock. Throws OracleError when the initial seed times out.
CampaignStats run_campaign(const TargetSpec& target, const Seed& initial_seed,
                           const CampaignConfig& config,
                           const InputObserver& observer = {});

// CSV renderings ("elapsed_ms,total_paths" / "elapsed_ms,signature").
std::string paths_csv(const CampaignStats& stats);
std::string crashes_csv(const CampaignStats& stats);
std::string paths_csv_header();
std::string crashes_csv_header();

}  // namespace seedtrim
