#pragma once

#include <chrono>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

// Shared value types and the pure arithmetic behind seed reduction:
// coverage similarity, size reduction, and contiguous chunk splitting.
// Everything here is a plain value; no process execution, no I/O.

namespace seedtrim {

using Bytes = std::vector<std::uint8_t>;
using Duration = std::chrono::milliseconds;

// Smallest indivisible piece during reduction. Char assumes a single-byte
// encoding; multi-byte text is treated as bytes.
enum class ChunkUnit { Byte, Char };

// An input file handed to a fuzzer or reducer, with its declared chunking
// granularity (e.g. 1 byte for text, 1024 bytes for binary).
struct Seed {
    Bytes bytes;
    ChunkUnit unit = ChunkUnit::Byte;
    std::size_t unit_size = 1;

    Seed() = default;
    Seed(Bytes b, ChunkUnit u, std::size_t usize);

    static Seed from_string(const std::string& s, ChunkUnit u = ChunkUnit::Byte,
                            std::size_t usize = 1);

    std::size_t size() const { return bytes.size(); }
    bool empty() const { return bytes.empty(); }

    // Number of atomic chunk units. The last unit may be partial.
    std::size_t unit_count() const;

    bool operator==(const Seed& other) const = default;
};

// A contiguous run of whole units inside a seed, as a byte range.
struct Chunk {
    std::size_t offset = 0;  // byte offset
    std::size_t length = 0;  // byte length
};

// Coverage elements observed in one execution. Statement and branch ids are
// opaque strings ("file:line" and "file:line:branch-index" for real targets).
struct CoverageSet {
    std::set<std::string> statements;
    std::set<std::string> branches;

    bool operator==(const CoverageSet& other) const = default;
};

// Exit status class of one target run. Exit code 0 maps to Ok exactly;
// Error(0) is not representable.
struct ExitStatus {
    enum class Kind { Ok, Error, Crash, Timeout };

    Kind kind = Kind::Ok;
    int code = 0;            // Error only
    std::string crash_kind;  // Crash only (signal name or simulated kind)

    static ExitStatus ok() { return {}; }
    static ExitStatus error(int code);
    static ExitStatus crash(std::string kind);
    static ExitStatus timeout() { return {Kind::Timeout, 0, {}}; }

    // Maps a raw process exit code: 0 becomes Ok, anything else Error.
    static ExitStatus from_exit_code(int code);

    bool operator==(const ExitStatus& other) const = default;

    std::string to_string() const;
};

// Everything recorded about one target run.
struct ExecutionOutcome {
    ExitStatus status;
    CoverageSet coverage;  // empty when status is Timeout
    Duration wall_time{0};

    bool operator==(const ExecutionOutcome& other) const = default;
};

// Reduction parameters: C% coverage similarity floor, R% size reduction
// floor, time budget, and the chunking granularity.
struct ReductionConfig {
    double c_percent = 75.0;
    double r_percent = 40.0;
    Duration time_budget{std::chrono::minutes{5}};
    ChunkUnit unit = ChunkUnit::Byte;
    std::size_t unit_size = 1;

    ReductionConfig() = default;
    ReductionConfig(double c, double r, Duration budget, ChunkUnit u,
                    std::size_t usize);

    void validate() const;  // throws std::invalid_argument
};

// Fraction of the original's statements that the reduced run still covers:
// |stmts(reduced) ∩ stmts(original)| / |stmts(original)|, in [0,1].
// Branches are tracked for reporting but do not enter the similarity.
// An empty original statement set yields 1.0 (vacuous); callers are expected
// to warn about it.
double cov_similarity(const CoverageSet& original, const CoverageSet& reduced);

// Size reduction as a percentage of the original: 100*(orig-red)/orig.
// Reports round to 2 decimals; comparisons happen at full precision.
// Throws std::invalid_argument when original_size is 0 or reduced_size
// exceeds original_size.
double percent_reduction(std::size_t original_size, std::size_t reduced_size);

// Splits the seed into n contiguous chunks of whole units covering it exactly
// once. Chunk sizes are floor or ceil of unit_count/n units, earlier chunks
// taking the ceil, so splits are reproducible. Throws std::invalid_argument
// when n is 0, the seed is empty, or n exceeds the unit count.
std::vector<Chunk> partition(const Seed& seed, std::size_t n);

// The seed with the indexed chunk of an n-way partition deleted. Surviving
// bytes keep their order; unit and unit_size carry over.
Seed remove_chunk(const Seed& seed, std::size_t chunk_index, std::size_t n);

}  // namespace seedtrim
