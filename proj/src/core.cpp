#include "seedtrim/core.hpp"

#include <algorithm>
#include <stdexcept>

namespace seedtrim {

Seed::Seed(Bytes b, ChunkUnit u, std::size_t usize)
    : bytes(std::move(b)), unit(u), unit_size(usize) {
    if (unit_size == 0) throw std::invalid_argument("unit_size must be >= 1");
}

Seed Seed::from_string(const std::string& s, ChunkUnit u, std::size_t usize) {
    return Seed(Bytes(s.begin(), s.end()), u, usize);
}

std::size_t Seed::unit_count() const {
    return (bytes.size() + unit_size - 1) / unit_size;
}

ExitStatus ExitStatus::error(int code) {
    if (code == 0) throw std::invalid_argument("exit code 0 maps to Ok, not Error");
    return {Kind::Error, code, {}};
}

ExitStatus ExitStatus::crash(std::string kind) {
    return {Kind::Crash, 0, std::move(kind)};
}

ExitStatus ExitStatus::from_exit_code(int code) {
    return code == 0 ? ok() : error(code);
}

std::string ExitStatus::to_string() const {
    switch (kind) {
        case Kind::Ok: return "ok";
        case Kind::Error: return "error(" + std::to_string(code) + ")";
        case Kind::Crash: return "crash(" + crash_kind + ")";
        case Kind::Timeout: return "timeout";
    }
    return "?";
}

ReductionConfig::ReductionConfig(double c, double r, Duration budget, ChunkUnit u,
                                 std::size_t usize)
    : c_percent(c), r_percent(r), time_budget(budget), unit(u), unit_size(usize) {
    validate();
}

void ReductionConfig::validate() const {
    if (!(c_percent >= 0.0 && c_percent <= 100.0))
        throw std::invalid_argument("c_percent must be in [0,100]");
    if (!(r_percent >= 0.0 && r_percent <= 100.0))
        throw std::invalid_argument("r_percent must be in [0,100]");
    if (time_budget <= Duration::zero())
        throw std::invalid_argument("time_budget must be positive");
    if (unit_size == 0) throw std::invalid_argument("unit_size must be >= 1");
}

double cov_similarity(const CoverageSet& original, const CoverageSet& reduced) {
    if (original.statements.empty()) return 1.0;
    std::size_t common = 0;
    for (const auto& stmt : reduced.statements)
        if (original.statements.count(stmt)) ++common;
    return static_cast<double>(common) /
           static_cast<double>(original.statements.size());
}

double percent_reduction(std::size_t original_size, std::size_t reduced_size) {
    if (original_size == 0) throw std::invalid_argument("empty original seed");
    if (reduced_size > original_size)
        throw std::invalid_argument("reduced size exceeds original size");
    return 100.0 * static_cast<double>(original_size - reduced_size) /
           static_cast<double>(original_size);
}

std::vector<Chunk> partition(const Seed& seed, std::size_t n) {
    if (seed.empty()) throw std::invalid_argument("cannot partition empty seed");
    if (n == 0) throw std::invalid_argument("chunk count must be >= 1");
    const std::size_t units = seed.unit_count();
    if (n > units) throw std::invalid_argument("granularity exceeds seed size");

    // First (units % n) chunks take ceil(units/n) units, the rest floor.
    const std::size_t base = units / n;
    const std::size_t extra = units % n;

    std::vector<Chunk> chunks;
    chunks.reserve(n);
    std::size_t unit_pos = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t chunk_units = base + (i < extra ? 1 : 0);
        const std::size_t begin = unit_pos * seed.unit_size;
        const std::size_t end =
            std::min((unit_pos + chunk_units) * seed.unit_size, seed.size());
        chunks.push_back({begin, end - begin});
        unit_pos += chunk_units;
    }
    return chunks;
}

Seed remove_chunk(const Seed& seed, std::size_t chunk_index, std::size_t n) {
    const auto chunks = partition(seed, n);
    if (chunk_index >= chunks.size())
        throw std::invalid_argument("chunk index out of range");
    const Chunk& gone = chunks[chunk_index];

    Bytes rest;
    rest.reserve(seed.size() - gone.length);
    rest.insert(rest.end(), seed.bytes.begin(),
                seed.bytes.begin() + static_cast<std::ptrdiff_t>(gone.offset));
    rest.insert(rest.end(),
                seed.bytes.begin() +
                    static_cast<std::ptrdiff_t>(gone.offset + gone.length),
                seed.bytes.end());
    return Seed(std::move(rest), seed.unit, seed.unit_size);
}

}  // namespace seedtrim
