#include <doctest.h>

#include <cstdio>
#include <numeric>

#include "seedtrim/core.hpp"
#include "seedtrim/fuzzer.hpp"

using namespace seedtrim;

namespace {

Seed seed_of(const std::string& s, std::size_t unit_size = 1) {
    return Seed::from_string(s, ChunkUnit::Byte, unit_size);
}

CoverageSet stmts(std::initializer_list<std::string> ids) {
    CoverageSet cov;
    for (const auto& id : ids) cov.statements.insert(id);
    return cov;
}

// Independent oracle for similarity: plain double loop over both sets.
double brute_similarity(const CoverageSet& original, const CoverageSet& reduced) {
    if (original.statements.empty()) return 1.0;
    std::size_t common = 0;
    for (const auto& a : original.statements)
        for (const auto& b : reduced.statements)
            if (a == b) ++common;
    return double(common) / double(original.statements.size());
}

std::string two_decimals(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

bool is_subsequence(const Bytes& needle, const Bytes& haystack) {
    std::size_t i = 0;
    for (std::size_t j = 0; j < haystack.size() && i < needle.size(); ++j)
        if (haystack[j] == needle[i]) ++i;
    return i == needle.size();
}

}  // namespace

TEST_CASE("cov_similarity examples") {
    const auto abcd = stmts({"a", "b", "c", "d"});
    CHECK(cov_similarity(abcd, abcd) == 1.0);
    CHECK(cov_similarity(abcd, stmts({"a", "b", "c"})) == 0.75);
    CHECK(cov_similarity(stmts({"a", "b"}), stmts({"c", "d"})) == 0.0);
    CHECK(cov_similarity(abcd, stmts({"a", "b", "c"})) ==
          brute_similarity(abcd, stmts({"a", "b", "c"})));
}

TEST_CASE("cov_similarity with empty original is vacuously 1") {
    CHECK(cov_similarity(CoverageSet{}, stmts({"a"})) == 1.0);
    CHECK(cov_similarity(CoverageSet{}, CoverageSet{}) == 1.0);
}

TEST_CASE("cov_similarity ignores branches and is not symmetric") {
    CoverageSet original = stmts({"a", "b"});
    CoverageSet reduced = stmts({"a"});
    original.branches.insert("a:1");
    reduced.branches.insert("z:1");
    CHECK(cov_similarity(original, reduced) == 0.5);
    CHECK(cov_similarity(reduced, original) == 1.0);  // denominator swaps
}

TEST_CASE("cov_similarity stays in [0,1] for random sets") {
    Rng rng(11);
    for (int round = 0; round < 200; ++round) {
        CoverageSet a, b;
        for (std::uint64_t i = 0, n = rng.below(10); i < n; ++i)
            a.statements.insert("s" + std::to_string(rng.below(12)));
        for (std::uint64_t i = 0, n = rng.below(10); i < n; ++i)
            b.statements.insert("s" + std::to_string(rng.below(12)));
        const double sim = cov_similarity(a, b);
        CHECK(sim >= 0.0);
        CHECK(sim <= 1.0);
        CHECK(sim == brute_similarity(a, b));
    }
}

TEST_CASE("percent_reduction reproduces the reported reduction figures") {
    CHECK(two_decimals(percent_reduction(119, 19)) == "84.03");
    CHECK(two_decimals(percent_reduction(133432, 1024)) == "99.23");
    CHECK(percent_reduction(100, 100) == 0.0);
}

TEST_CASE("percent_reduction identities and errors") {
    for (std::size_t s : {1u, 7u, 1000u}) {
        CHECK(percent_reduction(s, s) == 0.0);
        CHECK(percent_reduction(s, 0) == 100.0);
    }
    CHECK_THROWS_AS(percent_reduction(0, 0), std::invalid_argument);
    CHECK_THROWS_AS(percent_reduction(10, 11), std::invalid_argument);
}

TEST_CASE("partition examples") {
    auto unit_lengths = [](const Seed& s, std::size_t n) {
        std::vector<std::size_t> lens;
        for (const Chunk& c : partition(s, n)) lens.push_back(c.length);
        return lens;
    };
    CHECK(unit_lengths(seed_of(std::string(12, 'x')), 4) ==
          std::vector<std::size_t>{3, 3, 3, 3});
    CHECK(unit_lengths(seed_of(std::string(10, 'x')), 3) ==
          std::vector<std::size_t>{4, 3, 3});
    CHECK(unit_lengths(seed_of("abcde"), 5) ==
          std::vector<std::size_t>{1, 1, 1, 1, 1});
}

TEST_CASE("partition respects unit_size and partial last unit") {
    // 10 bytes at unit_size 4 -> 3 units (last unit is 2 bytes)
    const Seed s = seed_of("0123456789", 4);
    CHECK(s.unit_count() == 3);
    const auto chunks = partition(s, 2);  // ceil-first: [2 units, 1 unit]
    REQUIRE(chunks.size() == 2);
    CHECK(chunks[0].offset == 0);
    CHECK(chunks[0].length == 8);
    CHECK(chunks[1].offset == 8);
    CHECK(chunks[1].length == 2);
}

TEST_CASE("partition errors") {
    CHECK_THROWS_WITH_AS(partition(seed_of("abc"), 4),
                         "granularity exceeds seed size", std::invalid_argument);
    CHECK_THROWS_AS(partition(Seed{}, 1), std::invalid_argument);
    CHECK_THROWS_AS(partition(seed_of("abc"), 0), std::invalid_argument);
}

TEST_CASE("partition concatenation reproduces the seed") {
    Rng rng(7);
    for (int round = 0; round < 300; ++round) {
        const std::size_t len = 1 + rng.below(40);
        const std::size_t unit_size = 1 + rng.below(5);
        Bytes bytes;
        for (std::size_t i = 0; i < len; ++i) bytes.push_back(rng.byte());
        const Seed s(bytes, ChunkUnit::Byte, unit_size);
        const std::size_t n = 1 + rng.below(s.unit_count());

        Bytes joined;
        std::size_t expected_offset = 0;
        for (const Chunk& c : partition(s, n)) {
            CHECK(c.offset == expected_offset);  // contiguous, exact cover
            expected_offset = c.offset + c.length;
            joined.insert(joined.end(), bytes.begin() + std::ptrdiff_t(c.offset),
                          bytes.begin() + std::ptrdiff_t(c.offset + c.length));
        }
        CHECK(expected_offset == bytes.size());
        CHECK(joined == bytes);
    }
}

TEST_CASE("remove_chunk examples") {
    CHECK(remove_chunk(seed_of("abcd"), 0, 2).bytes == seed_of("cd").bytes);
    CHECK(remove_chunk(seed_of("abcd"), 1, 2).bytes == seed_of("ab").bytes);
    // "abcde" at n=2 splits [3,2]; removing chunk 0 leaves "de"
    CHECK(remove_chunk(seed_of("abcde"), 0, 2).bytes == seed_of("de").bytes);
    CHECK_THROWS_AS(remove_chunk(seed_of("abcd"), 2, 2), std::invalid_argument);
}

TEST_CASE("remove_chunk keeps granularity and never reorders bytes") {
    Rng rng(13);
    for (int round = 0; round < 300; ++round) {
        const std::size_t len = 1 + rng.below(30);
        Bytes bytes;
        for (std::size_t i = 0; i < len; ++i) bytes.push_back(rng.byte());
        const Seed s(bytes, ChunkUnit::Byte, 1 + rng.below(4));
        const std::size_t n = 1 + rng.below(s.unit_count());
        const std::size_t index = rng.below(n);

        const Seed rest = remove_chunk(s, index, n);
        CHECK(rest.unit == s.unit);
        CHECK(rest.unit_size == s.unit_size);
        CHECK(rest.size() < s.size());
        CHECK(is_subsequence(rest.bytes, s.bytes));
    }
}

TEST_CASE("exit status semantics") {
    CHECK(ExitStatus::from_exit_code(0) == ExitStatus::ok());
    CHECK(ExitStatus::from_exit_code(2) == ExitStatus::error(2));
    CHECK_THROWS_AS(ExitStatus::error(0), std::invalid_argument);
    CHECK_FALSE(ExitStatus::error(1) == ExitStatus::error(2));
    CHECK_FALSE(ExitStatus::crash("SIGSEGV") == ExitStatus::crash("SIGABRT"));
    CHECK(ExitStatus::crash("SIGSEGV") == ExitStatus::crash("SIGSEGV"));
    CHECK_FALSE(ExitStatus::timeout() == ExitStatus::ok());
}

TEST_CASE("config validation") {
    CHECK_THROWS_AS(ReductionConfig(101, 0, Duration{1000}, ChunkUnit::Byte, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(ReductionConfig(50, -1, Duration{1000}, ChunkUnit::Byte, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(ReductionConfig(50, 0, Duration{0}, ChunkUnit::Byte, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(ReductionConfig(50, 0, Duration{1000}, ChunkUnit::Byte, 0),
                    std::invalid_argument);
    CHECK_NOTHROW(ReductionConfig(0, 100, Duration{1}, ChunkUnit::Char, 1024));
    CHECK_THROWS_AS(Seed({}, ChunkUnit::Byte, 0), std::invalid_argument);
}
