#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace chainopt {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

/// Seed for stream `index` derived from a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Uniform integer in [0, n).
std::size_t uniform_index(Rng& rng, std::size_t n);
double uniform01(Rng& rng);

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = uniform_index(rng, i);
        std::swap(v[i - 1], v[j]);
    }
}

/// Worker count from CHAINOPT_THREADS, else hardware concurrency (at least 1).
std::size_t thread_count();

/// Runs body(i) for i in [0, n) on up to `threads` workers. Body must only write index-owned state.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, std::size_t threads = 0);

/// Shortest round-trip decimal representation.
std::string format_double(double v);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

std::vector<std::string> split(std::string_view s, char sep);

/// Minimal RFC-4180 style CSV reader: header row plus data rows.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(std::string_view name) const;
};

CsvTable read_csv(const std::filesystem::path& path);
std::string csv_escape(std::string_view field);

}  // namespace chainopt
