#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "mrga/chromosome.hpp"
#include "mrga/errors.hpp"
#include "mrga/objective.hpp"
#include "mrga/rng.hpp"

namespace mrga {

// Population file layout (all integers and floats little-endian):
//   [magic "BLOCKGA\0"][u32 version][u32 dimension][u64 count]
//   [f64 lower_bound][f64 upper_bound][u64 generator_seed]
// followed by `count` fixed-width records of dimension+1 f64 values
// (genes then the fitness slot; NaN = unset). Fixed-width records make
// every chromosome addressable by index, which is what the block
// arithmetic relies on.

inline constexpr std::array<char, 8> kFileMagic = {'B', 'L', 'O', 'C', 'K', 'G', 'A', '\0'};
inline constexpr std::uint32_t kFormatVersion = 1;
inline constexpr std::uint64_t kHeaderSize = 48;
inline constexpr std::uint64_t kDefaultBlockSizeBytes = 128ull * 1024 * 1024;  // 128 MiB

struct PopulationFileHeader {
    std::uint32_t version = kFormatVersion;
    std::uint32_t dimension = 0;
    std::uint64_t chromosome_count = 0;
    double lower_bound = 0.0;
    double upper_bound = 0.0;
    std::uint64_t generator_seed = 0;
};

/// Serialized bytes per chromosome: dimension genes plus one fitness slot.
inline constexpr std::uint64_t record_size_bytes(std::uint32_t dimension) {
    return 8ull * (static_cast<std::uint64_t>(dimension) + 1);
}

inline constexpr std::uint64_t file_size_bytes(const PopulationFileHeader& h) {
    return kHeaderSize + h.chromosome_count * record_size_bytes(h.dimension);
}

/// ceil(total_bytes / block_size_bytes): how many HDFS-style blocks a
/// byte total occupies.
inline std::uint64_t block_count_for_bytes(std::uint64_t total_bytes,
                                           std::uint64_t block_size_bytes) {
    if (block_size_bytes == 0) throw ConfigError("block size must be positive");
    return (total_bytes + block_size_bytes - 1) / block_size_bytes;
}

struct BlockEntry {
    std::uint64_t block_index = 0;
    std::uint64_t chromosome_offset = 0;
    std::uint64_t chromosome_count = 0;
};

/// Contiguous, gap-free partition of a population file into blocks of at
/// most block_size_bytes; all blocks except possibly the last hold
/// exactly capacity = floor(block_size_bytes / record_size) records.
struct BlockManifest {
    std::uint64_t block_size_bytes = kDefaultBlockSizeBytes;
    std::uint64_t record_size = 0;
    std::vector<BlockEntry> entries;

    std::uint64_t block_count() const { return entries.size(); }
};

namespace detail {

inline void put_u32(std::vector<char>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline void put_u64(std::vector<char>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline void put_f64(std::vector<char>& out, double v) {
    put_u64(out, std::bit_cast<std::uint64_t>(v));
}

inline std::uint32_t get_u32(const char* p) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(p[i])) << (8 * i);
    return v;
}

inline std::uint64_t get_u64(const char* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
    return v;
}

inline double get_f64(const char* p) { return std::bit_cast<double>(get_u64(p)); }

inline std::vector<char> encode_header(const PopulationFileHeader& h) {
    std::vector<char> out;
    out.reserve(kHeaderSize);
    out.insert(out.end(), kFileMagic.begin(), kFileMagic.end());
    put_u32(out, h.version);
    put_u32(out, h.dimension);
    put_u64(out, h.chromosome_count);
    put_f64(out, h.lower_bound);
    put_f64(out, h.upper_bound);
    put_u64(out, h.generator_seed);
    return out;
}

inline void append_record(std::vector<char>& out, const Chromosome& c) {
    for (double g : c.genes) put_f64(out, g);
    put_f64(out, c.fitness);
}

}  // namespace detail

/// Reads and validates the file header; the file length must equal
/// header size + count * record size exactly.
inline PopulationFileHeader read_header(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open population file: " + path.string());
    std::array<char, kHeaderSize> buf{};
    in.read(buf.data(), buf.size());
    if (in.gcount() != static_cast<std::streamsize>(kHeaderSize))
        throw IoError("population file too short for header: " + path.string());
    if (std::memcmp(buf.data(), kFileMagic.data(), kFileMagic.size()) != 0)
        throw IoError("bad magic in population file: " + path.string());

    PopulationFileHeader h;
    h.version = detail::get_u32(buf.data() + 8);
    if (h.version != kFormatVersion)
        throw IoError("unsupported population file version " + std::to_string(h.version));
    h.dimension = detail::get_u32(buf.data() + 12);
    h.chromosome_count = detail::get_u64(buf.data() + 16);
    h.lower_bound = detail::get_f64(buf.data() + 24);
    h.upper_bound = detail::get_f64(buf.data() + 32);
    h.generator_seed = detail::get_u64(buf.data() + 40);
    if (h.dimension == 0) throw IoError("population file has zero dimension");

    const auto actual = static_cast<std::uint64_t>(std::filesystem::file_size(path));
    if (actual != file_size_bytes(h))
        throw IoError("population file length mismatch: expected " +
                      std::to_string(file_size_bytes(h)) + " bytes, found " +
                      std::to_string(actual));
    return h;
}

/// Writes `count` chromosomes with genes uniform in the spec's bounds and
/// unset fitness. Streams in chunks, so file size is not limited by
/// memory. Identical seeds reproduce identical bytes.
inline PopulationFileHeader generate_population_file(const std::filesystem::path& path,
                                                     std::uint64_t count,
                                                     const ObjectiveSpec& spec,
                                                     std::uint64_t seed) {
    spec.validate();
    if (count == 0) throw ConfigError("generate_population_file: count must be >= 1");

    PopulationFileHeader h;
    h.dimension = spec.dimension;
    h.chromosome_count = count;
    h.lower_bound = spec.lower_bound;
    h.upper_bound = spec.upper_bound;
    h.generator_seed = seed;

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot create population file: " + path.string());
    const auto header_bytes = detail::encode_header(h);
    out.write(header_bytes.data(), static_cast<std::streamsize>(header_bytes.size()));

    RngStream rng(seed);
    const std::uint64_t record = record_size_bytes(h.dimension);
    const std::uint64_t chunk_records = std::max<std::uint64_t>(1, (4ull << 20) / record);
    std::vector<char> buf;
    buf.reserve(chunk_records * record);
    Chromosome c;
    c.genes.resize(h.dimension);
    for (std::uint64_t i = 0; i < count; ++i) {
        for (auto& g : c.genes) g = rng.uniform_real(h.lower_bound, h.upper_bound);
        c.fitness = kUnsetFitness;
        detail::append_record(buf, c);
        if (buf.size() >= chunk_records * record) {
            out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
            buf.clear();
        }
    }
    if (!buf.empty()) out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    out.flush();
    if (!out) throw IoError("write failed: " + path.string());
    return h;
}

/// Serializes a whole population. Genes and fitness slots (including NaN
/// payloads) round-trip bit-exactly.
inline PopulationFileHeader write_population(const std::filesystem::path& path,
                                             const Population& pop, double lower_bound,
                                             double upper_bound, std::uint64_t seed = 0) {
    if (pop.empty()) throw ConfigError("write_population: empty population");
    const auto dim = static_cast<std::uint32_t>(pop.members.front().dimension());
    for (const auto& c : pop.members)
        if (c.dimension() != dim)
            throw ConfigError("write_population: mixed chromosome dimensions");

    PopulationFileHeader h;
    h.dimension = dim;
    h.chromosome_count = pop.size();
    h.lower_bound = lower_bound;
    h.upper_bound = upper_bound;
    h.generator_seed = seed;

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot create population file: " + path.string());
    const auto header_bytes = detail::encode_header(h);
    out.write(header_bytes.data(), static_cast<std::streamsize>(header_bytes.size()));
    std::vector<char> buf;
    for (const auto& c : pop.members) {
        detail::append_record(buf, c);
        if (buf.size() >= (4u << 20)) {
            out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
            buf.clear();
        }
    }
    if (!buf.empty()) out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    out.flush();
    if (!out) throw IoError("write failed: " + path.string());
    return h;
}

/// Partitions the file's records into blocks holding
/// capacity = floor(block_size_bytes / record_size) records each.
inline BlockManifest split_into_blocks(const PopulationFileHeader& h,
                                       std::uint64_t block_size_bytes = kDefaultBlockSizeBytes) {
    const std::uint64_t record = record_size_bytes(h.dimension);
    if (block_size_bytes < record)
        throw ConfigError("block size " + std::to_string(block_size_bytes) +
                          " is smaller than one record (" + std::to_string(record) + " bytes)");
    const std::uint64_t capacity = block_size_bytes / record;

    BlockManifest manifest;
    manifest.block_size_bytes = block_size_bytes;
    manifest.record_size = record;
    std::uint64_t offset = 0;
    std::uint64_t index = 0;
    while (offset < h.chromosome_count) {
        const std::uint64_t n = std::min(capacity, h.chromosome_count - offset);
        manifest.entries.push_back({index++, offset, n});
        offset += n;
    }
    return manifest;
}

/// Reads exactly one block's chromosomes in file order, fitness slots
/// preserved bit for bit.
inline Population read_block(const std::filesystem::path& path, const BlockManifest& manifest,
                             std::uint64_t block_index) {
    if (block_index >= manifest.entries.size())
        throw ConfigError("block index " + std::to_string(block_index) + " out of range (" +
                          std::to_string(manifest.entries.size()) + " blocks)");
    const PopulationFileHeader h = read_header(path);
    const std::uint64_t record = record_size_bytes(h.dimension);
    if (record != manifest.record_size)
        throw ConfigError("manifest record size does not match file dimension");
    const BlockEntry& entry = manifest.entries[block_index];
    if (entry.chromosome_offset + entry.chromosome_count > h.chromosome_count)
        throw ConfigError("manifest entry exceeds file record count");

    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open population file: " + path.string());
    in.seekg(static_cast<std::streamoff>(kHeaderSize + entry.chromosome_offset * record));
    std::vector<char> buf(entry.chromosome_count * record);
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() != static_cast<std::streamsize>(buf.size()))
        throw IoError("truncated block read from " + path.string());

    Population pop;
    pop.members.reserve(entry.chromosome_count);
    for (std::uint64_t r = 0; r < entry.chromosome_count; ++r) {
        const char* rec = buf.data() + r * record;
        Chromosome c;
        c.genes.resize(h.dimension);
        for (std::uint32_t g = 0; g < h.dimension; ++g)
            c.genes[g] = detail::get_f64(rec + 8ull * g);
        c.fitness = detail::get_f64(rec + 8ull * h.dimension);
        pop.members.push_back(std::move(c));
    }
    return pop;
}

/// Whole-file read: header plus every record.
inline std::pair<PopulationFileHeader, Population>
read_population(const std::filesystem::path& path) {
    const PopulationFileHeader h = read_header(path);
    BlockManifest whole = split_into_blocks(h, file_size_bytes(h));
    return {h, read_block(path, whole, 0)};
}

/// Plain-text sidecar: one "block_index chromosome_offset chromosome_count"
/// line per block.
inline void write_manifest_sidecar(const std::filesystem::path& path,
                                   const BlockManifest& manifest) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot create manifest sidecar: " + path.string());
    for (const auto& e : manifest.entries)
        out << e.block_index << ' ' << e.chromosome_offset << ' ' << e.chromosome_count << '\n';
    out.flush();
    if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace mrga
