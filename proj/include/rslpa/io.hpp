#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "rslpa/cover.hpp"
#include "rslpa/graph.hpp"
#include "rslpa/label_engine.hpp"

namespace rslpa {

// Text formats. All readers skip blank lines and lines starting with '#',
// accept LF or CRLF, and report the 1-based line number on malformed input.

struct EdgeListLoad {
  Graph graph;
  std::size_t duplicates = 0;
  std::size_t self_loops = 0;
};

// One edge per line: two whitespace-separated non-negative integers.
EdgeListLoad read_edge_list(std::istream& in);
EdgeListLoad load_edge_list(const std::filesystem::path& path);
void write_edge_list(std::ostream& out, const Graph& graph);

// "+ u v" inserts, "- u v" deletes.
EditBatch read_batch(std::istream& in);
EditBatch load_batch(const std::filesystem::path& path);
void write_batch(std::ostream& out, const EditBatch& batch);

// One community per line, members separated by spaces, canonical order.
Cover read_cover(std::istream& in);
Cover load_cover(const std::filesystem::path& path);
void write_cover(std::ostream& out, const Cover& cover);

// LFR community file: "vertex<TAB>community [community ...]".
Cover read_lfr_ground_truth(std::istream& in);
Cover load_lfr_ground_truth(const std::filesystem::path& path);

// Binary snapshot of the full engine state.
//
//   "RSLPASNP" u32 version u32 T u64 seed u64 epoch u64 vertices u64 edges
//   then three sections, each: u32 tag, u64 length, payload, u64 FNV-1a
//     1 graph:   u64 n, n ids, u64 m, m (u, v) pairs
//     2 labels:  per vertex: u64 id, u8 active, u32 len, len labels,
//                len-1 sources, len-1 u32 positions
//     3 records: u64 count, count (owner u64, t u32, target u64, k u32)
//
// All integers little-endian.
inline constexpr std::uint32_t kSnapshotVersion = 1;

struct Snapshot {
  std::uint64_t seed = 0;
  Graph graph;
  LabelState state;

  bool operator==(const Snapshot&) const = default;
};

std::string encode_snapshot(const Snapshot& snapshot);
// Validates checksums, counts and every label-state invariant; throws
// CorruptionError naming the first failure.
Snapshot decode_snapshot(std::string_view bytes);

// Writes to a temporary file and renames it into place.
void save_snapshot(const Snapshot& snapshot, const std::filesystem::path& path);
Snapshot load_snapshot(const std::filesystem::path& path);

}  // namespace rslpa
