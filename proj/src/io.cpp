#include "rslpa/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <vector>

#include "rslpa/error.hpp"

namespace rslpa {
namespace {

// Splits the stream into numbered, whitespace-tokenized content lines.
template <typename Fn>
void for_each_content_line(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t number = 0;
  std::vector<std::string_view> tokens;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos || line[start] == '#') continue;
    tokens.clear();
    std::string_view rest(line);
    while (true) {
      const std::size_t b = rest.find_first_not_of(" \t");
      if (b == std::string_view::npos) break;
      const std::size_t e = rest.find_first_of(" \t", b);
      tokens.push_back(rest.substr(b, e == std::string_view::npos ? rest.size() - b : e - b));
      if (e == std::string_view::npos) break;
      rest = rest.substr(e);
    }
    fn(number, tokens);
  }
}

VertexId parse_id(std::size_t line, std::string_view token) {
  if (!token.empty() && token.front() == '-') {
    throw ParseError(line, "negative vertex id '" + std::string(token) + "'");
  }
  VertexId value = 0;
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc() || ptr != end || token.empty()) {
    throw ParseError(line, "expected a non-negative integer, got '" + std::string(token) + "'");
  }
  return value;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

template <typename Fn>
auto with_file(const std::filesystem::path& path, Fn&& fn) {
  auto in = open_input(path);
  try {
    return fn(in);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), e.detail(), path.string());
  }
}

// ---- binary helpers ----

constexpr char kMagic[8] = {'R', 'S', 'L', 'P', 'A', 'S', 'N', 'P'};
constexpr std::uint32_t kGraphSection = 1;
constexpr std::uint32_t kLabelSection = 2;
constexpr std::uint32_t kRecordSection = 3;

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void raw(std::string_view s) { out_.append(s); }
  std::string& str() { return out_; }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in, std::string what) : in_(in), what_(std::move(what)) {}

  std::string_view take(std::size_t n) {
    if (in_.size() - pos_ < n) {
      throw CorruptionError("snapshot truncated in " + what_ + " (needed " + std::to_string(n) +
                            " more bytes at offset " + std::to_string(pos_) + ")");
    }
    auto s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::uint8_t u8() { return static_cast<std::uint8_t>(take(1)[0]); }
  std::uint32_t u32() {
    auto s = take(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(s[i])) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    auto s = take(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(s[i])) << (8 * i);
    return v;
  }
  bool done() const { return pos_ == in_.size(); }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  std::string_view in_;
  std::size_t pos_ = 0;
  std::string what_;
};

void write_section(Writer& out, std::uint32_t tag, Writer& payload) {
  out.u32(tag);
  out.u64(payload.str().size());
  out.raw(payload.str());
  out.u64(fnv1a(payload.str()));
}

std::string_view read_section(Reader& in, std::uint32_t expected_tag, const char* name) {
  const std::uint32_t tag = in.u32();
  if (tag != expected_tag) {
    throw CorruptionError(std::string("expected ") + name + " section, found tag " +
                          std::to_string(tag));
  }
  const std::uint64_t length = in.u64();
  if (length > in.remaining()) {
    throw CorruptionError(std::string("snapshot truncated in ") + name + " section");
  }
  const std::string_view payload = in.take(length);
  if (in.u64() != fnv1a(payload)) {
    throw CorruptionError(std::string("checksum mismatch in ") + name + " section");
  }
  return payload;
}

}  // namespace

EdgeListLoad read_edge_list(std::istream& in) {
  std::vector<Edge> edges;
  std::size_t self_loops = 0;
  for_each_content_line(in, [&](std::size_t line, const std::vector<std::string_view>& tok) {
    if (tok.size() != 2) {
      throw ParseError(line, "expected two vertex ids, got " + std::to_string(tok.size()) +
                                 " tokens");
    }
    const VertexId a = parse_id(line, tok[0]);
    const VertexId b = parse_id(line, tok[1]);
    if (a == b) {
      ++self_loops;
      return;
    }
    edges.emplace_back(a, b);
  });
  const std::size_t raw = edges.size();
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  EdgeListLoad out;
  out.duplicates = raw - edges.size();
  out.self_loops = self_loops;
  out.graph = Graph::from_edges(edges);
  return out;
}

EdgeListLoad load_edge_list(const std::filesystem::path& path) {
  return with_file(path, [](std::istream& in) { return read_edge_list(in); });
}

void write_edge_list(std::ostream& out, const Graph& graph) {
  for (const Edge& e : graph.edges()) out << e.u << ' ' << e.v << '\n';
}

EditBatch read_batch(std::istream& in) {
  std::vector<Edge> insertions;
  std::vector<Edge> deletions;
  for_each_content_line(in, [&](std::size_t line, const std::vector<std::string_view>& tok) {
    if (tok.size() != 3 || (tok[0] != "+" && tok[0] != "-")) {
      throw ParseError(line, "expected '+ u v' or '- u v'");
    }
    const VertexId a = parse_id(line, tok[1]);
    const VertexId b = parse_id(line, tok[2]);
    if (a == b) throw ParseError(line, "self-loop " + std::to_string(a) + "-" + std::to_string(b));
    (tok[0] == "+" ? insertions : deletions).emplace_back(a, b);
  });
  return EditBatch::make(std::move(insertions), std::move(deletions));
}

EditBatch load_batch(const std::filesystem::path& path) {
  return with_file(path, [](std::istream& in) { return read_batch(in); });
}

void write_batch(std::ostream& out, const EditBatch& batch) {
  for (const Edge& e : batch.deletions()) out << "- " << e.u << ' ' << e.v << '\n';
  for (const Edge& e : batch.insertions()) out << "+ " << e.u << ' ' << e.v << '\n';
}

Cover read_cover(std::istream& in) {
  Cover cover;
  for_each_content_line(in, [&](std::size_t line, const std::vector<std::string_view>& tok) {
    Community c;
    for (auto t : tok) c.push_back(parse_id(line, t));
    cover.communities.push_back(std::move(c));
  });
  cover.canonicalize();
  return cover;
}

Cover load_cover(const std::filesystem::path& path) {
  return with_file(path, [](std::istream& in) { return read_cover(in); });
}

void write_cover(std::ostream& out, const Cover& cover) {
  Cover canonical = cover;
  canonical.canonicalize();
  for (const auto& c : canonical.communities) {
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (i > 0) out << ' ';
      out << c[i];
    }
    out << '\n';
  }
}

Cover read_lfr_ground_truth(std::istream& in) {
  std::map<std::uint64_t, Community> by_id;
  for_each_content_line(in, [&](std::size_t line, const std::vector<std::string_view>& tok) {
    if (tok.size() < 2) throw ParseError(line, "expected a vertex followed by community ids");
    const VertexId v = parse_id(line, tok[0]);
    for (std::size_t i = 1; i < tok.size(); ++i) by_id[parse_id(line, tok[i])].push_back(v);
  });
  Cover cover;
  for (auto& [id, members] : by_id) cover.communities.push_back(std::move(members));
  cover.canonicalize();
  return cover;
}

Cover load_lfr_ground_truth(const std::filesystem::path& path) {
  return with_file(path, [](std::istream& in) { return read_lfr_ground_truth(in); });
}

std::string encode_snapshot(const Snapshot& s) {
  const LabelState& st = s.state;
  Writer out;
  out.raw(std::string_view(kMagic, sizeof kMagic));
  out.u32(kSnapshotVersion);
  out.u32(st.iterations);
  out.u64(s.seed);
  out.u64(st.epoch);
  out.u64(s.graph.vertex_count());
  out.u64(s.graph.edge_count());

  Writer graph;
  graph.u64(s.graph.vertex_count());
  for (VertexId v : s.graph.vertices()) graph.u64(v);
  const auto edges = s.graph.edges();
  graph.u64(edges.size());
  for (const Edge& e : edges) {
    graph.u64(e.u);
    graph.u64(e.v);
  }
  write_section(out, kGraphSection, graph);

  Writer labels;
  std::uint64_t record_count = 0;
  for (const VertexLabels& v : st.vertices) {
    labels.u64(v.id);
    labels.u8(v.active ? 1 : 0);
    labels.u32(static_cast<std::uint32_t>(v.labels.size()));
    for (Label l : v.labels) labels.u64(l);
    for (std::size_t t = 1; t < v.sources.size(); ++t) labels.u64(v.sources[t]);
    for (std::size_t t = 1; t < v.positions.size(); ++t) labels.u32(v.positions[t]);
    for (const auto& r : v.receivers) record_count += r.size();
  }
  write_section(out, kLabelSection, labels);

  Writer records;
  records.u64(record_count);
  for (const VertexLabels& v : st.vertices) {
    for (std::uint32_t t = 0; t < v.receivers.size(); ++t) {
      for (const Receiver& r : v.receivers[t]) {
        records.u64(v.id);
        records.u32(t);
        records.u64(r.target);
        records.u32(r.iteration);
      }
    }
  }
  write_section(out, kRecordSection, records);
  return std::move(out.str());
}

Snapshot decode_snapshot(std::string_view bytes) {
  Reader in(bytes, "header");
  if (in.take(sizeof kMagic) != std::string_view(kMagic, sizeof kMagic)) {
    throw CorruptionError("not a snapshot file (bad magic)");
  }
  const std::uint32_t version = in.u32();
  if (version != kSnapshotVersion) {
    throw CorruptionError("unsupported snapshot version " + std::to_string(version) +
                          " (this build reads version " + std::to_string(kSnapshotVersion) + ")");
  }
  Snapshot s;
  s.state.iterations = in.u32();
  s.seed = in.u64();
  s.state.epoch = in.u64();
  const std::uint64_t vertex_count = in.u64();
  const std::uint64_t edge_count = in.u64();

  {
    Reader g(read_section(in, kGraphSection, "graph"), "graph section");
    const std::uint64_t n = g.u64();
    if (n != vertex_count) throw CorruptionError("graph section vertex count differs from header");
    std::vector<VertexId> ids;
    ids.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) ids.push_back(g.u64());
    const std::uint64_t m = g.u64();
    if (m != edge_count) throw CorruptionError("graph section edge count differs from header");
    std::vector<Edge> edges;
    edges.reserve(m);
    for (std::uint64_t i = 0; i < m; ++i) {
      const VertexId a = g.u64();
      const VertexId b = g.u64();
      edges.emplace_back(a, b);
    }
    if (!g.done()) throw CorruptionError("trailing bytes in graph section");
    s.graph = Graph::from_edges(edges, ids);
    if (s.graph.vertex_count() != n || s.graph.edge_count() != m) {
      throw CorruptionError("graph section has duplicate vertices or edges");
    }
  }

  {
    Reader l(read_section(in, kLabelSection, "labels"), "labels section");
    for (std::uint64_t i = 0; i < vertex_count; ++i) {
      VertexLabels v;
      v.id = l.u64();
      v.active = l.u8() != 0;
      const std::uint32_t len = l.u32();
      if (len == 0) throw CorruptionError("empty label sequence for vertex " + std::to_string(v.id));
      if (len > l.remaining()) throw CorruptionError("snapshot truncated in labels section");
      v.labels.resize(len);
      for (auto& x : v.labels) x = l.u64();
      v.sources.assign(len, v.id);
      v.positions.assign(len, 0);
      for (std::uint32_t t = 1; t < len; ++t) v.sources[t] = l.u64();
      for (std::uint32_t t = 1; t < len; ++t) v.positions[t] = l.u32();
      v.receivers.resize(len);
      s.state.vertices.push_back(std::move(v));
    }
    if (!l.done()) throw CorruptionError("trailing bytes in labels section");
  }

  {
    Reader r(read_section(in, kRecordSection, "records"), "records section");
    const std::uint64_t count = r.u64();
    for (std::uint64_t i = 0; i < count; ++i) {
      const VertexId owner = r.u64();
      const std::uint32_t t = r.u32();
      const VertexId target = r.u64();
      const std::uint32_t k = r.u32();
      VertexLabels* v = s.state.find(owner);
      if (v == nullptr || t >= v->receivers.size()) {
        throw CorruptionError("receiver record for unknown slot (" + std::to_string(owner) + "," +
                              std::to_string(t) + ")");
      }
      v->receivers[t].push_back(Receiver{target, k});
    }
    if (!r.done()) throw CorruptionError("trailing bytes in records section");
  }
  if (!in.done()) throw CorruptionError("trailing bytes after the last section");

  audit_state(s.state, s.graph);
  return s;
}

void save_snapshot(const Snapshot& snapshot, const std::filesystem::path& path) {
  const std::string bytes = encode_snapshot(snapshot);
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move snapshot into place at " + path.string() + ": " + ec.message());
}

Snapshot load_snapshot(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (!in && !in.eof()) throw IoError("read failed for " + path.string());
  try {
    return decode_snapshot(buffer.str());
  } catch (const CorruptionError& e) {
    throw CorruptionError(path.string() + ": " + e.what());
  }
}

}  // namespace rslpa
