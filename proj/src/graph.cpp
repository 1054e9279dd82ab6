#include "csbm/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>

#include "csbm/errors.hpp"

namespace csbm {

CsbmGraph::CsbmGraph(std::size_t num_classes, std::size_t dim, std::vector<ClassId> labels,
                     std::vector<double> features, std::span<const Edge> edges)
    : num_classes_(num_classes), dim_(dim), labels_(std::move(labels)),
      features_(std::move(features)) {
  const std::size_t n = labels_.size();
  if (num_classes_ < 1) throw InvalidArgument("graph needs at least one class");
  if (features_.size() != n * dim_) {
    throw InvalidArgument("feature matrix has " + std::to_string(features_.size()) +
                          " entries, expected n*d = " + std::to_string(n * dim_));
  }
  for (std::size_t u = 0; u < n; ++u) {
    if (labels_[u] >= num_classes_) {
      throw InvalidArgument("label of node " + std::to_string(u) + " is out of range");
    }
  }

  std::vector<std::size_t> degree(n + 1, 0);
  for (const auto& [u, v] : edges) {
    if (u >= n || v >= n) {
      throw InvalidArgument("edge (" + std::to_string(u) + ", " + std::to_string(v) +
                            ") references a node out of range");
    }
    if (u == v) throw InvalidArgument("self-loop at node " + std::to_string(u));
    ++degree[u];
    ++degree[v];
  }
  offsets_.assign(n + 1, 0);
  for (std::size_t u = 0; u < n; ++u) offsets_[u + 1] = offsets_[u] + degree[u];
  neighbors_.resize(offsets_[n]);
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (const auto& [u, v] : edges) {
    neighbors_[cursor[u]++] = v;
    neighbors_[cursor[v]++] = u;
  }
  for (std::size_t u = 0; u < n; ++u) {
    auto first = neighbors_.begin() + static_cast<std::ptrdiff_t>(offsets_[u]);
    auto last = neighbors_.begin() + static_cast<std::ptrdiff_t>(offsets_[u + 1]);
    std::sort(first, last);
    if (auto dup = std::adjacent_find(first, last); dup != last) {
      throw InvalidArgument("duplicate edge (" + std::to_string(u) + ", " +
                            std::to_string(*dup) + ")");
    }
  }
}

bool CsbmGraph::has_edge(NodeId u, NodeId v) const {
  const auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<Edge> CsbmGraph::edge_list() const {
  std::vector<Edge> out;
  out.reserve(num_edges());
  for (NodeId u = 0; u < num_nodes(); ++u) {
    for (NodeId v : neighbors(u)) {
      if (u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

namespace {

void append_double(std::string& buf, double x) {
  char tmp[64];
  auto res = std::to_chars(tmp, tmp + sizeof(tmp), x);
  buf.append(tmp, res.ptr);
}

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Next line, or throws naming the line that was expected.
  std::string_view next(const char* expectation) {
    if (!std::getline(in_, line_)) {
      throw ParseError(line_no_ + 1, std::string("unexpected end of file, expected ") +
                                        expectation);
    }
    ++line_no_;
    if (!line_.empty() && line_.back() == '\r') line_.pop_back();
    return line_;
  }
  bool at_end() {
    std::string rest;
    while (std::getline(in_, rest)) {
      ++line_no_;
      if (rest.find_first_not_of(" \t\r") != std::string::npos) return false;
    }
    return true;
  }
  std::size_t line_no() const noexcept { return line_no_; }

 private:
  std::istream& in_;
  std::string line_;
  std::size_t line_no_ = 0;
};

class Tokens {
 public:
  Tokens(std::string_view s, std::size_t line) : s_(s), line_(line) {}

  std::string_view word() {
    skip_space();
    const auto start = pos_;
    while (pos_ < s_.size() && s_[pos_] != ' ' && s_[pos_] != '\t') ++pos_;
    if (start == pos_) throw ParseError(line_, "missing token");
    return s_.substr(start, pos_ - start);
  }
  template <typename T>
  T number() {
    const auto w = word();
    T value{};
    auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), value);
    if (ec != std::errc() || ptr != w.data() + w.size()) {
      throw ParseError(line_, "malformed number '" + std::string(w) + "'");
    }
    return value;
  }
  template <typename T>
  T keyed(std::string_view key) {
    const auto w = word();
    if (w.size() <= key.size() + 1 || w.substr(0, key.size()) != key || w[key.size()] != '=') {
      throw ParseError(line_, "expected '" + std::string(key) + "=<int>', got '" +
                                  std::string(w) + "'");
    }
    const auto digits = w.substr(key.size() + 1);
    T value{};
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    if (ec != std::errc() || ptr != digits.data() + digits.size()) {
      throw ParseError(line_, "malformed value for '" + std::string(key) + "'");
    }
    return value;
  }
  void expect_end() {
    skip_space();
    if (pos_ != s_.size()) {
      throw ParseError(line_, "unexpected trailing content '" +
                                  std::string(s_.substr(pos_)) + "'");
    }
  }

 private:
  void skip_space() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }
  std::string_view s_;
  std::size_t pos_ = 0;
  std::size_t line_;
};

}  // namespace

void write_graph(const CsbmGraph& g, std::ostream& out) {
  std::string buf;
  buf += "csbm-graph v1\n";
  buf += "n=" + std::to_string(g.num_nodes()) + " d=" + std::to_string(g.dim()) +
         " C=" + std::to_string(g.num_classes()) + "\n";
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    buf += std::to_string(g.label(u));
    for (double x : g.features(u)) {
      buf += ' ';
      append_double(buf, x);
    }
    buf += '\n';
  }
  const auto edges = g.edge_list();
  buf += "edges " + std::to_string(edges.size()) + "\n";
  for (const auto& [u, v] : edges) {
    buf += std::to_string(u);
    buf += ' ';
    buf += std::to_string(v);
    buf += '\n';
  }
  out << buf;
}

void write_graph(const CsbmGraph& g, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot open '" + path.string() + "' for writing");
  write_graph(g, out);
  if (!out) throw NumericError("failed writing '" + path.string() + "'");
}

CsbmGraph read_graph(std::istream& in) {
  LineReader lines(in);
  if (lines.next("header") != "csbm-graph v1") {
    throw ParseError(lines.line_no(), "expected header 'csbm-graph v1'");
  }
  const auto dims_line = lines.next("dimension line");
  Tokens dims(dims_line, lines.line_no());
  const auto n = dims.keyed<std::size_t>("n");
  const auto d = dims.keyed<std::size_t>("d");
  const auto C = dims.keyed<std::size_t>("C");
  dims.expect_end();
  if (C < 1) throw ParseError(lines.line_no(), "C must be >= 1");

  std::vector<ClassId> labels(n);
  std::vector<double> features(n * d);
  for (std::size_t u = 0; u < n; ++u) {
    auto line = lines.next("node line");
    if (line.starts_with("edges")) {
      throw ParseError(lines.line_no(), "header declares n=" + std::to_string(n) +
                                            " but only " + std::to_string(u) +
                                            " node lines precede the edge section");
    }
    Tokens tok(line, lines.line_no());
    const auto label = tok.number<long long>();
    if (label < 0 || static_cast<std::size_t>(label) >= C) {
      throw ParseError(lines.line_no(), "label " + std::to_string(label) + " outside [0, C)");
    }
    labels[u] = static_cast<ClassId>(label);
    for (std::size_t j = 0; j < d; ++j) features[u * d + j] = tok.number<double>();
    tok.expect_end();
  }

  auto edge_header = lines.next("'edges <m>'");
  if (!edge_header.starts_with("edges")) {
    throw ParseError(lines.line_no(), "expected 'edges <m>' after " + std::to_string(n) +
                                          " node lines (more node lines than n?)");
  }
  Tokens eh(edge_header, lines.line_no());
  eh.word();
  const auto m = eh.number<std::size_t>();
  eh.expect_end();

  std::vector<Edge> edges;
  edges.reserve(m);
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto edge_line = lines.next("edge line");
    Tokens tok(edge_line, lines.line_no());
    const auto u = tok.number<long long>();
    const auto v = tok.number<long long>();
    tok.expect_end();
    if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= n ||
        static_cast<std::size_t>(v) >= n) {
      throw ParseError(lines.line_no(), "edge endpoint out of range");
    }
    if (u == v) throw ParseError(lines.line_no(), "self-loop at node " + std::to_string(u));
    if (u > v) {
      throw ParseError(lines.line_no(), "edge must be written with u < v");
    }
    if (!seen.insert(static_cast<std::uint64_t>(u) * n + static_cast<std::uint64_t>(v)).second) {
      throw ParseError(lines.line_no(), "duplicate edge (" + std::to_string(u) + ", " +
                                            std::to_string(v) + ")");
    }
    edges.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
  }
  const auto last_line = lines.line_no();
  if (!lines.at_end()) {
    throw ParseError(last_line + 1, "trailing content after " + std::to_string(m) + " edges");
  }
  return CsbmGraph(C, d, std::move(labels), std::move(features), edges);
}

CsbmGraph read_graph(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open '" + path.string() + "'");
  return read_graph(in);
}

}  // namespace csbm
