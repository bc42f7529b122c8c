// Copyright 2026 The ccforest authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ccf/model_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ccf {

namespace {

[[noreturn]] void fail(const std::string& msg) {
  throw std::runtime_error("model: " + msg);
}

std::string hex(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

double unhex(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') fail("bad float literal '" + s + "'");
  return v;
}

void check_token(const std::string& s, const char* what) {
  if (s.find('\t') != std::string::npos || s.find('\n') != std::string::npos)
    fail(std::string(what) + " contains a tab or newline: '" + s + "'");
}

const char* role_tag(ColumnRole r) {
  switch (r) {
    case ColumnRole::kOrdinal: return "ordinal";
    case ColumnRole::kOrdered: return "ordered";
    case ColumnRole::kCategorical: return "categorical";
    case ColumnRole::kLabel: return "label";
  }
  return "?";
}

ColumnRole role_from_tag(const std::string& s) {
  if (s == "ordinal") return ColumnRole::kOrdinal;
  if (s == "ordered") return ColumnRole::kOrdered;
  if (s == "categorical") return ColumnRole::kCategorical;
  if (s == "label") return ColumnRole::kLabel;
  fail("unknown column role '" + s + "'");
}

const char* criterion_tag(SplitCriterion c) {
  return c == SplitCriterion::kInfoGain ? "info_gain" : "gini";
}

SplitCriterion criterion_from_tag(const std::string& s) {
  if (s == "info_gain") return SplitCriterion::kInfoGain;
  if (s == "gini") return SplitCriterion::kGini;
  fail("unknown split criterion '" + s + "'");
}

/// Pull-based tokenizer over tab-separated lines.
class Reader {
 public:
  explicit Reader(const std::string& text) : in_(text) {}

  bool next_line() {
    if (!std::getline(in_, line_)) return false;
    if (!line_.empty() && line_.back() == '\r') line_.pop_back();
    pos_ = 0;
    ++line_no_;
    return true;
  }

  std::string token() {
    if (pos_ > line_.size()) fail(where() + ": missing field");
    const auto tab = line_.find('\t', pos_);
    std::string out = line_.substr(pos_, tab == std::string::npos
                                             ? std::string::npos
                                             : tab - pos_);
    pos_ = tab == std::string::npos ? line_.size() + 1 : tab + 1;
    return out;
  }

  template <typename T>
  T integer() {
    const std::string t = token();
    char* end = nullptr;
    const long long v = std::strtoll(t.c_str(), &end, 10);
    if (end == t.c_str() || *end != '\0')
      fail(where() + ": bad integer '" + t + "'");
    return static_cast<T>(v);
  }

  double real() { return unhex(token()); }

  void expect(const char* tag) {
    const std::string t = token();
    if (t != tag) fail(where() + ": expected '" + tag + "', found '" + t + "'");
  }

  void require_line(const char* what) {
    if (!next_line()) fail(std::string("truncated file: missing ") + what);
  }

  std::string where() const { return "line " + std::to_string(line_no_); }

 private:
  std::istringstream in_;
  std::string line_;
  std::size_t pos_ = 0;
  std::size_t line_no_ = 0;
};

}  // namespace

std::string serialize_forest(const Forest& f) {
  std::ostringstream out;
  out << kModelFormatVersion << '\n';

  out << "schema\t" << f.schema.columns.size() << '\t' << f.schema.label_col
      << '\n';
  for (const SchemaColumn& col : f.schema.columns) {
    check_token(col.name, "column name");
    out << "column\t" << role_tag(col.role) << '\t' << col.name << '\t'
        << col.levels.size();
    for (const std::string& lv : col.levels) {
      check_token(lv, "level");
      out << '\t' << lv;
    }
    out << '\n';
  }
  out << "classes\t" << f.schema.class_names.size();
  for (const std::string& c : f.schema.class_names) {
    check_token(c, "class name");
    out << '\t' << c;
  }
  out << '\n';

  out << "groups\t" << f.groups.size() << '\n';
  for (const FeatureGroup& g : f.groups) {
    check_token(g.name, "group name");
    out << "group\t" << g.name << '\t' << (g.one_hot ? 1 : 0) << '\t'
        << g.col_begin << '\t' << g.col_end << '\n';
  }

  out << "config\t" << forest_mode_name(f.config.mode) << '\t'
      << f.config.n_trees << '\t' << f.lambda_used << '\t'
      << criterion_tag(f.config.criterion) << '\t' << hex(f.config.epsilon)
      << '\t' << f.config.seed << '\t' << (f.config.leaf_on_degenerate ? 1 : 0)
      << '\t' << (f.per_tree_bagging ? 1 : 0) << '\n';

  const std::size_t d = f.standardizer.mu.size();
  out << "standardizer\t" << d << '\n';
  auto dump_row = [&out](const char* tag, const std::vector<double>& v) {
    out << tag;
    for (const double x : v) out << '\t' << hex(x);
    out << '\n';
  };
  dump_row("mu", f.standardizer.mu);
  dump_row("sigma", f.standardizer.sigma);
  dump_row("colmin", f.col_min);
  dump_row("colmax", f.col_max);

  out << "trees\t" << f.trees.size() << '\n';
  for (std::size_t i = 0; i < f.trees.size(); ++i) {
    const Tree& t = f.trees[i];
    out << "tree\t" << i << '\t' << t.nodes.size() << '\t' << t.phi_cols.size()
        << '\n';
    for (const TreeNode& n : t.nodes) {
      if (n.is_leaf()) {
        out << "L\t" << n.label << '\t' << static_cast<int>(n.stop) << '\t'
            << n.n_train << '\n';
      } else {
        out << "S\t" << n.left << '\t' << n.right << '\t' << n.phi_begin
            << '\t' << n.phi_end << '\t' << hex(n.threshold) << '\t'
            << n.n_train << '\n';
      }
    }
    for (std::size_t p = 0; p < t.phi_cols.size(); ++p)
      out << "p\t" << t.phi_cols[p] << '\t' << hex(t.phi_weights[p]) << '\n';
  }
  out << "end\n";
  return out.str();
}

Forest parse_forest(const std::string& text) {
  Reader r(text);
  if (!r.next_line()) fail("empty file");
  {
    // First line is the format version, alone on its line.
    std::istringstream probe(text);
    std::string version;
    std::getline(probe, version);
    if (!version.empty() && version.back() == '\r') version.pop_back();
    if (version != kModelFormatVersion)
      fail("unsupported format version '" + version + "' (expected " +
           std::string(kModelFormatVersion) + ")");
  }

  Forest f;
  r.require_line("schema");
  r.expect("schema");
  const auto n_cols = r.integer<std::size_t>();
  f.schema.label_col = r.integer<std::size_t>();
  for (std::size_t c = 0; c < n_cols; ++c) {
    r.require_line("column");
    r.expect("column");
    SchemaColumn col;
    col.role = role_from_tag(r.token());
    col.name = r.token();
    const auto n_levels = r.integer<std::size_t>();
    for (std::size_t l = 0; l < n_levels; ++l) col.levels.push_back(r.token());
    f.schema.columns.push_back(std::move(col));
  }
  r.require_line("classes");
  r.expect("classes");
  const auto n_classes = r.integer<std::size_t>();
  for (std::size_t k = 0; k < n_classes; ++k)
    f.schema.class_names.push_back(r.token());

  r.require_line("groups");
  r.expect("groups");
  const auto n_groups = r.integer<std::size_t>();
  for (std::size_t g = 0; g < n_groups; ++g) {
    r.require_line("group");
    r.expect("group");
    FeatureGroup fg;
    fg.name = r.token();
    fg.one_hot = r.integer<int>() != 0;
    fg.col_begin = r.integer<std::uint32_t>();
    fg.col_end = r.integer<std::uint32_t>();
    f.groups.push_back(std::move(fg));
  }

  r.require_line("config");
  r.expect("config");
  f.config.mode = forest_mode_from_name(r.token());
  f.config.n_trees = r.integer<std::size_t>();
  f.lambda_used = r.integer<std::size_t>();
  f.config.lambda = f.lambda_used;
  f.config.criterion = criterion_from_tag(r.token());
  f.config.epsilon = r.real();
  f.config.seed = r.integer<std::uint64_t>();
  f.config.leaf_on_degenerate = r.integer<int>() != 0;
  f.per_tree_bagging = r.integer<int>() != 0;

  r.require_line("standardizer");
  r.expect("standardizer");
  const auto d = r.integer<std::size_t>();
  auto read_row = [&r, d](const char* tag, std::vector<double>& v) {
    r.require_line(tag);
    r.expect(tag);
    v.resize(d);
    for (std::size_t i = 0; i < d; ++i) v[i] = r.real();
  };
  read_row("mu", f.standardizer.mu);
  read_row("sigma", f.standardizer.sigma);
  read_row("colmin", f.col_min);
  read_row("colmax", f.col_max);

  r.require_line("trees");
  r.expect("trees");
  const auto n_trees = r.integer<std::size_t>();
  f.trees.resize(n_trees);
  for (std::size_t i = 0; i < n_trees; ++i) {
    r.require_line("tree");
    r.expect("tree");
    if (r.integer<std::size_t>() != i) fail("tree index out of order");
    const auto n_nodes = r.integer<std::size_t>();
    const auto n_phi = r.integer<std::size_t>();
    Tree& t = f.trees[i];
    t.nodes.reserve(n_nodes);
    for (std::size_t nd = 0; nd < n_nodes; ++nd) {
      r.require_line("node");
      const std::string kind = r.token();
      TreeNode node;
      if (kind == "L") {
        node.label = r.integer<std::int16_t>();
        node.stop = static_cast<StopReason>(r.integer<int>());
        node.n_train = r.integer<std::int32_t>();
      } else if (kind == "S") {
        node.left = r.integer<std::int32_t>();
        node.right = r.integer<std::int32_t>();
        node.phi_begin = r.integer<std::uint32_t>();
        node.phi_end = r.integer<std::uint32_t>();
        node.threshold = r.real();
        node.n_train = r.integer<std::int32_t>();
      } else {
        fail(r.where() + ": unknown node kind '" + kind + "'");
      }
      t.nodes.push_back(node);
    }
    t.phi_cols.reserve(n_phi);
    t.phi_weights.reserve(n_phi);
    for (std::size_t p = 0; p < n_phi; ++p) {
      r.require_line("projection entry");
      r.expect("p");
      t.phi_cols.push_back(r.integer<std::uint32_t>());
      t.phi_weights.push_back(r.real());
    }
    // Structural sanity so a malformed file cannot crash routing later.
    for (const TreeNode& node : t.nodes) {
      if (node.is_leaf()) {
        if (node.label < 0 ||
            static_cast<std::size_t>(node.label) >= f.schema.class_names.size())
          fail("leaf label out of range");
      } else {
        if (node.left < 0 || node.right < 0 ||
            static_cast<std::size_t>(node.left) >= t.nodes.size() ||
            static_cast<std::size_t>(node.right) >= t.nodes.size())
          fail("child id out of range");
        if (node.phi_end > t.phi_cols.size() || node.phi_begin >= node.phi_end)
          fail("projection range out of bounds");
      }
    }
  }
  r.require_line("end");
  r.expect("end");
  return f;
}

void save_forest(const Forest& forest, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail("cannot write " + tmp);
    out << serialize_forest(forest);
    out.flush();
    if (!out) fail("write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    fail("cannot rename " + tmp + " to " + path);
}

Forest load_forest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_forest(ss.str());
}

}  // namespace ccf
