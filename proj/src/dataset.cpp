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

#include "ccf/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "ccf/rng.hpp"

namespace ccf {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

std::string trim(const std::string& s) {
  const char* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (const char ch : line) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

bool is_missing_field(const std::string& f) { return f.empty() || f == "?"; }

ColumnRole role_from_string(const std::string& s, const std::string& origin) {
  if (s == "ordinal") return ColumnRole::kOrdinal;
  if (s == "ordered") return ColumnRole::kOrdered;
  if (s == "categorical") return ColumnRole::kCategorical;
  if (s == "label") return ColumnRole::kLabel;
  fail(origin + ": unknown column role '" + s + "'");
}

const char* role_to_string(ColumnRole r) {
  switch (r) {
    case ColumnRole::kOrdinal: return "ordinal";
    case ColumnRole::kOrdered: return "ordered";
    case ColumnRole::kCategorical: return "categorical";
    case ColumnRole::kLabel: return "label";
  }
  return "?";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double parse_number(const std::string& field, std::size_t row,
                    const std::string& col, const std::string& origin) {
  const std::string t = trim(field);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end == t.c_str() || *end != '\0' || !std::isfinite(v))
    fail(origin + ": row " + std::to_string(row) + ", column '" + col +
         "': cannot parse numeric value '" + field + "'");
  return v;
}

int level_index(const std::vector<std::string>& levels, const std::string& v) {
  for (std::size_t i = 0; i < levels.size(); ++i)
    if (levels[i] == v) return static_cast<int>(i);
  return -1;
}

}  // namespace

Schema Schema::parse_text(const std::string& text, const std::string& origin) {
  Schema schema;
  bool have_label = false;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos)
      fail(origin + ": expected 'role: column' but got '" + line + "'");
    const std::string role_str = trim(line.substr(0, colon));
    std::string rest = trim(line.substr(colon + 1));

    SchemaColumn col;
    col.role = role_from_string(role_str, origin);
    const auto eq = rest.find('=');
    if (eq != std::string::npos) {
      if (col.role != ColumnRole::kOrdered)
        fail(origin + ": only ordered columns may declare levels: '" + line +
             "'");
      col.name = trim(rest.substr(0, eq));
      for (const std::string& lv : split(rest.substr(eq + 1), ','))
        col.levels.push_back(trim(lv));
      if (col.levels.size() < 2)
        fail(origin + ": ordered column '" + col.name +
             "' needs at least two levels");
    } else {
      if (col.role == ColumnRole::kOrdered)
        fail(origin + ": ordered column '" + rest +
             "' must declare its levels with '='");
      col.name = rest;
    }
    if (col.name.empty()) fail(origin + ": empty column name");
    for (const auto& existing : schema.columns)
      if (existing.name == col.name)
        fail(origin + ": duplicate column '" + col.name + "'");
    if (col.role == ColumnRole::kLabel) {
      if (have_label) fail(origin + ": more than one label column");
      have_label = true;
      schema.label_col = schema.columns.size();
    }
    schema.columns.push_back(std::move(col));
  }
  if (schema.columns.empty()) fail(origin + ": schema declares no columns");
  if (!have_label) fail(origin + ": schema declares no label column");
  if (schema.columns.size() < 2)
    fail(origin + ": schema needs at least one feature column");
  return schema;
}

Schema Schema::parse_file(const std::string& path) {
  return parse_text(read_file(path), path);
}

std::string Schema::to_text() const {
  std::ostringstream out;
  for (const auto& col : columns) {
    out << role_to_string(col.role) << ": " << col.name;
    if (col.role == ColumnRole::kOrdered) {
      out << " =";
      for (std::size_t i = 0; i < col.levels.size(); ++i)
        out << (i == 0 ? " " : ",") << col.levels[i];
    }
    out << "\n";
  }
  return out.str();
}

Dataset parse_csv_text(const std::string& text, const Schema& schema_in,
                       bool frozen, const std::string& origin) {
  Schema schema = schema_in;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || trim(line).empty())
    fail(origin + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  // Map CSV columns onto schema columns by header name.
  const std::vector<std::string> header = split(line, ',');
  if (header.size() != schema.columns.size())
    fail(origin + ": header has " + std::to_string(header.size()) +
         " columns but the schema declares " +
         std::to_string(schema.columns.size()));
  std::vector<std::size_t> csv_to_schema(header.size());
  std::size_t label_csv_col = 0;
  std::vector<bool> used(schema.columns.size(), false);
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string name = trim(header[c]);
    bool found = false;
    for (std::size_t s = 0; s < schema.columns.size(); ++s) {
      if (schema.columns[s].name == name) {
        if (used[s]) fail(origin + ": duplicate header column '" + name + "'");
        csv_to_schema[c] = s;
        used[s] = true;
        found = true;
        break;
      }
    }
    if (!found) fail(origin + ": header column '" + name + "' not in schema");
    if (csv_to_schema[c] == schema.label_col) label_csv_col = c;
  }

  std::vector<std::vector<std::string>> rows;
  std::size_t row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    std::vector<std::string> fields = split(line, ',');
    if (fields.size() != header.size())
      fail(origin + ": row " + std::to_string(row_no) + " has " +
           std::to_string(fields.size()) + " fields, expected " +
           std::to_string(header.size()));
    for (std::string& f : fields) f = trim(f);
    rows.push_back(std::move(fields));
  }

  if (!frozen) {
    // Learn level dictionaries and class names in first-appearance order.
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto& fields = rows[r];
      for (std::size_t c = 0; c < fields.size(); ++c) {
        SchemaColumn& sc = schema.columns[csv_to_schema[c]];
        const std::string& f = fields[c];
        if (sc.role == ColumnRole::kCategorical && !is_missing_field(f) &&
            level_index(sc.levels, f) < 0)
          sc.levels.push_back(f);
      }
      const std::string& lab = fields[label_csv_col];
      if (is_missing_field(lab))
        fail(origin + ": row " + std::to_string(r + 2) + ": missing label");
      if (level_index(schema.class_names, lab) < 0)
        schema.class_names.push_back(lab);
    }
    for (const auto& sc : schema.columns)
      if (sc.role == ColumnRole::kCategorical && sc.levels.size() < 2)
        fail(origin + ": categorical column '" + sc.name +
             "' has fewer than two levels in the data");
    if (schema.class_names.size() < 2)
      fail(origin + ": need at least two classes, found " +
           std::to_string(schema.class_names.size()));
  }

  // Feature groups in CSV column order, label excluded.
  Dataset ds;
  std::size_t enc = 0;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const SchemaColumn& sc = schema.columns[csv_to_schema[c]];
    if (sc.role == ColumnRole::kLabel) continue;
    FeatureGroup g;
    g.name = sc.name;
    g.one_hot = sc.role == ColumnRole::kCategorical;
    g.col_begin = static_cast<std::uint32_t>(enc);
    enc += g.one_hot ? sc.levels.size() : 1;
    g.col_end = static_cast<std::uint32_t>(enc);
    ds.groups.push_back(std::move(g));
  }

  ds.schema = schema;
  ds.x = Matrix(rows.size(), enc);
  ds.missing.assign(rows.size() * enc, 0);
  ds.labels.assign(rows.size(), -1);

  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& fields = rows[r];
    std::size_t gi = 0;
    const std::size_t reported_row = r + 2;  // header is row 1
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const SchemaColumn& sc = schema.columns[csv_to_schema[c]];
      const std::string& f = fields[c];
      if (sc.role == ColumnRole::kLabel) {
        if (is_missing_field(f)) {
          if (!frozen)
            fail(origin + ": row " + std::to_string(reported_row) +
                 ": missing label");
          ds.labels[r] = -1;
        } else {
          const int k = level_index(schema.class_names, f);
          if (k < 0)
            fail(origin + ": row " + std::to_string(reported_row) +
                 ": unknown class label '" + f + "'");
          ds.labels[r] = k;
        }
        continue;
      }
      const FeatureGroup& g = ds.groups[gi++];
      if (is_missing_field(f)) {
        for (std::uint32_t e = g.col_begin; e < g.col_end; ++e)
          ds.missing[r * enc + e] = 1;
        continue;
      }
      switch (sc.role) {
        case ColumnRole::kOrdinal:
          ds.x(r, g.col_begin) = parse_number(f, reported_row, sc.name, origin);
          break;
        case ColumnRole::kOrdered: {
          const int idx = level_index(sc.levels, f);
          if (idx < 0)
            fail(origin + ": row " + std::to_string(reported_row) +
                 ", column '" + sc.name + "': unknown ordered level '" + f +
                 "'");
          ds.x(r, g.col_begin) = static_cast<double>(idx);
          break;
        }
        case ColumnRole::kCategorical: {
          const int idx = level_index(sc.levels, f);
          // Frozen mode can meet unseen levels: all-zero block, "none of the
          // training levels".
          if (idx >= 0)
            ds.x(r, g.col_begin + static_cast<std::size_t>(idx)) = 1.0;
          break;
        }
        case ColumnRole::kLabel:
          break;
      }
    }
  }
  return ds;
}

Dataset load_csv(const std::string& path, const Schema& schema) {
  return parse_csv_text(read_file(path), schema, /*frozen=*/false, path);
}

Dataset load_csv_frozen(const std::string& path, const Schema& schema) {
  return parse_csv_text(read_file(path), schema, /*frozen=*/true, path);
}

void encode_row_frozen(const Schema& schema,
                       const std::vector<FeatureGroup>& groups,
                       const std::vector<std::string>& fields,
                       std::size_t row_index_for_errors,
                       std::vector<double>& values_out,
                       std::vector<std::uint8_t>& missing_out,
                       int& label_out) {
  if (fields.size() != schema.columns.size())
    fail("row " + std::to_string(row_index_for_errors) + " has " +
         std::to_string(fields.size()) + " fields, expected " +
         std::to_string(schema.columns.size()));
  const std::size_t enc = groups.empty() ? 0 : groups.back().col_end;
  values_out.assign(enc, 0.0);
  missing_out.assign(enc, 0);
  label_out = -1;
  std::size_t gi = 0;
  for (std::size_t c = 0; c < fields.size(); ++c) {
    const SchemaColumn& sc = schema.columns[c];
    const std::string f = trim(fields[c]);
    if (sc.role == ColumnRole::kLabel) {
      if (!is_missing_field(f)) {
        const int k = level_index(schema.class_names, f);
        if (k < 0)
          fail("row " + std::to_string(row_index_for_errors) +
               ": unknown class label '" + f + "'");
        label_out = k;
      }
      continue;
    }
    const FeatureGroup& g = groups[gi++];
    if (is_missing_field(f)) {
      for (std::uint32_t e = g.col_begin; e < g.col_end; ++e) missing_out[e] = 1;
      continue;
    }
    switch (sc.role) {
      case ColumnRole::kOrdinal:
        values_out[g.col_begin] =
            parse_number(f, row_index_for_errors, sc.name, "input");
        break;
      case ColumnRole::kOrdered: {
        const int idx = level_index(sc.levels, f);
        if (idx < 0)
          fail("row " + std::to_string(row_index_for_errors) + ", column '" +
               sc.name + "': unknown ordered level '" + f + "'");
        values_out[g.col_begin] = static_cast<double>(idx);
        break;
      }
      case ColumnRole::kCategorical: {
        const int idx = level_index(sc.levels, f);
        if (idx >= 0)
          values_out[g.col_begin + static_cast<std::size_t>(idx)] = 1.0;
        break;
      }
      case ColumnRole::kLabel:
        break;
    }
  }
}

Dataset Dataset::subset(const std::vector<int>& rows) const {
  Dataset out;
  out.schema = schema;
  out.groups = groups;
  out.x = Matrix(rows.size(), n_cols());
  out.missing.assign(rows.size() * n_cols(), 0);
  out.labels.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::size_t r = static_cast<std::size_t>(rows[i]);
    std::copy(x.row(r), x.row(r) + n_cols(), out.x.row(i));
    std::copy(missing_row(r), missing_row(r) + n_cols(),
              out.missing.begin() + static_cast<std::ptrdiff_t>(i * n_cols()));
    out.labels[i] = labels[r];
  }
  return out;
}

std::pair<std::vector<double>, std::vector<double>> Dataset::column_ranges()
    const {
  std::vector<double> lo(n_cols(), 0.0), hi(n_cols(), 0.0);
  for (std::size_t c = 0; c < n_cols(); ++c) {
    bool seen = false;
    for (std::size_t r = 0; r < n_rows(); ++r) {
      if (is_missing(r, c)) continue;
      const double v = x(r, c);
      if (!seen) {
        lo[c] = hi[c] = v;
        seen = true;
      } else {
        lo[c] = std::min(lo[c], v);
        hi[c] = std::max(hi[c], v);
      }
    }
  }
  return {lo, hi};
}

void write_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot write file: " + path);
  const Schema& schema = ds.schema;
  std::vector<std::size_t> feature_cols;
  for (std::size_t c = 0; c < schema.columns.size(); ++c)
    if (schema.columns[c].role != ColumnRole::kLabel) feature_cols.push_back(c);
  // Feature order must match the group layout; generators emit features
  // first, label last, so this holds for everything we write.
  for (std::size_t i = 0; i < feature_cols.size(); ++i)
    out << schema.columns[feature_cols[i]].name << ',';
  out << schema.columns[schema.label_col].name << '\n';

  char buf[64];
  for (std::size_t r = 0; r < ds.n_rows(); ++r) {
    for (std::size_t gi = 0; gi < ds.groups.size(); ++gi) {
      const FeatureGroup& g = ds.groups[gi];
      const SchemaColumn& sc = schema.columns[feature_cols[gi]];
      if (ds.is_missing(r, g.col_begin)) {
        out << '?';
      } else if (g.one_hot) {
        int idx = -1;
        for (std::uint32_t e = g.col_begin; e < g.col_end; ++e)
          if (ds.x(r, e) != 0.0) idx = static_cast<int>(e - g.col_begin);
        out << (idx >= 0 ? sc.levels[static_cast<std::size_t>(idx)] : "?");
      } else if (sc.role == ColumnRole::kOrdered) {
        const auto idx = static_cast<std::size_t>(ds.x(r, g.col_begin));
        out << (idx < sc.levels.size() ? sc.levels[idx] : "?");
      } else {
        std::snprintf(buf, sizeof buf, "%.17g", ds.x(r, g.col_begin));
        out << buf;
      }
      out << ',';
    }
    out << (ds.labels[r] >= 0
                ? schema.class_names[static_cast<std::size_t>(ds.labels[r])]
                : "?")
        << '\n';
  }
  out.flush();
  if (!out) fail("write failed: " + path);
}

Standardizer Standardizer::fit(const Dataset& ds) {
  if (ds.n_rows() < 2) fail("standardizer: need at least two rows");
  Standardizer s;
  const std::size_t d = ds.n_cols();
  s.mu.assign(d, 0.0);
  s.sigma.assign(d, 0.0);
  for (std::size_t c = 0; c < d; ++c) {
    double sum = 0.0;
    std::size_t n_obs = 0;
    for (std::size_t r = 0; r < ds.n_rows(); ++r) {
      if (ds.is_missing(r, c)) continue;
      sum += ds.x(r, c);
      ++n_obs;
    }
    if (n_obs == 0) continue;
    const double mu = sum / static_cast<double>(n_obs);
    s.mu[c] = mu;
    if (n_obs < 2) continue;
    double ss = 0.0;
    for (std::size_t r = 0; r < ds.n_rows(); ++r) {
      if (ds.is_missing(r, c)) continue;
      const double dv = ds.x(r, c) - mu;
      ss += dv * dv;
    }
    s.sigma[c] = std::sqrt(ss / static_cast<double>(n_obs - 1));
  }
  return s;
}

void Standardizer::apply_row(double* values, const std::uint8_t* miss,
                             std::size_t n) const {
  if (n != mu.size()) fail("standardizer: column layout mismatch");
  for (std::size_t c = 0; c < n; ++c) {
    if (miss != nullptr && miss[c] != 0) {
      values[c] = 0.0;  // the training mean in z-score space
    } else if (sigma[c] > 0.0) {
      values[c] = (values[c] - mu[c]) / sigma[c];
    } else {
      values[c] = 0.0;
    }
  }
}

void Standardizer::apply(Dataset& ds) const {
  if (ds.n_cols() != mu.size()) fail("standardizer: column layout mismatch");
  for (std::size_t r = 0; r < ds.n_rows(); ++r)
    apply_row(ds.x.row(r), ds.missing_row(r), ds.n_cols());
}

Dataset standardized_copy(const Dataset& ds) {
  Dataset out = ds;
  const Standardizer st = Standardizer::fit(out);
  st.apply(out);
  std::fill(out.missing.begin(), out.missing.end(), 0);
  return out;
}

std::vector<FoldSplit> make_folds(const Dataset& ds, std::size_t folds,
                                  std::uint64_t seed, bool stratified) {
  const std::size_t n = ds.n_rows();
  if (folds < 2) fail("make_folds: need at least two folds");
  if (folds > n) fail("make_folds: more folds than rows");

  std::vector<int> fold_of(n, -1);
  Rng rng(splitmix64(seed ^ 0xf01d5eedULL));

  std::size_t offset = 0;
  auto deal = [&](std::vector<int>& idx) {
    rng.shuffle(idx);
    for (std::size_t i = 0; i < idx.size(); ++i)
      fold_of[static_cast<std::size_t>(idx[i])] =
          static_cast<int>((offset + i) % folds);
    offset = (offset + idx.size()) % folds;
  };

  if (stratified) {
    std::vector<int> leftover;
    for (std::size_t k = 0; k < ds.n_classes(); ++k) {
      std::vector<int> members;
      for (std::size_t r = 0; r < n; ++r)
        if (ds.labels[r] == static_cast<int>(k))
          members.push_back(static_cast<int>(r));
      if (members.empty()) continue;
      if (members.size() < folds) {
        std::cerr << "make_folds: class '" << ds.schema.class_names[k]
                  << "' has " << members.size() << " rows < " << folds
                  << " folds; placing them unstratified\n";
        leftover.insert(leftover.end(), members.begin(), members.end());
        continue;
      }
      deal(members);
    }
    for (std::size_t r = 0; r < n; ++r)
      if (fold_of[r] < 0 && ds.labels[r] < 0) leftover.push_back(static_cast<int>(r));
    if (!leftover.empty()) deal(leftover);
  } else {
    std::vector<int> all(n);
    for (std::size_t r = 0; r < n; ++r) all[r] = static_cast<int>(r);
    deal(all);
  }

  std::vector<FoldSplit> out(folds);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t f = 0; f < folds; ++f) {
      if (static_cast<std::size_t>(fold_of[r]) == f)
        out[f].test.push_back(static_cast<int>(r));
      else
        out[f].train.push_back(static_cast<int>(r));
    }
  }
  return out;
}

}  // namespace ccf
