// Copyright 2026 The FedGraph Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fedgraph/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "fedgraph/error.hpp"

namespace fedgraph {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  std::string out(s.substr(first, last - first + 1));
  if (out.size() >= 2 && out.front() == '"' && out.back() == '"') {
    out = out.substr(1, out.size() - 2);
  }
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string_view rest(line);
  while (true) {
    const auto comma = rest.find(',');
    out.push_back(trim(rest.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

std::optional<double> parse_double(const std::string& cell) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  if (begin != end && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || begin == end) return std::nullopt;
  return value;
}

}  // namespace

LabeledDataset LabeledDataset::subset(const std::vector<Index>& indices) const {
  LabeledDataset out{points.subset(indices), {}, name, class_count};
  if (has_labels()) {
    out.labels.reserve(indices.size());
    for (Index i : indices) out.labels.push_back(labels[static_cast<std::size_t>(i)]);
  }
  return out;
}

LabeledDataset gen_moons(Index n, double noise_sigma, std::uint64_t seed) {
  if (n < 4 || n % 2 != 0) {
    throw InvalidInputError("moons need an even n >= 4, got " + std::to_string(n));
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
  std::normal_distribution<double> noise(0.0, 1.0);
  Matrix x(n, 2);
  std::vector<int> labels(static_cast<std::size_t>(n));
  const Index half = n / 2;
  for (Index i = 0; i < n; ++i) {
    const double t = angle(rng);
    if (i < half) {
      x(i, 0) = std::cos(t);
      x(i, 1) = std::sin(t);
      labels[static_cast<std::size_t>(i)] = 0;
    } else {
      x(i, 0) = 1.0 - std::cos(t);
      x(i, 1) = 0.5 - std::sin(t);
      labels[static_cast<std::size_t>(i)] = 1;
    }
    if (noise_sigma > 0.0) {
      x(i, 0) += noise_sigma * noise(rng);
      x(i, 1) += noise_sigma * noise(rng);
    }
  }
  return {PointSet(std::move(x)), std::move(labels), "moons", 2};
}

LabeledDataset gen_ring(Index n, Index dim, int classes, std::uint64_t seed,
                        double noise_sigma) {
  if (classes < 1 || n % classes != 0) {
    throw InvalidInputError("ring needs n divisible by the class count");
  }
  if (dim < 2) throw InvalidInputError("ring needs dim >= 2");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::normal_distribution<double> noise(0.0, noise_sigma);
  Matrix x(n, dim);
  std::vector<int> labels(static_cast<std::size_t>(n));
  const Index per_class = n / classes;
  for (Index i = 0; i < n; ++i) {
    const int c = static_cast<int>(i / per_class);
    const double r = 1.0 + c;
    const double t = angle(rng);
    x(i, 0) = r * std::cos(t);
    x(i, 1) = r * std::sin(t);
    for (Index j = 2; j < dim; ++j) x(i, j) = noise(rng);
    labels[static_cast<std::size_t>(i)] = c;
  }
  return {PointSet(std::move(x)), std::move(labels), "ring", classes};
}

LabeledDataset load_csv(const std::string& path,
                        const std::optional<LabelColumn>& label_column) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open CSV file '" + path + "'");

  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    rows.push_back(split_csv(line));
    line_numbers.push_back(line_no);
  }
  if (rows.empty()) throw ParseError("CSV file '" + path + "' is empty", 1);

  const auto width = static_cast<int>(rows.front().size());
  std::optional<int> label_idx;
  std::vector<std::string> header;
  // The first row is a header when any cell outside a numeric label fails
  // to parse as a number.
  bool has_header = false;
  for (const auto& cell : rows.front()) {
    if (!parse_double(cell)) has_header = true;
  }
  if (label_column) {
    if (label_column->index) {
      int idx = *label_column->index;
      if (idx < 0) idx += width;
      if (idx < 0 || idx >= width) {
        throw InvalidInputError("label column index out of range");
      }
      label_idx = idx;
      if (has_header) {
        // A non-numeric first-row label alone does not make a header.
        bool features_numeric = true;
        for (int j = 0; j < width; ++j) {
          if (j != idx && !parse_double(rows.front()[j])) features_numeric = false;
        }
        if (features_numeric) has_header = false;
      }
    } else if (label_column->name) {
      if (!has_header) {
        throw InvalidInputError("label column named but CSV has no header");
      }
      const auto& names = rows.front();
      const auto it = std::find(names.begin(), names.end(), *label_column->name);
      if (it == names.end()) {
        throw InvalidInputError("no column named '" + *label_column->name + "'");
      }
      label_idx = static_cast<int>(it - names.begin());
    }
  }
  const std::size_t first = has_header ? 1 : 0;
  if (rows.size() <= first) throw ParseError("CSV has no data rows", line_no);

  const int features = width - (label_idx ? 1 : 0);
  Matrix x(static_cast<Index>(rows.size() - first), features);
  std::vector<int> labels;
  std::map<std::string, int> factor;
  std::vector<std::string> order;
  for (std::size_t r = first; r < rows.size(); ++r) {
    const auto& cells = rows[r];
    if (static_cast<int>(cells.size()) != width) {
      throw ParseError("ragged row: expected " + std::to_string(width) +
                           " fields, got " + std::to_string(cells.size()),
                       line_numbers[r]);
    }
    int col = 0;
    for (int j = 0; j < width; ++j) {
      if (label_idx && j == *label_idx) {
        auto [it, inserted] =
            factor.emplace(cells[j], static_cast<int>(factor.size()));
        labels.push_back(it->second);
        continue;
      }
      const auto v = parse_double(cells[j]);
      if (!v) {
        throw ParseError("non-numeric feature '" + cells[j] + "' in column " +
                             std::to_string(j),
                         line_numbers[r]);
      }
      x(static_cast<Index>(r - first), col++) = *v;
    }
  }
  std::string name = path;
  if (const auto slash = name.find_last_of('/'); slash != std::string::npos) {
    name = name.substr(slash + 1);
  }
  return {PointSet(std::move(x)), std::move(labels), name,
          static_cast<int>(factor.size())};
}

PointSet zscore_columns(const PointSet& points) {
  Matrix x = points.data();
  for (Index j = 0; j < x.cols(); ++j) {
    const double mean = x.col(j).mean();
    x.col(j).array() -= mean;
    const double sd = std::sqrt(x.col(j).squaredNorm() / static_cast<double>(x.rows()));
    if (sd > 0.0) x.col(j) /= sd;
  }
  return PointSet(std::move(x));
}

PartitionPlan partition_clients(const LabeledDataset& ds, int clients,
                                double heterogeneity, std::uint64_t seed) {
  if (clients < 1) throw InvalidInputError("need at least one client");
  if (!(heterogeneity >= 0.0 && heterogeneity < 1.0)) {
    throw InvalidInputError("heterogeneity must lie in [0, 1)");
  }
  if (heterogeneity > 0.0 && !ds.has_labels()) {
    throw InvalidInputError("heterogeneous partitioning needs labels");
  }
  const Index n = ds.points.rows();
  std::mt19937_64 rng(seed);
  PartitionPlan plan;
  plan.heterogeneity = heterogeneity;
  plan.seed = seed;
  plan.clients.resize(static_cast<std::size_t>(clients));

  std::vector<Index> quota(static_cast<std::size_t>(clients), n / clients);
  for (Index k = 0; k < n % clients; ++k) ++quota[static_cast<std::size_t>(k)];

  std::vector<char> taken(static_cast<std::size_t>(n), 0);
  if (heterogeneity > 0.0) {
    const int classes = ds.class_count;
    std::vector<std::vector<Index>> by_class(static_cast<std::size_t>(classes));
    for (Index i = 0; i < n; ++i) {
      by_class[static_cast<std::size_t>(ds.labels[static_cast<std::size_t>(i)])].push_back(i);
    }
    for (auto& members : by_class) std::shuffle(members.begin(), members.end(), rng);
    std::vector<std::size_t> cursor(static_cast<std::size_t>(classes), 0);

    for (int k = 0; k < clients; ++k) {
      std::vector<int> dominant;
      if (classes >= clients) {
        for (int c = k; c < classes; c += clients) dominant.push_back(c);
      } else {
        dominant.push_back(k % classes);
      }
      const auto want = static_cast<Index>(
          std::llround(heterogeneity * static_cast<double>(quota[static_cast<std::size_t>(k)])));
      Index got = 0;
      bool progress = true;
      while (got < want && progress) {
        progress = false;
        for (int c : dominant) {
          if (got >= want) break;
          auto& members = by_class[static_cast<std::size_t>(c)];
          auto& pos = cursor[static_cast<std::size_t>(c)];
          if (pos < members.size()) {
            const Index idx = members[pos++];
            plan.clients[static_cast<std::size_t>(k)].push_back(idx);
            taken[static_cast<std::size_t>(idx)] = 1;
            ++got;
            progress = true;
          }
        }
      }
      if (got < want) {
        plan.warnings.push_back("client " + std::to_string(k) + ": dominant classes short by " +
                                std::to_string(want - got) + " samples, spilling to uniform pool");
      }
    }
  }

  std::vector<Index> pool;
  for (Index i = 0; i < n; ++i) {
    if (!taken[static_cast<std::size_t>(i)]) pool.push_back(i);
  }
  std::shuffle(pool.begin(), pool.end(), rng);
  std::size_t next = 0;
  for (int k = 0; k < clients; ++k) {
    auto& mine = plan.clients[static_cast<std::size_t>(k)];
    while (static_cast<Index>(mine.size()) < quota[static_cast<std::size_t>(k)] && next < pool.size()) {
      mine.push_back(pool[next++]);
    }
    std::sort(mine.begin(), mine.end());
  }
  return plan;
}

}  // namespace fedgraph
