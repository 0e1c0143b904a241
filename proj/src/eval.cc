// Copyright 2026 The asann Authors.
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

#include "asann/eval.h"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <tuple>

#include "asann/embedding.h"
#include "asann/error.h"
#include "asann/parallel.h"
#include "asann/random.h"

namespace asann {
namespace {

struct PreparedData {
  VectorDataset base;
  VectorDataset queries;
  GroundTruth ground_truth;
  int dim() const { return base.dim(); }
};

using Clock = std::chrono::steady_clock;

double MillisSince(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

void ApplyPca(int pca_dim, const RowMatrix* learn, PreparedData* data) {
  if (pca_dim <= 0 || pca_dim == data->base.dim()) return;
  const PcaModel model = PcaFit(learn ? *learn : data->base.vectors, pca_dim);
  const std::string origin = " pca=" + std::to_string(pca_dim);
  data->base.vectors = PcaApplyBatch(model, data->base.vectors);
  data->base.source = DatasetSource::kPcaReduced;
  data->base.origin += origin;
  data->queries.vectors = PcaApplyBatch(model, data->queries.vectors);
  data->queries.source = DatasetSource::kPcaReduced;
  data->queries.origin += origin;
}

PreparedData PrepareData(const DatasetSpec& dataset, std::uint64_t seed) {
  PreparedData data;
  switch (dataset.kind) {
    case DatasetKind::kUnitSphere:
      data.base = GenUnitSphere(dataset.n, dataset.dim, MixSeed(seed, kBaseStream));
      data.queries =
          GenUnitSphere(dataset.n_queries, dataset.dim, MixSeed(seed, kQueryStream));
      ApplyPca(dataset.pca_dim, nullptr, &data);
      break;
    case DatasetKind::kClustered: {
      const std::uint64_t model = MixSeed(seed, kModelStream);
      data.base = GenClusteredDescriptors(dataset.n, dataset.dim, dataset.clusters,
                                          model, MixSeed(seed, kBaseStream));
      data.queries =
          GenClusteredDescriptors(dataset.n_queries, dataset.dim, dataset.clusters,
                                  model, MixSeed(seed, kQueryStream));
      ApplyPca(dataset.pca_dim, nullptr, &data);
      break;
    }
    case DatasetKind::kCorpus: {
      data.base = ReadVecs(dataset.base_path, dataset.limit);
      data.queries = ReadVecs(dataset.query_path, dataset.n_queries);
      if (!dataset.learn_path.empty()) {
        const VectorDataset learn = ReadVecs(dataset.learn_path);
        ApplyPca(dataset.pca_dim, &learn.vectors, &data);
      } else {
        ApplyPca(dataset.pca_dim, nullptr, &data);
      }
      break;
    }
  }
  data.ground_truth = ComputeGroundTruth(data.base, data.queries, 1);
  return data;
}

struct PointKey {
  EmbeddingMethod method;
  MatrixKind matrix;
  int m;
};

struct QueryEncoding {
  BinaryCode code;
  PreBinarizedQuery prebinarized;
};

// Runs one (method, matrix, m) point for one seed on prepared data.
void RunPoint(const ExperimentConfig& cfg, const PointKey& point,
              const PreparedData& data, std::uint64_t seed,
              std::vector<RecallRow>* rows, std::vector<RunResults>* results) {
  const int d = data.dim();
  const std::size_t n = data.base.size();
  const std::size_t nq = data.queries.size();
  if (point.m < d) {
    throw InvalidArgument("code length m=" + std::to_string(point.m) +
                          " is below the data dimension d=" +
                          std::to_string(d));
  }
  const std::size_t max_r =
      *std::max_element(cfg.r_values.begin(), cfg.r_values.end());
  if (max_r > n) throw InvalidArgument("R exceeds the database size");
  const bool has_rerank =
      std::find(cfg.modes.begin(), cfg.modes.end(),
                SearchMode::kReconstructionRerank) != cfg.modes.end();
  if (has_rerank && (cfg.shortlist > n || cfg.shortlist < max_r)) {
    throw InvalidArgument("shortlist must lie in [max R, n] for rerank mode");
  }

  const ProjectionMatrix a =
      MakeProjection(point.matrix, d, point.m, MixSeed(seed, kMatrixStream));
  const bool antisparse = point.method == EmbeddingMethod::kAntisparse;

  auto start = Clock::now();
  CodeStore store(point.m);
  store.Resize(n);
  ParallelFor(n, [&](std::size_t i) {
    const auto y = AsVector(data.base.row(i));
    store.Set(i, antisparse ? EncodeAntisparse(a, cfg.h, y).code
                            : EncodeLsh(a, y));
  });
  const double encode_ms = MillisSince(start);
  const BinaryIndex index(std::move(store), a.Fingerprint());

  start = Clock::now();
  std::vector<QueryEncoding> encoded(nq);
  ParallelFor(nq, [&](std::size_t qi) {
    const auto q = AsVector(data.queries.row(qi));
    if (antisparse) {
      AntisparseEncoding e = EncodeAntisparse(a, cfg.h, q);
      encoded[qi] = {std::move(e.code), std::move(e.prebinarized)};
    } else {
      encoded[qi] = {EncodeLsh(a, q), PrebinarizeLshQuery(a, q)};
    }
  });
  const double query_ms = MillisSince(start);

  for (SearchMode mode : cfg.modes) {
    start = Clock::now();
    std::vector<ScoredList> lists(nq);
    ParallelFor(nq, [&](std::size_t qi) {
      const QueryEncoding& qe = encoded[qi];
      switch (mode) {
        case SearchMode::kSymmetricHamming:
          lists[qi] = SearchHamming(index, qe.code, max_r);
          break;
        case SearchMode::kAsymmetric:
          lists[qi] = SearchAsymmetric(index, qe.prebinarized, max_r);
          break;
        case SearchMode::kReconstructionRerank: {
          const ScoredList shortlist =
              cfg.shortlist_mode == SearchMode::kSymmetricHamming
                  ? SearchHamming(index, qe.code, cfg.shortlist)
                  : SearchAsymmetric(index, qe.prebinarized, cfg.shortlist);
          lists[qi] = RerankReconstruction(
              index, a, shortlist, AsVector(data.queries.row(qi)),
              cfg.shortlist);
          break;
        }
      }
    });
    const double search_ms = MillisSince(start) + query_ms;

    for (std::size_t r : cfg.r_values) {
      RecallRow row;
      row.method = point.method;
      row.matrix = point.matrix;
      row.m = point.m;
      row.h = cfg.h;
      row.mode = mode;
      row.shortlist = cfg.shortlist;
      row.seed = seed;
      row.r = r;
      row.recall = RecallAtR(lists, data.ground_truth, r);
      row.n = n;
      row.n_queries = nq;
      row.encode_ms = cfg.record_timings ? encode_ms : 0.0;
      row.search_ms = cfg.record_timings ? search_ms : 0.0;
      rows->push_back(row);
    }
    if (results) {
      results->push_back({point.method, point.matrix, point.m, mode, seed,
                          std::move(lists), data.ground_truth});
    }
  }
}

void ValidateConfig(const ExperimentConfig& cfg) {
  if (cfg.r_values.empty()) throw InvalidArgument("no R values given");
  if (cfg.seeds.empty()) throw InvalidArgument("no seeds given");
  if (cfg.modes.empty()) throw InvalidArgument("no search modes given");
  if (std::find(cfg.r_values.begin(), cfg.r_values.end(), 0) !=
      cfg.r_values.end()) {
    throw InvalidArgument("R values must be positive");
  }
  if (!(cfg.h > 0.0)) throw InvalidArgument("h must be positive");
  if (cfg.shortlist_mode == SearchMode::kReconstructionRerank) {
    throw InvalidArgument("shortlist mode must be binary or asym");
  }
}

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

const char* EmbeddingMethodName(EmbeddingMethod method) {
  return method == EmbeddingMethod::kLsh ? "lsh" : "antisparse";
}

EmbeddingMethod ParseEmbeddingMethod(const std::string& name) {
  if (name == "lsh") return EmbeddingMethod::kLsh;
  if (name == "antisparse") return EmbeddingMethod::kAntisparse;
  throw InvalidArgument("unknown method '" + name + "'");
}

std::string FormatDouble(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double RecallAtR(const std::vector<ScoredList>& results, const GroundTruth& gt,
                 std::size_t r) {
  if (results.size() != gt.neighbors.size()) {
    throw InvalidArgument("result count " + std::to_string(results.size()) +
                          " does not match ground truth count " +
                          std::to_string(gt.neighbors.size()));
  }
  if (results.empty()) throw InvalidArgument("no queries");
  std::size_t hits = 0;
  for (std::size_t q = 0; q < results.size(); ++q) {
    const auto& entries = results[q].entries;
    if (gt.neighbors[q].empty()) {
      throw InvalidArgument("ground truth has no neighbour for a query");
    }
    if (entries.size() < r) {
      throw InvalidArgument("query " + std::to_string(q) + " has only " +
                            std::to_string(entries.size()) + " results, R=" +
                            std::to_string(r));
    }
    const std::uint32_t truth = gt.neighbors[q].front().id;
    for (std::size_t i = 0; i < r; ++i) {
      if (entries[i].id == truth) {
        ++hits;
        break;
      }
    }
  }
  return static_cast<double>(hits) / static_cast<double>(results.size());
}

RecallReport RunExperiment(const ExperimentConfig& config,
                           std::vector<RunResults>* results) {
  BenchGrid grid;
  grid.base = config;
  grid.methods = {config.method};
  grid.matrices = {config.matrix};
  grid.ms = {config.m};
  return RunBench(grid, results);
}

RecallReport RunBench(const BenchGrid& grid,
                      std::vector<RunResults>* results) {
  const ExperimentConfig& cfg = grid.base;
  ValidateConfig(cfg);
  if (grid.methods.empty() || grid.matrices.empty()) {
    throw InvalidArgument("empty method or matrix grid");
  }

  // Rows are produced seed by seed and then ordered by (point, mode, seed, R).
  struct Keyed {
    std::tuple<std::size_t, std::size_t, std::size_t, std::size_t> key;
    RecallRow row;
  };
  std::vector<Keyed> keyed;
  std::optional<PreparedData> corpus;

  for (std::size_t si = 0; si < cfg.seeds.size(); ++si) {
    const std::uint64_t seed = cfg.seeds[si];
    PreparedData local;
    const PreparedData* data;
    if (cfg.dataset.kind == DatasetKind::kCorpus) {
      if (!corpus) corpus = PrepareData(cfg.dataset, seed);
      data = &*corpus;
    } else {
      local = PrepareData(cfg.dataset, seed);
      data = &local;
    }
    std::vector<int> ms = grid.ms;
    if (ms.empty()) {
      const int d = data->dim();
      ms = {d, 2 * d, 3 * d, 4 * d, 8 * d};
    }

    const auto context = [seed](EmbeddingMethod method, MatrixKind matrix,
                                int m) {
      return std::string(" [method=") + EmbeddingMethodName(method) +
             " matrix=" + MatrixKindName(matrix) +
             " m=" + std::to_string(m) + " seed=" + std::to_string(seed) + "]";
    };
    std::size_t point_index = 0;
    for (EmbeddingMethod method : grid.methods) {
      for (MatrixKind matrix : grid.matrices) {
        for (int m : ms) {
          std::vector<RecallRow> rows;
          try {
            RunPoint(cfg, {method, matrix, m}, *data, seed, &rows, results);
          } catch (const InvalidArgument& e) {
            throw InvalidArgument(e.what() + context(method, matrix, m));
          } catch (const Error& e) {
            throw Error(e.what() + context(method, matrix, m));
          }
          for (std::size_t i = 0; i < rows.size(); ++i) {
            const std::size_t mode_index = i / cfg.r_values.size();
            const std::size_t r_index = i % cfg.r_values.size();
            keyed.push_back(
                {{point_index, mode_index, si, r_index}, rows[i]});
          }
          ++point_index;
        }
      }
    }
  }
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const Keyed& a, const Keyed& b) { return a.key < b.key; });
  RecallReport report;
  report.rows.reserve(keyed.size());
  for (auto& k : keyed) report.rows.push_back(k.row);
  return report;
}

void WriteRecallCsv(const RecallReport& report, std::ostream& out,
                    bool header) {
  if (header) {
    out << "method,matrix,m,h,mode,shortlist,seed,R,recall,n,n_queries,"
           "encode_ms,search_ms\n";
  }
  char timing[64];
  for (const RecallRow& r : report.rows) {
    out << EmbeddingMethodName(r.method) << ',' << MatrixKindName(r.matrix)
        << ',' << r.m << ',' << FormatDouble(r.h) << ','
        << SearchModeName(r.mode) << ',' << r.shortlist << ',' << r.seed << ','
        << r.r << ',' << FormatDouble(r.recall) << ',' << r.n << ','
        << r.n_queries << ',';
    std::snprintf(timing, sizeof(timing), "%.3f,%.3f", r.encode_ms,
                  r.search_ms);
    out << timing << '\n';
  }
}

RecallReport ReadRecallCsv(std::istream& in) {
  RecallReport report;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.rfind("method,", 0) == 0) continue;
    const auto f = SplitCsvLine(line);
    if (f.size() != 13) {
      throw ParseError("recall CSV line " + std::to_string(line_no) +
                           " has " + std::to_string(f.size()) + " fields",
                       static_cast<long long>(line_no));
    }
    try {
      RecallRow r;
      r.method = ParseEmbeddingMethod(f[0]);
      r.matrix = ParseMatrixKind(f[1]);
      r.m = std::stoi(f[2]);
      r.h = std::stod(f[3]);
      r.mode = ParseSearchMode(f[4]);
      r.shortlist = std::stoull(f[5]);
      r.seed = std::stoull(f[6]);
      r.r = std::stoull(f[7]);
      r.recall = std::stod(f[8]);
      r.n = std::stoull(f[9]);
      r.n_queries = std::stoull(f[10]);
      r.encode_ms = std::stod(f[11]);
      r.search_ms = std::stod(f[12]);
      report.rows.push_back(r);
    } catch (const std::logic_error& e) {
      throw ParseError("recall CSV line " + std::to_string(line_no) + ": " +
                           e.what(),
                       static_cast<long long>(line_no));
    }
  }
  return report;
}

std::vector<SummaryRow> Summarize(const RecallReport& report) {
  using Key = std::tuple<int, int, int, double, int, std::size_t, std::size_t>;
  std::map<Key, std::size_t> slot;
  std::vector<SummaryRow> rows;
  std::vector<std::vector<double>> samples;
  for (const RecallRow& r : report.rows) {
    const Key key{static_cast<int>(r.method), static_cast<int>(r.matrix), r.m,
                  r.h, static_cast<int>(r.mode), r.shortlist, r.r};
    auto [it, inserted] = slot.emplace(key, rows.size());
    if (inserted) {
      rows.push_back({r.method, r.matrix, r.m, r.h, r.mode, r.shortlist, r.r,
                      0.0, 0.0, 0});
      samples.emplace_back();
    }
    samples[it->second].push_back(r.recall);
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& s = samples[i];
    double mean = 0.0;
    for (double v : s) mean += v;
    mean /= static_cast<double>(s.size());
    double var = 0.0;
    for (double v : s) var += (v - mean) * (v - mean);
    rows[i].mean_recall = mean;
    rows[i].std_recall =
        s.size() > 1 ? std::sqrt(var / static_cast<double>(s.size() - 1)) : 0.0;
    rows[i].seeds = s.size();
  }
  return rows;
}

void WriteSummaryCsv(const std::vector<SummaryRow>& rows, std::ostream& out) {
  out << "method,matrix,m,h,mode,shortlist,R,recall_mean,recall_std,seeds\n";
  for (const SummaryRow& r : rows) {
    out << EmbeddingMethodName(r.method) << ',' << MatrixKindName(r.matrix)
        << ',' << r.m << ',' << FormatDouble(r.h) << ','
        << SearchModeName(r.mode) << ',' << r.shortlist << ',' << r.r << ','
        << FormatDouble(r.mean_recall) << ',' << FormatDouble(r.std_recall)
        << ',' << r.seeds << '\n';
  }
}

void WriteResultDump(const std::vector<ScoredList>& lists, std::ostream& out) {
  out << "query,rank,id,score\n";
  for (std::size_t q = 0; q < lists.size(); ++q) {
    const auto& entries = lists[q].entries;
    for (std::size_t rank = 0; rank < entries.size(); ++rank) {
      out << q << ',' << rank << ',' << entries[rank].id << ','
          << FormatDouble(entries[rank].score) << '\n';
    }
  }
}

std::vector<ScoredList> ReadResultDump(std::istream& in, SearchMode mode) {
  std::vector<ScoredList> lists;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.rfind("query,", 0) == 0) continue;
    const auto f = SplitCsvLine(line);
    if (f.size() != 4) {
      throw ParseError("result dump line " + std::to_string(line_no) +
                           " is malformed",
                       static_cast<long long>(line_no));
    }
    const std::size_t q = std::stoull(f[0]);
    const std::size_t rank = std::stoull(f[1]);
    if (q >= lists.size()) {
      lists.resize(q + 1);
      for (auto& l : lists) l.mode = mode;
    }
    auto& entries = lists[q].entries;
    if (rank != entries.size()) {
      throw ParseError("result dump ranks out of order at line " +
                           std::to_string(line_no),
                       static_cast<long long>(line_no));
    }
    entries.push_back({static_cast<VectorId>(std::stoul(f[2])),
                       std::stod(f[3])});
  }
  return lists;
}

}  // namespace asann
