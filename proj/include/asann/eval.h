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

#ifndef ASANN_EVAL_H_
#define ASANN_EVAL_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "asann/dataset.h"
#include "asann/frames.h"
#include "asann/index.h"

namespace asann {

enum class EmbeddingMethod { kLsh, kAntisparse };

const char* EmbeddingMethodName(EmbeddingMethod method);
EmbeddingMethod ParseEmbeddingMethod(const std::string& name);

enum class DatasetKind {
  kUnitSphere,  // n base + n_queries query vectors on the unit sphere
  kClustered,   // GenClusteredDescriptors, then PCA
  kCorpus,      // fvecs/bvecs files, then PCA
};

struct DatasetSpec {
  DatasetKind kind = DatasetKind::kUnitSphere;
  std::size_t n = 10000;
  std::size_t n_queries = 1000;
  int dim = 16;        // generated dimension
  int clusters = 256;  // kClustered only
  int pca_dim = 0;     // 0 keeps the raw dimension
  std::string base_path, query_path, learn_path;  // kCorpus only
  std::size_t limit = 0;  // kCorpus: base prefix length, 0 = all
};

struct ExperimentConfig {
  DatasetSpec dataset;
  EmbeddingMethod method = EmbeddingMethod::kAntisparse;
  MatrixKind matrix = MatrixKind::kUniformFrame;
  int m = 64;
  double h = 1.0;
  std::vector<SearchMode> modes = {SearchMode::kSymmetricHamming};
  std::size_t shortlist = 100;
  SearchMode shortlist_mode = SearchMode::kAsymmetric;
  std::vector<std::size_t> r_values = {1, 10, 100};
  std::vector<std::uint64_t> seeds = {0};
  // When false, encode_ms and search_ms are written as 0 so that output is
  // byte-reproducible.
  bool record_timings = true;
};

// Cartesian product of embedding settings evaluated on shared data.
struct BenchGrid {
  ExperimentConfig base;  // method, matrix and m are overridden
  std::vector<EmbeddingMethod> methods = {EmbeddingMethod::kLsh,
                                          EmbeddingMethod::kAntisparse};
  std::vector<MatrixKind> matrices = {MatrixKind::kUniformFrame};
  std::vector<int> ms;  // empty: d, 2d, 3d, 4d, 8d
};

struct RecallRow {
  EmbeddingMethod method;
  MatrixKind matrix;
  int m;
  double h;
  SearchMode mode;
  std::size_t shortlist;
  std::uint64_t seed;
  std::size_t r;
  double recall;
  std::size_t n;
  std::size_t n_queries;
  double encode_ms;
  double search_ms;
};

struct RecallReport {
  std::vector<RecallRow> rows;
};

// Per-query result lists of one (config, mode, seed) run.
struct RunResults {
  EmbeddingMethod method;
  MatrixKind matrix;
  int m;
  SearchMode mode;
  std::uint64_t seed;
  std::vector<ScoredList> lists;
  GroundTruth ground_truth;
};

// Fraction of queries whose exact nearest neighbour is within the first r
// entries of its list.
double RecallAtR(const std::vector<ScoredList>& results, const GroundTruth& gt,
                 std::size_t r);

// When `results` is non-null the per-query lists of every run are appended.
RecallReport RunExperiment(const ExperimentConfig& config,
                           std::vector<RunResults>* results = nullptr);
RecallReport RunBench(const BenchGrid& grid,
                      std::vector<RunResults>* results = nullptr);

// method,matrix,m,h,mode,shortlist,seed,R,recall,n,n_queries,encode_ms,search_ms
void WriteRecallCsv(const RecallReport& report, std::ostream& out,
                    bool header = true);
RecallReport ReadRecallCsv(std::istream& in);

struct SummaryRow {
  EmbeddingMethod method;
  MatrixKind matrix;
  int m;
  double h;
  SearchMode mode;
  std::size_t shortlist;
  std::size_t r;
  double mean_recall;
  double std_recall;
  std::size_t seeds;
};

// Averages recall over seeds; groups keep first-appearance order.
std::vector<SummaryRow> Summarize(const RecallReport& report);
void WriteSummaryCsv(const std::vector<SummaryRow>& rows, std::ostream& out);

// query,rank,id,score -- one line per result entry.
void WriteResultDump(const std::vector<ScoredList>& lists, std::ostream& out);
std::vector<ScoredList> ReadResultDump(std::istream& in, SearchMode mode);

// Shortest round-trip decimal form of v.
std::string FormatDouble(double v);

}  // namespace asann

#endif  // ASANN_EVAL_H_
