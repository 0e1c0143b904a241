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

#include <algorithm>
#include <cmath>
#include <sstream>

#include <doctest.h>

#include "asann/embedding.h"
#include "asann/error.h"
#include "asann/eval.h"
#include "asann/frames.h"
#include "asann/index.h"

namespace asann {
namespace {

ScoredList ListOf(std::vector<VectorId> ids) {
  ScoredList l;
  l.mode = SearchMode::kSymmetricHamming;
  double s = 0.0;
  for (VectorId id : ids) l.entries.push_back({id, s -= 1.0});
  return l;
}

GroundTruth TruthOf(std::vector<VectorId> ids) {
  GroundTruth gt;
  gt.k = 1;
  for (VectorId id : ids) gt.neighbors.push_back({{id, 0.0}});
  return gt;
}

ExperimentConfig SmallConfig() {
  ExperimentConfig c;
  c.dataset.n = 400;
  c.dataset.n_queries = 40;
  c.dataset.dim = 8;
  c.m = 16;
  c.shortlist = 20;
  c.r_values = {1, 5, 20};
  c.modes = {SearchMode::kSymmetricHamming, SearchMode::kAsymmetric,
             SearchMode::kReconstructionRerank};
  c.record_timings = false;
  return c;
}

TEST_CASE("recall counting") {
  // True neighbour second for half the queries, first for the rest.
  const std::vector<ScoredList> lists = {ListOf({5, 1}), ListOf({2, 7}),
                                         ListOf({3, 4}), ListOf({9, 8})};
  const auto gt = TruthOf({1, 2, 4, 9});
  CHECK(RecallAtR(lists, gt, 1) == 0.5);
  CHECK(RecallAtR(lists, gt, 2) == 1.0);
  CHECK_THROWS_AS(RecallAtR(lists, gt, 10), InvalidArgument);
  CHECK(RecallAtR(lists, TruthOf({0, 0, 0, 0}), 2) == 0.0);
  CHECK_THROWS_AS(RecallAtR(lists, TruthOf({1}), 1), InvalidArgument);
}

TEST_CASE("antipodal pair is separated in every mode") {
  const auto a = MakeUniformFrame(16, 32, 3);
  Vector v = Vector::LinSpaced(16, -1.0, 2.0);
  v /= v.norm();
  const Vector w = -v;
  for (EmbeddingMethod method :
       {EmbeddingMethod::kAntisparse, EmbeddingMethod::kLsh}) {
    CAPTURE(EmbeddingMethodName(method));
    std::vector<BinaryCode> codes;
    PreBinarizedQuery pq;
    BinaryCode qc;
    if (method == EmbeddingMethod::kAntisparse) {
      codes = {EncodeAntisparse(a, 1.0, v).code, EncodeAntisparse(a, 1.0, w).code};
      const auto e = EncodeAntisparse(a, 1.0, v);
      qc = e.code;
      pq = e.prebinarized;
    } else {
      codes = {EncodeLsh(a, v), EncodeLsh(a, w)};
      qc = EncodeLsh(a, v);
      pq = PrebinarizeLshQuery(a, v);
    }
    for (int j = 0; j < 32; ++j) CHECK(codes[0].Sign(j) == -codes[1].Sign(j));
    const auto index = BuildIndex(codes, a.Fingerprint());
    const auto gt = TruthOf({0});
    const auto bin = SearchHamming(index, qc, 2);
    const auto asym = SearchAsymmetric(index, pq, 2);
    const auto rerank = RerankReconstruction(index, a, asym, v, 2);
    CHECK(RecallAtR({bin}, gt, 1) == 1.0);
    CHECK(RecallAtR({asym}, gt, 1) == 1.0);
    CHECK(RecallAtR({rerank}, gt, 1) == 1.0);
  }
}

TEST_CASE("experiment rows are complete, monotone and deterministic") {
  auto c = SmallConfig();
  c.seeds = {0, 1};
  std::vector<RunResults> runs;
  const auto report = RunExperiment(c, &runs);
  CHECK(report.rows.size() == 3 * 2 * 3);
  CHECK(runs.size() == 3 * 2);
  for (std::size_t i = 0; i + 1 < report.rows.size(); ++i) {
    const auto& p = report.rows[i];
    const auto& q = report.rows[i + 1];
    CHECK(p.recall >= 0.0);
    CHECK(p.recall <= 1.0);
    if (p.mode == q.mode && p.seed == q.seed) CHECK(q.recall >= p.recall);
  }
  CHECK(report.rows.back().recall > 0.0);

  std::ostringstream a, b;
  WriteRecallCsv(report, a);
  WriteRecallCsv(RunExperiment(c), b);
  CHECK(a.str() == b.str());

  auto other = c;
  other.seeds = {2};
  std::ostringstream o;
  WriteRecallCsv(RunExperiment(other), o);
  CHECK(o.str() != a.str());
}

TEST_CASE("dumped lists reproduce the reported recall") {
  auto c = SmallConfig();
  c.method = EmbeddingMethod::kLsh;
  std::vector<RunResults> runs;
  const auto report = RunExperiment(c, &runs);
  for (const auto& run : runs) {
    std::stringstream dump;
    WriteResultDump(run.lists, dump);
    const auto back = ReadResultDump(dump, run.mode);
    REQUIRE(back.size() == run.lists.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
      CHECK(back[i].entries == run.lists[i].entries);
    }
    for (const auto& row : report.rows) {
      if (row.mode != run.mode || row.seed != run.seed) continue;
      CHECK(RecallAtR(back, run.ground_truth, row.r) == row.recall);
    }
  }
}

TEST_CASE("recall csv round trip and summary") {
  auto c = SmallConfig();
  c.seeds = {0, 1, 2};
  c.modes = {SearchMode::kAsymmetric};
  const auto report = RunExperiment(c);
  std::stringstream csv;
  WriteRecallCsv(report, csv);
  CHECK(csv.str().rfind(
            "method,matrix,m,h,mode,shortlist,seed,R,recall,n,n_queries,"
            "encode_ms,search_ms\n",
            0) == 0);
  const auto back = ReadRecallCsv(csv);
  REQUIRE(back.rows.size() == report.rows.size());
  for (std::size_t i = 0; i < back.rows.size(); ++i) {
    CHECK(back.rows[i].recall == report.rows[i].recall);
    CHECK(back.rows[i].seed == report.rows[i].seed);
    CHECK(back.rows[i].r == report.rows[i].r);
  }

  const auto summary = Summarize(report);
  REQUIRE(summary.size() == 3);
  for (const auto& s : summary) {
    std::vector<double> v;
    for (const auto& row : report.rows) {
      if (row.r == s.r) v.push_back(row.recall);
    }
    REQUIRE(v.size() == 3);
    const double mean = (v[0] + v[1] + v[2]) / 3.0;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    CHECK(s.seeds == 3);
    CHECK(s.mean_recall == doctest::Approx(mean).epsilon(1e-14));
    CHECK(s.std_recall == doctest::Approx(std::sqrt(ss / 2.0)).epsilon(1e-12));
  }
  std::ostringstream out;
  WriteSummaryCsv(summary, out);
  CHECK(out.str().rfind(
            "method,matrix,m,h,mode,shortlist,R,recall_mean,recall_std,seeds\n",
            0) == 0);

  std::istringstream bad("method,matrix\nlsh\n");
  CHECK_THROWS_AS(ReadRecallCsv(bad), ParseError);
}

TEST_CASE("bench grid") {
  BenchGrid g;
  g.base = SmallConfig();
  g.base.modes = {SearchMode::kSymmetricHamming};
  g.ms = {8, 16};
  const auto report = RunBench(g);
  CHECK(report.rows.size() == 2 * 2 * 3);
  g.ms.clear();
  g.methods = {EmbeddingMethod::kLsh};
  const auto dflt = RunBench(g);
  std::vector<int> ms;
  for (const auto& r : dflt.rows) {
    if (ms.empty() || ms.back() != r.m) ms.push_back(r.m);
  }
  CHECK(ms == std::vector<int>{8, 16, 24, 32, 64});
}

TEST_CASE("config validation") {
  auto c = SmallConfig();
  c.r_values = {50};  // exceeds the shortlist in rerank mode
  CHECK_THROWS_AS(RunExperiment(c), InvalidArgument);
  c = SmallConfig();
  c.m = 4;  // fewer bits than dimensions
  CHECK_THROWS_AS(RunExperiment(c), InvalidArgument);
}

TEST_CASE("shortest round trip formatting") {
  CHECK(FormatDouble(0.5) == "0.5");
  CHECK(FormatDouble(1.0) == "1");
  CHECK(std::stod(FormatDouble(0.1 + 0.2)) == 0.1 + 0.2);
}

}  // namespace
}  // namespace asann
