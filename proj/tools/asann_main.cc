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

// Command line front end: dataset generation, ground truth, encoding, index
// construction, search and recall experiments.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "asann/dataset.h"
#include "asann/embedding.h"
#include "asann/error.h"
#include "asann/eval.h"
#include "asann/frames.h"
#include "asann/index.h"
#include "asann/parallel.h"
#include "asann/random.h"
#include "asann/solver.h"
#include "asann/trace_json.h"

namespace asann {
namespace {

// Accepts "3", "0,1,2" and "0..4" (inclusive).
std::vector<std::uint64_t> ParseSeedList(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto dots = item.find("..");
    try {
      if (dots == std::string::npos) {
        out.push_back(std::stoull(item));
      } else {
        const std::uint64_t lo = std::stoull(item.substr(0, dots));
        const std::uint64_t hi = std::stoull(item.substr(dots + 2));
        if (hi < lo) throw InvalidArgument("empty seed range '" + item + "'");
        for (std::uint64_t s = lo; s <= hi; ++s) out.push_back(s);
      }
    } catch (const std::logic_error&) {
      throw InvalidArgument("bad seed list '" + text + "'");
    }
  }
  if (out.empty()) throw InvalidArgument("empty seed list");
  return out;
}

// Writes to `path`, or stdout when it is empty or "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw Error("cannot open " + path + " for writing");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  void Close() {
    stream().flush();
    if (!stream()) throw Error("write failed");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::string CodeString(const BinaryCode& code) {
  std::string s(code.size(), '+');
  for (int j = 0; j < code.size(); ++j) {
    if (code.Sign(j) < 0) s[j] = '-';
  }
  return s;
}

std::string PcaPath(const std::string& index_path) {
  return index_path + ".pca";
}
std::string MatrixPath(const std::string& index_path) {
  return index_path + ".aspm";
}

std::optional<PcaModel> LoadPcaIfPresent(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  return ReadPcaModel(in);
}

void SavePca(const PcaModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  WritePcaModel(model, out);
  if (!out.flush()) throw Error("write failed: " + path);
}

struct GenArgs {
  std::string kind = "sphere";
  std::size_t n = 10000;
  int dim = 16;
  int clusters = 256;
  std::uint64_t model_seed = 0;
  std::uint64_t seed = 0;
  std::string out;
};

void RunGen(const GenArgs& g) {
  VectorDataset data;
  if (g.kind == "sphere") {
    data = GenUnitSphere(g.n, g.dim, g.seed);
  } else if (g.kind == "clustered") {
    data = GenClusteredDescriptors(g.n, g.dim, g.clusters, g.model_seed,
                                   g.seed);
  } else {
    throw InvalidArgument("unknown dataset kind '" + g.kind + "'");
  }
  WriteFvecs(data, g.out);
}

struct GtArgs {
  std::string base, queries, out;
  int k = 100;
  std::size_t limit = 0;
  bool json = false;
};

void RunGt(const GtArgs& g) {
  const auto base = ReadVecs(g.base, g.limit);
  const auto queries = ReadVecs(g.queries);
  const auto gt = ComputeGroundTruth(base, queries, g.k);
  Output out(g.out);
  if (g.json) {
    out.stream() << GroundTruthToJson(gt) << '\n';
  } else {
    WriteGroundTruthIvecs(gt, out.stream());
  }
  out.Close();
}

struct EncodeArgs {
  std::string input, out, trace, matrix_file;
  std::string method = "antisparse";
  std::string matrix = "frame";
  int m = 64;
  double h = 1.0;
  std::uint64_t seed = 0;
  std::size_t limit = 0;
};

// One line per vector: index, code as +/- characters and, for anti-sparse
// codes, the l-infinity norm of the solution.
void RunEncode(const EncodeArgs& e) {
  const auto data = ReadVecs(e.input, e.limit);
  const ProjectionMatrix a =
      e.matrix_file.empty()
          ? MakeProjection(ParseMatrixKind(e.matrix), data.dim(), e.m,
                           MixSeed(e.seed, kMatrixStream))
          : LoadProjectionMatrix(e.matrix_file);
  if (a.dim() != data.dim()) {
    throw InvalidArgument("matrix dimension does not match the input");
  }
  const bool antisparse =
      ParseEmbeddingMethod(e.method) == EmbeddingMethod::kAntisparse;
  Output out(e.out);
  nlohmann::json traces = nlohmann::json::array();
  out.stream() << (antisparse ? "vector,code,linf\n" : "vector,code\n");
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto y = AsVector(data.row(i));
    if (!antisparse) {
      out.stream() << i << ',' << CodeString(EncodeLsh(a, y)) << '\n';
      continue;
    }
    const auto rep = Solve(a, y, e.h, SolveOptions{!e.trace.empty()});
    out.stream() << i << ',' << CodeString(BinaryCode::FromSignsOf(rep.x))
                 << ',' << FormatDouble(rep.linf) << '\n';
    if (!e.trace.empty()) {
      traces.push_back({{"vector", i},
                        {"h_start", rep.h_start},
                        {"h_target", rep.h_target},
                        {"breakpoints", TraceToJson(rep.breakpoints)}});
    }
  }
  out.Close();
  if (!e.trace.empty()) {
    Output t(e.trace);
    t.stream() << traces.dump(2) << '\n';
    t.Close();
  }
}

struct IndexArgs {
  std::string base, out;
  std::string method = "antisparse";
  std::string matrix = "frame";
  int m = 64;
  double h = 1.0;
  int pca = 0;
  std::uint64_t seed = 0;
  std::size_t limit = 0;
};

// Writes the index, its JSON sidecar, the projection matrix (.aspm) and,
// with --pca, the PCA model (.pca).
void RunIndex(const IndexArgs& g) {
  auto base = ReadVecs(g.base, g.limit);
  if (g.pca > 0) {
    const PcaModel model = PcaFit(base.vectors, g.pca);
    base.vectors = PcaApplyBatch(model, base.vectors);
    SavePca(model, PcaPath(g.out));
  } else {
    std::remove(PcaPath(g.out).c_str());
  }
  const ProjectionMatrix a = MakeProjection(
      ParseMatrixKind(g.matrix), base.dim(), g.m, MixSeed(g.seed, kMatrixStream));
  const EmbeddingMethod method = ParseEmbeddingMethod(g.method);
  CodeStore store(g.m);
  store.Resize(base.size());
  ParallelFor(base.size(), [&](std::size_t i) {
    const auto y = AsVector(base.row(i));
    store.Set(i, method == EmbeddingMethod::kAntisparse
                     ? EncodeAntisparse(a, g.h, y).code
                     : EncodeLsh(a, y));
  });
  const BinaryIndex index(std::move(store), a.Fingerprint());
  SaveIndex(index, {EmbeddingMethodName(method), g.h}, g.out);
  SaveProjectionMatrix(a, MatrixPath(g.out));
}

struct SearchArgs {
  std::string index, queries, out;
  std::string mode = "asym";
  std::string shortlist_mode = "asym";
  std::size_t k = 100;
  std::size_t shortlist = 100;
};

void RunSearch(const SearchArgs& s) {
  IndexMetadata meta;
  const BinaryIndex index = LoadIndex(s.index, &meta);
  const ProjectionMatrix a = LoadProjectionMatrix(MatrixPath(s.index));
  if (a.Fingerprint() != index.matrix_ref()) {
    throw InvalidArgument("projection matrix does not match the index");
  }
  auto queries = ReadVecs(s.queries);
  if (const auto pca = LoadPcaIfPresent(PcaPath(s.index))) {
    queries.vectors = PcaApplyBatch(*pca, queries.vectors);
  }
  if (queries.dim() != a.dim()) {
    throw InvalidArgument("query dimension does not match the index");
  }
  const SearchMode mode = ParseSearchMode(s.mode);
  const SearchMode shortlist_mode = ParseSearchMode(s.shortlist_mode);
  if (shortlist_mode == SearchMode::kReconstructionRerank) {
    throw InvalidArgument("shortlist mode must be binary or asym");
  }
  if (mode == SearchMode::kReconstructionRerank && s.shortlist < s.k) {
    throw InvalidArgument("shortlist must be at least k");
  }
  const bool antisparse =
      ParseEmbeddingMethod(meta.kind) == EmbeddingMethod::kAntisparse;

  std::vector<ScoredList> lists(queries.size());
  ParallelFor(queries.size(), [&](std::size_t qi) {
    const auto q = AsVector(queries.row(qi));
    BinaryCode code;
    PreBinarizedQuery pq;
    if (antisparse) {
      auto e = EncodeAntisparse(a, meta.h_target, q);
      code = std::move(e.code);
      pq = std::move(e.prebinarized);
    } else {
      code = EncodeLsh(a, q);
      pq = PrebinarizeLshQuery(a, q);
    }
    const auto first = [&](SearchMode m, std::size_t r) {
      return m == SearchMode::kSymmetricHamming ? SearchHamming(index, code, r)
                                                : SearchAsymmetric(index, pq, r);
    };
    if (mode == SearchMode::kReconstructionRerank) {
      lists[qi] = RerankReconstruction(
          index, a, first(shortlist_mode, s.shortlist), q, s.k);
    } else {
      lists[qi] = first(mode, s.k);
    }
  });
  Output out(s.out);
  WriteResultDump(lists, out.stream());
  out.Close();
}

struct BenchArgs {
  std::string dataset = "sphere";
  std::size_t n = 10000;
  std::size_t n_queries = 1000;
  int dim = 16;
  int clusters = 256;
  int pca = 0;
  std::string base, query, learn;
  std::size_t limit = 0;
  std::vector<std::string> methods = {"lsh", "antisparse"};
  std::vector<std::string> matrices = {"frame"};
  std::vector<int> ms;
  double h = 1.0;
  std::vector<std::string> modes = {"binary"};
  std::size_t shortlist = 100;
  std::string shortlist_mode = "asym";
  std::vector<std::size_t> r_values = {1, 10, 100};
  std::string seeds = "0";
  bool no_timings = false;
  std::string out, dump;
};

void RunBenchCommand(const BenchArgs& b) {
  BenchGrid grid;
  ExperimentConfig& c = grid.base;
  if (b.dataset == "sphere") {
    c.dataset.kind = DatasetKind::kUnitSphere;
  } else if (b.dataset == "clustered") {
    c.dataset.kind = DatasetKind::kClustered;
  } else if (b.dataset == "corpus") {
    c.dataset.kind = DatasetKind::kCorpus;
  } else {
    throw InvalidArgument("unknown dataset '" + b.dataset + "'");
  }
  c.dataset.n = b.n;
  c.dataset.n_queries = b.n_queries;
  c.dataset.dim = b.dim;
  c.dataset.clusters = b.clusters;
  c.dataset.pca_dim = b.pca;
  c.dataset.base_path = b.base;
  c.dataset.query_path = b.query;
  c.dataset.learn_path = b.learn;
  c.dataset.limit = b.limit;
  c.h = b.h;
  c.modes.clear();
  for (const auto& m : b.modes) c.modes.push_back(ParseSearchMode(m));
  c.shortlist = b.shortlist;
  c.shortlist_mode = ParseSearchMode(b.shortlist_mode);
  c.r_values = b.r_values;
  c.seeds = ParseSeedList(b.seeds);
  c.record_timings = !b.no_timings;
  grid.methods.clear();
  for (const auto& m : b.methods) grid.methods.push_back(ParseEmbeddingMethod(m));
  grid.matrices.clear();
  for (const auto& m : b.matrices) grid.matrices.push_back(ParseMatrixKind(m));
  grid.ms = b.ms;

  std::vector<RunResults> runs;
  const auto report = RunBench(grid, b.dump.empty() ? nullptr : &runs);
  Output out(b.out);
  WriteRecallCsv(report, out.stream());
  out.Close();
  if (!b.dump.empty()) {
    Output dump(b.dump);
    for (const auto& run : runs) {
      dump.stream() << "# method=" << EmbeddingMethodName(run.method)
                    << " matrix=" << MatrixKindName(run.matrix)
                    << " m=" << run.m << " mode=" << SearchModeName(run.mode)
                    << " seed=" << run.seed << '\n';
      WriteResultDump(run.lists, dump.stream());
    }
    dump.Close();
  }
}

void RunSummarize(const std::string& in_path, const std::string& out_path) {
  RecallReport report;
  if (in_path.empty() || in_path == "-") {
    report = ReadRecallCsv(std::cin);
  } else {
    std::ifstream in(in_path);
    if (!in) throw Error("cannot open " + in_path);
    report = ReadRecallCsv(in);
  }
  Output out(out_path);
  WriteSummaryCsv(Summarize(report), out.stream());
  out.Close();
}

int Main(int argc, char** argv) {
  CLI::App app{"Anti-sparse binary codes for approximate nearest neighbour "
               "search"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic dataset");
  gen_cmd->add_option("--kind", gen.kind, "sphere or clustered")
      ->capture_default_str();
  gen_cmd->add_option("--n", gen.n, "Number of vectors")->capture_default_str();
  gen_cmd->add_option("--dim", gen.dim, "Dimension")->capture_default_str();
  gen_cmd->add_option("--clusters", gen.clusters, "Cluster count")
      ->capture_default_str();
  gen_cmd->add_option("--model-seed", gen.model_seed,
                      "Seed of the cluster model (clustered only)")
      ->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed, "Sample seed")->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "Output .fvecs file")->required();

  GtArgs gt;
  auto* gt_cmd = app.add_subcommand("gt", "Exact nearest neighbours");
  gt_cmd->add_option("--base", gt.base, "Base vectors")->required();
  gt_cmd->add_option("--queries", gt.queries, "Query vectors")->required();
  gt_cmd->add_option("--k", gt.k, "Neighbours per query")->capture_default_str();
  gt_cmd->add_option("--limit", gt.limit, "Use only the first N base vectors");
  gt_cmd->add_flag("--json", gt.json, "Write JSON instead of .ivecs");
  gt_cmd->add_option("--out", gt.out, "Output file (default stdout)");

  EncodeArgs enc;
  auto* enc_cmd = app.add_subcommand("encode", "Encode vectors to binary codes");
  enc_cmd->add_option("--input", enc.input, "Input .fvecs/.bvecs")->required();
  enc_cmd->add_option("--method", enc.method, "antisparse or lsh")
      ->capture_default_str();
  enc_cmd->add_option("--matrix", enc.matrix, "frame or gauss")
      ->capture_default_str();
  enc_cmd->add_option("--matrix-file", enc.matrix_file,
                      "Load the projection matrix instead of generating it");
  enc_cmd->add_option("--m", enc.m, "Code length")->capture_default_str();
  enc_cmd->add_option("--h", enc.h, "Penalty")->capture_default_str();
  enc_cmd->add_option("--seed", enc.seed, "Matrix seed")->capture_default_str();
  enc_cmd->add_option("--limit", enc.limit, "Encode only the first N vectors");
  enc_cmd->add_option("--trace", enc.trace, "Write solver breakpoints as JSON");
  enc_cmd->add_option("--out", enc.out, "Output CSV (default stdout)");

  IndexArgs idx;
  auto* idx_cmd = app.add_subcommand("index", "Encode a base set into an index");
  idx_cmd->add_option("--base", idx.base, "Base vectors")->required();
  idx_cmd->add_option("--method", idx.method, "antisparse or lsh")
      ->capture_default_str();
  idx_cmd->add_option("--matrix", idx.matrix, "frame or gauss")
      ->capture_default_str();
  idx_cmd->add_option("--m", idx.m, "Code length")->capture_default_str();
  idx_cmd->add_option("--h", idx.h, "Penalty")->capture_default_str();
  idx_cmd->add_option("--pca", idx.pca, "Reduce to this many dimensions first");
  idx_cmd->add_option("--seed", idx.seed, "Matrix seed")->capture_default_str();
  idx_cmd->add_option("--limit", idx.limit, "Use only the first N vectors");
  idx_cmd->add_option("--out", idx.out, "Index file")->required();

  SearchArgs srch;
  auto* srch_cmd = app.add_subcommand("search", "Query an index");
  srch_cmd->add_option("--index", srch.index, "Index file")->required();
  srch_cmd->add_option("--queries", srch.queries, "Query vectors")->required();
  srch_cmd->add_option("--mode", srch.mode, "binary, asym or rerank")
      ->capture_default_str();
  srch_cmd->add_option("--shortlist", srch.shortlist, "Rerank shortlist size")
      ->capture_default_str();
  srch_cmd->add_option("--shortlist-mode", srch.shortlist_mode,
                       "binary or asym")
      ->capture_default_str();
  srch_cmd->add_option("--k", srch.k, "Results per query")->capture_default_str();
  srch_cmd->add_option("--out", srch.out, "Output CSV (default stdout)");

  BenchArgs bench;
  auto* bench_cmd =
      app.add_subcommand("bench", "Recall experiments over a parameter grid");
  bench_cmd->add_option("--dataset", bench.dataset, "sphere, clustered or corpus")
      ->capture_default_str();
  bench_cmd->add_option("--n", bench.n, "Base size")->capture_default_str();
  bench_cmd->add_option("--queries", bench.n_queries, "Query count")
      ->capture_default_str();
  bench_cmd->add_option("--dim", bench.dim, "Generated dimension")
      ->capture_default_str();
  bench_cmd->add_option("--clusters", bench.clusters, "Cluster count")
      ->capture_default_str();
  bench_cmd->add_option("--pca", bench.pca, "PCA output dimension (0 = none)");
  bench_cmd->add_option("--base", bench.base, "Corpus base file");
  bench_cmd->add_option("--query", bench.query, "Corpus query file");
  bench_cmd->add_option("--learn", bench.learn, "Corpus PCA training file");
  bench_cmd->add_option("--limit", bench.limit, "Corpus base prefix length");
  bench_cmd->add_option("--method", bench.methods, "lsh, antisparse")
      ->delimiter(',')
      ->capture_default_str();
  bench_cmd->add_option("--matrix", bench.matrices, "frame, gauss")
      ->delimiter(',')
      ->capture_default_str();
  bench_cmd->add_option("--m", bench.ms, "Code lengths (default d,2d,3d,4d,8d)")
      ->delimiter(',');
  bench_cmd->add_option("--h", bench.h, "Penalty")->capture_default_str();
  bench_cmd->add_option("--mode", bench.modes, "binary, asym, rerank")
      ->delimiter(',')
      ->capture_default_str();
  bench_cmd->add_option("--shortlist", bench.shortlist, "Rerank shortlist size")
      ->capture_default_str();
  bench_cmd->add_option("--shortlist-mode", bench.shortlist_mode,
                        "binary or asym")
      ->capture_default_str();
  bench_cmd->add_option("--R", bench.r_values, "Recall ranks")
      ->delimiter(',')
      ->capture_default_str();
  bench_cmd->add_option("--seed", bench.seeds, "Seeds, e.g. 0..4 or 1,3")
      ->capture_default_str();
  bench_cmd->add_flag("--no-timings", bench.no_timings,
                      "Write zero timings for reproducible output");
  bench_cmd->add_option("--dump", bench.dump, "Write per-query result lists");
  bench_cmd->add_option("--out", bench.out, "Output CSV (default stdout)");

  std::string sum_in, sum_out;
  auto* sum_cmd =
      app.add_subcommand("summarize", "Average a recall CSV over seeds");
  sum_cmd->add_option("--in", sum_in, "Recall CSV (default stdin)");
  sum_cmd->add_option("--out", sum_out, "Output CSV (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen_cmd) RunGen(gen);
    if (*gt_cmd) RunGt(gt);
    if (*enc_cmd) RunEncode(enc);
    if (*idx_cmd) RunIndex(idx);
    if (*srch_cmd) RunSearch(srch);
    if (*bench_cmd) RunBenchCommand(bench);
    if (*sum_cmd) RunSummarize(sum_in, sum_out);
  } catch (const ParseError& e) {
    std::cerr << "asann: parse error at byte " << e.offset() << ": "
              << e.what() << '\n';
    return 3;
  } catch (const InvalidArgument& e) {
    std::cerr << "asann: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "asann: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace
}  // namespace asann

int main(int argc, char** argv) { return asann::Main(argc, argv); }
