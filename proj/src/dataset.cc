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

#include "asann/dataset.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <vector>

#include <json.hpp>

#include "asann/error.h"
#include "asann/parallel.h"
#include "asann/random.h"
#include "binary_io.h"

namespace asann {
namespace {

enum class Element { kFloat32, kUint8 };

VectorDataset ReadVecsStream(std::istream& in, const std::string& name,
                             std::size_t limit, Element element) {
  const std::size_t elem_size = element == Element::kFloat32 ? 4 : 1;
  std::vector<double> values;
  long long offset = 0;
  int dim = -1;
  std::size_t n = 0;
  std::vector<char> buf;
  while (limit == 0 || n < limit) {
    char header[4];
    in.read(header, 4);
    const std::streamsize got = in.gcount();
    if (got == 0) break;
    if (got < 4) throw ParseError(name + ": truncated record header", offset);
    std::int32_t d;
    {
      std::uint32_t raw = 0;
      for (int b = 3; b >= 0; --b) {
        raw = (raw << 8) | static_cast<unsigned char>(header[b]);
      }
      d = static_cast<std::int32_t>(raw);
    }
    if (d <= 0) {
      throw ParseError(name + ": non-positive dimension " + std::to_string(d),
                       offset);
    }
    if (dim >= 0 && d != dim) {
      throw ParseError(name + ": inconsistent dimension " + std::to_string(d) +
                           " (expected " + std::to_string(dim) + ")",
                       offset);
    }
    dim = d;
    buf.resize(static_cast<std::size_t>(d) * elem_size);
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (static_cast<std::size_t>(in.gcount()) != buf.size()) {
      throw ParseError(name + ": truncated record", offset);
    }
    for (int j = 0; j < d; ++j) {
      if (element == Element::kFloat32) {
        std::uint32_t raw = 0;
        for (int b = 3; b >= 0; --b) {
          raw = (raw << 8) | static_cast<unsigned char>(buf[4 * j + b]);
        }
        values.push_back(std::bit_cast<float>(raw));
      } else {
        values.push_back(static_cast<unsigned char>(buf[j]));
      }
    }
    offset += 4 + static_cast<long long>(buf.size());
    ++n;
  }
  if (n == 0) throw ParseError(name + ": no records", 0);
  VectorDataset out;
  out.vectors = Eigen::Map<RowMatrix>(values.data(), n, dim);
  if (!out.vectors.allFinite()) {
    throw ParseError(name + ": non-finite values", 0);
  }
  out.source = element == Element::kFloat32 ? DatasetSource::kFvecsFile
                                            : DatasetSource::kBvecsFile;
  out.origin = name;
  return out;
}

std::ifstream OpenBinary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return in;
}

}  // namespace

VectorDataset GenUnitSphere(std::size_t n, int dim, std::uint64_t seed) {
  if (n < 1 || dim < 1) throw InvalidArgument("dataset needs n >= 1 and D >= 1");
  Rng rng(seed);
  VectorDataset out;
  out.vectors.resize(static_cast<Eigen::Index>(n), dim);
  out.source = DatasetSource::kSyntheticUnitSphere;
  out.origin = "unit-sphere seed=" + std::to_string(seed);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = out.vectors.row(static_cast<Eigen::Index>(i));
    double norm = 0.0;
    while (!(norm > 0.0)) {
      for (int j = 0; j < dim; ++j) row(j) = rng.Gaussian();
      norm = row.norm();
    }
    row /= norm;
  }
  return out;
}

VectorDataset GenClusteredDescriptors(std::size_t n, int dim, int clusters,
                                      std::uint64_t model_seed,
                                      std::uint64_t seed) {
  if (n < 1 || dim < 1 || clusters < 1) {
    throw InvalidArgument("clustered dataset needs n, D, clusters >= 1");
  }
  constexpr double kTargetNorm = 512.0;
  constexpr double kOffset = 15.0;
  constexpr double kSpread = 0.5;

  Rng model(model_seed);
  // Mixing matrix with power-law column scales gives a decaying spectrum.
  Eigen::MatrixXd mixing(dim, dim);
  for (int j = 0; j < dim; ++j) {
    const double scale = 10.0 / std::pow(j + 1.0, 0.8);
    for (int i = 0; i < dim; ++i) mixing(i, j) = model.Gaussian() * scale;
  }
  Eigen::MatrixXd centers(dim, clusters);
  for (int c = 0; c < clusters; ++c) {
    Eigen::VectorXd g(dim);
    for (int j = 0; j < dim; ++j) g(j) = model.Gaussian();
    centers.col(c) = mixing * g;
  }

  Rng rng(seed);
  VectorDataset out;
  out.vectors.resize(static_cast<Eigen::Index>(n), dim);
  out.source = DatasetSource::kSyntheticClustered;
  out.origin = "clustered model=" + std::to_string(model_seed) +
               " seed=" + std::to_string(seed);
  Eigen::VectorXd g(dim);
  for (std::size_t i = 0; i < n; ++i) {
    double norm = 0.0;
    Eigen::VectorXd v;
    while (!(norm > 0.0)) {
      const int c = static_cast<int>(rng.NextU64() % clusters);
      for (int j = 0; j < dim; ++j) g(j) = rng.Gaussian();
      v = (centers.col(c) + kSpread * (mixing * g)).array() + kOffset;
      v = v.cwiseMax(0.0);
      norm = v.norm();
    }
    out.vectors.row(static_cast<Eigen::Index>(i)) =
        (v * (kTargetNorm / norm)).transpose();
  }
  return out;
}

VectorDataset ReadFvecs(std::istream& in, const std::string& name,
                        std::size_t limit) {
  return ReadVecsStream(in, name, limit, Element::kFloat32);
}

VectorDataset ReadBvecs(std::istream& in, const std::string& name,
                        std::size_t limit) {
  return ReadVecsStream(in, name, limit, Element::kUint8);
}

VectorDataset ReadFvecs(const std::string& path, std::size_t limit) {
  auto in = OpenBinary(path);
  return ReadFvecs(in, path, limit);
}

VectorDataset ReadBvecs(const std::string& path, std::size_t limit) {
  auto in = OpenBinary(path);
  return ReadBvecs(in, path, limit);
}

VectorDataset ReadVecs(const std::string& path, std::size_t limit) {
  const bool bytes =
      path.size() >= 6 && path.compare(path.size() - 6, 6, ".bvecs") == 0;
  return bytes ? ReadBvecs(path, limit) : ReadFvecs(path, limit);
}

void WriteFvecs(const VectorDataset& data, std::ostream& out) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    internal::PutLe<std::int32_t>(out, data.dim());
    for (double v : data.row(i)) {
      internal::PutLe<float>(out, static_cast<float>(v));
    }
  }
}

void WriteFvecs(const VectorDataset& data, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  WriteFvecs(data, out);
  if (!out) throw Error("write failed: " + path);
}

void WriteBvecs(const VectorDataset& data, std::ostream& out) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    internal::PutLe<std::int32_t>(out, data.dim());
    for (double v : data.row(i)) {
      if (v < 0.0 || v > 255.0 || v != std::floor(v)) {
        throw InvalidArgument("bvecs values must be integers in [0, 255]");
      }
      internal::PutLe<std::uint8_t>(out, static_cast<std::uint8_t>(v));
    }
  }
}

GroundTruth ComputeGroundTruth(const VectorDataset& base,
                               const VectorDataset& queries, int k) {
  if (base.dim() != queries.dim()) {
    throw InvalidArgument("base dimension " + std::to_string(base.dim()) +
                          " does not match query dimension " +
                          std::to_string(queries.dim()));
  }
  if (k < 1 || static_cast<std::size_t>(k) > base.size()) {
    throw InvalidArgument("k must be in [1, n]");
  }
  GroundTruth gt;
  gt.k = k;
  gt.neighbors.resize(queries.size());
  const int dim = base.dim();
  auto before = [](const Neighbor& a, const Neighbor& b) {
    return a.distance < b.distance || (a.distance == b.distance && a.id < b.id);
  };
  ParallelFor(queries.size(), [&](std::size_t qi) {
    const auto q = queries.row(qi);
    std::vector<Neighbor> all(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
      const auto b = base.row(i);
      double dist = 0.0;
      for (int j = 0; j < dim; ++j) {
        const double diff = q[j] - b[j];
        dist += diff * diff;
      }
      all[i] = {static_cast<std::uint32_t>(i), dist};
    }
    std::partial_sort(all.begin(), all.begin() + k, all.end(), before);
    all.resize(k);
    gt.neighbors[qi] = std::move(all);
  });
  return gt;
}

void WriteGroundTruthIvecs(const GroundTruth& gt, std::ostream& out) {
  for (const auto& list : gt.neighbors) {
    internal::PutLe<std::int32_t>(out, static_cast<std::int32_t>(list.size()));
    for (const Neighbor& nb : list) {
      internal::PutLe<std::int32_t>(out, static_cast<std::int32_t>(nb.id));
    }
  }
}

GroundTruth ReadGroundTruthIvecs(std::istream& in) {
  GroundTruth gt;
  long long offset = 0;
  while (true) {
    std::int32_t k;
    if (!internal::GetLe(in, &k)) break;
    if (k <= 0) throw ParseError("non-positive neighbour count", offset);
    if (gt.k != 0 && k != gt.k) {
      throw ParseError("inconsistent neighbour count", offset);
    }
    gt.k = k;
    std::vector<Neighbor> list(k);
    for (int j = 0; j < k; ++j) {
      std::int32_t id;
      if (!internal::GetLe(in, &id)) {
        throw ParseError("truncated ground truth record", offset);
      }
      list[j] = {static_cast<std::uint32_t>(id), 0.0};
    }
    gt.neighbors.push_back(std::move(list));
    offset += 4LL * (k + 1);
  }
  return gt;
}

std::string GroundTruthToJson(const GroundTruth& gt) {
  nlohmann::json j;
  j["k"] = gt.k;
  j["neighbors"] = nlohmann::json::array();
  for (const auto& list : gt.neighbors) {
    nlohmann::json ids = nlohmann::json::array();
    nlohmann::json dists = nlohmann::json::array();
    for (const Neighbor& nb : list) {
      ids.push_back(nb.id);
      dists.push_back(nb.distance);
    }
    j["neighbors"].push_back({{"ids", ids}, {"distances", dists}});
  }
  return j.dump();
}

}  // namespace asann
