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

#include "asann/solver.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

namespace asann {
namespace {

// Relative pivot threshold for the free-column factorization.
constexpr double kRankTolerance = 1e-10;
// Event times closer than this (relative) are treated as simultaneous.
constexpr double kTieTolerance = 1e-12;
// An index that just moved may not move back within this relative step.
constexpr double kReentryGuard = 1e-9;
constexpr int kIterationCapFactor = 10;

std::string FormatPartition(const std::vector<int>& free) {
  std::string s = "free={";
  for (std::size_t i = 0; i < free.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(free[i]);
  }
  return s + "}";
}

// Follows the solution path of J_h for one (A, y).
//
// The free columns A_F are kept in a thin QR factorization A_F = Q R that is
// updated in O(d |F|) when a column is appended or removed. On a piece with
// saturated signs s and c = A_S s, the optimality system gives
//
//   x_F   = xi + zeta * t,          xi = R^-1 Q^T y, zeta = -R^-1 Q^T c
//   h v_S = A_S^T P (y - c t),      P = I - Q Q^T
//   h     = eta - upsilon * t,      eta = c^T P y, upsilon = |P c|^2
//
// where t = |x|_inf. All three are affine in t, so both events are located
// exactly.
class PathFollower {
 public:
  PathFollower(const ProjectionMatrix& a, const VectorRef& y, bool record)
      : a_(a.entries()),
        y_(y),
        d_(static_cast<int>(a_.rows())),
        m_(static_cast<int>(a_.cols())),
        record_(record),
        sign_(m_, 0),
        q_(d_, d_),
        r_(d_, d_) {}

  SpreadRepresentation Run(double h_target) {
    SpreadRepresentation out;
    out.h_target = h_target;
    out.x = Vector::Zero(m_);

    const Vector z = a_.transpose() * y_;
    const double h_start = z.lpNorm<1>();
    out.h_start = h_start;
    if (!(h_start > 0.0) || h_target >= h_start) {
      out.free.resize(m_);
      for (int i = 0; i < m_; ++i) out.free[i] = i;
      return out;
    }

    for (int i = 0; i < m_; ++i) sign_[i] = z(i) >= 0.0 ? 1 : -1;
    double t = 0.0;
    int last_moved = -1;
    Record(&out, h_start, PathEvent::kPathStart, -1, 0, t);

    const int cap = kIterationCapFactor * m_;
    for (int iter = 0;; ++iter) {
      Segment seg = ComputeSegment();
      if (!(seg.upsilon > 0.0) || !std::isfinite(seg.upsilon)) {
        throw DegenerateInstanceError(
            "path coefficient upsilon is not positive for partition " +
            FormatPartition(free_));
      }

      Event next = NextEvent(seg, t, last_moved);
      const double h_next =
          next.index >= 0 ? seg.eta - seg.upsilon * next.t : -1.0;
      if (next.index < 0 || h_next < h_target) {
        const double t_final = std::max(t, (seg.eta - h_target) / seg.upsilon);
        Finish(seg, t_final, &out);
        return out;
      }
      if (iter >= cap) {
        throw NonConvergenceError(
            "path did not reach h=" + std::to_string(h_target) + " within " +
                std::to_string(cap) + " partition changes",
            std::move(out.breakpoints));
      }

      t = next.t;
      if (next.release) {
        sign_[next.index] = 0;
        AppendFree(next.index);
        Record(&out, h_next, PathEvent::kSubgradientVanished, next.index, 0,
               t);
      } else {
        RemoveFree(next.position);
        sign_[next.index] = next.sign;
        Record(&out, h_next, PathEvent::kComponentSaturated, next.index,
               next.sign, t);
      }
      last_moved = next.index;
    }
  }

 private:
  struct Segment {
    Vector xi, zeta;  // over free_, in factorization order
    Vector u, w;      // A^T P y and A^T P c, over all indices
    double eta = 0.0;
    double upsilon = 0.0;
  };

  struct Event {
    int index = -1;
    int position = -1;  // position in free_ for saturation events
    bool release = false;
    int sign = 0;
    double t = std::numeric_limits<double>::infinity();
  };

  int num_free() const { return static_cast<int>(free_.size()); }

  Segment ComputeSegment() const {
    const int f = num_free();
    Vector c = Vector::Zero(d_);
    for (int i = 0; i < m_; ++i) {
      if (sign_[i] > 0) {
        c += a_.col(i);
      } else if (sign_[i] < 0) {
        c -= a_.col(i);
      }
    }
    Segment seg;
    Vector ry = y_;
    Vector rc = c;
    if (f > 0) {
      const auto q = q_.leftCols(f);
      const auto r = r_.topLeftCorner(f, f).triangularView<Eigen::Upper>();
      const Vector qy = q.transpose() * y_;
      const Vector qc = q.transpose() * c;
      seg.xi = r.solve(qy);
      seg.zeta = -r.solve(qc);
      ry.noalias() -= q * qy;
      rc.noalias() -= q * qc;
    }
    seg.eta = c.dot(ry);
    seg.upsilon = rc.squaredNorm();
    seg.u.noalias() = a_.transpose() * ry;
    seg.w.noalias() = a_.transpose() * rc;
    return seg;
  }

  static bool Earlier(const Event& candidate, const Event& best) {
    if (best.index < 0) return true;
    const double scale = std::max(std::abs(candidate.t), std::abs(best.t));
    if (std::abs(candidate.t - best.t) <= kTieTolerance * scale) {
      return candidate.index < best.index;
    }
    return candidate.t < best.t;
  }

  Event NextEvent(const Segment& seg, double t, int last_moved) const {
    Event best;
    const double guard = t * (1.0 + kReentryGuard);
    auto consider = [&](Event e) {
      e.t = std::max(e.t, t);
      if (e.index == last_moved && e.t <= guard) return;
      if (Earlier(e, best)) best = e;
    };
    // Saturated index i leaves when s_i (u_i - w_i t) reaches zero.
    for (int i = 0; i < m_; ++i) {
      if (sign_[i] == 0) continue;
      const double slope = sign_[i] * seg.w(i);
      if (slope <= 0.0) continue;
      Event e;
      e.index = i;
      e.release = true;
      e.t = seg.u(i) / seg.w(i);
      consider(e);
    }
    // Free index hits +t when (1 - zeta) t = xi, -t when (1 + zeta) t = -xi.
    for (int p = 0; p < num_free(); ++p) {
      const double xi = seg.xi(p);
      const double zeta = seg.zeta(p);
      Event e;
      e.index = free_[p];
      e.position = p;
      if (zeta > 1.0) {
        e.sign = 1;
        e.t = xi / (1.0 - zeta);
      } else if (zeta < -1.0) {
        e.sign = -1;
        e.t = -xi / (1.0 + zeta);
      } else {
        continue;
      }
      consider(e);
    }
    return best;
  }

  void Finish(const Segment& seg, double t, SpreadRepresentation* out) const {
    Vector& x = out->x;
    for (int i = 0; i < m_; ++i) x(i) = sign_[i] * t;
    for (int p = 0; p < num_free(); ++p) {
      x(free_[p]) = std::clamp(seg.xi(p) + seg.zeta(p) * t, -t, t);
    }
    out->linf = t;
    const double cut = t * (1.0 - kSaturationTolerance);
    for (int i = 0; i < m_; ++i) {
      if (t > 0.0 && std::abs(x(i)) >= cut) {
        out->saturated.push_back(i);
      } else {
        out->free.push_back(i);
      }
    }
  }

  void Record(SpreadRepresentation* out, double h, PathEvent event, int index,
              int sign, double t) const {
    if (!record_) return;
    PathBreakpoint bp;
    bp.h = h;
    bp.event = event;
    bp.index = index;
    bp.sign = sign;
    bp.linf = t;
    for (int i = 0; i < m_; ++i) {
      (sign_[i] != 0 ? bp.saturated_after : bp.free_after).push_back(i);
    }
    out->breakpoints.push_back(std::move(bp));
  }

  // Appends column a_i to the factorization (Gram-Schmidt, two passes).
  void AppendFree(int i) {
    const int f = num_free();
    if (f >= d_) {
      throw DegenerateInstanceError("free set would exceed d columns: " +
                                    FormatPartition(free_));
    }
    Vector v = a_.col(i);
    const double col_norm = v.norm();
    Vector coeff = Vector::Zero(f);
    for (int pass = 0; pass < 2 && f > 0; ++pass) {
      const Vector proj = q_.leftCols(f).transpose() * v;
      v.noalias() -= q_.leftCols(f) * proj;
      coeff += proj;
    }
    const double norm = v.norm();
    if (!(norm > kRankTolerance * col_norm)) {
      std::vector<int> with = free_;
      with.push_back(i);
      throw DegenerateInstanceError(
          "free columns are rank deficient for partition " +
          FormatPartition(with));
    }
    q_.col(f) = v / norm;
    r_.col(f).head(f) = coeff;
    r_(f, f) = norm;
    if (f + 1 < d_) r_.col(f).tail(d_ - f - 1).setZero();
    free_.push_back(i);
  }

  // Drops the column at position p, restoring triangular R with Givens
  // rotations.
  void RemoveFree(int p) {
    const int f = num_free();
    for (int j = p; j + 1 < f; ++j) r_.col(j).head(f) = r_.col(j + 1).head(f);
    for (int j = p; j + 1 < f; ++j) {
      Eigen::JacobiRotation<double> rot;
      rot.makeGivens(r_(j, j), r_(j + 1, j));
      r_.block(j, j, 2, f - 1 - j).applyOnTheLeft(0, 1, rot.adjoint());
      r_(j + 1, j) = 0.0;
      q_.leftCols(f).applyOnTheRight(j, j + 1, rot);
    }
    free_.erase(free_.begin() + p);
    r_.col(f - 1).setZero();
    r_.row(f - 1).setZero();
  }

  const RowMatrix& a_;
  const Vector y_;
  const int d_;
  const int m_;
  const bool record_;
  std::vector<int> sign_;  // +-1 saturated, 0 free
  std::vector<int> free_;
  Eigen::MatrixXd q_;
  Eigen::MatrixXd r_;
};

void CheckInputs(const ProjectionMatrix& a, const VectorRef& y,
                 double h_target) {
  if (y.size() != a.dim()) {
    throw InvalidArgument("input has length " + std::to_string(y.size()) +
                          ", projection expects " + std::to_string(a.dim()));
  }
  if (!y.allFinite()) throw InvalidArgument("input has non-finite entries");
  if (!(h_target > 0.0) || !std::isfinite(h_target)) {
    throw InvalidArgument("penalty must be positive and finite");
  }
}

}  // namespace

const char* PathEventName(PathEvent event) {
  switch (event) {
    case PathEvent::kPathStart:
      return "path_start";
    case PathEvent::kSubgradientVanished:
      return "subgradient_vanished";
    case PathEvent::kComponentSaturated:
      return "component_saturated";
  }
  return "unknown";
}

SpreadRepresentation Solve(const ProjectionMatrix& a, const VectorRef& y,
                           double h_target, SolveOptions options) {
  CheckInputs(a, y, h_target);
  return PathFollower(a, y, options.record_trace).Run(h_target);
}

std::vector<PathBreakpoint> SolvePath(const ProjectionMatrix& a,
                                      const VectorRef& y, double h_target) {
  return Solve(a, y, h_target).breakpoints;
}

double Objective(const ProjectionMatrix& a, const VectorRef& y, double h,
                 const VectorRef& x) {
  const Vector residual = a.entries() * x - y;
  const double linf = x.size() ? x.cwiseAbs().maxCoeff() : 0.0;
  return 0.5 * residual.squaredNorm() + h * linf;
}

OptimalityReport CheckOptimality(const ProjectionMatrix& a, const VectorRef& y,
                                 double h, const VectorRef& x, double tol) {
  OptimalityReport report;
  report.objective = Objective(a, y, h, x);
  report.subgradient = -(a.entries().transpose() * (a.entries() * x - y)) / h;
  const Vector& v = report.subgradient;
  report.subgradient_l1 = v.lpNorm<1>();
  const double linf = x.cwiseAbs().maxCoeff();

  double worst = 0.0;
  if (linf == 0.0) {
    worst = std::max(0.0, report.subgradient_l1 - 1.0);
  } else {
    worst = std::abs(report.subgradient_l1 - 1.0);
    const double vmax = v.cwiseAbs().maxCoeff();
    const double cut = linf * (1.0 - kSaturationTolerance);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (std::abs(x(i)) < cut) {
        worst = std::max(worst, std::abs(v(i)));
      } else {
        // Sign agreement, scaled so that it compares with tol.
        const double product = v(i) * x(i);
        if (product < 0.0 && vmax > 0.0) {
          worst = std::max(worst, -product / (vmax * linf));
        }
      }
    }
  }
  report.worst_violation = worst;
  report.pass = worst <= tol;
  return report;
}

Vector Reconstruct(const ProjectionMatrix& a, const VectorRef& x) {
  if (x.size() != a.code_length()) {
    throw InvalidArgument("code vector has length " + std::to_string(x.size()) +
                          ", projection expects " +
                          std::to_string(a.code_length()));
  }
  return a.entries() * x;
}

}  // namespace asann
