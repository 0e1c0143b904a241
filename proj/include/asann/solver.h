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

#ifndef ASANN_SOLVER_H_
#define ASANN_SOLVER_H_

#include <string>
#include <vector>

#include "asann/error.h"
#include "asann/frames.h"
#include "asann/linalg.h"

namespace asann {

// Anti-sparse (spread) coding.
//
// Minimizes J_h(x) = |Ax - y|^2 / 2 + h |x|_inf by following the
// piecewise-affine solution path from h = |A^T y|_1 (where x = 0) down to a
// target h. On each piece the coordinates split into a saturated set, where
// x_i = sign_i * |x|_inf, and a free set, where x_i is an affine function of
// |x|_inf obtained from a least-squares solve on the free columns. A piece
// ends when a saturated coordinate's subgradient weight reaches zero (it is
// released) or a free coordinate reaches +-|x|_inf (it saturates).

enum class PathEvent {
  kPathStart,            // h = |A^T y|_1, every index saturated
  kSubgradientVanished,  // index leaves the saturated set
  kComponentSaturated,   // index joins the saturated set
};

const char* PathEventName(PathEvent event);

struct PathBreakpoint {
  double h = 0.0;      // penalty at which the partition changes
  PathEvent event = PathEvent::kPathStart;
  int index = -1;      // moved coordinate, -1 for kPathStart
  int sign = 0;        // sign taken by a newly saturated coordinate
  double linf = 0.0;   // |x|_inf at the break
  std::vector<int> saturated_after;
  std::vector<int> free_after;
};

struct SpreadRepresentation {
  Vector x;
  double linf = 0.0;
  double h_target = 0.0;
  double h_start = 0.0;  // |A^T y|_1
  std::vector<int> saturated;  // |x_i| >= linf * (1 - 1e-9); empty if x = 0
  std::vector<int> free;
  std::vector<PathBreakpoint> breakpoints;
};

// Thrown when the free columns lose rank along the path.
class DegenerateInstanceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Thrown after 10*m partition changes without reaching the target.
class NonConvergenceError : public NumericalError {
 public:
  NonConvergenceError(const std::string& what,
                      std::vector<PathBreakpoint> trace)
      : NumericalError(what), trace_(std::move(trace)) {}
  const std::vector<PathBreakpoint>& trace() const { return trace_; }

 private:
  std::vector<PathBreakpoint> trace_;
};

inline constexpr double kSaturationTolerance = 1e-9;
inline constexpr double kDefaultPenalty = 1.0;

struct SolveOptions {
  // Keep the breakpoint trace (with partition snapshots) in the result.
  bool record_trace = true;
};

SpreadRepresentation Solve(const ProjectionMatrix& a, const VectorRef& y,
                           double h_target, SolveOptions options = {});

// Breakpoint trace of Solve(a, y, h_target).
std::vector<PathBreakpoint> SolvePath(const ProjectionMatrix& a,
                                      const VectorRef& y, double h_target);

double Objective(const ProjectionMatrix& a, const VectorRef& y, double h,
                 const VectorRef& x);

struct OptimalityReport {
  bool pass = false;
  double objective = 0.0;
  double subgradient_l1 = 0.0;  // |v|_1 for v = -A^T (Ax - y) / h
  double worst_violation = 0.0;
  Vector subgradient;
};

// Checks that v = -A^T(Ax - y)/h lies in the subdifferential of |.|_inf at x.
OptimalityReport CheckOptimality(const ProjectionMatrix& a, const VectorRef& y,
                                 double h, const VectorRef& x, double tol);

// A x.
Vector Reconstruct(const ProjectionMatrix& a, const VectorRef& x);

}  // namespace asann

#endif  // ASANN_SOLVER_H_
