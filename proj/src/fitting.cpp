#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qmuse/sequencer.hpp"

// Fits the 6 Givens angles so the entrywise-squared gate approximates a
// bistochastic target. Levenberg-Marquardt on the 16 residuals
// r_ij = O_ij^2 - B_ij with an analytic Jacobian, restarted from theta = 0
// plus seeded random points; the run is fully deterministic for a given
// seed and restart count.

namespace qmuse::seq {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

using Vec6 = std::array<double, 6>;
using qc::Mat4;

Mat4 plane_derivative(int i, int j, double angle) {
  Mat4 d{};  // all zero, including the identity part
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  d[i][i] = -s;
  d[i][j] = -c;
  d[j][i] = c;
  d[j][j] = -s;
  return d;
}

struct Objective {
  Mat4 gate;
  std::array<double, 16> residuals;
  double cost;                         // sum of squared residuals
  std::array<std::array<double, 16>, 6> jacobian_t;  // [angle][residual]
};

Objective evaluate(const Vec6& angles, const Mat4& target) {
  std::array<Mat4, 6> factors;
  for (std::size_t k = 0; k < 6; ++k) {
    const auto [i, j] = qc::kGivensPlanes[k];
    factors[k] = qc::GivensRotation(i, j, angles[k]).matrix();
  }

  // prefix[k] = product of factors before k; suffix[k] = product after k.
  std::array<Mat4, 6> prefix;
  std::array<Mat4, 6> suffix;
  prefix[0] = qc::mat4_identity();
  for (std::size_t k = 1; k < 6; ++k) prefix[k] = qc::mat4_mul(prefix[k - 1], factors[k - 1]);
  suffix[5] = qc::mat4_identity();
  for (std::size_t k = 5; k > 0; --k) suffix[k - 1] = qc::mat4_mul(factors[k], suffix[k]);

  Objective obj;
  obj.gate = qc::mat4_mul(prefix[5], factors[5]);
  obj.cost = 0.0;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const double r = obj.gate[i][j] * obj.gate[i][j] - target[i][j];
      obj.residuals[static_cast<std::size_t>(4 * i + j)] = r;
      obj.cost += r * r;
    }
  }

  for (std::size_t k = 0; k < 6; ++k) {
    const auto [pi, pj] = qc::kGivensPlanes[k];
    const Mat4 d = qc::mat4_mul(prefix[k],
                                qc::mat4_mul(plane_derivative(pi, pj, angles[k]), suffix[k]));
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        obj.jacobian_t[k][static_cast<std::size_t>(4 * i + j)] =
            2.0 * obj.gate[i][j] * d[i][j];
      }
    }
  }
  return obj;
}

// Solve (A + lambda*diag(A)) x = b for 6x6 symmetric positive-ish A.
bool solve_damped(std::array<std::array<double, 6>, 6> a, Vec6 b, double lambda, Vec6& x) {
  for (std::size_t i = 0; i < 6; ++i) {
    a[i][i] += lambda * std::max(a[i][i], 1e-12);
  }
  for (std::size_t col = 0; col < 6; ++col) {
    std::size_t pivot = col;
    for (std::size_t row = col + 1; row < 6; ++row) {
      if (std::abs(a[row][col]) > std::abs(a[pivot][col])) pivot = row;
    }
    if (std::abs(a[pivot][col]) < 1e-14) return false;
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t row = col + 1; row < 6; ++row) {
      const double factor = a[row][col] / a[col][col];
      for (std::size_t j = col; j < 6; ++j) a[row][j] -= factor * a[col][j];
      b[row] -= factor * b[col];
    }
  }
  for (std::size_t i = 6; i-- > 0;) {
    double acc = b[i];
    for (std::size_t j = i + 1; j < 6; ++j) acc -= a[i][j] * x[j];
    x[i] = acc / a[i][i];
  }
  return true;
}

// One local descent; returns the refined angles and final cost.
std::pair<Vec6, double> descend(Vec6 angles, const Mat4& target) {
  Objective obj = evaluate(angles, target);
  double lambda = 1e-3;
  for (int iter = 0; iter < 400; ++iter) {
    // gradient of the cost = 2 * J^T r
    Vec6 gradient{};
    std::array<std::array<double, 6>, 6> normal{};  // J^T J
    for (std::size_t k = 0; k < 6; ++k) {
      for (std::size_t m = 0; m < 16; ++m) {
        gradient[k] += 2.0 * obj.jacobian_t[k][m] * obj.residuals[m];
      }
      for (std::size_t l = k; l < 6; ++l) {
        double dot = 0.0;
        for (std::size_t m = 0; m < 16; ++m) {
          dot += obj.jacobian_t[k][m] * obj.jacobian_t[l][m];
        }
        normal[k][l] = dot;
        normal[l][k] = dot;
      }
    }

    double grad_norm = 0.0;
    for (double g : gradient) grad_norm = std::max(grad_norm, std::abs(g));
    if (grad_norm < 1e-10 || obj.cost < 1e-28) break;

    Vec6 rhs;
    for (std::size_t k = 0; k < 6; ++k) rhs[k] = -0.5 * gradient[k];  // -J^T r

    bool improved = false;
    while (lambda < 1e14) {
      Vec6 step{};
      if (solve_damped(normal, rhs, lambda, step)) {
        Vec6 candidate = angles;
        for (std::size_t k = 0; k < 6; ++k) candidate[k] += step[k];
        const Objective next = evaluate(candidate, target);
        if (next.cost < obj.cost) {
          angles = candidate;
          obj = next;
          lambda = std::max(lambda / 3.0, 1e-12);
          improved = true;
          break;
        }
      }
      lambda *= 4.0;
    }
    if (!improved) break;
  }
  return {angles, obj.cost};
}

}  // namespace

FitResult fit_rotation_angles(const Mat4& B, const FitOptions& options) {
  for (int i = 0; i < 4; ++i) {
    double row = 0.0;
    double col = 0.0;
    for (int j = 0; j < 4; ++j) {
      if (B[i][j] < 0.0) {
        throw std::invalid_argument("target matrix entries must be non-negative");
      }
      row += B[i][j];
      col += B[j][i];
    }
    if (std::abs(row - 1.0) > 1e-6 || std::abs(col - 1.0) > 1e-6) {
      throw std::invalid_argument("target matrix is not doubly stochastic");
    }
  }
  if (options.restarts < 0) throw std::invalid_argument("restarts must be non-negative");

  Rng starts(options.seed == 0 ? 1 : options.seed);
  Vec6 best_angles{};
  double best_cost = evaluate(best_angles, B).cost;
  {
    const auto [angles, cost] = descend(Vec6{}, B);
    if (cost < best_cost || (cost == best_cost && angles < best_angles)) {
      best_angles = angles;
      best_cost = cost;
    }
  }
  for (int r = 0; r < options.restarts; ++r) {
    Vec6 start;
    for (double& a : start) a = starts.uniform01() * kTwoPi;
    const auto [angles, cost] = descend(start, B);
    if (cost < best_cost || (cost == best_cost && angles < best_angles)) {
      best_angles = angles;
      best_cost = cost;
    }
    if (best_cost < 1e-28) break;  // residual already at machine floor
  }

  return FitResult{best_angles, std::sqrt(best_cost)};
}

}  // namespace qmuse::seq
