#pragma once

// Growth of cube masses mu(D(tau, y)): the universal upper bound and the lower-growth indicator.
// Both verdicts are heuristics over a finite ladder of radii.

#include <cmath>
#include <string>
#include <vector>

#include "hn/kernels.hpp"
#include "hn/measure.hpp"

namespace hn {

struct CubeSample {
  std::vector<double> tau;
  double y = 1.0;
};

// Right-hand side of the cube bound for a given constant M.
inline double cube_bound(double M, int n, const std::vector<double>& tau, double y) {
  double t2 = 0.0;
  for (double v : tau) t2 += v * v;
  return M / std::pow(2 * kPi, n) * std::pow(y, n - 1) / std::sqrt(static_cast<double>(n)) * (1.0 + t2 + n * y * y);
}

// Smallest M with mu(D(tau, y)) <= cube_bound(M, ...) over the samples.
inline double upper_bound_fit(const MeasureSpec& mu, const std::vector<CubeSample>& samples, const QuadConfig& q = {}) {
  double M = 0.0;
  for (auto& s : samples) {
    require(s.y > 0, ErrorCode::Invalid, "cube halfwidth must be positive");
    if (mu.empty()) continue;
    double m = cube_mass(mu, s.tau, s.y, q);
    M = std::max(M, m / cube_bound(1.0, mu.dim, s.tau, s.y));
  }
  return M;
}

enum class GrowthOutcome { Pass, Fail, Inconclusive };

inline const char* to_string(GrowthOutcome g) {
  switch (g) {
    case GrowthOutcome::Pass: return "Pass";
    case GrowthOutcome::Fail: return "Fail";
    case GrowthOutcome::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

struct GrowthReport {
  std::vector<double> radii;
  std::vector<double> masses;
  double upper_M_fit = 0.0;
  std::vector<double> lower_ratio;
  GrowthOutcome lower = GrowthOutcome::Inconclusive;
  std::string notes;

  // Columns R, mass, ratio, bound_rhs.
  std::string csv(int n) const {
    std::string out = "R,mass,ratio,bound_rhs\n";
    char buf[160];
    for (size_t k = 0; k < radii.size(); ++k) {
      double rhs = cube_bound(upper_M_fit, n, std::vector<double>(static_cast<size_t>(n), 0.0), radii[k]);
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", radii[k], masses[k], lower_ratio[k], rhs);
      out += buf;
    }
    return out;
  }
};

inline void check_geometric(const std::vector<double>& radii, size_t min_len) {
  require(radii.size() >= min_len, ErrorCode::Invalid, "need at least " + std::to_string(min_len) + " radii");
  for (size_t k = 0; k < radii.size(); ++k) {
    require(radii[k] > 0, ErrorCode::Invalid, "radii must be positive");
    if (k) require(std::abs(radii[k] / radii[k - 1] - 2.0) < 1e-12, ErrorCode::Invalid, "radii must double");
  }
}

// R^{1-n} mu(D(0, R)).
inline std::vector<double> conjecture_probe(const MeasureSpec& mu, const std::vector<double>& radii,
                                            const QuadConfig& q = {}) {
  require(mu.dim >= 2, ErrorCode::Invalid, "needs n >= 2");
  std::vector<double> out;
  for (double R : radii)
    out.push_back(cube_mass(mu, std::vector<double>(static_cast<size_t>(mu.dim), 0.0), R, q) / std::pow(R, mu.dim - 1));
  return out;
}

// Pass when the ratios stay above the floor, Fail when they fall monotonically by more than 10x.
inline GrowthReport lower_growth(const MeasureSpec& mu, const std::vector<double>& radii, const QuadConfig& q = {},
                                 double floor = 1e-8) {
  require(mu.dim == 2, ErrorCode::Invalid, "lower growth indicator is for n = 2");
  check_geometric(radii, 6);
  GrowthReport r;
  r.radii = radii;
  std::vector<CubeSample> samples;
  for (double R : radii) {
    r.masses.push_back(mu.empty() ? 0.0 : cube_mass(mu, {0.0, 0.0}, R, q));
    r.lower_ratio.push_back(r.masses.back() / R);
    samples.push_back({{0.0, 0.0}, R});
  }
  r.upper_M_fit = upper_bound_fit(mu, samples, q);
  bool monotone_down = true;
  for (size_t k = 1; k < r.lower_ratio.size(); ++k) monotone_down = monotone_down && r.lower_ratio[k] <= r.lower_ratio[k - 1];
  const double first = r.lower_ratio.front(), last = r.lower_ratio.back();
  if (monotone_down && (last == 0.0 ? first > 0.0 : first / last > 10.0)) {
    r.lower = GrowthOutcome::Fail;
    r.notes = "ratios decay monotonically by more than 10x";
  } else if (last >= floor) {
    r.lower = GrowthOutcome::Pass;
    r.notes = "ratios stay above the floor";
  } else {
    r.notes = "ratios below the floor without clean decay";
  }
  r.notes += " (finite-ladder heuristic)";
  return r;
}

// Smallest M with |q(z)| <= M (1 + sum |z_j|^2) / (sum y_j^2)^{1/2} over the points.
inline double representation_bound_fit(const HerglotzParams& p, const std::vector<UpperPoint>& zs,
                                       const QuadConfig& q = {}) {
  double M = 0.0;
  for (auto& z : zs) {
    double num = 1.0, y2 = 0.0;
    for (auto& zj : z) {
      num += std::norm(zj);
      y2 += zj.imag() * zj.imag();
    }
    M = std::max(M, std::abs(eval_representation(p, z, q)) * std::sqrt(y2) / num);
  }
  return M;
}

}  // namespace hn
