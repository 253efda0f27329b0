#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <random>
#include <string>
#include <vector>

namespace hn {

enum class Outcome { Nevanlinna, NotNevanlinna, Inconclusive, RP, NotRP };

inline const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::Nevanlinna: return "Nevanlinna";
    case Outcome::NotNevanlinna: return "NotNevanlinna";
    case Outcome::Inconclusive: return "Inconclusive";
    case Outcome::RP: return "RP";
    case Outcome::NotRP: return "NotRP";
  }
  return "Inconclusive";
}

struct Residual {
  std::string id;
  double value = 0.0;
  double tol = 0.0;
};

struct Verdict {
  Outcome outcome = Outcome::Inconclusive;
  std::vector<Residual> residuals;
  std::string notes;

  bool all_below() const {
    for (auto& r : residuals)
      if (!(r.value < r.tol)) return false;
    return true;
  }
  bool some_far_above() const {
    for (auto& r : residuals)
      if (r.value > 10.0 * r.tol) return true;
    return false;
  }
  // Outcome implied by the residual table alone.
  Outcome from_residuals() const {
    if (residuals.empty()) return Outcome::Inconclusive;
    if (all_below()) return Outcome::Nevanlinna;
    if (some_far_above()) return Outcome::NotNevanlinna;
    return Outcome::Inconclusive;
  }
  void note(const std::string& s) { notes += (notes.empty() ? "" : "; ") + s; }
};

inline void to_json(nlohmann::ordered_json& j, const Verdict& v) {
  j = nlohmann::ordered_json::object();
  j["outcome"] = to_string(v.outcome);
  auto rs = nlohmann::ordered_json::array();
  for (auto& r : v.residuals) rs.push_back({{"id", r.id}, {"value", r.value}, {"tol", r.tol}});
  j["residuals"] = rs;
  j["notes"] = v.notes;
}

// Seeded uniform doubles that do not depend on the standard library's distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : g_(seed) {}
  double uniform(double lo, double hi) { return lo + (hi - lo) * static_cast<double>(g_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 g_;
};

}  // namespace hn
