#include "glmb/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "glmb/random.hpp"

namespace glmb {

const Gaussian* GlmbComponent::find(const Label& l) const {
  const auto it = std::lower_bound(labels.begin(), labels.end(), l);
  if (it == labels.end() || *it != l) return nullptr;
  return &tracks[static_cast<std::size_t>(it - labels.begin())];
}

double log_sum_exp(const std::vector<double>& v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double acc = 0.0;
  for (double x : v) acc += std::exp(x - m);
  return m + std::log(acc);
}

void normalize(GlmbDensity& d) {
  if (d.components.empty()) throw invalid_state("cannot normalize an empty density");
  std::vector<double> lw;
  lw.reserve(d.components.size());
  for (const auto& c : d.components) lw.push_back(c.log_weight);
  const double total = log_sum_exp(lw);
  if (!std::isfinite(total)) throw numeric_failure("density has no finite weight");
  for (auto& c : d.components) c.log_weight -= total;
}

void check_component_structure(const GlmbDensity& d) {
  for (const auto& c : d.components) {
    if (c.labels.size() != c.tracks.size())
      throw invalid_state("component labels and tracks are misaligned");
    if (!std::is_sorted(c.labels.begin(), c.labels.end()))
      throw invalid_state("component labels are not sorted");
    if (std::adjacent_find(c.labels.begin(), c.labels.end()) != c.labels.end())
      throw invalid_state("component has duplicate labels");
  }
}

std::uint64_t chain_lineage(std::uint64_t parent,
                            const std::vector<Assignment>& assignments) {
  std::vector<const Assignment*> order;
  order.reserve(assignments.size());
  for (const auto& e : assignments) order.push_back(&e);
  std::sort(order.begin(), order.end(),
            [](const Assignment* a, const Assignment* b) { return a->label < b->label; });

  std::uint64_t h = mix64(parent ^ 0x676c6d62ULL);
  for (const Assignment* e : order) {
    h = mix64(h ^ ((static_cast<std::uint64_t>(
                        static_cast<std::uint32_t>(e->label.birth_time))
                    << 32) |
                   static_cast<std::uint32_t>(e->label.birth_index)));
    for (std::size_t s = 0; s < e->measurements.size(); ++s)
      h = mix64(h ^ (static_cast<std::uint64_t>(s) << 32) ^
                static_cast<std::uint64_t>(e->measurements[s] + 1));
  }
  return h;
}

}  // namespace glmb
