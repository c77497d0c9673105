#include "uda/types.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>

namespace uda {

Matrix to_matrix(const std::vector<FeatureSample>& samples) {
  if (samples.empty()) throw UsageError("to_matrix: empty sample set");
  const Index d = samples.front().features.size();
  Matrix out(static_cast<Index>(samples.size()), d);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].features.size() != d) {
      throw ShapeError("to_matrix: inconsistent feature dims");
    }
    out.row(static_cast<Index>(i)) = samples[i].features.transpose();
  }
  return out;
}

std::vector<std::size_t> canonical_order(const std::vector<FeatureSample>& samples) {
  std::vector<std::size_t> idx(samples.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const FeatureSample& sa = samples[a];
    const FeatureSample& sb = samples[b];
    return std::tuple(sa.synthetic, static_cast<int>(sa.domain), sa.id) <
           std::tuple(sb.synthetic, static_cast<int>(sb.domain), sb.id);
  });
  return idx;
}

}  // namespace uda
