#pragma once

#include <filesystem>
#include <vector>

#include "uda/types.hpp"

namespace uda {

// The sample cloud carries no direction: all points coincide.
class DegenerateProjectionError : public Error {
 public:
  using Error::Error;
};

struct ProjectedPoint {
  long id = 0;
  Domain domain = Domain::source;
  int label = kUnlabelled;
  bool synthetic = false;
  double pc1 = 0.0;
  double pc2 = 0.0;
};

// Mean-centers the samples and projects them onto the top-2 principal axes
// (descending eigenvalue; each axis's largest-magnitude loading made
// positive). Needs at least 3 samples of dim >= 2.
std::vector<ProjectedPoint> pca_project(const std::vector<FeatureSample>& samples);

// Columns: id,domain,label,synthetic,pc1,pc2.
void write_projection_csv(const std::filesystem::path& path,
                          const std::vector<ProjectedPoint>& points);

}  // namespace uda
