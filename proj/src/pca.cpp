#include "uda/pca.hpp"

#include <fstream>

#include "uda/report.hpp"

namespace uda {

std::vector<ProjectedPoint> pca_project(const std::vector<FeatureSample>& samples) {
  if (samples.size() < 3) throw UsageError("pca_project: need at least 3 samples");
  Matrix x = to_matrix(samples);
  if (x.cols() < 2) throw UsageError("pca_project: need dim >= 2");

  const RowVector mean = x.colwise().mean();
  x.rowwise() -= mean;
  const Matrix cov = (x.transpose() * x) / static_cast<double>(x.rows());

  Eigen::SelfAdjointEigenSolver<Matrix> solver(cov);
  if (solver.info() != Eigen::Success) throw Error("pca_project: eigendecomposition failed");
  const Index d = cov.rows();
  if (solver.eigenvalues()(d - 1) <= 0.0) {
    throw DegenerateProjectionError("pca_project: data has rank 0");
  }

  // Eigen returns ascending eigenvalues; take the last two, descending.
  Matrix axes(d, 2);
  axes.col(0) = solver.eigenvectors().col(d - 1);
  axes.col(1) = solver.eigenvectors().col(d - 2);
  for (int a = 0; a < 2; ++a) {
    Index top = 0;
    axes.col(a).cwiseAbs().maxCoeff(&top);
    if (axes(top, a) < 0.0) axes.col(a) = -axes.col(a);
  }

  const Matrix proj = x * axes;
  std::vector<ProjectedPoint> out(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Index r = static_cast<Index>(i);
    out[i] = ProjectedPoint{samples[i].id,   samples[i].domain, samples[i].label,
                            samples[i].synthetic, proj(r, 0),   proj(r, 1)};
  }
  return out;
}

void write_projection_csv(const std::filesystem::path& path,
                          const std::vector<ProjectedPoint>& points) {
  std::ofstream out(path);
  if (!out) throw Error("write_projection_csv: cannot open " + path.string());
  out << "id,domain,label,synthetic,pc1,pc2\n";
  for (const ProjectedPoint& p : points) {
    out << p.id << ',' << domain_tag(p.domain) << ',';
    if (p.label == kUnlabelled) {
      out << '-';
    } else {
      out << p.label;
    }
    out << ',' << (p.synthetic ? 1 : 0) << ',' << format_double(p.pc1) << ','
        << format_double(p.pc2) << '\n';
  }
}

}  // namespace uda
