#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace coexplorer {

/// Every recorded state is the same point, so there is no direction to project on.
class DegenerateTrajectory : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TimedState {
  double time = 0.0;
  std::vector<double> values;
};

struct ProjectedPoint {
  double time = 0.0;
  double pc1 = 0.0;
  double pc2 = 0.0;
};

struct PcaProjection {
  std::vector<double> mean;
  std::vector<double> axis1, axis2;  // unit loadings; axis2 is all zero for 1-D data
  double variance1 = 0.0, variance2 = 0.0;
  std::vector<ProjectedPoint> points;
};

/// States from a session log: every record whose payload carries "values".
/// Lines that are not JSON objects are skipped.
std::vector<TimedState> read_logged_states(std::istream& log);

/// Centres the states and projects them on the two leading eigenvectors of
/// their covariance. Each axis is signed so its first nonzero loading is positive.
/// Throws std::invalid_argument for fewer than two states or ragged rows.
PcaProjection project_pca(const std::vector<TimedState>& states);

std::vector<ProjectedPoint> project_trajectory_pca(const std::string& log_path);

/// CSV with header t,pc1,pc2.
void write_projection_csv(std::ostream& out, const std::vector<ProjectedPoint>& points);

}  // namespace coexplorer
