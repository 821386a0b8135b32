#include "coexplorer/pca.hpp"

#include <Eigen/Dense>
#include <fstream>
#include <limits>
#include <ostream>

#include <nlohmann/json.hpp>

namespace coexplorer {

namespace {

constexpr double kLoadingZero = 1e-12;

void fix_sign(Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > kLoadingZero) {
      if (v[i] < 0) v = -v;
      return;
    }
  }
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

std::vector<TimedState> read_logged_states(std::istream& log) {
  std::vector<TimedState> states;
  std::string line;
  while (std::getline(log, line)) {
    const auto rec = nlohmann::json::parse(line, nullptr, false);
    if (rec.is_discarded() || !rec.is_object()) continue;
    const auto payload = rec.find("payload");
    if (payload == rec.end() || !payload->is_object()) continue;
    const auto values = payload->find("values");
    if (values == payload->end() || !values->is_array()) continue;
    TimedState s;
    s.time = rec.value("time", 0.0);
    s.values = values->get<std::vector<double>>();
    states.push_back(std::move(s));
  }
  return states;
}

PcaProjection project_pca(const std::vector<TimedState>& states) {
  if (states.size() < 2) throw std::invalid_argument("PCA needs at least two states");
  const auto n = static_cast<Eigen::Index>(states.front().values.size());
  const auto m = static_cast<Eigen::Index>(states.size());
  if (n == 0) throw std::invalid_argument("PCA needs non-empty states");

  Eigen::MatrixXd x(m, n);
  for (Eigen::Index r = 0; r < m; ++r) {
    const auto& v = states[static_cast<std::size_t>(r)].values;
    if (static_cast<Eigen::Index>(v.size()) != n) throw std::invalid_argument("PCA states differ in length");
    x.row(r) = Eigen::Map<const Eigen::RowVectorXd>(v.data(), n);
  }
  const Eigen::RowVectorXd mean = x.colwise().mean();
  x.rowwise() -= mean;
  if (x.cwiseAbs().maxCoeff() == 0.0) throw DegenerateTrajectory("all trajectory states are identical");

  const Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(m - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw std::runtime_error("PCA eigen-decomposition failed");

  // Eigenvalues come in ascending order.
  Eigen::VectorXd a1 = eig.eigenvectors().col(n - 1);
  Eigen::VectorXd a2 = n > 1 ? Eigen::VectorXd(eig.eigenvectors().col(n - 2)) : Eigen::VectorXd::Zero(n);
  fix_sign(a1);
  fix_sign(a2);

  PcaProjection out;
  out.mean = to_std(mean.transpose());
  out.axis1 = to_std(a1);
  out.axis2 = to_std(a2);
  out.variance1 = eig.eigenvalues()[n - 1];
  out.variance2 = n > 1 ? eig.eigenvalues()[n - 2] : 0.0;
  const Eigen::VectorXd p1 = x * a1;
  const Eigen::VectorXd p2 = x * a2;
  out.points.reserve(states.size());
  for (Eigen::Index r = 0; r < m; ++r)
    out.points.push_back({states[static_cast<std::size_t>(r)].time, p1[r], p2[r]});
  return out;
}

std::vector<ProjectedPoint> project_trajectory_pca(const std::string& log_path) {
  std::ifstream in(log_path);
  if (!in) throw std::runtime_error("cannot open log " + log_path);
  return project_pca(read_logged_states(in)).points;
}

void write_projection_csv(std::ostream& out, const std::vector<ProjectedPoint>& points) {
  const auto old = out.precision(std::numeric_limits<double>::max_digits10);
  out << "t,pc1,pc2\n";
  for (const auto& p : points) out << p.time << ',' << p.pc1 << ',' << p.pc2 << '\n';
  out.precision(old);
}

}  // namespace coexplorer
