#include "unitrack/excitation.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "unitrack/controller.hpp"

namespace unitrack {

namespace {

void check_quadrature(double window, int n) {
  if (!(window > 0.0)) throw std::invalid_argument("window length must be positive");
  if (n < 3 || n % 2 == 0) throw std::invalid_argument("Simpson node count must be odd and >= 3");
}

Eigen::MatrixXd simpson(const MatrixFunction& g, double t, double window, int n) {
  check_quadrature(window, n);
  const double h = window / (n - 1);
  Eigen::MatrixXd acc = g(t) + g(t + window);
  for (int i = 1; i < n - 1; ++i) {
    acc += (i % 2 == 1 ? 4.0 : 2.0) * g(t + i * h);
  }
  acc *= h / 3.0;
  return 0.5 * (acc + acc.transpose());
}

PEReport scan(const MatrixFunction& g, double horizon, double window, int windows, int n) {
  check_quadrature(window, n);
  if (horizon < window) throw std::invalid_argument("horizon must be at least one window");
  if (windows < 1) throw std::invalid_argument("at least one window start is required");
  PEReport report;
  report.window_T = window;
  report.horizon = horizon;
  report.grid_points_per_window = n;
  report.windows = windows;
  double worst = std::numeric_limits<double>::infinity();
  const double span = horizon - window;
  for (int k = 0; k < windows; ++k) {
    const double start = windows == 1 ? 0.0 : span * k / (windows - 1);
    const Eigen::MatrixXd gram = simpson(g, start, window, n);
    double lambda = min_eigenvalue(gram);
    // eigenvalues at roundoff level are rank deficiency, not excitation
    if (lambda <= 1e-12 * std::max(1.0, gram.norm())) lambda = std::min(lambda, 0.0);
    if (lambda < worst) {
      worst = lambda;
      report.worst_window_start = start;
    }
  }
  report.epsilon = std::max(0.0, worst);
  return report;
}

}  // namespace

double min_eigenvalue(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

Eigen::MatrixXd window_integral(const MatrixFunction& a, double t, double window, int n) {
  return simpson(a, t, window, n);
}

Eigen::MatrixXd window_gram(const MatrixFunction& f, double t, double window, int n) {
  return simpson(
      [&f](double tau) -> Eigen::MatrixXd {
        const Eigen::MatrixXd v = f(tau);
        return v.transpose() * v;
      },
      t, window, n);
}

PEReport pe_epsilon(const MatrixFunction& f, double horizon, double window, int windows, int n) {
  return scan(
      [&f](double tau) -> Eigen::MatrixXd {
        const Eigen::MatrixXd v = f(tau);
        return v.transpose() * v;
      },
      horizon, window, windows, n);
}

PEReport pe_epsilon_integral(const MatrixFunction& a, double horizon, double window, int windows, int n) {
  return scan(a, horizon, window, windows, n);
}

Eigen::Matrix3d ellipse_pe_closed_form(double a, double b, double h) {
  if (h == 0.0) throw std::invalid_argument("ellipse_pe_closed_form: h must be nonzero");
  const double k = std::numbers::pi / h;
  return Eigen::Vector3d(8.0 * k, (b * b + 1.0) * k, (a * a + 1.0) * k).asDiagonal();
}

MatrixFunction controller_regressor(const PoseFunction& pose) {
  return [pose](double t) -> Eigen::MatrixXd { return regressor(pose(t)); };
}

MatrixFunction controller_regressor(const DesiredTrajectory& traj) {
  return [traj](double t) -> Eigen::MatrixXd { return regressor(traj.pose_at(t)); };
}

}  // namespace unitrack
