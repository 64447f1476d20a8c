// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "unitrack/controller.hpp"
#include "unitrack/excitation.hpp"
#include "unitrack/linearization.hpp"
#include "unitrack/simulation.hpp"

using namespace unitrack;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

double gap(const Pose2d& a, const Pose2d& b) { return (a.matrix() - b.matrix()).norm(); }

SimConfig ellipse_run(ControllerKind kind, Eigen::Vector2d origin, double t_end, double dt = 1e-3) {
  SimConfig cfg;
  cfg.trajectory = EllipseSpec{3.0, 5.0, 2.0 * kPi / 5.0, origin};
  cfg.controller = kind;
  cfg.initial = InitialOffset{{3.0, -2.0}, kPi / 2.0};
  cfg.t_end = t_end;
  cfg.dt = dt;
  return cfg;
}

// First logged time from which both tracking errors stay below tol.
std::optional<double> settled(const SimLog& log, double tol) {
  return settle_time(log, [](const SimRow& r) { return std::max(position_error(r), heading_error(r)); }, tol);
}

Outcome synchrony() {
  const SimLog log = simulate(ellipse_run(ControllerKind::feedforward, {0, 0}, 10.0, 1e-4));
  double er = 0.0, el = 0.0;
  for (const auto& r : log.rows) {
    er = std::max(er, gap(r.right_error, log.rows.front().right_error));
    el = std::max(el, gap(r.left_error, log.rows.front().left_error));
  }
  return {er <= 1e-9 && el >= 0.1, fmt("max|E_R-E_R(0)| = %.3e (<= 1e-9), max|E_L-E_L(0)| = %.3f (>= 0.1)", er, el)};
}

Outcome controller_identity() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> angle(-kPi, kPi), pos(-5.0, 5.0);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const SpatialError2d e{Pose2d(angle(rng), pos(rng), pos(rng))};
    const Pose2d xd(angle(rng), pos(rng), pos(rng));
    const ControlPair2d m = correction_matrix_form(e, xd);
    const ControlPair2d c = correction_component_form(e, xd);
    worst = std::max({worst, std::abs(m.omega - c.omega), std::abs(m.v - c.v)});
  }
  return {worst <= 1e-12, fmt("max |matrix - component| over 1e4 samples = %.3e (<= 1e-12)", worst)};
}

Outcome lyapunov_descent() {
  const SimConfig cfg = ellipse_run(ControllerKind::spatial, {0, 0}, 40.0);
  const SimLog log = simulate(cfg);
  double worst_rise = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < log.rows.size(); ++k) {
    worst_rise = std::max(worst_rise, log.rows[k].lyapunov - log.rows[k - 1].lyapunov);
  }
  double worst_rel = 0.0;
  int checked = 0;
  const double dt = cfg.dt;
  for (std::size_t k = 2; k + 2 < log.rows.size(); ++k) {
    const auto& r = log.rows;
    const double fd =
        (-r[k + 2].lyapunov + 8.0 * r[k + 1].lyapunov - 8.0 * r[k - 1].lyapunov + r[k - 2].lyapunov) / (12.0 * dt);
    const double rate = lyapunov_rate(SpatialError2d{r[k].right_error}, r[k].desired, cfg.gains);
    if (std::abs(rate) <= 1e-6) continue;
    ++checked;
    worst_rel = std::max(worst_rel, std::abs(fd - rate) / std::abs(rate));
  }
  const bool pass = worst_rise <= 1e-8 && worst_rel <= 1e-4 && checked > 0;
  return {pass, fmt("max step increase of L = %.3e (<= 1e-8), max rel |dL/dt - (-|AC|^2)| = %.3e (<= 1e-4) on %d rows",
                    worst_rise, worst_rel, checked)};
}

Outcome pe_identity() {
  struct Triple {
    double a, b, h;
  };
  const Triple triples[] = {{3.0, 5.0, 2.0 * kPi / 5.0}, {1.0, 1.0, 2.0 * kPi}, {2.0, 0.5, 1.3}};
  double worst = 0.0;
  std::string diag;
  for (const auto& t : triples) {
    const MatrixFunction f = controller_regressor(phase_heading_ellipse(t.a, t.b, t.h));
    const Eigen::MatrixXd quad = window_gram(f, 0.0, 2.0 * kPi / t.h, 2001);
    const Eigen::Matrix3d closed = ellipse_pe_closed_form(t.a, t.b, t.h);
    worst = std::max(worst, (quad - closed).norm() / closed.norm());
    if (diag.empty()) diag = fmt("diag(%.9f, %.9f, %.9f)", quad(0, 0), quad(1, 1), quad(2, 2));
  }
  return {worst <= 1e-6, fmt("(3,5,2pi/5) quadrature %s, max rel residual over 3 triples = %.3e (<= 1e-6)",
                             diag.c_str(), worst)};
}

Outcome convergence() {
  const SimLog centered = simulate(ellipse_run(ControllerKind::spatial, {0, 0}, 40.0));
  const SimLog shifted = simulate(ellipse_run(ControllerKind::spatial, {3, 3}, 40.0));
  const auto tc = settled(centered, 1e-2);
  const auto ts = settled(shifted, 1e-2);
  const SimRow& at25 = centered.rows[25000];
  const bool pass = tc && *tc <= 25.0 && ts && *ts <= 40.0;
  return {pass, fmt("centered: settles at %s s (<= 25), errors at 25 s: position %.4f heading %.4f; "
                    "origin (3,3): settles at %s s (<= 40)",
                    tc ? fmt("%.3f", *tc).c_str() : "never", position_error(at25), heading_error(at25),
                    ts ? fmt("%.3f", *ts).c_str() : "never")};
}

Outcome local_exponential() {
  const SimLog log = simulate(ellipse_run(ControllerKind::spatial, {0, 0}, 40.0));
  double t_end = log.rows.back().t;
  for (const auto& r : log.rows) {
    if (r.lyapunov < 1e-6) {
      t_end = r.t;
      break;
    }
  }
  const double t_start = 0.4 * t_end;
  double n = 0, st = 0, sy = 0, stt = 0, sty = 0, syy = 0;
  for (const auto& r : log.rows) {
    if (r.t < t_start || r.t > t_end) continue;
    const double y = std::log(r.lyapunov);
    n += 1;
    st += r.t;
    sy += y;
    stt += r.t * r.t;
    sty += r.t * y;
    syy += y * y;
  }
  const double vt = n * stt - st * st, vy = n * syy - sy * sy;
  const double slope = (n * sty - st * sy) / vt;
  const double r2 = slope * slope * vt / vy;
  return {slope < 0.0 && r2 >= 0.95,
          fmt("log L fit on [%.1f, %.1f] s: slope %.4f 1/s (< 0), R^2 = %.4f (>= 0.95)", t_start, t_end, slope, r2)};
}

Outcome unstable_set() {
  SimConfig eq = ellipse_run(ControllerKind::spatial, {0, 0}, 10.0);
  eq.initial = SpatialError2d{Pose2d(kPi, 0.0, 0.0)};
  const SimLog stay = simulate(eq);
  double drift = 0.0;
  for (const auto& r : stay.rows) drift = std::max(drift, gap(r.right_error, stay.rows.front().right_error));

  SimConfig near = ellipse_run(ControllerKind::spatial, {0, 0}, 60.0);
  near.initial = SpatialError2d{Pose2d(kPi - 0.01, 0.0, 0.0)};
  const SimLog away = simulate(near);
  const SimRow& last = away.rows.back();
  const bool converged = position_error(last) < 1e-2 && heading_error(last) < 1e-2;
  return {drift <= 1e-9 && converged,
          fmt("from (pi,0): max |E_R-E_R(0)| over 10 s = %.3e (<= 1e-9); from (pi-0.01,0) at 60 s: "
              "position %.2e heading %.2e (< 1e-2), L = %.2e",
              drift, position_error(last), heading_error(last), last.lyapunov)};
}

Outcome linearization_structure() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> angle(-kPi, kPi), pos(-5.0, 5.0);
  double structure = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Pose2d xd(angle(rng), pos(rng), pos(rng));
    const Eigen::Matrix3d ad = xd.adjoint();
    const Eigen::Matrix3d m = ad * Eigen::Vector3d(1, 1, 0).asDiagonal() * ad.transpose();
    structure = std::max(structure, (error_gain_matrix(xd) - m).cwiseAbs().maxCoeff());
  }
  const DesiredTrajectory traj = ellipse_trajectory(3.0, 5.0, 2.0 * kPi / 5.0);
  const Eigen::Matrix3d s = Eigen::Vector3d(2, 1, 1).asDiagonal();
  double fd = 0.0;
  for (int i = 0; i < 10; ++i) {
    const Pose2d xd = traj.pose_at(0.5 * i);
    fd = std::max(fd, (fd_closed_loop_jacobian(xd) + actuation_gram(xd) * s).cwiseAbs().maxCoeff());
  }
  return {structure <= 1e-12 && fd <= 1e-4,
          fmt("max |P - Ad BB^T Ad^T| over 1000 poses = %.3e (<= 1e-12), max |J_fd + M S| at 10 times = %.3e (<= 1e-4)",
              structure, fd)};
}

Outcome basin() {
  SimConfig tmpl = ellipse_run(ControllerKind::spatial, {0, 0}, 60.0);
  const BasinSummary s = monte_carlo_basin(tmpl, 100, 0, 1e-6);
  double worst = 0.0;
  for (const auto& r : s.records) {
    if (!r.converged_at) worst = std::max(worst, r.final_lyapunov);
  }
  std::string detail = fmt("seed 0: %d/%d reach L < 1e-6 by 60 s, fraction %.2f (== 1.0)", s.converged, s.samples,
                           s.fraction);
  if (s.converged < s.samples) detail += fmt("; largest L at 60 s among misses = %.3e", worst);
  return {s.fraction == 1.0, detail};
}

Outcome origin_dependence() {
  auto sup_gap = [](const SimLog& a, const SimLog& b, auto metric) {
    double g = 0.0;
    for (std::size_t k = 0; k < a.rows.size(); ++k) g = std::max(g, metric(a.rows[k], b.rows[k]));
    return g;
  };
  auto error_gap = [](const SimRow& a, const SimRow& b) {
    return std::max(std::abs(position_error(a) - position_error(b)), std::abs(heading_error(a) - heading_error(b)));
  };
  const SimLog s0 = simulate(ellipse_run(ControllerKind::spatial, {0, 0}, 40.0));
  const SimLog s3 = simulate(ellipse_run(ControllerKind::spatial, {3, 3}, 40.0));
  const SimLog k0 = simulate(ellipse_run(ControllerKind::kanayama, {0, 0}, 40.0));
  const SimLog k3 = simulate(ellipse_run(ControllerKind::kanayama, {3, 3}, 40.0));
  const double spatial = sup_gap(s0, s3, error_gap);
  const double kanayama = std::max(sup_gap(k0, k3, error_gap), sup_gap(k0, k3, [](const SimRow& a, const SimRow& b) {
                                     return gap(a.left_error, b.left_error);
                                   }));
  return {spatial >= 1e-2 && kanayama <= 1e-9,
          fmt("spatial sup gap = %.3e (>= 1e-2), Kanayama sup gap = %.3e (<= 1e-9)", spatial, kanayama)};
}

Outcome excitation_probe() {
  const MatrixFunction projector = [](double t) -> Eigen::MatrixXd {
    const Eigen::Vector2d r(std::cos(t), std::sin(t));
    return r * r.transpose();
  };
  DecayOptions opts;
  opts.dt = 1e-3;
  const DecayReport rot = stability_probe(projector, Eigen::Vector2d(1.0, 0.0), 2.0 * kPi, 1.0, 40.0, opts);

  const MatrixFunction id = [](double) -> Eigen::MatrixXd { return Eigen::MatrixXd::Identity(2, 2); };
  opts.dt = 1e-4;
  const Eigen::VectorXd x0 = Eigen::Vector2d(0.6, 0.8);
  const DecayReport unit = stability_probe(id, x0, 1.0, 0.5, 5.0, opts);
  double worst = 0.0;
  for (std::size_t i = 0; i < unit.times.size(); ++i) {
    worst = std::max(worst, std::abs(unit.norms[i] - std::exp(-unit.times[i])));
  }
  return {rot.fit_r2 >= 0.99 && rot.fitted_rate > 0.0 && worst <= 1e-6,
          fmt("rotating projector: rate %.4f 1/s, R^2 = %.5f (>= 0.99); A = I: max |x - e^-t| = %.3e (<= 1e-6)",
              rot.fitted_rate, rot.fit_r2, worst)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"AC1 synchrony of the spatial error under feedforward", synchrony},
      {"AC2 matrix and component forms of the correction agree", controller_identity},
      {"AC3 Lyapunov descent and rate match", lyapunov_descent},
      {"AC4 closed-form excitation Gram of the ellipse", pe_identity},
      {"AC5 convergence on centered and (3,3) ellipses", convergence},
      {"AC6 local exponential decay of L", local_exponential},
      {"AC7 unstable equilibrium and escape from it", unstable_set},
      {"AC8 linearization structure", linearization_structure},
      {"AC9 Monte-Carlo basin", basin},
      {"AC10 origin dependence of spatial vs Kanayama errors", origin_dependence},
      {"AC11 stability probe under excitation", excitation_probe},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s  %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
