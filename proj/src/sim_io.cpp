#include <array>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

#include "unitrack/simulation.hpp"

namespace unitrack {

std::string format_double(double value) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

namespace {

constexpr std::size_t kColumns = 18;

double parse_double(std::string_view field, std::size_t line) {
  double v = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw std::runtime_error("malformed number '" + std::string(field) + "' on line " + std::to_string(line));
  }
  return v;
}

void write_fields(std::ostream& os, std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    if (!first) os << ',';
    os << format_double(v);
    first = false;
  }
  os << '\n';
}

}  // namespace

void write_csv(const SimLog& log, std::ostream& os) {
  os << kSimLogHeader << '\n';
  for (const auto& r : log.rows) {
    write_fields(os, {r.t, r.pose.theta(), r.pose.p().x(), r.pose.p().y(), r.desired.theta(), r.desired.p().x(),
                      r.desired.p().y(), r.left_error.theta(), r.left_error.p().x(), r.left_error.p().y(),
                      r.right_error.theta(), r.right_error.p().x(), r.right_error.p().y(), r.lyapunov, r.u.omega,
                      r.u.v, r.u_tilde.omega, r.u_tilde.v});
  }
}

SimLog read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kSimLogHeader) {
    throw std::runtime_error("missing or unexpected SimLog header");
  }
  SimLog log;
  std::size_t lineno = 1;
  std::array<double, kColumns> v{};
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::string_view rest(line);
    std::size_t col = 0;
    while (true) {
      const std::size_t comma = rest.find(',');
      if (col >= kColumns) throw std::runtime_error("too many columns on line " + std::to_string(lineno));
      v[col++] = parse_double(rest.substr(0, comma), lineno);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (col != kColumns) throw std::runtime_error("too few columns on line " + std::to_string(lineno));
    SimRow r;
    r.t = v[0];
    r.pose = Pose2d(v[1], v[2], v[3]);
    r.desired = Pose2d(v[4], v[5], v[6]);
    r.left_error = Pose2d(v[7], v[8], v[9]);
    r.right_error = Pose2d(v[10], v[11], v[12]);
    r.lyapunov = v[13];
    r.u = {v[14], v[15]};
    r.u_tilde = {v[16], v[17]};
    log.rows.push_back(r);
  }
  if (log.rows.size() >= 2) log.dt = log.rows[1].t - log.rows[0].t;
  return log;
}

void write_panels(const std::vector<ControllerRun>& runs, std::ostream& os, int decimate) {
  decimate = std::max(decimate, 1);
  os << "panel,series,t,quantity,value\n";
  auto emit = [&os](const char* panel, const std::string& series, double t, const char* quantity, double value) {
    os << panel << ',' << series << ',' << format_double(t) << ',' << quantity << ',' << format_double(value) << '\n';
  };
  if (!runs.empty()) {
    const auto& rows = runs.front().log.rows;
    for (std::size_t i = 0; i < rows.size(); i += decimate) {
      emit("a", "desired", rows[i].t, "x", rows[i].desired.p().x());
      emit("a", "desired", rows[i].t, "y", rows[i].desired.p().y());
    }
  }
  for (const auto& run : runs) {
    const std::string name = to_string(run.config.controller);
    const auto& rows = run.log.rows;
    for (std::size_t i = 0; i < rows.size(); i += decimate) {
      const SimRow& r = rows[i];
      emit("a", name, r.t, "x", r.pose.p().x());
      emit("a", name, r.t, "y", r.pose.p().y());
      if (run.config.controller == ControllerKind::spatial) emit("b", name, r.t, "lyapunov", r.lyapunov);
      emit("c", name, r.t, "heading_error", heading_error(r));
      emit("d", name, r.t, "position_error", position_error(r));
    }
  }
}

void write_summary(const std::vector<ControllerRun>& runs, std::ostream& os) {
  os << "controller,heading_settle,position_settle,final_heading_error,final_position_error\n";
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string("nan"); };
  for (const auto& run : runs) {
    os << to_string(run.config.controller) << ',' << opt(run.heading_settle) << ',' << opt(run.position_settle)
       << ',' << format_double(run.final_heading_error) << ',' << format_double(run.final_position_error) << '\n';
  }
}

}  // namespace unitrack
