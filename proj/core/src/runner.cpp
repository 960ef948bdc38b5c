#include "glmb/runner.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <utility>

#include <json.hpp>

#include "glmb/error.hpp"

namespace glmb {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw input_error("cannot open output file " + path, 0);
  return out;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_error("cannot open input file " + path, 0);
  return in;
}

/// Data rows start with a number; anything else (headers, comments, blank
/// lines) is skipped.
bool is_data_line(const std::string& line) {
  for (char c : line) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    return std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+';
  }
  return false;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

double parse_double(const std::string& s, long line_no) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw input_error("expected a number, got '" + s + "'", line_no);
  return v;
}

long parse_int(const std::string& s, long line_no) {
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0')
    throw input_error("expected an integer, got '" + s + "'", line_no);
  return v;
}

Label parse_label(const std::string& s, long line_no) {
  const std::size_t colon = s.find(':');
  if (colon == std::string::npos)
    throw input_error("expected a birth_step:index label, got '" + s + "'",
                      line_no);
  return Label{
      static_cast<std::int32_t>(parse_int(s.substr(0, colon), line_no)),
      static_cast<std::int32_t>(parse_int(s.substr(colon + 1), line_no))};
}

/// getline keeping files with \r\n endings readable.
bool next_line(std::ifstream& in, std::string& line, long& line_no) {
  if (!std::getline(in, line)) return false;
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

std::string state_header(int axes) {
  std::string h;
  for (int a = 1; a <= axes; ++a) h += ",x" + std::to_string(a);
  for (int a = 1; a <= axes; ++a) h += ",v" + std::to_string(a);
  return h;
}

/// Interleaved state (x1, v1, ...) to de-interleaved row (x1.., v1..).
void append_state(std::string& row, const Eigen::VectorXd& state, int axes) {
  for (int a = 0; a < axes; ++a) row += "," + fmt(state[2 * a]);
  for (int a = 0; a < axes; ++a) row += "," + fmt(state[2 * a + 1]);
}

Eigen::VectorXd positions_of(const Eigen::VectorXd& state, int axes) {
  Eigen::VectorXd p(axes);
  for (int a = 0; a < axes; ++a) p[a] = state[2 * a];
  return p;
}

}  // namespace

RunSummary run_tracker(const ScenarioConfig& cfg,
                       const std::vector<MultiScan>& scans,
                       const StepCallback& progress) {
  validate(cfg);
  if (scans.size() != static_cast<std::size_t>(cfg.duration))
    throw invalid_argument("scan count does not match the configured duration");

  GlmbDensity density;
  density.time = 0;
  density.components.emplace_back();  // the empty prior, weight 1

  RunSummary out;
  out.steps.reserve(scans.size());
  for (int k = 1; k <= cfg.duration; ++k) {
    StepResult step;
    density = joint_update(density, cfg.motion, cfg.birth, cfg.suite,
                           scans[static_cast<std::size_t>(k - 1)], cfg.filter,
                           &step.stats);
    step.estimate = estimate(density, cfg.filter);
    out.total_seconds += step.stats.seconds;
    if (progress) progress(k, step);
    out.steps.push_back(std::move(step));
  }
  return out;
}

std::vector<OspaResult> score_against_truth(
    const RunSummary& run, const std::vector<std::vector<TruthState>>& truth,
    int axes, const OspaParams& params) {
  if (truth.size() != run.steps.size())
    throw invalid_argument("truth length does not match the run");
  std::vector<OspaResult> out;
  out.reserve(run.steps.size());
  for (std::size_t k = 0; k < run.steps.size(); ++k) {
    std::vector<Eigen::VectorXd> est, tru;
    for (const auto& m : run.steps[k].estimate.means)
      est.push_back(positions_of(m, axes));
    for (const auto& t : truth[k]) tru.push_back(positions_of(t.state, axes));
    out.push_back(ospa(est, tru, params));
  }
  return out;
}

void write_scans(const std::string& path,
                 const std::vector<MultiScan>& scans) {
  auto out = open_output(path);
  out << "# step,sensor,measurement components\n";
  for (std::size_t k = 0; k < scans.size(); ++k)
    for (std::size_t s = 0; s < scans[k].by_sensor.size(); ++s)
      for (const auto& z : scans[k].by_sensor[s]) {
        out << (k + 1) << ',' << s;
        for (Eigen::Index i = 0; i < z.size(); ++i) out << ',' << fmt(z[i]);
        out << '\n';
      }
}

std::vector<MultiScan> read_scans(const std::string& path,
                                  const MultiSensorSuite& suite,
                                  int duration) {
  auto in = open_input(path);
  std::vector<MultiScan> scans(static_cast<std::size_t>(duration));
  for (auto& s : scans) s.by_sensor.resize(suite.sensors.size());

  std::string line;
  long line_no = 0;
  while (next_line(in, line, line_no)) {
    if (!is_data_line(line)) continue;
    const auto f = split_fields(line);
    if (f.size() < 2)
      throw input_error("scan row needs at least step and sensor", line_no);
    const long k = parse_int(f[0], line_no);
    const long s = parse_int(f[1], line_no);
    if (k < 1 || k > duration)
      throw input_error("step " + std::to_string(k) + " outside 1.." +
                            std::to_string(duration),
                        line_no);
    if (s < 0 || s >= suite.count())
      throw input_error("sensor " + std::to_string(s) + " outside 0.." +
                            std::to_string(suite.count() - 1),
                        line_no);
    const auto dim =
        static_cast<std::size_t>(suite.sensors[static_cast<std::size_t>(s)]
                                     .meas_dim());
    if (f.size() != 2 + dim)
      throw input_error("measurement has " + std::to_string(f.size() - 2) +
                            " components, sensor expects " +
                            std::to_string(dim),
                        line_no);
    Eigen::VectorXd z(static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < dim; ++i)
      z[static_cast<Eigen::Index>(i)] = parse_double(f[2 + i], line_no);
    scans[static_cast<std::size_t>(k - 1)]
        .by_sensor[static_cast<std::size_t>(s)]
        .push_back(std::move(z));
  }
  return scans;
}

void write_truth(const std::string& path,
                 const std::vector<std::vector<TruthState>>& truth,
                 int axes) {
  auto out = open_output(path);
  out << "step,label" << state_header(axes) << '\n';
  for (std::size_t k = 0; k < truth.size(); ++k)
    for (const auto& t : truth[k]) {
      std::string row = std::to_string(k + 1) + "," + to_string(t.label);
      append_state(row, t.state, axes);
      out << row << '\n';
    }
}

std::vector<std::vector<TruthState>> read_truth(const std::string& path,
                                                int axes, int duration) {
  auto in = open_input(path);
  std::vector<std::vector<TruthState>> truth(
      static_cast<std::size_t>(duration));
  std::string line;
  long line_no = 0;
  while (next_line(in, line, line_no)) {
    if (!is_data_line(line)) continue;
    const auto f = split_fields(line);
    const std::size_t want = 2 + 2 * static_cast<std::size_t>(axes);
    if (f.size() != want)
      throw input_error("truth row has " + std::to_string(f.size()) +
                            " fields, expected " + std::to_string(want),
                        line_no);
    const long k = parse_int(f[0], line_no);
    if (k < 1 || k > duration)
      throw input_error("step " + std::to_string(k) + " outside 1.." +
                            std::to_string(duration),
                        line_no);
    TruthState t;
    t.label = parse_label(f[1], line_no);
    t.state.resize(2 * axes);
    for (int a = 0; a < axes; ++a) {
      t.state[2 * a] = parse_double(f[2 + static_cast<std::size_t>(a)], line_no);
      t.state[2 * a + 1] =
          parse_double(f[2 + static_cast<std::size_t>(axes + a)], line_no);
    }
    truth[static_cast<std::size_t>(k - 1)].push_back(std::move(t));
  }
  return truth;
}

void write_estimates(const std::string& path, const RunSummary& run,
                     int axes) {
  auto out = open_output(path);
  out << "step,label" << state_header(axes) << '\n';
  for (const auto& step : run.steps) {
    const auto& e = step.estimate;
    for (std::size_t i = 0; i < e.labels.size(); ++i) {
      std::string row =
          std::to_string(e.time) + "," + to_string(e.labels[i]);
      append_state(row, e.means[i], axes);
      out << row << '\n';
    }
  }
}

void write_cardinality(const std::string& path, const RunSummary& run) {
  auto out = open_output(path);
  out << "step,estimate_count,map_probability\n";
  for (const auto& step : run.steps) {
    const auto& e = step.estimate;
    const std::size_t n = e.labels.size();
    const double prob =
        n < e.cardinality.size() ? e.cardinality[n] : 0.0;
    out << e.time << ',' << n << ',' << fmt(prob) << '\n';
  }
}

void write_ospa(const std::string& path,
                const std::vector<std::vector<TruthState>>& truth,
                const RunSummary& run,
                const std::vector<OspaResult>& scores) {
  if (truth.size() != run.steps.size() || scores.size() != run.steps.size())
    throw invalid_argument("truth, run and scores must have equal length");
  auto out = open_output(path);
  out << "step,truth_count,estimate_count,total,localization,cardinality\n";
  for (std::size_t k = 0; k < run.steps.size(); ++k) {
    const auto& e = run.steps[k].estimate;
    out << e.time << ',' << truth[k].size() << ',' << e.labels.size() << ','
        << fmt(scores[k].total) << ',' << fmt(scores[k].localization) << ','
        << fmt(scores[k].cardinality) << '\n';
  }
}

void write_summary(const std::string& path, const ScenarioConfig& cfg,
                   const RunSummary& run) {
  nlohmann::json s;
  s["steps"] = cfg.duration;
  s["sensors"] = cfg.suite.count();
  s["sampler_mode"] = to_string(cfg.filter.gibbs.mode);
  s["estimator"] = to_string(cfg.filter.estimator);
  s["sample_budget"] = cfg.filter.sample_budget;
  s["total_seconds"] = run.total_seconds;

  double max_step = 0.0, components = 0.0, uniques = 0.0;
  for (const auto& step : run.steps) {
    max_step = std::max(max_step, step.stats.seconds);
    components += step.stats.posterior_components;
    uniques += step.stats.unique_samples;
  }
  const double n = run.steps.empty() ? 1.0 : static_cast<double>(run.steps.size());
  s["mean_step_seconds"] = run.total_seconds / n;
  s["max_step_seconds"] = max_step;
  s["mean_posterior_components"] = components / n;
  s["mean_unique_samples"] = uniques / n;
  if (!run.steps.empty())
    s["final_estimate_count"] = run.steps.back().estimate.labels.size();

  auto out = open_output(path);
  out << s.dump(2) << '\n';
}

}  // namespace glmb
