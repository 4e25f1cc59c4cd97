#include "osa/io.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "osa/error.hpp"
#include "osa/version.hpp"

namespace osa {

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x == 0.0 ? 0.0 : x);
  return std::string(buf, res.ptr);
}

void write_value_csv(std::ostream &os, const ValueFunction &V) {
  os << "belief,delay,value,action\n";
  const auto points = V.grid().points();
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (int l = 1; l <= V.l_max(); ++l) {
      os << format_double(points[i]) << ',' << l << ',' << format_double(V.value(i, l)) << ','
         << static_cast<int>(V.action(i, l)) << '\n';
    }
  }
}

void write_value_sidecar(std::ostream &os, const ValueFunction &V) {
  os << "[solution]\n"
     << "gain=" << format_double(V.gain()) << '\n'
     << "iterations=" << V.iterations << '\n'
     << "final_span=" << format_double(V.final_span) << '\n'
     << "l_max=" << V.l_max() << '\n'
     << "grid_points=" << V.grid().size() << '\n'
     << "convention="
     << (V.convention() == PenaltyConvention::QFunction ? "qfunction" : "reward_table") << '\n'
     << "[channel]\n"
     << "alpha=" << format_double(V.channel().alpha) << '\n'
     << "beta=" << format_double(V.channel().beta) << '\n'
     << "pi0=" << format_double(V.pi0()) << '\n'
     << "[rewards]\n"
     << "phi=" << format_double(V.rewards().phi) << '\n'
     << "cs=" << format_double(V.rewards().c_s) << '\n'
     << "pp=" << format_double(V.rewards().p_p) << '\n'
     << "p3g=" << format_double(V.rewards().p_3g) << '\n'
     << "gamma=" << format_double(V.rewards().gamma) << '\n';
}

void write_policy_csv(std::ostream &os, const ThresholdPolicy &p) {
  os << "delay,lambda_star,action_above_threshold\n";
  for (int l = 1; l <= p.l_max(); ++l) {
    const Action above = (l < p.l_star() && l < p.l_max()) ? Action::SenseWait
                                                           : Action::SenseFallback;
    os << l << ',' << format_double(p.lambda_star(l)) << ',' << static_cast<int>(above) << '\n';
  }
}

namespace {

std::vector<std::string> split(const std::string &line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    out.push_back(cell);
  }
  return out;
}

double parse_double(const std::string &s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw Error(ErrorKind::InvalidArgument, "not a number: '" + s + "'");
  }
  return v;
}

int parse_int(const std::string &s) {
  int v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw Error(ErrorKind::InvalidArgument, "not an integer: '" + s + "'");
  }
  return v;
}

} // namespace

ThresholdPolicy read_policy_csv(std::istream &is) {
  std::string line;
  if (!std::getline(is, line) || line != "delay,lambda_star,action_above_threshold") {
    throw Error(ErrorKind::InvalidArgument, "policy CSV header mismatch");
  }
  std::vector<double> thr;
  int l_star = 0;
  while (std::getline(is, line)) {
    if (line.empty()) {
      continue;
    }
    const auto cells = split(line);
    if (cells.size() != 3) {
      throw Error(ErrorKind::InvalidArgument, "policy CSV row needs 3 fields: " + line);
    }
    const int l = parse_int(cells[0]);
    if (l != static_cast<int>(thr.size()) + 1) {
      throw Error(ErrorKind::InvalidArgument, "policy CSV delays must be 1, 2, ...");
    }
    thr.push_back(parse_double(cells[1]));
    const int a = parse_int(cells[2]);
    if (a != static_cast<int>(Action::SenseWait) && a != static_cast<int>(Action::SenseFallback)) {
      throw Error(ErrorKind::InvalidArgument, "action_above_threshold must be 1 or 2");
    }
    if (l_star == 0 && a == static_cast<int>(Action::SenseFallback)) {
      l_star = l;
    }
  }
  if (thr.empty()) {
    throw Error(ErrorKind::InvalidArgument, "policy CSV has no rows");
  }
  const int l_max = static_cast<int>(thr.size());
  return ThresholdPolicy(std::move(thr), l_star == 0 ? l_max : l_star, l_max);
}

void write_metrics_header(std::ostream &os) {
  os << "gamma,avg_delay,energy_per_packet,energy_per_slot,throughput,avg_reward,senses,"
        "primary_tx,dedicated_tx\n";
}

void write_metrics_row(std::ostream &os, double gamma, const SimMetrics &m) {
  os << format_double(gamma) << ',' << format_double(m.avg_delay) << ','
     << format_double(m.energy_per_packet) << ',' << format_double(m.energy_per_slot) << ','
     << format_double(m.throughput) << ',' << format_double(m.avg_reward) << ',' << m.senses
     << ',' << m.primary_tx << ',' << m.dedicated_tx << '\n';
}

TraceSink csv_trace_sink(std::ostream &os) {
  os << "t,belief_sensed_channel,delay,action,observation,reward\n";
  return [&os](const TraceRow &r) {
    os << r.t << ',' << format_double(r.belief_sensed_channel) << ',' << r.delay << ','
       << static_cast<int>(r.action) << ','
       << (r.observation ? std::to_string(static_cast<int>(*r.observation)) : std::string())
       << ',' << format_double(r.reward) << '\n';
  };
}

void write_compare_csv(std::ostream &os, const std::vector<CompareRow> &rows) {
  os << "k,mp_delay,opt_delay,gamma,delay_matched,energy_per_packet_mp,"
        "energy_per_packet_opt,reduction_pct\n";
  for (const auto &r : rows) {
    os << r.k << ',' << format_double(r.matched_delay) << ',' << format_double(r.achieved_delay)
       << ',' << format_double(r.gamma) << ',' << (r.delay_matched ? 1 : 0) << ','
       << format_double(r.cost_mp) << ',' << format_double(r.cost_opt) << ','
       << format_double(r.reduction_pct) << '\n';
  }
}

void write_learn_trace_csv(std::ostream &os, const std::vector<LearnTraceRow> &rows) {
  os << "iteration,alpha_hat,beta_hat,policy_id,window_reward,q_value\n";
  for (const auto &r : rows) {
    os << r.iteration << ',' << format_double(r.alpha_hat) << ',' << format_double(r.beta_hat)
       << ',' << r.policy_id << ',' << format_double(r.window_reward) << ','
       << format_double(r.q_value) << '\n';
  }
}

namespace pt = boost::property_tree;

void write_manifest(std::ostream &os, const Manifest &m) {
  pt::ptree t;
  t.put("run.command", m.command);
  t.put("run.version", kVersion);
  for (const auto &[k, v] : m.params) {
    t.put("params." + k, v);
  }
  for (std::size_t i = 0; i < m.outputs.size(); ++i) {
    t.put("outputs.file" + std::to_string(i), m.outputs[i]);
  }
  pt::write_ini(os, t);
}

Manifest read_manifest(std::istream &is) {
  pt::ptree t;
  try {
    pt::read_ini(is, t);
  } catch (const pt::ptree_error &e) {
    throw Error(ErrorKind::InvalidArgument, std::string("bad manifest: ") + e.what());
  }
  Manifest m;
  m.command = t.get<std::string>("run.command", "");
  if (auto p = t.get_child_optional("params")) {
    for (const auto &[k, v] : *p) {
      m.params[k] = v.data();
    }
  }
  if (auto o = t.get_child_optional("outputs")) {
    for (const auto &[k, v] : *o) {
      m.outputs.push_back(v.data());
    }
  }
  return m;
}

} // namespace osa
