#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "osa/error.hpp"
#include "osa/io.hpp"
#include "osa/learn.hpp"
#include "osa/mdp.hpp"
#include "osa/multichannel.hpp"
#include "osa/policy.hpp"
#include "osa/scenario.hpp"
#include "osa/sim.hpp"

namespace osa::cli {
namespace {

namespace fs = std::filesystem;

struct CommonOptions {
  std::optional<int> scenario;
  bool single = false;
  std::string config;
  std::optional<double> alpha, beta, phi, cs, pp, p3g, gamma;
  std::optional<int> n, lmax;
  double tol = 1e-9;
  int k_trunc = 20;
  int grid = 1000;
  bool reward_table = false;
  std::uint64_t packets = 3000;
  std::uint64_t seed = 1;
  std::string out = ".";
};

void add_common(CLI::App &app, CommonOptions &o) {
  app.add_option("--scenario", o.scenario, "Preset scenario (four channels)")
      ->check(CLI::Range(1, 3));
  app.add_flag("--scenario-single", o.single, "Single-channel sensing-cost scenario");
  app.add_option("--config", o.config, "Scenario file (key=value sections)")
      ->check(CLI::ExistingFile);
  app.add_option("--alpha", o.alpha, "P[idle -> idle]");
  app.add_option("--beta", o.beta, "P[busy -> idle]");
  app.add_option("--n", o.n, "Number of i.i.d. channels");
  app.add_option("--phi", o.phi, "Transmission gain");
  app.add_option("--cs", o.cs, "Sensing cost");
  app.add_option("--pp", o.pp, "Licensed-channel price");
  app.add_option("--p3g", o.p3g, "Dedicated-channel price");
  app.add_option("--gamma", o.gamma, "Delay-penalty coefficient");
  app.add_option("--lmax", o.lmax, "Maximum packet delay");
  app.add_option("--tol", o.tol, "Relative value iteration tolerance");
  app.add_option("--ktrunc", o.k_trunc, "Multichannel memory truncation");
  app.add_option("--grid", o.grid, "Belief grid intervals (single channel)");
  app.add_flag("--reward-table", o.reward_table,
               "Charge the delay penalty on transmission slots too");
  app.add_option("--packets", o.packets, "Packets per simulation");
  app.add_option("--seed", o.seed, "Top-level random seed");
  app.add_option("--out", o.out, "Output directory");
}

Scenario resolve_scenario(const CommonOptions &o, Scenario fallback) {
  Scenario s = fallback;
  if (o.scenario) {
    s = scenario_preset(*o.scenario);
  } else if (o.single) {
    s = single_channel_scenario();
  }
  if (!o.config.empty()) {
    std::ifstream in(o.config);
    s = read_scenario_ini(in, s);
  }
  if (o.alpha) s.channel.alpha = *o.alpha;
  if (o.beta) s.channel.beta = *o.beta;
  if (o.n) s.n_channels = *o.n;
  if (o.phi) s.rewards.phi = *o.phi;
  if (o.cs) s.rewards.c_s = *o.cs;
  if (o.pp) s.rewards.p_p = *o.pp;
  if (o.p3g) s.rewards.p_3g = *o.p3g;
  if (o.gamma) s.rewards.gamma = *o.gamma;
  if (o.lmax) s.l_max = *o.lmax;
  s.validate();
  return s;
}

PenaltyConvention convention(const CommonOptions &o) {
  return o.reward_table ? PenaltyConvention::RewardTable : PenaltyConvention::QFunction;
}

SolverKnobs knobs_for(const CommonOptions &o, const Scenario &s) {
  SolverKnobs k;
  k.single.tol = o.tol;
  k.single.grid_intervals = o.grid;
  k.single.l_max = s.l_max;
  k.single.convention = convention(o);
  k.multi.tol = o.tol;
  k.multi.k_trunc = o.k_trunc;
  k.multi.l_max = s.l_max;
  k.multi.convention = convention(o);
  return k;
}

SimConfig sim_config(const CommonOptions &o, const Scenario &s, bool cs_only = false) {
  SimConfig c;
  c.num_packets = o.packets;
  c.seed = o.seed;
  c.channels.assign(static_cast<std::size_t>(s.n_channels), s.channel);
  c.rewards = s.rewards;
  c.l_max = s.l_max;
  c.energy_includes_prices = !cs_only;
  c.convention = convention(o);
  return c;
}

/// Collects output files and the manifest for one command.
class Outputs {
public:
  Outputs(const std::string &dir, std::string command, const std::vector<std::string> &argv)
      : dir_(dir) {
    fs::create_directories(dir_);
    manifest_.command = std::move(command);
    std::string joined;
    for (std::size_t i = 1; i < argv.size(); ++i) {
      joined += (i > 1 ? " " : "") + argv[i];
    }
    manifest_.params["argv"] = joined;
  }

  std::ofstream open(const std::string &name) {
    manifest_.outputs.push_back(name);
    std::ofstream f(dir_ / name);
    if (!f) {
      throw Error(ErrorKind::InvalidArgument, "cannot write " + (dir_ / name).string());
    }
    return f;
  }

  void param(const std::string &k, const std::string &v) { manifest_.params[k] = v; }
  void param(const std::string &k, double v) { manifest_.params[k] = format_double(v); }

  void scenario(const Scenario &s, const CommonOptions &o) {
    param("scenario", s.name);
    param("n", std::to_string(s.n_channels));
    param("alpha", s.channel.alpha);
    param("beta", s.channel.beta);
    param("phi", s.rewards.phi);
    param("cs", s.rewards.c_s);
    param("pp", s.rewards.p_p);
    param("p3g", s.rewards.p_3g);
    param("gamma", s.rewards.gamma);
    param("lmax", std::to_string(s.l_max));
    param("tol", o.tol);
    param("seed", std::to_string(o.seed));
    param("packets", std::to_string(o.packets));
    param("convention", o.reward_table ? "reward_table" : "qfunction");
  }

  void finish() {
    std::ofstream f(dir_ / "manifest.ini");
    write_manifest(f, manifest_);
  }

private:
  fs::path dir_;
  Manifest manifest_;
};

ThresholdPolicy multichannel_threshold_policy(const MultiChannelSolution &sol, int l_max) {
  const auto th = extract_multichannel_thresholds(sol);
  return ThresholdPolicy(th.lambda_star, th.l_star, l_max);
}

int cmd_solve(const CommonOptions &o, const std::vector<std::string> &argv, std::ostream &out) {
  const Scenario s = resolve_scenario(o, single_channel_scenario());
  const SolverKnobs k = knobs_for(o, s);
  Outputs files(o.out, "solve", argv);
  files.scenario(s, o);

  if (s.n_channels == 1) {
    const ValueFunction V = solve_single_channel(s.channel, s.rewards, k.single);
    const ThresholdPolicy policy = extract_thresholds(V);
    const StructureReport report = check_structure(V);
    {
      auto f = files.open("value.csv");
      write_value_csv(f, V);
    }
    {
      auto f = files.open("value.ini");
      write_value_sidecar(f, V);
    }
    {
      auto f = files.open("policy.csv");
      write_policy_csv(f, policy);
    }
    {
      auto f = files.open("structure.txt");
      f << report.to_text();
    }
    out << "gain " << format_double(V.gain()) << "\n"
        << "iterations " << V.iterations << "\n"
        << "l_star " << policy.l_star() << (policy.cap_binding() ? " (cap)" : "") << "\n"
        << "structure " << (report.all_passed() ? "pass" : "fail") << "\n";
  } else {
    MultiChannelOptions mo = k.multi;
    mo.n_channels = s.n_channels;
    const MultiChannelSolution sol = solve_multichannel(s.channel, s.rewards, mo);
    const ThresholdPolicy policy = multichannel_threshold_policy(sol, s.l_max);
    {
      auto f = files.open("policy.csv");
      write_policy_csv(f, policy);
    }
    {
      auto f = files.open("solution.ini");
      f << "[solution]\n"
        << "gain=" << format_double(sol.gain()) << "\n"
        << "iterations=" << sol.iterations << "\n"
        << "states=" << sol.states().size() << "\n"
        << "k_trunc=" << mo.k_trunc << "\n"
        << "l_star=" << policy.l_star() << "\n";
    }
    out << "gain " << format_double(sol.gain()) << "\n"
        << "states " << sol.states().size() << "\n"
        << "iterations " << sol.iterations << "\n"
        << "l_star " << policy.l_star() << (policy.cap_binding() ? " (cap)" : "") << "\n";
  }
  files.finish();
  return kOk;
}

void print_metrics(std::ostream &out, const SimMetrics &m) {
  out << std::setprecision(6) << "avg_delay         " << m.avg_delay << "\n"
      << "energy_per_packet " << m.energy_per_packet << "\n"
      << "energy_per_slot   " << m.energy_per_slot << "\n"
      << "throughput        " << m.throughput << "\n"
      << "avg_reward        " << m.avg_reward << "\n"
      << "slots " << m.slots << "  senses " << m.senses << "  primary_tx " << m.primary_tx
      << "  dedicated_tx " << m.dedicated_tx << "  waits " << m.waits << "\n";
}

int cmd_simulate(const CommonOptions &o, const std::string &policy_file, int mp_k, bool trace,
                 bool cs_only, const std::vector<std::string> &argv, std::ostream &out) {
  const Scenario s = resolve_scenario(o, single_channel_scenario());
  const SimConfig cfg = sim_config(o, s, cs_only);
  Outputs files(o.out, "simulate", argv);
  files.scenario(s, o);

  std::shared_ptr<const Policy> policy;
  if (!policy_file.empty()) {
    std::ifstream in(policy_file);
    if (!in) {
      throw Error(ErrorKind::InvalidArgument, "cannot read policy file " + policy_file);
    }
    policy = std::make_shared<ThresholdPolicy>(read_policy_csv(in));
    files.param("policy", policy_file);
  } else if (mp_k > 0) {
    policy = std::make_shared<MemorylessPolicy>(mp_k);
    files.param("policy", "MP-" + std::to_string(mp_k));
  } else {
    policy = solve_optimal_policy(cfg, knobs_for(o, s));
    files.param("policy", "optimal");
  }

  SimMetrics m;
  if (trace) {
    auto f = files.open("trace.csv");
    m = run_episode(cfg, *policy, csv_trace_sink(f));
  } else {
    m = run_episode(cfg, *policy);
  }
  {
    auto f = files.open("metrics.csv");
    write_metrics_header(f);
    write_metrics_row(f, s.rewards.gamma, m);
  }
  files.finish();
  out << "policy " << policy->describe() << "\n";
  print_metrics(out, m);
  return kOk;
}

/// "1,5,10", "a..b" (ten evenly spaced points) or "a..b:n".
std::vector<double> parse_gamma_list(const std::string &text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) {
    std::vector<double> v;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      v.push_back(std::stod(cell));
    }
    return v;
  }
  const double lo = std::stod(text.substr(0, dots));
  std::string rest = text.substr(dots + 2);
  int count = 10;
  if (const auto colon = rest.find(':'); colon != std::string::npos) {
    count = std::stoi(rest.substr(colon + 1));
    rest = rest.substr(0, colon);
  }
  const double hi = std::stod(rest);
  if (count < 2 || !(hi > lo)) {
    throw Error(ErrorKind::InvalidArgument, "bad gamma range: " + text);
  }
  std::vector<double> v;
  for (int i = 0; i < count; ++i) {
    v.push_back(lo + (hi - lo) * i / (count - 1));
  }
  return v;
}

int cmd_sweep(const CommonOptions &o, const std::string &gammas, bool cs_only,
              const std::vector<std::string> &argv, std::ostream &out) {
  const Scenario s = resolve_scenario(o, single_channel_scenario());
  const auto list = parse_gamma_list(gammas);
  Outputs files(o.out, "sweep", argv);
  files.scenario(s, o);
  files.param("gammas", gammas);
  const auto rows = sweep_gamma(sim_config(o, s, cs_only), list, knobs_for(o, s));
  auto f = files.open("sweep.csv");
  write_metrics_header(f);
  write_metrics_header(out);
  for (const auto &r : rows) {
    write_metrics_row(f, r.gamma, r.metrics);
    write_metrics_row(out, r.gamma, r.metrics);
  }
  f.close();
  files.finish();
  return kOk;
}

int cmd_compare(const CommonOptions &o, const std::vector<int> &ks, double delay_tol,
                bool cs_only, const std::vector<std::string> &argv, std::ostream &out) {
  const Scenario s = resolve_scenario(o, single_channel_scenario());
  Outputs files(o.out, "compare", argv);
  files.scenario(s, o);
  files.param("delay_tol", delay_tol);
  const auto rows =
      compare_with_memoryless(sim_config(o, s, cs_only), ks, delay_tol, knobs_for(o, s));
  auto f = files.open("compare.csv");
  write_compare_csv(f, rows);
  write_compare_csv(out, rows);
  f.close();
  files.finish();
  return kOk;
}

struct LearnOptions {
  std::uint64_t iterations = 200;
  int m = 10;
  int nbslot = 100;
  double epsilon = 0.1;
  double eta = 0.5;
  bool conventional = false;
};

int cmd_learn(const CommonOptions &o, const LearnOptions &lo,
              const std::vector<std::string> &argv, std::ostream &out) {
  const Scenario s = resolve_scenario(o, scenario_preset(1));
  Outputs files(o.out, "learn", argv);
  files.scenario(s, o);
  files.param("iterations", std::to_string(lo.iterations));
  files.param("m", std::to_string(lo.m));
  files.param("nbslot", std::to_string(lo.nbslot));
  files.param("epsilon", lo.epsilon);
  files.param("eta", lo.eta);
  files.param("weighting", lo.conventional ? "conventional" : "as_printed");

  LearnerConfig cfg;
  cfg.m = lo.m;
  cfg.nbslot = lo.nbslot;
  cfg.epsilon = lo.epsilon;
  cfg.eta = lo.eta;
  cfg.weighting = lo.conventional ? QWeighting::Conventional : QWeighting::AsPrinted;
  cfg.l_max = s.l_max;
  cfg.candidates.max_switch_delay = s.l_max;
  cfg.convention = convention(o);
  const std::vector<ChannelParams> channels(static_cast<std::size_t>(s.n_channels), s.channel);
  const auto res = run_learning(cfg, channels, s.rewards, lo.iterations, o.seed);
  {
    auto f = files.open("learn_trace.csv");
    write_learn_trace_csv(f, res.trace);
  }
  {
    auto f = files.open("learned_policy.csv");
    write_policy_csv(f, res.learned);
  }
  files.finish();
  out << "alpha_hat " << format_double(res.final_estimates.alpha) << "\n"
      << "beta_hat " << format_double(res.final_estimates.beta) << "\n"
      << "policy " << res.learned.describe() << "\n";
  return kOk;
}

std::vector<std::string> split_words(const std::string &s) {
  std::vector<std::string> v;
  std::istringstream in(s);
  std::string w;
  while (in >> w) {
    v.push_back(w);
  }
  return v;
}

int exit_code_for(ErrorKind k) {
  switch (k) {
  case ErrorKind::InvalidArgument:
    return kUsage;
  case ErrorKind::DelayOverflow:
  case ErrorKind::TargetUnreachable:
  case ErrorKind::InsufficientData:
    return kSimulationFailure;
  default:
    return kSolverFailure;
  }
}

} // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Energy-delay opportunistic spectrum access: solve, simulate, learn"};
  app.require_subcommand(1);

  CommonOptions solve_o, sim_o, sweep_o, cmp_o, learn_o;

  auto *solve = app.add_subcommand("solve", "Solve for the optimal policy");
  add_common(*solve, solve_o);

  auto *simulate = app.add_subcommand("simulate", "Simulate a policy");
  add_common(*simulate, sim_o);
  std::string policy_file;
  int mp_k = 0;
  bool trace = false;
  bool sim_cs_only = false;
  simulate->add_option("--policy", policy_file, "Threshold policy CSV")->check(CLI::ExistingFile);
  simulate->add_option("--mp", mp_k, "Memoryless policy MP-k")->check(CLI::PositiveNumber);
  simulate->add_flag("--trace", trace, "Write a per-slot trace");
  simulate->add_flag("--energy-cs-only", sim_cs_only, "Count only sensing cost as energy");

  auto *sweep = app.add_subcommand("sweep", "Sweep the delay-penalty coefficient");
  add_common(*sweep, sweep_o);
  std::string gammas = "1..100";
  bool sweep_cs_only = false;
  sweep->add_option("--gammas", gammas, "List \"a,b,c\" or range \"lo..hi[:count]\"");
  sweep->add_flag("--energy-cs-only", sweep_cs_only, "Count only sensing cost as energy");

  auto *compare = app.add_subcommand("compare", "Compare with memoryless MP-k policies");
  add_common(*compare, cmp_o);
  std::vector<int> ks{2, 3, 5, 8};
  double delay_tol = 0.1;
  bool cmp_cs_only = false;
  compare->add_option("--ks", ks, "Memoryless switch delays")->delimiter(',');
  compare->add_option("--delay-tol", delay_tol, "Delay matching tolerance (slots)");
  compare->add_flag("--energy-cs-only", cmp_cs_only, "Count only sensing cost as energy");

  auto *learn = app.add_subcommand("learn", "Run the online learner");
  add_common(*learn, learn_o);
  LearnOptions lo;
  learn->add_option("--iterations", lo.iterations, "Policy-evaluation windows");
  learn->add_option("--m", lo.m, "Estimate bins per axis");
  learn->add_option("--nbslot", lo.nbslot, "Slots per window");
  learn->add_option("--epsilon", lo.epsilon, "Exploration probability");
  learn->add_option("--eta", lo.eta, "Discount factor");
  learn->add_flag("--conventional", lo.conventional,
                  "Use (1-rho) on the old Q and rho on the target");

  auto *replay = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
  std::string manifest_path;
  std::string replay_out;
  replay->add_option("manifest", manifest_path, "manifest.ini")->required()->check(
      CLI::ExistingFile);
  replay->add_option("--out", replay_out, "Output directory override");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    if (!rev.empty()) {
      rev.pop_back();
    }
    app.parse(rev);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*solve) {
      return cmd_solve(solve_o, args, out);
    }
    if (*simulate) {
      return cmd_simulate(sim_o, policy_file, mp_k, trace, sim_cs_only, args, out);
    }
    if (*sweep) {
      return cmd_sweep(sweep_o, gammas, sweep_cs_only, args, out);
    }
    if (*compare) {
      return cmd_compare(cmp_o, ks, delay_tol, cmp_cs_only, args, out);
    }
    if (*learn) {
      return cmd_learn(learn_o, lo, args, out);
    }
    if (*replay) {
      std::ifstream in(manifest_path);
      const Manifest m = read_manifest(in);
      auto words = split_words(m.params.count("argv") ? m.params.at("argv") : "");
      if (words.empty()) {
        err << "manifest has no recorded command line\n";
        return kUsage;
      }
      if (!replay_out.empty()) {
        for (std::size_t i = 0; i < words.size(); ++i) {
          if (words[i] == "--out" && i + 1 < words.size()) {
            words.erase(words.begin() + static_cast<std::ptrdiff_t>(i),
                        words.begin() + static_cast<std::ptrdiff_t>(i) + 2);
            break;
          }
        }
        words.push_back("--out");
        words.push_back(replay_out);
      }
      words.insert(words.begin(), args.empty() ? std::string("osa") : args.front());
      return run(words, out, err);
    }
  } catch (const Error &e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

} // namespace osa::cli
