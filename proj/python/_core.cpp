#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "osa/error.hpp"
#include "osa/learn.hpp"
#include "osa/multichannel.hpp"
#include "osa/policy.hpp"
#include "osa/scenario.hpp"
#include "osa/sim.hpp"
#include "osa/version.hpp"

namespace py = pybind11;
using namespace osa;

namespace {

py::array_t<double> value_table(const ValueFunction &V) {
  py::array_t<double> out({V.grid().size(), static_cast<std::size_t>(V.l_max())});
  auto a = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < V.grid().size(); ++i) {
    for (int l = 1; l <= V.l_max(); ++l) {
      a(i, l - 1) = V.value(i, l);
    }
  }
  return out;
}

py::array_t<int> action_table(const ValueFunction &V) {
  py::array_t<int> out({V.grid().size(), static_cast<std::size_t>(V.l_max())});
  auto a = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < V.grid().size(); ++i) {
    for (int l = 1; l <= V.l_max(); ++l) {
      a(i, l - 1) = static_cast<int>(V.action(i, l));
    }
  }
  return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Energy-delay opportunistic spectrum access: POMDP solver, simulator and learner";
  m.attr("__version__") = std::string(kVersion);

  static py::handle osa_error = py::exception<Error>(m, "OsaError").release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) {
        std::rethrow_exception(p);
      }
    } catch (const Error &e) {
      py::object exc = py::reinterpret_borrow<py::object>(osa_error)(
          std::string(to_string(e.kind())) + ": " + e.what());
      exc.attr("kind") = to_string(e.kind());
      PyErr_SetObject(osa_error.ptr(), exc.ptr());
    }
  });

  py::enum_<Action>(m, "Action")
      .value("Wait", Action::Wait)
      .value("SenseWait", Action::SenseWait)
      .value("SenseFallback", Action::SenseFallback);
  py::enum_<Observation>(m, "Observation")
      .value("Idle", Observation::Idle)
      .value("Busy", Observation::Busy);
  py::enum_<PenaltyConvention>(m, "PenaltyConvention")
      .value("QFunction", PenaltyConvention::QFunction)
      .value("RewardTable", PenaltyConvention::RewardTable);

  py::class_<ChannelParams>(m, "ChannelParams")
      .def(py::init([](double a, double b) { return ChannelParams{a, b}; }), py::arg("alpha"),
           py::arg("beta"))
      .def_readwrite("alpha", &ChannelParams::alpha)
      .def_readwrite("beta", &ChannelParams::beta)
      .def("validate", &ChannelParams::validate)
      .def("__repr__", [](const ChannelParams &p) {
        return "ChannelParams(alpha=" + std::to_string(p.alpha) +
               ", beta=" + std::to_string(p.beta) + ")";
      });

  py::class_<RewardParams>(m, "RewardParams")
      .def(py::init([](double phi, double c_s, double p_p, double p_3g, double gamma) {
             RewardParams r{phi, c_s, p_p, p_3g, gamma};
             r.validate();
             return r;
           }),
           py::arg("phi") = 350.0, py::arg("c_s") = 50.0, py::arg("p_p") = 100.0,
           py::arg("p_3g") = 800.0, py::arg("gamma") = 10.0)
      .def_readwrite("phi", &RewardParams::phi)
      .def_readwrite("c_s", &RewardParams::c_s)
      .def_readwrite("p_p", &RewardParams::p_p)
      .def_readwrite("p_3g", &RewardParams::p_3g)
      .def_readwrite("gamma", &RewardParams::gamma)
      .def("delay_penalty", &RewardParams::delay_penalty)
      .def("idle_reward_nonnegative", &RewardParams::idle_reward_nonnegative);

  m.def("stationary_idle", &stationary_idle);
  m.def("update_unsensed", &update_unsensed);
  m.def("update_sensed", &update_sensed);

  py::class_<ValueFunction>(m, "ValueFunction")
      .def_property_readonly("gain", &ValueFunction::gain)
      .def_property_readonly("l_max", &ValueFunction::l_max)
      .def_property_readonly("pi0", &ValueFunction::pi0)
      .def_readonly("iterations", &ValueFunction::iterations)
      .def_property_readonly("grid",
                             [](const ValueFunction &V) {
                               auto p = V.grid().points();
                               return std::vector<double>(p.begin(), p.end());
                             })
      .def_property_readonly("values", &value_table)
      .def_property_readonly("actions", &action_table)
      .def("value_at", &interpolate, py::arg("belief"), py::arg("delay"))
      .def("q_values", [](const ValueFunction &V, double b, int l) {
        double q[3];
        q_values(V, b, l, q);
        return std::vector<double>(q, q + 3);
      });

  m.def(
      "solve_single_channel",
      [](const ChannelParams &p, const RewardParams &r, int l_max, double tol,
         std::size_t grid_intervals, PenaltyConvention conv) {
        SolverOptions o;
        o.l_max = l_max;
        o.tol = tol;
        o.grid_intervals = grid_intervals;
        o.convention = conv;
        py::gil_scoped_release release;
        return solve_single_channel(p, r, o);
      },
      py::arg("channel"), py::arg("rewards"), py::arg("l_max") = 50, py::arg("tol") = 1e-9,
      py::arg("grid_intervals") = 1000, py::arg("convention") = PenaltyConvention::QFunction);

  py::class_<Policy, std::shared_ptr<Policy>>(m, "Policy").def("describe", &Policy::describe);
  py::class_<ThresholdPolicy, Policy, std::shared_ptr<ThresholdPolicy>>(m, "ThresholdPolicy")
      .def(py::init<std::vector<double>, int, int>(), py::arg("lambda_star"), py::arg("l_star"),
           py::arg("l_max"))
      .def_property_readonly("l_star", &ThresholdPolicy::l_star)
      .def_property_readonly("l_max", &ThresholdPolicy::l_max)
      .def_property_readonly("thresholds",
                             [](const ThresholdPolicy &p) {
                               auto t = p.thresholds();
                               return std::vector<double>(t.begin(), t.end());
                             })
      .def("lambda_star", &ThresholdPolicy::lambda_star);
  py::class_<MemorylessPolicy, Policy, std::shared_ptr<MemorylessPolicy>>(m, "MemorylessPolicy")
      .def(py::init<int>(), py::arg("k"))
      .def_property_readonly("k", &MemorylessPolicy::k);

  m.def("extract_thresholds", [](const ValueFunction &V) {
    return std::make_shared<ThresholdPolicy>(extract_thresholds(V));
  });
  m.def("dedicated_switch_delay", &dedicated_switch_delay);
  m.def("check_structure", [](const ValueFunction &V) {
    py::dict out;
    for (const auto &c : check_structure(V).checks) {
      const char *status = c.status == StructureCheck::Status::Pass   ? "pass"
                           : c.status == StructureCheck::Status::Fail ? "fail"
                                                                     : "skipped";
      out[py::str(c.name)] = status;
    }
    return out;
  });

  m.def(
      "solve_multichannel_l_star",
      [](const ChannelParams &p, const RewardParams &r, int n, int l_max, int k_trunc) {
        MultiChannelOptions o;
        o.n_channels = n;
        o.l_max = l_max;
        o.k_trunc = k_trunc;
        MultiChannelThresholds th;
        double gain = 0.0;
        {
          py::gil_scoped_release release;
          const auto sol = solve_multichannel(p, r, o);
          th = extract_multichannel_thresholds(sol);
          gain = sol.gain();
        }
        return py::make_tuple(th.l_star, th.lambda_star, gain);
      },
      py::arg("channel"), py::arg("rewards"), py::arg("n_channels") = 4, py::arg("l_max") = 15,
      py::arg("k_trunc") = 20,
      "Returns (l_star, lambda_star per delay, gain) of the multichannel optimum.");

  py::class_<SimConfig>(m, "SimConfig")
      .def(py::init<>())
      .def_readwrite("num_packets", &SimConfig::num_packets)
      .def_readwrite("seed", &SimConfig::seed)
      .def_readwrite("channels", &SimConfig::channels)
      .def_readwrite("rewards", &SimConfig::rewards)
      .def_readwrite("l_max", &SimConfig::l_max)
      .def_readwrite("energy_includes_prices", &SimConfig::energy_includes_prices)
      .def_readwrite("convention", &SimConfig::convention);

  py::class_<SimMetrics>(m, "SimMetrics")
      .def_readonly("avg_delay", &SimMetrics::avg_delay)
      .def_readonly("energy_per_packet", &SimMetrics::energy_per_packet)
      .def_readonly("energy_per_slot", &SimMetrics::energy_per_slot)
      .def_readonly("throughput", &SimMetrics::throughput)
      .def_readonly("avg_reward", &SimMetrics::avg_reward)
      .def_readonly("slots", &SimMetrics::slots)
      .def_readonly("packets", &SimMetrics::packets)
      .def_readonly("senses", &SimMetrics::senses)
      .def_readonly("primary_tx", &SimMetrics::primary_tx)
      .def_readonly("dedicated_tx", &SimMetrics::dedicated_tx)
      .def_readonly("waits", &SimMetrics::waits)
      .def_readonly("total_energy", &SimMetrics::total_energy)
      .def("__eq__", [](const SimMetrics &a, const SimMetrics &b) { return a == b; });

  m.def("run_episode", [](const SimConfig &cfg, const Policy &p) { return run_episode(cfg, p); },
        py::arg("config"), py::arg("policy"));
  m.def("solve_optimal_policy", [](const SimConfig &cfg) {
    return std::const_pointer_cast<Policy>(solve_optimal_policy(cfg));
  });
  m.def("little_check", &little_check);
  m.def(
      "sweep_gamma",
      [](const SimConfig &cfg, const std::vector<double> &gammas) {
        std::vector<py::tuple> out;
        for (const auto &row : sweep_gamma(cfg, gammas)) {
          out.push_back(py::make_tuple(row.gamma, row.metrics));
        }
        return out;
      },
      py::arg("config"), py::arg("gammas"));

  py::class_<Estimates>(m, "Estimates")
      .def_readonly("alpha", &Estimates::alpha)
      .def_readonly("beta", &Estimates::beta)
      .def_readonly("pi0", &Estimates::pi0)
      .def_readonly("beta_defined", &Estimates::beta_defined);
  m.def(
      "estimate_continuous",
      [](const ChannelParams &p, std::uint64_t slots, std::uint64_t seed) {
        return estimate(sense_continuously(p, slots, seed), 0);
      },
      py::arg("channel"), py::arg("slots"), py::arg("seed") = 1,
      "Estimate (alpha, beta, pi0) from a channel sensed in every slot.");
  m.def(
      "run_learning",
      [](const std::vector<ChannelParams> &channels, const RewardParams &r,
         std::uint64_t iterations, std::uint64_t seed, int l_max, bool conventional) {
        LearnerConfig cfg;
        cfg.l_max = l_max;
        cfg.weighting = conventional ? QWeighting::Conventional : QWeighting::AsPrinted;
        auto res = run_learning(cfg, channels, r, iterations, seed);
        std::vector<py::dict> trace;
        for (const auto &t : res.trace) {
          py::dict d;
          d["iteration"] = t.iteration;
          d["alpha_hat"] = t.alpha_hat;
          d["beta_hat"] = t.beta_hat;
          d["policy_id"] = t.policy_id;
          d["window_reward"] = t.window_reward;
          d["q_value"] = t.q_value;
          trace.push_back(d);
        }
        return py::make_tuple(std::make_shared<ThresholdPolicy>(res.learned), trace);
      },
      py::arg("channels"), py::arg("rewards"), py::arg("iterations") = 200, py::arg("seed") = 1,
      py::arg("l_max") = 15, py::arg("conventional") = false,
      "Runs the online learner; returns (learned policy, per-iteration trace).");

  py::class_<Scenario>(m, "Scenario")
      .def_readonly("name", &Scenario::name)
      .def_readonly("n_channels", &Scenario::n_channels)
      .def_readonly("channel", &Scenario::channel)
      .def_readonly("rewards", &Scenario::rewards)
      .def_readonly("l_max", &Scenario::l_max)
      .def("sim_config", [](const Scenario &s) {
        SimConfig c;
        c.channels.assign(static_cast<std::size_t>(s.n_channels), s.channel);
        c.rewards = s.rewards;
        c.l_max = s.l_max;
        return c;
      });
  m.def("scenario_preset", &scenario_preset, py::arg("id"));
  m.def("single_channel_scenario", &single_channel_scenario);
}
