#include "osa/scenario.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "osa/error.hpp"

namespace osa {

namespace pt = boost::property_tree;

void Scenario::validate() const {
  if (n_channels < 1) {
    throw Error(ErrorKind::InvalidArgument, "scenario needs at least one channel");
  }
  if (l_max < 1) {
    throw Error(ErrorKind::InvalidArgument, "l_max must be >= 1");
  }
  channel.validate();
  rewards.validate();
}

Scenario scenario_preset(int id) {
  Scenario s;
  s.n_channels = 4;
  s.l_max = 15;
  switch (id) {
  case 1:
    s.name = "scenario1";
    s.channel = {0.15, 0.1};
    break;
  case 2:
    s.name = "scenario2";
    s.channel = {0.85, 0.7};
    break;
  case 3:
    s.name = "scenario3";
    s.channel = {0.95, 0.05};
    break;
  default:
    throw Error(ErrorKind::InvalidArgument, "scenario id must be 1, 2 or 3");
  }
  return s;
}

Scenario single_channel_scenario() {
  Scenario s;
  s.name = "single";
  s.n_channels = 1;
  s.channel = {0.15, 0.1};
  s.l_max = 50;
  return s;
}

void write_scenario_ini(std::ostream &os, const Scenario &s) {
  pt::ptree t;
  t.put("scenario.name", s.name);
  t.put("scenario.n", s.n_channels);
  t.put("scenario.lmax", s.l_max);
  t.put("channel.alpha", s.channel.alpha);
  t.put("channel.beta", s.channel.beta);
  t.put("rewards.phi", s.rewards.phi);
  t.put("rewards.cs", s.rewards.c_s);
  t.put("rewards.pp", s.rewards.p_p);
  t.put("rewards.p3g", s.rewards.p_3g);
  t.put("rewards.gamma", s.rewards.gamma);
  pt::write_ini(os, t);
}

Scenario read_scenario_ini(std::istream &is, Scenario base) {
  pt::ptree t;
  try {
    pt::read_ini(is, t);
    base.name = t.get("scenario.name", base.name);
    base.n_channels = t.get("scenario.n", base.n_channels);
    base.l_max = t.get("scenario.lmax", base.l_max);
    base.channel.alpha = t.get("channel.alpha", base.channel.alpha);
    base.channel.beta = t.get("channel.beta", base.channel.beta);
    base.rewards.phi = t.get("rewards.phi", base.rewards.phi);
    base.rewards.c_s = t.get("rewards.cs", base.rewards.c_s);
    base.rewards.p_p = t.get("rewards.pp", base.rewards.p_p);
    base.rewards.p_3g = t.get("rewards.p3g", base.rewards.p_3g);
    base.rewards.gamma = t.get("rewards.gamma", base.rewards.gamma);
  } catch (const pt::ptree_error &e) {
    throw Error(ErrorKind::InvalidArgument, std::string("bad scenario file: ") + e.what());
  }
  base.validate();
  return base;
}

} // namespace osa
