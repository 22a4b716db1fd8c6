#include "zdalab/scenario.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace zdalab {

using nlohmann::json;

namespace {

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

Complex parse_complex(const json& j, const std::string& what) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2) return Complex(j[0].get<double>(), j[1].get<double>());
  throw ConfigError(what + ": expected a number or [re, im]");
}

VectorXcd parse_complex_vector(const json& j, const std::string& what) {
  if (!j.is_array()) throw ConfigError(what + ": expected an array");
  VectorXcd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = parse_complex(j[i], what);
  return v;
}

VectorXd parse_vector(const json& j, const std::string& what) {
  if (!j.is_array()) throw ConfigError(what + ": expected an array");
  VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

std::vector<int> parse_agents(const json& j, int n, const std::string& what) {
  if (!j.is_array()) throw ConfigError(what + ": expected an array of agent labels");
  std::vector<int> out;
  for (const auto& e : j) {
    const int label = e.get<int>();
    if (label < 1 || label > n)
      throw ConfigError(what + ": agent label " + std::to_string(label) + " outside 1.." +
                        std::to_string(n));
    out.push_back(label - 1);
  }
  return out;
}

json complex_to_json(const Complex& c) { return json::array({c.real(), c.imag()}); }

json complex_vector_to_json(const VectorXcd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(complex_to_json(v(i)));
  return arr;
}

}  // namespace

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& err) {
    throw std::invalid_argument("parse error in " + path + ": " + err.what());
  }

  ScenarioConfig cfg;
  cfg.name = j.value("name", "scenario");
  cfg.n = j.at("n").get<int>();
  cfg.dt = j.value("dt", 1e-3);
  cfg.horizon = j.at("horizon").get<double>();
  cfg.seed = j.value("seed", std::uint64_t{0});
  cfg.export_stride = j.value("export", json::object()).value("stride", 1);

  if (!j.contains("topologies") || !j["topologies"].is_array())
    throw ConfigError("config must list topologies");
  for (const auto& jt : j["topologies"]) {
    const int id = jt.at("id").get<int>();
    std::vector<std::tuple<int, int, double>> edges;
    for (const auto& je : jt.value("edges", json::array())) {
      if (!je.is_array() || je.size() != 3)
        throw ConfigError("topology " + std::to_string(id) + ": edges must be [i, j, weight]");
      const int a = je[0].get<int>();
      const int b = je[1].get<int>();
      if (a < 1 || a > cfg.n || b < 1 || b > cfg.n)
        throw ConfigError("topology " + std::to_string(id) + ": edge endpoint outside 1.." +
                          std::to_string(cfg.n));
      edges.emplace_back(a - 1, b - 1, je[2].get<double>());
    }
    cfg.topologies.push_back(Topology::from_edges(id, cfg.n, edges));
  }

  for (const auto& js : j.at("schedule")) {
    ScheduleEntry e;
    e.topology = js.at("topology").get<int>();
    e.dwell = js.at("dwell").get<double>();
    cfg.schedule.entries.push_back(e);
  }

  const auto& jo = j.at("outputs");
  cfg.outputs.monitored = parse_agents(jo.at("monitored"), cfg.n, "outputs.monitored");
  cfg.outputs.c1 = parse_vector(jo.at("c1"), "outputs.c1");
  cfg.outputs.c2 = parse_vector(jo.at("c2"), "outputs.c2");
  cfg.outputs.d = jo.contains("d") ? parse_vector(jo["d"], "outputs.d")
                                   : VectorXd::Zero(static_cast<Eigen::Index>(
                                         cfg.outputs.monitored.size()));

  const auto& ji = j.at("initial");
  cfg.initial.x = parse_vector(ji.at("x"), "initial.x");
  cfg.initial.v = parse_vector(ji.at("v"), "initial.v");

  if (j.contains("detection")) {
    cfg.detection_threshold = j["detection"].value("threshold", 1e-4);
    cfg.detection_debounce = j["detection"].value("debounce", 3);
  }

  if (j.contains("attack")) {
    const auto& ja = j["attack"];
    if (ja.contains("zda")) {
      const auto& jz = ja["zda"];
      const std::string mode = jz.value("mode", "intermittent");
      if (mode == "explicit")
        cfg.attack.mode = AttackSection::ZdaMode::explicit_plan;
      else if (mode == "intermittent")
        cfg.attack.mode = AttackSection::ZdaMode::intermittent;
      else if (mode == "non_pausing")
        cfg.attack.mode = AttackSection::ZdaMode::non_pausing;
      else
        throw ConfigError("attack.zda.mode must be explicit, intermittent or non_pausing");

      cfg.attack.k_set = parse_agents(jz.at("k"), cfg.n, "attack.zda.k");
      std::sort(cfg.attack.k_set.begin(), cfg.attack.k_set.end());
      if (jz.contains("d")) cfg.attack.d = parse_vector(jz["d"], "attack.zda.d");
      if (jz.contains("eta")) cfg.attack.preferred_eta = parse_complex(jz["eta"], "attack.zda.eta");
      if (jz.contains("scale")) cfg.attack.scale = parse_complex(jz["scale"], "attack.zda.scale");
      cfg.attack.inference_delay = jz.value("inference_delay", 0.0);
      cfg.attack.knows_initial_topology = jz.value("knows_initial_topology", false);
      cfg.attack.corrupt_observer_init = jz.value("corrupt_observer_init", true);

      if (cfg.attack.mode == AttackSection::ZdaMode::explicit_plan) {
        ZdaPlan plan;
        plan.z0 = parse_complex_vector(jz.at("z0"), "attack.zda.z0");
        plan.k_set = cfg.attack.k_set;
        plan.d = cfg.attack.d;
        plan.corrupt_observer_init = cfg.attack.corrupt_observer_init;
        for (const auto& jw : jz.at("windows")) {
          ZdaWindow w;
          w.resume = jw.at("resume").get<double>();
          w.pause = jw.at("pause").get<double>();
          w.topology = jw.at("topology").get<int>();
          w.eta = parse_complex(jw.at("eta"), "attack.zda.windows.eta");
          w.g = parse_complex_vector(jw.at("g"), "attack.zda.windows.g");
          if (jw.contains("dev")) w.dev = parse_complex_vector(jw["dev"], "attack.zda.windows.dev");
          plan.windows.push_back(std::move(w));
        }
        cfg.attack.explicit_plan = std::move(plan);
      }
    }
    if (ja.contains("observer_false_data"))
      cfg.attack.observer_false_data =
          parse_complex_vector(ja["observer_false_data"], "attack.observer_false_data");
    if (ja.contains("topology")) {
      const auto& jt = ja["topology"];
      TopologyAttack atk;
      atk.d_set = parse_agents(jt.at("d_set"), cfg.n, "attack.topology.d_set");
      std::sort(atk.d_set.begin(), atk.d_set.end());
      for (const auto& je : jt.at("edges")) {
        if (!je.is_array() || je.size() != 3)
          throw ConfigError("attack.topology.edges must be [i, j, new_weight]");
        atk.target_edges.emplace_back(je[0].get<int>() - 1, je[1].get<int>() - 1,
                                      je[2].get<double>());
      }
      cfg.attack.topology_attack = std::move(atk);
      cfg.attack.topology_attack_from_window = jt.value("from_window", 1);
    }
  }

  cfg.validate();
  return cfg;
}

void ScenarioConfig::validate() const {
  if (n < 1) throw std::invalid_argument("agent count must be positive");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  if (export_stride < 1) throw std::invalid_argument("export stride must be >= 1");
  if (topologies.empty()) throw std::invalid_argument("at least one topology required");
  for (const auto& t : topologies) {
    if (t.n != n) throw std::invalid_argument("topology size does not match agent count");
    t.validate();
    for (const auto& other : topologies) {
      if (&other != &t && other.id == t.id)
        throw std::invalid_argument("duplicate topology id " + std::to_string(t.id));
    }
  }
  schedule.validate();
  for (const auto& e : schedule.entries) {
    topology_by_id(topologies, e.topology);
    const double ratio = e.dwell / dt;
    if (std::abs(ratio - std::round(ratio)) > 1e-6)
      throw std::invalid_argument("dwell time " + std::to_string(e.dwell) +
                                  " is not a multiple of dt (grid misalignment)");
  }
  outputs.validate(n);
  if (initial.x.size() != n || initial.v.size() != n)
    throw std::invalid_argument("initial condition length does not match agent count");
  if (detection_threshold < 0.0) throw std::invalid_argument("detection threshold must be >= 0");

  if (attack.mode != AttackSection::ZdaMode::none) {
    if (attack.k_set.empty())
      throw std::invalid_argument("attack requires a nonempty misbehaving set");
    if (attack.d.size() != 0 && attack.d.size() != outputs.m())
      throw std::invalid_argument("attack.d must have one entry per monitored agent");
    if (attack.mode == AttackSection::ZdaMode::explicit_plan) {
      attack.explicit_plan.validate(n, outputs);
      // Compliant plans keep every injection window inside one dwell window
      // of the matching topology.
      const auto wins = windows_over(schedule, horizon);
      for (const auto& w : attack.explicit_plan.windows) {
        bool contained = false;
        for (const auto& dw : wins) {
          if (w.resume >= dw.start - 1e-9 && w.pause <= dw.end + 1e-9 &&
              w.topology == dw.topology) {
            contained = true;
            break;
          }
        }
        if (!contained)
          throw std::invalid_argument(
              "explicit attack window does not fit inside a dwell window of its topology");
      }
    }
  }
  if (attack.topology_attack) {
    std::vector<int> sorted_monitored = outputs.monitored;
    attack.topology_attack->validate(sorted_monitored, n);
    if (attack.topology_attack_from_window < 0)
      throw std::invalid_argument("attack.topology.from_window must be >= 0");
  }
}

void save_config(const ScenarioConfig& cfg, const std::string& path) {
  json j;
  j["name"] = cfg.name;
  j["n"] = cfg.n;
  j["dt"] = cfg.dt;
  j["horizon"] = cfg.horizon;
  j["seed"] = cfg.seed;
  j["export"] = {{"stride", cfg.export_stride}};

  j["topologies"] = json::array();
  for (const auto& t : cfg.topologies) {
    json edges = json::array();
    for (int a = 0; a < t.n; ++a)
      for (int b = a + 1; b < t.n; ++b)
        if (t.adjacency(a, b) != 0.0) edges.push_back({a + 1, b + 1, t.adjacency(a, b)});
    j["topologies"].push_back({{"id", t.id}, {"edges", edges}});
  }

  j["schedule"] = json::array();
  for (const auto& e : cfg.schedule.entries)
    j["schedule"].push_back({{"topology", e.topology}, {"dwell", e.dwell}});

  json mon = json::array();
  for (int i : cfg.outputs.monitored) mon.push_back(i + 1);
  j["outputs"] = {{"monitored", mon},
                  {"c1", std::vector<double>(cfg.outputs.c1.data(),
                                             cfg.outputs.c1.data() + cfg.outputs.c1.size())},
                  {"c2", std::vector<double>(cfg.outputs.c2.data(),
                                             cfg.outputs.c2.data() + cfg.outputs.c2.size())},
                  {"d", std::vector<double>(cfg.outputs.d.data(),
                                            cfg.outputs.d.data() + cfg.outputs.d.size())}};

  j["initial"] = {
      {"x", std::vector<double>(cfg.initial.x.data(), cfg.initial.x.data() + cfg.initial.x.size())},
      {"v", std::vector<double>(cfg.initial.v.data(), cfg.initial.v.data() + cfg.initial.v.size())}};

  j["detection"] = {{"threshold", cfg.detection_threshold}, {"debounce", cfg.detection_debounce}};

  if (cfg.attack.mode != AttackSection::ZdaMode::none || cfg.attack.topology_attack) {
    json ja;
    if (cfg.attack.mode != AttackSection::ZdaMode::none) {
      json jz;
      switch (cfg.attack.mode) {
        case AttackSection::ZdaMode::explicit_plan: jz["mode"] = "explicit"; break;
        case AttackSection::ZdaMode::intermittent: jz["mode"] = "intermittent"; break;
        case AttackSection::ZdaMode::non_pausing: jz["mode"] = "non_pausing"; break;
        default: break;
      }
      json k = json::array();
      for (int i : cfg.attack.k_set) k.push_back(i + 1);
      jz["k"] = k;
      if (cfg.attack.d.size())
        jz["d"] = std::vector<double>(cfg.attack.d.data(),
                                      cfg.attack.d.data() + cfg.attack.d.size());
      if (cfg.attack.preferred_eta) jz["eta"] = complex_to_json(*cfg.attack.preferred_eta);
      jz["scale"] = complex_to_json(cfg.attack.scale);
      jz["inference_delay"] = cfg.attack.inference_delay;
      jz["knows_initial_topology"] = cfg.attack.knows_initial_topology;
      jz["corrupt_observer_init"] = cfg.attack.corrupt_observer_init;
      if (cfg.attack.mode == AttackSection::ZdaMode::explicit_plan) {
        jz["z0"] = complex_vector_to_json(cfg.attack.explicit_plan.z0);
        json windows = json::array();
        for (const auto& w : cfg.attack.explicit_plan.windows) {
          windows.push_back({{"resume", w.resume},
                             {"pause", w.pause},
                             {"topology", w.topology},
                             {"eta", complex_to_json(w.eta)},
                             {"g", complex_vector_to_json(w.g)},
                             {"dev", complex_vector_to_json(w.dev)}});
        }
        jz["windows"] = windows;
      }
      ja["zda"] = jz;
    }
    if (cfg.attack.observer_false_data)
      ja["observer_false_data"] = complex_vector_to_json(*cfg.attack.observer_false_data);
    if (cfg.attack.topology_attack) {
      json d_set = json::array();
      for (int i : cfg.attack.topology_attack->d_set) d_set.push_back(i + 1);
      json edges = json::array();
      for (const auto& [a, b, w] : cfg.attack.topology_attack->target_edges)
        edges.push_back({a + 1, b + 1, w});
      ja["topology"] = {{"d_set", d_set},
                        {"edges", edges},
                        {"from_window", cfg.attack.topology_attack_from_window}};
    }
    j["attack"] = ja;
  }

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << j.dump(2) << '\n';
}

}  // namespace zdalab
