#include "hwnroute/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "hwnroute/error.hpp"
#include "hwnroute/seed.hpp"

namespace hwnroute {

using nlohmann::json;

std::string_view to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::subbands:
      return "subbands";
    case SweepAxis::relay_count:
      return "relay_count";
    case SweepAxis::resource_count:
      return "resource_count";
    case SweepAxis::flow_count:
      return "flow_count";
  }
  return "unknown";
}

std::optional<SweepAxis> parse_sweep_axis(std::string_view name) {
  for (SweepAxis a : {SweepAxis::subbands, SweepAxis::relay_count, SweepAxis::resource_count, SweepAxis::flow_count}) {
    if (to_string(a) == name) return a;
  }
  return std::nullopt;
}

std::vector<TechnologyConfig> default_technologies() {
  const double freqs[] = {40, 80, 200, 400, 800, 2000, 3000};
  const double exponents[] = {2.6, 2.7, 2.8, 2.9, 3.0, 3.2, 3.3};
  std::vector<TechnologyConfig> out;
  for (int i = 0; i < 7; ++i) {
    TechnologyConfig t;
    t.center_freq_mhz = freqs[i];
    t.subbands = 1;
    t.path_loss.exponent = exponents[i];
    out.push_back(t);
  }
  return out;
}

ScenarioConfig default_scenario() {
  ScenarioConfig c;
  c.technologies = default_technologies();
  return c;
}

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& why) {
  throw Error("config: " + field + ": " + why);
}

void require(bool ok, const std::string& field, const std::string& why) {
  if (!ok) fail(field, why);
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

// Reads fields from one JSON object and rejects keys it was never asked for.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  template <typename T>
  void get(const std::string& key, T& out) {
    const json* v = find(key);
    if (!v) return;
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!v->is_number()) fail(field(key), "expected a number");
      } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
        if (!v->is_number_integer() && !v->is_number_unsigned()) fail(field(key), "expected an integer");
        if constexpr (std::is_unsigned_v<T>) {
          if (v->is_number_integer() && v->get<std::int64_t>() < 0) fail(field(key), "must be non-negative");
        }
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!v->is_boolean()) fail(field(key), "expected true or false");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v->is_string()) fail(field(key), "expected a string");
      }
      out = v->get<T>();
    } catch (const json::exception& e) {
      fail(field(key), e.what());
    }
  }

  void get_ints(const std::string& key, std::vector<int>& out) {
    const json* v = find(key);
    if (!v) return;
    if (!v->is_array()) fail(field(key), "expected an array of integers");
    out.clear();
    for (const json& e : *v) {
      if (!e.is_number_integer()) fail(field(key), "expected an array of integers");
      out.push_back(e.get<int>());
    }
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) fail(field(it.key()), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <typename Enum, typename Parse>
void get_enum(Reader& r, const std::string& key, Enum& out, Parse&& parse, const char* choices) {
  std::string name;
  const json* v = r.find(key);
  if (!v) return;
  if (!v->is_string()) fail(r.field(key), std::string("expected one of ") + choices);
  name = v->get<std::string>();
  const auto parsed = parse(name);
  if (!parsed) fail(r.field(key), "unknown value \"" + name + "\", expected one of " + choices);
  out = *parsed;
}

std::optional<NoiseMode> parse_noise_mode(std::string_view s) {
  if (s == "density") return NoiseMode::density;
  if (s == "total") return NoiseMode::total;
  return std::nullopt;
}

std::string_view to_string(NoiseMode m) { return m == NoiseMode::density ? "density" : "total"; }

PathLossParams read_path_loss(const json& j, const std::string& path) {
  PathLossParams p;
  Reader r(j, path);
  std::string kind = "log_distance";
  r.get("kind", kind);
  if (kind != "log_distance") fail(r.field("kind"), "unknown value \"" + kind + "\", expected log_distance");
  r.get("exponent", p.exponent);
  if (const json* ref = r.find("reference_loss_db"); ref && !ref->is_null()) {
    if (!ref->is_number()) fail(r.field("reference_loss_db"), "expected a number or null");
    p.reference_loss_db = ref->get<double>();
  }
  r.get("shadowing_sigma_db", p.shadowing_sigma_db);
  r.finish();
  return p;
}

json write_path_loss(const PathLossParams& p) {
  json j;
  j["kind"] = "log_distance";
  j["exponent"] = p.exponent;
  j["reference_loss_db"] = p.reference_loss_db ? json(*p.reference_loss_db) : json(nullptr);
  j["shadowing_sigma_db"] = p.shadowing_sigma_db;
  return j;
}

ScenarioConfig from_json(const json& root) {
  ScenarioConfig c = default_scenario();
  Reader r(root, "");

  if (const json* area = r.find("area")) {
    Reader a(*area, "area");
    a.get("width_m", c.area_width_m);
    a.get("height_m", c.area_height_m);
    a.finish();
  }
  r.get("relays", c.relays);
  r.get("flows", c.flows);
  r.get("neighbors", c.neighbors);
  r.get("min_endpoint_separation_m", c.min_endpoint_separation_m);

  if (const json* techs = r.find("technologies")) {
    if (!techs->is_array()) fail("technologies", "expected an array");
    c.technologies.clear();
    for (std::size_t i = 0; i < techs->size(); ++i) {
      const std::string path = "technologies[" + std::to_string(i) + "]";
      Reader t((*techs)[i], path);
      TechnologyConfig tc;
      t.get("center_freq_mhz", tc.center_freq_mhz);
      t.get("subbands", tc.subbands);
      if (const json* pl = t.find("path_loss")) tc.path_loss = read_path_loss(*pl, path + ".path_loss");
      t.finish();
      c.technologies.push_back(tc);
    }
  }

  r.get("tx_power_dbm", c.tx_power_dbm);
  if (const json* noise = r.find("noise")) {
    Reader n(*noise, "noise");
    get_enum(n, "mode", c.noise_mode, parse_noise_mode, "density, total");
    n.get("dbm", c.noise_dbm);
    n.finish();
  }
  r.get("interference", c.interference);
  if (const json* grid = r.find("gain_grid"); grid && !grid->is_null()) {
    if (!grid->is_string()) fail("gain_grid", "expected a file path or null");
    c.gain_grid = grid->get<std::string>();
  }
  get_enum(r, "neighbor_strategy", c.neighbor_strategy, parse_neighbor_strategy, "distance, channel, rate");
  r.get("include_destination", c.include_destination);
  r.get("policy", c.policy);
  r.get("reestablish_rounds", c.reestablish_rounds);
  r.get("hop_cap", c.hop_cap);

  if (const json* f = r.find("features")) {
    Reader fr(*f, "features");
    fr.get("distance_scale_m", c.features.distance_scale_m);
    fr.get("gain_offset_db", c.features.gain_offset_db);
    fr.get("gain_scale_db", c.features.gain_scale_db);
    fr.get("interference_decades", c.features.interference_decades);
    fr.get("rate_scale_bps", c.features.rate_scale_bps);
    fr.finish();
  } else {
    c.features.distance_scale_m = std::hypot(c.area_width_m, c.area_height_m);
  }

  if (const json* t = r.find("training")) {
    Reader tr(*t, "training");
    tr.get("episodes", c.training.episodes);
    tr.get("batch", c.training.batch);
    tr.get("replay_capacity", c.training.replay_capacity);
    tr.get("learning_rate", c.training.learning_rate);
    tr.get("train_steps_per_episode", c.training.train_steps_per_episode);
    tr.get("reward_scale", c.training.reward_scale);
    tr.get("discount", c.training.discount);
    tr.get("seed", c.training.seed);
    tr.get_ints("trunk", c.training.trunk);
    tr.get_ints("value", c.training.value);
    tr.get_ints("advantage", c.training.advantage);
    tr.finish();
  }

  if (const json* m = r.find("mobility")) {
    Reader mr(*m, "mobility");
    get_enum(mr, "model", c.mobility.model, parse_mobility_model, "random_walk, random_waypoint");
    mr.get("mobile_relays", c.mobility.mobile_relays);
    mr.get("max_speed_mps", c.mobility.max_speed_mps);
    mr.get("horizon_s", c.mobility.horizon_s);
    mr.get("decision_interval_s", c.mobility.decision_interval_s);
    mr.finish();
  }

  if (const json* e = r.find("eval")) {
    Reader er(*e, "eval");
    er.get("topologies", c.eval.topologies);
    er.get("seed", c.eval.seed);
    if (const json* s = er.find("schemes")) {
      if (!s->is_array()) fail("eval.schemes", "expected an array of scheme names");
      c.eval.schemes.clear();
      for (const json& name : *s) {
        if (!name.is_string()) fail("eval.schemes", "expected an array of scheme names");
        c.eval.schemes.push_back(name.get<std::string>());
      }
    }
    er.finish();
  }

  if (const json* s = r.find("sweep")) {
    Reader sr(*s, "sweep");
    get_enum(sr, "axis", c.sweep.axis, parse_sweep_axis, "subbands, relay_count, resource_count, flow_count");
    sr.get_ints("values", c.sweep.values);
    sr.finish();
  }

  r.finish();
  return c;
}

json to_json(const ScenarioConfig& c) {
  json j;
  j["area"] = {{"width_m", c.area_width_m}, {"height_m", c.area_height_m}};
  j["relays"] = c.relays;
  j["flows"] = c.flows;
  j["neighbors"] = c.neighbors;
  j["min_endpoint_separation_m"] = c.min_endpoint_separation_m;
  json techs = json::array();
  for (const TechnologyConfig& t : c.technologies) {
    techs.push_back({{"center_freq_mhz", t.center_freq_mhz},
                     {"subbands", t.subbands},
                     {"path_loss", write_path_loss(t.path_loss)}});
  }
  j["technologies"] = techs;
  j["tx_power_dbm"] = c.tx_power_dbm;
  j["noise"] = {{"mode", to_string(c.noise_mode)}, {"dbm", c.noise_dbm}};
  j["interference"] = c.interference;
  j["gain_grid"] = c.gain_grid ? json(*c.gain_grid) : json(nullptr);
  j["neighbor_strategy"] = to_string(c.neighbor_strategy);
  j["include_destination"] = c.include_destination;
  j["policy"] = c.policy;
  j["reestablish_rounds"] = c.reestablish_rounds;
  j["hop_cap"] = c.hop_cap;
  j["features"] = {{"distance_scale_m", c.features.distance_scale_m},
                   {"gain_offset_db", c.features.gain_offset_db},
                   {"gain_scale_db", c.features.gain_scale_db},
                   {"interference_decades", c.features.interference_decades},
                   {"rate_scale_bps", c.features.rate_scale_bps}};
  j["training"] = {{"episodes", c.training.episodes},
                   {"batch", c.training.batch},
                   {"replay_capacity", c.training.replay_capacity},
                   {"learning_rate", c.training.learning_rate},
                   {"train_steps_per_episode", c.training.train_steps_per_episode},
                   {"reward_scale", c.training.reward_scale},
                   {"discount", c.training.discount},
                   {"seed", c.training.seed},
                   {"trunk", c.training.trunk},
                   {"value", c.training.value},
                   {"advantage", c.training.advantage}};
  j["mobility"] = {{"model", to_string(c.mobility.model)},
                   {"mobile_relays", c.mobility.mobile_relays},
                   {"max_speed_mps", c.mobility.max_speed_mps},
                   {"horizon_s", c.mobility.horizon_s},
                   {"decision_interval_s", c.mobility.decision_interval_s}};
  j["eval"] = {{"topologies", c.eval.topologies}, {"seed", c.eval.seed}, {"schemes", c.eval.schemes}};
  j["sweep"] = {{"axis", to_string(c.sweep.axis)}, {"values", c.sweep.values}};
  return j;
}

}  // namespace

void validate(const ScenarioConfig& c) {
  require(finite_positive(c.area_width_m), "area.width_m", "must be positive");
  require(finite_positive(c.area_height_m), "area.height_m", "must be positive");
  require(c.relays >= 0, "relays", "must be non-negative");
  require(c.flows >= 1, "flows", "must be at least 1");
  require(c.neighbors >= 1, "neighbors", "must be at least 1");
  require(std::isfinite(c.min_endpoint_separation_m) && c.min_endpoint_separation_m >= 0.0 &&
              c.min_endpoint_separation_m < 0.9 * std::hypot(c.area_width_m, c.area_height_m),
          "min_endpoint_separation_m", "must be non-negative and well below the area diagonal");
  require(!c.technologies.empty(), "technologies", "at least one technology is required");
  for (std::size_t i = 0; i < c.technologies.size(); ++i) {
    const std::string p = "technologies[" + std::to_string(i) + "]";
    const TechnologyConfig& t = c.technologies[i];
    require(finite_positive(t.center_freq_mhz), p + ".center_freq_mhz", "must be positive");
    require(t.subbands >= 1, p + ".subbands", "must be at least 1");
    require(finite_positive(t.path_loss.exponent), p + ".path_loss.exponent", "must be positive");
    require(!t.path_loss.reference_loss_db || std::isfinite(*t.path_loss.reference_loss_db),
            p + ".path_loss.reference_loss_db", "must be finite");
    require(std::isfinite(t.path_loss.shadowing_sigma_db) && t.path_loss.shadowing_sigma_db >= 0.0,
            p + ".path_loss.shadowing_sigma_db", "must be non-negative");
  }
  require(std::isfinite(c.tx_power_dbm), "tx_power_dbm", "must be finite");
  require(std::isfinite(c.noise_dbm), "noise.dbm", "must be finite");
  require(!c.gain_grid || !c.gain_grid->empty(), "gain_grid", "must be a non-empty path");
  require(c.policy == "dqn" || parse_baseline(c.policy).has_value(), "policy",
          "unknown value \"" + c.policy + "\", expected dqn or a baseline name");
  require(c.reestablish_rounds >= 0, "reestablish_rounds", "must be non-negative");
  require(c.hop_cap >= 0, "hop_cap", "must be non-negative (0 selects the default)");

  require(finite_positive(c.features.distance_scale_m), "features.distance_scale_m", "must be positive");
  require(std::isfinite(c.features.gain_offset_db), "features.gain_offset_db", "must be finite");
  require(finite_positive(c.features.gain_scale_db), "features.gain_scale_db", "must be positive");
  require(finite_positive(c.features.interference_decades), "features.interference_decades", "must be positive");
  require(finite_positive(c.features.rate_scale_bps), "features.rate_scale_bps", "must be positive");

  require(c.training.episodes >= 0, "training.episodes", "must be non-negative");
  require(c.training.batch >= 1, "training.batch", "must be at least 1");
  require(c.training.replay_capacity >= c.training.batch, "training.replay_capacity", "must be at least the batch size");
  require(std::isfinite(c.training.learning_rate) && c.training.learning_rate >= 0.0, "training.learning_rate",
          "must be non-negative");
  require(c.training.train_steps_per_episode >= 0, "training.train_steps_per_episode", "must be non-negative");
  require(finite_positive(c.training.reward_scale), "training.reward_scale", "must be positive");
  require(std::isfinite(c.training.discount) && c.training.discount >= 0.0 && c.training.discount <= 1.0,
          "training.discount", "must lie in [0, 1]");
  require(!c.training.trunk.empty(), "training.trunk", "needs at least one layer");
  for (const auto* widths : {&c.training.trunk, &c.training.value, &c.training.advantage}) {
    for (int w : *widths) require(w >= 1, "training", "layer widths must be positive");
  }

  require(c.mobility.mobile_relays >= 0 && c.mobility.mobile_relays <= c.relays, "mobility.mobile_relays",
          "must lie in [0, relays]");
  require(std::isfinite(c.mobility.max_speed_mps) && c.mobility.max_speed_mps >= 0.0, "mobility.max_speed_mps",
          "must be non-negative");
  require(c.mobility.horizon_s >= 1, "mobility.horizon_s", "must be at least 1");
  require(c.mobility.decision_interval_s >= 1, "mobility.decision_interval_s", "must be at least 1");

  require(c.eval.topologies >= 1, "eval.topologies", "must be at least 1");
  require(!c.eval.schemes.empty(), "eval.schemes", "needs at least one scheme");
  for (const std::string& s : c.eval.schemes) {
    require(s == "dqn" || parse_baseline(s).has_value(), "eval.schemes", "unknown scheme \"" + s + "\"");
  }
  require(!c.sweep.values.empty(), "sweep.values", "needs at least one value");
  for (int v : c.sweep.values) require(v >= 0, "sweep.values", "must be non-negative");
}

ScenarioConfig parse_scenario(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("config: invalid JSON: ") + e.what());
  }
  ScenarioConfig c = from_json(root);
  validate(c);
  return c;
}

std::string dump_scenario(const ScenarioConfig& config) { return to_json(config).dump(2) + "\n"; }

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  ScenarioConfig c = parse_scenario(ss.str());
  if (c.gain_grid && std::filesystem::path(*c.gain_grid).is_relative()) {
    c.gain_grid = (path.parent_path() / *c.gain_grid).string();
  }
  return c;
}

void save_scenario(const std::filesystem::path& path, const ScenarioConfig& config) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << dump_scenario(config);
}

ResourceSet make_resources(const ScenarioConfig& config) {
  std::vector<Technology> techs;
  for (const TechnologyConfig& t : config.technologies) techs.push_back({t.center_freq_mhz * 1e6, t.subbands});
  return ResourceSet(std::move(techs));
}

ChannelModel make_channel_model(const ScenarioConfig& config) {
  ChannelModel m;
  for (const TechnologyConfig& t : config.technologies) m.per_tech.push_back(t.path_loss);
  return m;
}

RadioParams make_radio(const ScenarioConfig& config) {
  RadioParams r = RadioParams::from_dbm(config.tx_power_dbm, config.noise_dbm, config.noise_mode);
  r.interference = config.interference;
  return r;
}

RouteOptions make_route_options(const ScenarioConfig& config) {
  return RouteOptions{config.neighbor_strategy, config.neighbors, config.hop_cap, config.include_destination};
}

dqn::QNetShape make_qnet_shape(const ScenarioConfig& config) {
  dqn::QNetShape s = dqn::QNetShape::for_neighbors(config.neighbors);
  s.trunk = config.training.trunk;
  s.value = config.training.value;
  s.advantage = config.training.advantage;
  return s;
}

dqn::TrainerConfig make_trainer_config(const ScenarioConfig& config) {
  dqn::TrainerConfig t;
  t.episodes = config.training.episodes;
  t.batch = config.training.batch;
  t.replay_capacity = config.training.replay_capacity;
  t.learning_rate = config.training.learning_rate;
  t.train_steps_per_episode = config.training.train_steps_per_episode;
  t.reward_scale = config.training.reward_scale;
  t.seed = config.training.seed;
  t.scaling = config.features;
  t.route = make_route_options(config);
  return t;
}

Topology make_topology(const ScenarioConfig& config, std::uint64_t topology_seed) {
  const Area area{config.area_width_m, config.area_height_m};
  std::mt19937_64 rng(derive_seed(topology_seed, {0x706c616365ULL}));
  std::uniform_real_distribution<double> ux(0.0, area.width);
  std::uniform_real_distribution<double> uy(0.0, area.height);
  auto point = [&] {
    const double x = ux(rng);
    const double y = uy(rng);
    return Vec3{x, y, 0.0};
  };
  std::vector<Vec3> relays;
  for (int i = 0; i < config.relays; ++i) relays.push_back(point());
  std::vector<FlowEndpoints> flows;
  for (int f = 0; f < config.flows; ++f) {
    FlowEndpoints fe;
    fe.source = point();
    int tries = 0;
    do {
      fe.destination = point();
      if (++tries > 100000) throw Error("cannot place endpoints with the requested separation");
    } while (distance(fe.source, fe.destination) < config.min_endpoint_separation_m);
    flows.push_back(fe);
  }
  return Topology(std::move(relays), std::move(flows), area, topology_seed);
}

NetworkBuilder::NetworkBuilder(ScenarioConfig config)
    : config_(std::move(config)),
      resources_(make_resources(config_)),
      radio_(make_radio(config_)),
      model_(make_channel_model(config_)) {
  validate(config_);
  if (config_.gain_grid) {
    std::ifstream in(*config_.gain_grid);
    if (!in) throw Error("cannot open gain grid " + *config_.gain_grid);
    grid_ = std::make_shared<const GainGrid>(load_gain_grid(in));
    if (grid_->resource_count() != resources_.size()) {
      throw Error("gain grid has " + std::to_string(grid_->resource_count()) + " resources but the config defines " +
                  std::to_string(resources_.size()));
    }
    if (grid_->node_count() < config_.relays + 2 * config_.flows) {
      throw Error("gain grid has fewer sites than the scenario has nodes");
    }
  }
}

NetworkState NetworkBuilder::operator()(std::uint64_t topology_seed) const {
  Topology topo = make_topology(config_, topology_seed);
  if (grid_) {
    std::vector<int> sites(static_cast<std::size_t>(grid_->node_count()));
    std::iota(sites.begin(), sites.end(), 0);
    std::mt19937_64 rng(derive_seed(topology_seed, {0x73697465ULL}));
    std::shuffle(sites.begin(), sites.end(), rng);
    sites.resize(static_cast<std::size_t>(topo.node_count()));
    topo.set_sites(std::move(sites));
    return NetworkState(std::move(topo), resources_, radio_, ChannelSource(grid_));
  }
  return NetworkState(std::move(topo), resources_, radio_, ChannelSource(model_));
}

}  // namespace hwnroute
