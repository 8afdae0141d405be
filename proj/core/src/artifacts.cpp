#include "pvdecay/artifacts.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pvdecay/error.hpp"
#include "pvdecay/random.hpp"

namespace pvdecay::artifacts {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("invalid JSON: ") + e.what());
  }
}

json stamped(const char* schema) {
  json j;
  j["schema"] = schema;
  j["version"] = kSchemaVersion;
  return j;
}

void require_schema(const json& j, const char* schema, bool optional = false) {
  if (!j.is_object()) throw DataError(std::string("expected a JSON object for ") + schema);
  if (optional && !j.contains("schema") && !j.contains("version")) return;
  if (!j.contains("schema") || j["schema"] != schema) {
    throw DataError(std::string("schema mismatch: expected ") + schema);
  }
  if (!j.contains("version") || j["version"] != kSchemaVersion) {
    throw DataError(std::string("unsupported version for ") + schema + ": expected " +
                    std::to_string(kSchemaVersion));
  }
}

template <typename T>
T get(const json& j, const char* key) {
  if (!j.contains(key)) throw DataError(std::string("missing field: ") + key);
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw DataError(std::string("bad field type: ") + key);
  }
}

template <typename T>
void get_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = get<T>(j, key);
}

circadian::HourProfile hour_array(const json& j, const char* key) {
  const auto values = get<std::vector<double>>(j, key);
  if (values.size() != kHoursPerDay) throw DataError(std::string(key) + " must have 24 entries");
  circadian::HourProfile out{};
  std::copy(values.begin(), values.end(), out.begin());
  return out;
}

json profile_fields(const circadian::CircadianProfile& p) {
  json j;
  j["m"] = p.m;
  j["c"] = p.c;
  j["m_star"] = p.m_star;
  j["t_star"] = p.t_star;
  return j;
}

circadian::CircadianProfile profile_from_fields(const json& j) {
  return circadian::CircadianProfile::make(hour_array(j, "m"), get<double>(j, "c"));
}

}  // namespace

std::string profile_to_json(const circadian::CircadianProfile& profile) {
  json j = stamped(kProfileSchema);
  j.update(profile_fields(profile));
  return dump(j);
}

circadian::CircadianProfile profile_from_json(const std::string& text) {
  const json j = parse(text);
  require_schema(j, kProfileSchema);
  return profile_from_fields(j);
}

std::string map_to_json(const circadian::DecycleResult& result) {
  json j = stamped(kMapSchema);
  j.update(profile_fields(result.profile));
  j["objective"] = result.objective;
  j["boundaries"] = result.map.boundaries();
  return dump(j);
}

circadian::DecycleResult map_from_json(const std::string& text) {
  const json j = parse(text);
  require_schema(j, kMapSchema);
  circadian::DecycleResult r;
  r.profile = profile_from_fields(j);
  r.c = r.profile.c;
  r.objective = get<double>(j, "objective");
  r.map = circadian::RedistributionMap::from_profile(r.profile);
  const auto stored = get<std::vector<double>>(j, "boundaries");
  const auto& rebuilt = r.map.boundaries();
  if (stored.size() != rebuilt.size()) throw DataError("map boundaries have the wrong length");
  for (std::size_t k = 0; k < stored.size(); ++k) {
    if (std::abs(stored[k] - rebuilt[k]) > 1e-9 * std::max(1.0, std::abs(rebuilt[k]))) {
      throw DataError("map boundaries do not match the stored profile");
    }
  }
  return r;
}

std::string params_to_json(const FittedParams& p) {
  json j = stamped(kParamsSchema);
  j["beta"] = p.params.beta();
  j["gamma"] = p.params.gamma();
  j["lambda"] = p.params.lambda();
  j["gamma_law"] = {{"m", p.law.m}, {"C", p.law.C}, {"sigma", p.law.sigma}};
  j["v1_distribution"] = {{"mu", p.v1_dist.mu}, {"sigma", p.v1_dist.sigma}};
  j["n_articles"] = p.n_articles;
  j["first_n"] = p.first_n ? json(*p.first_n) : json(nullptr);
  j["skipped_terms"] = p.skipped_terms;
  j["outliers_removed"] = p.outliers_removed;
  j["pearson"] = p.pearson;
  j["objective"] = p.objective;
  return dump(j);
}

FittedParams params_from_json(const std::string& text) {
  const json j = parse(text);
  require_schema(j, kParamsSchema);
  FittedParams p;
  p.params = model::ModelParams::make(get<double>(j, "beta"), get<double>(j, "gamma"));
  const json law = get<json>(j, "gamma_law");
  p.law = {get<double>(law, "m"), get<double>(law, "C"), get<double>(law, "sigma")};
  const json v1 = get<json>(j, "v1_distribution");
  p.v1_dist = {get<double>(v1, "mu"), get<double>(v1, "sigma")};
  p.n_articles = get<std::size_t>(j, "n_articles");
  if (j.contains("first_n") && !j["first_n"].is_null()) p.first_n = get<std::size_t>(j, "first_n");
  p.skipped_terms = get<std::size_t>(j, "skipped_terms");
  p.outliers_removed = get<std::vector<std::string>>(j, "outliers_removed");
  get_if(j, "pearson", p.pearson);
  get_if(j, "objective", p.objective);
  return p;
}

std::string sim_config_to_json(const simulate::SimConfig& c) {
  json j = stamped(kSimConfigSchema);
  j["n_articles"] = c.n_articles;
  j["beta"] = c.params.beta();
  j["gamma"] = c.params.gamma();
  j["gamma_law"] = {{"m", c.law.m}, {"C", c.law.C}, {"sigma", c.law.sigma}};
  j["v1_distribution"] = {{"mu", c.v1_dist.mu}, {"sigma", c.v1_dist.sigma}};
  j["profile"] = {{"m", c.profile.m}, {"c", c.profile.c}};
  j["seed"] = c.seed;
  j["start"] = format_iso_date(c.start);
  j["mode"] = c.mode == simulate::SimMode::poisson ? "poisson" : "per_user";
  j["title_prefix"] = c.title_prefix;
  j["front_page_title"] = c.front_page_title;
  j["project"] = c.project;
  return dump(j);
}

simulate::SimConfig sim_config_from_json(const std::string& text) {
  const json j = parse(text);
  require_schema(j, kSimConfigSchema, true);
  simulate::SimConfig c;
  get_if(j, "n_articles", c.n_articles);
  double beta = c.params.beta(), gamma = c.params.gamma();
  get_if(j, "beta", beta);
  get_if(j, "gamma", gamma);
  c.params = model::ModelParams::make(beta, gamma);
  if (j.contains("gamma_law")) {
    const json& law = j["gamma_law"];
    get_if(law, "m", c.law.m);
    get_if(law, "C", c.law.C);
    get_if(law, "sigma", c.law.sigma);
  }
  if (!(c.law.C > 0.0) || !(c.law.sigma >= 0.0)) throw DataError("gamma_law needs C > 0 and sigma >= 0");
  if (j.contains("v1_distribution")) {
    get_if(j["v1_distribution"], "mu", c.v1_dist.mu);
    get_if(j["v1_distribution"], "sigma", c.v1_dist.sigma);
  }
  if (!(c.v1_dist.sigma >= 0.0)) throw DataError("v1_distribution sigma must be >= 0");
  if (j.contains("profile")) {
    const json& p = j["profile"];
    circadian::HourProfile m = c.profile.m;
    double frac = c.profile.c;
    if (p.contains("m")) m = hour_array(p, "m");
    get_if(p, "c", frac);
    c.profile = circadian::CircadianProfile::make(m, frac);
  }
  get_if(j, "seed", c.seed);
  if (j.contains("start")) c.start = parse_iso_date(get<std::string>(j, "start"));
  if (j.contains("mode")) {
    const auto mode = get<std::string>(j, "mode");
    if (mode == "poisson") c.mode = simulate::SimMode::poisson;
    else if (mode == "per_user") c.mode = simulate::SimMode::per_user;
    else throw DataError("unknown simulation mode: " + mode);
  }
  get_if(j, "title_prefix", c.title_prefix);
  get_if(j, "front_page_title", c.front_page_title);
  get_if(j, "project", c.project);
  return c;
}

std::string truth_to_json(const simulate::SimConfig& config,
                          const std::vector<simulate::ArticleTruth>& truth) {
  json j = stamped(kTruthSchema);
  j["rng"] = rng_description();
  j["config"] = json::parse(sim_config_to_json(config));
  json articles = json::array();
  for (const auto& t : truth) {
    articles.push_back({{"title", t.title},
                        {"promoted_at", format_iso_hour(t.promoted_at)},
                        {"v1", t.v1},
                        {"gamma_s", t.gamma_s}});
  }
  j["articles"] = std::move(articles);
  return dump(j);
}

std::vector<simulate::ArticleTruth> truth_from_json(const std::string& text) {
  const json j = parse(text);
  require_schema(j, kTruthSchema);
  std::vector<simulate::ArticleTruth> out;
  for (const auto& a : get<json>(j, "articles")) {
    out.push_back({get<std::string>(a, "title"), parse_iso_hour(get<std::string>(a, "promoted_at")),
                   get<double>(a, "v1"), get<double>(a, "gamma_s")});
  }
  return out;
}

std::string mean_series_to_csv(const std::vector<double>& series) {
  std::string out = "t,views\n";
  char buf[64];
  for (std::size_t t = 0; t < series.size(); ++t) {
    const auto res = std::to_chars(buf, buf + sizeof buf, series[t]);
    out += std::to_string(t + 1) + ',' + std::string(buf, res.ptr) + '\n';
  }
  return out;
}

std::vector<double> mean_series_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<double> out;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line.rfind("t,", 0) == 0) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw DataError("mean series line " + std::to_string(line_no) + ": expected t,views");
    std::size_t t = 0;
    double v = 0.0;
    const char* end = line.data() + line.size();
    const auto a = std::from_chars(line.data(), line.data() + comma, t);
    const auto b = std::from_chars(line.data() + comma + 1, end, v);
    if (a.ec != std::errc{} || a.ptr != line.data() + comma || b.ec != std::errc{} || b.ptr != end ||
        t != out.size() + 1 || !std::isfinite(v) || v < 0.0) {
      throw DataError("mean series line " + std::to_string(line_no) + ": malformed");
    }
    out.push_back(v);
  }
  return out;
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    out << text;
    if (!out.flush()) throw DataError("write failed: " + path.string());
  }
  fs::rename(tmp, path);
}

}  // namespace pvdecay::artifacts
