#include "pft/config.hpp"

#include <fstream>
#include <sstream>

#include "pft/errors.hpp"

namespace pft {

namespace {

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  throw ParseError("config key " + key + ": expected a boolean, got '" + v + "'");
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  const auto b = s.find_last_not_of(" \t\r");
  return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
}

void apply_kv(TrackerConfig& c, const std::string& key, const std::string& val) {
  auto d = [&] { return std::stod(val); };
  auto i = [&] { return std::stoi(val); };

  if (key == "n_cnt") c.n_cnt = i();
  else if (key == "n_in") c.n_in = i();
  else if (key == "roi_margin") c.roi_margin = i();
  else if (key == "variance_cutoff") c.variance_cutoff = d();
  else if (key == "histogram_bins") c.histogram_bins = i();
  else if (key == "learn_rate_f") c.learn_rate_f = float(d());
  else if (key == "learn_rate_b") c.learn_rate_b = float(d());
  else if (key == "use_interior") c.use_interior = parse_bool(val, key);
  else if (key == "min_valid_contours") c.min_valid_contours = i();
  else if (key == "fan.a_int_deg") c.fan.a_int_deg = d();
  else if (key == "fan.candidate_threshold") c.fan.candidate_threshold = d();
  else if (key == "flow.pyramid_levels") c.flow.pyramid_levels = i();
  else if (key == "flow.patch_size") c.flow.patch_size = i();
  else if (key == "flow.patch_stride") c.flow.patch_stride = i();
  else if (key == "flow.inverse_search_iters") c.flow.inverse_search_iters = i();
  else if (key == "flow.densification") c.flow.densification = parse_bool(val, key);
  else if (key == "schedule.b2") c.schedule.b2 = d();
  else if (key == "schedule.lambda_r") c.schedule.lambda_r = d();
  else if (key == "schedule.lambda_t") c.schedule.lambda_t = d();
  else if (key == "schedule.gn_iters_per_search") c.schedule.gn_iters_per_search = i();
  else if (key.rfind("schedule.stage", 0) == 0) {
    const size_t dot = key.find('.', 14);
    if (dot == std::string::npos || dot == 14)
      throw ParseError("unknown config key: " + key);
    const int stage = std::stoi(key.substr(14, dot - 14));
    if (stage < 0 || stage >= int(c.schedule.stages.size()))
      throw ParseError("config key " + key + ": stage index out of range");
    OptimizerStage& st = c.schedule.stages[size_t(stage)];
    const std::string field = key.substr(dot + 1);
    if (field == "a_reg_deg") st.a_reg_deg = d();
    else if (field == "l_src") st.l_src = i();
    else if (field == "sigma") st.sigma_sched = d();
    else if (field == "gamma") st.gamma = d();
    else if (field == "lambda") st.lambda = d();
    else if (field == "search_iters") st.search_iters = i();
    else throw ParseError("unknown config key: " + key);
  } else {
    throw ParseError("unknown config key: " + key);
  }
}

}  // namespace

void apply_config_text(TrackerConfig& config, const std::string& text,
                       const std::string& source_name) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (trim(line).empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError(source_name + ":" + std::to_string(lineno) +
                       ": expected key = value");
    try {
      apply_kv(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const std::invalid_argument&) {
      throw ParseError(source_name + ":" + std::to_string(lineno) +
                       ": malformed value");
    }
  }
}

void apply_config_file(TrackerConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  apply_config_text(config, buf.str(), path);
}

}  // namespace pft
