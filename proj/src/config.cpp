#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "csbm/errors.hpp"
#include "csbm/harness.hpp"

namespace csbm {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  text = trim(text);
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError(std::string(key), "'" + std::string(text) + "' is not a valid number");
  }
  return value;
}

template <typename T>
std::vector<T> parse_list(std::string_view key, std::string_view text) {
  std::vector<T> out;
  text = trim(text);
  if (text.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    out.push_back(parse_number<T>(key, text.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<std::string> parse_names(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    const auto item = trim(text.substr(start, comma - start));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view text) {
  text = trim(text);
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError(std::string(key), "expected true or false");
}

// Whitespace- or comma-separated numeric rows.
std::vector<std::vector<double>> read_matrix(const std::string& field, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(field, "cannot open '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    for (auto& ch : line) {
      if (ch == ',') ch = ' ';
    }
    std::istringstream ls(line);
    std::vector<double> row;
    std::string tok;
    while (ls >> tok) row.push_back(parse_number<double>(field, tok));
    if (!row.empty()) rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  std::set<std::string> seen;
  std::optional<double> gamma, graph_snr;
  bool d_given = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? nl : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (!seen.insert(key).second) throw ConfigError(key, "given more than once");

    if (key == "n") cfg.n = parse_number<std::size_t>(key, value);
    else if (key == "d") {
      cfg.d = parse_number<std::size_t>(key, value);
      d_given = true;
    } else if (key == "C") cfg.num_classes = parse_number<std::size_t>(key, value);
    else if (key == "a") cfg.a = parse_number<double>(key, value);
    else if (key == "b") cfg.b = parse_number<double>(key, value);
    else if (key == "rates") cfg.rates_path = std::string(value);
    else if (key == "mu") cfg.mu = parse_list<double>(key, value);
    else if (key == "means") cfg.means_path = std::string(value);
    else if (key == "sigma") cfg.sigma = parse_number<double>(key, value);
    else if (key == "ell") cfg.radius = parse_number<int>(key, value);
    else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "trials") cfg.trials = parse_number<std::size_t>(key, value);
    else if (key == "methods") cfg.methods = parse_names(value);
    else if (key == "sweep") {
      if (!cfg.sweep) cfg.sweep.emplace();
      cfg.sweep->parameter = std::string(value);
    } else if (key == "sweep_values") {
      if (!cfg.sweep) cfg.sweep.emplace();
      cfg.sweep->values = parse_list<double>(key, value);
    } else if (key == "degree_sum") cfg.degree_sum = parse_number<double>(key, value);
    else if (key == "heterophily") cfg.heterophily = parse_bool(key, value);
    else if (key == "samples") cfg.samples = parse_number<std::size_t>(key, value);
    else if (key == "tv_samples") cfg.tv_samples = parse_number<std::size_t>(key, value);
    else if (key == "bootstrap") cfg.bootstrap = parse_number<std::size_t>(key, value);
    else if (key == "n_list") cfg.n_list = parse_list<std::size_t>(key, value);
    else if (key == "population_cap") cfg.population_cap = parse_number<std::int64_t>(key, value);
    else if (key == "graph") cfg.graph_path = std::string(value);
    else if (key == "method") cfg.method = std::string(value);
    else if (key == "svg") cfg.svg_path = std::string(value);
    else if (key == "gamma") gamma = parse_number<double>(key, value);
    else if (key == "Gamma") graph_snr = parse_number<double>(key, value);
    else throw ConfigError(key, "unknown key");
  }

  if (!cfg.mu.empty() && !d_given) cfg.d = cfg.mu.size();
  if (cfg.mu.empty() && cfg.d > 0) {
    cfg.mu.assign(cfg.d, 0.0);
    cfg.mu[0] = 1.0;
  }
  if (graph_snr) cfg.set_graph_snr(*graph_snr);
  if (gamma) cfg.set_feature_snr(*gamma);
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void ExperimentConfig::set_feature_snr(double gamma) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ConfigError("gamma", "must be >= 0");
  double norm = 0.0;
  for (double m : mu) norm += m * m;
  norm = std::sqrt(norm);
  if (gamma > 0.0 && norm == 0.0) throw ConfigError("mu", "zero direction cannot carry gamma > 0");
  for (double& m : mu) m = gamma == 0.0 ? 0.0 : m * (gamma * sigma / norm);
}

void ExperimentConfig::set_graph_snr(double graph_snr) {
  if (!(graph_snr >= 0.0 && graph_snr <= 1.0)) throw ConfigError("Gamma", "must lie in [0, 1]");
  if (!rates_path.empty()) throw ConfigError("Gamma", "cannot be combined with a rate matrix file");
  if (!(degree_sum > 0.0) || !std::isfinite(degree_sum)) {
    throw ConfigError("degree_sum", "must be > 0 to solve (a, b) from Gamma");
  }
  const double hi = degree_sum * (1.0 + graph_snr) / 2.0;
  const double lo = degree_sum * (1.0 - graph_snr) / 2.0;
  a = heterophily ? lo : hi;
  b = heterophily ? hi : lo;
}

double ExperimentConfig::feature_snr() const {
  double norm = 0.0;
  for (double m : mu) norm += m * m;
  return std::sqrt(norm) / sigma;
}

void ExperimentConfig::validate() const {
  if (n < 1) throw ConfigError("n", "must be >= 1");
  if (num_classes < 2) throw ConfigError("C", "must be >= 2");
  if (d < 1) throw ConfigError("d", "must be >= 1");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ConfigError("sigma", "must be > 0");
  if (radius < 0) throw ConfigError("ell", "must be >= 0");
  if (trials < 1) throw ConfigError("trials", "must be >= 1");
  if (samples < 1) throw ConfigError("samples", "must be >= 1");
  if (population_cap < 1) throw ConfigError("population_cap", "must be >= 1");
  if (!(a >= 0.0) || !std::isfinite(a)) throw ConfigError("a", "must be >= 0");
  if (!(b >= 0.0) || !std::isfinite(b)) throw ConfigError("b", "must be >= 0");
  if (rates_path.empty()) {
    if (num_classes != 2) throw ConfigError("rates", "required when C > 2");
    if (!(a + b > 0.0)) throw ConfigError("a", "a + b must be > 0");
    if (std::max(a, b) > static_cast<double>(n)) {
      throw ConfigError("a", "edge rates above n give probabilities above 1");
    }
  }
  if (num_classes > 2 && means_path.empty()) throw ConfigError("means", "required when C > 2");
  if (mu.size() != d) throw ConfigError("mu", "length must equal d");
  if (methods.empty()) throw ConfigError("methods", "at least one method is required");
  std::set<std::string> unique;
  for (const auto& m : methods) {
    if (std::find(kMethodNames.begin(), kMethodNames.end(), m) == kMethodNames.end()) {
      throw ConfigError("methods", "unknown method '" + m + "'");
    }
    if (!unique.insert(m).second) throw ConfigError("methods", "duplicate method '" + m + "'");
    if ((m == "binary_optimal" || m == "gcn") && num_classes != 2) {
      throw ConfigError("methods", "'" + m + "' needs C = 2");
    }
  }
  if (std::find(kMethodNames.begin(), kMethodNames.end(), method) == kMethodNames.end()) {
    throw ConfigError("method", "unknown method '" + method + "'");
  }
  if (sweep) {
    if (sweep->parameter != "gamma" && sweep->parameter != "Gamma") {
      throw ConfigError("sweep", "parameter must be 'gamma' or 'Gamma'");
    }
    if (sweep->values.empty()) throw ConfigError("sweep_values", "must not be empty");
    for (double v : sweep->values) {
      if (sweep->parameter == "Gamma" && !(v >= 0.0 && v <= 1.0)) {
        throw ConfigError("sweep_values", "Gamma values must lie in [0, 1]");
      }
      if (sweep->parameter == "gamma" && !(v >= 0.0 && std::isfinite(v))) {
        throw ConfigError("sweep_values", "gamma values must be >= 0");
      }
    }
    if (sweep->parameter == "Gamma") {
      if (!rates_path.empty()) throw ConfigError("sweep", "Gamma sweeps need the binary a, b model");
      if (!(degree_sum > 0.0)) throw ConfigError("degree_sum", "must be > 0 for Gamma sweeps");
      if (degree_sum > static_cast<double>(n)) {
        throw ConfigError("degree_sum", "Gamma sweep would push an edge rate above n");
      }
    }
  }
  for (std::size_t i = 1; i < n_list.size(); ++i) {
    if (n_list[i] <= n_list[i - 1]) throw ConfigError("n_list", "must be strictly ascending");
  }
}

EdgeRateMatrix ExperimentConfig::rates() const {
  if (rates_path.empty()) return EdgeRateMatrix::binary(a, b);
  const auto rows = read_matrix("rates", rates_path);
  if (rows.size() != num_classes) throw ConfigError("rates", "expected C rows");
  std::vector<double> flat;
  for (const auto& r : rows) {
    if (r.size() != num_classes) throw ConfigError("rates", "expected C columns per row");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  try {
    return EdgeRateMatrix(num_classes, std::move(flat));
  } catch (const InvalidArgument& e) {
    throw ConfigError("rates", e.what());
  }
}

std::unique_ptr<FeatureModel> ExperimentConfig::feature_model() const {
  if (means_path.empty()) {
    return std::make_unique<GaussianFeatureModel>(GaussianFeatureModel::binary_symmetric(mu, sigma));
  }
  auto means = read_matrix("means", means_path);
  if (means.size() != num_classes) throw ConfigError("means", "expected C rows");
  for (const auto& m : means) {
    if (m.size() != d) throw ConfigError("means", "expected d columns per row");
  }
  return std::make_unique<GaussianFeatureModel>(std::move(means), sigma);
}

}  // namespace csbm
