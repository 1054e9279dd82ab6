#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "csbm/errors.hpp"
#include "csbm/harness.hpp"
#include "csbm/rng.hpp"

namespace csbm {

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

void write_results_csv(std::span<const ResultRow> rows, std::ostream& out, bool include_timing) {
  out << "method,param_name,param_value,accuracy,std_error,n,trials" << (include_timing ? ",wall_time_ms" : "")
      << '\n';
  for (const auto& r : rows) {
    out << r.method << ',' << r.param_name << ',' << format_double(r.param_value) << ','
        << format_double(r.accuracy) << ',' << format_double(r.std_error) << ',' << r.n << ','
        << r.trials;
    if (include_timing) out << ',' << format_double(r.wall_time_ms);
    out << '\n';
  }
}

void write_predictions_csv(const CsbmGraph& g, std::span<const Prediction> preds,
                           std::ostream& out) {
  if (preds.size() != g.num_nodes()) throw InvalidArgument("one prediction per node expected");
  out << "node,true_label,predicted_label";
  const std::size_t width = preds.empty() ? 0 : preds[0].scores.size();
  for (std::size_t c = 0; c < width; ++c) out << ",score_" << c;
  out << '\n';
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    out << v << ',' << g.label(v) << ',' << preds[v].label;
    for (double s : preds[v].scores) out << ',' << format_double(s);
    out << '\n';
  }
}

void write_estimates_csv(const ExperimentConfig& cfg, std::span<const NamedEstimate> rows,
                         std::ostream& out) {
  out << "quantity,a,b,gamma,ell,samples,mean,std_error,ci_low,ci_high,truncated\n";
  for (const auto& r : rows) {
    const auto& e = r.estimate;
    out << r.quantity << ',' << format_double(cfg.a) << ',' << format_double(cfg.b) << ','
        << format_double(cfg.feature_snr()) << ',' << cfg.radius << ',' << e.samples << ','
        << format_double(e.mean) << ',' << format_double(e.std_error) << ','
        << format_double(e.ci_low) << ',' << format_double(e.ci_high) << ',' << e.truncated
        << '\n';
  }
}

void write_census_csv(std::span<const CensusRow> rows, std::ostream& out) {
  out << "trial,n,ell,mean_degree,cycle_free_fraction,c,gate_value,hypothesis_holds\n";
  for (const auto& r : rows) {
    out << r.trial << ',' << r.n << ',' << r.radius << ',' << format_double(r.mean_degree) << ','
        << format_double(r.cycle_free_fraction) << ',' << format_double(r.depth_constant) << ','
        << format_double(r.gate_value) << ',' << (r.hypothesis_holds ? "true" : "false") << '\n';
  }
}

void write_tv_csv(const ExperimentConfig& cfg, std::span<const TvReport> reports,
                  std::ostream& out) {
  out << "n,a,b,ell,k,samples,tv,bootstrap_se,depth_warning\n";
  for (const auto& rep : reports) {
    for (const auto& p : rep.per_depth) {
      out << rep.n << ',' << format_double(cfg.a) << ',' << format_double(cfg.b) << ','
          << cfg.radius << ',' << p.k << ',' << rep.samples << ',' << format_double(p.tv) << ','
          << format_double(p.bootstrap_se) << ',' << (rep.depth_warning ? "true" : "false")
          << '\n';
    }
  }
}

void write_convergence_csv(const ConvergenceReport& report, std::ostream& out) {
  out << "n,empirical_error,empirical_se,limit_error,limit_se,gap,gap_se,trend_ok,"
         "within_tolerance\n";
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const auto& r = report.rows[i];
    bool trend_ok = true;
    if (i > 0) {
      const auto& p = report.rows[i - 1];
      trend_ok = r.gap <= p.gap + 2.0 * std::hypot(r.gap_se, p.gap_se);
    }
    out << r.n << ',' << format_double(r.empirical_error) << ','
        << format_double(r.empirical_se) << ',' << format_double(r.limit_error) << ','
        << format_double(r.limit_se) << ',' << format_double(r.gap) << ','
        << format_double(r.gap_se) << ',' << (trend_ok ? "true" : "false") << ','
        << (r.gap <= 3.0 * r.gap_se ? "true" : "false") << '\n';
  }
}

namespace {

std::string fixed2(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

}  // namespace

std::string render_svg(std::span<const ResultRow> rows) {
  constexpr double kWidth = 640, kHeight = 400;
  constexpr double kLeft = 60, kRight = 150, kTop = 20, kBottom = 50;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;

  std::map<std::string, std::vector<const ResultRow*>> series;
  double x_min = 0.0, x_max = 1.0;
  bool first = true;
  for (const auto& r : rows) {
    series[r.method].push_back(&r);
    if (first) {
      x_min = x_max = r.param_value;
      first = false;
    }
    x_min = std::min(x_min, r.param_value);
    x_max = std::max(x_max, r.param_value);
  }
  if (x_max == x_min) {
    x_min -= 0.5;
    x_max += 0.5;
  }
  const auto px = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * plot_w; };
  const auto py = [&](double y) { return kTop + (1.0 - std::clamp(y, 0.0, 1.0)) * plot_h; };
  const std::string x_label = rows.empty() ? std::string("value") : rows.front().param_name;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed2(kWidth) << "\" height=\""
      << fixed2(kHeight) << "\" viewBox=\"0 0 " << fixed2(kWidth) << ' ' << fixed2(kHeight)
      << "\">\n";
  svg << "<rect x=\"0.00\" y=\"0.00\" width=\"" << fixed2(kWidth) << "\" height=\""
      << fixed2(kHeight) << "\" fill=\"white\"/>\n";
  svg << "<g stroke=\"black\" stroke-width=\"1\">\n";
  svg << "<line x1=\"" << fixed2(kLeft) << "\" y1=\"" << fixed2(kTop + plot_h) << "\" x2=\""
      << fixed2(kLeft + plot_w) << "\" y2=\"" << fixed2(kTop + plot_h) << "\"/>\n";
  svg << "<line x1=\"" << fixed2(kLeft) << "\" y1=\"" << fixed2(kTop) << "\" x2=\""
      << fixed2(kLeft) << "\" y2=\"" << fixed2(kTop + plot_h) << "\"/>\n";
  svg << "</g>\n";
  svg << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int i = 0; i <= 4; ++i) {
    const double y = i / 4.0;
    svg << "<text x=\"" << fixed2(kLeft - 8) << "\" y=\"" << fixed2(py(y) + 4)
        << "\" text-anchor=\"end\">" << fixed2(y) << "</text>\n";
    const double x = x_min + (x_max - x_min) * i / 4.0;
    svg << "<text x=\"" << fixed2(px(x)) << "\" y=\"" << fixed2(kTop + plot_h + 18)
        << "\" text-anchor=\"middle\">" << fixed2(x) << "</text>\n";
  }
  svg << "<text x=\"" << fixed2(kLeft + plot_w / 2) << "\" y=\"" << fixed2(kHeight - 10)
      << "\" text-anchor=\"middle\">" << xml_escape(x_label) << "</text>\n";
  svg << "<text x=\"15.00\" y=\"" << fixed2(kTop + plot_h / 2)
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 15.00 " << fixed2(kTop + plot_h / 2)
      << ")\">accuracy</text>\n";
  svg << "</g>\n";

  std::size_t index = 0;
  for (auto& [method, pts] : series) {
    std::stable_sort(pts.begin(), pts.end(), [](const ResultRow* p, const ResultRow* q) {
      return p->param_value < q->param_value;
    });
    const char* colour = kPalette[index % std::size(kPalette)];
    svg << "<g class=\"series\" data-method=\"" << xml_escape(method) << "\" stroke=\"" << colour
        << "\" fill=\"" << colour << "\">\n";
    svg << "<polyline fill=\"none\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      svg << (i ? " " : "") << fixed2(px(pts[i]->param_value)) << ','
          << fixed2(py(pts[i]->accuracy));
    }
    svg << "\"/>\n";
    for (const auto* p : pts) {
      const double x = px(p->param_value);
      const double half = 1.96 * p->std_error;
      svg << "<line x1=\"" << fixed2(x) << "\" y1=\"" << fixed2(py(p->accuracy - half))
          << "\" x2=\"" << fixed2(x) << "\" y2=\"" << fixed2(py(p->accuracy + half)) << "\"/>\n";
      svg << "<circle cx=\"" << fixed2(x) << "\" cy=\"" << fixed2(py(p->accuracy))
          << "\" r=\"3.00\"/>\n";
    }
    svg << "</g>\n";
    const double ly = kTop + 10 + 18.0 * static_cast<double>(index);
    const double lx = kWidth - kRight + 15;
    svg << "<g class=\"legend\">\n<line x1=\"" << fixed2(lx) << "\" y1=\"" << fixed2(ly)
        << "\" x2=\"" << fixed2(lx + 20) << "\" y2=\"" << fixed2(ly) << "\" stroke=\"" << colour
        << "\" stroke-width=\"2\"/>\n<text x=\"" << fixed2(lx + 26) << "\" y=\"" << fixed2(ly + 4)
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << xml_escape(method)
        << "</text>\n</g>\n";
    ++index;
  }
  svg << "</svg>\n";
  return svg.str();
}

void emit_svg(std::span<const ResultRow> rows, const std::filesystem::path& path) {
  if (rows.empty()) throw InvalidArgument("no rows to chart");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write '" + path.string() + "'");
  out << render_svg(rows);
  if (!out) throw InvalidArgument("failed writing '" + path.string() + "'");
}

namespace {

void require_binary(const ExperimentConfig& cfg, std::string_view command) {
  if (cfg.num_classes != 2 || !cfg.rates_path.empty() || !cfg.means_path.empty()) {
    throw ConfigError("C", std::string(command) + " needs the symmetric binary model");
  }
}

MonteCarloOptions mc_options(const ExperimentConfig& cfg, unsigned threads) {
  MonteCarloOptions opt;
  opt.samples = cfg.samples;
  opt.seed = derive_seed(cfg.seed, "limit", 0);
  opt.population_cap = cfg.population_cap;
  opt.threads = threads;
  return opt;
}

}  // namespace

void run_command(std::string_view command, const ExperimentConfig& cfg, std::ostream& out,
                 unsigned threads) {
  cfg.validate();
  if (command == "generate") {
    write_graph(sample_trial_graph(cfg, 0), out);
  } else if (command == "classify") {
    const auto g = cfg.graph_path.empty() ? sample_trial_graph(cfg, 0)
                                          : read_graph(std::filesystem::path(cfg.graph_path));
    const auto preds = predict_all(cfg, cfg.method, g, threads);
    write_predictions_csv(g, preds, out);
  } else if (command == "evaluate") {
    write_results_csv(run_experiment(cfg, threads), out);
  } else if (command == "sweep") {
    if (!cfg.sweep) throw ConfigError("sweep", "required by the sweep command");
    const auto rows = sweep(cfg, cfg.sweep->parameter, cfg.sweep->values, threads);
    write_results_csv(rows, out);
    if (!cfg.svg_path.empty()) emit_svg(rows, cfg.svg_path);
  } else if (command == "limit-error") {
    require_binary(cfg, command);
    const auto opt = mc_options(cfg, threads);
    const double gamma = cfg.feature_snr();
    std::vector<NamedEstimate> rows;
    rows.push_back({"optimal_limit", limit_error_mc(cfg.a, cfg.b, gamma, cfg.radius, opt)});
    const auto gcn = gcn_error_mc(cfg.a, cfg.b, gamma, opt);
    rows.push_back({"feature_only", ErrorEstimate::exact(gcn.feature_only_error)});
    rows.push_back({"gcn_limit", gcn.estimate});
    if (cfg.a == 0.0 || cfg.b == 0.0) {
      rows.push_back({"extreme_limit", extreme_error_mc(cfg.a, cfg.b, gamma, cfg.radius, opt)});
    }
    write_estimates_csv(cfg, rows, out);
  } else if (command == "census") {
    write_census_csv(census(cfg, threads), out);
  } else if (command == "tv") {
    require_binary(cfg, command);
    const std::vector<std::size_t> ns = cfg.n_list.empty() ? std::vector<std::size_t>{cfg.n}
                                                          : cfg.n_list;
    TvOptions opt;
    opt.samples = cfg.tv_samples;
    opt.bootstrap = cfg.bootstrap;
    opt.seed = cfg.seed;
    opt.population_cap = cfg.population_cap;
    opt.threads = threads;
    std::vector<TvReport> reports;
    for (std::size_t n : ns) reports.push_back(empirical_tv_shells(n, cfg.a, cfg.b, cfg.radius, opt));
    write_tv_csv(cfg, reports, out);
  } else if (command == "convergence") {
    const std::vector<std::size_t> ns = cfg.n_list.empty() ? std::vector<std::size_t>{cfg.n}
                                                          : cfg.n_list;
    write_convergence_csv(convergence_check(cfg, ns, threads), out);
  } else {
    throw InvalidArgument("unknown command '" + std::string(command) + "'");
  }
}

}  // namespace csbm
