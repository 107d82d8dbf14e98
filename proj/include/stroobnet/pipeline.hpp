#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "stroobnet/io.hpp"
#include "stroobnet/metrics.hpp"
#include "stroobnet/network.hpp"
#include "stroobnet/planner.hpp"
#include "stroobnet/serialize.hpp"

namespace stroobnet::cli {

struct Options {
  std::string observers_path;
  std::string events_path;
  std::string types_path;
  std::string bbox_text;
  std::string plan_path;
  double radius_km = kDefaultRadiusKm;
  std::size_t insert_count = kDefaultInsertCount;
  std::uint64_t seed = 0;
  std::optional<double> eps_km;
  std::size_t min_pts = kDefaultMinPts;
  std::optional<std::size_t> k;
  std::size_t max_iters = kDefaultMaxIters;
  double bin_size_deg = kDefaultBinSizeDeg;
  std::size_t bin_width = 1;
  std::string out_dir;
  std::string format = "json";
  std::string strategy = "proximal_recurrence";
  std::string strategies = "proximal_recurrence,kmeans,dbscan,mode,grid";
  std::string mode = "batch";
  unsigned workers = 0;
  // synth
  std::size_t n_observers = 50;
  std::size_t n_background = 1000;
  std::size_t n_clusters = 5;
  std::size_t cluster_size = 20;
  double spread_km = 0.05;
};

inline BoundingBox parse_bbox(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    auto d = csv::parse_double(part);
    if (!d) throw Error(ErrorCode::ValidationError, "bbox value '" + part + "'");
    v.push_back(*d);
  }
  if (v.size() != 4) throw Error(ErrorCode::ValidationError, "bbox needs min_lat,min_lon,max_lat,max_lon");
  return {v[0], v[1], v[2], v[3]};
}

/// Default synthetic region: roughly a 16 x 19 km city extent.
inline constexpr BoundingBox kDefaultSynthBox{29.90, -90.15, 30.05, -89.95};

class Runner {
 public:
  Runner(const Options& opt, std::ostream& out) : opt_(opt), out_(out) {}

  NetworkConfig config() const { return make_config(opt_.radius_km, opt_.insert_count); }

  StrategyParams params() const {
    StrategyParams p;
    p.k = opt_.k;
    p.max_iters = opt_.max_iters;
    p.eps_km = opt_.eps_km;
    p.min_pts = opt_.min_pts;
    p.bin_size_deg = opt_.bin_size_deg;
    return p;
  }

  Workers workers() const { return Workers{opt_.workers}; }

  void require_inputs() const {
    if (opt_.observers_path.empty()) throw Error(ErrorCode::ValidationError, "--observers is required");
    if (opt_.events_path.empty()) throw Error(ErrorCode::ValidationError, "--events is required");
  }

  std::vector<ObserverNode> observers() {
    require_inputs();
    auto [nodes, report] = load_observers_csv(opt_.observers_path);
    observer_report_ = report;
    return nodes;
  }

  std::vector<EventNode> events() {
    require_inputs();
    auto [nodes, report] = load_events_csv(opt_.events_path);
    event_report_ = report;
    std::set<std::string> allow;
    if (!opt_.types_path.empty()) {
      std::ifstream in(opt_.types_path);
      if (!in) throw Error(ErrorCode::Unreadable, opt_.types_path);
      allow = load_type_allowlist(in);
    }
    std::optional<BoundingBox> bbox;
    if (!opt_.bbox_text.empty()) bbox = parse_bbox(opt_.bbox_text);
    return filter_events(nodes, allow, bbox);
  }

  NetworkState state() {
    const auto cfg = config();
    return init_stroobnet(observers(), events(), cfg, workers());
  }

  /// Writes `content` to out_dir/name, or to the output stream when no
  /// directory was given.
  void emit(const std::string& name, const std::string& content) {
    if (opt_.out_dir.empty()) {
      out_ << content;
    } else {
      write_file_atomic(std::filesystem::path(opt_.out_dir) / name, content);
    }
  }

  bool csv_format() const {
    if (opt_.format != "json" && opt_.format != "csv") {
      throw Error(ErrorCode::ValidationError, "format must be json or csv");
    }
    return opt_.format == "csv";
  }

  int ingest() {
    observers();
    events();
    emit("ingest.json", dump({{"observers", to_json(observer_report_)},
                              {"events", to_json(event_report_)}}));
    return 0;
  }

  int build() {
    emit("state.json", dump(to_json(summarize(state()))));
    return 0;
  }

  int classify() {
    const auto s = state();
    if (csv_format()) {
      std::string text = "index,id,status\n";
      std::vector<std::pair<std::size_t, bool>> rows;
      for (auto e : s.observed()) rows.emplace_back(e, true);
      for (auto e : s.unobserved()) rows.emplace_back(e, false);
      std::sort(rows.begin(), rows.end());
      for (auto [e, seen] : rows) {
        text += std::to_string(e) + "," + csv::escape(s.events()[e].id) + "," +
                (seen ? "observed" : "unobserved") + "\n";
      }
      emit("classification.csv", text);
    } else {
      emit("classification.json", dump(classification_json(s)));
    }
    return 0;
  }

  int plan() {
    const auto s = state();
    const auto p = plan_insertions(s, parse_strategy(opt_.strategy), params(), config(),
                                   parse_mode(opt_.mode), opt_.seed, workers());
    emit("plan.json", dump(to_json(p)));
    return 0;
  }

  InsertionPlan load_plan() const {
    if (opt_.plan_path.empty()) throw Error(ErrorCode::ValidationError, "--plan is required");
    std::ifstream in(opt_.plan_path);
    if (!in) throw Error(ErrorCode::Unreadable, opt_.plan_path);
    try {
      return plan_from_json(Json::parse(in));
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::Unreadable, opt_.plan_path + ": " + e.what());
    }
  }

  int apply() {
    const auto s = state();
    const auto p = load_plan();
    auto [after, report] = apply_insertions(s, p, config(), workers());
    if (opt_.out_dir.empty()) {
      emit("", dump({{"report", to_json(report)}, {"after_state", to_json(summarize(after))}}));
    } else {
      emit("report.json", dump(to_json(report)));
      emit("state_after.json", dump(to_json(summarize(after))));
    }
    return 0;
  }

  int compare() {
    const auto s = state();
    const auto cfg = config();
    std::vector<Strategy> strategies;
    std::stringstream ss(opt_.strategies);
    std::string name;
    while (std::getline(ss, name, ',')) {
      name = csv::trim(name);
      if (!name.empty()) strategies.push_back(parse_strategy(name));
    }
    if (strategies.empty()) throw Error(ErrorCode::ValidationError, "no strategies given");

    Json rows = Json::array();
    std::string table =
        "strategy,inserted,observed_before,observed_after,observed_delta,fraction_before,"
        "fraction_after,mean_before,mean_after,inserted_mean\n";
    for (auto strategy : strategies) {
      const auto p = plan_insertions(s, strategy, params(), cfg, parse_mode(opt_.mode), opt_.seed,
                                     workers());
      auto [after, report] = apply_insertions(s, p, cfg, workers());
      const auto shift = shift_summary(s.centrality(), report.new_node_degrees);
      rows.push_back({{"strategy", to_string(strategy)},
                      {"inserted", p.new_observers.size()},
                      {"observed_delta", report.observed_delta},
                      {"before", to_json(report.before)},
                      {"after", to_json(report.after)},
                      {"new_node_degrees", report.new_node_degrees},
                      {"shift", to_json(shift)}});
      auto num = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.9g", v);
        return std::string(buf);
      };
      table += std::string(to_string(strategy)) + "," + std::to_string(p.new_observers.size()) +
               "," + std::to_string(report.before.observed) + "," +
               std::to_string(report.after.observed) + "," + std::to_string(report.observed_delta) +
               "," + num(report.before.fraction_observed) + "," +
               num(report.after.fraction_observed) + "," + num(shift.mean_before) + "," +
               num(shift.mean_after) + "," +
               (shift.inserted_mean ? num(*shift.inserted_mean) : std::string()) + "\n";
    }
    Json doc = {{"seed", opt_.seed},
                {"mode", opt_.mode},
                {"radius_km", round_sig9(cfg.radius_km)},
                {"insert_count", cfg.insert_count},
                {"state_fingerprint", fingerprint(s)},
                {"strategies", rows}};
    if (csv_format()) {
      emit("compare.csv", table);
    } else {
      emit("compare.json", dump(doc));
    }
    return 0;
  }

  int report() {
    const auto s = state();
    const bool as_csv = csv_format();
    const auto cov = coverage_stats(s);
    std::vector<DegreeHistogram> histograms{
        degree_histogram(s.centrality(), opt_.bin_width, HistogramSource::Original)};
    std::optional<InsertionReport> insertion;
    if (!opt_.plan_path.empty()) {
      const auto p = load_plan();
      auto [after, r] = apply_insertions(s, p, config(), workers());
      if (!r.new_node_degrees.empty()) {
        histograms.push_back(
            degree_histogram(r.new_node_degrees, opt_.bin_width, HistogramSource::Inserted));
        auto combined = s.centrality();
        combined.insert(combined.end(), r.new_node_degrees.begin(), r.new_node_degrees.end());
        histograms.push_back(degree_histogram(combined, opt_.bin_width, HistogramSource::Combined));
      }
      insertion = std::move(r);
    }

    if (opt_.out_dir.empty()) {
      if (as_csv) {
        for (const auto& h : histograms) out_ << histogram_csv(h);
      } else {
        Json hs = Json::array();
        for (const auto& h : histograms) hs.push_back(to_json(h));
        Json doc = {{"coverage", to_json(cov)}, {"histograms", hs}};
        if (insertion) doc["insertion"] = to_json(*insertion);
        out_ << dump(doc);
      }
      return 0;
    }
    for (const auto& h : histograms) {
      const std::string base = "histogram_" + std::string(to_string(h.source));
      if (as_csv) {
        emit(base + ".csv", histogram_csv(h));
      } else {
        emit(base + ".json", dump(to_json(h)));
      }
    }
    if (as_csv) {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.9g", cov.fraction_observed);
      emit("coverage.csv", "observed,unobserved,fraction_observed\n" + std::to_string(cov.observed) +
                               "," + std::to_string(cov.unobserved) + "," + buf + "\n");
    } else {
      emit("coverage.json", dump(to_json(cov)));
    }
    if (insertion) emit("report.json", dump(to_json(*insertion)));
    return 0;
  }

  int synth() {
    if (opt_.out_dir.empty()) throw Error(ErrorCode::ValidationError, "synth needs --out-dir");
    SyntheticSpec spec;
    spec.seed = opt_.seed;
    spec.n_observers = opt_.n_observers;
    spec.n_background_events = opt_.n_background;
    spec.bounding_box = opt_.bbox_text.empty() ? kDefaultSynthBox : parse_bbox(opt_.bbox_text);
    spec.planted_clusters = random_planted_clusters(spec.bounding_box, opt_.n_clusters,
                                                    opt_.cluster_size, opt_.spread_km, opt_.seed);
    const auto data = synth_generate(spec);
    std::ostringstream obs, evs;
    write_observers_csv(obs, data.observers);
    write_events_csv(evs, data.events);
    emit("observers.csv", obs.str());
    emit("events.csv", evs.str());
    emit("ground_truth.json", dump(to_json(data)));
    return 0;
  }

 private:
  const Options& opt_;
  std::ostream& out_;
  IngestReport observer_report_;
  IngestReport event_report_;
};

inline void add_common(CLI::App* sub, Options& opt) {
  sub->add_option("--observers", opt.observers_path, "Observer CSV");
  sub->add_option("--events", opt.events_path, "Event CSV");
  sub->add_option("--types", opt.types_path, "Event type allowlist file (one code per line)");
  sub->add_option("--bbox", opt.bbox_text, "min_lat,min_lon,max_lat,max_lon");
  sub->add_option("--radius-km", opt.radius_km, "Observation radius in km");
  sub->add_option("--insert-count", opt.insert_count, "Number of observers to insert");
  sub->add_option("--seed", opt.seed, "Random seed");
  sub->add_option("--eps-km", opt.eps_km, "DBSCAN eps (default: radius)");
  sub->add_option("--min-pts", opt.min_pts, "DBSCAN min points");
  sub->add_option("--k", opt.k, "k-means k (default: insert count)");
  sub->add_option("--max-iters", opt.max_iters, "k-means iteration cap");
  sub->add_option("--bin-size-deg", opt.bin_size_deg, "Grid bin side in degrees");
  sub->add_option("--out-dir", opt.out_dir, "Directory for emitted artifacts (default: stdout)");
  sub->add_option("--format", opt.format, "json or csv");
  sub->add_option("--workers", opt.workers, "Worker threads (0 = hardware)");
}

/// Runs one CLI invocation. args excludes the program name. Errors are
/// written to `err` as a JSON record and mapped to the exit code.
inline int run_pipeline(const std::vector<std::string>& args, std::ostream& out = std::cout,
                        std::ostream& err = std::cerr) {
  Options opt;
  CLI::App app{"Observer placement on ranged observer-observable networks", "stroobnet_cli"};
  app.require_subcommand(1);

  auto* ingest = app.add_subcommand("ingest", "Validate input files and print ingest reports");
  auto* build = app.add_subcommand("build", "Build the network and emit a state summary");
  auto* classify = app.add_subcommand("classify", "Emit the observed/unobserved event listing");
  auto* plan = app.add_subcommand("plan", "Plan new observer placements");
  auto* apply = app.add_subcommand("apply", "Apply a plan and emit the insertion report");
  auto* compare = app.add_subcommand("compare", "Run several strategies from one state");
  auto* report = app.add_subcommand("report", "Emit degree histograms and coverage");
  auto* synth = app.add_subcommand("synth", "Generate a synthetic fixture");
  for (auto* sub : {ingest, build, classify, plan, apply, compare, report, synth}) {
    add_common(sub, opt);
  }
  plan->add_option("--strategy", opt.strategy, "proximal_recurrence|kmeans|dbscan|mode|grid");
  plan->add_option("--mode", opt.mode, "batch|iterative");
  apply->add_option("--plan", opt.plan_path, "Plan JSON from `plan`")->required();
  compare->add_option("--strategies", opt.strategies, "Comma-separated strategy list");
  compare->add_option("--mode", opt.mode, "batch|iterative");
  report->add_option("--plan", opt.plan_path, "Optional plan JSON for inserted histograms");
  report->add_option("--bin-width", opt.bin_width, "Histogram bin width");
  synth->add_option("--n-observers", opt.n_observers, "Uniform observers");
  synth->add_option("--n-background", opt.n_background, "Uniform background events");
  synth->add_option("--clusters", opt.n_clusters, "Planted clusters");
  synth->add_option("--cluster-size", opt.cluster_size, "Events per planted cluster");
  synth->add_option("--spread-km", opt.spread_km, "Planted cluster spread");

  auto error_record = [&](std::string_view code, const std::string& detail, int exit_code) {
    err << Json{{"error", code}, {"detail", detail}, {"exit_code", exit_code}}.dump() << "\n";
    return exit_code;
  };

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    return error_record("UsageError", e.what(), 3);
  }

  try {
    Runner runner(opt, out);
    if (*ingest) return runner.ingest();
    if (*build) return runner.build();
    if (*classify) return runner.classify();
    if (*plan) return runner.plan();
    if (*apply) return runner.apply();
    if (*compare) return runner.compare();
    if (*report) return runner.report();
    if (*synth) return runner.synth();
  } catch (const Error& e) {
    return error_record(to_string(e.code()), e.detail(), exit_code_for(e.code()));
  } catch (const std::exception& e) {
    return error_record("InternalError", e.what(), 4);
  }
  return 4;
}

}  // namespace stroobnet::cli
