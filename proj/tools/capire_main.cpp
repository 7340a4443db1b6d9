#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "capire/centrality.hpp"
#include "capire/csv.hpp"
#include "capire/curriculum.hpp"
#include "capire/errors.hpp"
#include "capire/experiment.hpp"
#include "capire/feature_matrix.hpp"
#include "capire/panel.hpp"
#include "capire/structural_features.hpp"
#include "capire/synth.hpp"
#include "digest.hpp"

#ifndef CAPIRE_VERSION
#define CAPIRE_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

std::string read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw capire::InputError(path, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Collects inputs, outputs and counts for the run manifest.
class Run {
 public:
  Run(std::string command, std::string out_dir) : command_(std::move(command)), out_dir_(std::move(out_dir)) {}

  void input(const std::string& path) {
    const auto bytes = read_bytes(path);
    inputs_.push_back({{"path", path}, {"bytes", bytes.size()}, {"sha256", capire::tools::sha256_hex(bytes)}});
  }

  void output(const std::string& name, const std::string& content) {
    fs::create_directories(out_dir_);
    const auto path = (fs::path(out_dir_) / name).string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw capire::InputError(path, "cannot write file");
    out << content;
    if (!out) throw capire::InputError(path, "write failed");
    outputs_.push_back({{"path", path}, {"bytes", content.size()}, {"sha256", capire::tools::sha256_hex(content)}});
  }

  Json& config() { return config_; }
  Json& counts() { return counts_; }
  void seed(std::uint64_t s) { seed_ = s; }
  void warn(const std::string& message) {
    warnings_.push_back(message);
    std::cerr << "warning: " << message << "\n";
  }

  void finish() {
    Json m;
    m["tool"] = "capire";
    m["version"] = CAPIRE_VERSION;
    m["command"] = command_;
    m["inputs"] = inputs_;
    m["config"] = config_;
    m["seed"] = seed_ ? Json(*seed_) : Json(nullptr);
    m["counts"] = counts_;
    m["warnings"] = warnings_;
    m["outputs"] = outputs_;
    m["timestamp"] = utc_timestamp();
    fs::create_directories(out_dir_);
    const auto path = (fs::path(out_dir_) / "manifest.json").string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw capire::InputError(path, "cannot write file");
    out << m.dump(2) << "\n";
    std::cout << "manifest: " << path << "\n";
  }

 private:
  std::string command_;
  std::string out_dir_;
  Json inputs_ = Json::array();
  Json outputs_ = Json::array();
  Json config_ = Json::object();
  Json counts_ = Json::object();
  Json warnings_ = Json::array();
  std::optional<std::uint64_t> seed_;
};

struct GraphOptions {
  std::string curriculum;
  bool allow_unreachable = false;
  double bt_quantile = 0.90;
  std::size_t min_outdeg = 2;
  unsigned threads = 0;
};

struct PanelOptions {
  std::string records;
  std::string profiles;
  std::size_t min_enrolment = 0;
};

struct FeatureOptions {
  int ref_term = 5;
  std::string window_end;
  int min_followup = 2;
  bool include_censored = false;
  bool normalise_md = false;
};

struct ForestOptions {
  std::string features;
  std::uint64_t seed = 0;
  double train_fraction = 0.8;
  std::size_t trees = 500;
  std::size_t max_depth = 0;
  std::size_t min_samples_split = 2;
  std::string class_weight = "balanced";
  std::string max_features = "sqrt";
  std::size_t top_k = 20;
  bool save_model = false;
};

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

capire::BottleneckCriteria criteria_of(const GraphOptions& g) {
  capire::BottleneckCriteria c;
  c.betweenness_quantile = g.bt_quantile;
  c.min_out_degree = g.min_outdeg;
  c.validate();
  return c;
}

capire::CurriculumGraph load_graph(Run& run, const GraphOptions& g) {
  run.input(g.curriculum);
  capire::BuildOptions options;
  options.require_reachability = !g.allow_unreachable;
  auto graph = capire::load_curriculum(g.curriculum, options);
  for (const auto& w : graph.warnings()) run.warn(g.curriculum + ": " + w);
  run.config()["curriculum"] = g.curriculum;
  run.config()["require_reachability"] = options.require_reachability;
  run.counts()["courses"] = graph.size();
  run.counts()["edges"] = graph.edge_count();
  return graph;
}

capire::ExperimentConfig experiment_config(Run& run, const ForestOptions& f, unsigned threads) {
  capire::ExperimentConfig c;
  c.seed = f.seed;
  c.train_fraction = f.train_fraction;
  c.threads = threads;
  c.forest.n_trees = f.trees;
  if (f.max_depth > 0) c.forest.max_depth = f.max_depth;
  c.forest.min_samples_split = f.min_samples_split;
  c.forest.class_weight = f.class_weight == "none" ? capire::ClassWeight::None : capire::ClassWeight::Balanced;
  if (f.max_features == "sqrt") {
    c.forest.max_features = capire::MaxFeatures::sqrt();
  } else if (f.max_features == "all") {
    c.forest.max_features = capire::MaxFeatures::all();
  } else {
    c.forest.max_features = capire::MaxFeatures::fixed(std::stoul(f.max_features));
  }
  c.forest.seed = f.seed;
  c.forest.validate();
  run.seed(f.seed);
  auto& j = run.config();
  j["train_fraction"] = f.train_fraction;
  j["trees"] = f.trees;
  j["max_depth"] = f.max_depth > 0 ? Json(f.max_depth) : Json(nullptr);
  j["min_samples_split"] = f.min_samples_split;
  j["class_weight"] = f.class_weight;
  j["max_features"] = f.max_features;
  j["bootstrap"] = true;
  j["decision_threshold"] = 0.5;
  return c;
}

struct PanelBundle {
  capire::CurriculumGraph graph;
  std::optional<capire::StudentSemesterPanel> panel;
};

/// Loads records/profiles and builds the panel, pruning rare courses if asked.
std::unique_ptr<PanelBundle> load_panel(Run& run, const GraphOptions& g, const PanelOptions& p) {
  auto graph = load_graph(run, g);
  run.input(p.records);
  run.input(p.profiles);
  const auto records = capire::read_records(p.records);
  const auto profiles = capire::read_profiles(p.profiles);
  run.config()["records"] = p.records;
  run.config()["profiles"] = p.profiles;
  run.config()["min_enrolment"] = p.min_enrolment;
  if (p.min_enrolment > 0) {
    auto doc = capire::prune_by_frequency(graph.document(), records, p.min_enrolment);
    capire::BuildOptions options;
    options.require_reachability = !g.allow_unreachable;
    graph = capire::CurriculumGraph::build(std::move(doc), options);
    run.counts()["courses_after_pruning"] = graph.size();
    run.counts()["edges_after_pruning"] = graph.edge_count();
  }
  auto bundle = std::make_unique<PanelBundle>(PanelBundle{std::move(graph), std::nullopt});
  bundle->panel.emplace(capire::build_panel(records, profiles, bundle->graph));
  const auto& s = bundle->panel->stats();
  auto& c = run.counts();
  c["records_read"] = s.records_read;
  c["records_quarantined"] = s.records_quarantined;
  c["duplicates_resolved"] = s.duplicates_resolved;
  c["profiles_read"] = s.profiles_read;
  c["students_excluded_without_records"] = s.students_without_records;
  c["students_excluded_without_profile"] = s.students_without_profile;
  c["students_excluded_inconsistent_profile"] = s.students_inconsistent_profile;
  c["students_excluded_implausible"] = s.students_implausible;
  c["students"] = s.students;
  c["panel_rows"] = s.rows;
  c["prediction_rows"] = capire::apply_filters(*bundle->panel).size();
  for (const auto& w : bundle->panel->warnings()) run.warn(w);
  return bundle;
}

capire::FeatureMatrix compute_features(Run& run, const PanelBundle& bundle, const GraphOptions& g,
                                       const FeatureOptions& f) {
  capire::StructuralOptions so;
  so.normalise_module_diversity = f.normalise_md;
  const auto model =
      capire::StructuralModel::from_graph(bundle.graph, criteria_of(g), so, resolve_threads(g.threads));
  for (const auto& w : model.warnings()) run.warn(w);
  capire::FeatureMatrixOptions options;
  options.ref_term = f.ref_term;
  options.min_followup_terms = f.min_followup;
  options.include_censored = f.include_censored;
  if (!f.window_end.empty()) options.window_end = capire::CalendarTerm::parse(f.window_end);
  const auto window = options.window_end ? *options.window_end : bundle.panel->latest_term();
  auto& j = run.config();
  j["ref_term"] = f.ref_term;
  j["window_end"] = window.to_string();
  j["min_followup_terms"] = f.min_followup;
  j["include_censored"] = f.include_censored;
  j["normalise_module_diversity"] = f.normalise_md;
  j["bt_quantile"] = g.bt_quantile;
  j["min_outdeg"] = g.min_outdeg;
  auto m = capire::build_feature_matrix(*bundle.panel, model, options);
  auto& c = run.counts();
  c["backbone_courses"] = model.backbone().size();
  c["bottleneck_courses"] = model.bottlenecks().size();
  c["snapshots"] = m.snapshots;
  c["excluded_late_entry"] = m.late_entry_excluded;
  c["excluded_censored"] = m.censored_excluded;
  c["feature_rows"] = m.rows();
  c["dropouts"] = std::count(m.labels.begin(), m.labels.end(), 1);
  return m;
}

capire::FeatureMatrix load_features(Run& run, const std::string& path) {
  run.input(path);
  run.config()["features"] = path;
  auto m = capire::FeatureMatrix::read_csv(path);
  if (m.missing_imputed > 0) run.warn(std::to_string(m.missing_imputed) + " missing feature values imputed as 0");
  run.counts()["feature_rows"] = m.rows();
  run.counts()["missing_imputed"] = m.missing_imputed;
  return m;
}

void write_comparison(Run& run, const capire::ComparisonReport& report, bool save_model) {
  run.output("comparison.json", report.to_json());
  run.output("comparison.txt", report.to_table());
  run.counts()["train_rows"] = report.train_rows;
  run.counts()["test_rows"] = report.test_rows;
  std::cout << report.to_table();
  if (save_model) run.output("model.json", report.models.back().to_json());
}

void write_ablation(Run& run, const capire::AblationReport& report) {
  run.output("ablation.json", report.to_json());
  run.output("ablation.txt", report.to_table());
  run.output("ablation_long.csv", report.to_long_csv());
  std::cout << report.to_table();
}

void write_importance(Run& run, const capire::ImportanceReport& report) {
  run.output("importance.json", report.to_json());
  run.output("importance.txt", report.to_table());
  std::cout << report.to_table();
}

std::string backbone_json(const capire::CurriculumGraph& graph, const capire::CourseSet& backbone) {
  Json j;
  capire::Credits credits;
  for (auto v : backbone.members()) credits += graph.course(v).credits;
  j["courses"] = graph.codes(backbone.members());
  j["credits"] = credits.to_string();
  return j.dump(2) + "\n";
}

std::string bottleneck_json(const capire::CurriculumGraph& graph, const capire::CentralityTable& table,
                            const capire::BottleneckCriteria& criteria, const capire::CourseSet& bottlenecks) {
  Json j;
  const auto threshold = capire::nonzero_quantile(table.betweenness(), criteria.betweenness_quantile);
  j["betweenness_quantile"] = criteria.betweenness_quantile;
  j["min_out_degree"] = criteria.min_out_degree;
  j["betweenness_threshold"] = threshold ? Json(*threshold) : Json(nullptr);
  j["courses"] = graph.codes(bottlenecks.members());
  return j.dump(2) + "\n";
}

void add_graph_options(CLI::App* cmd, GraphOptions& g, bool positional) {
  if (positional) {
    cmd->add_option("curriculum", g.curriculum, "Curriculum JSON file")->required();
  } else {
    cmd->add_option("--curriculum", g.curriculum, "Curriculum JSON file")->required();
  }
  cmd->add_flag("--allow-unreachable", g.allow_unreachable, "Accept courses off every entry-to-terminal route");
  cmd->add_option("--threads", g.threads, "Worker threads (0 = all cores); never changes results");
}

void add_bottleneck_options(CLI::App* cmd, GraphOptions& g) {
  cmd->add_option("--bt-quantile", g.bt_quantile, "Betweenness quantile for bottlenecks")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cmd->add_option("--min-outdeg", g.min_outdeg, "Minimum out-degree for bottlenecks")->capture_default_str();
}

void add_panel_options(CLI::App* cmd, PanelOptions& p) {
  cmd->add_option("--records", p.records, "Trajectory records CSV")->required();
  cmd->add_option("--profiles", p.profiles, "Student profiles CSV")->required();
  cmd->add_option("--min-enrolment", p.min_enrolment, "Drop courses taken by fewer students (0 = keep all)")
      ->capture_default_str();
}

void add_feature_options(CLI::App* cmd, FeatureOptions& f) {
  cmd->add_option("--ref-term", f.ref_term, "Reference programme term")->check(CLI::Range(2, 1000))->capture_default_str();
  cmd->add_option("--window-end", f.window_end, "Last observed calendar term, e.g. 2025-2 (default: latest record)");
  cmd->add_option("--min-followup", f.min_followup, "Terms after the reference needed to avoid censoring")
      ->capture_default_str();
  cmd->add_flag("--include-censored", f.include_censored, "Keep censored snapshots");
  cmd->add_flag("--normalise-md", f.normalise_md, "Normalise module diversity by ln(#modules)");
}

void add_forest_options(CLI::App* cmd, ForestOptions& f, GraphOptions& g, bool with_threads) {
  cmd->add_option("--seed", f.seed, "Master seed for split and forest")->required();
  cmd->add_option("--train-fraction", f.train_fraction, "Training share of the hold-out split")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cmd->add_option("--trees", f.trees, "Trees per forest")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--max-depth", f.max_depth, "Maximum tree depth (0 = unlimited)")->capture_default_str();
  cmd->add_option("--min-samples-split", f.min_samples_split, "Minimum samples to split a node")
      ->check(CLI::Range(std::size_t{2}, std::numeric_limits<std::size_t>::max()))
      ->capture_default_str();
  cmd->add_option("--class-weight", f.class_weight, "balanced or none")
      ->check(CLI::IsMember({"balanced", "none"}))
      ->capture_default_str();
  cmd->add_option("--max-features", f.max_features, "sqrt, all or a count")->capture_default_str();
  if (with_threads) cmd->add_option("--threads", g.threads, "Worker threads (0 = all cores); never changes results");
}

void add_synth_options(CLI::App* cmd, capire::SynthParams& s) {
  cmd->add_option("--seed", s.seed, "Generator seed")->capture_default_str();
  cmd->add_option("--courses", s.n_courses, "Number of courses")->capture_default_str();
  cmd->add_option("--modules", s.n_modules, "Number of modules")->capture_default_str();
  cmd->add_option("--edge-density", s.edge_density, "Extra prerequisite probability")->capture_default_str();
  cmd->add_option("--students", s.n_students, "Number of students")->capture_default_str();
  cmd->add_option("--horizon", s.terms_horizon, "Maximum terms per student")->capture_default_str();
  cmd->add_option("--pass-probability", s.base_pass_probability, "Base pass probability")->capture_default_str();
  cmd->add_option("--hazard", s.dropout_base_hazard, "Base dropout hazard per term")->capture_default_str();
  cmd->add_option("--hazard-coefficient", s.blocked_credits_hazard_coefficient,
                  "Hazard multiplier per blocked credit")
      ->capture_default_str();
  cmd->add_option("--load", s.courses_per_term_mean, "Mean courses per term")->capture_default_str();
  cmd->add_option("--ability-spread", s.ability_spread, "Spread of per-student pass probability")
      ->capture_default_str();
  cmd->add_option("--gap-probability", s.gap_probability, "Chance of an inactive term")->capture_default_str();
  cmd->add_option("--first-cohort", s.first_cohort, "First entry year")->capture_default_str();
  cmd->add_option("--last-cohort", s.last_cohort, "Last entry year")->capture_default_str();
}

Json synth_json(const capire::SynthParams& s) {
  Json j;
  j["n_courses"] = s.n_courses;
  j["n_modules"] = s.n_modules;
  j["edge_density"] = s.edge_density;
  j["n_students"] = s.n_students;
  j["terms_horizon"] = s.terms_horizon;
  j["base_pass_probability"] = s.base_pass_probability;
  j["dropout_base_hazard"] = s.dropout_base_hazard;
  j["blocked_credits_hazard_coefficient"] = s.blocked_credits_hazard_coefficient;
  j["courses_per_term_mean"] = s.courses_per_term_mean;
  j["ability_spread"] = s.ability_spread;
  j["gap_probability"] = s.gap_probability;
  j["first_cohort"] = s.first_cohort;
  j["last_cohort"] = s.last_cohort;
  j["window_end"] = s.window_end.to_string();
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Curriculum-graph features and dropout prediction experiments"};
  app.set_version_flag("--version", CAPIRE_VERSION);
  app.require_subcommand(1);
  std::string out_dir = "capire-out";
  app.add_option("-o,--out-dir", out_dir, "Directory for outputs and manifest")->capture_default_str();

  GraphOptions graph_opts;
  PanelOptions panel_opts;
  FeatureOptions feature_opts;
  ForestOptions forest_opts;
  capire::SynthParams synth;
  std::string synth_curriculum;
  std::string window_end;

  auto* graph = app.add_subcommand("graph", "Curriculum graph commands")->require_subcommand(1);
  auto* g_validate = graph->add_subcommand("validate", "Check that the curriculum is a valid DAG");
  add_graph_options(g_validate, graph_opts, true);
  auto* g_metrics = graph->add_subcommand("metrics", "Per-course centralities");
  add_graph_options(g_metrics, graph_opts, true);
  add_bottleneck_options(g_metrics, graph_opts);
  auto* g_backbone = graph->add_subcommand("backbone", "Courses on shortest entry-to-terminal paths");
  add_graph_options(g_backbone, graph_opts, true);
  auto* g_bottlenecks = graph->add_subcommand("bottlenecks", "High-betweenness gateway courses");
  add_graph_options(g_bottlenecks, graph_opts, true);
  add_bottleneck_options(g_bottlenecks, graph_opts);

  auto* panel = app.add_subcommand("panel", "Student-semester panel")->require_subcommand(1);
  auto* p_build = panel->add_subcommand("build", "Clean records and build the panel");
  add_graph_options(p_build, graph_opts, false);
  add_panel_options(p_build, panel_opts);

  auto* features = app.add_subcommand("features", "Feature matrix")->require_subcommand(1);
  auto* f_compute = features->add_subcommand("compute", "Baseline and structural features at the reference term");
  add_graph_options(f_compute, graph_opts, false);
  add_panel_options(f_compute, panel_opts);
  add_feature_options(f_compute, feature_opts);
  add_bottleneck_options(f_compute, graph_opts);

  auto* experiment = app.add_subcommand("experiment", "Forest experiments on a feature matrix")->require_subcommand(1);
  auto* e_compare = experiment->add_subcommand("compare", "Baseline vs baseline + structural");
  auto* e_ablate = experiment->add_subcommand("ablate", "Leave-one-out structural ablation");
  auto* e_importance = experiment->add_subcommand("importance", "MDI ranking of the full model");
  for (auto* cmd : {e_compare, e_ablate, e_importance}) {
    cmd->add_option("--features", forest_opts.features, "Feature matrix CSV")->required();
    add_forest_options(cmd, forest_opts, graph_opts, true);
  }
  e_compare->add_flag("--save-model", forest_opts.save_model, "Also write the full model as JSON");
  e_importance->add_option("--top-k", forest_opts.top_k, "Rows to keep (0 = all)")->capture_default_str();

  auto* synth_cmd = app.add_subcommand("synth", "Synthetic data")->require_subcommand(1);
  auto* s_curriculum = synth_cmd->add_subcommand("curriculum", "Generate a layered curriculum");
  add_synth_options(s_curriculum, synth);
  auto* s_cohort = synth_cmd->add_subcommand("cohort", "Simulate a cohort on a curriculum");
  add_synth_options(s_cohort, synth);
  s_cohort->add_option("--curriculum", synth_curriculum, "Curriculum JSON file")->required();
  s_cohort->add_option("--window-end", window_end, "Last calendar term with data, e.g. 2025-2");

  auto* report = app.add_subcommand("report", "Full pipeline from raw inputs to reports");
  add_graph_options(report, graph_opts, false);
  add_panel_options(report, panel_opts);
  add_feature_options(report, feature_opts);
  add_bottleneck_options(report, graph_opts);
  add_forest_options(report, forest_opts, graph_opts, false);
  report->add_option("--top-k", forest_opts.top_k, "Importance rows to keep (0 = all)")->capture_default_str();

  for (auto* group : app.get_subcommands({})) {
    group->fallthrough();
    for (auto* cmd : group->get_subcommands({})) cmd->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }

  std::string command;
  for (auto* top : app.get_subcommands()) {
    command = top->get_name();
    for (auto* sub : top->get_subcommands()) command += " " + sub->get_name();
  }

  try {
    Run run(command, out_dir);
    const unsigned threads = resolve_threads(graph_opts.threads);
    run.config()["out_dir"] = out_dir;

    if (g_validate->parsed()) {
      const auto g = load_graph(run, graph_opts);
      std::cout << g.size() << " courses, " << g.edge_count() << " edges, acyclic\n";
      const auto redundant = capire::transitive_redundancy(g);
      run.counts()["transitively_redundant_edges"] = redundant.size();
      for (const auto& e : redundant) run.warn("edge " + e.from + " -> " + e.to + " is implied by a longer path");
    } else if (g_metrics->parsed() || g_bottlenecks->parsed()) {
      const auto g = load_graph(run, graph_opts);
      capire::CentralityOptions options;
      options.criteria = criteria_of(graph_opts);
      options.threads = threads;
      std::vector<std::string> warnings;
      const auto table = capire::compute_centrality_table(g, options, &warnings);
      for (const auto& w : warnings) run.warn(w);
      const auto bottlenecks = capire::identify_bottlenecks(g, table, options.criteria);
      run.config()["bt_quantile"] = graph_opts.bt_quantile;
      run.config()["min_outdeg"] = graph_opts.min_outdeg;
      run.counts()["bottleneck_courses"] = bottlenecks.size();
      if (bottlenecks.empty()) run.warn("bottleneck set is empty");
      if (g_metrics->parsed()) {
        run.output("centrality.csv", table.to_csv());
        std::string modules = "module,courses,mean_betweenness\n";
        for (const auto& m : capire::module_centrality_summary(g, table)) {
          modules += capire::csv::escape(m.module) + "," + std::to_string(m.courses) + "," +
                     capire::csv::fixed(m.mean_betweenness) + "\n";
        }
        run.output("module_centrality.csv", modules);
      } else {
        const auto text = bottleneck_json(g, table, options.criteria, bottlenecks);
        run.output("bottlenecks.json", text);
        std::cout << text;
      }
    } else if (g_backbone->parsed()) {
      const auto g = load_graph(run, graph_opts);
      const auto backbone = capire::identify_backbone(g);
      run.counts()["backbone_courses"] = backbone.size();
      const auto text = backbone_json(g, backbone);
      run.output("backbone.json", text);
      std::cout << text;
    } else if (p_build->parsed()) {
      const auto bundle = load_panel(run, graph_opts, panel_opts);
      run.output("panel.csv", bundle->panel->to_csv());
      std::cout << bundle->panel->students().size() << " students, " << bundle->panel->stats().rows
                << " student-terms\n";
    } else if (f_compute->parsed()) {
      const auto bundle = load_panel(run, graph_opts, panel_opts);
      const auto m = compute_features(run, *bundle, graph_opts, feature_opts);
      run.output("features.csv", m.to_csv());
      std::cout << m.rows() << " snapshots x " << m.columns.size() << " features\n";
    } else if (e_compare->parsed() || e_ablate->parsed() || e_importance->parsed()) {
      const auto m = load_features(run, forest_opts.features);
      const auto config = experiment_config(run, forest_opts, threads);
      if (e_compare->parsed()) {
        write_comparison(run, capire::run_comparison(m, config), forest_opts.save_model);
      } else if (e_ablate->parsed()) {
        write_ablation(run, capire::run_ablation(m, config));
      } else {
        run.config()["top_k"] = forest_opts.top_k;
        const auto cmp = capire::run_comparison(m, config);
        write_importance(run, capire::report_importance(cmp.models.back(), forest_opts.top_k));
      }
    } else if (s_curriculum->parsed()) {
      run.seed(synth.seed);
      run.config()["synth"] = synth_json(synth);
      const auto doc = capire::generate_curriculum(synth);
      run.counts()["courses"] = doc.courses.size();
      run.counts()["edges"] = doc.prerequisites.size();
      run.output("curriculum.json", capire::serialize_curriculum(doc));
    } else if (s_cohort->parsed()) {
      if (!window_end.empty()) synth.window_end = capire::CalendarTerm::parse(window_end);
      run.seed(synth.seed);
      run.config()["synth"] = synth_json(synth);
      run.input(synth_curriculum);
      run.config()["curriculum"] = synth_curriculum;
      const auto g = capire::load_curriculum(synth_curriculum);
      const auto cohort = capire::generate_cohort(g, synth);
      run.counts()["records"] = cohort.records.size();
      run.counts()["profiles"] = cohort.profiles.size();
      run.output("records.csv", capire::write_records(cohort.records));
      run.output("profiles.csv", capire::write_profiles(cohort.profiles));
    } else if (report->parsed()) {
      const auto bundle = load_panel(run, graph_opts, panel_opts);
      capire::CentralityOptions options;
      options.criteria = criteria_of(graph_opts);
      options.threads = threads;
      std::vector<std::string> warnings;
      const auto table = capire::compute_centrality_table(bundle->graph, options, &warnings);
      for (const auto& w : warnings) run.warn(w);
      run.output("centrality.csv", table.to_csv());
      run.output("backbone.json", backbone_json(bundle->graph, capire::identify_backbone(bundle->graph)));
      run.output("bottlenecks.json",
                 bottleneck_json(bundle->graph, table, options.criteria,
                                 capire::identify_bottlenecks(bundle->graph, table, options.criteria)));
      run.output("panel.csv", bundle->panel->to_csv());
      const auto text = compute_features(run, *bundle, graph_opts, feature_opts).to_csv();
      run.output("features.csv", text);
      // Round-trip through CSV like the staged commands.
      const auto m = capire::FeatureMatrix::parse_csv(text, "features.csv");
      const auto config = experiment_config(run, forest_opts, threads);
      run.config()["top_k"] = forest_opts.top_k;
      const auto cmp = capire::run_comparison(m, config);
      write_comparison(run, cmp, false);
      write_ablation(run, capire::run_ablation(m, config));
      write_importance(run, capire::report_importance(cmp.models.back(), forest_opts.top_k));
    }
    run.finish();
    return 0;
  } catch (const capire::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
