#include "rslpa/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rslpa/bsp.hpp"
#include "rslpa/cost_model.hpp"
#include "rslpa/error.hpp"
#include "rslpa/evaluation.hpp"
#include "rslpa/incremental.hpp"
#include "rslpa/io.hpp"
#include "rslpa/label_engine.hpp"
#include "rslpa/postprocess.hpp"
#include "rslpa/slpa.hpp"

namespace rslpa {
namespace {

using Json = nlohmann::ordered_json;

std::string num(double x) {
  std::ostringstream s;
  s << std::setprecision(10) << x;
  std::string text = s.str();
  if (text.find_first_of(".eni") == std::string::npos) text += ".0";
  return text;
}

// Collects key=value output and mirrors it into a JSON document.
class Report {
 public:
  explicit Report(std::ostream& out) : out_(out) {}

  template <typename T>
  void put(const std::string& key, const T& value) {
    if constexpr (std::is_floating_point_v<T>) {
      out_ << key << '=' << num(value) << '\n';
    } else if constexpr (std::is_same_v<T, bool>) {
      out_ << key << '=' << (value ? "true" : "false") << '\n';
    } else {
      out_ << key << '=' << value << '\n';
    }
    doc_[key] = value;
  }

  // A line of several fields, stored in the document under `list`.
  void row(const std::string& list, const Json& fields) {
    bool first = true;
    for (const auto& [k, v] : fields.items()) {
      out_ << (first ? "" : " ") << k << '=';
      if (v.is_number_float()) {
        out_ << num(v.get<double>());
      } else if (v.is_string()) {
        out_ << v.get<std::string>();
      } else {
        out_ << v.dump();
      }
      first = false;
    }
    out_ << '\n';
    doc_[list].push_back(fields);
  }

  void save(const std::string& path) const {
    if (path.empty()) return;
    std::ofstream f(path);
    if (!f) throw IoError("cannot write " + path);
    f << doc_.dump(2) << '\n';
    if (!f) throw IoError("failed writing " + path);
  }

 private:
  std::ostream& out_;
  Json doc_ = Json::object();
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed) {
  if (seed) return *seed;
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

Json round_fields(const bsp::RoundMetrics& m) {
  Json j;
  j["round"] = m.round;
  j["phase"] = m.phase;
  j["logical"] = m.logical;
  j["inter_worker"] = m.inter_worker;
  for (std::size_t c = 0; c < m.by_class.size(); ++c) {
    if (m.by_class[c] > 0) j[to_string(static_cast<bsp::PayloadClass>(c))] = m.by_class[c];
  }
  return j;
}

void write_text(const std::string& path, const auto& writer) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write " + path);
  writer(f);
  if (!f) throw IoError("failed writing " + path);
}

Cover load_any_cover(const std::string& path, const std::string& format) {
  if (format == "lfr") return load_lfr_ground_truth(path);
  return load_cover(path);
}

double scan_step_default() {
  if (const char* env = std::getenv("RSLPA_SCAN_STEP")) {
    try {
      std::size_t used = 0;
      const double step = std::stod(env, &used);
      if (used == std::string(env).size() && step > 0.0) return step;
    } catch (const std::exception&) {
    }
    throw ValidationError(std::string("RSLPA_SCAN_STEP is not a positive number: ") + env);
  }
  return kDefaultScanStep;
}

struct Options {
  std::string graph;
  std::string snapshot;
  std::vector<std::string> batches;
  std::string out;
  std::string out_truth;
  std::string metrics_out;
  std::optional<std::uint64_t> seed;
  std::uint32_t iterations = 0;
  std::size_t workers = 0;
  std::string pc_formula = "corrected";
  bool lenient = false;
  std::optional<double> tau1;
  std::optional<double> tau2;
  std::optional<double> step;
  double tau = kSlpaDefaultTau;
  std::string pred;
  std::string truth;
  std::string pred_format = "cover";
  std::string truth_format = "cover";
  std::uint64_t V = 0, E = 0, md = 0, ma = 0;
  std::uint32_t T = 0;
  std::size_t size = 0;
  PlantedParams planted;
};

void cmd_detect(const Options& o, Report& r) {
  const std::uint64_t seed = resolve_seed(o.seed);
  const EdgeListLoad load = load_edge_list(o.graph);
  Snapshot snap{seed, load.graph, {}};
  const auto start = std::chrono::steady_clock::now();
  if (o.workers > 0) {
    bsp::RslpaRun run = bsp::sim_run_rslpa(load.graph, o.iterations, seed, o.workers);
    for (const auto& m : run.rounds) r.row("rounds", round_fields(m));
    snap.state = std::move(run.state);
  } else {
    snap.state = run(load.graph, o.iterations, seed);
  }
  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  save_snapshot(snap, o.out);
  r.put("seed", seed);
  r.put("vertices", load.graph.vertex_count());
  r.put("active_vertices", load.graph.active_vertex_count());
  r.put("edges", load.graph.edge_count());
  r.put("iterations", o.iterations);
  r.put("duplicate_edges", load.duplicates);
  r.put("self_loops", load.self_loops);
  r.put("wall_ms", ms);
}

void cmd_update(const Options& o, Report& r) {
  Snapshot snap = load_snapshot(o.snapshot);
  const std::uint64_t seed = o.seed.value_or(snap.seed);
  const PcFormula formula = parse_pc_formula(o.pc_formula);
  const RngStream rng(seed);
  r.put("seed", seed);
  for (std::size_t b = 0; b < o.batches.size(); ++b) {
    const EditBatch batch = load_batch(o.batches[b]);
    const BatchResult applied =
        apply_batch(snap.graph, batch, o.lenient ? BatchMode::kLenient : BatchMode::kStrict);
    const CostProfile profile{
        snap.graph.active_vertex_count(), snap.graph.edge_count(),
        batch.deletions().size() - applied.skipped_deletions.size(),
        batch.insertions().size() - applied.skipped_insertions.size(), snap.state.iterations};

    const auto start = std::chrono::steady_clock::now();
    UpdateMetrics metrics;
    if (o.workers > 0) {
      bsp::UpdateRun run =
          bsp::sim_run_update(snap.state, applied.graph, applied.deltas, seed, o.workers);
      for (const auto& m : run.rounds) {
        Json j = round_fields(m);
        j["batch"] = b;
        r.row("rounds", j);
      }
      metrics = std::move(run.metrics);
    } else {
      metrics = correction_propagate(snap.state, applied.graph, applied.deltas, rng);
    }
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    snap.graph = applied.graph;

    const CostPrediction pred = predict_cost(profile, formula);
    const EtaComparison cmp = compare_eta(metrics, pred);
    Json row;
    row["batch"] = b;
    row["file"] = o.batches[b];
    row["deleted"] = profile.deleted;
    row["inserted"] = profile.inserted;
    row["skipped"] = applied.skipped_deletions.size() + applied.skipped_insertions.size();
    row["eta"] = metrics.eta;
    row["repicks"] = metrics.repicks;
    row["record_removals"] = metrics.record_removals;
    row["corrections"] = metrics.corrections;
    row["retired"] = metrics.retired;
    row["created"] = metrics.created;
    row["waves"] = metrics.waves;
    row["wall_ms"] = ms;
    row["pc"] = pred.p_c;
    row["eta_expected"] = pred.eta_expected;
    row["eta_lower"] = pred.eta_lower;
    row["eta_upper"] = pred.eta_upper;
    row["in_bounds"] = cmp.in_bounds;
    row["relative_error"] = cmp.relative_error;
    r.row("batches", row);
  }
  r.put("pc_formula", std::string(to_string(formula)));
  r.put("note", formula_note(formula));
  save_snapshot(snap, o.out);
  r.put("epoch", snap.state.epoch);
}

void cmd_postprocess(const Options& o, Report& r) {
  const Snapshot snap = load_snapshot(o.snapshot);
  PostprocessOptions opts;
  opts.tau1 = o.tau1;
  opts.tau2 = o.tau2;
  opts.step = o.step ? *o.step : scan_step_default();
  const PostprocessResult res = postprocess(snap.graph, snap.state, opts);
  write_text(o.out, [&](std::ostream& f) { write_cover(f, res.extraction.cover); });
  r.put("tau2", res.tau2);
  r.put("tau1", res.tau1);
  r.put("entropy", res.entropy);
  r.put("communities", res.extraction.cover.size());
  r.put("unassigned", res.extraction.unassigned.size());
}

void cmd_eval(const Options& o, Report& r) {
  const Cover pred = load_any_cover(o.pred, o.pred_format);
  const Cover truth = load_any_cover(o.truth, o.truth_format);
  std::vector<VertexId> universe;
  if (!o.graph.empty()) {
    universe = active_universe(load_edge_list(o.graph).graph);
  } else {
    universe = pred.vertices();
    const auto more = truth.vertices();
    universe.insert(universe.end(), more.begin(), more.end());
  }
  const NmiReport rep = nmi_overlapping(pred, truth, universe);
  r.put("nmi", rep.score);
  r.put("x_given_y", rep.x_given_y);
  r.put("y_given_x", rep.y_given_x);
  r.put("degenerate", rep.degenerate);
}

void cmd_predict(const Options& o, Report& r) {
  const PcFormula formula = parse_pc_formula(o.pc_formula);
  const CostPrediction p = predict_cost(CostProfile{o.V, o.E, o.md, o.ma, o.T}, formula);
  r.put("pc", p.p_c);
  r.put("eta", p.eta_expected);
  r.put("lower", p.eta_lower);
  r.put("upper", p.eta_upper);
  r.put("pc_formula", std::string(to_string(formula)));
  r.put("note", formula_note(formula));
}

void cmd_genbatch(const Options& o, Report& r) {
  const std::uint64_t seed = resolve_seed(o.seed);
  const Graph g = load_edge_list(o.graph).graph;
  const EditBatch batch = generate_random_batch(g, o.size, seed);
  write_text(o.out, [&](std::ostream& f) { write_batch(f, batch); });
  r.put("seed", seed);
  r.put("deletions", batch.deletions().size());
  r.put("insertions", batch.insertions().size());
}

void cmd_genplanted(const Options& o, Report& r) {
  PlantedParams p = o.planted;
  p.seed = resolve_seed(o.seed);
  const PlantedGraph pg = generate_planted_cover_graph(p);
  write_text(o.out, [&](std::ostream& f) { write_edge_list(f, pg.graph); });
  if (!o.out_truth.empty()) {
    write_text(o.out_truth, [&](std::ostream& f) { write_cover(f, pg.truth); });
  }
  r.put("seed", p.seed);
  r.put("vertices", pg.graph.vertex_count());
  r.put("edges", pg.graph.edge_count());
  r.put("communities", pg.truth.size());
}

void cmd_slpa(const Options& o, Report& r) {
  const std::uint64_t seed = resolve_seed(o.seed);
  const Graph g = load_edge_list(o.graph).graph;
  if (!(o.tau >= 0.0 && o.tau <= 1.0)) throw DomainError("tau must lie in [0,1]");
  MemoryState mem;
  if (o.workers > 0) {
    bsp::SlpaRun run = bsp::sim_run_slpa(g, o.iterations, seed, o.workers);
    for (const auto& m : run.rounds) r.row("rounds", round_fields(m));
    mem = std::move(run.state);
  } else {
    mem = slpa_run(g, o.iterations, seed);
  }
  const Cover cover = slpa_threshold(mem, o.tau);
  write_text(o.out, [&](std::ostream& f) { write_cover(f, cover); });
  r.put("seed", seed);
  r.put("iterations", o.iterations);
  r.put("tau", o.tau);
  r.put("communities", cover.size());
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Randomized speaker-listener label propagation with incremental updates", "rslpa"};
  app.require_subcommand(1);
  Options o;

  const auto unit = CLI::Range(0.0, 1.0);
  auto* detect = app.add_subcommand("detect", "Run label propagation and write a snapshot");
  detect->add_option("--graph", o.graph, "Edge list")->required();
  detect->add_option("--seed", o.seed, "Random seed (generated and printed when omitted)");
  detect->add_option("--iterations", o.iterations, "Propagation iterations")->default_val(200);
  detect->add_option("--out", o.out, "Snapshot path")->required();
  detect->add_option("--simulate-workers", o.workers, "Run on the BSP simulator with k workers");
  detect->add_option("--metrics-out", o.metrics_out, "Write metrics as JSON");

  auto* update = app.add_subcommand("update", "Apply edit batches to a snapshot");
  update->add_option("--snapshot", o.snapshot)->required();
  update->add_option("--batch", o.batches, "Batch file; repeat to apply several in order")
      ->required();
  update->add_option("--seed", o.seed, "Random seed (default: the snapshot's)");
  update->add_option("--out", o.out)->required();
  update->add_option("--pc-formula", o.pc_formula)->check(CLI::IsMember({"corrected", "literal"}));
  update->add_flag("--lenient", o.lenient, "Skip redundant edits instead of failing");
  update->add_option("--simulate-workers", o.workers);
  update->add_option("--metrics-out", o.metrics_out);

  auto* post = app.add_subcommand("postprocess", "Extract a cover from a snapshot");
  post->add_option("--snapshot", o.snapshot)->required();
  post->add_option("--out", o.out, "Cover path")->required();
  post->add_option("--tau1", o.tau1)->check(unit);
  post->add_option("--tau2", o.tau2)->check(unit);
  post->add_option("--step", o.step, "Threshold scan step (env RSLPA_SCAN_STEP)");
  post->add_option("--metrics-out", o.metrics_out);

  auto* eval = app.add_subcommand("eval", "Overlapping NMI between two covers");
  eval->add_option("--pred", o.pred)->required();
  eval->add_option("--truth", o.truth)->required();
  eval->add_option("--pred-format", o.pred_format)->check(CLI::IsMember({"cover", "lfr"}));
  eval->add_option("--truth-format", o.truth_format)->check(CLI::IsMember({"cover", "lfr"}));
  eval->add_option("--graph", o.graph, "Take the universe from this graph's active vertices");
  eval->add_option("--metrics-out", o.metrics_out);

  auto* predict = app.add_subcommand("predict", "Predicted update cost");
  predict->add_option("--V", o.V)->required();
  predict->add_option("--E", o.E)->required();
  predict->add_option("--md", o.md)->required();
  predict->add_option("--ma", o.ma)->required();
  predict->add_option("--T", o.T)->required();
  predict->add_option("--pc-formula", o.pc_formula)->check(CLI::IsMember({"corrected", "literal"}));
  predict->add_option("--metrics-out", o.metrics_out);

  auto* genbatch = app.add_subcommand("genbatch", "Sample a uniform edit batch");
  genbatch->add_option("--graph", o.graph)->required();
  genbatch->add_option("--size", o.size)->required();
  genbatch->add_option("--seed", o.seed);
  genbatch->add_option("--out", o.out)->required();

  auto* genplanted = app.add_subcommand("genplanted", "Generate a planted overlapping cover graph");
  genplanted->add_option("--communities", o.planted.communities)->default_val(10);
  genplanted->add_option("--size", o.planted.community_size)->default_val(55);
  genplanted->add_option("--overlap", o.planted.overlap)->default_val(5);
  genplanted->add_option("--p-in", o.planted.p_in)->default_val(0.3)->check(unit);
  genplanted->add_option("--p-out", o.planted.p_out)->default_val(0.01)->check(unit);
  genplanted->add_option("--seed", o.seed);
  genplanted->add_option("--out", o.out, "Edge list path")->required();
  genplanted->add_option("--out-truth", o.out_truth, "Ground-truth cover path");

  auto* slpa = app.add_subcommand("slpa", "Run the original SLPA baseline");
  slpa->add_option("--graph", o.graph)->required();
  slpa->add_option("--iterations", o.iterations)->default_val(kSlpaDefaultIterations);
  slpa->add_option("--tau", o.tau)->default_val(kSlpaDefaultTau);
  slpa->add_option("--seed", o.seed);
  slpa->add_option("--out", o.out)->required();
  slpa->add_option("--simulate-workers", o.workers);
  slpa->add_option("--metrics-out", o.metrics_out);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  Report report(out);
  try {
    if (*detect) cmd_detect(o, report);
    if (*update) cmd_update(o, report);
    if (*post) cmd_postprocess(o, report);
    if (*eval) cmd_eval(o, report);
    if (*predict) cmd_predict(o, report);
    if (*genbatch) cmd_genbatch(o, report);
    if (*genplanted) cmd_genplanted(o, report);
    if (*slpa) cmd_slpa(o, report);
    report.save(o.metrics_out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace rslpa
