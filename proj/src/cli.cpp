#include "ctrl/cli.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "ctrl/fixtures.hpp"
#include "ctrl/metrics.hpp"
#include "ctrl/newsome.hpp"
#include "ctrl/report.hpp"
#include "ctrl/smt2.hpp"
#include "ctrl/sns.hpp"
#include "ctrl/toy.hpp"

namespace ctrl::cli {

namespace {

struct CommonOptions {
  std::string smt2_path;
  std::string fixture;
  std::string sink;
  std::string solver = "internal";
  std::string solver_cmd;
  std::string opt_mode = "native";
  int timeout_ms = 300000;
  unsigned enum_budget = 20;
  unsigned split_limit = 100;
  std::uint64_t seed = 0;
  unsigned samples = 30;
  double confidence = 0.95;
  unsigned max_intervals = 100;
  std::string out_path;
  std::string csv_path;
};

SolverConfig solver_config(const CommonOptions& opts) {
  SolverConfig cfg;
  cfg.backend =
      opts.solver == "external" ? Backend::External : Backend::Internal;
  cfg.command = opts.solver_cmd;
  cfg.timeout_ms = opts.timeout_ms;
  cfg.enum_budget_bits = opts.enum_budget;
  cfg.opt_mode =
      opts.opt_mode == "binsearch" ? OptMode::BinarySearch : OptMode::Native;
  return cfg;
}

struct LoadedTarget {
  SymState state;
  TargetSpec target;
  Json input_info;
  std::string target_name;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

LoadedTarget load_input(const CommonOptions& opts) {
  LoadedTarget lt;
  if (!opts.fixture.empty()) {
    const toy::Fixture& fx = toy::fixture_by_name(opts.fixture);
    toy::ToyProgram program = toy::parse_toy(fx.ir_text);
    auto sinks = toy::symbolic_single_path(program, fx.triggering_input);
    if (sinks.empty())
      throw Error("fixture input does not reach any sink: " + fx.name);
    const toy::SinkState* chosen = nullptr;
    for (const auto& s : sinks)
      if (opts.sink.empty() || s.label == opts.sink) {
        chosen = &s;
        break;
      }
    if (!chosen) throw Error("sink not reached: " + opts.sink);
    lt.state = chosen->state;
    lt.target = chosen->target;
    lt.target.offset = fx.score_offset;
    lt.target_name = fx.name + "." + chosen->label;
    lt.input_info["kind"] = "fixture";
    lt.input_info["name"] = fx.name;
    lt.input_info["sink"] = chosen->label;
    return lt;
  }
  const std::string text = read_file(opts.smt2_path);
  ParsedFile parsed = parse_smt2(text);
  if (!parsed.target) throw Error("input file lacks a ctrl-target annotation");
  lt.state = std::move(parsed.state);
  lt.target = *parsed.target;
  lt.target_name = opts.smt2_path;
  lt.input_info["kind"] = "smt2";
  lt.input_info["name"] = opts.smt2_path;
  std::ostringstream hash;
  hash << "fnv1a64:" << std::hex << fnv1a64(text);
  lt.input_info["hash"] = hash.str();
  return lt;
}

Json assumption_json(const std::optional<ValueSet>& a) {
  if (!a) return nullptr;
  Json j;
  Json ivs = Json::array();
  for (const auto& [lo, hi] : a->intervals)
    ivs.push_back({std::to_string(lo), std::to_string(hi)});
  j["intervals"] = ivs;
  if (a->fixed) {
    j["fixed_bits"] = {{"mask", std::to_string(a->fixed->mask)},
                       {"bits", std::to_string(a->fixed->bits)}};
  } else {
    j["fixed_bits"] = nullptr;
  }
  return j;
}

Json stats_json(const SolverStats& s) {
  Json j;
  j["sat_queries"] = s.sat_queries;
  j["opt_queries"] = s.opt_queries;
  j["quantified_queries"] = s.quantified_queries;
  j["unknowns"] = s.unknowns;
  return j;
}

Json scores_json(const ControlDomain& domain, std::int64_t offset) {
  Json j;
  j["count"] = big_to_string(domain.count());
  j["qc"] = qc(domain);
  j["qc_bits"] = qc_bits(domain);
  j["transform_applied"] = offset != 0;
  Json wqc = Json::object();
  try {
    const ControlDomain scored =
        offset != 0 ? shift_domain(domain, offset) : domain;
    for (const char* name : {"log", "invsq", "invsqrt"})
      wqc[name] = wqc_auto(scored, *find_weight(name));
  } catch (const BudgetError&) {
    wqc = nullptr;  // pattern dissolution too large under this transform
  }
  j["wqc"] = wqc;
  return j;
}

struct AlgoOutcome {
  std::optional<ControlDomain> domain;
  std::vector<DensityInterval> newsome;
  Tri wc = Tri::Unknown;
  Tri sc = Tri::Unknown;
  bool definite = false;
};

AlgoOutcome run_algorithm(const std::string& algo, const LoadedTarget& lt,
                          Solver& solver, const CommonOptions& opts) {
  AlgoOutcome out;
  SnsConfig sns_cfg;
  sns_cfg.split_limit = opts.split_limit;
  sns_cfg.use_fixed_bits = algo == "snsfb";
  sns_cfg.solver = solver.config();

  if (algo == "sns") {
    out.domain = shrink_and_split(lt.state, lt.target, solver, sns_cfg);
  } else if (algo == "snsfb") {
    out.domain = sns_fixed_bits(lt.state, lt.target, solver, sns_cfg);
  } else if (algo == "brute") {
    out.domain = brute_force_domain(lt.state, lt.target, solver);
  } else if (algo == "newsome") {
    NewsomeConfig ncfg;
    ncfg.samples_per_interval = opts.samples;
    ncfg.confidence = opts.confidence;
    ncfg.max_intervals = opts.max_intervals;
    ncfg.rng_seed = opts.seed;
    out.newsome = newsome_domain(lt.state, lt.target, solver, ncfg);
    out.domain = newsome_to_domain(lt.target.width, out.newsome);
  } else if (algo == "wc") {
    WcResult wc = check_wc(lt.state, lt.target, solver);
    out.wc = wc.verdict;
    out.definite = wc.verdict != Tri::Unknown;
    return out;
  } else if (algo == "sc") {
    const ValueSet assumption = lt.target.assumption
                                    ? *lt.target.assumption
                                    : ValueSet::full(lt.target.width);
    ScCheck sc = check_sc(lt.state, lt.target, assumption, solver);
    out.sc = sc.verdict;
    out.definite = sc.verdict != Tri::Unknown;
    return out;
  } else {
    throw Error("unknown algorithm: " + algo);
  }

  out.definite = out.domain->exact;
  if (out.domain->exact) {
    const BigCount count = out.domain->count();
    out.wc = count >= 2 ? Tri::True : Tri::False;
    if (lt.target.assumption)
      out.sc = count == lt.target.assumption->count() ? Tri::True : Tri::False;
    else
      out.sc = out.domain->is_full() ? Tri::True : Tri::False;
  }
  return out;
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << content;
}

int cmd_analyze(const CommonOptions& opts, const std::string& algo) {
  const auto t0 = std::chrono::steady_clock::now();
  LoadedTarget lt = load_input(opts);
  auto solver = make_solver(solver_config(opts));
  AlgoOutcome result = run_algorithm(algo, lt, *solver, opts);
  const double wall_ms = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - t0)
                             .count();

  Json report;
  report["schema_version"] = 1;
  report["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
  report["input"] = lt.input_info;
  Json target;
  target["expr"] = to_smt2(lt.target.expr);
  target["width"] = lt.target.width;
  target["transform_offset"] = std::to_string(lt.target.offset);
  target["assumption"] = assumption_json(lt.target.assumption);
  report["target"] = target;
  report["algorithm"] = algo;
  Json config;
  config["solver"] = opts.solver;
  config["opt_mode"] = opts.opt_mode;
  config["timeout_ms"] = opts.timeout_ms;
  config["enum_budget_bits"] = opts.enum_budget;
  config["split_limit"] = opts.split_limit;
  config["seed"] = opts.seed;
  if (algo == "newsome") {
    config["samples_per_interval"] = opts.samples;
    config["confidence"] = opts.confidence;
    config["max_intervals"] = opts.max_intervals;
  }
  report["config"] = config;
  report["domain"] = result.domain ? domain_to_json(*result.domain) : Json();
  report["verdicts"] = {{"wc", tri_name(result.wc)},
                        {"sc", tri_name(result.sc)}};
  report["scores"] =
      result.domain ? scores_json(*result.domain, lt.target.offset) : Json();
  if (algo == "newsome")
    report["newsome_intervals"] = density_intervals_to_json(result.newsome);
  report["solver_stats"] = stats_json(solver->stats());
  report["seed"] = opts.seed;
  report["meta"] = {{"timestamp", current_timestamp()}, {"wall_ms", wall_ms}};

  write_output(opts.out_path, report.dump(2) + "\n");
  if (!opts.csv_path.empty() && result.domain) {
    std::vector<PlotRow> rows =
        plot_rows_from_domain(lt.target_name, *result.domain);
    if (algo == "newsome") {
      rows.clear();
      for (const auto& di : result.newsome)
        rows.push_back(
            {lt.target_name, di.lo, di.hi, Guarantee::Weak, di.density});
    }
    write_output(opts.csv_path, emit_plot_csv(rows));
  }
  return result.definite ? 0 : 2;
}

struct DomainFile {
  ControlDomain domain;
  std::int64_t offset = 0;
};

DomainFile load_domain_file(const std::string& path) {
  Json j = Json::parse(read_file(path));
  DomainFile df;
  if (j.is_object() && j.contains("domain") && !j.at("domain").is_null()) {
    df.domain = domain_from_json(j.at("domain"));
    if (j.contains("target") && j.at("target").contains("transform_offset"))
      df.offset =
          std::stoll(j.at("target").at("transform_offset").get<std::string>());
    return df;
  }
  df.domain = domain_from_json(j);
  return df;
}

struct ScoreOptions {
  std::string recipe;
  std::string weight = "log";
  std::string weight_file;
  std::string offset_file;
  std::string size_file;
  std::string pointer_file;
  std::vector<std::string> byte_files;
  std::int64_t shift = 0;
  bool shift_set = false;
  unsigned width = 0;
  std::string out_path;
};

int cmd_score(const ScoreOptions& opts) {
  WeightFn weight = weight_log();
  if (!opts.weight_file.empty()) {
    weight = load_weight_file(opts.weight_file);
  } else {
    auto found = find_weight(opts.weight);
    if (!found) throw Error("unknown weight: " + opts.weight);
    weight = *found;
  }

  auto load_shifted = [&](const std::string& path) {
    DomainFile df = load_domain_file(path);
    const std::int64_t off = opts.shift_set ? opts.shift : df.offset;
    return off != 0 ? shift_domain(df.domain, off) : df.domain;
  };

  Json out;
  out["recipe"] = opts.recipe;
  out["weight"] = weight.name;
  double score = 0.0;

  if (opts.recipe == "oob-write" || opts.recipe == "oob-read") {
    std::optional<ControlDomain> offset_domain, size_domain;
    if (!opts.offset_file.empty()) offset_domain = load_shifted(opts.offset_file);
    if (!opts.size_file.empty()) size_domain = load_shifted(opts.size_file);
    unsigned w = opts.width;
    if (w == 0 && size_domain) w = size_domain->width;
    if (w == 0 && offset_domain) w = offset_domain->width;
    if (w == 0) throw Error("cannot infer the score width");
    score = score_oob(offset_domain, size_domain, w, weight);
    Json comps;
    comps["offset"] =
        offset_domain ? Json(wqc_auto(*offset_domain, weight)) : Json();
    comps["size"] = size_domain ? Json(wqc_auto(*size_domain, weight)) : Json();
    out["components"] = comps;
    out["width"] = w;
  } else if (opts.recipe == "cfh") {
    if (opts.pointer_file.empty()) throw Error("cfh scoring needs --pointer");
    score = score_cfh(load_shifted(opts.pointer_file));
  } else if (opts.recipe == "data") {
    if (opts.byte_files.empty()) throw Error("data scoring needs --byte files");
    std::vector<ControlDomain> bytes;
    for (const auto& f : opts.byte_files) bytes.push_back(load_shifted(f));
    score = score_data(bytes);
  } else {
    throw Error("unknown recipe: " + opts.recipe);
  }

  out["score"] = score;
  out["band"] = band_label(score, default_cutoffs(opts.recipe));
  write_output(opts.out_path, out.dump(2) + "\n");
  return 0;
}

int cmd_compare(const CommonOptions& opts, const std::string& algos_csv) {
  LoadedTarget lt = load_input(opts);
  std::vector<std::string> algos;
  std::stringstream ss(algos_csv);
  std::string item;
  while (std::getline(ss, item, ',')) algos.push_back(item);
  if (algos.empty()) throw Error("no algorithms to compare");

  std::optional<ControlDomain> brute;
  Json table = Json::array();
  struct Row {
    std::string algo;
    ControlDomain domain;
    double wall_ms;
    SolverStats stats;
  };
  std::vector<Row> rows;
  for (const auto& algo : algos) {
    auto solver = make_solver(solver_config(opts));
    const auto t0 = std::chrono::steady_clock::now();
    AlgoOutcome result = run_algorithm(algo, lt, *solver, opts);
    const double wall_ms = std::chrono::duration<double, std::milli>(
                               std::chrono::steady_clock::now() - t0)
                               .count();
    if (!result.domain)
      throw Error("compare expects domain-producing algorithms, got " + algo);
    if (algo == "brute") brute = result.domain;
    rows.push_back({algo, *result.domain, wall_ms, solver->stats()});
  }

  for (const auto& row : rows) {
    Json e;
    e["algorithm"] = row.algo;
    e["exact"] = row.domain.exact;
    e["count"] = big_to_string(row.domain.count());
    e["intervals"] = row.domain.intervals.size();
    e["splits_used"] = row.domain.splits_used;
    e["budget_exhausted"] = row.domain.budget_exhausted;
    e["solver_stats"] = stats_json(row.stats);
    e["wall_ms"] = row.wall_ms;
    if (brute) {
      const bool sub = domain_subset(row.domain, *brute);
      const bool sup = domain_subset(*brute, row.domain);
      e["vs_brute"] = sub && sup ? "equal"
                      : sub      ? "subset"
                      : sup      ? "superset"
                                 : "incomparable";
    } else {
      e["vs_brute"] = nullptr;
    }
    table.push_back(e);
  }

  Json out;
  out["input"] = lt.input_info;
  out["target"] = to_smt2(lt.target.expr);
  out["width"] = lt.target.width;
  out["results"] = table;
  write_output(opts.out_path, out.dump(2) + "\n");

  std::ostringstream text;
  text << "algorithm   exact  count        intervals  splits  queries  vs-brute\n";
  for (const auto& e : table) {
    std::uint64_t queries = e["solver_stats"]["sat_queries"].get<std::uint64_t>() +
                            e["solver_stats"]["opt_queries"].get<std::uint64_t>() +
                            e["solver_stats"]["quantified_queries"].get<std::uint64_t>();
    std::ostringstream line;
    line.width(12);
    line << std::left << e["algorithm"].get<std::string>();
    line.width(7);
    line << std::left << (e["exact"].get<bool>() ? "yes" : "no");
    line.width(13);
    line << std::left << e["count"].get<std::string>();
    line.width(11);
    line << std::left << e["intervals"].get<std::size_t>();
    line.width(8);
    line << std::left << e["splits_used"].get<unsigned>();
    line.width(9);
    line << std::left << queries;
    line << (e["vs_brute"].is_null() ? "-" : e["vs_brute"].get<std::string>());
    text << line.str() << "\n";
  }
  std::cerr << text.str();
  return 0;
}

int cmd_fixtures(bool show_ir, const std::string& name) {
  if (!name.empty()) {
    const toy::Fixture& fx = toy::fixture_by_name(name);
    std::cout << fx.name << ": " << fx.description << "\n";
    std::cout << "input:";
    for (const auto& [k, v] : fx.triggering_input)
      std::cout << " " << k << "=" << v;
    std::cout << "\n";
    if (show_ir) std::cout << fx.ir_text;
    return 0;
  }
  for (const auto& fx : toy::builtin_fixtures())
    std::cout << fx.name << "  -  " << fx.description << "\n";
  return 0;
}

int cmd_plot_data(const std::string& report_path, const std::string& out_path) {
  Json j = Json::parse(read_file(report_path));
  if (!j.contains("domain") || j.at("domain").is_null())
    throw Error("report has no domain to plot");
  ControlDomain d = domain_from_json(j.at("domain"));
  std::string name = "target";
  if (j.contains("input") && j.at("input").contains("name"))
    name = j.at("input").at("name").get<std::string>();
  write_output(out_path, emit_plot_csv(plot_rows_from_domain(name, d)));
  return 0;
}

void add_common(CLI::App* cmd, CommonOptions& opts, bool needs_input) {
  auto* smt2 = cmd->add_option("--smt2", opts.smt2_path,
                               "input constraint file (SMT-LIB2 subset)");
  auto* fixture =
      cmd->add_option("--fixture", opts.fixture, "builtin fixture name");
  if (needs_input) {
    smt2->excludes(fixture);
    fixture->excludes(smt2);
  }
  cmd->add_option("--sink", opts.sink, "sink label for fixtures with several");
  cmd->add_option("--solver", opts.solver, "internal|external")
      ->check(CLI::IsMember({"internal", "external"}));
  cmd->add_option("--solver-cmd", opts.solver_cmd,
                  "external solver command (default: CTRL_SOLVER_CMD)");
  cmd->add_option("--opt-mode", opts.opt_mode, "native|binsearch")
      ->check(CLI::IsMember({"native", "binsearch"}));
  cmd->add_option("--timeout", opts.timeout_ms, "per-query timeout (ms)");
  cmd->add_option("--enum-budget", opts.enum_budget,
                  "internal backend input-bit budget");
  cmd->add_option("--split-limit", opts.split_limit, "split budget");
  cmd->add_option("--seed", opts.seed, "rng seed (sampling baseline)");
  cmd->add_option("--samples", opts.samples, "samples per interval");
  cmd->add_option("--confidence", opts.confidence, "density confidence level");
  cmd->add_option("--max-intervals", opts.max_intervals,
                  "sampling interval budget");
  cmd->add_option("--out", opts.out_path, "report path (default: stdout)");
  cmd->add_option("--csv", opts.csv_path, "interval dump CSV path");
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"attacker-control domain extraction and scoring"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  CommonOptions analyze_opts;
  std::string algo = "sns";
  auto* analyze = app.add_subcommand("analyze", "extract a control domain");
  add_common(analyze, analyze_opts, true);
  analyze->add_option("--algo", algo, "sns|snsfb|newsome|brute|wc|sc")
      ->check(CLI::IsMember({"sns", "snsfb", "newsome", "brute", "wc", "sc"}));

  ScoreOptions score_opts;
  auto* score = app.add_subcommand("score", "score stored domains");
  score->add_option("--recipe", score_opts.recipe, "oob-write|oob-read|cfh|data")
      ->required()
      ->check(CLI::IsMember({"oob-write", "oob-read", "cfh", "data"}));
  score->add_option("--weight", score_opts.weight,
                    "weight name (log, invsq, invsqrt, uniform, cfh-valid, "
                    "dist:<base>:<bound>)");
  score->add_option("--weight-file", score_opts.weight_file,
                    "piecewise weight JSON file");
  score->add_option("--offset", score_opts.offset_file, "offset domain JSON");
  score->add_option("--size", score_opts.size_file, "size domain JSON");
  score->add_option("--pointer", score_opts.pointer_file,
                    "pointer domain JSON");
  score->add_option("--byte", score_opts.byte_files,
                    "byte domain JSON (repeat, up to 8)");
  auto* shift_opt = score->add_option("--shift", score_opts.shift,
                                      "override the stored rendering offset");
  score->add_option("--width", score_opts.width, "score width override");
  score->add_option("--out", score_opts.out_path, "output path");

  CommonOptions compare_opts;
  std::string algos_csv = "sns,snsfb,newsome,brute";
  auto* compare = app.add_subcommand("compare", "run several algorithms");
  add_common(compare, compare_opts, true);
  compare->add_option("--algos", algos_csv, "comma-separated algorithm list");

  bool fixtures_show = false;
  std::string fixtures_name;
  auto* fixtures = app.add_subcommand("fixtures", "list builtin fixtures");
  fixtures->add_flag("--show", fixtures_show, "print the fixture IR");
  fixtures->add_option("--name", fixtures_name, "single fixture to describe");

  std::string plot_report, plot_out;
  auto* plot = app.add_subcommand("plot-data", "interval CSV from a report");
  plot->add_option("report", plot_report, "report JSON path")->required();
  plot->add_option("--out", plot_out, "output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*analyze) {
      if (analyze_opts.smt2_path.empty() && analyze_opts.fixture.empty())
        throw Error("analyze needs --smt2 or --fixture");
      return cmd_analyze(analyze_opts, algo);
    }
    if (*score) {
      score_opts.shift_set = shift_opt->count() > 0;
      return cmd_score(score_opts);
    }
    if (*compare) {
      if (compare_opts.smt2_path.empty() && compare_opts.fixture.empty())
        throw Error("compare needs --smt2 or --fixture");
      return cmd_compare(compare_opts, algos_csv);
    }
    if (*fixtures) return cmd_fixtures(fixtures_show, fixtures_name);
    if (*plot) return cmd_plot_data(plot_report, plot_out);
  } catch (const std::exception& e) {
    std::cerr << kToolName << ": error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

int run(const std::vector<std::string>& args) {
  std::vector<std::string> storage = args;
  storage.insert(storage.begin(), kToolName);
  std::vector<char*> argv;
  argv.reserve(storage.size());
  for (auto& s : storage) argv.push_back(s.data());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace ctrl::cli
