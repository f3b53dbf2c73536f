#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tgbtsp/betadist.hpp"
#include "tgbtsp/error.hpp"
#include "tgbtsp/heuristics.hpp"
#include "tgbtsp/instance.hpp"
#include "tgbtsp/serialize.hpp"
#include "tgbtsp/tgb.hpp"
#include "tgbtsp/tour.hpp"

namespace tgbtsp::cli {

inline constexpr const char* kWorkersEnv = "TGB_TSP_WORKERS";
inline constexpr std::size_t kQuickEnumerationLimit = 12;  // larger n needs --allow-long
inline constexpr std::size_t kHardEnumerationCap = 14;

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error("usage", what) {}
};

struct RunConfig {
  std::string command;
  // Input: exactly one of these, or instance JSON on stdin.
  std::string tsplib;
  std::string instance_json;
  std::optional<std::size_t> gen_n;
  std::uint64_t seed = 1;
  bool plain_euclidean = false;

  std::uint64_t sample_size = 100000;
  std::string format;  // empty: csv for histogram, json otherwise
  std::string out;
  unsigned workers = 1;
  std::size_t cap = kHardEnumerationCap;
  bool allow_long = false;
  bool exact = false;
  std::size_t restarts = 20;

  // fit
  std::optional<double> A, mean, variance, skewness, kurtosis;
  bool four_moments = false;
  // christofides / kopt
  bool greedy_matching = false;
  int k = 3;
  std::string strategy = "first";
  std::string start = "christofides";
  // tgb
  std::optional<double> target_ratio;
  std::size_t schedule_rows = 200;
  std::uint64_t max_K = 1000000;
  // histogram
  std::size_t bins = 60;
  std::optional<double> lo, hi;
  // report
  std::vector<std::string> files;
};

inline unsigned default_workers() {
  if (const char* v = std::getenv(kWorkersEnv)) {
    try {
      const long w = std::stol(v);
      if (w >= 1) return static_cast<unsigned>(w);
    } catch (const std::exception&) {
    }
  }
  return 1;
}

struct Io {
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
};

// ---------------------------------------------------------------------------
// Input and output plumbing.

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot read file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline Instance load_tsplib_file(const std::string& path) { return parse_tsplib(read_file(path)); }

inline Instance load_instance(const RunConfig& cfg, Io& io) {
  const int given = !cfg.tsplib.empty() + !cfg.instance_json.empty() + cfg.gen_n.has_value();
  if (given > 1) throw UsageError("give at most one of --tsplib, --instance, --n");
  Instance inst;
  if (!cfg.tsplib.empty()) {
    inst = load_tsplib_file(cfg.tsplib);
  } else if (cfg.gen_n) {
    inst = generate_random(*cfg.gen_n, cfg.seed);
  } else {
    std::string text;
    if (cfg.instance_json.empty() || cfg.instance_json == "-") {
      std::ostringstream ss;
      ss << io.in.rdbuf();
      text = ss.str();
    } else {
      text = read_file(cfg.instance_json);
    }
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
      throw UsageError("no instance given: use --tsplib, --instance, --n, or pipe instance JSON on stdin");
    }
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      throw ParseError("malformed-json", std::string("instance JSON: ") + e.what());
    }
    inst = instance_from_json(j.contains("instance") ? j["instance"] : j);
  }
  if (cfg.plain_euclidean) inst = as_plain_euclidean(std::move(inst));
  return inst;
}

inline json meta(const RunConfig& cfg, const std::optional<Instance>& inst) {
  json m;
  m["tool"] = "tgb-tsp";
  m["tool_version"] = kToolVersion;
  m["command"] = cfg.command;
  m["seed"] = cfg.seed;
  m["instance_checksum"] = inst ? json(instance_checksum(*inst)) : json(nullptr);
  return m;
}

inline void emit(const RunConfig& cfg, Io& io, const std::string& text) {
  if (cfg.out.empty()) {
    io.out << text;
    io.out.flush();
    return;
  }
  std::ofstream f(cfg.out, std::ios::binary);
  if (!f) throw UsageError("cannot write '" + cfg.out + "'");
  f << text;
}

inline void emit_json(const RunConfig& cfg, Io& io, const json& doc) { emit(cfg, io, doc.dump(2) + "\n"); }

inline EnumerationOptions enumeration_options(const RunConfig& cfg, Io& io, std::size_t n) {
  if (n > cfg.cap) {
    throw UsageError("exact enumeration of n=" + std::to_string(n) + " exceeds the cap " + std::to_string(cfg.cap));
  }
  if (n > kQuickEnumerationLimit && !cfg.allow_long) {
    throw UsageError("exact enumeration of n=" + std::to_string(n) + " is long-running; pass --allow-long");
  }
  EnumerationOptions eo;
  eo.cap = cfg.cap;
  eo.allow_above_cap = false;
  eo.workers = cfg.workers;
  if (n > kQuickEnumerationLimit) {
    std::ostream* err = &io.err;
    eo.progress = [err](std::size_t done, std::size_t total) {
      *err << "enumerate: " << done << '/' << total << " shards\n";
      err->flush();
    };
  }
  return eo;
}

inline bool enumerable_by_default(const RunConfig& cfg, std::size_t n) {
  return n <= std::min(cfg.cap, cfg.allow_long ? kHardEnumerationCap : kQuickEnumerationLimit);
}

// ---------------------------------------------------------------------------
// Commands.

inline int cmd_gen(const RunConfig& cfg, Io& io) {
  if (!cfg.gen_n) throw UsageError("gen requires --n");
  const Instance inst = generate_random(*cfg.gen_n, cfg.seed);
  if (cfg.format == "tsplib") {
    emit(cfg, io, write_tsplib_explicit(inst));
    return 0;
  }
  json doc;
  doc["meta"] = meta(cfg, inst);
  doc["instance"] = to_json(inst);
  emit_json(cfg, io, doc);
  return 0;
}

inline MomentSet compute_moments(const RunConfig& cfg, Io& io, const CostMatrix& c, bool exact) {
  if (exact) return enumerate_tours(c, enumeration_options(cfg, io, c.size()));
  return sample_moments(c, cfg.sample_size, cfg.seed, cfg.workers);
}

inline int cmd_moments(const RunConfig& cfg, Io& io) {
  const Instance inst = load_instance(cfg, io);
  const CostMatrix c = materialize_costs(inst);
  const MomentSet m = compute_moments(cfg, io, c, cfg.exact);
  json doc;
  doc["meta"] = meta(cfg, inst);
  doc["instance"] = inst.name;
  doc["n"] = inst.n;
  doc["moments"] = to_json(m);
  if (c.size() >= 5) {
    doc["closed_form"] = {{"mean", number(exact_mean(c))}, {"variance", number(exact_variance(c))}};
  }
  if (cfg.format == "csv") {
    std::ostringstream o;
    o.precision(17);
    o << "instance,n,basis,mean,variance,skewness,kurtosis,min,max\n"
      << inst.name << ',' << inst.n << ',' << to_string(m.basis) << ',' << m.mean << ',' << m.variance << ','
      << m.skewness << ',' << m.kurtosis << ',';
    if (m.min) o << *m.min;
    o << ',';
    if (m.max) o << *m.max;
    o << '\n';
    emit(cfg, io, o.str());
    return 0;
  }
  emit_json(cfg, io, doc);
  return 0;
}

inline int cmd_enumerate(const RunConfig& cfg, Io& io) {
  const Instance inst = load_instance(cfg, io);
  const CostMatrix c = materialize_costs(inst);
  const EnumerationOptions eo = enumeration_options(cfg, io, c.size());
  const MomentSet m = enumerate_tours(c, eo);
  const ExtremeTours ext = enumerate_extreme_tours(c, eo);
  json doc;
  doc["meta"] = meta(cfg, inst);
  doc["instance"] = inst.name;
  doc["n"] = inst.n;
  doc["tour_count"] = canonical_tour_count(c.size());
  doc["moments"] = to_json(m);
  doc["shortest"] = to_json(ext.shortest);
  doc["longest"] = to_json(ext.longest);
  emit_json(cfg, io, doc);
  return 0;
}

inline double best_lower_bound(const RunConfig& cfg, Io& io, const CostMatrix& c, const MomentSet& m, bool exact,
                               std::string& source) {
  if (cfg.A) {
    source = "supplied";
    return *cfg.A;
  }
  if (exact && m.min) {
    source = "enumeration";
    return *m.min;
  }
  (void)io;
  source = "heuristic-best";
  return multi_start_three_opt(c, cfg.restarts, cfg.seed).length;
}

inline int cmd_fit(const RunConfig& cfg, Io& io) {
  json doc;
  GBParams p;
  std::optional<Instance> inst;
  if (cfg.mean || cfg.variance || cfg.skewness) {
    if (!cfg.mean || !cfg.variance || !cfg.skewness) {
      throw UsageError("numeric fit needs --mean, --variance and --skewness");
    }
    MomentSet m;
    m.mean = *cfg.mean;
    m.variance = *cfg.variance;
    m.skewness = *cfg.skewness;
    if (cfg.four_moments) {
      if (!cfg.kurtosis) throw UsageError("--four-moments needs --kurtosis");
      m.kurtosis = *cfg.kurtosis;
      p = fit_from_four_moments(m);
      doc["method"] = "four-moments";
    } else {
      if (!cfg.A) throw UsageError("numeric bound fit needs --A");
      BoundFitDiagnostics d;
      p = fit_from_bound_and_moments(*cfg.A, m.mean, m.variance, m.skewness, &d);
      doc["method"] = "bound-and-moments";
      doc["diagnostics"] = to_json(d);
    }
    doc["meta"] = meta(cfg, inst);
  } else {
    inst = load_instance(cfg, io);
    const CostMatrix c = materialize_costs(*inst);
    const bool exact = cfg.exact || enumerable_by_default(cfg, c.size());
    MomentSet m = compute_moments(cfg, io, c, exact);
    if (!exact && c.size() >= 5) {
      m.mean = exact_mean(c);
      m.variance = exact_variance(c);
    }
    doc["meta"] = meta(cfg, inst);
    doc["instance"] = inst->name;
    doc["moments"] = to_json(m);
    if (cfg.four_moments) {
      p = fit_from_four_moments(m);
      doc["method"] = "four-moments";
    } else {
      std::string source;
      const double A = best_lower_bound(cfg, io, c, m, exact, source);
      BoundFitDiagnostics d;
      p = fit_from_bound_and_moments(A, m.mean, m.variance, m.skewness, &d);
      doc["method"] = "bound-and-moments";
      doc["A_source"] = source;
      doc["diagnostics"] = to_json(d);
    }
  }
  doc["params"] = to_json(p);
  if (cfg.format == "csv") {
    std::ostringstream o;
    o.precision(17);
    o << "alpha,beta,A,B\n" << p.alpha << ',' << p.beta << ',' << p.A << ',' << p.B << '\n';
    emit(cfg, io, o.str());
    return 0;
  }
  emit_json(cfg, io, doc);
  return 0;
}

inline int cmd_christofides(const RunConfig& cfg, Io& io) {
  const Instance inst = load_instance(cfg, io);
  const HeuristicResult r = christofides(inst, cfg.greedy_matching ? MatchingMode::greedy : MatchingMode::exact);
  json doc;
  doc["meta"] = meta(cfg, inst);
  doc["instance"] = inst.name;
  doc["result"] = to_json(r);
  emit_json(cfg, io, doc);
  return 0;
}

inline int cmd_kopt(const RunConfig& cfg, Io& io) {
  const Instance inst = load_instance(cfg, io);
  const CostMatrix c = materialize_costs(inst);
  if (cfg.k != 2 && cfg.k != 3) throw UsageError("--k must be 2 or 3");
  KOptOptions o;
  o.k = cfg.k;
  o.strategy = cfg.strategy == "best" ? ImprovementStrategy::best_improvement : ImprovementStrategy::first_improvement;
  Tour start;
  if (cfg.start == "christofides") {
    start = christofides(c).tour;
  } else if (cfg.start == "random") {
    start = sample_tour(c.size(), cfg.seed, 0);
  } else {
    start.order.resize(c.size());
    std::iota(start.order.begin(), start.order.end(), 0);
  }
  const double start_length = tour_length(start, c);
  const HeuristicResult r = k_opt_improve(start, c, o);
  json doc;
  doc["meta"] = meta(cfg, inst);
  doc["instance"] = inst.name;
  doc["start"] = cfg.start;
  doc["start_length"] = number(start_length);
  doc["result"] = to_json(r);
  emit_json(cfg, io, doc);
  return 0;
}

inline int cmd_maxtsp(const RunConfig& cfg, Io& io) {
  const Instance inst = load_instance(cfg, io);
  const CostMatrix c = materialize_costs(inst);
  const MaxTourEstimate est = max_tour_estimate(c, cfg.restarts, cfg.seed);
  json doc;
  doc["meta"] = meta(cfg, inst);
  doc["instance"] = inst.name;
  doc["length"] = number(est.length);
  doc["tour"] = est.tour.order;
  doc["restarts"] = cfg.restarts;
  if (c.size() >= 20) {
    const RegressionParams g = regression_params(c.size());
    doc["regression_B"] = number(g.B);
  }
  emit_json(cfg, io, doc);
  return 0;
}

inline TgbConfig tgb_config(const RunConfig& cfg, Io& io) {
  TgbConfig t;
  t.enumeration_cap = std::min(cfg.cap, cfg.allow_long ? kHardEnumerationCap : kQuickEnumerationLimit);
  t.workers = cfg.workers;
  t.sample_size = cfg.sample_size;
  t.seed = cfg.seed;
  t.restarts = cfg.restarts;
  t.supplied_A = cfg.A;
  t.target_ratio = cfg.target_ratio;
  t.max_K = cfg.max_K;
  std::ostream* err = &io.err;
  t.progress = [err](std::size_t done, std::size_t total) {
    *err << "enumerate: " << done << '/' << total << " shards\n";
  };
  return t;
}

inline int cmd_tgb(const RunConfig& cfg, Io& io) {
  const Instance inst = load_instance(cfg, io);
  const TgbReport r = tgb_report(inst, tgb_config(cfg, io));
  if (cfg.format == "csv") {
    emit(cfg, io, report_csv_header() + report_csv_row(r));
  } else {
    json doc;
    doc["meta"] = meta(cfg, inst);
    doc["report"] = to_json(r, cfg.schedule_rows);
    emit_json(cfg, io, doc);
  }
  return r.complete() ? 0 : 1;
}

inline int cmd_histogram(const RunConfig& cfg, Io& io) {
  const Instance inst = load_instance(cfg, io);
  const CostMatrix c = materialize_costs(inst);
  const bool exact = cfg.exact || enumerable_by_default(cfg, c.size());
  Histogram h;
  MomentSet m;
  if (exact) {
    const EnumerationOptions eo = enumeration_options(cfg, io, c.size());
    m = enumerate_tours(c, eo);
    const double lo = cfg.lo.value_or(*m.min), hi = cfg.hi.value_or(*m.max);
    HistogramBuilder b(cfg.bins, lo, hi > lo ? hi : lo + 1.0);
    enumerate_tours(c, b, eo);
    h = b.finish();
  } else {
    std::vector<double> lengths(cfg.sample_size);
    for (std::uint64_t s = 0; s < cfg.sample_size; ++s) lengths[s] = tour_length(sample_tour(c.size(), cfg.seed, s), c);
    const auto [mn, mx] = std::minmax_element(lengths.begin(), lengths.end());
    const double lo = cfg.lo.value_or(*mn), hi = cfg.hi.value_or(*mx);
    h = histogram(lengths, cfg.bins, lo, hi > lo ? hi : lo + 1.0);
    m = sample_moments(c, std::max<std::uint64_t>(cfg.sample_size, 1000), cfg.seed, cfg.workers);
  }
  if (cfg.format == "json") {
    json doc;
    doc["meta"] = meta(cfg, inst);
    doc["instance"] = inst.name;
    doc["basis"] = exact ? "exact-enumeration" : "sampled";
    doc["moments"] = to_json(m);
    doc["histogram"] = to_json(h);
    emit_json(cfg, io, doc);
  } else {
    std::ostringstream o;
    o << "# tool_version=" << kToolVersion << " seed=" << cfg.seed << " instance_checksum=" << instance_checksum(inst)
      << " basis=" << (exact ? "exact-enumeration" : "sampled") << '\n';
    emit(cfg, io, o.str() + histogram_csv(h));
  }
  return 0;
}

inline int cmd_report(const RunConfig& cfg, Io& io) {
  if (cfg.files.empty()) throw UsageError("report needs one or more TSPLIB files");
  const TgbConfig t = tgb_config(cfg, io);
  std::vector<TgbReport> reports;
  std::vector<Instance> insts;
  for (const auto& f : cfg.files) {
    Instance inst = load_tsplib_file(f);
    if (cfg.plain_euclidean) inst = as_plain_euclidean(std::move(inst));
    reports.push_back(tgb_report(inst, t));
    insts.push_back(std::move(inst));
  }
  bool ok = true;
  for (const auto& r : reports) ok = ok && r.complete();
  if (cfg.format == "csv") {
    std::string text = report_csv_header();
    for (const auto& r : reports) text += report_csv_row(r);
    emit(cfg, io, text);
  } else {
    json doc;
    doc["meta"] = meta(cfg, std::nullopt);
    json checks = json::array();
    for (const auto& inst : insts) checks.push_back(instance_checksum(inst));
    doc["meta"]["instance_checksum"] = std::move(checks);
    json arr = json::array();
    for (const auto& r : reports) arr.push_back(to_json(r, cfg.schedule_rows));
    doc["reports"] = std::move(arr);
    emit_json(cfg, io, doc);
  }
  return ok ? 0 : 1;
}

// ---------------------------------------------------------------------------
// Entry point.

inline int run(const std::vector<std::string>& args, std::istream& in = std::cin, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  Io io{in, out, err};
  RunConfig cfg;
  cfg.workers = default_workers();

  CLI::App app{"Tour-length distribution modelling for the symmetric TSP", "tgb-tsp"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", kToolVersion);

  auto add_input = [&](CLI::App* s) {
    s->add_option("--tsplib", cfg.tsplib, "TSPLIB instance file");
    s->add_option("--instance", cfg.instance_json, "instance JSON file ('-' = stdin)");
    s->add_option("--n", cfg.gen_n, "generate a random unit-square instance with n nodes")->check(CLI::Range(3, 100000));
    s->add_flag("--plain-euclidean", cfg.plain_euclidean, "read coordinates as planar points with unrounded distances");
  };
  auto add_common = [&](CLI::App* s) {
    s->add_option("--seed", cfg.seed, "random seed");
    s->add_option("--out", cfg.out, "output path (default stdout)");
    s->add_option("--workers", cfg.workers, std::string("worker threads (default $") + kWorkersEnv + " or 1)")
        ->check(CLI::PositiveNumber);
  };
  auto add_enum = [&](CLI::App* s) {
    s->add_option("--cap", cfg.cap, "largest n allowed for exact enumeration")->check(CLI::Range(std::size_t{3}, kHardEnumerationCap));
    s->add_flag("--allow-long", cfg.allow_long, "permit enumeration with n >= 13");
  };
  auto add_format = [&](CLI::App* s, std::vector<std::string> choices) {
    s->add_option("--format", cfg.format, "output format")->check(CLI::IsMember(std::move(choices)));
  };

  auto* gen = app.add_subcommand("gen", "generate a seeded random instance");
  gen->add_option("--n", cfg.gen_n, "number of nodes")->required()->check(CLI::Range(3, 100000));
  add_common(gen);
  add_format(gen, {"json", "tsplib"});

  auto* moments = app.add_subcommand("moments", "mean, variance, skewness and kurtosis of tour lengths");
  add_input(moments);
  add_common(moments);
  add_enum(moments);
  add_format(moments, {"json", "csv"});
  moments->add_flag("--exact", cfg.exact, "exact enumeration instead of sampling");
  moments->add_option("--sample-size", cfg.sample_size, "tours sampled")->check(CLI::Range(1000ULL, 1ULL << 40));

  auto* enumerate = app.add_subcommand("enumerate", "enumerate every tour: moments and extreme tours");
  add_input(enumerate);
  add_common(enumerate);
  add_enum(enumerate);

  auto* fit = app.add_subcommand("fit", "fit GB parameters from an instance or from given moments");
  add_input(fit);
  add_common(fit);
  add_enum(fit);
  add_format(fit, {"json", "csv"});
  fit->add_flag("--exact", cfg.exact, "exact enumeration for the moments");
  fit->add_option("--sample-size", cfg.sample_size, "tours sampled")->check(CLI::Range(1000ULL, 1ULL << 40));
  fit->add_flag("--four-moments", cfg.four_moments, "fit all four parameters from four moments");
  fit->add_option("--A", cfg.A, "lower support bound");
  fit->add_option("--mean", cfg.mean, "mean");
  fit->add_option("--variance", cfg.variance, "variance");
  fit->add_option("--skewness", cfg.skewness, "skewness");
  fit->add_option("--kurtosis", cfg.kurtosis, "kurtosis (ordinary, normal = 3)");
  fit->add_option("--restarts", cfg.restarts, "random-start 3-opt runs for the lower bound");

  auto* chris = app.add_subcommand("christofides", "Christofides tour");
  add_input(chris);
  add_common(chris);
  chris->add_flag("--greedy-matching", cfg.greedy_matching, "greedy instead of exact matching");

  auto* kopt = app.add_subcommand("kopt", "2-opt / 3-opt local search");
  add_input(kopt);
  add_common(kopt);
  kopt->add_option("--k", cfg.k, "2 or 3")->check(CLI::IsMember({2, 3}));
  kopt->add_option("--strategy", cfg.strategy, "first or best improvement")->check(CLI::IsMember({"first", "best"}));
  kopt->add_option("--start", cfg.start, "start tour")->check(CLI::IsMember({"christofides", "random", "identity"}));

  auto* maxtsp = app.add_subcommand("maxtsp", "heuristic maximum tour length");
  add_input(maxtsp);
  add_common(maxtsp);
  maxtsp->add_option("--restarts", cfg.restarts, "random-start 3-opt runs");

  auto add_tgb = [&](CLI::App* s) {
    add_common(s);
    add_enum(s);
    add_format(s, {"json", "csv"});
    s->add_option("--sample-size", cfg.sample_size, "tours sampled")->check(CLI::Range(1000ULL, 1ULL << 40));
    s->add_option("--restarts", cfg.restarts, "random-start 3-opt runs for the bounds");
    s->add_option("--A", cfg.A, "supply the lower bound");
    s->add_option("--target-ratio", cfg.target_ratio, "report the minimum iteration count for this ratio");
    s->add_option("--schedule-rows", cfg.schedule_rows, "schedule rows kept in JSON (0 = all)");
    s->add_option("--max-k", cfg.max_K, "iteration limit")->check(CLI::PositiveNumber);
  };
  auto* tgb = app.add_subcommand("tgb", "full truncation report for one instance");
  add_input(tgb);
  add_tgb(tgb);

  auto* hist = app.add_subcommand("histogram", "tour-length histogram");
  add_input(hist);
  add_common(hist);
  add_enum(hist);
  add_format(hist, {"json", "csv"});
  hist->add_option("--bins", cfg.bins, "number of bins")->check(CLI::Range(2, 1000000));
  hist->add_flag("--exact", cfg.exact, "exact enumeration instead of sampling");
  hist->add_option("--sample-size", cfg.sample_size, "tours sampled")->check(CLI::Range(1000ULL, 1ULL << 40));
  hist->add_option("--lo", cfg.lo, "lower histogram edge");
  hist->add_option("--hi", cfg.hi, "upper histogram edge");

  auto* report = app.add_subcommand("report", "truncation reports over several TSPLIB files");
  report->add_option("files", cfg.files, "TSPLIB files")->required();
  report->add_flag("--plain-euclidean", cfg.plain_euclidean, "read coordinates as planar points with unrounded distances");
  add_tgb(report);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "tgb-tsp: " << e.what() << '\n';
    return 2;
  }
  if (cfg.format.empty()) cfg.format = hist->parsed() ? "csv" : "json";

  CLI::App* sub = app.get_subcommands().front();
  cfg.command = sub->get_name();
  try {
    if (cfg.command == "gen") return cmd_gen(cfg, io);
    if (cfg.command == "moments") return cmd_moments(cfg, io);
    if (cfg.command == "enumerate") return cmd_enumerate(cfg, io);
    if (cfg.command == "fit") return cmd_fit(cfg, io);
    if (cfg.command == "christofides") return cmd_christofides(cfg, io);
    if (cfg.command == "kopt") return cmd_kopt(cfg, io);
    if (cfg.command == "maxtsp") return cmd_maxtsp(cfg, io);
    if (cfg.command == "tgb") return cmd_tgb(cfg, io);
    if (cfg.command == "histogram") return cmd_histogram(cfg, io);
    if (cfg.command == "report") return cmd_report(cfg, io);
  } catch (const UsageError& e) {
    err << "tgb-tsp: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "tgb-tsp: " << e.kind() << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "tgb-tsp: " << e.what() << '\n';
    return 1;
  }
  err << "tgb-tsp: unknown command\n";
  return 2;
}

inline int run(int argc, char** argv, std::istream& in = std::cin, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, in, out, err);
}

}  // namespace tgbtsp::cli
