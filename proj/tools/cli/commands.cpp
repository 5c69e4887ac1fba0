#include "cli/commands.hpp"

#include <cmath>
#include <iostream>
#include <sstream>

#include "memlb/encoding.hpp"
#include "memlb/errors.hpp"
#include "memlb/game.hpp"
#include "memlb/instrument.hpp"
#include "memlb/io.hpp"
#include "memlb/parallel.hpp"
#include "memlb/rng.hpp"
#include "memlb/stats.hpp"

namespace memlb::cli {

namespace {

std::string times_field(const CorrelationTimes& ct) {
  std::string out;
  for (std::size_t i = 0; i < ct.times.size(); ++i) {
    if (i > 0) out += ';';
    out += ct.times[i] == kInfiniteTime ? "inf" : std::to_string(ct.times[i]);
  }
  return out;
}

std::string rate_str(double x) {
  std::ostringstream s;
  s.precision(6);
  s << x;
  return s.str();
}

}  // namespace

CommandResult cmd_gen(Json cfg, const Options& opts) {
  const std::uint64_t seed = resolve_seed(cfg);
  const Params params = resolve_params(get_section(cfg, "instance"));
  const HardInstance inst = sample_instance(params, seed);
  CommandResult res;
  const auto bin = opts.out_dir / "instance.mtin";
  save_instance(inst, bin);
  Json text = Json::parse(instance_to_text(inst));
  text["config"] = cfg;
  const auto txt = opts.out_dir / "instance.json";
  write_file(txt, text.dump(2) + "\n");
  res.artifacts = {bin, txt};
  res.summary = "instance d=" + std::to_string(params.d) + " N=" + std::to_string(params.n_terms) +
                " seed=" + std::to_string(seed) + " digest=" + std::to_string(inst.digest());
  return res;
}

CommandResult cmd_run(Json cfg, const Options& opts) {
  const std::uint64_t seed = resolve_seed(cfg);
  const AlgorithmSpec spec = resolve_algorithm(get_section(cfg, "algorithm"));
  Json& run_cfg = get_section(cfg, "run");
  const auto t_budget = static_cast<std::size_t>(get_int(run_cfg, "t_budget", 2000));
  const auto trials = static_cast<std::size_t>(get_int(run_cfg, "trials", 1));
  const bool write_transcripts = get_bool(run_cfg, "write_transcripts", true);
  const double min_success = get_double(run_cfg, "min_success_rate", 0.0);
  const double min_ordered = get_double(run_cfg, "min_ordered_rate", 0.0);
  if (trials < 1 || t_budget < 1) throw ConfigError("run.trials and run.t_budget must be ≥ 1");

  std::optional<HardInstance> fixed;
  if (cfg.contains("instance_file")) {
    fixed = load_instance(get_string(cfg, "instance_file", ""));
  } else {
    resolve_params(get_section(cfg, "instance"));
  }
  const Params params = fixed ? fixed->params : resolve_params(get_section(cfg, "instance"));
  const AlgorithmPtr alg = spec.make(params.d);

  struct Row {
    std::string csv;
    std::string transcript;
    bool success;
    bool ordered;
  };
  const std::vector<Row> rows = parallel_map(trials, opts.jobs, [&](std::size_t t) {
    const HardInstance inst = fixed ? *fixed : sample_instance(params, derive_seed(seed, stream::kInstance, t));
    const std::uint64_t alg_seed = derive_seed(seed, stream::kAlgorithm, t);
    const Transcript tr = run(*alg, inst, t_budget, alg_seed);
    const ReferenceOptimum ref = reference_optimum(inst);
    const EpsilonSuccess es = epsilon_success(tr, inst, ref);
    const CorrelationTimes ct = correlation_times(tr, inst);
    const OrderingResult ord = check_ordering(ct);
    std::ostringstream line;
    line << t << ',' << inst.seed << ',' << alg_seed << ',' << params.d << ',' << alg->name() << ','
         << times_field(ct) << ',' << (ord.ordered ? 1 : 0) << ','
         << (ord.first_violation ? std::to_string(*ord.first_violation) : "") << ',' << format_double(es.gap) << ','
         << format_double(es.gap / params.eps) << ',' << (es.success ? 1 : 0) << ',' << tr.rounds.size() << '\n';
    Row r{line.str(), "", es.success, ord.ordered};
    if (write_transcripts) {
      Json head;
      head["type"] = "config";
      head["command"] = "run";
      head["seed"] = seed;
      head["trial"] = t;
      head["config"] = cfg;
      r.transcript = head.dump() + "\n" + transcript_to_jsonl(tr);
    }
    return r;
  });

  CommandResult res;
  std::string csv = artifact_header("run", seed, cfg);
  csv += "trial,instance_seed,alg_seed,d,algorithm,times,ordered,first_violation,gap,gap_over_eps,success,queries\n";
  std::size_t successes = 0;
  std::size_t ordered = 0;
  for (std::size_t t = 0; t < rows.size(); ++t) {
    csv += rows[t].csv;
    successes += rows[t].success ? 1 : 0;
    ordered += rows[t].ordered ? 1 : 0;
    if (write_transcripts) {
      char name[32];
      std::snprintf(name, sizeof name, "trial_%04zu.jsonl", t);
      const auto path = opts.out_dir / "transcripts" / name;
      write_file(path, rows[t].transcript);
      res.artifacts.push_back(path);
    }
  }
  const auto csv_path = opts.out_dir / "instrument.csv";
  write_file(csv_path, csv);
  res.artifacts.push_back(csv_path);
  const double n = static_cast<double>(trials);
  const double sr = static_cast<double>(successes) / n;
  const double orr = static_cast<double>(ordered) / n;
  res.passed = sr >= min_success && orr >= min_ordered;
  res.summary = "run " + alg->name() + " d=" + std::to_string(params.d) + " trials=" + std::to_string(trials) +
                " eps_success=" + rate_str(sr) + " ordered=" + rate_str(orr);
  return res;
}

CommandResult cmd_game(Json cfg, const Options& opts) {
  const std::uint64_t seed = resolve_seed(cfg);
  const AlgorithmSpec spec = resolve_algorithm(get_section(cfg, "algorithm"));
  Json& inst_cfg = get_section(cfg, "instance");
  const auto d = get_int(inst_cfg, "d", 32);
  const AlgorithmPtr alg = spec.make(static_cast<int>(d));
  const std::size_t state = alg->declared_size();
  if (state % static_cast<std::size_t>(d) != 0) {
    throw MessageLengthViolation("algorithm state S = " + std::to_string(state) + " is not a multiple of d");
  }
  const auto k = static_cast<std::int64_t>(state / static_cast<std::size_t>(d));
  if (inst_cfg.contains("k_msg") && get_int(inst_cfg, "k_msg", 0) != k) {
    throw MessageLengthViolation("instance.k_msg must equal S/d = " + std::to_string(k) + " for " + alg->name());
  }
  inst_cfg["k_msg"] = k;
  const Params params = resolve_params(inst_cfg);

  Json& g = get_section(cfg, "game");
  const auto trials = static_cast<std::size_t>(get_int(g, "trials", 20));
  const auto t_budget = static_cast<std::size_t>(get_int(g, "t_budget", 20000));
  auto i_star = static_cast<std::size_t>(get_int(g, "i_star", 0));
  const auto pilot = static_cast<std::size_t>(get_int(g, "pilot_trials", 20));
  const double min_rate = get_double(g, "min_success_rate", 0.0);
  if (trials < 1) throw ConfigError("game.trials must be ≥ 1");

  std::string pilot_note;
  if (i_star == 0) {
    if (pilot < 1) throw ConfigError("game.pilot_trials must be ≥ 1 when i_star is automatic");
    const std::vector<CorrelationTimes> pilots = parallel_map(pilot, opts.jobs, [&](std::size_t p) {
      const HardInstance inst = sample_instance(params, derive_seed(seed, stream::kInstance, p));
      return correlation_times(run(*alg, inst, t_budget, derive_seed(seed, stream::kAlgorithm, p)), inst);
    });
    const GapIndexResult gi = gap_index(pilots, t_budget, static_cast<std::size_t>(params.n_rows));
    i_star = gi.i_star;
    pilot_note = " pilot_gap_rate=" + rate_str(gi.success_rate);
  }
  const GameParams gp = GameParams::from(params);
  const std::uint64_t shared = derive_seed(seed, stream::kPublic, 1);
  const auto proto = reduce(alg, i_star, gp, params, shared, t_budget);

  struct Trial {
    std::uint64_t seed;
    GameOutcome outcome;
    ReductionProtocol::Trace trace;
  };
  const std::vector<Trial> results = parallel_map(trials, opts.jobs, [&](std::size_t t) {
    const std::uint64_t s = derive_seed(seed, stream::kGame, t);
    const GameInput in = sample_game_input(gp, s);
    return Trial{s, play(*proto, in.a, in.v, gp), proto->trace(in.a, in.v)};
  });

  CommandResult res;
  std::string log;
  {
    Json head;
    head["type"] = "config";
    head["command"] = "game";
    head["seed"] = seed;
    head["i_star"] = i_star;
    head["config"] = cfg;
    log += head.dump() + "\n";
  }
  std::uint64_t successes = 0;
  for (std::size_t t = 0; t < results.size(); ++t) {
    const Trial& r = results[t];
    Json line;
    line["trial"] = t;
    line["seed"] = r.seed;
    line["t_istar"] = r.trace.t_istar == kInfiniteTime ? Json("inf") : Json(r.trace.t_istar);
    line["success"] = r.outcome.success;
    line["orthogonal"] = r.outcome.orthogonal;
    line["correlated"] = r.outcome.correlated;
    line["abs_corr"] = r.outcome.abs_corr;
    line["orth_norm"] = r.outcome.orth_norm;
    line["mismatch_rounds"] = r.trace.mismatch_rounds;
    line["answer_mismatches"] = r.trace.answer_mismatches;
    line["prefix_agrees"] = r.trace.prefix_agrees;
    line["message_bits"] = r.outcome.message_bits;
    line["rows_sent"] = r.outcome.rows_sent;
    line["bob_round"] = r.trace.bob_round;
    line["true_filter_round"] = r.trace.true_filter_round;
    log += line.dump() + "\n";
    successes += r.outcome.success ? 1 : 0;
  }
  const auto log_path = opts.out_dir / "game_log.jsonl";
  write_file(log_path, log);
  const double rate = static_cast<double>(successes) / static_cast<double>(trials);
  const Interval ci = clopper_pearson(successes, trials);
  std::string summary = artifact_header("game", seed, cfg);
  summary += "algorithm=" + alg->name() + " d=" + std::to_string(params.d) + " k=" + std::to_string(k) +
             " n=" + std::to_string(params.n_rows) + " i_star=" + std::to_string(i_star) + pilot_note + "\n";
  summary += "trials=" + std::to_string(trials) + " successes=" + std::to_string(successes) + " rate=" + rate_str(rate) +
             " ci95=[" + rate_str(ci.lo) + "," + rate_str(ci.hi) + "]\n";
  res.passed = rate >= min_rate;
  summary += std::string("threshold min_success_rate=") + rate_str(min_rate) + " verdict=" + (res.passed ? "PASS" : "FAIL") + "\n";
  const auto sum_path = opts.out_dir / "game_summary.txt";
  write_file(sum_path, summary);
  res.artifacts = {log_path, sum_path};
  res.summary = "game rate=" + rate_str(rate) + " (" + std::to_string(successes) + "/" + std::to_string(trials) + ")";
  return res;
}

CommandResult cmd_encode(Json cfg, const Options& opts) {
  const std::uint64_t seed = resolve_seed(cfg);
  Json& e = get_section(cfg, "encode");
  MicroConfig mc;
  mc.d = static_cast<int>(get_int(e, "d", 6));
  mc.k = get_int(e, "k", 1);
  mc.n = get_int(e, "n", 1);
  mc.s_rows = static_cast<int>(get_int(e, "s_rows", 3));
  mc.l_seq = static_cast<std::size_t>(get_int(e, "l_seq", 1));
  mc.v_count = static_cast<std::size_t>(get_int(e, "v_count", 2));
  mc.message_samples = static_cast<std::size_t>(get_int(e, "message_samples", 8));
  mc.cap = static_cast<std::uint64_t>(get_int(e, "cap", 10000000));
  if (e.contains("xi_prime")) mc.xi_prime = get_double(e, "xi_prime", 0.0);
  mc.seed = seed;
  const std::string proto_name = get_string(e, "protocol", "shifted-sketch");
  const double s_corr = get_double(e, "s_corr", 1.0);

  GameParams gp{mc.d, mc.k, mc.n, s_corr, 0.0};
  ProtocolPtr proto;
  if (proto_name == "row-sketch") {
    proto = normalize_output(protocols::row_sketch(gp), gp);
  } else if (proto_name == "shifted-sketch") {
    const double scale = get_double(e, "shift_scale", 1.0);
    Rng rng(derive_seed(seed, stream::kPublic, 0));
    Vector shift(mc.d);
    for (int i = 0; i < mc.d; ++i) shift[i] = scale * rng.gaussian();
    proto = normalize_output(protocols::row_sketch(gp, shift), gp);
  } else if (proto_name == "zero") {
    proto = protocols::zero(gp);
  } else {
    throw ConfigError("unknown encode.protocol '" + proto_name + "'");
  }
  const MicroResult r = encode_micro(*proto, mc);
  const MicroCheck check = recheck_micro(*proto, r);
  CommandResult res;
  const auto txt = opts.out_dir / "encode_report.txt";
  const auto csv = opts.out_dir / "encode_levels.csv";
  write_file(txt, artifact_header("encode", seed, cfg) + micro_report_text(r, check));
  write_file(csv, artifact_header("encode", seed, cfg) + micro_report_csv(r));
  res.artifacts = {txt, csv};
  res.passed = check.ok();
  res.summary = "encode emitted_sets=" + std::to_string(r.counters.emitted_sets) + " |A|=" +
                std::to_string(r.counters.a_size) + " recheck=" + (check.ok() ? "PASS" : "FAIL");
  return res;
}

CommandResult cmd_frontier(Json cfg, const Options& opts) {
  const std::uint64_t seed = resolve_seed(cfg);
  Json& f = get_section(cfg, "frontier");
  Json& inst_cfg = get_section(cfg, "instance");
  FrontierConfig fc;
  fc.delta = get_double(inst_cfg, "delta", 0.5);
  fc.log_base = get_double(inst_cfg, "log_base", 2.0);
  if (inst_cfg.contains("l_scale")) fc.overrides.l_scale = get_double(inst_cfg, "l_scale", 0.0);
  if (inst_cfg.contains("gamma")) fc.overrides.gamma = get_double(inst_cfg, "gamma", 0.0);
  if (inst_cfg.contains("n_terms")) fc.overrides.n_terms = get_int(inst_cfg, "n_terms", 0);
  if (!f.contains("d_list")) f["d_list"] = Json::array({16, 32});
  if (!f.contains("algorithms")) f["algorithms"] = Json::array({"ellipsoid", "subgradient-fixed"});
  if (!f.contains("gap_thresholds")) f["gap_thresholds"] = Json::array({1.0});
  try {
    for (const auto& d : f["d_list"]) fc.d_list.push_back(d.get<int>());
    for (const auto& g : f["gap_thresholds"]) fc.gap_thresholds.push_back(g.get<double>());
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("frontier.d_list must hold integers and frontier.gap_thresholds numbers");
  }
  const auto n_seeds = static_cast<std::size_t>(get_int(f, "seeds", 5));
  fc.t_budget = static_cast<std::size_t>(get_int(f, "t_budget", 5000));
  const double eta = get_double(f, "eta", 0.01);
  for (std::size_t i = 0; i < n_seeds; ++i) fc.seeds.push_back(derive_seed(seed, stream::kInstance, i));
  std::vector<AlgorithmSpec> algs;
  for (const auto& a : f["algorithms"]) algs.push_back(algorithm_by_name(a.get<std::string>(), eta));
  std::vector<FrontierRow> rows;
  try {
    rows = measure_frontier(algs, fc, opts.jobs);
  } catch (const OverrideViolatesInvariant& e) {
    throw ConfigError(e.what());
  }
  std::string csv = artifact_header("frontier", seed, cfg);
  csv += "algorithm,d,state_bits,gap_threshold_eps,median_queries,reached_fraction\n";
  std::string runs = artifact_header("frontier", seed, cfg);
  runs += "algorithm,d,seed,gap_threshold_eps,queries\n";
  for (const FrontierRow& r : rows) {
    for (std::size_t g = 0; g < r.gap_thresholds.size(); ++g) {
      const std::size_t med = r.median_queries[g];
      csv += r.algorithm + ',' + std::to_string(r.d) + ',' + std::to_string(r.state_bits) + ',' +
             format_double(r.gap_thresholds[g]) + ',' + (med == kNeverReached ? "never" : std::to_string(med)) + ',' +
             format_double(r.reached_fraction[g]) + '\n';
      for (std::size_t s = 0; s < r.per_seed.size(); ++s) {
        const std::size_t q = r.per_seed[s][g];
        runs += r.algorithm + ',' + std::to_string(r.d) + ',' + std::to_string(fc.seeds[s]) + ',' +
                format_double(r.gap_thresholds[g]) + ',' + (q == kNeverReached ? "never" : std::to_string(q)) + '\n';
      }
    }
    if (r.gap_thresholds.empty()) {
      csv += r.algorithm + ',' + std::to_string(r.d) + ',' + std::to_string(r.state_bits) + ",,,\n";
    }
  }
  CommandResult res;
  const auto table = opts.out_dir / "frontier.csv";
  const auto per = opts.out_dir / "frontier_runs.csv";
  write_file(table, csv);
  write_file(per, runs);
  res.artifacts = {table, per};
  res.summary = "frontier rows=" + std::to_string(rows.size());
  return res;
}

int dispatch(const std::string& command, const Options& opts) {
  try {
    Json cfg = load_config(opts);
    std::filesystem::create_directories(opts.out_dir);
    CommandResult res;
    if (command == "gen") {
      res = cmd_gen(std::move(cfg), opts);
    } else if (command == "run") {
      res = cmd_run(std::move(cfg), opts);
    } else if (command == "game") {
      res = cmd_game(std::move(cfg), opts);
    } else if (command == "verify") {
      res = cmd_verify(std::move(cfg), opts);
    } else if (command == "encode") {
      res = cmd_encode(std::move(cfg), opts);
    } else if (command == "frontier") {
      res = cmd_frontier(std::move(cfg), opts);
    } else {
      std::cerr << "unknown command: " << command << "\n";
      return 2;
    }
    std::cout << res.summary << "\n";
    for (const auto& a : res.artifacts) std::cout << "wrote " << a.string() << "\n";
    if (!res.passed) std::cout << "thresholds: FAIL\n";
    return res.passed ? 0 : 1;
  } catch (const CapExceeded& e) {
    std::cerr << "error: " << e.what() << " [loop: " << e.loop() << "]\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return 2;
}

}  // namespace memlb::cli
