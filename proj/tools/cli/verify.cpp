#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/special_functions/binomial.hpp>

#include "cli/commands.hpp"
#include "memlb/errors.hpp"
#include "memlb/geometry.hpp"
#include "memlb/instrument.hpp"
#include "memlb/io.hpp"
#include "memlb/oracle.hpp"
#include "memlb/parallel.hpp"
#include "memlb/rng.hpp"
#include "memlb/stats.hpp"

namespace memlb::cli {

namespace {

struct Suite {
  std::string label;
  std::string header;        // raw CSV columns, the last one is "pass"
  std::vector<std::string> rows;
  std::vector<bool> pass;
  double threshold = 1.0;    // minimum pass frequency
  bool extra_ok = true;      // suite-specific conditions beyond the frequency
  std::string note;

  double frequency() const {
    std::size_t k = 0;
    for (bool p : pass) k += p ? 1 : 0;
    return pass.empty() ? 0.0 : static_cast<double>(k) / static_cast<double>(pass.size());
  }
  bool passed() const { return extra_ok && frequency() >= threshold; }
};

std::size_t positive(Json& sec, const char* key, std::int64_t fallback, const std::string& suite) {
  const std::int64_t v = get_int(sec, key, fallback);
  if (v < 1) throw ConfigError("verify." + suite + "." + key + " must be ≥ 1");
  return static_cast<std::size_t>(v);
}

std::vector<double> grid_of(Json& sec, const char* key, std::vector<double> fallback) {
  if (!sec.contains(key)) {
    sec[key] = fallback;
    return fallback;
  }
  std::vector<double> out;
  try {
    for (const auto& t : sec[key]) out.push_back(t.get<double>());
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("verify grid '") + key + "' must be a list of numbers");
  }
  if (out.empty()) throw ConfigError(std::string("verify grid '") + key + "' is empty");
  return out;
}

Suite subgradient_suite(Json& sec, std::uint64_t seed, unsigned jobs) {
  Suite s{"subgradient", "point,d,violations,worst_gap,pass", {}, {}, 1.0, true, ""};
  const Params params = resolve_params(get_section(sec, "instance"));
  const std::size_t points = positive(sec, "points", 100, "subgradient");
  const std::size_t probes = positive(sec, "probes", 100, "subgradient");
  const HardInstance inst = sample_instance(params, derive_seed(seed, stream::kInstance, 0));
  const auto reports = parallel_map(points, jobs, [&](std::size_t p) {
    Rng rng(derive_seed(seed, stream::kPoints, p));
    const Vector x = sample_unit_ball(params.d, rng);
    return verify_subgradient(inst, x, first_order(inst, x), probes, derive_seed(seed, stream::kProbe, p));
  });
  for (std::size_t p = 0; p < points; ++p) {
    const bool ok = reports[p].violations == 0;
    s.rows.push_back(std::to_string(p) + ',' + std::to_string(params.d) + ',' +
                     std::to_string(reports[p].violations) + ',' + format_double(reports[p].worst_gap) + ',' +
                     (ok ? "1" : "0"));
    s.pass.push_back(ok);
  }
  return s;
}

// Correlation-time runs feed both the ordering and the gap-index suites.
std::pair<Suite, Suite> correlation_suites(Json& sec, std::uint64_t seed, unsigned jobs) {
  const Params params = resolve_params(get_section(sec, "instance"));
  const AlgorithmSpec spec = resolve_algorithm(get_section(sec, "algorithm"));
  const std::size_t runs = positive(sec, "runs", 20, "correlation");
  const std::size_t t_budget = positive(sec, "t_budget", 4000, "correlation");
  const double min_ordered = get_double(sec, "min_ordered_rate", 0.95);
  const double min_gap = get_double(sec, "min_gap_rate", 0.0);
  const AlgorithmPtr alg = spec.make(params.d);
  const auto times = parallel_map(runs, jobs, [&](std::size_t r) {
    const HardInstance inst = sample_instance(params, derive_seed(seed, stream::kInstance, r));
    return correlation_times(run(*alg, inst, t_budget, derive_seed(seed, stream::kAlgorithm, r)), inst);
  });
  const auto n_rows = static_cast<std::size_t>(params.n_rows);
  const GapIndexResult gi = gap_index(times, t_budget, n_rows);
  Suite ord{"ordering", "run,times,first_violation,pass", {}, {}, min_ordered, true, ""};
  Suite gap{"gap-index", "run,times,i_star,pass", {}, {}, min_gap, true, "i_star=" + std::to_string(gi.i_star)};
  for (std::size_t r = 0; r < runs; ++r) {
    std::string ts;
    for (std::size_t i = 0; i < times[r].times.size(); ++i) {
      if (i > 0) ts += ';';
      ts += times[r].times[i] == kInfiniteTime ? "inf" : std::to_string(times[r].times[i]);
    }
    const OrderingResult o = check_ordering(times[r]);
    ord.rows.push_back(std::to_string(r) + ',' + ts + ',' +
                       (o.first_violation ? std::to_string(*o.first_violation) : "") + ',' + (o.ordered ? "1" : "0"));
    ord.pass.push_back(o.ordered);
    const bool g = gap_event(times[r], gi.i_star, t_budget, n_rows);
    gap.rows.push_back(std::to_string(r) + ',' + ts + ',' + std::to_string(gi.i_star) + ',' + (g ? "1" : "0"));
    gap.pass.push_back(g);
  }
  return {ord, gap};
}

Suite reference_suite(Json& sec, std::uint64_t seed, unsigned jobs) {
  const Params params = resolve_params(get_section(sec, "instance"));
  const std::size_t seeds = positive(sec, "seeds", 20, "reference-optimum");
  const double min_rate = get_double(sec, "min_rate", 0.8);
  const double orth_tol = get_double(sec, "orth_tol", 1e-8);
  Suite s{"reference-optimum", "seed,orth_residual,value,bound_base2,bound_base_e,below_base_e,norm_event,pass",
          {}, {}, min_rate, true, ""};
  const double b2 = objective_bound(params, 2.0);
  const double be = objective_bound(params, std::exp(1.0));
  struct Row {
    double orth;
    double value;
    bool norm_event;
  };
  const auto rows = parallel_map(seeds, jobs, [&](std::size_t i) {
    const HardInstance inst = sample_instance(params, derive_seed(seed, stream::kInstance, i));
    const ReferenceOptimum ref = reference_optimum(inst);
    return Row{row_infinity_norm(inst.a, ref.point), ref.value, ref.norm_event};
  });
  std::size_t below_e = 0;
  for (std::size_t i = 0; i < seeds; ++i) {
    const bool ok = rows[i].value <= b2;
    const bool ok_e = rows[i].value <= be;
    below_e += ok_e ? 1 : 0;
    if (!(rows[i].orth <= orth_tol)) s.extra_ok = false;
    s.rows.push_back(std::to_string(i) + ',' + format_double(rows[i].orth) + ',' + format_double(rows[i].value) +
                     ',' + format_double(b2) + ',' + format_double(be) + ',' + (ok_e ? "1" : "0") + ',' +
                     (rows[i].norm_event ? "1" : "0") + ',' + (ok ? "1" : "0"));
    s.pass.push_back(ok);
  }
  std::ostringstream note;
  note << "base_e_frequency=" << static_cast<double>(below_e) / static_cast<double>(seeds)
       << " orthogonality=" << (s.extra_ok ? "ok" : "FAIL");
  s.note = note.str();
  return s;
}

Suite khintchine_suite(Json& sec, std::uint64_t seed) {
  const auto d = static_cast<int>(get_int(sec, "d", 16));
  if (d < 1 || d > 60) throw ConfigError("verify.khintchine.d must be in [1, 60]");
  const std::size_t trials = positive(sec, "trials", 20000, "khintchine");
  const std::vector<double> grid = grid_of(sec, "t_grid", {0.5, 1.0, 1.5, 2.0, 2.5, 3.0});
  Suite s{"khintchine", "t,empirical,exact,sigma,hits,trials,pass", {}, {}, 1.0, true, ""};
  const Vector x = Vector::Ones(d);
  const double norm = x.norm();
  const KhintchineFit fit = khintchine_sweep(x, grid, trials, seed);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    // |Σσ| = |2k − d| with k ~ Binomial(d, 1/2)
    double exact = 0.0;
    for (int k = 0; k <= d; ++k) {
      if (std::abs(2.0 * k - d) >= grid[g] * norm) {
        exact += boost::math::binomial_coefficient<double>(static_cast<unsigned>(d), static_cast<unsigned>(k)) *
                 std::ldexp(1.0, -d);
      }
    }
    const double sigma = binomial_sigma(exact, trials);
    const double emp = fit.tail[g].empirical;
    const bool ok = std::abs(emp - exact) <= 3.0 * sigma;
    s.rows.push_back(format_double(grid[g]) + ',' + format_double(emp) + ',' + format_double(exact) + ',' +
                     format_double(sigma) + ',' + std::to_string(fit.tail[g].hits) + ',' + std::to_string(trials) +
                     ',' + (ok ? "1" : "0"));
    s.pass.push_back(ok);
  }
  s.note = "c2=" + format_double(fit.c2);
  return s;
}

Suite projection_suite(Json& sec, std::uint64_t seed) {
  const auto d = static_cast<int>(get_int(sec, "d", 64));
  const auto r = static_cast<int>(get_int(sec, "r", 16));
  if (d < 1 || r < 1 || r > d) throw ConfigError("verify.projection needs 1 ≤ r ≤ d");
  const std::size_t trials = positive(sec, "trials", 5000, "projection");
  const std::vector<double> grid = grid_of(sec, "t_grid", {0.05, 0.1, 0.15, 0.2, 0.25});
  Rng rng(derive_seed(seed, stream::kPoints, 0));
  Matrix g(d, r);
  for (int j = 0; j < r; ++j) {
    for (int i = 0; i < d; ++i) g(i, j) = rng.gaussian();
  }
  const Matrix u = orthonormal_basis(g);
  if (u.cols() != r) throw PreconditionViolated("random projection basis lost rank");
  Suite s{"projection", "t,empirical,hits,trials,rate_exponent,pass", {}, {}, 1.0, true, ""};
  double c = std::numeric_limits<double>::infinity();
  double prev = 1.0;
  double prev_sigma = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const TailEstimate te = projection_tail(u, grid[k], trials, derive_seed(seed, stream::kProbe, k));
    const double t = grid[k];
    const double rate = std::min(static_cast<double>(d) * d * t * t / (16.0 * r), d * t / 4.0);
    if (te.hits > 0) c = std::min(c, -std::log(te.empirical) / rate);
    // monotone decay up to 3σ of the two neighbouring estimates
    const double sigma = binomial_sigma(te.empirical, trials);
    const bool ok = te.empirical <= prev + 3.0 * std::max(sigma, prev_sigma);
    prev = te.empirical;
    prev_sigma = sigma;
    s.rows.push_back(format_double(t) + ',' + format_double(te.empirical) + ',' + std::to_string(te.hits) + ',' +
                     std::to_string(trials) + ',' + format_double(rate) + ',' + (ok ? "1" : "0"));
    s.pass.push_back(ok);
  }
  s.extra_ok = c > 0.0;
  s.note = "fitted_c=" + format_double(c);
  return s;
}

Suite rli_suite(Json& sec, std::uint64_t seed, unsigned jobs) {
  const auto d = static_cast<int>(get_int(sec, "d", 16));
  const std::size_t len = positive(sec, "length", 8, "rli-basis");
  const std::size_t sequences = positive(sec, "sequences", 20, "rli-basis");
  const double gamma = get_double(sec, "gamma", 0.3);
  const double delta = get_double(sec, "delta", gamma * gamma / 2.0);
  const std::size_t probes = positive(sec, "probes", 2000, "rli-basis");
  const double min_rate = get_double(sec, "min_rate", 0.0);
  if (len > static_cast<std::size_t>(d)) throw ConfigError("verify.rli-basis.length must be ≤ d");
  Suite s{"rli-basis", "sequence,worst_ratio,failures,probes,pass", {}, {}, min_rate, true, ""};
  const auto bases = parallel_map(sequences, jobs, [&](std::size_t i) {
    Rng rng(derive_seed(seed, stream::kPoints, i));
    std::vector<Vector> pool;
    for (std::size_t j = 0; j < 4 * len; ++j) pool.push_back(sample_unit_sphere(d, rng));
    const RliSequence seq = greedy_rli(pool, gamma, len);
    std::vector<Vector> xs;
    for (std::size_t idx : seq.indices) xs.push_back(pool[idx]);
    return rli_orthonormal(xs, delta, probes, derive_seed(seed, stream::kProbe, i));
  });
  for (std::size_t i = 0; i < sequences; ++i) {
    s.rows.push_back(std::to_string(i) + ',' + format_double(bases[i].worst_ratio) + ',' +
                     std::to_string(bases[i].failures) + ',' + std::to_string(bases[i].probes) + ',' +
                     (bases[i].verified ? "1" : "0"));
    s.pass.push_back(bases[i].verified);
  }
  return s;
}

}  // namespace

CommandResult cmd_verify(Json cfg, const Options& opts) {
  const std::uint64_t seed = resolve_seed(cfg);
  Json& v = get_section(cfg, "verify");
  std::vector<Suite> suites;
  suites.push_back(subgradient_suite(get_section(v, "subgradient"), derive_seed(seed, stream::kProbe, 1), opts.jobs));
  auto [ord, gap] = correlation_suites(get_section(v, "correlation"), derive_seed(seed, stream::kProbe, 2), opts.jobs);
  suites.push_back(std::move(ord));
  suites.push_back(std::move(gap));
  suites.push_back(reference_suite(get_section(v, "reference-optimum"), derive_seed(seed, stream::kProbe, 3), opts.jobs));
  suites.push_back(khintchine_suite(get_section(v, "khintchine"), derive_seed(seed, stream::kProbe, 4)));
  suites.push_back(projection_suite(get_section(v, "projection"), derive_seed(seed, stream::kProbe, 5)));
  suites.push_back(rli_suite(get_section(v, "rli-basis"), derive_seed(seed, stream::kProbe, 6), opts.jobs));

  CommandResult res;
  const std::string header = artifact_header("verify", seed, cfg);
  std::string report = header + "suite,trials,passes,frequency,threshold,verdict,note\n";
  bool all = true;
  for (const Suite& s : suites) {
    std::size_t k = 0;
    for (bool p : s.pass) k += p ? 1 : 0;
    report += s.label + ',' + std::to_string(s.pass.size()) + ',' + std::to_string(k) + ',' +
              format_double(s.frequency()) + ',' + format_double(s.threshold) + ',' + (s.passed() ? "PASS" : "FAIL") +
              ',' + s.note + '\n';
    all = all && s.passed();
    std::string raw = header + s.header + '\n';
    for (const auto& r : s.rows) raw += r + '\n';
    const auto path = opts.out_dir / ("verify_" + s.label + ".csv");
    write_file(path, raw);
    res.artifacts.push_back(path);
  }
  const auto path = opts.out_dir / "verify_report.csv";
  write_file(path, report);
  res.artifacts.insert(res.artifacts.begin(), path);
  res.passed = all;
  res.summary = std::string("verify suites=") + std::to_string(suites.size()) + " verdict=" + (all ? "PASS" : "FAIL");
  return res;
}

}  // namespace memlb::cli
