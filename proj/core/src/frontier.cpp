#include <algorithm>

#include "memlb/errors.hpp"
#include "memlb/instrument.hpp"
#include "memlb/optimizer.hpp"
#include "memlb/parallel.hpp"
#include "memlb/rng.hpp"

namespace memlb {

std::size_t queries_to_gap(const Transcript& t, double reference, double threshold) {
  for (std::size_t r = 0; r < t.rounds.size(); ++r) {
    if (t.rounds[r].answer.value - reference <= threshold) return r + 1;
  }
  return kNeverReached;
}

std::vector<FrontierRow> measure_frontier(const std::vector<AlgorithmSpec>& algs,
                                          const FrontierConfig& config, unsigned jobs) {
  if (algs.empty() || config.d_list.empty() || config.seeds.empty()) {
    throw PreconditionViolated("measure_frontier needs algorithms, dimensions and seeds");
  }
  std::vector<FrontierRow> rows;
  for (const AlgorithmSpec& spec : algs) {
    for (int d : config.d_list) {
      const Params params =
          derive_params(d, config.delta, Profile::DeskScale, config.overrides, config.log_base);
      const AlgorithmPtr alg = spec.make(d);
      FrontierRow row;
      row.algorithm = spec.name;
      row.d = d;
      row.state_bits = alg->declared_size();
      row.gap_thresholds = config.gap_thresholds;
      row.per_seed = parallel_map(config.seeds.size(), jobs, [&](std::size_t s) {
        const std::uint64_t seed = config.seeds[s];
        const HardInstance inst = sample_instance(params, seed);
        const ReferenceOptimum ref = reference_optimum(inst);
        const Transcript t =
            run(*alg, inst, config.t_budget, derive_seed(seed, stream::kAlgorithm, 0));
        std::vector<std::size_t> reached;
        for (double g : config.gap_thresholds) {
          reached.push_back(queries_to_gap(t, ref.value, g * params.eps));
        }
        return reached;
      });
      for (std::size_t g = 0; g < config.gap_thresholds.size(); ++g) {
        std::vector<std::size_t> column;
        std::size_t hits = 0;
        for (const auto& per : row.per_seed) {
          column.push_back(per[g]);
          if (per[g] != kNeverReached) ++hits;
        }
        std::sort(column.begin(), column.end());
        row.median_queries.push_back(column[(column.size() - 1) / 2]);
        row.reached_fraction.push_back(static_cast<double>(hits) /
                                       static_cast<double>(column.size()));
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace memlb
