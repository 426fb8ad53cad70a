#include "raceway/optimizer.hpp"

#include <fmt/format.h>

#include <bit>
#include <cstdio>
#include <thread>

namespace raceway {

double bound_penalty(const Vector2& x, const ControlBounds& bounds, double weight) {
  if (!(weight > 0.0)) throw std::invalid_argument("bound_penalty: weight must be positive");
  const Vector2 lo(bounds.h_min, bounds.w_min);
  const Vector2 hi(bounds.h_max, bounds.w_max);
  double sum = 0.0;
  for (int d = 0; d < 2; ++d) {
    const double out = std::max({lo[d] - x[d], x[d] - hi[d], 0.0});
    sum += out * out;
  }
  return weight * sum;
}

Vector2 clamp_to_box(const Vector2& x, const ControlBounds& bounds) {
  return {std::clamp(x[0], bounds.h_min, bounds.h_max),
          std::clamp(x[1], bounds.w_min, bounds.w_max)};
}

ObjectiveEvaluator::ObjectiveEvaluator(const Mesh& mesh, const Scenario& scenario,
                                       const ControlBounds& bounds, int threads)
    : mesh_(mesh), scenario_(scenario), bounds_(bounds), threads_(std::max(1, threads)) {
  validate(bounds_);
  validate(scenario_);
}

ObjectiveEvaluator::Key ObjectiveEvaluator::key_of(const Vector2& clamped) {
  return {std::bit_cast<std::uint64_t>(clamped[0]), std::bit_cast<std::uint64_t>(clamped[1])};
}

RacewayEvaluation ObjectiveEvaluator::run(const Vector2& clamped) const {
  RacewayEvaluation ev;
  ev.controls = {clamped[0], clamped[1]};
  try {
    ev.report = simulate(mesh_, scenario_, ev.controls).report;
    ev.report.timeseries.clear();
    ev.report.timeseries.shrink_to_fit();
  } catch (const std::exception& e) {
    ev.failed = true;
    ev.error = e.what();
    ev.report.controls = ev.controls;
    ev.report.j_tilde = std::numeric_limits<double>::infinity();
  }
  return ev;
}

std::vector<double> ObjectiveEvaluator::evaluate(const std::vector<Vector2>& xs) {
  std::vector<Vector2> pending;
  std::vector<Key> pending_keys;
  for (const Vector2& x : xs) {
    const Vector2 c = clamp_to_box(x, bounds_);
    const Key k = key_of(c);
    if (cache_.count(k) ||
        std::find(pending_keys.begin(), pending_keys.end(), k) != pending_keys.end()) {
      continue;
    }
    pending.push_back(c);
    pending_keys.push_back(k);
  }

  std::vector<RacewayEvaluation> results(pending.size());
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(threads_), pending.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < pending.size(); ++i) results[i] = run(pending[i]);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < pending.size(); i += workers) results[i] = run(pending[i]);
      });
    }
    for (std::thread& t : pool) t.join();
  }
  for (std::size_t i = 0; i < pending.size(); ++i) {
    results[i].order = static_cast<Index>(cache_.size());
    if (results[i].failed) {
      fmt::print(stderr, "warning: evaluation at H={}, omega={} failed: {}\n",
                 pending[i][0], pending[i][1], results[i].error);
    }
    cache_.emplace(pending_keys[i], std::move(results[i]));
  }

  std::vector<double> out;
  out.reserve(xs.size());
  for (const Vector2& x : xs) {
    const RacewayEvaluation& ev = cache_.at(key_of(clamp_to_box(x, bounds_)));
    out.push_back(ev.failed ? std::numeric_limits<double>::infinity()
                            : ev.report.j_tilde + bound_penalty(x, bounds_, bound_weight_));
  }
  return out;
}

const RacewayEvaluation* ObjectiveEvaluator::lookup(const Vector2& x) const {
  const auto it = cache_.find(key_of(clamp_to_box(x, bounds_)));
  return it == cache_.end() ? nullptr : &it->second;
}

std::vector<const RacewayEvaluation*> ObjectiveEvaluator::history() const {
  std::vector<const RacewayEvaluation*> out(cache_.size());
  for (const auto& [k, ev] : cache_) out[static_cast<std::size_t>(ev.order)] = &ev;
  return out;
}

RacewayOptimum optimize_raceway(const Mesh& mesh, const Scenario& scenario,
                                const ControlBounds& bounds, const Controls& start,
                                NelderMeadOptions<2> opts, int threads, double bound_weight) {
  ObjectiveEvaluator evaluator(mesh, scenario, bounds, threads);
  const Vector2 x0(start.height, start.omega);
  if (opts.initial_step.empty()) {
    opts.initial_step = {0.1 * (bounds.h_max - bounds.h_min), 0.1 * (bounds.w_max - bounds.w_min)};
  }
  if (!(bound_weight > 0.0)) {
    const RacewayEvaluation* first = nullptr;
    evaluator.set_bound_weight(1.0);
    evaluator.evaluate(x0);
    first = evaluator.lookup(x0);
    const double scale = first->failed ? 1.0 : std::max(1.0, std::abs(first->report.j_tilde));
    bound_weight = 1e6 * scale;
  }
  evaluator.set_bound_weight(bound_weight);

  RacewayOptimum out;
  out.bound_weight = bound_weight;
  out.search = nelder_mead<2>(
      [&evaluator](const std::vector<Vector2>& xs) { return evaluator.evaluate(xs); }, x0, opts);
  const RacewayEvaluation* best = evaluator.lookup(out.search.x);
  out.best = best->controls;
  out.report = best->report;
  for (const RacewayEvaluation* ev : evaluator.history()) out.evaluations.push_back(*ev);
  return out;
}

}  // namespace raceway
