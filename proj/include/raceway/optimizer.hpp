#pragma once

#include "raceway/objective.hpp"
#include "raceway/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace raceway {

/// Exterior quadratic penalty: weight * sum of squared distances outside the box.
double bound_penalty(const Vector2& x, const ControlBounds& bounds, double weight);

/// Nearest point of the box.
Vector2 clamp_to_box(const Vector2& x, const ControlBounds& bounds);

template <int Dim>
struct NelderMeadOptions {
  using Point = Eigen::Matrix<double, Dim, 1>;
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
  double x_tol = 1e-8;   // simplex diameter, measured from the best vertex
  double f_tol = 1e-12;  // spread of values over the simplex
  int max_iters = 500;
  /// Hard budget on objective calls; an iteration only starts when its worst case
  /// (Dim + 2 calls) still fits. 0 disables the budget.
  int max_evals = 0;
  /// Simplex offsets from x0 along each axis; empty means 0.1 * max(1, |x0_i|).
  std::vector<double> initial_step;
};

template <int Dim>
void validate(const NelderMeadOptions<Dim>& o) {
  if (!(o.reflection > 0.0)) throw ConfigError("Nelder-Mead reflection must be > 0");
  if (!(o.expansion > 1.0)) throw ConfigError("Nelder-Mead expansion must be > 1");
  if (!(o.contraction > 0.0 && o.contraction < 1.0)) {
    throw ConfigError("Nelder-Mead contraction must lie in (0, 1)");
  }
  if (!(o.shrink > 0.0 && o.shrink < 1.0)) {
    throw ConfigError("Nelder-Mead shrink must lie in (0, 1)");
  }
  if (o.max_iters < 1) throw ConfigError("Nelder-Mead max_iters must be >= 1");
  if (o.max_evals < 0) throw ConfigError("Nelder-Mead max_evals must be >= 0");
  if (!(o.x_tol >= 0.0) || !(o.f_tol >= 0.0)) {
    throw ConfigError("Nelder-Mead tolerances must be nonnegative");
  }
  if (!o.initial_step.empty() && o.initial_step.size() != static_cast<std::size_t>(Dim)) {
    throw ConfigError("Nelder-Mead initial_step needs one entry per dimension");
  }
}

enum class SimplexMove { Init, Reflect, Expand, ContractOutside, ContractInside, Shrink };

inline const char* move_name(SimplexMove m) {
  switch (m) {
    case SimplexMove::Init: return "init";
    case SimplexMove::Reflect: return "reflect";
    case SimplexMove::Expand: return "expand";
    case SimplexMove::ContractOutside: return "contract_outside";
    case SimplexMove::ContractInside: return "contract_inside";
    case SimplexMove::Shrink: return "shrink";
  }
  return "unknown";
}

template <int Dim>
struct TraceRecord {
  using Point = Eigen::Matrix<double, Dim, 1>;
  int iteration = 0;
  SimplexMove move = SimplexMove::Init;
  std::vector<Point> vertices;  // sorted best first
  std::vector<double> values;
  Point best;
  double best_value = 0.0;
  Index evaluations = 0;  // cumulative objective calls
};

template <int Dim>
struct NelderMeadResult {
  using Point = Eigen::Matrix<double, Dim, 1>;
  Point x;
  double f = 0.0;
  std::vector<TraceRecord<Dim>> trace;
  Index evaluations = 0;
  bool converged = false;
  std::string stop_reason;
};

/// Downhill simplex minimization.
///
/// `batch` evaluates a list of points and may do so concurrently; results are consumed in
/// list order, so the iteration does not depend on evaluation timing. NaN values count as
/// +infinity.
template <int Dim>
NelderMeadResult<Dim> nelder_mead(
    const std::function<std::vector<double>(const std::vector<Eigen::Matrix<double, Dim, 1>>&)>&
        batch,
    const Eigen::Matrix<double, Dim, 1>& x0, const NelderMeadOptions<Dim>& opts) {
  using Point = Eigen::Matrix<double, Dim, 1>;
  validate(opts);
  constexpr double kInf = std::numeric_limits<double>::infinity();

  struct Vertex {
    Point x;
    double f;
    std::uint64_t id;
  };
  std::uint64_t next_id = 0;
  NelderMeadResult<Dim> res;

  auto eval = [&](const std::vector<Point>& pts) {
    std::vector<double> f = batch(pts);
    if (f.size() != pts.size()) throw std::logic_error("batch evaluator returned wrong size");
    for (double& v : f) {
      if (std::isnan(v)) v = kInf;
    }
    res.evaluations += static_cast<Index>(pts.size());
    return f;
  };
  auto eval_one = [&](const Point& p) { return eval({p}).front(); };

  std::vector<Point> init{x0};
  for (int d = 0; d < Dim; ++d) {
    Point p = x0;
    p[d] += opts.initial_step.empty() ? 0.1 * std::max(1.0, std::abs(x0[d]))
                                      : opts.initial_step[static_cast<std::size_t>(d)];
    init.push_back(p);
  }
  std::vector<Vertex> simplex;
  {
    const std::vector<double> f = eval(init);
    for (std::size_t i = 0; i < init.size(); ++i) simplex.push_back({init[i], f[i], next_id++});
  }

  auto order = [](const Vertex& a, const Vertex& b) {
    return a.f < b.f || (a.f == b.f && a.id < b.id);
  };
  auto record = [&](int iter, SimplexMove move) {
    TraceRecord<Dim> r;
    r.iteration = iter;
    r.move = move;
    for (const Vertex& v : simplex) {
      r.vertices.push_back(v.x);
      r.values.push_back(v.f);
    }
    r.best = simplex.front().x;
    r.best_value = simplex.front().f;
    r.evaluations = res.evaluations;
    res.trace.push_back(std::move(r));
  };

  std::sort(simplex.begin(), simplex.end(), order);
  if (std::all_of(simplex.begin(), simplex.end(), [](const Vertex& v) { return v.f == kInf; })) {
    throw std::runtime_error("Nelder-Mead: objective is infinite at every initial vertex");
  }
  record(0, SimplexMove::Init);

  const double a = opts.reflection, g = opts.expansion, c = opts.contraction,
               s = opts.shrink;
  int iter = 0;
  while (true) {
    double diameter = 0.0;
    for (const Vertex& v : simplex) diameter = std::max(diameter, (v.x - simplex.front().x).norm());
    const double spread = simplex.back().f - simplex.front().f;
    if (diameter <= opts.x_tol) {
      res.converged = true;
      res.stop_reason = "x_tol";
      break;
    }
    if (spread <= opts.f_tol) {
      res.converged = true;
      res.stop_reason = "f_tol";
      break;
    }
    if (iter >= opts.max_iters) {
      res.stop_reason = "max_iters";
      break;
    }
    if (opts.max_evals > 0 && res.evaluations + Dim + 2 > opts.max_evals) {
      res.stop_reason = "max_evals";
      break;
    }
    ++iter;

    Point centroid = Point::Zero();
    for (int i = 0; i < Dim; ++i) centroid += simplex[static_cast<std::size_t>(i)].x;
    centroid /= static_cast<double>(Dim);
    Vertex& worst = simplex.back();
    const double f_best = simplex.front().f;
    const double f_second = simplex[static_cast<std::size_t>(Dim - 1)].f;

    const Point xr = centroid + a * (centroid - worst.x);
    const double fr = eval_one(xr);
    SimplexMove move;
    bool do_shrink = false;
    if (fr < f_best) {
      const Point xe = centroid + g * (xr - centroid);
      const double fe = eval_one(xe);
      if (fe < fr) {
        worst = {xe, fe, next_id++};
        move = SimplexMove::Expand;
      } else {
        worst = {xr, fr, next_id++};
        move = SimplexMove::Reflect;
      }
    } else if (fr < f_second) {
      worst = {xr, fr, next_id++};
      move = SimplexMove::Reflect;
    } else if (fr < worst.f) {
      const Point xc = centroid + c * (xr - centroid);
      const double fc = eval_one(xc);
      move = SimplexMove::ContractOutside;
      if (fc <= fr) worst = {xc, fc, next_id++};
      else do_shrink = true;
    } else {
      const Point xc = centroid + c * (worst.x - centroid);
      const double fc = eval_one(xc);
      move = SimplexMove::ContractInside;
      if (fc < worst.f) worst = {xc, fc, next_id++};
      else do_shrink = true;
    }
    if (do_shrink) {
      move = SimplexMove::Shrink;
      std::vector<Point> pts;
      for (std::size_t i = 1; i < simplex.size(); ++i) {
        pts.push_back(simplex.front().x + s * (simplex[i].x - simplex.front().x));
      }
      const std::vector<double> f = eval(pts);
      for (std::size_t i = 1; i < simplex.size(); ++i) simplex[i] = {pts[i - 1], f[i - 1], next_id++};
    }
    std::sort(simplex.begin(), simplex.end(), order);
    record(iter, move);
  }
  res.x = simplex.front().x;
  res.f = simplex.front().f;
  return res;
}

/// Sequential convenience overload.
template <int Dim>
NelderMeadResult<Dim> nelder_mead(
    const std::function<double(const Eigen::Matrix<double, Dim, 1>&)>& f,
    const Eigen::Matrix<double, Dim, 1>& x0, const NelderMeadOptions<Dim>& opts) {
  using Point = Eigen::Matrix<double, Dim, 1>;
  return nelder_mead<Dim>(
      [&f](const std::vector<Point>& pts) {
        std::vector<double> out;
        out.reserve(pts.size());
        for (const Point& p : pts) out.push_back(f(p));
        return out;
      },
      x0, opts);
}

/// One cached simulation of the raceway objective.
struct RacewayEvaluation {
  Controls controls;       // the simulated (in-box) point
  ObjectiveReport report;  // timeseries dropped to bound memory
  bool failed = false;
  std::string error;
  Index order = 0;  // position in the sequence of distinct simulations
};

/// Raceway objective x -> J~(clamp(x)) + bound_penalty(x), cached by the exact bits of the
/// clamped point. Batches run on up to `threads` workers; results do not depend on the
/// worker count.
class ObjectiveEvaluator {
 public:
  ObjectiveEvaluator(const Mesh& mesh, const Scenario& scenario, const ControlBounds& bounds,
                     int threads = 1);

  void set_bound_weight(double w) { bound_weight_ = w; }
  double bound_weight() const { return bound_weight_; }

  std::vector<double> evaluate(const std::vector<Vector2>& xs);
  double evaluate(const Vector2& x) { return evaluate(std::vector<Vector2>{x}).front(); }

  /// Cached evaluation of the clamped point, or nullptr if it was never simulated.
  const RacewayEvaluation* lookup(const Vector2& x) const;

  /// Distinct simulations in the order they were first requested.
  std::vector<const RacewayEvaluation*> history() const;
  Index simulations() const { return static_cast<Index>(cache_.size()); }

 private:
  using Key = std::pair<std::uint64_t, std::uint64_t>;
  static Key key_of(const Vector2& clamped);
  RacewayEvaluation run(const Vector2& clamped) const;

  const Mesh& mesh_;
  Scenario scenario_;
  ControlBounds bounds_;
  int threads_;
  double bound_weight_ = 1e6;
  std::map<Key, RacewayEvaluation> cache_;
};

struct RacewayOptimum {
  Controls best;  // clamped into the box
  ObjectiveReport report;
  NelderMeadResult<2> search;
  std::vector<RacewayEvaluation> evaluations;  // distinct simulations, request order
  double bound_weight = 0.0;
};

/// Minimizes the penalized raceway objective over (H, omega) from `start`.
///
/// A nonpositive `bound_weight` selects 1e6 * max(1, |J~(start)|). Empty
/// `opts.initial_step` selects 10% of the box width per axis.
RacewayOptimum optimize_raceway(const Mesh& mesh, const Scenario& scenario,
                                const ControlBounds& bounds, const Controls& start,
                                NelderMeadOptions<2> opts, int threads = 1,
                                double bound_weight = 0.0);

}  // namespace raceway
