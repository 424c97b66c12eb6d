#pragma once

// Nelder-Mead downhill simplex with optional box clamping.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>

namespace gchsh::optim {

template <std::size_t D>
using Point = std::array<double, D>;

template <std::size_t D>
struct Box {
  Point<D> lo;
  Point<D> hi;

  Point<D> clamp(Point<D> x) const {
    for (std::size_t i = 0; i < D; ++i) x[i] = std::clamp(x[i], lo[i], hi[i]);
    return x;
  }
};

template <std::size_t D>
struct NelderMeadOptions {
  double f_tol = 1e-7;        // spread of simplex values
  double x_tol = 1e-7;        // max-norm distance of vertices from the best vertex
  int max_iters = 400;
  double initial_step = 0.1;
  std::optional<Box<D>> box;  // trial points are clamped into the box
};

template <std::size_t D>
struct NelderMeadResult {
  Point<D> x{};
  double f = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

/// Minimizes `f` from `start`. The initial simplex steps each coordinate by
/// initial_step, towards the interior when a box is given. Always terminates
/// within max_iters iterations.
template <std::size_t D, class F>
NelderMeadResult<D> nelder_mead(F&& f, Point<D> start, const NelderMeadOptions<D>& opt) {
  constexpr double kReflect = 1.0, kExpand = 2.0, kContract = 0.5, kShrink = 0.5;

  NelderMeadResult<D> res;
  auto clamp = [&](Point<D> x) { return opt.box ? opt.box->clamp(x) : x; };
  auto eval = [&](const Point<D>& x) {
    ++res.evaluations;
    return f(x);
  };

  std::array<Point<D>, D + 1> simplex;
  std::array<double, D + 1> values;
  start = clamp(start);
  simplex[0] = start;
  for (std::size_t i = 0; i < D; ++i) {
    Point<D> x = start;
    double step = opt.initial_step;
    if (opt.box && x[i] + step > opt.box->hi[i]) step = -step;
    x[i] += step;
    simplex[i + 1] = clamp(x);
  }
  for (std::size_t i = 0; i <= D; ++i) values[i] = eval(simplex[i]);

  std::array<std::size_t, D + 1> order;
  auto sort_simplex = [&] {
    for (std::size_t i = 0; i <= D; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    auto s = simplex;
    auto v = values;
    for (std::size_t i = 0; i <= D; ++i) {
      simplex[i] = s[order[i]];
      values[i] = v[order[i]];
    }
  };

  auto converged = [&] {
    if (std::abs(values[D] - values[0]) > opt.f_tol) return false;
    for (std::size_t i = 1; i <= D; ++i)
      for (std::size_t k = 0; k < D; ++k)
        if (std::abs(simplex[i][k] - simplex[0][k]) > opt.x_tol) return false;
    return true;
  };

  sort_simplex();
  while (res.iterations < opt.max_iters) {
    if (converged()) {
      res.converged = true;
      break;
    }
    ++res.iterations;

    Point<D> centroid{};
    for (std::size_t i = 0; i < D; ++i)
      for (std::size_t k = 0; k < D; ++k) centroid[k] += simplex[i][k] / static_cast<double>(D);

    auto along = [&](double coef) {
      Point<D> x;
      for (std::size_t k = 0; k < D; ++k) x[k] = centroid[k] + coef * (simplex[D][k] - centroid[k]);
      return clamp(x);
    };

    const Point<D> xr = along(-kReflect);
    const double fr = eval(xr);
    if (fr < values[0]) {
      const Point<D> xe = along(-kExpand);
      const double fe = eval(xe);
      if (fe < fr) {
        simplex[D] = xe;
        values[D] = fe;
      } else {
        simplex[D] = xr;
        values[D] = fr;
      }
    } else if (fr < values[D - 1]) {
      simplex[D] = xr;
      values[D] = fr;
    } else {
      const bool outside = fr < values[D];
      const Point<D> xc = outside ? along(-kContract) : along(kContract);
      const double fc = eval(xc);
      if (fc < (outside ? fr : values[D])) {
        simplex[D] = xc;
        values[D] = fc;
      } else {
        for (std::size_t i = 1; i <= D; ++i) {
          for (std::size_t k = 0; k < D; ++k)
            simplex[i][k] = simplex[0][k] + kShrink * (simplex[i][k] - simplex[0][k]);
          simplex[i] = clamp(simplex[i]);
          values[i] = eval(simplex[i]);
        }
      }
    }
    sort_simplex();
  }
  if (!res.converged) res.converged = converged();
  res.x = simplex[0];
  res.f = values[0];
  return res;
}

}  // namespace gchsh::optim
