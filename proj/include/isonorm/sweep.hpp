#pragma once

#include <cmath>
#include <cstddef>
#include <exception>
#include <limits>
#include <vector>

namespace isonorm {

// Serial is the reference path; Parallel must give bit-identical results
// because every index is evaluated independently and merged in order.
enum class Exec { Serial, Parallel };

template <class R, class Fn>
std::vector<R> sweep_map(std::size_t n, Fn&& fn, Exec exec = Exec::Parallel) {
  std::vector<R> out(n);
  if (exec == Exec::Serial) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  // exceptions may not cross the parallel region, so park them per index
  std::vector<std::exception_ptr> errors(n);
  const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < m; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

struct Extreme {
  double value = 0.0;
  std::size_t index = 0;
};

// lowest index wins ties, NaN counts as +inf for min and as max for max
inline Extreme arg_min(const std::vector<double>& v) {
  Extreme best{std::numeric_limits<double>::infinity(), 0};
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] < best.value) best = {v[i], i};
  return best;
}

inline Extreme arg_max_abs(const std::vector<double>& v) {
  Extreme best{0.0, 0};
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double a = std::isnan(v[i]) ? std::numeric_limits<double>::infinity() : std::abs(v[i]);
    if (a > best.value) best = {a, i};
  }
  return best;
}

inline double max_abs(const std::vector<double>& v) { return arg_max_abs(v).value; }

inline std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = a;
    return out;
  }
  for (std::size_t i = 0; i < n; ++i)
    out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  out[n - 1] = b;
  return out;
}

// n points strictly inside (a, b), cell midpoints
inline std::vector<double> interior_grid(double a, double b, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = a + (b - a) * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
  return out;
}

}  // namespace isonorm
