#include "optomech/quadrature.hpp"

#include <cmath>
#include <queue>
#include <vector>

#include "optomech/errors.hpp"

namespace optomech {
namespace {

// 15-point Kronrod extension of 7-point Gauss, nodes on [-1, 1].
constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0};
constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

struct Panel {
  double a, b, value, error;
};

Panel evaluate(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(c);
  double resg = fc * kWg[3];
  double resk = fc * kWgk[7];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double fsum = f(c - dx) + f(c + dx);
    resk += kWgk[j] * fsum;
    if (j % 2 == 1) resg += kWg[j / 2] * fsum;
  }
  return {a, b, resk * half, std::abs((resk - resg) * half)};
}

struct WorseError {
  bool operator()(const Panel& x, const Panel& y) const {
    return x.error < y.error;
  }
};

}  // namespace

QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double rel_tol, double abs_tol, int max_intervals) {
  if (!(b > a)) fail(errc::bad_argument, "integration bounds must satisfy a < b");
  std::priority_queue<Panel, std::vector<Panel>, WorseError> heap;
  heap.push(evaluate(f, a, b));
  double total = heap.top().value;
  double err = heap.top().error;
  int n = 1;
  while (err > std::max(abs_tol, rel_tol * std::abs(total))) {
    if (n >= max_intervals)
      fail(errc::integration_not_converged,
           "interval budget exhausted (" + std::to_string(max_intervals) +
               " panels), error " + std::to_string(err));
    Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    Panel left = evaluate(f, worst.a, mid);
    Panel right = evaluate(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++n;
  }
  return {total, err, n};
}

}  // namespace optomech
