#include "optomech/slab_optics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "optomech/constants.hpp"
#include "optomech/errors.hpp"

namespace optomech {

namespace {

// Geometry shorthand: membrane of thickness d centered at z0 between mirrors
// at -L/2 and +L/2 leaves vacuum gaps u (left) and v (right).
struct Gaps {
  double u, v, d;
};

Gaps gaps(const CavityParams& cav, const MembraneParams& mem, double z0) {
  const double d = mem.thickness;
  const double u = 0.5 * cav.length + z0 - 0.5 * d;
  const double v = 0.5 * cav.length - z0 - 0.5 * d;
  if (u <= 0.0 || v <= 0.0)
    fail(errc::bad_argument, "membrane position outside the cavity");
  return {u, v, d};
}

struct GEval {
  double g, dg_dk, dg_dn, dg_dz;
};

// Resonance function and its first derivatives, all closed-form. The field is
// sinusoidal in the gaps and in the slab; matching across the four interfaces
// with perfectly reflecting mirrors collapses to g = 0.
GEval eval_g(double k, double n, const Gaps& w) {
  const double A = k * n * w.d;
  const double B = k * (w.u + w.v);
  const double C = k * w.u;
  const double D = k * w.v;
  const double sA = std::sin(A), cA = std::cos(A);
  const double sB = std::sin(B), cB = std::cos(B);
  const double sC = std::sin(C), cC = std::cos(C);
  const double sD = std::sin(D), cD = std::cos(D);
  const double mix = (1.0 / n) * cC * cD - n * sC * sD;

  GEval e;
  e.g = cA * sB + sA * mix;
  e.dg_dk = -n * w.d * sA * sB + (w.u + w.v) * cA * cB + n * w.d * cA * mix +
            sA * ((1.0 / n) * (-w.u * sC * cD - w.v * cC * sD) -
                  n * (w.u * cC * sD + w.v * sC * cD));
  e.dg_dn = -k * w.d * sA * sB + k * w.d * cA * mix +
            sA * (-(1.0 / (n * n)) * cC * cD - sC * sD);
  // d/dz0 at fixed k: only the gap asymmetry enters, sin(D - C) = -sin(2 k z0)
  e.dg_dz = k * (1.0 / n - n) * sA * std::sin(D - C);
  return e;
}

double g_only(double k, double n, const Gaps& w) {
  const double A = k * n * w.d;
  const double B = k * (w.u + w.v);
  return std::cos(A) * std::sin(B) +
         std::sin(A) * ((1.0 / n) * std::cos(k * w.u) * std::cos(k * w.v) -
                        n * std::sin(k * w.u) * std::sin(k * w.v));
}

}  // namespace

SlabAmplitudes slab_amplitudes(double k, std::complex<double> n, double thickness) {
  if (!(k > 0.0) || !(thickness >= 0.0))
    fail(errc::bad_argument, "slab_amplitudes needs k > 0 and thickness >= 0");
  // characteristic matrix of the layer at normal incidence, in the time
  // convention where n_imag >= 0 absorbs (|r|^2 + |t|^2 <= 1)
  const std::complex<double> delta = n * k * thickness;
  const std::complex<double> cd = std::cos(delta);
  const std::complex<double> sd = std::sin(delta);
  const std::complex<double> i(0.0, 1.0);
  const std::complex<double> m00 = cd, m01 = -i * sd / n;
  const std::complex<double> m10 = -i * n * sd, m11 = cd;
  const std::complex<double> denom = m00 + m01 + m10 + m11;
  SlabAmplitudes out;
  out.r = (m00 + m01 - m10 - m11) / denom;
  out.t = 2.0 / denom;
  return out;
}

double slab_reflectivity(double k, std::complex<double> n, double thickness) {
  return std::norm(slab_amplitudes(k, n, thickness).r);
}

double resonance_function(double k, const CavityParams& cav,
                          const MembraneParams& mem, double z0) {
  return g_only(k, mem.n_real, gaps(cav, mem, z0));
}

namespace detail {

double brent_root(const std::function<double(double)>& f, double a, double b,
                  double x_tol, int max_iter) {
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (fa * fb > 0.0)
    fail(errc::no_root_in_bracket, "endpoints do not bracket a sign change");
  double c = a, fc = fa, d = b - a, e = d;
  for (int it = 0; it < max_iter; ++it) {
    if (std::abs(fc) < std::abs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    const double tol = 2.0 * 2.220446049250313e-16 * std::abs(b) + 0.5 * x_tol;
    const double m = 0.5 * (c - b);
    if (std::abs(m) <= tol || fb == 0.0) return b;
    if (std::abs(e) < tol || std::abs(fa) <= std::abs(fb)) {
      d = m; e = m;  // bisection
    } else {
      double p, q;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {
        const double qq = fa / fc, rr = fb / fc;
        p = s * (2.0 * m * qq * (qq - rr) - (b - a) * (rr - 1.0));
        q = (qq - 1.0) * (rr - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q; else p = -p;
      if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
        e = d; d = p / q;  // accept interpolation
      } else {
        d = m; e = m;
      }
    }
    a = b; fa = fb;
    b += (std::abs(d) > tol) ? d : (m > 0.0 ? tol : -tol);
    fb = f(b);
    if ((fb > 0.0) == (fc > 0.0)) { c = a; fc = fa; e = d = b - a; }
  }
  fail(errc::no_convergence, "brent_root: iteration budget exhausted");
}

}  // namespace detail

CavityMode solve_mode(const CavityParams& cav, const MembraneParams& mem,
                      double z0, int branch) {
  const Gaps w = gaps(cav, mem, z0);
  const double n = mem.n_real;
  const double k_target = (cav.omega_ref + branch * cav.fsr) / c_light;
  if (!(k_target > 0.0))
    fail(errc::bad_argument, "cavity omega_ref/fsr not set");
  const double fsr_k = cav.fsr / c_light;
  const double k_lo = k_target - 0.55 * fsr_k;
  const double k_hi = k_target + 0.55 * fsr_k;

  // coarse scan, then refine every sign change and keep the root nearest the
  // requested branch
  constexpr int kScan = 1200;
  double g_max = 0.0;
  double prev_k = k_lo, prev_g = g_only(k_lo, n, w);
  std::vector<std::pair<double, double>> brackets;
  for (int i = 1; i <= kScan; ++i) {
    const double k = k_lo + (k_hi - k_lo) * double(i) / kScan;
    const double g = g_only(k, n, w);
    g_max = std::max(g_max, std::abs(g));
    if ((prev_g < 0.0 && g >= 0.0) || (prev_g > 0.0 && g <= 0.0))
      brackets.emplace_back(prev_k, k);
    prev_k = k;
    prev_g = g;
  }
  if (brackets.empty())
    fail(errc::no_root_in_bracket,
         "no cavity resonance in the scan window around branch " +
             std::to_string(branch));

  double best_k = 0.0, best_dist = 1e300;
  for (const auto& [ka, kb] : brackets) {
    double k_root = detail::brent_root(
        [&](double k) { return g_only(k, n, w); }, ka, kb, 1e-12 * k_target);
    // polish to machine precision with the analytic derivative
    for (int it = 0; it < 3; ++it) {
      const GEval e = eval_g(k_root, n, w);
      if (e.dg_dk == 0.0) break;
      k_root -= e.g / e.dg_dk;
    }
    const double dist = std::abs(k_root - k_target);
    if (dist < best_dist) {
      best_dist = dist;
      best_k = k_root;
    }
  }

  const GEval e = eval_g(best_k, n, w);
  // dg/dk ~ g_max * L for a simple crossing; a vanishing slope means two
  // longitudinal branches are colliding and the perturbative loss treatment
  // (and the branch identity itself) is ill-defined
  if (std::abs(e.dg_dk) < 1e-9 * g_max * cav.length)
    fail(errc::degenerate_crossing, "resonance condition has a near-double root");

  CavityMode mode;
  mode.k = best_k;
  mode.omega = c_light * best_k;
  // first order in n_imag: k acquires -i n_imag dg/dn / dg/dk
  mode.kappa1 = mem.n_imag > 0.0
                    ? c_light * mem.n_imag * e.dg_dn / e.dg_dk
                    : 0.0;
  if (mem.n_imag > 0.0 && mode.kappa1 <= 0.0)
    fail(errc::no_convergence, "perturbative kappa1 came out non-positive");
  return mode;
}

double kappa1_exact(const CavityParams& cav, const MembraneParams& mem,
                    double z0, double k_start) {
  const Gaps w = gaps(cav, mem, z0);
  const std::complex<double> n(mem.n_real, mem.n_imag);
  std::complex<double> k(k_start, 0.0);
  auto cg = [&](std::complex<double> kk) {
    const std::complex<double> A = kk * n * w.d;
    const std::complex<double> B = kk * (w.u + w.v);
    const std::complex<double> C = kk * w.u;
    const std::complex<double> D = kk * w.v;
    return std::cos(A) * std::sin(B) +
           std::sin(A) * ((1.0 / n) * std::cos(C) * std::cos(D) -
                          n * std::sin(C) * std::sin(D));
  };
  // complex Newton with a central-difference derivative in k
  const double hk = 1e-7 * std::abs(k_start) * 1e-2;
  for (int it = 0; it < 60; ++it) {
    const std::complex<double> g0 = cg(k);
    const std::complex<double> dg = (cg(k + hk) - cg(k - hk)) / (2.0 * hk);
    if (std::abs(dg) == 0.0) fail(errc::no_convergence, "kappa1_exact: flat derivative");
    const std::complex<double> step = g0 / dg;
    k -= step;
    if (std::abs(step) < 1e-15 * std::abs(k)) break;
    if (it == 59) fail(errc::no_convergence, "kappa1_exact: Newton did not converge");
  }
  return -c_light * k.imag();
}

double find_node(const CavityParams& cav, const MembraneParams& mem,
                 double z_near, int branch) {
  // stationary points of omega(z0) satisfy sin(2 k z0) = 0; iterate the fixed
  // point z = m pi / (2 k(z)) for the node (frequency maximum)
  auto solve_k = [&](double z) { return solve_mode(cav, mem, z, branch).k; };
  auto fixed_point = [&](long m) {
    double z = z_near;
    for (int it = 0; it < 60; ++it) {
      const double z_new = (m == 0) ? 0.0 : double(m) * pi / (2.0 * solve_k(z));
      if (std::abs(z_new - z) < 1e-16 * std::max(1.0, std::abs(z_new)) ||
          (z_new == z))
        return z_new;
      z = z_new;
    }
    return z;
  };
  const double k0 = solve_k(z_near);
  const long m = std::lround(2.0 * k0 * z_near / pi);
  double z_star = fixed_point(m);
  // node vs antinode: the node maximizes omega (least overlap with the field)
  const double dz = 0.25 * two_pi / k0 * 0.05;
  auto omega_at = [&](double z) { return solve_mode(cav, mem, z, branch).omega; };
  const double curv = omega_at(z_star + dz) - 2.0 * omega_at(z_star) + omega_at(z_star - dz);
  if (curv > 0.0) {
    // z_star is an antinode; the nearest nodes are a quarter wave away
    const double za = fixed_point(m - 1), zb = fixed_point(m + 1);
    z_star = (std::abs(za - z_near) <= std::abs(zb - z_near)) ? za : zb;
  }
  return z_star;
}

namespace {

class DirectModel final : public DispersionModel {
 public:
  explicit DirectModel(const SystemParams& p)
      : z_ref_(p.membrane.z0),
        omega_ref_(p.drive.omega_l + p.direct.delta0),
        s_(p.direct.domega_dz),
        c2_(p.direct.d2omega_dz2),
        k1_(p.direct.kappa1),
        k1s_(p.direct.dkappa1_dz) {}

  double omega(double z) const override {
    const double dz = z - z_ref_;
    return omega_ref_ + s_ * dz + 0.5 * c2_ * dz * dz;
  }
  double domega_dz(double z) const override { return s_ + c2_ * (z - z_ref_); }
  double d2omega_dz2(double) const override { return c2_; }
  double kappa1(double z) const override { return k1_ + k1s_ * (z - z_ref_); }
  double dkappa1_dz(double) const override { return k1s_; }

 private:
  double z_ref_, omega_ref_, s_, c2_, k1_, k1s_;
};

class SlabModel final : public DispersionModel {
 public:
  SlabModel(const CavityParams& cav, const MembraneParams& mem)
      : cav_(cav), mem_(mem), h_(two_pi * c_light / cav.omega_ref / 2000.0) {}

  double omega(double z) const override { return solve_mode(cav_, mem_, z).omega; }

  double domega_dz(double z) const override {
    // implicit differentiation of g(k(z), z) = 0; fully closed form
    const CavityMode m = solve_mode(cav_, mem_, z);
    const GEval e = eval_g(m.k, mem_.n_real, gaps(cav_, mem_, z));
    return -c_light * e.dg_dz / e.dg_dk;
  }

  double d2omega_dz2(double z) const override {
    return richardson([this](double zz) { return domega_dz(zz); }, z);
  }

  double kappa1(double z) const override { return solve_mode(cav_, mem_, z).kappa1; }

  double dkappa1_dz(double z) const override {
    return richardson([this](double zz) { return kappa1(zz); }, z);
  }

 private:
  template <class F>
  double richardson(const F& f, double z) const {
    // central differences at h and h/2, one extrapolation step
    const double d1 = (f(z + h_) - f(z - h_)) / (2.0 * h_);
    const double d2 = (f(z + 0.5 * h_) - f(z - 0.5 * h_)) / h_;
    return (4.0 * d2 - d1) / 3.0;
  }

  CavityParams cav_;
  MembraneParams mem_;
  double h_;  // FD step, lambda / 2000
};

}  // namespace

std::unique_ptr<DispersionModel> make_dispersion(const SystemParams& p) {
  if (p.dispersion == DispersionKind::slab)
    return std::make_unique<SlabModel>(p.cavity, p.membrane);
  return std::make_unique<DirectModel>(p);
}

}  // namespace optomech
