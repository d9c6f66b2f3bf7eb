#include "optomech/sde_oracle.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>

#include "optomech/errors.hpp"
#include "optomech/rng.hpp"

namespace optomech {

namespace {

using M4 = Eigen::Matrix4d;

M4 to_eigen(const std::array<double, 16>& a) {
  M4 m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = a[std::size_t(4 * i + j)];
  return m;
}

std::array<double, 16> from_eigen(const M4& m) {
  std::array<double, 16> a{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) a[std::size_t(4 * i + j)] = m(i, j);
  return a;
}

// Semidefinite Cholesky in the pivot order (p, q, X, Y), returned with rows in
// the original state order: row r of the result holds the z coefficients of
// state r. Ordering p first pins the dominant thermal kick to z[0] in every
// mode, which keeps common-seed runs pathwise aligned.
std::array<double, 16> permuted_chol(const M4& Q) {
  static constexpr int perm[4] = {1, 0, 2, 3};
  double maxd = 0.0;
  for (int i = 0; i < 4; ++i) maxd = std::max(maxd, Q(i, i));
  double L[4][4] = {};
  for (int i = 0; i < 4; ++i) {
    double d = Q(perm[i], perm[i]);
    for (int k = 0; k < i; ++k) d -= L[i][k] * L[i][k];
    L[i][i] = (d > 1e-14 * maxd) ? std::sqrt(d) : 0.0;
    for (int j = i + 1; j < 4; ++j) {
      double off = Q(perm[j], perm[i]);
      for (int k = 0; k < i; ++k) off -= L[j][k] * L[i][k];
      L[j][i] = (L[i][i] > 0.0) ? off / L[i][i] : 0.0;
    }
  }
  std::array<double, 16> out{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out[std::size_t(4 * perm[i] + j)] = L[i][j];
  return out;
}

struct VanLoan {
  M4 phi;
  M4 q;  // exact step-noise covariance
};

VanLoan van_loan(const M4& A, const M4& D, double dt) {
  Eigen::Matrix<double, 8, 8> H = Eigen::Matrix<double, 8, 8>::Zero();
  H.topLeftCorner<4, 4>() = -A * dt;
  H.topRightCorner<4, 4>() = D * dt;
  H.bottomRightCorner<4, 4>() = A.transpose() * dt;
  const Eigen::Matrix<double, 8, 8> F = H.exp();
  VanLoan out;
  out.phi = F.bottomRightCorner<4, 4>().transpose();
  out.q = out.phi * F.topRightCorner<4, 4>();
  out.q = 0.5 * (out.q + out.q.transpose()).eval();
  return out;
}

struct Welford {
  double mean = 0.0;
  double m2 = 0.0;
  uint64_t n = 0;
  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / double(n);
    m2 += d * (x - mean);
  }
  double variance() const { return n > 1 ? m2 / double(n - 1) : 0.0; }
};

class NormalStream {
 public:
  explicit NormalStream(uint64_t seed) : rng_(seed) {}
  void take4(double* z) {
    if (pos_ + 4 > buf_.size()) refill();
    z[0] = buf_[pos_];
    z[1] = buf_[pos_ + 1];
    z[2] = buf_[pos_ + 2];
    z[3] = buf_[pos_ + 3];
    pos_ += 4;
  }

 private:
  void refill() {
    fill_normals(rng_, buf_.data(), buf_.size());
    pos_ = 0;
  }
  Xoshiro256pp rng_;
  std::vector<double> buf_ = std::vector<double>(32768);
  std::size_t pos_ = buf_.size();
};

}  // namespace

std::array<double, 16> drift_matrix(const OperatingPoint& op, const MechanicalParams& mech) {
  std::array<double, 16> a{};
  const double om = mech.omega_m;
  a[0 * 4 + 1] = om;
  a[1 * 4 + 0] = -(om + op.h);
  a[1 * 4 + 1] = -mech.gamma_m;
  a[1 * 4 + 2] = op.g;
  a[2 * 4 + 0] = -op.gamma_abs;
  a[2 * 4 + 2] = -op.kappa_t;
  a[2 * 4 + 3] = op.delta;
  a[3 * 4 + 0] = op.g;
  a[3 * 4 + 2] = -op.delta;
  a[3 * 4 + 3] = -op.kappa_t;
  return a;
}

std::array<double, 16> diffusion_matrix(const OperatingPoint& op, const MechanicalParams& mech,
                                        const BathParams& bath) {
  std::array<double, 16> d{};
  d[1 * 4 + 1] = 2.0 * mech.gamma_m * (bath.n_thermal + 0.5);
  if (op.gamma_abs != 0.0) {
    if (op.kappa1 <= 0.0)
      fail(errc::division_by_zero_kappa1,
           "absorption force noise needs kappa1 > 0 when gamma_abs != 0");
    d[1 * 4 + 1] += op.gamma_abs * op.gamma_abs / (4.0 * op.kappa1);
    d[2 * 4 + 2] = op.kappa1;
    d[3 * 4 + 3] = op.kappa1;
    d[1 * 4 + 3] = 0.5 * op.gamma_abs;
    d[3 * 4 + 1] = 0.5 * op.gamma_abs;
  }
  return d;
}

Propagator make_propagator(const OperatingPoint& op, const MechanicalParams& mech,
                           const BathParams& bath, double dt) {
  if (!(dt > 0.0)) fail(errc::bad_argument, "propagator needs dt > 0");
  const VanLoan vl =
      van_loan(to_eigen(drift_matrix(op, mech)), to_eigen(diffusion_matrix(op, mech, bath)), dt);
  Propagator prop;
  prop.phi = from_eigen(vl.phi);
  prop.noise_l = permuted_chol(vl.q);
  prop.dt = dt;
  return prop;
}

std::array<double, 16> stationary_covariance(const OperatingPoint& op,
                                             const MechanicalParams& mech,
                                             const BathParams& bath) {
  const M4 A = to_eigen(drift_matrix(op, mech));
  const M4 D = to_eigen(diffusion_matrix(op, mech, bath));
  // Kronecker form of A S + S A^T = -D with column-stacked S.
  Eigen::Matrix<double, 16, 16> K = Eigen::Matrix<double, 16, 16>::Zero();
  Eigen::Matrix<double, 16, 1> rhs;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      rhs(i + 4 * j) = -D(i, j);
      for (int k = 0; k < 4; ++k) {
        K(i + 4 * j, k + 4 * j) += A(i, k);
        K(i + 4 * j, i + 4 * k) += A(j, k);
      }
    }
  Eigen::FullPivLU<Eigen::Matrix<double, 16, 16>> lu(K);
  if (!lu.isInvertible())
    fail(errc::no_convergence, "stationary covariance: drift matrix is singular or marginal");
  const Eigen::Matrix<double, 16, 1> v = lu.solve(rhs);
  M4 S;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) S(i, j) = v(i + 4 * j);
  S = 0.5 * (S + S.transpose()).eval();
  return from_eigen(S);
}

double max_rate(const OperatingPoint& op, const MechanicalParams& mech) {
  return std::max({mech.omega_m, op.kappa_t, std::abs(op.delta)});
}

SimSummary integrate(const SystemParams& p, const OperatingPoint& op, const SimConfig& cfg,
                     const RecordSink& sink, const DispersionModel* disp) {
  if (cfg.trajectories < 1) fail(errc::bad_argument, "integrate needs trajectories >= 1");
  if (!(cfg.duration > 0.0)) fail(errc::bad_argument, "integrate needs duration > 0");
  if (cfg.record_stride < 1) fail(errc::bad_argument, "integrate needs record_stride >= 1");

  const double dt_guard = 0.05 / max_rate(op, p.mech);
  double dt = cfg.dt;
  if (dt <= 0.0) {
    dt = dt_guard;
  } else if (dt > dt_guard * (1.0 + 1e-9)) {
    fail(errc::bad_argument, "dt exceeds the stability guard 0.05 / max rate");
  }
  const uint64_t steps = uint64_t(std::ceil(cfg.duration / dt));

  const bool nonlinear = cfg.mode == SimMode::nonlinear;
  if (nonlinear) {
    if (disp == nullptr)
      fail(errc::bad_argument, "nonlinear mode needs the dispersion model");
    if (std::abs(op.gamma_abs) > 1e-3 * p.mech.gamma_m)
      fail(errc::bad_argument,
           "nonlinear mode does not model the absorption noise channel");
  }

  // Linear machinery; also provides the stationary draw for both modes.
  const Propagator prop = make_propagator(op, p.mech, p.bath, dt);
  std::array<double, 16> stat_l{};
  if (cfg.stationary_init && !cfg.use_init)
    stat_l = permuted_chol(to_eigen(stationary_covariance(op, p.mech, p.bath)));

  // Mechanics-only exact step for the nonlinear splitting: state times phi_m
  // plus force times rvec plus noise. Force is frozen over the step.
  double phim[4] = {};
  double rvec[2] = {};
  double lm[3] = {};  // p <- lm0 z0; q <- lm1 z0 + lm2 z1
  double omega_laser = 0.0;
  const double zpf = p.mech.x_zpf * p.mech.overlap;
  if (nonlinear) {
    M4 Am = M4::Zero();
    Am(0, 1) = p.mech.omega_m;
    Am(1, 0) = -p.mech.omega_m;
    Am(1, 1) = -p.mech.gamma_m;
    Am(2, 2) = -1.0;
    Am(3, 3) = -1.0;
    M4 Dm = M4::Zero();
    Dm(1, 1) = 2.0 * p.mech.gamma_m * (p.bath.n_thermal + 0.5);
    const VanLoan vm = van_loan(Am, Dm, dt);
    phim[0] = vm.phi(0, 0);
    phim[1] = vm.phi(0, 1);
    phim[2] = vm.phi(1, 0);
    phim[3] = vm.phi(1, 1);
    // R = M^-1 (Phi - I) applied to (0, F): column 1 of R scaled by F.
    const double om = p.mech.omega_m, gm = p.mech.gamma_m;
    const double det = om * om;  // det of [[0, om], [-om, -gm]]
    const double e00 = vm.phi(0, 0) - 1.0, e01 = vm.phi(0, 1);
    const double e10 = vm.phi(1, 0), e11 = vm.phi(1, 1) - 1.0;
    // M^-1 = [[-gm, -om], [om, 0]] / det
    rvec[0] = (-gm * e01 - om * e11) / det;
    rvec[1] = (om * e01) / det;
    const double qpp = vm.q(1, 1), qqp = vm.q(0, 1), qqq = vm.q(0, 0);
    lm[0] = qpp > 0.0 ? std::sqrt(qpp) : 0.0;
    lm[1] = lm[0] > 0.0 ? qqp / lm[0] : 0.0;
    const double rem = qqq - lm[1] * lm[1];
    lm[2] = rem > 0.0 ? std::sqrt(rem) : 0.0;
    (void)e00;
    (void)e10;
    omega_laser = disp->omega(op.z_s) - op.delta;
  }

  const double guard = 1e8 * std::max(1.0, std::sqrt(p.bath.n_thermal + 1.0));
  const uint64_t records = steps / uint64_t(cfg.record_stride);

  SimSummary sum;
  sum.dt = dt;
  sum.steps_per_traj = steps;
  sum.records_per_traj = records;
  sum.trajectories = cfg.trajectories;

  const double kappa_fixed = p.cavity.kappa0 + p.cavity.kappa2 + p.cavity.kappa_excess;
  const std::complex<double> a_stat =
      p.drive.e_amp / std::complex<double>(op.kappa_t, op.delta);
  const std::complex<double> rot =
      std::abs(a_stat) > 0.0 ? a_stat / std::abs(a_stat) : std::complex<double>(1.0, 0.0);

  Welford pooled_mean;
  std::vector<double> traj_vars;
  traj_vars.reserve(std::size_t(cfg.trajectories));

  for (int traj = 0; traj < cfg.trajectories; ++traj) {
    NormalStream zs(derive_stream_seed(cfg.seed, uint64_t(traj)));
    double z[4];

    // Initial state in deviation coordinates.
    double x[4] = {};
    if (cfg.use_init) {
      for (int i = 0; i < 4; ++i) x[i] = cfg.init[std::size_t(i)];
    } else if (cfg.stationary_init) {
      zs.take4(z);
      for (int r = 0; r < 4; ++r) {
        double acc = 0.0;
        for (int j = 0; j < 4; ++j) acc += stat_l[std::size_t(4 * r + j)] * z[j];
        x[r] = acc;
      }
    }

    Welford w;
    uint64_t since_record = 0;

    if (!nonlinear) {
      const std::array<double, 16>& F = prop.phi;
      const std::array<double, 16>& L = prop.noise_l;
      for (uint64_t i = 0; i < steps; ++i) {
        double y0 = F[0] * x[0] + F[1] * x[1] + F[2] * x[2] + F[3] * x[3];
        double y1 = F[4] * x[0] + F[5] * x[1] + F[6] * x[2] + F[7] * x[3];
        double y2 = F[8] * x[0] + F[9] * x[1] + F[10] * x[2] + F[11] * x[3];
        double y3 = F[12] * x[0] + F[13] * x[1] + F[14] * x[2] + F[15] * x[3];
        if (cfg.noise) {
          zs.take4(z);
          y0 += L[0] * z[0] + L[1] * z[1] + L[2] * z[2] + L[3] * z[3];
          y1 += L[4] * z[0] + L[5] * z[1] + L[6] * z[2] + L[7] * z[3];
          y2 += L[8] * z[0] + L[9] * z[1] + L[10] * z[2] + L[11] * z[3];
          y3 += L[12] * z[0] + L[13] * z[1] + L[14] * z[2] + L[15] * z[3];
        }
        x[0] = y0;
        x[1] = y1;
        x[2] = y2;
        x[3] = y3;
        if (std::abs(x[0]) > guard)
          fail(errc::diverged, "trajectory left the trust region (linear mode)");
        if (++since_record == uint64_t(cfg.record_stride)) {
          since_record = 0;
          w.add(x[0]);
          pooled_mean.add(x[0]);
          if (sink) sink(traj, x[0]);
        }
      }
    } else {
      // Full coordinates: mechanics (q, p), cavity amplitude a in the lab frame.
      double q = op.q_s + x[0];
      double pm = x[1];
      std::complex<double> a =
          a_stat + rot * (std::complex<double>(x[2], x[3]) / std::sqrt(2.0));
      for (uint64_t i = 0; i < steps; ++i) {
        const double zq = p.membrane.z0 + zpf * q;
        const double force = -disp->domega_dz(zq) * zpf * std::norm(a);
        double qn = phim[0] * q + phim[1] * pm + rvec[0] * force;
        double pn = phim[2] * q + phim[3] * pm + rvec[1] * force;
        if (cfg.noise) {
          zs.take4(z);
          pn += lm[0] * z[0];
          qn += lm[1] * z[0] + lm[2] * z[1];
        }
        q = qn;
        pm = pn;
        const double zq2 = p.membrane.z0 + zpf * q;
        const double kt = kappa_fixed + disp->kappa1(zq2);
        const double det_q = disp->omega(zq2) - omega_laser;
        const std::complex<double> decay(kt, det_q);
        const std::complex<double> a_ss = p.drive.e_amp / decay;
        a = a_ss + (a - a_ss) * std::exp(-decay * dt);
        if (std::abs(q - op.q_s) > guard)
          fail(errc::diverged, "trajectory left the trust region (nonlinear mode)");
        if (++since_record == uint64_t(cfg.record_stride)) {
          since_record = 0;
          const double dev = q - op.q_s;
          w.add(dev);
          pooled_mean.add(dev);
          if (sink) sink(traj, dev);
        }
      }
    }

    traj_vars.push_back(w.variance());
  }

  sum.q_mean = pooled_mean.mean;
  sum.q_var_per_traj = traj_vars;
  double vmean = 0.0;
  for (double v : traj_vars) vmean += v;
  vmean /= double(traj_vars.size());
  sum.q_var = vmean;
  if (traj_vars.size() > 1) {
    double s2 = 0.0;
    for (double v : traj_vars) s2 += (v - vmean) * (v - vmean);
    s2 /= double(traj_vars.size() - 1);
    sum.q_var_sem = std::sqrt(s2 / double(traj_vars.size()));
  }
  return sum;
}

}  // namespace optomech
