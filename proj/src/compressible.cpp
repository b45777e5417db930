// SPDX-License-Identifier: Apache-2.0
#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "cornerflow/compressible.hpp"
#include "cornerflow/error.hpp"
#include "cornerflow/simd/stencil_kernels.hpp"

namespace cornerflow {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

// Ghosted row storage: row i starts at data + i * stride + 1.
struct Rows {
  std::size_t n = 0, stride = 0;
  std::vector<double> data;

  Rows(std::size_t rows, std::size_t cols) : n(cols), stride(cols + 2), data(rows * (cols + 2), 0.0) {}
  double* row(std::size_t i) { return data.data() + i * stride + 1; }
  const double* row(std::size_t i) const { return data.data() + i * stride + 1; }
  void wrap(std::size_t i) {
    double* r = row(i);
    r[-1] = r[n - 1];
    r[n] = r[0];
  }
};

// Weights of a one-sided derivative exact for 1, e^s, e^-s on offsets 0, h, 2h.
std::array<double, 3> one_sided(double h) {
  Eigen::Matrix3d a;
  Eigen::Vector3d b(0.0, 1.0, -1.0);
  for (int k = 0; k < 3; ++k) {
    a(0, k) = 1.0;
    a(1, k) = std::exp(k * h);
    a(2, k) = std::exp(-k * h);
  }
  const Eigen::Vector3d c = a.fullPivLu().solve(b);
  return {c(0), c(1), c(2)};
}

struct Where {
  double ratio = 0.0;
  double s = 0.0, theta = 0.0;
};

class Solver {
 public:
  Solver(const ConformalGrid& grid, const GasModel& gas, const BernoulliState& state, const FarField& far,
         const CompressibleOptions& options)
      : g_(grid),
        gas_(gas),
        state_(state),
        far_(far),
        opt_(options),
        nr_(grid.n_r()),
        nt_(grid.n_theta()),
        psi_(nr_, nt_),
        inv_g2_r_(nr_ - 1, nt_),
        inv_g2_a_(nr_, nt_),
        m_r_(nr_ - 1, nt_),
        m_a_(nr_, nt_),
        h_r_(nr_ - 1, nt_),
        h_a_(nr_, nt_) {
    const double ds = g_.ds();
    const double dt = g_.dtheta();
    cs_r_ = 1.0 / (2.0 * std::sinh(0.5 * ds));
    ct_r_ = 1.0 / (4.0 * std::sin(dt) * std::cosh(0.5 * ds));
    cs_a_ = 1.0 / (4.0 * std::sinh(ds) * std::cos(0.5 * dt));
    ct_a_ = 1.0 / (2.0 * std::sin(0.5 * dt));
    ws_ = 1.0 / (4.0 * std::sinh(0.5 * ds) * std::sinh(0.5 * ds));
    wt_ = 1.0 / (4.0 * std::sin(0.5 * dt) * std::sin(0.5 * dt));
    for (std::size_t k = 0; k + 1 < nr_; ++k) {
      for (std::size_t j = 0; j < nt_; ++j) {
        const double gm = g_.metric_at(g_.s(k) + 0.5 * ds, g_.theta(j));
        inv_g2_r_.row(k)[j] = 1.0 / (gm * gm);
      }
    }
    for (std::size_t i = 1; i + 1 < nr_; ++i) {
      for (std::size_t j = 0; j < nt_; ++j) {
        const double gm = g_.metric_at(g_.s(i), g_.theta(j) + 0.5 * dt);
        inv_g2_a_.row(i)[j] = 1.0 / (gm * gm);
      }
    }
    const double q_inf = std::abs(far_.w_inf);
    rho_inf_ = density_from_speed(state_, gas_, q_inf);
    FarField scaled = far_;
    scaled.w_inf *= rho_inf_;
    scaled.circulation *= rho_inf_;
    for (std::size_t j = 0; j < nt_; ++j) psi_.row(nr_ - 1)[j] = g_.incompressible_stream(g_.sigma(nr_ - 1, j), scaled);
    psi_.wrap(nr_ - 1);
    build_pattern();
  }

  CompressibleSolution run() {
    CompressibleSolution sol;
    sol.far = far_;
    sol.rho_inf = rho_inf_;
    sol.mach_inf = gas_.mach(std::abs(far_.w_inf), rho_inf_);

    // First iterate: the linear problem with h = 1 / rho_inf.
    std::fill(h_r_.data.begin(), h_r_.data.end(), 1.0 / rho_inf_);
    std::fill(h_a_.data.begin(), h_a_.data.end(), 1.0 / rho_inf_);
    std::vector<double> next = linear_solve(sol);
    store_interior(next, 1.0);

    const auto& k = simd::stencil_kernels();
    for (std::size_t it = 0;; ++it) {
      if (it > opt_.max_iterations) {
        std::vector<Error::Detail> d{{"iterations", double(it)}, {"residual", sol.residual}};
        for (std::size_t r = 0; r < sol.log.size() && r < 32; ++r) d.emplace_back("history", sol.log[r].residual);
        throw Error(ErrorKind::iteration_limit, "Picard iteration did not converge", std::move(d));
      }
      IterationRecord rec;
      if (!opt_.incompressible) {
        compute_face_m(k);
        const Where worst = worst_face();
        rec.max_flux_ratio = worst.ratio;
        if (it == 0) sol.first_flux_ratio = worst.ratio;
        if (worst.ratio >= 1.0) {
          if (!opt_.capped) throw excursion(worst, it, sol.first_flux_ratio, "face");
          sol.non_physical = true;
        }
        update_h();
      }
      rec.residual = nonlinear_residual(k);
      sol.residual = rec.residual;
      sol.log.push_back(rec);
      if (rec.residual < opt_.tolerance || opt_.incompressible) {
        sol.converged = rec.residual < opt_.tolerance;
        break;
      }
      next = linear_solve(sol);
      store_interior(next, opt_.relaxation);
    }
    if (opt_.incompressible && !sol.converged) {
      throw Error(ErrorKind::solver, "linear solve did not reach the tolerance", {{"residual", sol.residual}});
    }
    node_fields(sol);
    return sol;
  }

 private:
  std::size_t unknown(std::size_t i, std::size_t j) const { return (i - 1) * nt_ + j; }

  void build_pattern() {
    const std::size_t n = (nr_ - 2) * nt_;
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(5 * n);
    for (std::size_t i = 1; i + 1 < nr_; ++i) {
      for (std::size_t j = 0; j < nt_; ++j) {
        const std::size_t u = unknown(i, j);
        t.emplace_back(u, u, 1.0);
        t.emplace_back(u, unknown(i, (j + 1) % nt_), 0.0);
        t.emplace_back(u, unknown(i, (j + nt_ - 1) % nt_), 0.0);
        if (i > 1) t.emplace_back(u, unknown(i - 1, j), 0.0);
        if (i + 2 < nr_) t.emplace_back(u, unknown(i + 1, j), 0.0);
      }
    }
    k_.resize(n, n);
    k_.setFromTriplets(t.begin(), t.end());
    k_.makeCompressed();
    ldlt_.analyzePattern(k_);
  }

  void assemble(Eigen::VectorXd& b) {
    k_.coeffs().setZero();
    b.setZero(k_.rows());
    for (std::size_t i = 1; i + 1 < nr_; ++i) {
      const double* h_in = h_r_.row(i - 1);
      const double* h_out = h_r_.row(i);
      const double* h_ang = h_a_.row(i);
      for (std::size_t j = 0; j < nt_; ++j) {
        const std::size_t u = unknown(i, j);
        const double a_in = ws_ * h_in[j];
        const double a_out = ws_ * h_out[j];
        const double a_next = wt_ * h_ang[j];
        const double a_prev = wt_ * h_ang[j == 0 ? nt_ - 1 : j - 1];
        k_.coeffRef(u, u) += a_in + a_out + a_next + a_prev;
        k_.coeffRef(u, unknown(i, (j + 1) % nt_)) -= a_next;
        k_.coeffRef(u, unknown(i, (j + nt_ - 1) % nt_)) -= a_prev;
        if (i > 1) {
          k_.coeffRef(u, unknown(i - 1, j)) -= a_in;
        } else {
          b(u) += a_in * psi_.row(0)[j];
        }
        if (i + 2 < nr_) {
          k_.coeffRef(u, unknown(i + 1, j)) -= a_out;
        } else {
          b(u) += a_out * psi_.row(nr_ - 1)[j];
        }
      }
    }
  }

  std::vector<double> linear_solve(CompressibleSolution& sol) {
    Eigen::VectorXd b;
    assemble(b);
    ldlt_.factorize(k_);
    if (ldlt_.info() != Eigen::Success) throw Error(ErrorKind::solver, "factorisation of the stencil system failed");
    Eigen::VectorXd x = ldlt_.solve(b);
    for (int pass = 0; pass < 2; ++pass) x += ldlt_.solve(Eigen::VectorXd(b - k_ * x));
    const double bn = std::max(b.lpNorm<Eigen::Infinity>(), 1e-300);
    const double lin = (b - k_ * x).lpNorm<Eigen::Infinity>() / bn;
    if (!sol.log.empty()) sol.log.back().linear_residual = lin;
    return {x.data(), x.data() + x.size()};
  }

  void store_interior(const std::vector<double>& x, double omega) {
    for (std::size_t i = 1; i + 1 < nr_; ++i) {
      double* r = psi_.row(i);
      for (std::size_t j = 0; j < nt_; ++j) r[j] = (1.0 - omega) * r[j] + omega * x[unknown(i, j)];
      psi_.wrap(i);
    }
  }

  void compute_face_m(const simd::StencilKernels& k) {
    for (std::size_t r = 0; r + 1 < nr_; ++r) {
      k.radial_m(psi_.row(r), psi_.row(r + 1), inv_g2_r_.row(r), nt_, cs_r_, ct_r_, m_r_.row(r));
    }
    for (std::size_t i = 1; i + 1 < nr_; ++i) {
      k.angular_m(psi_.row(i - 1), psi_.row(i), psi_.row(i + 1), inv_g2_a_.row(i), nt_, cs_a_, ct_a_, m_a_.row(i));
    }
  }

  Where worst_face() const {
    const double m_max = state_.flux_max_m();
    Where w;
    for (std::size_t r = 0; r + 1 < nr_; ++r) {
      const double* m = m_r_.row(r);
      for (std::size_t j = 0; j < nt_; ++j) {
        if (m[j] / m_max > w.ratio) w = {m[j] / m_max, g_.s(r) + 0.5 * g_.ds(), g_.theta(j)};
      }
    }
    for (std::size_t i = 1; i + 1 < nr_; ++i) {
      const double* m = m_a_.row(i);
      for (std::size_t j = 0; j < nt_; ++j) {
        if (m[j] / m_max > w.ratio) w = {m[j] / m_max, g_.s(i), g_.theta(j) + 0.5 * g_.dtheta()};
      }
    }
    return w;
  }

  Error excursion(const Where& w, std::size_t iteration, double first_ratio, const char* where) const {
    const Point z = g_.to_plane(g_.sigma_at(w.s, w.theta));
    return Error(ErrorKind::sonic_excursion, std::string("sonic excursion at a grid ") + where,
                 {{"x", z.real()},
                  {"y", z.imag()},
                  {"s", w.s},
                  {"theta", w.theta},
                  {"flux_ratio", w.ratio},
                  {"first_flux_ratio", first_ratio},
                  {"iteration", double(iteration)}});
  }

  double inverse_density(double m) const {
    const double cap = state_.flux_max_m() * (1.0 - 1e-9);
    return density_from_flux(state_, gas_, std::min(m, cap)).inverse_density;
  }

  void update_h() {
    for (std::size_t r = 0; r + 1 < nr_; ++r) {
      const double* m = m_r_.row(r);
      double* h = h_r_.row(r);
      for (std::size_t j = 0; j < nt_; ++j) h[j] = inverse_density(m[j]);
    }
    for (std::size_t i = 1; i + 1 < nr_; ++i) {
      const double* m = m_a_.row(i);
      double* h = h_a_.row(i);
      for (std::size_t j = 0; j < nt_; ++j) h[j] = inverse_density(m[j]);
      h_a_.wrap(i);
    }
  }

  double nonlinear_residual(const simd::StencilKernels& k) {
    std::vector<double> out(nt_);
    double worst = 0.0, diag = 0.0, peak = 0.0;
    for (std::size_t i = 0; i < nr_; ++i) {
      for (std::size_t j = 0; j < nt_; ++j) peak = std::max(peak, std::abs(psi_.row(i)[j]));
    }
    for (std::size_t i = 1; i + 1 < nr_; ++i) {
      k.residual(psi_.row(i - 1), psi_.row(i), psi_.row(i + 1), h_r_.row(i - 1), h_r_.row(i), h_a_.row(i), nt_, ws_,
                 wt_, out.data());
      for (std::size_t j = 0; j < nt_; ++j) {
        worst = std::max(worst, std::abs(out[j]));
        const double d = ws_ * (h_r_.row(i - 1)[j] + h_r_.row(i)[j]) + wt_ * (h_a_.row(i)[j] + h_a_.row(i)[j - 1]);
        diag = std::max(diag, d);
      }
    }
    return worst / std::max(diag * peak, 1e-300);
  }

  void node_fields(CompressibleSolution& sol) {
    const std::size_t n = nr_ * nt_;
    sol.psi.resize(n);
    sol.rho.assign(n, nan);
    sol.mach.assign(n, nan);
    sol.velocity.assign(n, {nan, nan});
    const double ds = g_.ds();
    const auto lo = one_sided(ds);
    const auto hi = one_sided(-ds);
    const double central = 1.0 / (2.0 * std::sinh(ds));
    const double dtheta = 1.0 / (2.0 * std::sin(g_.dtheta()));
    const double m_max = state_.flux_max_m();
    Where worst;
    for (std::size_t i = 0; i < nr_; ++i) {
      const double* r = psi_.row(i);
      for (std::size_t j = 0; j < nt_; ++j) {
        const std::size_t idx = i * nt_ + j;
        sol.psi[idx] = r[j];
        if (g_.flagged(i, j)) continue;
        double ps;
        if (i == 0) {
          ps = lo[0] * r[j] + lo[1] * psi_.row(1)[j] + lo[2] * psi_.row(2)[j];
        } else if (i + 1 == nr_) {
          ps = hi[0] * r[j] + hi[1] * psi_.row(i - 1)[j] + hi[2] * psi_.row(i - 2)[j];
        } else {
          ps = (psi_.row(i + 1)[j] - psi_.row(i - 1)[j]) * central;
        }
        const double pt = (r[j + 1] - r[j - 1]) * dtheta;
        const Point sigma = g_.sigma(i, j);
        const Point jac = sigma * g_.map_derivative(sigma);
        const double gm = std::abs(jac);
        const double m = 0.5 * (ps * ps + pt * pt) / (gm * gm);
        double rho = rho_inf_;
        if (!opt_.incompressible) {
          if (m / m_max > worst.ratio) worst = {m / m_max, g_.s(i), g_.theta(j)};
          if (m >= m_max && !opt_.capped) throw excursion({m / m_max, g_.s(i), g_.theta(j)}, sol.log.size(), sol.first_flux_ratio, "node");
          if (m >= m_max) sol.non_physical = true;
          rho = 1.0 / inverse_density(m);
        }
        const double q = std::sqrt(2.0 * m) / rho;
        sol.rho[idx] = rho;
        sol.mach[idx] = gas_.mach(q, rho);
        sol.velocity[idx] = Point{pt, ps} / (rho * jac);
        if (sol.mach[idx] > sol.max_mach) {
          sol.max_mach = sol.mach[idx];
          sol.max_mach_i = i;
          sol.max_mach_j = j;
        }
        if (g_.near_corner(i, j, opt_.corner_radius)) sol.corner_max_mach = std::max(sol.corner_max_mach, sol.mach[idx]);
      }
    }
  }

  const ConformalGrid& g_;
  const GasModel& gas_;
  const BernoulliState& state_;
  FarField far_;
  CompressibleOptions opt_;
  std::size_t nr_, nt_;
  Rows psi_, inv_g2_r_, inv_g2_a_, m_r_, m_a_, h_r_, h_a_;
  double cs_r_ = 0, ct_r_ = 0, cs_a_ = 0, ct_a_ = 0, ws_ = 0, wt_ = 0;
  double rho_inf_ = 1.0;
  Eigen::SparseMatrix<double> k_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
};

}  // namespace

CompressibleSolution solve_subsonic(const ConformalGrid& grid, const GasModel& gas, const BernoulliState& state,
                                    const FarField& far, const CompressibleOptions& options) {
  const double q_inf = std::abs(far.w_inf);
  if (!(q_inf < state.limit_speed())) {
    throw Error(ErrorKind::precondition, "free-stream speed reaches the limit speed", {{"speed", q_inf}});
  }
  const double rho_inf = density_from_speed(state, gas, q_inf);
  const double mach_inf = gas.mach(q_inf, rho_inf);
  if (!(mach_inf < 1.0)) throw Error(ErrorKind::precondition, "free stream must be subsonic", {{"mach_inf", mach_inf}});
  if (!(options.relaxation > 0.0 && options.relaxation <= 1.0)) {
    throw Error(ErrorKind::precondition, "relaxation must lie in (0, 1]", {{"relaxation", options.relaxation}});
  }
  Solver solver(grid, gas, state, far, options);
  auto sol = solver.run();
  sol.grid = std::make_shared<const ConformalGrid>(grid);
  return sol;
}

StudyResult refinement_study(const Body& body, const GasModel& gas, double mach_inf, double circulation,
                             const std::vector<GridLevel>& levels, double far_circumradii,
                             const CompressibleOptions& options) {
  if (levels.size() < 3) throw Error(ErrorKind::precondition, "refinement study needs at least three grids");
  const BernoulliState state = BernoulliState::from_free_stream(gas, mach_inf);
  const FarField far{{state.free_stream_speed(), 0.0}, circulation};
  StudyResult out;
  for (const auto& lv : levels) {
    StudyLevel level;
    level.grid = lv;
    const auto grid = ConformalGrid::build(body, far_circumradii * body.circumradius(), lv.n_r, lv.n_theta);
    level.spacing = grid.dtheta();
    try {
      const auto sol = solve_subsonic(grid, gas, state, far, options);
      level.status = "converged";
      level.max_mach = sol.max_mach;
      level.corner_max_mach = sol.corner_max_mach;
      level.first_flux_ratio = sol.first_flux_ratio;
      level.iterations = sol.log.size();
    } catch (const Error& e) {
      level.status = std::string(to_string(e.kind()));
      level.message = e.what();
      for (const auto& [key, value] : e.details()) {
        if (key == "first_flux_ratio") level.first_flux_ratio = value;
        if (key == "iteration") level.iterations = static_cast<std::size_t>(value);
      }
      // An abort on the first iterate has no earlier ratio recorded.
      if (level.first_flux_ratio == 0.0) {
        for (const auto& [key, value] : e.details()) {
          if (key == "flux_ratio") level.first_flux_ratio = value;
        }
      }
    }
    out.levels.push_back(level);
  }

  std::vector<const StudyLevel*> done;
  for (const auto& l : out.levels) {
    if (l.status == "converged") done.push_back(&l);
  }
  if (done.size() >= 2) {
    out.corner_mach_increasing = true;
    out.corner_mach_constant = true;
    for (std::size_t k = 1; k < done.size(); ++k) {
      out.corner_mach_increasing &= done[k]->corner_max_mach > done[k - 1]->corner_max_mach;
      out.corner_mach_constant &= std::abs(done[k]->corner_max_mach - done[0]->corner_max_mach) <=
                                  1e-9 * std::abs(done[0]->corner_max_mach);
      out.cauchy_differences.push_back(std::abs(done[k]->max_mach - done[k - 1]->max_mach));
    }
  }
  out.cauchy_shrinking = out.cauchy_differences.size() >= 2;
  for (std::size_t k = 1; k < out.cauchy_differences.size(); ++k) {
    out.cauchy_shrinking &= out.cauchy_differences[k] <= 0.5 * out.cauchy_differences[k - 1];
  }
  out.flux_ratio_increasing = true;
  for (std::size_t k = 1; k < out.levels.size(); ++k) {
    out.flux_ratio_increasing &= out.levels[k].first_flux_ratio > out.levels[k - 1].first_flux_ratio;
  }
  out.sonic_abort_at_finest = out.levels.back().status == to_string(ErrorKind::sonic_excursion);
  return out;
}

}  // namespace cornerflow
