// SPDX-License-Identifier: Apache-2.0
//
// Probing incompressible flows: loop integrals, the far-field Laurent fit,
// corner singularity fits, circulation roots of the corner coefficient, the
// corner census over circulations and the sign-component census of psi.
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cornerflow/geometry.hpp"
#include "cornerflow/incompressible.hpp"

namespace cornerflow {

// ---- loop integrals --------------------------------------------------------

struct LoopIntegral {
  double circulation = 0.0;  // Re of the loop integral of w dz
  double mass_flux = 0.0;    // Im of the loop integral of w dz
  double error_estimate = 0.0;
};

/// Loop integral of w dz; the difference against the coarsened contour is the error estimate.
LoopIntegral loop_integral(const ComplexFlow& flow, const Contour& contour);
double circulation(const ComplexFlow& flow, const Contour& contour);
double mass_flux(const ComplexFlow& flow, const Contour& contour);

// ---- far field ---------------------------------------------------------------

struct LaurentFit {
  Point c0, c1, c2;  // w ~ c0 + c1 / (z - z0) + c2 / (z - z0)^2 about z0 = centroid
  double residual = 0.0;  // max |fit - w| over the samples, relative to |c0|
  double gamma_estimate = 0.0;
};

struct LaurentOptions {
  double max_residual = 1e-2;  // relative; larger residuals mean the rings are too close
};

LaurentFit farfield_fit(const ComplexFlow& flow, std::span<const double> radii, std::size_t samples,
                        const LaurentOptions& options = {});

// ---- corner fits ---------------------------------------------------------------

enum class SignVerdict { both, positive_only, negative_only, indeterminate };
std::string_view to_string(SignVerdict verdict) noexcept;

struct FitOptions {
  std::size_t modes = 4;         // K in sum_k a_k r^(k pi/beta) sin(k pi theta/beta)
  double tol_a1 = 1e-3;          // singular iff |a1| > tol_a1 |w_inf| R^(1 - pi/beta)
  double margin_fraction = default_probe_margin_fraction;
  double max_condition = 1e8;
};

struct CornerReport {
  std::size_t corner_id = 0;
  double beta = 0.0;
  double expected_exponent = 0.0;  // pi/beta - 1
  double fitted_exponent = 0.0;    // log-log slope of max |w| per ring
  double a1 = 0.0;
  double a1_uncertainty = 0.0;
  double threshold = 0.0;
  bool singular = false;
  std::vector<double> modes;  // a_1 .. a_K
  double condition = 0.0;     // of the column-normalised design matrix
  double residual = 0.0;      // rms of psi misfit
  std::vector<double> radii;
};

/// Default probing radii for a corner: five rings over one decade, scaled to
/// the adjacent walls (plate edges sit much closer to the corner).
std::vector<double> default_fit_radii(const Body& body, std::size_t corner_id);

/// Fit on rings clipped to the body's fluid wedge around `corner_id`.
CornerReport fit_corner(const ComplexFlow& flow, const Body& body, std::size_t corner_id,
                        std::span<const double> radii, std::size_t samples, const FitOptions& options = {});

/// Fit around a free-standing corner; `length_scale` replaces the body circumradius.
CornerReport fit_corner(const ComplexFlow& flow, const Corner& corner, double length_scale,
                        std::span<const double> radii, std::size_t samples, const FitOptions& options = {});

struct SignReport {
  SignVerdict verdict = SignVerdict::indeterminate;
  std::vector<double> radii;
  std::vector<double> psi_min, psi_max;
  double tolerance = 0.0;
};

/// Signs of psi on rings of radius r, r/2, r/4 inside the fluid wedge.
SignReport sign_attainment(const ComplexFlow& flow, const Corner& corner, double radius, std::size_t samples,
                           double margin_fraction = default_probe_margin_fraction);

/// Sign threshold for psi: rounding plus the panel body-streamline spread.
double stream_noise_floor(const ComplexFlow& flow);
/// Same, with the body-streamline misfit taken only from collocation points within `radius` of `near`.
double stream_noise_floor(const ComplexFlow& flow, Point near, double radius);

// ---- Kutta roots and census ----------------------------------------------------

struct CensusOptions {
  PanelOptions panels;
  FitOptions fit;
  std::size_t samples = 48;
  std::size_t grid_points = 33;
  /// Corners whose roots lie closer than this many combined uncertainties are a degenerate coincidence.
  double coincidence_factor = 1.0;
};

struct KuttaRoot {
  std::size_t corner_id = 0;
  double circulation = 0.0;   // root of a1(Gamma)
  double uncertainty = 0.0;   // from the a1 fit uncertainty
  double a1_at_zero = 0.0;
  double slope = 0.0;         // d a1 / d Gamma
  double threshold = 0.0;     // |a1| below this counts as regular
  bool degenerate = false;    // a1 insensitive to Gamma
};

/// Circulation regularising one corner. Uses the affine dependence of a1 on
/// Gamma: two solves, one division. Throws degenerate_kutta when a1 does not
/// depend on Gamma.
KuttaRoot kutta_solve(const Body& body, Point w_inf, std::size_t corner_id, const CensusOptions& options = {});
KuttaRoot kutta_solve(const PanelSystem& system, std::size_t corner_id, const CensusOptions& options = {});

struct CensusEntry {
  double circulation = 0.0;
  std::vector<std::size_t> singular;  // corner ids judged singular by a direct fit
};

struct CensusResult {
  std::vector<std::size_t> corners;  // protruding corner ids
  std::vector<KuttaRoot> roots;
  /// Largest number of corners regular at one circulation, from the affine forms.
  std::size_t max_simultaneously_regular = 0;
  std::size_t min_singular = 0;
  bool all_regular_possible = false;
  bool degenerate_coincidence = false;
  std::vector<CensusEntry> sweep;
  std::size_t sweep_min_singular = 0;
  std::string_view verdict() const noexcept;
};

/// Exact census from the per-corner affine forms plus a redundant sweep with
/// fresh fits at every grid circulation (grid: `grid_points` values spanning
/// all roots with margin, plus the roots themselves).
CensusResult corner_census(const Body& body, Point w_inf, const CensusOptions& options = {});

// ---- sign components -------------------------------------------------------------

struct Window {
  double x_min = -1.0, x_max = 1.0, y_min = -1.0, y_max = 1.0;
};

struct SignComponents {
  std::size_t bounded_positive = 0;
  std::size_t bounded_negative = 0;
  std::size_t components_positive = 0;
  std::size_t components_negative = 0;
  std::size_t masked_cells = 0;
  std::size_t unsigned_cells = 0;
  double tolerance = 0.0;
  bool inconclusive = false;  // cells too coarse for the shortest wall
};

SignComponents sign_component_census(const ComplexFlow& flow, const Window& window, std::size_t resolution);

/// Square window centred on the body, half-width (1 + margin) circumradii.
Window window_around(const Body& body, double margin_circumradii = 3.0);

}  // namespace cornerflow
