#pragma once
//
// Separation of variables on the disk of radius a. Symbols act on e^{i n t}
// and depend on |n| only; with z = k a, rho_n = J_n'(z)/J_n(z) and
// sigma_n = H_n'(z)/H_n(z):
//
//   s_n  = (i pi a / 2) J_n H_n          = -1 / (k (sigma - rho))
//   d_n  = d'_n = (i pi z / 4)(J_n H_n' + J_n' H_n) = -(sigma + rho) / (2 (sigma - rho))
//   h_n  = (i pi k^2 a / 2) J_n' H_n'    = -k sigma rho / (sigma - rho)
//   p_n  = k sigma_n                     (exterior DtN)
//   q_n  = 1 / (k rho_n - i eta)         (interior ItD)
//
// The ratio forms stay finite for n far beyond z, where J_n underflows.
//

#include "hbie/geom.hpp"
#include "hbie/specfun.hpp"

#include <optional>
#include <vector>

namespace hbie {

struct ModeTable {
    double k = 0.0;
    double radius = 1.0;
    cplx eta;
    int n_max = 0;
    // Indexed by |n| = 0..n_max.
    std::vector<cplx> s, d, dadj, h, aprime, b, p, q;
};

ModeTable mode_table(double k, double radius, cplx eta, int n_max);

// Symbols of the regularizers at radius a, |n| = 0..n_max:
// Laplace single layer a / (2|n|) (n != 0), -a ln a (n = 0); and S_{ik}.
std::vector<double> laplace_single_layer_symbols(double radius, int n_max);
std::vector<cplx> single_layer_symbols(cplx kappa, double radius, int n_max);

// Mode truncation used for every supremum over n.
int mode_truncation(double k);

struct SharpnessSweep {
    std::vector<double> k;
    std::vector<double> dtn_ratio;  // sup |p_n| / sqrt(n^2 + k^2)
    std::vector<double> ntd_ratio;  // sup sqrt(n^2 + k^2) / |p_n| * k^{-1/3}
    std::vector<double> dtn_half;   // sup |p_n| / (k sqrt(1 + n^2))
    std::vector<double> ntd_half;   // sup sqrt(1 + n^2) / |p_n| * k^{-1/3}
};

// Unit circle unless radius given. truncation_factor scales the mode count
// (2 doubles it, used to check truncation independence).
SharpnessSweep sharpness_sweep(const std::vector<double>& k_grid, double radius = 1.0,
                               double truncation_factor = 1.0);

// Mode-path suprema for a constant-eta A' on the circle.
struct ModeNorms {
    double norm_A = 0.0;        // sup |a'_n|
    double norm_Ainv = 0.0;     // 1 / inf |a'_n|
    double cond = 0.0;
    double norm_S = 0.0;        // sup |s_n|
    double norm_D = 0.0;        // sup |d_n|
    double dtn_h1_l2 = 0.0;     // sup |p_n| / sqrt(n^2/a^2 + k^2)
    double ntd_l2_h1 = 0.0;     // sup sqrt(n^2/a^2 + k^2) / |p_n|
    double itd_l2_h1 = 0.0;     // sup sqrt(n^2/a^2 + k^2) |q_n|
    // max over 720 angles theta of min_n Re(e^{i theta} a'_n): the distance
    // from 0 to the convex hull of the symbols when positive.
    double alpha = 0.0;
};
ModeNorms mode_norms(double k, cplx eta, double radius = 1.0, double truncation_factor = 1.0);

// Plane wave e^{i k x . (cos alpha, sin alpha)} on the sound-soft circle of
// radius a centred at the origin.
class MieSolution {
public:
    MieSolution(double k, double radius, double alpha);

    double k() const { return k_; }
    double radius() const { return radius_; }
    int n_max() const { return n_max_; }
    // |last retained term| of the far-field series; > 1e-12 flags truncation.
    double tail() const { return tail_; }
    bool truncation_warning() const { return tail_ > 1e-12; }

    cplx incident(const Vec2& x) const;
    // Scattered field at |x| >= radius.
    cplx scattered(const Vec2& x) const;
    cplx total(const Vec2& x) const;
    // d/dn of the total field at angle theta on the boundary.
    cplx neumann(double theta) const;
    // u_s(x) ~ e^{ikr} / sqrt(r) u_inf(xhat).
    cplx far_field(double theta) const;

private:
    double k_, radius_, alpha_;
    int n_max_;
    double tail_ = 0.0;
    std::vector<cplx> ratio_;    // J_n(ka) / H_n(ka), n = 0..n_max
    std::vector<cplx> neumann_;  // i^n (-2i) / (pi a H_n(ka))
};

MieSolution mie_dirichlet(double k, double radius, double alpha);

// k ||u||_{L2(B^d)} / ||g||_{L2(S^{d-1})} for u = r^{1-d/2} J_nu(k r) phi,
// nu = sqrt((d-2)^2 + 4 mu^2) / 2, g = (d_r - i k) u at r = 1.
double ball_sharpness_ratio(double k, int mu, int d);

struct PoleCandidate {
    cplx k;
    int n = 0;
    bool refined = false;
    double residual = 0.0;  // |k rho_n - i eta| / (|k rho_n| + 1 + |eta|)
};

struct PoleScan {
    std::vector<PoleCandidate> poles;       // all zeros found in the window
    int upper_half_count = 0;               // zeros with Im k >= 0
    // -max Im over zeros with Im k < 0; window depth when none were found.
    double strip_width = 0.0;
    bool strip_from_window = false;
    bool origin_degenerate = false;         // d_0(0) = b vanishes
};

// Zeros of d_n(k) = k J_n'(k) - i (a k + i b) J_n(k), |n| <= n_max, on the
// grid Re k in re_window, Im k in im_window with spacing 1/grid_density.
PoleScan impedance_pole_scan(double a, double b, std::pair<double, double> re_window,
                             std::pair<double, double> im_window, double grid_density, int n_max);

} // namespace hbie
