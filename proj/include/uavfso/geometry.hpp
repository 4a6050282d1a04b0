// Link geometry, instantaneous pointing losses and radial lookup tables.
#pragma once

#include <cstddef>
#include <vector>

namespace uavfso {

struct LinkGeometry
{
    double z = 500.0;          // link length (m)
    double r_a = 0.05;         // receiver lens radius (m)
    double r_ap = 4e-3;        // detector radius (m)
    double w_0 = 3.0835e-5;    // transmitter beam waist (m)
    double lambda = 1.55e-6;   // wavelength (m)
    double cn2 = 0.0;          // refractive-index structure parameter (m^-2/3)
    double d_f = 0.1;          // focal length (m)
    double n_f = 1.0;          // f-number
    double theta_fov = 40e-3;  // field of view (rad)
    double h_l = 1.0;          // deterministic channel loss

    // Throws std::invalid_argument naming the offending field.
    void validate() const;
};

// Instantaneous orientation (rad) and position (m) deviations of Tx and Rx.
struct PointingState
{
    double theta_tx = 0.0, theta_ty = 0.0, theta_rx = 0.0, theta_ry = 0.0;
    double x_tx = 0.0, y_ty = 0.0, x_rx = 0.0, y_ry = 0.0;
};

double beam_width_at_rx(LinkGeometry const& g);

// 2 r_a^2 / w_z^2
double a0(LinkGeometry const& g, double w_z);

// Beam-centre displacement at the receiver plane, small-angle form.
double radial_displacement(PointingState const& p, double z);
// Same with Z tan(theta) in place of Z theta.
double radial_displacement_exact(PointingState const& p, double z);

// Angle of arrival, small-angle form and exact arctan form.
double aoa(PointingState const& p);
double aoa_exact(PointingState const& p);

// Fraction of a Gaussian beam of width w_z collected by the lens when the
// beam centre is displaced by (dx, dy). Nested adaptive quadrature.
double hpg_exact(double dx, double dy, double r_a, double w_z);
double hpg_exact(PointingState const& p, LinkGeometry const& g, double w_z);

// (2 r_a^2 / w_z^2) exp(-2 r_d^2 / w_z^2)
double hpg_approx(double r_d, double w_z, double r_a);

// Fraction of the focal-plane Airy pattern captured by the detector when the
// pattern centre sits at (d_f tan(theta_sum_x), d_f tan(theta_sum_y)).
double hpa_exact(double theta_sum_x, double theta_sum_y, LinkGeometry const& g);
// Same, parametrized by the focal-plane offset of the Airy centre.
double hpa_exact_offset(double offset, LinkGeometry const& g);

// 1 inside the field of view, 0 for theta_a >= theta_fov.
inline double hpa_step(double theta_a, double theta_fov)
{
    return theta_a < theta_fov ? 1.0 : 0.0;
}

// Monotone piecewise-cubic (Fritsch-Carlson) interpolant on sorted knots.
class MonotoneCubic
{
  public:
    MonotoneCubic() = default;
    MonotoneCubic(std::vector<double> x, std::vector<double> y);

    double operator()(double x) const;
    double front_x() const { return x_.front(); }
    double back_x() const { return x_.back(); }
    double front_y() const { return y_.front(); }
    double back_y() const { return y_.back(); }
    std::size_t size() const { return x_.size(); }

  private:
    std::vector<double> x_, y_, d_;
};

// h_pg as a function of r_d: ln(h_pg) interpolated in r_d^2, extended
// linearly in r_d^2 past the last knot (the Gaussian tail is exactly linear
// there up to a slowly varying factor).
class HpgTable
{
  public:
    HpgTable(double r_a, double w_z, double r_max, std::size_t n_knots);
    double operator()(double r_d) const;
    double r_max() const { return r_max_; }

  private:
    double r_max_;
    double tail_slope_;
    MonotoneCubic ln_h_;
};

// h_pa as a function of theta_a. Knots are clustered around the detector
// edge; past the last knot the captured fraction decays like offset^-3.
class HpaTable
{
  public:
    HpaTable(LinkGeometry const& g, std::size_t n_knots);
    double operator()(double theta_a) const;

  private:
    double d_f_;
    double r_ap_;
    double scale_;
    double u_lo_, u_hi_;
    double tail_coeff_;
    MonotoneCubic h_;
};

struct RadialTables
{
    HpgTable hpg;
    HpaTable hpa;
};

// r_max defaults to a range covering any realistic displacement; beyond it
// the h_pg table extrapolates the Gaussian tail.
RadialTables build_radial_tables(LinkGeometry const& g, double w_z, std::size_t n_knots,
                                 double r_max = 0.0);

}  // namespace uavfso
