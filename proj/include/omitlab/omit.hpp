#pragma once

#include <complex>
#include <functional>
#include <vector>

// Optomechanically induced transparency response.
//
// The closed-form model: a control field detuned one mechanical frequency
// below the cavity makes the cavity transmit a weak probe sideband as
//
//   t(Omega) = t0 * (x + i gamma_m) / (x + i gamma_m + i Gamma_opt),
//   x = Omega - omega_m,  t0 = 2 sqrt(eta_c (1 - eta_c)),
//
// a dip of half-width gamma_m + Gamma_opt carved into the cavity line, with
// Gamma_opt = hbar Gbar^2 / (2 m omega_m gamma) tunable via control power.
// Alongside it lives an independent brute-force oracle that solves the full
// two-sideband linear system (mechanical oscillator + both optical sidebands)
// with none of the resolved-sideband or near-resonance approximations; the
// tests quantify where the closed form holds.
//
// All rates are amplitude (HWHM) rates in rad/s; the full linewidth of the
// power-transmission dip in ordinary frequency is (gamma_m + Gamma_opt)/pi Hz.

namespace omitlab {

struct OmitParams {
    double gamma1;  // input mirror coupling rate, rad/s
    double gamma2;  // output mirror coupling rate, rad/s
    double gamma;   // total cavity amplitude linewidth = gamma1 + gamma2, rad/s
    double eta_c;   // coupling parameter gamma1 / (gamma1 + gamma2)
    double g_bar;   // pump-enhanced coupling G0 * abar, rad/(s m)
    double gamma_m; // mechanical amplitude linewidth, rad/s
    double omega_m; // mechanical resonance, rad/s
    double delta;   // control offset; control-to-cavity detuning is omega_m - delta, rad/s
    double m_eff;   // effective mass, kg
};

// Fills the derived fields (gamma, eta_c) and validates.
OmitParams make_omit_params(double gamma1, double gamma2, double g_bar,
                            double gamma_m, double omega_m, double m_eff,
                            double delta = 0.0);
void validate(const OmitParams& p);

// Complex response on a frequency grid with a continuous (unwrapped) phase.
struct ComplexResponse {
    std::vector<double> omega;               // rad/s
    std::vector<std::complex<double>> t;     // complex transmissivity
    std::vector<double> phase;               // unwrapped arg t, rad
    std::vector<double> magnitude;           // |t|
};

// Exact and wide-detuning-approximate transmission phase at one frequency.
struct PhasePair {
    double exact;  // continuous arg of the normalized transmissivity, rad
    double approx; // wide-detuning form -arctan(Gamma_opt / x), rad
};

struct FeasibilityResult {
    bool satisfied; // thermal force below the pump-induced damping scale
    double ratio;   // (8 k_B T / Q_m) / (hbar Gamma_opt); < 1 means satisfied
};

// Pump-induced mechanical damping hbar g_bar^2 / (2 m_eff omega_m gamma), rad/s.
double optical_damping(const OmitParams& p);

// Steady-state intracavity photon number of the control field:
// 2 gamma1 P / (hbar omega_p) / (Delta^2 + gamma^2).
double intracavity_photon_number(double power_w, double omega_p, double delta_c,
                                 double gamma1, double gamma);

// Steady-state amplitude |abar| = sqrt(photon number), dimensionless.
double intracavity_amplitude(double power_w, double omega_p, double delta_c,
                             double gamma1, double gamma);

// Optical damping straight from control power, arranged so that
// Gamma_opt(2P) = 2 Gamma_opt(P) holds to the last ulp (no intermediate
// square root): hbar G0^2 nbar / (2 m omega_m gamma).
double optical_damping_from_power(double g0, double power_w, double omega_p,
                                  double delta_c, double gamma1, double gamma,
                                  double m_eff, double omega_m);

// Effective mechanical response -2 m omega_m (w - delta + i gamma_m)
// - i hbar g_bar^2 / gamma, valid near resonance (|w| << omega_m).
std::complex<double> effective_susceptibility(const OmitParams& p, double w);

// Off-dip transmission amplitude t0 = 2 sqrt(eta_c (1 - eta_c)).
double peak_transmissivity(const OmitParams& p);

// Closed-form probe transmissivity t(Omega) and its normalized version
// t_n = t / t0.
std::complex<double> transmissivity(const OmitParams& p, double omega);
std::complex<double> normalized_transmissivity(const OmitParams& p, double omega);

// Exact transmission phase and the wide-detuning approximation, which is only
// valid for |x| >> sqrt(gamma_m Gamma_opt) and diverges to -+pi/2 at the dip
// center where the exact phase returns to zero.
PhasePair phase_response(const OmitParams& p, double omega);

// Quadrature rotation angle -arctan(Gamma_opt x / (x^2 + gamma_m Gamma_opt)).
// This compact form is itself an approximation: the exact arg t_n has
// denominator x^2 + gamma_m (gamma_m + Gamma_opt), provided by
// rotation_angle_exact; they differ by at most gamma_m^2/(x^2 + gamma_m
// Gamma_opt) (see tests for the derivation).
double rotation_angle(const OmitParams& p, double omega);
double rotation_angle_exact(const OmitParams& p, double omega);

// Group delay d(arg t_n)/dOmega in seconds; negative on the transparency
// feature (signal advance), approaching 1/(gamma_m + Gamma_opt) - 1/gamma_m
// at the dip center.
double group_delay(const OmitParams& p, double omega);

// Parameters of the full two-sideband model; unlike OmitParams this keeps
// the control detuning explicit and does not assume Delta = omega_m.
struct OracleParams {
    double gamma1;  // rad/s
    double gamma2;  // rad/s
    double gamma;   // rad/s
    double g_bar;   // hbar-free coupling G0 * abar, rad/(s m)
    double m_eff;   // kg
    double omega_m; // rad/s
    double gamma_m; // amplitude rate, rad/s
    double delta_c; // control-to-cavity detuning Delta, rad/s
};

// Solves, per frequency, the 3x3 complex linear system coupling the
// mechanical displacement, the upper optical sideband at +Omega and the
// counter-rotating lower sideband at -Omega, driven by a unit probe input;
// returns sqrt(2 gamma2) * a(Omega), which reduces to the bare-cavity
// response i sqrt(4 gamma1 gamma2)/(Omega - Delta + i gamma) when the pump
// is off.  Throws SingularSystem if the system matrix condition number
// exceeds 1e12 at any grid point.
ComplexResponse exact_response_oracle(const OracleParams& p,
                                      const std::vector<double>& omega_grid);

// Intermediate model: keeps the exact cavity denominator but drops the
// counter-rotating sideband (the resolved-sideband step on its own):
//   t_sb = i sqrt(4 gamma1 gamma2) chi(Omega)
//          / (chi(Omega) (Omega - Delta + i gamma) + hbar g_bar^2),
// with chi the bare mechanical response.  Comparing oracle -> sideband ->
// closed form separates the cost of dropping the lower sideband from the
// cost of the near-resonance expansion.
ComplexResponse sideband_response(const OracleParams& p,
                                  const std::vector<double>& omega_grid);

// Full width at half depth of a transparency dip, in Hz, from samples of the
// normalized power transmission |t_n|^2 (unit off-dip baseline).  Crossing
// positions are linearly interpolated; throws DipNotResolved if fewer than
// 20 samples lie strictly inside the measured width.
double extract_fwhm(const std::vector<double>& f_hz,
                    const std::vector<double>& tn_squared);

// Same measurement by bisection on a continuous curve; center_hint_hz and
// width_hint_hz seed the search.  Resolves the crossings to ~1e-12 of the
// width, so exact lineshape laws (e.g. affinity of width in control power)
// survive the measurement.
double extract_fwhm(const std::function<double(double)>& tn_squared_of_f_hz,
                    double center_hint_hz, double width_hint_hz);

struct LorentzFit {
    double center_hz;    // dip center f0
    double fwhm_hz;      // full width
    double depth;        // dip depth D in 1 - D * L(f)
    double rms_residual; // RMS of data minus model
    int iterations;
    bool identifiable;   // false when depth is below the noise floor, making
                         // center and width effectively unconstrained
};

// Damped Gauss-Newton (Levenberg-Marquardt) fit of 1 - D (G/2)^2 /
// ((f-f0)^2 + (G/2)^2) to noisy |t_n|^2 samples.  Initialization from the
// sample minimum and interpolated half-depth crossings.  Throws
// NoConvergence (carrying the last iterate) after 200 iterations.
LorentzFit fit_lorentzian(const std::vector<double>& f_hz,
                          const std::vector<double>& samples);

struct PowerSweepPoint {
    double power_w;
    double gamma_opt;  // rad/s
    double fwhm_hz;    // full dip width, Hz
    double dip_depth;  // |t_n| at the dip center = gamma_m/(gamma_m+Gamma_opt)
};

struct PowerSweepParams {
    double gamma1;  // rad/s
    double gamma2;  // rad/s
    double g0;      // position coupling G0, rad/(s m)
    double omega_p; // control laser frequency, rad/s
    double gamma_m; // rad/s
    double omega_m; // rad/s
    double m_eff;   // kg
    double delta;   // control offset, rad/s
};

// For each control power: photon number, Gamma_opt, measured dip width (by
// continuous bisection on the closed-form curve) and dip depth.
std::vector<PowerSweepPoint> linewidth_vs_power_sweep(const PowerSweepParams& p,
                                                      const std::vector<double>& powers_w);

// Low-temperature condition 8 k_B T / Q_m < hbar Gamma_opt.
FeasibilityResult feasibility_bound(double temperature, double q_m, double gamma_opt);

// The T/Q threshold hbar Gamma_opt / (8 k_B), in K.
double feasibility_threshold(double gamma_opt);

// Radiation-pressure force noise from control-sideband beating:
// 2 gamma1 (hbar g_bar |da_in|)^2 / (gamma^2 gamma_m), N^2/Hz.
double radiation_pressure_psd(const OmitParams& p, double signal_noise_amplitude);

} // namespace omitlab
