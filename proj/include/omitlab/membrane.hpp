#pragma once

#include <complex>
#include <cstdint>

// Membrane oscillator model: fundamental-drum-mode effective mass, intrinsic
// and gas damping, quality factor, ringdown, and the thermal force spectrum
// driving the oscillator at temperature T.

namespace omitlab {

struct MembraneConfig {
    double side_length;                   // m, square membrane edge
    double thickness;                     // m
    double density;                       // kg/m^3
    std::complex<double> refractive_index; // dimensionless; Im >= 0 (absorbing)
    double omega_m;                       // mechanical resonance, rad/s
    double q_intrinsic;                   // intrinsic quality factor
};

struct GasEnvironment {
    double pressure;    // Pa
    double temperature; // K
    double molar_mass;  // kg/mol
    // Free-molecular-flow validity ceiling for the gas damping formula; the
    // non-interacting-molecule model breaks down above ~1e-2 mbar.
    double flow_ceiling = 1.0; // Pa
};

// Throw ValidationError naming the violated invariant; used at config load.
void validate(const MembraneConfig& cfg);
void validate(const GasEnvironment& env);

// Mode-shape-averaged mass of the fundamental mode of a square membrane:
// rho * side^2 * d / 4.  Returns kg.
double effective_mass(const MembraneConfig& cfg);

// Mean molecular speed sqrt(3 R T / M).  Returns m/s.
double gas_mean_speed(const GasEnvironment& env);

// Free-molecular-flow gas damping rate 16 P / (pi rho d v_bar), rad/s.
// Throws OutOfValidityRange above env.flow_ceiling.
double gas_damping_rate(const MembraneConfig& cfg, const GasEnvironment& env);

// Q = omega_m / (gamma_m + gamma_gas) with gamma_m = omega_m / q_intrinsic.
// Q(P=0) == q_intrinsic exactly; strictly decreasing in pressure.
double quality_factor(const MembraneConfig& cfg, const GasEnvironment& env);

// Quality factor from an amplitude ringdown: Q = pi * f * tau.
// f in Hz (ordinary), tau in s.
double ringdown_q(double f, double tau);

// Thermal Langevin force spectral density 4 m_eff (gamma_m + gamma_gas) k_B T,
// in N^2/Hz.
double thermal_force_psd(const MembraneConfig& cfg, const GasEnvironment& env);

} // namespace omitlab
