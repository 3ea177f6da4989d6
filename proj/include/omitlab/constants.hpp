#pragma once

// Physical constants and unit conventions.
//
// Convention used throughout the library: every frequency-like quantity that
// crosses a module boundary is an angular frequency in rad/s; all other
// quantities are SI.  Only the CLI layer speaks Hz, kHz, mbar, mW, nm, ppm.
// Decay rates (gamma_1, gamma_2, gamma, gamma_m, Gamma_opt) are amplitude
// decay rates, i.e. half-widths at half maximum in rad/s; the corresponding
// full linewidth of a power spectrum in ordinary frequency is rate/pi Hz.

namespace omitlab {

inline constexpr double pi = 3.141592653589793238462643383279502884;

// CODATA 2018 values; c, k_B and R are exact in the revised SI.
struct PhysicalConstants {
    double c     = 299792458.0;        // speed of light, m/s
    double hbar  = 1.054571817e-34;    // reduced Planck constant, J*s
    double k_B   = 1.380649e-23;       // Boltzmann constant, J/K
    double R_gas = 8.31446261815324;   // molar gas constant, J/(mol*K)
};

inline constexpr PhysicalConstants constants{};

// Ordinary frequency (Hz) to angular frequency (rad/s).
inline constexpr double hz_to_angular(double f) { return 2.0 * pi * f; }

// Angular frequency (rad/s) to ordinary frequency (Hz).
inline constexpr double angular_to_hz(double w) { return w / (2.0 * pi); }

// Human-facing unit helpers used by the CLI layer.
inline constexpr double mbar_to_pa(double p_mbar) { return 100.0 * p_mbar; }
inline constexpr double pa_to_mbar(double p_pa) { return p_pa / 100.0; }
inline constexpr double ppm_to_fraction(double x_ppm) { return 1e-6 * x_ppm; }

} // namespace omitlab
