#pragma once

#include <complex>
#include <string>
#include <vector>

#include "omitlab/membrane.hpp"

// Membrane-in-the-middle cavity optics.
//
// Two models live here and are cross-validated in the tests:
//   * closed-form dispersion: the coupled-cavity resonance
//     omega_c(z) = (c/L) arccos(|r_m| cos(4 pi z / lambda + phase)) and its
//     derivative, the optomechanical coupling constant G0;
//   * a numerical transfer-matrix cascade
//     mirror1 -> free space (L/2 + z) -> membrane slab -> free space (L/2 - z)
//     -> mirror2, from which transmission spectra, resonance positions and
//     finesse-vs-position curves are measured.
//
// Conventions: z is measured from the cavity midpoint.  The membrane
// placement phase and the slab response are evaluated at the fixed design
// wavelength (membrane dispersion is ignored); only the macroscopic
// round-trip phase k*L varies across a scan.  This makes the model exactly
// lambda/2-periodic in z, matching the closed-form dispersion, at the cost
// of a phase error of order z * FSR / nu0 ~ 1e-5 rad, far below the ppm
// fidelity of the mirror model.

namespace omitlab {

struct CavityConfig {
    double length;      // m, mirror spacing L
    double t1;          // input mirror power transmissivity
    double t2;          // output mirror power transmissivity
    double wavelength;  // m, design wavelength
    double excess_loss; // extra round-trip power loss, split equally between mirrors
};

// Normal-incidence amplitude response of the membrane treated as a thin
// dielectric slab.
struct MembraneOptics {
    std::complex<double> r_m; // amplitude reflectivity
    std::complex<double> t_m; // amplitude transmissivity
    double absorption;        // power absorption A = 1 - |r|^2 - |t|^2
};

struct CouplingRates {
    double gamma1; // input mirror, rad/s
    double gamma2; // output mirror, rad/s
};

// One measured transmission resonance of the transfer-matrix model.
struct ResonancePeak {
    double frequency_hz; // absolute optical frequency of the peak
    double detuning_hz;  // same peak relative to reference_band_base (full precision)
    double height;       // peak power transmission
    double fwhm_hz;      // full width at half maximum
};

void validate(const CavityConfig& cfg);
// Non-fatal advisories (e.g. not over-coupled); printed by the CLI.
std::vector<std::string> config_warnings(const CavityConfig& cfg);

// Mirror decay rates gamma_i = c T_i / (4 L), rad/s.
CouplingRates mirror_coupling_rates(const CavityConfig& cfg);

// Free spectral range c / (2 L), Hz.
double free_spectral_range(const CavityConfig& cfg);

// Empty-cavity resonance nearest the design wavelength, used as the origin
// of all detuning grids: round(nu0 / FSR) * FSR, Hz.
double reference_band_base(const CavityConfig& cfg);

// Finesse estimate 2 pi / (T1 + T2 + excess_loss) from the round-trip loss
// budget; used for linewidth estimates and grid checks.
double analytic_finesse(const CavityConfig& cfg);

// Single-slab amplitude coefficients at normal incidence: with
// r0 = (1-n)/(1+n) and beta = 2 pi n d / lambda,
//   r_m = r0 (1 - e^{2 i beta}) / (1 - r0^2 e^{2 i beta}),
//   t_m = (1 - r0^2) e^{i beta} / (1 - r0^2 e^{2 i beta}).
MembraneOptics membrane_slab_optics(const MembraneConfig& mem, double wavelength);

// The removed membrane: r_m = 0, t_m = 1, no absorption.
MembraneOptics identity_membrane();

// Closed-form coupled-cavity resonance (c/L) arccos(r_m_mag cos(4 pi z /
// lambda + phase_offset)), rad/s.  phase_offset aligns the formula's origin
// to the transfer-matrix model's field geometry (the source papers leave the
// z-origin unspecified).  Throws DomainError if |r_m_mag| >= 1.
double cavity_resonance_shift(double z, double r_m_mag, const CavityConfig& cfg,
                              double phase_offset = 0.0);

// Analytic d omega_c / dz:
// (c/L) r (4 pi / lambda) sin(4 pi z/lambda + phase) / sqrt(1 - r^2 cos^2(...)),
// rad/(s m).  Throws DomainError if |r_m_mag| >= 1.
double coupling_constant(double z, double r_m_mag, const CavityConfig& cfg,
                         double phase_offset = 0.0);

// Amplitude transmission of the full cascade at absolute optical frequency
// nu_hz with the membrane at z.  Throws DomainError unless z in (-L/2, L/2).
std::complex<double> amplitude_transmission(const CavityConfig& cfg,
                                            const MembraneOptics& optics,
                                            double z, double nu_hz);

// Power transmission on a laser detuning grid (Hz, relative to
// reference_band_base).  Throws GridTooCoarse if the grid spacing exceeds a
// tenth of the estimated linewidth.
std::vector<double> transmission_spectrum(const CavityConfig& cfg,
                                          const MembraneConfig& mem, double z,
                                          const std::vector<double>& detuning_hz);

// Locates the transmission resonance in the reference band (coarse scan at
// 4096 points per FSR, golden-section refinement to 1e-4 of the estimated
// linewidth) and measures its FWHM by bisection on the half-maximum
// crossings.
ResonancePeak measure_resonance(const CavityConfig& cfg,
                                const MembraneOptics& optics, double z);

// F(z) = FSR / FWHM(z) for each membrane position; grid points evaluated in
// parallel.
std::vector<double> finesse_scan(const CavityConfig& cfg,
                                 const MembraneConfig& mem,
                                 const std::vector<double>& z_grid);

// Coupled-cavity amplitude linewidth gamma = pi f_FSR / F, rad/s.
double coupled_linewidth(double finesse, const CavityConfig& cfg);

} // namespace omitlab
