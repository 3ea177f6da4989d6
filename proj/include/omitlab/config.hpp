#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "omitlab/cavity.hpp"
#include "omitlab/detection.hpp"
#include "omitlab/membrane.hpp"
#include "omitlab/omit.hpp"

// Run configuration: a sectioned, human-editable key=value file with
// human-scale units (mm, ppm, nm, kHz, mbar, mW); everything is converted
// to SI/angular units at load time and validated by the owning module.
// Unknown sections or keys are hard errors, so typos cannot silently fall
// back to defaults.  The bundled default encodes the reference apparatus
// (85 mm cavity, T1 = 245.1 ppm, T2 = 16.93 ppm, 1064 nm, 1 mm x 50 nm
// membrane with n = 2 + 2.5e-5 i, 402.7 kHz drum mode, Q = 1.5e6).

namespace omitlab {

struct ControlSettings {
    double power_w; // control beam input power, W
    double delta;   // static offset delta; control detuning is omega_m - delta, rad/s
};

struct SweepSettings {
    double start_hz;    // probe offset frequency grid start, Hz
    double stop_hz;     // grid stop, Hz
    int points;         // base grid size (also the z-sample count for scans)
    double min_step_hz; // near-resonance refinement floor, Hz
};

struct OutputSettings {
    std::string path;   // output directory
    std::string format; // "csv" or "json"
};

struct RunConfig {
    CavityConfig cavity;
    double membrane_z;      // membrane offset from the cavity midpoint, m
    double alignment_phase; // z-origin phase of the dispersion formula, rad
    MembraneConfig membrane;
    GasEnvironment gas;
    ControlSettings control;
    SweepSettings sweep;
    SignalSource noise;           // drive_frequency filled with omega_m
    double detector_noise_sigma;  // photocurrent white noise std
    std::size_t mc_samples;       // ellipse Monte Carlo sample count
    OutputSettings output;
};

// The bundled default configuration text.
const char* embedded_default_config();

// Parse + validate.  parse_config reports ParseError with the 1-based line
// number of the offending line; load_config additionally reads the file.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
RunConfig default_config();

void validate(const RunConfig& cfg);
std::vector<std::string> config_warnings(const RunConfig& cfg);

// Deterministic normalized serialization of the effective configuration;
// hashed into every output header so results are traceable to their inputs.
std::string canonical_config_text(const RunConfig& cfg);

// Bridges from the apparatus description to the reduced response parameters:
// mirror rates, slab reflectivity, dispersive coupling at the configured
// membrane position, control photon number, and the mechanical linewidth
// including gas damping (converted to the amplitude-rate convention).
OmitParams omit_params_from(const RunConfig& cfg);
OracleParams oracle_params_from(const RunConfig& cfg);

} // namespace omitlab
