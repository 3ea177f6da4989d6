#pragma once

#include <vector>

#include "omitlab/config.hpp"

// Command implementations behind the CLI: each one derives the reduced
// parameters from the run configuration, computes its table, and writes
// deterministic output files (CSV or JSON per the config) under the output
// directory.  Errors propagate as the library's exception types; the CLI
// front end maps them to exit codes.

namespace omitlab {

struct RunOptions {
    bool quiet = false; // suppress the per-command stdout summary
};

// Probe frequency grid in Hz: the base linear sweep grid, refined down to
// min_step_hz spacing inside +-2 dip widths of the transparency dip.
std::vector<double> build_sweep_grid(const RunConfig& cfg, const OmitParams& p);

// Closed-form response sweep: columns f_Hz, re_t, im_t, abs_t, phase_rad,
// theta_rad, group_delay_s.
void cmd_response_sweep(const RunConfig& cfg, const RunOptions& opt);

// Dip width and depth vs control power at the reference power points.
void cmd_linewidth_vs_power(const RunConfig& cfg, const RunOptions& opt);

// Transfer-matrix finesse vs membrane position over one half-wavelength.
void cmd_finesse_scan(const RunConfig& cfg, const RunOptions& opt);

// Monte Carlo noise ellipses across the dip; always writes a JSON dump plus
// a CSV summary.
void cmd_ellipse(const RunConfig& cfg, const RunOptions& opt);

// Exact two-sideband oracle vs the closed form over the validation band.
void cmd_oracle_compare(const RunConfig& cfg, const RunOptions& opt);

// Low-temperature feasibility numbers for the configured apparatus.
void cmd_design_check(const RunConfig& cfg, const RunOptions& opt);

// Gas damping and quality factor across the free-molecular-flow range.
void cmd_gas_damping(const RunConfig& cfg, const RunOptions& opt);

} // namespace omitlab
