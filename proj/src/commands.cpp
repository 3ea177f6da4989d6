#include "omitlab/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>

#include "json.hpp"

#include "omitlab/constants.hpp"
#include "omitlab/detection.hpp"
#include "omitlab/errors.hpp"
#include "omitlab/io.hpp"
#include "omitlab/parallel.hpp"
#include "omitlab/rng.hpp"

namespace omitlab {

namespace {

std::vector<std::string> output_header(const RunConfig& cfg, const char* command) {
    return {std::string("omitlab ") + command,
            "config_hash " + fnv1a64_hex(canonical_config_text(cfg)),
            "seed " + std::to_string(cfg.noise.seed)};
}

std::string output_file(const RunConfig& cfg, const char* stem, const char* ext) {
    return (std::filesystem::path(cfg.output.path) /
            (std::string(stem) + "." + ext)).string();
}

// Writes the table in the configured format and returns the path written.
std::string write_table(const RunConfig& cfg, const char* stem, CsvTable table) {
    if (cfg.output.format == "json") {
        nlohmann::json j;
        j["header"] = table.header_lines;
        j["columns"] = table.columns;
        j["rows"] = table.rows;
        const std::string path = output_file(cfg, stem, "json");
        write_text(path, j.dump(2) + "\n");
        return path;
    }
    const std::string path = output_file(cfg, stem, "csv");
    write_csv(path, table);
    return path;
}

void note(const RunOptions& opt, const std::string& line) {
    if (!opt.quiet) std::printf("%s\n", line.c_str());
}

void warn_all(const RunConfig& cfg, const RunOptions& opt) {
    if (opt.quiet) return;
    for (const auto& w : config_warnings(cfg)) std::printf("warning: %s\n", w.c_str());
}

} // namespace

std::vector<double> build_sweep_grid(const RunConfig& cfg, const OmitParams& p) {
    const double start = cfg.sweep.start_hz;
    const double stop = cfg.sweep.stop_hz;
    const int n = cfg.sweep.points;
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(n));
    const double base_step = (stop - start) / static_cast<double>(n - 1);
    for (int i = 0; i < n; ++i)
        grid.push_back(start + base_step * static_cast<double>(i));

    // Refine around the dip so narrow features are honored down to the
    // configured minimum sweep step.
    const double center = angular_to_hz(p.omega_m);
    const double fwhm = (p.gamma_m + optical_damping(p)) / pi;
    const double lo = std::max(start, center - 2.0 * fwhm);
    const double hi = std::min(stop, center + 2.0 * fwhm);
    if (base_step > cfg.sweep.min_step_hz && lo < hi) {
        for (double f = lo; f <= hi; f += cfg.sweep.min_step_hz) grid.push_back(f);
    }
    std::sort(grid.begin(), grid.end());
    std::vector<double> out;
    out.reserve(grid.size());
    for (double f : grid) {
        if (out.empty() || f - out.back() > 0.25 * cfg.sweep.min_step_hz)
            out.push_back(f);
    }
    return out;
}

void cmd_response_sweep(const RunConfig& cfg, const RunOptions& opt) {
    warn_all(cfg, opt);
    const OmitParams p = omit_params_from(cfg);
    const std::vector<double> grid = build_sweep_grid(cfg, p);

    CsvTable table;
    table.header_lines = output_header(cfg, "response_sweep");
    table.columns = {"f_Hz", "re_t", "im_t", "abs_t",
                     "phase_rad", "theta_rad", "group_delay_s"};
    table.rows.resize(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        const double omega = hz_to_angular(grid[i]);
        const std::complex<double> t = transmissivity(p, omega);
        table.rows[i] = {grid[i],
                         t.real(),
                         t.imag(),
                         std::abs(t),
                         phase_response(p, omega).exact,
                         rotation_angle(p, omega),
                         group_delay(p, omega)};
    });
    const std::string path = write_table(cfg, "response_sweep", std::move(table));
    note(opt, "response_sweep: " + std::to_string(grid.size()) + " points, dip FWHM " +
                  format_double((p.gamma_m + optical_damping(p)) / pi, 6) + " Hz -> " + path);
}

void cmd_linewidth_vs_power(const RunConfig& cfg, const RunOptions& opt) {
    warn_all(cfg, opt);
    const OmitParams base = omit_params_from(cfg);
    const CouplingRates rates = mirror_coupling_rates(cfg.cavity);
    const MembraneOptics slab =
        membrane_slab_optics(cfg.membrane, cfg.cavity.wavelength);
    PowerSweepParams sp;
    sp.gamma1 = rates.gamma1;
    sp.gamma2 = rates.gamma2;
    sp.g0 = coupling_constant(cfg.membrane_z, std::abs(slab.r_m), cfg.cavity,
                              cfg.alignment_phase);
    sp.omega_p = hz_to_angular(constants.c / cfg.cavity.wavelength);
    sp.gamma_m = base.gamma_m;
    sp.omega_m = cfg.membrane.omega_m;
    sp.m_eff = base.m_eff;
    sp.delta = cfg.control.delta;

    // Reference power ladder of the source measurement.
    const std::vector<double> powers = {0.5e-3, 1.3e-3, 2.7e-3, 4.0e-3};
    const auto sweep = linewidth_vs_power_sweep(sp, powers);

    CsvTable table;
    table.header_lines = output_header(cfg, "linewidth_vs_power");
    table.columns = {"power_W", "gamma_opt_rad_per_s", "fwhm_Hz", "dip_depth"};
    for (const auto& row : sweep)
        table.rows.push_back({row.power_w, row.gamma_opt, row.fwhm_hz, row.dip_depth});
    const std::string path = write_table(cfg, "linewidth_vs_power", std::move(table));
    note(opt, "linewidth_vs_power: FWHM " + format_double(sweep.front().fwhm_hz, 6) +
                  " Hz at " + format_double(powers.front() * 1e3, 3) + " mW to " +
                  format_double(sweep.back().fwhm_hz, 6) + " Hz at " +
                  format_double(powers.back() * 1e3, 3) + " mW -> " + path);
}

void cmd_finesse_scan(const RunConfig& cfg, const RunOptions& opt) {
    warn_all(cfg, opt);
    const double lambda = cfg.cavity.wavelength;
    const int n = cfg.sweep.points;
    std::vector<double> z_grid(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        z_grid[static_cast<std::size_t>(i)] =
            (lambda / 2.0) * static_cast<double>(i) / static_cast<double>(n);
    const std::vector<double> finesse = finesse_scan(cfg.cavity, cfg.membrane, z_grid);
    const double fsr = free_spectral_range(cfg.cavity);

    CsvTable table;
    table.header_lines = output_header(cfg, "finesse_scan");
    table.columns = {"z_over_lambda", "z_m", "finesse", "fwhm_Hz"};
    for (std::size_t i = 0; i < z_grid.size(); ++i)
        table.rows.push_back({z_grid[i] / lambda, z_grid[i], finesse[i],
                              fsr / finesse[i]});
    const std::string path = write_table(cfg, "finesse_scan", std::move(table));
    const auto [lo, hi] = std::minmax_element(finesse.begin(), finesse.end());
    note(opt, "finesse_scan: " + std::to_string(n) + " positions, finesse " +
                  format_double(*lo, 6) + " .. " + format_double(*hi, 6) + " -> " + path);
}

void cmd_ellipse(const RunConfig& cfg, const RunOptions& opt) {
    warn_all(cfg, opt);
    const OmitParams p = omit_params_from(cfg);
    const double g_opt = optical_damping(p);
    const double x_ext = std::sqrt(p.gamma_m * g_opt); // rotation-angle extremum
    const std::vector<double> offsets = {-10.0, -4.0, -2.0, -1.0, -0.5, 0.0,
                                         0.5,  1.0,  2.0,  4.0,  10.0};

    struct Row {
        double f_hz;
        NoiseEllipse e;
        double pred;
    };
    std::vector<Row> rows(offsets.size());
    parallel_for(offsets.size(), [&](std::size_t i) {
        const double omega = p.omega_m + offsets[i] * x_ext;
        SignalSource src = cfg.noise;
        src.drive_frequency = omega;
        src.seed = derive_seed(cfg.noise.seed, i);
        rows[i] = {angular_to_hz(omega),
                   ellipse_monte_carlo(src, p, omega, cfg.mc_samples),
                   rotation_angle_exact(p, omega)};
    });

    nlohmann::json j;
    j["header"] = output_header(cfg, "ellipse");
    j["n_samples"] = cfg.mc_samples;
    j["amplitude_noise_sigma"] = cfg.noise.amplitude_noise_sigma;
    for (const auto& row : rows) {
        nlohmann::json e;
        e["f_hz"] = row.f_hz;
        e["covariance"] = {row.e.cov_xx, row.e.cov_xy, row.e.cov_yy};
        e["mean_phasor"] = {row.e.mean_phasor.real(), row.e.mean_phasor.imag()};
        e["angle_rad"] = row.e.angle;
        e["angle_deg"] = row.e.angle * 180.0 / pi;
        e["predicted_angle_rad"] = row.pred;
        e["semi_major"] = row.e.semi_major;
        e["semi_minor"] = row.e.semi_minor;
        e["degenerate"] = row.e.degenerate;
        j["ellipses"].push_back(e);
    }
    const std::string jpath = output_file(cfg, "ellipse", "json");
    write_text(jpath, j.dump(2) + "\n");

    CsvTable table;
    table.header_lines = output_header(cfg, "ellipse");
    table.columns = {"f_Hz", "theta_deg", "theta_pred_deg", "semi_major", "semi_minor"};
    for (const auto& row : rows)
        table.rows.push_back({row.f_hz, row.e.angle * 180.0 / pi,
                              row.pred * 180.0 / pi, row.e.semi_major,
                              row.e.semi_minor});
    write_csv(output_file(cfg, "ellipse_summary", "csv"), table);
    note(opt, "ellipse: " + std::to_string(offsets.size()) + " frequencies, n = " +
                  std::to_string(cfg.mc_samples) + " -> " + jpath);
}

void cmd_oracle_compare(const RunConfig& cfg, const RunOptions& opt) {
    warn_all(cfg, opt);
    const OmitParams p = omit_params_from(cfg);
    const OracleParams op = oracle_params_from(cfg);
    const double g_opt = optical_damping(p);
    const double half_span = 10.0 * (p.gamma_m + g_opt);
    const std::size_t n = 401;
    std::vector<double> grid(n);
    for (std::size_t i = 0; i < n; ++i)
        grid[i] = p.omega_m - half_span +
                  2.0 * half_span * static_cast<double>(i) / static_cast<double>(n - 1);

    const ComplexResponse exact = exact_response_oracle(op, grid);
    const ComplexResponse sideband = sideband_response(op, grid);
    const double t0 = peak_transmissivity(p);

    CsvTable table;
    table.header_lines = output_header(cfg, "oracle_compare");
    table.columns = {"f_Hz",          "abs_t_exact",  "abs_t_sideband",
                     "abs_t_closed",  "dev_over_t0",  "phase_exact_rad",
                     "phase_closed_rad"};
    double max_dev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::complex<double> closed = transmissivity(p, grid[i]);
        const double dev = std::abs(exact.t[i] - closed) / t0;
        max_dev = std::max(max_dev, dev);
        table.rows.push_back({angular_to_hz(grid[i]), exact.magnitude[i],
                              sideband.magnitude[i], std::abs(closed), dev,
                              exact.phase[i], phase_response(p, grid[i]).exact});
    }
    const std::string path = write_table(cfg, "oracle_compare", std::move(table));
    note(opt, "oracle_compare: sideband-resolution ratio omega_m/gamma = " +
                  format_double(p.omega_m / p.gamma, 6) + ", max |t_exact - t_closed|/t0 = " +
                  format_double(max_dev, 6) + " -> " + path);
}

void cmd_design_check(const RunConfig& cfg, const RunOptions& opt) {
    warn_all(cfg, opt);
    const OmitParams p = omit_params_from(cfg);
    const double g_opt = optical_damping(p);
    const double q_total = quality_factor(cfg.membrane, cfg.gas);
    FeasibilityResult feas{false, std::numeric_limits<double>::infinity()};
    if (g_opt > 0.0) {
        feas = feasibility_bound(cfg.gas.temperature, q_total, g_opt);
    }
    const double reference_gamma = hz_to_angular(100.0);

    nlohmann::json j;
    j["header"] = output_header(cfg, "design_check");
    j["gamma_opt_rad_per_s"] = g_opt;
    j["dip_fwhm_hz"] = (p.gamma_m + g_opt) / pi;
    j["threshold_T_over_Q_at_100hz_K"] = feasibility_threshold(reference_gamma);
    j["threshold_T_over_Q_config_K"] = g_opt > 0.0 ? feasibility_threshold(g_opt) : 0.0;
    j["T_over_Q_K"] = cfg.gas.temperature / q_total;
    j["feasibility_ratio"] = feas.ratio;
    j["satisfied"] = feas.satisfied;
    const std::string path = output_file(cfg, "design_check", "json");
    write_text(path, j.dump(2) + "\n");

    note(opt, "design_check: T/Q threshold at Gamma_opt = 2 pi x 100 Hz is " +
                  format_double(feasibility_threshold(reference_gamma), 6) + " K");
    note(opt, "design_check: configured Gamma_opt = " + format_double(g_opt, 6) +
                  " rad/s, T/Q = " + format_double(cfg.gas.temperature / q_total, 6) +
                  " K, thermal/optical ratio = " + format_double(feas.ratio, 6) +
                  (feas.satisfied ? " (satisfied)" : " (not satisfied)") + " -> " + path);
}

void cmd_gas_damping(const RunConfig& cfg, const RunOptions& opt) {
    warn_all(cfg, opt);
    const std::size_t n = 61;
    CsvTable table;
    table.header_lines = output_header(cfg, "gas_damping");
    table.columns = {"pressure_mbar", "gamma_gas_rad_per_s", "q"};
    for (std::size_t i = 0; i < n; ++i) {
        // 1e-6 .. 1e-2 mbar with exact decades at the endpoints, then clamped
        // to the validity ceiling so roundoff cannot trip the range check.
        const double ratio =
            std::pow(10.0, 4.0 * static_cast<double>(i) / static_cast<double>(n - 1));
        const double p_mbar = 1e-6 * ratio;
        GasEnvironment env = cfg.gas;
        env.pressure = std::min(mbar_to_pa(p_mbar), env.flow_ceiling);
        table.rows.push_back({p_mbar, gas_damping_rate(cfg.membrane, env),
                              quality_factor(cfg.membrane, env)});
    }
    const double q_floor = table.rows.back()[2];
    const std::string path = write_table(cfg, "gas_damping", std::move(table));
    note(opt, "gas_damping: Q from " + format_double(cfg.membrane.q_intrinsic, 6) +
                  " (vacuum) down to " + format_double(q_floor, 6) +
                  " at 1e-2 mbar -> " + path);
}

} // namespace omitlab
