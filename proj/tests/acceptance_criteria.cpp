// Acceptance gates for the transparency-filter simulator.
//
// Each criterion prints exactly one PASS/FAIL line with the measured value and
// the pinned tolerance; indented lines carry recorded (ungated) findings and
// the analysis of known failures.  The process exits nonzero if any criterion
// fails, so the failure shows up in the test driver rather than being hidden.
//
// Three criteria fail honestly because the model, evaluated faithfully,
// contradicts the quoted target values; the analysis is printed inline and
// expanded in README.md:
//   - criterion 4:  the membrane can shield the lossier input mirror, so the
//     position-dependent finesse exceeds the empty-cavity value over part of
//     the period (max 1.23x), violating the quoted F(z) <= F0 bound;
//   - criterion 8:  with the intrinsic mechanical linewidth capped at 1 Hz
//     (gamma_m <= pi rad/s) and the dip width affine in control power with
//     15 Hz at 4 mW, the 0.5 mW width is at most 2.75 Hz, so the quoted
//     3 Hz lower edge of the tuning window is unreachable;
//   - criterion 12: the free-molecular-flow damping formula puts the quality
//     factor 10.4% below its intrinsic value at exactly 3e-5 mbar, just
//     outside the quoted 10% plateau band.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "omitlab/cavity.hpp"
#include "omitlab/commands.hpp"
#include "omitlab/config.hpp"
#include "omitlab/constants.hpp"
#include "omitlab/detection.hpp"
#include "omitlab/membrane.hpp"
#include "omitlab/omit.hpp"
#include "omitlab/rng.hpp"

namespace {

using namespace omitlab;
using cplx = std::complex<double>;
namespace fs = std::filesystem;

int g_failures = 0;

std::string fmt(const char* f, ...) {
    va_list ap;
    va_start(ap, f);
    char buf[512];
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

void report(int id, bool pass, const std::string& text) {
    std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", id, text.c_str());
    if (!pass) ++g_failures;
}

void detail(const std::string& text) { std::printf("        %s\n", text.c_str()); }

// Reference apparatus: 85 mm cavity, 245.1/16.93 ppm mirrors, 18.4 ppm excess
// loss, 1064 nm; 1 mm x 50 nm stoichiometric-nitride membrane, 402.7 kHz drum
// mode, Q = 1.5e6.
CavityConfig reference_cavity() {
    CavityConfig cfg;
    cfg.length = 0.085;
    cfg.t1 = ppm_to_fraction(245.1);
    cfg.t2 = ppm_to_fraction(16.93);
    cfg.wavelength = 1064e-9;
    cfg.excess_loss = ppm_to_fraction(18.4);
    return cfg;
}

MembraneConfig reference_membrane() {
    MembraneConfig mem;
    mem.side_length = 1e-3;
    mem.thickness = 50e-9;
    mem.density = 3100.0;
    mem.refractive_index = {2.0, 2.5e-5};
    mem.omega_m = hz_to_angular(402.7e3);
    mem.q_intrinsic = 1.5e6;
    return mem;
}

double g_for_damping(double gamma_opt, double m, double omega_m, double gamma) {
    return std::sqrt(gamma_opt * 2.0 * m * omega_m * gamma / constants.hbar);
}

// Transparency-window working point: apparatus mirrors, 20 Hz pump damping.
OmitParams window_params() {
    const CavityConfig cav = reference_cavity();
    const CouplingRates r = mirror_coupling_rates(cav);
    const double omega_m = hz_to_angular(402.7e3);
    const double m_eff = 3.875e-11;
    const double gamma_m = omega_m / (2.0 * 1.5e6);
    const double g = g_for_damping(hz_to_angular(20.0), m_eff, omega_m,
                                   r.gamma1 + r.gamma2);
    return make_omit_params(r.gamma1, r.gamma2, g, gamma_m, omega_m, m_eff);
}

SignalSource reference_source() {
    SignalSource src;
    src.drive_amplitude = 1.0;
    src.modulation_index = 15e-3;
    src.drive_frequency = hz_to_angular(402.7e3);
    src.amplitude_noise_sigma = 0.1;
    src.seed = 20260823;
    return src;
}

double wrap_half_pi(double a) {
    while (a > pi / 2.0) a -= pi;
    while (a <= -pi / 2.0) a += pi;
    return a;
}

// --- criterion 1: low-temperature feasibility threshold ---------------------
void c1() {
    const double tol = 0.02;
    const double threshold = feasibility_threshold(hz_to_angular(100.0));
    const double quoted = 6.0e-10; // K
    const double dev = std::abs(threshold / quoted - 1.0);
    report(1, dev < tol,
           fmt("T/Q threshold at 2pi x 100 Hz pump damping = %.6g K vs %.1e K "
               "quoted (dev %.3g%%, tol 2%%)",
               threshold, quoted, 100.0 * dev));
}

// --- criterion 2: fundamental-mode effective mass ---------------------------
void c2() {
    const double tol = 0.05;
    const double m = effective_mass(reference_membrane()); // kg
    const double quoted = 40e-12;                          // 40 ng
    const double dev = std::abs(m / quoted - 1.0);
    report(2, dev < tol,
           fmt("effective mass of 1 mm x 1 mm x 50 nm at 3100 kg/m^3 = %.4g ng "
               "vs 40 ng quoted (dev %.3g%%, tol 5%%)",
               m * 1e12, 100.0 * dev));
}

// --- criterion 3: transfer-matrix finesse vs loss budget --------------------
void c3() {
    const double tol_f = 0.01;
    const double tol_lw = 1e-9;
    const CavityConfig cfg = reference_cavity();
    const ResonancePeak peak = measure_resonance(cfg, identity_membrane(), 0.0);
    const double finesse = free_spectral_range(cfg) / peak.fwhm_hz;
    const double dev_f = std::abs(finesse / 22400.0 - 1.0);

    const CouplingRates rates = mirror_coupling_rates(cfg);
    const double budget_finesse = 2.0 * pi / (cfg.t1 + cfg.t2);
    const double lw = coupled_linewidth(budget_finesse, cfg);
    const double dev_lw = std::abs(lw / (rates.gamma1 + rates.gamma2) - 1.0);

    report(3, dev_f < tol_f && dev_lw < tol_lw,
           fmt("empty-cavity transfer-matrix finesse = %.2f vs 22400 quoted "
               "(dev %.3g%%, tol 1%%); linewidth bridge dev %.2g (tol 1e-9)",
               finesse, 100.0 * dev_f, dev_lw));
}

// --- criterion 4: finesse-vs-position periodicity and bound -----------------
void c4() {
    const double tol_period = 1e-6;
    const CavityConfig cfg = reference_cavity();
    const MembraneConfig mem = reference_membrane();
    const double lambda = cfg.wavelength;

    std::vector<double> z, z_shift;
    for (int i = 0; i < 64; ++i) {
        z.push_back(lambda / 2.0 * i / 64.0);
        z_shift.push_back(z.back() + lambda / 2.0);
    }
    const std::vector<double> f = finesse_scan(cfg, mem, z);
    const std::vector<double> fshift = finesse_scan(cfg, mem, z_shift);

    double period_dev = 0.0;
    double fmax = 0.0;
    std::size_t imax = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        period_dev = std::max(period_dev, std::abs(fshift[i] / f[i] - 1.0));
        if (f[i] > fmax) {
            fmax = f[i];
            imax = i;
        }
    }

    const double f0 =
        free_spectral_range(cfg) /
        measure_resonance(cfg, identity_membrane(), 0.0).fwhm_hz;
    const bool bound_ok = fmax <= f0 * (1.0 + 1e-9);
    const bool period_ok = period_dev < tol_period;

    report(4, period_ok && bound_ok,
           fmt("half-wavelength periodicity dev %.2g over 64 positions (tol "
               "1e-6); bound F(z) <= F0 %s (max F = %.1f = %.4f x F0)",
               period_dev, bound_ok ? "holds" : "violated", fmax, fmax / f0));
    if (!bound_ok) {
        detail(fmt("max at z = %.7f lambda: the membrane decouples the lossier "
                   "input mirror there, so the coupled finesse exceeds the "
                   "empty-cavity value; the quoted bound assumes absorption "
                   "can only add loss",
                   z[imax] / lambda));
    }
}

// --- criterion 5: dispersion derivative vs finite difference ----------------
void c5() {
    const double tol = 1e-6;
    const CavityConfig cfg = reference_cavity();
    const double r =
        std::abs(membrane_slab_optics(reference_membrane(), cfg.wavelength).r_m);
    const double lambda = cfg.wavelength;

    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        // Midpoint grid over one half-wavelength: no point lands on a
        // derivative zero (z = 0 and lambda/4 for zero alignment phase).
        const double zz = lambda / 2.0 * (i + 0.5) / 100.0;
        const double analytic = coupling_constant(zz, r, cfg);
        const double h = 1e-12;
        const double fd = (cavity_resonance_shift(zz + h, r, cfg) -
                           cavity_resonance_shift(zz - h, r, cfg)) /
                          (2.0 * h);
        worst = std::max(worst, std::abs(analytic / fd - 1.0));
    }
    report(5, worst < tol,
           fmt("coupling constant vs central finite difference of the "
               "dispersion curve: worst relative error %.2g over 100 "
               "positions (tol 1e-6)",
               worst));
}

// --- criterion 6: closed form vs two-sideband oracle ------------------------
void c6() {
    const double tol = 1e-2;

    // Deep regime: mechanical frequency 20x the cavity linewidth.
    const double omega_m = hz_to_angular(400e3);
    const double gamma = omega_m / 20.0;
    const double gamma1 = 0.935 * gamma;
    const double gamma2 = gamma - gamma1;
    const double m_eff = 3.875e-11;
    const double gamma_m = omega_m / (2.0 * 1.5e6);
    const double g = g_for_damping(gamma_m, m_eff, omega_m, gamma);
    const OmitParams p =
        make_omit_params(gamma1, gamma2, g, gamma_m, omega_m, m_eff);
    const double g_opt = optical_damping(p);

    OracleParams o;
    o.gamma1 = gamma1;
    o.gamma2 = gamma2;
    o.gamma = gamma;
    o.g_bar = g;
    o.m_eff = m_eff;
    o.omega_m = omega_m;
    o.gamma_m = gamma_m;
    o.delta_c = omega_m;

    std::vector<double> grid;
    for (int i = 0; i <= 400; ++i)
        grid.push_back(omega_m + (i - 200) * g_opt / 20.0);
    const ComplexResponse oracle = exact_response_oracle(o, grid);
    const double t0 = peak_transmissivity(p);
    double dev_deep = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        dev_deep = std::max(
            dev_deep, std::abs(oracle.t[i] - transmissivity(p, grid[i])) / t0);

    // Apparatus regime (mechanical frequency ~4.7x the cavity linewidth):
    // run and recorded, not gated.
    const double gamma_a = 5.34e5;
    const double gamma1_a = 0.935 * gamma_a;
    const double omega_a = hz_to_angular(402.7e3);
    const double gm_a = omega_a / (2.0 * 1.5e6);
    const double g_a =
        g_for_damping(hz_to_angular(300.0), m_eff, omega_a, gamma_a);
    const OmitParams pa = make_omit_params(gamma1_a, gamma_a - gamma1_a, g_a,
                                           gm_a, omega_a, m_eff);
    OracleParams oa = o;
    oa.gamma1 = gamma1_a;
    oa.gamma2 = gamma_a - gamma1_a;
    oa.gamma = gamma_a;
    oa.g_bar = g_a;
    oa.omega_m = omega_a;
    oa.gamma_m = gm_a;
    oa.delta_c = omega_a;
    std::vector<double> grid_a;
    for (int i = 0; i <= 400; ++i)
        grid_a.push_back(omega_a + (i - 200) * hz_to_angular(300.0) / 20.0);
    const ComplexResponse oracle_a = exact_response_oracle(oa, grid_a);
    const double t0_a = peak_transmissivity(pa);
    double dev_apparatus = 0.0;
    for (std::size_t i = 0; i < grid_a.size(); ++i)
        dev_apparatus = std::max(
            dev_apparatus,
            std::abs(oracle_a.t[i] - transmissivity(pa, grid_a[i])) / t0_a);

    report(6, dev_deep < tol,
           fmt("deep sideband-resolved regime: max closed-form deviation from "
               "the two-sideband oracle %.4f of the off-dip level (tol 1e-2)",
               dev_deep));
    detail(fmt("apparatus regime (frequency/linewidth ~ 4.7): deviation %.3f, "
               "recorded but not gated",
               dev_apparatus));
}

// --- criterion 7: transmission-phase identity and its compact form ----------
void c7() {
    const double tol_identity = 1e-12;
    const OmitParams p = window_params();
    const double g_opt = optical_damping(p);
    const double width = p.gamma_m + g_opt;

    double worst_identity = 0.0;
    bool bound_ok = true;
    for (int i = -2000; i <= 2000; ++i) {
        const double x = i * (10.0 * width) / 2000.0;
        const double omega = p.omega_m + x;
        const double from_arg = std::arg(normalized_transmissivity(p, omega));
        const double exact = rotation_angle_exact(p, omega);
        worst_identity = std::max(worst_identity, std::abs(exact - from_arg));

        const double compact = rotation_angle(p, omega);
        const double bound =
            p.gamma_m * p.gamma_m / (x * x + p.gamma_m * g_opt);
        if (std::abs(compact - exact) > bound * (1.0 + 1e-9) + 1e-15)
            bound_ok = false;
    }

    // At the dip center the exact phase returns to zero while the
    // wide-detuning form saturates at -+pi/2; signs track -sign(x) on both.
    const PhasePair center = phase_response(p, p.omega_m);
    const PhasePair above = phase_response(p, p.omega_m + 0.1 * p.gamma_m);
    const PhasePair below = phase_response(p, p.omega_m - 0.1 * p.gamma_m);
    const bool center_ok =
        center.exact == 0.0 && std::abs(std::abs(center.approx) - pi / 2.0) < 1e-15;
    const bool signs_ok = above.exact < 0.0 && above.approx < 0.0 &&
                          below.exact > 0.0 && below.approx > 0.0 &&
                          std::abs(above.exact) < 0.2 &&
                          std::abs(below.exact) < 0.2 &&
                          std::abs(above.approx) > 1.4 &&
                          std::abs(below.approx) > 1.4;

    report(7, worst_identity < tol_identity && bound_ok && center_ok && signs_ok,
           fmt("arg t_n vs closed-form angle: worst |diff| %.2g rad (tol "
               "1e-12); compact-form error within gamma_m^2/(x^2 + gamma_m "
               "Gamma) everywhere: %s; center/sign pattern: %s",
               worst_identity, bound_ok ? "yes" : "no",
               (center_ok && signs_ok) ? "reproduced" : "broken"));
}

// --- criterion 8: dip-width law and the power-tuning window -----------------
void c8() {
    const double tol_extract = 1e-3; // 0.1%
    const double tol_affine = 1e-9;
    const double gamma_m = pi * 0.27;

    // Width extraction from sampled noiseless curves at three dip widths.
    double worst_extract = 0.0;
    for (double w_hz : {3.0, 15.0, 140.0}) {
        const double total = w_hz * pi; // gamma_m + Gamma_opt
        std::vector<double> f, s;
        for (int i = -1000; i <= 1000; ++i) {
            // Step w/97: the half-depth crossings fall between samples, so
            // the check exercises the interpolation, not grid alignment.
            const double fi = 402.7e3 + i * w_hz / 97.0;
            const double x = hz_to_angular(fi - 402.7e3);
            f.push_back(fi);
            s.push_back((x * x + gamma_m * gamma_m) / (x * x + total * total));
        }
        worst_extract =
            std::max(worst_extract, std::abs(extract_fwhm(f, s) / w_hz - 1.0));
    }

    // Power sweep with the pump coupling calibrated to 15 Hz at 4 mW.
    PowerSweepParams sp;
    sp.gamma1 = 2.161e5;
    sp.gamma2 = 5.34e5 - 2.161e5;
    sp.omega_p = hz_to_angular(constants.c / 1064e-9);
    sp.gamma_m = gamma_m; // pi x 0.27 rad/s, inside the allowed [pi/4, pi]
    sp.omega_m = hz_to_angular(402.7e3);
    sp.m_eff = 3.875e-11;
    sp.delta = 0.0;
    const double gamma = sp.gamma1 + sp.gamma2;
    const double target_gopt = 15.0 * pi - sp.gamma_m;
    const double nbar4 = intracavity_photon_number(4.0e-3, sp.omega_p,
                                                   sp.omega_m, sp.gamma1, gamma);
    sp.g0 = g_for_damping(target_gopt, sp.m_eff, sp.omega_m, gamma) /
            std::sqrt(nbar4);

    const std::vector<double> powers = {0.5e-3, 1.3e-3, 2.7e-3, 4.0e-3};
    const std::vector<PowerSweepPoint> table =
        linewidth_vs_power_sweep(sp, powers);

    const double d1 = table[2].fwhm_hz - table[1].fwhm_hz; // 1.3 -> 2.7 mW
    const double d2 = table[3].fwhm_hz - table[2].fwhm_hz; // 2.7 -> 4.0 mW
    const double ratio = (4.0e-3 - 2.7e-3) / (2.7e-3 - 1.3e-3);
    const double affine_dev = std::abs(d2 / (d1 * ratio) - 1.0);
    const double calib_dev = std::abs(table[3].fwhm_hz / 15.0 - 1.0);

    double wmin = table[0].fwhm_hz, wmax = table[0].fwhm_hz;
    for (const PowerSweepPoint& pt : table) {
        wmin = std::min(wmin, pt.fwhm_hz);
        wmax = std::max(wmax, pt.fwhm_hz);
    }
    const bool window_ok = wmin >= 3.0 && wmax <= 15.0 * (1.0 + 1e-9);

    report(8,
           worst_extract < tol_extract && affine_dev < tol_affine &&
               calib_dev < tol_affine && window_ok,
           fmt("width extraction dev %.2g (tol 0.1%%); affine-in-power dev "
               "%.2g and 4 mW calibration dev %.2g (tol 1e-9); 0.5-4 mW "
               "widths in [3, 15] Hz: %s",
               worst_extract, affine_dev, calib_dev, window_ok ? "yes" : "no"));
    detail(fmt("measured widths: %.5f, %.5f, %.5f, %.5f Hz at 0.5, 1.3, 2.7, "
               "4.0 mW",
               table[0].fwhm_hz, table[1].fwhm_hz, table[2].fwhm_hz,
               table[3].fwhm_hz));
    if (!window_ok) {
        detail("with width affine in power, 15 Hz at 4 mW and intrinsic "
               "width <= 1 Hz (gamma_m <= pi), the 0.5 mW width is at most "
               "(7*1 + 15)/8 = 2.75 Hz; the 3 Hz lower edge is unreachable "
               "(the model first reaches 3 Hz near 0.74 mW)");
    }
}

// --- criterion 9: dip-width recovery from noisy fits ------------------------
void c9() {
    const double tol = 0.02;
    const double f0 = 402.7e3;
    const double gamma_m = pi * 0.27;
    const double g_opt_true = 15.0 * pi - gamma_m;
    const double total = gamma_m + g_opt_true;

    std::vector<double> errors;
    for (int trial = 0; trial < 100; ++trial) {
        GaussianRng rng(derive_seed(987654321, static_cast<std::uint64_t>(trial)));
        std::vector<double> f, s;
        for (int i = 0; i < 500; ++i) {
            const double fi = f0 - 45.0 + 90.0 * i / 499.0;
            const double x = hz_to_angular(fi - f0);
            f.push_back(fi);
            s.push_back((x * x + gamma_m * gamma_m) / (x * x + total * total) +
                        0.01 * rng.normal());
        }
        const LorentzFit fit = fit_lorentzian(f, s);
        const double g_fit = pi * fit.fwhm_hz - gamma_m;
        errors.push_back(std::abs(g_fit / g_opt_true - 1.0));
    }
    std::sort(errors.begin(), errors.end());
    report(9, errors[94] < tol,
           fmt("pump-damping recovery from 100 seeded fits at noise sigma = "
               "0.01, 500 samples: 95th-percentile error %.4f (tol 2%%)",
               errors[94]));
}

// --- criterion 10: Monte Carlo noise-ellipse rotation -----------------------
void c10() {
    const double tol_deg = 1.0;
    const OmitParams p = window_params();
    const double g_opt = optical_damping(p);
    const double width = p.gamma_m + g_opt;
    const double x_star = std::sqrt(p.gamma_m * width); // angle extremum scale

    const std::vector<double> xs = {
        -100.0 * width, -10.0 * x_star, -3.0 * x_star, -x_star, -0.3 * x_star,
        0.0,            0.3 * x_star,   x_star,        3.0 * x_star,
        10.0 * x_star,  100.0 * width};

    // Closed-form angle trace is odd about the mechanical resonance.
    double cf_odd = 0.0;
    for (std::size_t i = 0; i < 5; ++i) {
        cf_odd = std::max(cf_odd,
                          std::abs(rotation_angle_exact(p, p.omega_m + xs[i]) +
                                   rotation_angle_exact(p, p.omega_m + xs[10 - i])));
    }

    int good = 0;
    std::vector<double> first_angle(xs.size(), 0.0);
    std::vector<cplx> first_mean(xs.size());
    for (int run = 0; run < 100; ++run) {
        const std::size_t fi = static_cast<std::size_t>(run) % xs.size();
        const double omega = p.omega_m + xs[fi];
        SignalSource src = reference_source();
        src.drive_frequency = omega;
        src.seed = 900 + static_cast<std::uint64_t>(run);
        const NoiseEllipse e = ellipse_monte_carlo(src, p, omega, 100000);
        const double predicted = wrap_half_pi(rotation_angle_exact(p, omega));
        const double dist =
            std::abs(std::remainder(e.angle - predicted, pi)) * 180.0 / pi;
        if (dist <= tol_deg) ++good;
        if (run < static_cast<int>(xs.size())) {
            first_angle[fi] = e.angle;
            first_mean[fi] = e.mean_phasor;
        }
    }

    double mc_odd_deg = 0.0;
    for (std::size_t i = 1; i < 5; ++i) { // skip the far-wing pair (wraps tiny)
        mc_odd_deg = std::max(
            mc_odd_deg,
            std::abs(first_angle[i] + first_angle[10 - i]) * 180.0 / pi);
    }
    const double off_deg =
        std::max(std::abs(first_angle.front()), std::abs(first_angle.back())) *
        180.0 / pi;

    // Mean phasor flips sign across the dip (obtuse angle between the two
    // sides at the angle extrema).
    const cplx lo = first_mean[3], hi = first_mean[7];
    const bool flip_ok = lo.real() * hi.real() + lo.imag() * hi.imag() < 0.0;

    report(10,
           good >= 95 && cf_odd < 1e-12 && mc_odd_deg <= 2.0 * tol_deg &&
               off_deg <= tol_deg && flip_ok,
           fmt("ellipse angle within 1 deg of the closed form in %d/100 seeded "
               "runs (n = 1e5, 11 frequencies; need >= 95); trace odd to %.4f "
               "deg; far-wing angle %.2f deg; mean-phasor flip: %s",
               good, mc_odd_deg, off_deg, flip_ok ? "yes" : "no"));
}

// --- criterion 11: lock-in round trip and full measurement chain ------------
void c11() {
    const double tol_lockin = 1e-3;
    const double tol_rms = 5e-3;

    const double omega = hz_to_angular(1000.0);
    double worst_phase = 0.0;
    for (double phi : {-2.5, -pi / 4.0, 0.0, 1.0, 3.0}) {
        const cplx a_s = 0.015 * std::exp(cplx(0.0, phi));
        const TimeSeries ts =
            beat_signal(cplx(1.0), a_s, omega, 0.128, 32000.0, 0.0, 1);
        const LockInResult r = demodulate(ts, omega, 0.128);
        worst_phase = std::max(
            worst_phase, std::abs(std::remainder(r.phase - phi, 2.0 * pi)));
    }

    const OmitParams p = window_params();
    SignalSource src = reference_source();
    const double width = 2.0 * (p.gamma_m + optical_damping(p));
    std::vector<double> grid;
    for (int i = 0; i < 25; ++i)
        grid.push_back(p.omega_m + (i - 12.0) * width);
    const std::vector<ChainPoint> table =
        full_chain_sweep(src, p, grid, 1000, 0.0);
    double sq = 0.0;
    for (std::size_t i = 0; i < table.size(); ++i) {
        const double dev =
            table[i].phase_rad - std::arg(transmissivity(p, grid[i]));
        sq += dev * dev;
    }
    const double rms = std::sqrt(sq / static_cast<double>(table.size()));

    report(11, worst_phase < tol_lockin && rms < tol_rms,
           fmt("lock-in round trip worst phase error %.2g rad over 5 phases "
               "(tol 1e-3); full-chain RMS phase deviation %.2g rad over 25 "
               "frequencies at zero detector noise (tol 5e-3)",
               worst_phase, rms));
}

// --- criterion 12: gas damping and the quality-factor plateau ---------------
void c12() {
    const double tol_plateau = 0.10;
    const MembraneConfig mem = reference_membrane();
    GasEnvironment env;
    env.temperature = 293.0;
    env.molar_mass = 28.97e-3;
    env.flow_ceiling = 1.0;

    env.pressure = 0.0;
    const bool q0_exact = quality_factor(mem, env) == mem.q_intrinsic;

    bool monotone = true;
    double prev = quality_factor(mem, env);
    for (double p_mbar : {1e-7, 1e-6, 1e-5, 3e-5, 1e-4, 1e-3, 1e-2}) {
        env.pressure = mbar_to_pa(p_mbar);
        const double q = quality_factor(mem, env);
        if (!(q < prev)) monotone = false;
        prev = q;
    }

    env.pressure = mbar_to_pa(3e-5);
    const double q_edge = quality_factor(mem, env);
    const double plateau_dev = std::abs(q_edge / 1.5e6 - 1.0);
    const bool plateau_ok = plateau_dev <= tol_plateau;

    // Linearity in pressure to one ulp.
    auto within_ulp = [](double a, double b) {
        return a == b || std::nextafter(a, b) == b;
    };
    env.pressure = 7.3e-4;
    const double g1 = gas_damping_rate(mem, env);
    env.pressure = 2.0 * 7.3e-4;
    const double g2 = gas_damping_rate(mem, env);
    env.pressure = 3.0 * 7.3e-4;
    const double g3 = gas_damping_rate(mem, env);
    const bool linear_ok = g2 == 2.0 * g1 && within_ulp(g3, 3.0 * g1);

    report(12, q0_exact && monotone && plateau_ok && linear_ok,
           fmt("Q(0) = intrinsic exactly: %s; Q strictly decreasing in "
               "pressure: %s; damping linear in pressure to 1 ulp: %s; Q at "
               "3e-5 mbar = %.1f, %.2f%% below 1.5e6 (tol 10%%)",
               q0_exact ? "yes" : "no", monotone ? "yes" : "no",
               linear_ok ? "yes" : "no", q_edge, 100.0 * plateau_dev));
    if (!plateau_ok) {
        detail("the free-molecular damping formula holds the 10% plateau only "
               "up to 2.87e-5 mbar; at the quoted 3e-5 mbar boundary the "
               "computed Q is 1.344e6, a 10.4% reduction, so \"negligible "
               "gas damping at 3e-5 mbar\" misses the 10% band by 0.4 points");
    }
}

// --- criterion 13: byte-identical re-runs -----------------------------------
void c13() {
    RunConfig cfg = default_config();
    cfg.mc_samples = 20000; // identical across both runs; smaller for speed

    const fs::path base =
        fs::temp_directory_path() /
        ("omitlab_acceptance_" + std::to_string(::getpid()));
    RunOptions quiet;
    quiet.quiet = true;

    auto slurp = [](const fs::path& path) {
        std::ifstream in(path, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };

    bool identical = true;
    bool nonempty = true;
    auto compare = [&](const char* tag, auto&& runner,
                       std::initializer_list<const char*> files) {
        const fs::path a = base / (std::string(tag) + "_a");
        const fs::path b = base / (std::string(tag) + "_b");
        fs::create_directories(a);
        fs::create_directories(b);
        RunConfig ca = cfg;
        ca.output.path = a.string();
        runner(ca);
        RunConfig cb = cfg;
        cb.output.path = b.string();
        runner(cb);
        for (const char* file : files) {
            const std::string bytes_a = slurp(a / file);
            const std::string bytes_b = slurp(b / file);
            if (bytes_a.empty()) nonempty = false;
            if (bytes_a != bytes_b) identical = false;
        }
    };

    compare("response_sweep",
            [&](const RunConfig& c) { cmd_response_sweep(c, quiet); },
            {"response_sweep.csv"});
    compare("ellipse", [&](const RunConfig& c) { cmd_ellipse(c, quiet); },
            {"ellipse.json", "ellipse_summary.csv"});
    fs::remove_all(base);

    report(13, identical && nonempty,
           fmt("deterministic sweep and seeded Monte Carlo commands re-run "
               "with identical config and seed: outputs %s and %s",
               nonempty ? "nonempty" : "EMPTY",
               identical ? "byte-identical" : "DIFFER"));
}

} // namespace

int main() {
    std::printf("acceptance gates: membrane transparency filter simulator\n");
    struct Entry {
        int id;
        void (*run)();
    };
    const Entry entries[] = {{1, c1},   {2, c2},   {3, c3},  {4, c4},
                             {5, c5},   {6, c6},   {7, c7},  {8, c8},
                             {9, c9},   {10, c10}, {11, c11}, {12, c12},
                             {13, c13}};
    for (const Entry& e : entries) {
        try {
            e.run();
        } catch (const std::exception& ex) {
            report(e.id, false, fmt("unexpected exception: %s", ex.what()));
        }
    }
    std::printf("%d of 13 criteria passed\n", 13 - g_failures);
    if (g_failures > 0) {
        std::printf("the failing criteria are model-vs-quoted-value conflicts "
                    "analyzed in README.md; they are reported as failures "
                    "rather than loosened\n");
    }
    return g_failures == 0 ? 0 : 1;
}
