#include "omitlab/cavity.hpp"

#include <algorithm>
#include <cmath>

#include "omitlab/constants.hpp"
#include "omitlab/errors.hpp"
#include "omitlab/parallel.hpp"

namespace omitlab {

namespace {

using cplx = std::complex<double>;

// 2x2 complex transfer matrix acting on (right-moving, left-moving)
// amplitudes: (u_R, v_R) = M (u_L, v_L).
struct Mat2 {
    cplx a, b, c, d;
};

Mat2 operator*(const Mat2& m, const Mat2& n) {
    return {m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d,
            m.c * n.a + m.d * n.c, m.c * n.b + m.d * n.d};
}

// Lossy mirror with power transmissivity T; the loss share is removed from
// the reflected power.  Scattering amplitudes r = sqrt(1 - T - loss),
// t = sqrt(T) rearranged into transfer form.
Mat2 mirror_matrix(double T, double loss_share) {
    const double r = std::sqrt(1.0 - T - loss_share);
    const double t = std::sqrt(T);
    return {cplx((t * t + r * r) / t), cplx(-r / t), cplx(-r / t), cplx(1.0 / t)};
}

// Thin slab with scattering amplitudes (r_m, t_m), symmetric from both sides.
Mat2 slab_matrix(const MembraneOptics& o) {
    return {(o.t_m * o.t_m - o.r_m * o.r_m) / o.t_m, o.r_m / o.t_m,
            -o.r_m / o.t_m, cplx(1.0) / o.t_m};
}

double estimated_fwhm_hz(const CavityConfig& cfg) {
    return free_spectral_range(cfg) / analytic_finesse(cfg);
}

// Everything needed to evaluate the cascade at a given detuning.  Detunings
// are kept separate from the huge absolute optical frequency: the half-cavity
// propagation phase splits into pi*m/2 (m = reference band index, giving the
// exact unit i^m) plus pi*x/(2 FSR) from the detuning x, so the model stays
// smooth at sub-ulp-of-nu0 resolution.
struct Cascade {
    Mat2 m1, m2, slab;
    cplx band_unit;     // i^m
    double fsr;         // Hz
    double kz;          // design wavenumber times membrane position, rad
};

Cascade make_cascade(const CavityConfig& cfg, const MembraneOptics& optics, double z) {
    if (!(z > -cfg.length / 2.0 && z < cfg.length / 2.0))
        throw DomainError("membrane position must lie strictly inside the cavity");
    Cascade c;
    c.m1 = mirror_matrix(cfg.t1, cfg.excess_loss / 2.0);
    c.m2 = mirror_matrix(cfg.t2, cfg.excess_loss / 2.0);
    c.slab = slab_matrix(optics);
    const double fsr = free_spectral_range(cfg);
    const long long band_index = std::llround(constants.c / cfg.wavelength / fsr);
    static const cplx unit[4] = {cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)};
    c.band_unit = unit[band_index & 3];
    c.fsr = fsr;
    c.kz = 2.0 * pi / cfg.wavelength * z;
    return c;
}

cplx detuned_transmission(const Cascade& c, double x_hz) {
    const double ph = pi * x_hz / (2.0 * c.fsr); // detuning part of k L / 2
    const cplx e1 = c.band_unit * std::exp(cplx(0.0, ph + c.kz));
    const cplx e2 = c.band_unit * std::exp(cplx(0.0, ph - c.kz));
    // m2 * P(L/2 - z) * slab * P(L/2 + z) * m1 with diagonal propagation.
    const Mat2 p1{e1, cplx(0.0), cplx(0.0), cplx(1.0) / e1};
    const Mat2 p2{e2, cplx(0.0), cplx(0.0), cplx(1.0) / e2};
    const Mat2 total = c.m2 * p2 * c.slab * p1 * c.m1;
    // det(total) = 1, so the overall transmission is 1 / M22.
    return cplx(1.0) / total.d;
}

} // namespace

void validate(const CavityConfig& cfg) {
    if (!(cfg.length > 0.0)) throw ValidationError("cavity length must be > 0");
    if (!(cfg.t1 > 0.0 && cfg.t1 < 1.0)) throw ValidationError("T1 out of (0,1)");
    if (!(cfg.t2 > 0.0 && cfg.t2 < 1.0)) throw ValidationError("T2 out of (0,1)");
    if (!(cfg.wavelength > 0.0)) throw ValidationError("cavity wavelength must be > 0");
    if (!(cfg.excess_loss >= 0.0)) throw ValidationError("excess_loss must be >= 0");
    if (!(cfg.t1 + cfg.t2 + cfg.excess_loss < 1.0))
        throw ValidationError("T1 + T2 + excess_loss must be < 1");
}

std::vector<std::string> config_warnings(const CavityConfig& cfg) {
    std::vector<std::string> w;
    if (cfg.t1 <= cfg.t2)
        w.push_back("cavity is not over-coupled (T1 <= T2); the reference design has T1 > T2");
    return w;
}

CouplingRates mirror_coupling_rates(const CavityConfig& cfg) {
    const double scale = constants.c / (4.0 * cfg.length);
    return {scale * cfg.t1, scale * cfg.t2};
}

double free_spectral_range(const CavityConfig& cfg) {
    return constants.c / (2.0 * cfg.length);
}

double reference_band_base(const CavityConfig& cfg) {
    const double fsr = free_spectral_range(cfg);
    const double nu0 = constants.c / cfg.wavelength;
    return std::round(nu0 / fsr) * fsr;
}

double analytic_finesse(const CavityConfig& cfg) {
    return 2.0 * pi / (cfg.t1 + cfg.t2 + cfg.excess_loss);
}

MembraneOptics membrane_slab_optics(const MembraneConfig& mem, double wavelength) {
    if (!(mem.thickness > 0.0)) throw DomainError("membrane thickness must be > 0");
    if (mem.refractive_index.imag() < 0.0)
        throw DomainError("membrane refractive index must have Im >= 0");
    const cplx n = mem.refractive_index;
    const cplx r0 = (1.0 - n) / (1.0 + n);
    const cplx beta = 2.0 * pi * n * mem.thickness / wavelength;
    const cplx e2 = std::exp(cplx(0.0, 2.0) * beta);
    const cplx denom = 1.0 - r0 * r0 * e2;
    MembraneOptics o;
    o.r_m = r0 * (1.0 - e2) / denom;
    o.t_m = (1.0 - r0 * r0) * std::exp(cplx(0.0, 1.0) * beta) / denom;
    o.absorption = 1.0 - std::norm(o.r_m) - std::norm(o.t_m);
    return o;
}

MembraneOptics identity_membrane() {
    return {cplx(0.0), cplx(1.0), 0.0};
}

double cavity_resonance_shift(double z, double r_m_mag, const CavityConfig& cfg,
                              double phase_offset) {
    if (!(std::abs(r_m_mag) < 1.0))
        throw DomainError("|r_m| must be < 1 for the coupled-cavity dispersion");
    const double u = r_m_mag * std::cos(4.0 * pi * z / cfg.wavelength + phase_offset);
    return (constants.c / cfg.length) * std::acos(u);
}

double coupling_constant(double z, double r_m_mag, const CavityConfig& cfg,
                         double phase_offset) {
    if (!(std::abs(r_m_mag) < 1.0))
        throw DomainError("|r_m| must be < 1 for the coupled-cavity dispersion");
    const double arg = 4.0 * pi * z / cfg.wavelength + phase_offset;
    const double cosv = std::cos(arg);
    return (constants.c / cfg.length) * r_m_mag * (4.0 * pi / cfg.wavelength) *
           std::sin(arg) / std::sqrt(1.0 - r_m_mag * r_m_mag * cosv * cosv);
}

std::complex<double> amplitude_transmission(const CavityConfig& cfg,
                                            const MembraneOptics& optics,
                                            double z, double nu_hz) {
    const Cascade c = make_cascade(cfg, optics, z);
    return detuned_transmission(c, nu_hz - reference_band_base(cfg));
}

std::vector<double> transmission_spectrum(const CavityConfig& cfg,
                                          const MembraneConfig& mem, double z,
                                          const std::vector<double>& detuning_hz) {
    const double limit = estimated_fwhm_hz(cfg) / 10.0;
    for (std::size_t i = 1; i < detuning_hz.size(); ++i) {
        if (detuning_hz[i] - detuning_hz[i - 1] > limit)
            throw GridTooCoarse("detuning grid spacing exceeds estimated linewidth/10 (" +
                                std::to_string(limit) + " Hz)");
    }
    const Cascade c = make_cascade(cfg, membrane_slab_optics(mem, cfg.wavelength), z);
    std::vector<double> power(detuning_hz.size());
    parallel_for(detuning_hz.size(), [&](std::size_t i) {
        power[i] = std::norm(detuned_transmission(c, detuning_hz[i]));
    });
    return power;
}

ResonancePeak measure_resonance(const CavityConfig& cfg,
                                const MembraneOptics& optics, double z) {
    const Cascade casc = make_cascade(cfg, optics, z);
    const double fsr = casc.fsr;
    auto power = [&](double x) { return std::norm(detuned_transmission(casc, x)); };

    // Coarse scan at 4096 points per FSR, padded 10% beyond the band edges so
    // a peak at the edge still has interior neighbours.
    const int n = 4506;
    const double lo = -0.55 * fsr;
    const double step = 1.1 * fsr / n;
    int best = 0;
    double best_val = -1.0;
    for (int i = 0; i < n; ++i) {
        const double v = power(lo + i * step);
        if (v > best_val) {
            best_val = v;
            best = i;
        }
    }

    // Golden-section refinement of the peak position.
    const double tol = 1e-4 * estimated_fwhm_hz(cfg);
    double a = lo + (best - 1) * step;
    double b = lo + (best + 1) * step;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
    double f1 = power(c1), f2 = power(c2);
    while (b - a > tol) {
        if (f1 > f2) {
            b = c2; c2 = c1; f2 = f1;
            c1 = b - gr * (b - a); f1 = power(c1);
        } else {
            a = c1; c1 = c2; f1 = f2;
            c2 = a + gr * (b - a); f2 = power(c2);
        }
    }
    const double peak_x = 0.5 * (a + b);
    const double peak_val = power(peak_x);
    const double half = peak_val / 2.0;

    // Walk outward to bracket the half-maximum crossings, then bisect.  The
    // 1e-6 Hz stop is ~1e-11 of a linewidth, far below any tolerance used on
    // the results but well above detuning rounding noise.
    const double walk = estimated_fwhm_hz(cfg) / 8.0;
    auto cross = [&](double direction) {
        double out = peak_x;
        do {
            out += direction * walk;
        } while (power(out) > half);
        double in_x = out - direction * walk; // power > half here
        for (int it = 0; it < 200 && std::abs(out - in_x) > 1e-6; ++it) {
            const double mid = 0.5 * (in_x + out);
            if (power(mid) > half) in_x = mid;
            else out = mid;
        }
        return 0.5 * (in_x + out);
    };
    const double left = cross(-1.0);
    const double right = cross(+1.0);
    return {reference_band_base(cfg) + peak_x, peak_x, peak_val, right - left};
}

std::vector<double> finesse_scan(const CavityConfig& cfg,
                                 const MembraneConfig& mem,
                                 const std::vector<double>& z_grid) {
    const MembraneOptics optics = membrane_slab_optics(mem, cfg.wavelength);
    const double fsr = free_spectral_range(cfg);
    std::vector<double> finesse(z_grid.size());
    parallel_for(z_grid.size(), [&](std::size_t i) {
        finesse[i] = fsr / measure_resonance(cfg, optics, z_grid[i]).fwhm_hz;
    });
    return finesse;
}

double coupled_linewidth(double finesse, const CavityConfig& cfg) {
    if (!(finesse > 0.0)) throw DomainError("finesse must be > 0");
    return pi * free_spectral_range(cfg) / finesse;
}

} // namespace omitlab
