#include "omitlab/detection.hpp"

#include <algorithm>
#include <cmath>

#include "omitlab/constants.hpp"
#include "omitlab/errors.hpp"
#include "omitlab/parallel.hpp"

namespace omitlab {

void validate(const SignalSource& src) {
    if (!(src.drive_amplitude > 0.0)) throw ValidationError("drive_amplitude must be > 0");
    if (!(src.modulation_index > 0.0)) throw ValidationError("modulation_index must be > 0");
    if (!(src.drive_frequency > 0.0)) throw ValidationError("drive_frequency must be > 0");
    if (!(src.amplitude_noise_sigma >= 0.0))
        throw ValidationError("amplitude_noise_sigma must be >= 0");
}

std::vector<std::string> signal_warnings(const SignalSource& src) {
    std::vector<std::string> w;
    if (src.modulation_index * src.drive_amplitude > 0.1)
        w.push_back("modulation product beta*A exceeds 0.1 rad; "
                    "small-modulation (single sideband) model is strained");
    return w;
}

std::complex<double> generate_signal_field(const SignalSource& src,
                                           double control_amplitude) {
    GaussianRng rng(src.seed);
    return generate_signal_field(src, control_amplitude, rng);
}

std::complex<double> generate_signal_field(const SignalSource& src,
                                           double control_amplitude,
                                           GaussianRng& rng) {
    validate(src);
    const double da = src.amplitude_noise_sigma * src.drive_amplitude * rng.normal();
    return src.modulation_index * (src.drive_amplitude + da) * control_amplitude;
}

NoiseEllipse make_noise_ellipse(double cov_xx, double cov_xy, double cov_yy,
                                std::complex<double> mean_phasor) {
    const double scale = std::max(cov_xx, cov_yy);
    const double tol = 1e-12 * std::max(scale, 1e-300);
    if (cov_xx < -tol || cov_yy < -tol || cov_xx * cov_yy - cov_xy * cov_xy < -tol * scale)
        throw ValidationError("covariance is not positive semi-definite");
    NoiseEllipse e;
    e.cov_xx = cov_xx;
    e.cov_xy = cov_xy;
    e.cov_yy = cov_yy;
    e.mean_phasor = mean_phasor;
    if (scale <= 0.0) {
        e.angle = 0.0;
        e.semi_major = 0.0;
        e.semi_minor = 0.0;
        e.degenerate = true;
        return e;
    }
    const double half_trace = 0.5 * (cov_xx + cov_yy);
    const double radius = 0.5 * std::hypot(cov_xx - cov_yy, 2.0 * cov_xy);
    e.semi_major = std::sqrt(std::max(half_trace + radius, 0.0));
    e.semi_minor = std::sqrt(std::max(half_trace - radius, 0.0));
    // Principal-axis orientation of the larger eigenvalue; atan2/2 already
    // lands in (-pi/2, pi/2].
    e.angle = 0.5 * std::atan2(2.0 * cov_xy, cov_xx - cov_yy);
    e.degenerate = false;
    return e;
}

namespace {

double wrap_half_pi(double a) {
    while (a > pi / 2.0) a -= pi;
    while (a <= -pi / 2.0) a += pi;
    return a;
}

} // namespace

NoiseEllipse propagate_ellipse_closed_form(const NoiseEllipse& input,
                                           std::complex<double> t) {
    if (input.cov_xx == 0.0 && input.cov_xy == 0.0 && input.cov_yy == 0.0)
        throw DegenerateInput("input covariance is zero; orientation undefined");
    if (t == std::complex<double>(0.0))
        throw DomainError("zero transmissivity leaves the output angle undefined");
    const double phi = std::arg(t);
    const double s = std::norm(t);
    const double c = std::cos(phi), n = std::sin(phi);
    // R C R^T scaled by |t|^2, with R the rotation by phi.
    const double xx = input.cov_xx, xy = input.cov_xy, yy = input.cov_yy;
    const double rxx = c * (c * xx - n * xy) - n * (c * xy - n * yy);
    const double rxy = c * (c * xy - n * yy) + n * (c * xx - n * xy);
    const double ryy = n * (c * xy + n * xx) + c * (c * yy + n * xy);
    NoiseEllipse out = make_noise_ellipse(s * rxx, s * rxy, s * ryy,
                                          t * input.mean_phasor);
    out.angle = wrap_half_pi(input.angle + phi);
    return out;
}

NoiseEllipse ellipse_monte_carlo(const SignalSource& src, const OmitParams& p,
                                 double omega, std::size_t n_samples) {
    validate(src);
    if (n_samples < 1000)
        throw DomainError("ellipse Monte Carlo needs at least 1000 samples");
    const std::complex<double> t = transmissivity(p, omega);
    if (src.amplitude_noise_sigma == 0.0) {
        // Every draw lands on the same point; report the degenerate ellipse
        // directly instead of the summation roundoff of a zero-variance
        // sample.
        return make_noise_ellipse(
            0.0, 0.0, 0.0, t * src.modulation_index * src.drive_amplitude);
    }

    GaussianRng rng(src.seed);
    const double control_amplitude = 1.0;
    double sum_x = 0.0, sum_y = 0.0;
    std::vector<double> xs(n_samples), ys(n_samples);
    for (std::size_t k = 0; k < n_samples; ++k) {
        const std::complex<double> out =
            t * generate_signal_field(src, control_amplitude, rng);
        xs[k] = out.real();
        ys[k] = out.imag();
        sum_x += xs[k];
        sum_y += ys[k];
    }
    const double mx = sum_x / static_cast<double>(n_samples);
    const double my = sum_y / static_cast<double>(n_samples);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t k = 0; k < n_samples; ++k) {
        const double dx = xs[k] - mx, dy = ys[k] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    const double denom = static_cast<double>(n_samples - 1);
    return make_noise_ellipse(sxx / denom, sxy / denom, syy / denom, {mx, my});
}

TimeSeries beat_signal(std::complex<double> control, std::complex<double> signal,
                       double omega, double duration, double sample_rate,
                       double detector_noise_sigma, std::uint64_t seed) {
    if (!(omega > 0.0)) throw DomainError("beat frequency must be > 0");
    if (!(sample_rate > 4.0 * omega / (2.0 * pi)))
        throw AliasError("sample rate must exceed four times the beat frequency");
    if (!(duration > 0.0)) throw DomainError("duration must be > 0");
    // Same nudged floor as the lock-in window arithmetic, so a record of
    // `duration` seconds always covers an integration window of the same
    // nominal length even when duration*sample_rate rounds just below an
    // integer.
    const std::size_t n =
        static_cast<std::size_t>(std::floor(duration * sample_rate + 1e-9)) + 1;
    TimeSeries out;
    out.sample_rate = sample_rate;
    out.samples.resize(n);
    const double dc = std::norm(control) + std::norm(signal);
    const std::complex<double> cross = 2.0 * std::conj(control) * signal;
    GaussianRng rng(seed);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) / sample_rate;
        // |a_c + a_s e^{+i Omega t}|^2 expanded; cross carries both amplitudes.
        double v = dc + (cross * std::exp(std::complex<double>(0.0, omega * t))).real();
        if (detector_noise_sigma > 0.0) v += detector_noise_sigma * rng.normal();
        out.samples[k] = v;
    }
    return out;
}

LockInResult demodulate(const TimeSeries& series, double omega,
                        double integration_time) {
    if (!(omega > 0.0)) throw DomainError("reference frequency must be > 0");
    const double period = 2.0 * pi / omega;
    if (integration_time < 10.0 * period)
        throw WindowTooShort("integration window must cover at least 10 beat periods");
    const double dt = 1.0 / series.sample_rate;
    const std::size_t last =
        static_cast<std::size_t>(std::floor(integration_time / dt + 1e-9));
    if (last + 1 > series.samples.size() || last < 2)
        throw WindowTooShort("record is shorter than the integration window");
    const double t_end = static_cast<double>(last) * dt;
    double acc_i = 0.0, acc_q = 0.0;
    for (std::size_t k = 0; k <= last; ++k) {
        const double w = (k == 0 || k == last) ? 0.5 : 1.0; // trapezoid
        const double t = static_cast<double>(k) * dt;
        const double s = series.samples[k];
        acc_i += w * s * std::cos(omega * t);
        acc_q += w * s * std::sin(omega * t);
    }
    LockInResult r;
    r.integration_time = t_end;
    r.in_phase = 2.0 * acc_i * dt / t_end;
    r.quadrature = -2.0 * acc_q * dt / t_end;
    r.magnitude = std::hypot(r.in_phase, r.quadrature);
    r.phase = std::atan2(r.quadrature, r.in_phase);
    return r;
}

std::vector<ChainPoint> full_chain_sweep(const SignalSource& src,
                                         const OmitParams& p,
                                         const std::vector<double>& omega_grid,
                                         std::size_t n_noise_trials,
                                         double detector_noise_sigma) {
    validate(src);
    if (omega_grid.size() < 2) throw DomainError("sweep grid needs at least 2 points");
    const double dip_full_width = 2.0 * (p.gamma_m + optical_damping(p));
    if (omega_grid.back() - omega_grid.front() < 10.0 * dip_full_width)
        throw DomainError("sweep must span at least 10 dip linewidths");

    const double control_amplitude = 1.0;
    const double sideband_in =
        src.modulation_index * src.drive_amplitude * control_amplitude;
    std::vector<ChainPoint> table(omega_grid.size());
    parallel_for(omega_grid.size(), [&](std::size_t i) {
        const double omega = omega_grid[i];
        const std::complex<double> t = transmissivity(p, omega);
        const std::complex<double> a_s = t * sideband_in;

        // Noiseless beat record over an integer number of periods with an
        // integer number of samples per period, so the trapezoidal lock-in
        // has no spectral leakage.
        const int samples_per_period = 32;
        const int periods = 128;
        const double period = 2.0 * pi / omega;
        const double fs = static_cast<double>(samples_per_period) / period;
        const double duration = static_cast<double>(periods) * period;
        const std::uint64_t beat_seed = derive_seed(src.seed, 2 * i);
        const TimeSeries beat = beat_signal(control_amplitude, a_s, omega, duration,
                                            fs, detector_noise_sigma, beat_seed);
        const LockInResult lock = demodulate(beat, omega, duration);

        SignalSource per_point = src;
        per_point.seed = derive_seed(src.seed, 2 * i + 1);
        const NoiseEllipse ellipse =
            ellipse_monte_carlo(per_point, p, omega, n_noise_trials);

        ChainPoint row;
        row.f_hz = angular_to_hz(omega);
        row.t_abs = lock.magnitude / (2.0 * control_amplitude * sideband_in);
        row.phase_rad = lock.phase;
        row.theta_deg = ellipse.angle * 180.0 / pi;
        row.theta_err_deg = row.theta_deg - rotation_angle(p, omega) * 180.0 / pi;
        table[i] = row;
    });
    return table;
}

} // namespace omitlab
