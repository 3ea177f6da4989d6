#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "omitlab/omit.hpp"
#include "omitlab/rng.hpp"

// Measurement-chain simulation: a modulator carves a single upper sideband
// off the control field (amplitude beta*A relative to the control, with
// optional Gaussian amplitude noise), the sideband passes through the
// transparency-dip transmissivity, beats against the control on a
// photodetector, and a lock-in recovers (magnitude, phase) at the beat
// frequency.  Monte Carlo propagation of the amplitude-noise cloud through
// the complex transmissivity yields the rotated noise ellipse in the
// (amplitude, phase) quadrature plane.
//
// Time-series convention: the sideband sits one beat frequency ABOVE the
// control, so the detected power is |a_c + a_s e^{+i Omega t}|^2 and the
// beat term is 2 |a_c||a_s| cos(Omega t + arg a_s - arg a_c); the lock-in
// phase atan2(Q, I) then equals arg a_s - arg a_c directly.
//
// Every stochastic operation takes an explicit seed and derives one
// generator per independent work unit, so results do not depend on thread
// scheduling.

namespace omitlab {

struct SignalSource {
    double drive_amplitude;       // modulator drive A, V
    double modulation_index;      // beta, rad/V; sideband fraction = beta*A
    double drive_frequency;       // Omega, rad/s
    double amplitude_noise_sigma; // std of dA/A (relative), dimensionless
    std::uint64_t seed;
};

void validate(const SignalSource& src);
// Non-fatal advisories (e.g. beta*A beyond the small-modulation regime).
std::vector<std::string> signal_warnings(const SignalSource& src);

// Second-moment description of a quadrature noise cloud.
struct NoiseEllipse {
    double cov_xx;                     // amplitude-quadrature variance
    double cov_xy;                     // cross covariance
    double cov_yy;                     // phase-quadrature variance
    std::complex<double> mean_phasor;  // sample mean in the phasor plane
    double angle;                      // major-axis orientation, (-pi/2, pi/2]
    double semi_major;                 // sqrt of larger covariance eigenvalue
    double semi_minor;                 // sqrt of smaller eigenvalue
    bool degenerate;                   // true when the covariance is zero and
                                       // the orientation is meaningless
};

// Builds the derived fields (angle, axes, degenerate flag) from the
// covariance entries; throws ValidationError if the matrix is not positive
// semi-definite beyond roundoff.
NoiseEllipse make_noise_ellipse(double cov_xx, double cov_xy, double cov_yy,
                                std::complex<double> mean_phasor);

struct LockInResult {
    double in_phase;         // I
    double quadrature;       // Q
    double magnitude;        // sqrt(I^2 + Q^2)
    double phase;            // atan2(Q, I), rad
    double integration_time; // s
};

// Uniformly sampled photocurrent record; samples[k] is taken at k/sample_rate.
struct TimeSeries {
    double sample_rate; // Hz
    std::vector<double> samples;
};

// One noisy sideband amplitude beta*(A + dA)*|a_c| with dA ~ N(0, sigma*A),
// phase 0 relative to the control.  The single-argument form seeds a fresh
// generator from src.seed (deterministic); the streaming form consumes draws
// from the supplied generator.
std::complex<double> generate_signal_field(const SignalSource& src,
                                           double control_amplitude);
std::complex<double> generate_signal_field(const SignalSource& src,
                                           double control_amplitude,
                                           GaussianRng& rng);

// Passage through a complex transmissivity t = |t| e^{i phi}: covariance is
// rotated by phi and scaled by |t|^2, the mean phasor is multiplied by t,
// the angle advances by phi (wrapped to (-pi/2, pi/2]).  Throws
// DegenerateInput for a zero input covariance and DomainError for t = 0.
NoiseEllipse propagate_ellipse_closed_form(const NoiseEllipse& input,
                                           std::complex<double> t);

// Draws n_samples noisy sideband amplitudes, multiplies each by the
// closed-form t(Omega), and returns the sample covariance ellipse about the
// sample mean.  Pure amplitude noise in, so the cloud is a line segment
// along t and the fitted angle estimates arg t (mod pi).  Requires
// n_samples >= 1000.
NoiseEllipse ellipse_monte_carlo(const SignalSource& src, const OmitParams& p,
                                 double omega, std::size_t n_samples);

// Photodetector record |a_c + a_s e^{+i Omega t}|^2 plus white Gaussian
// detector noise of the given std.  Throws AliasError unless
// sample_rate > 4 * Omega / (2 pi).
TimeSeries beat_signal(std::complex<double> control, std::complex<double> signal,
                       double omega, double duration, double sample_rate,
                       double detector_noise_sigma, std::uint64_t seed);

// Trapezoidal lock-in over [0, integration_time]:
//   I = (2/T) int s(t) cos(Omega t) dt,  Q = -(2/T) int s(t) sin(Omega t) dt.
// Throws WindowTooShort if T < 10 periods or the record is shorter than T.
LockInResult demodulate(const TimeSeries& series, double omega,
                        double integration_time);

// One row of the simulated measurement sweep.
struct ChainPoint {
    double f_hz;          // probe offset frequency Omega / 2 pi
    double t_abs;         // |t| recovered from the lock-in magnitude
    double phase_rad;     // lock-in phase
    double theta_deg;     // Monte Carlo ellipse angle, degrees
    double theta_err_deg; // ellipse angle minus closed-form rotation angle
};

// Per frequency: synthesize the beat record, demodulate for (|t|, phase),
// and run the ellipse Monte Carlo for the rotation angle.  Grid points are
// processed in parallel with per-index derived seeds.  Requires the grid to
// span at least ten dip linewidths around the mechanical resonance.
std::vector<ChainPoint> full_chain_sweep(const SignalSource& src,
                                         const OmitParams& p,
                                         const std::vector<double>& omega_grid,
                                         std::size_t n_noise_trials,
                                         double detector_noise_sigma = 0.0);

} // namespace omitlab
