#include "omitlab/omit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "omitlab/constants.hpp"
#include "omitlab/errors.hpp"

namespace omitlab {

namespace {

using cplx = std::complex<double>;

double sq(double x) { return x * x; }

// Nearest-branch phase continuation, seeded from the grid end farther from
// the mechanical resonance (where the dip contribution has decayed and the
// principal branch is the physical one).
void unwrap_from_far_end(ComplexResponse& resp, double omega_m) {
    const std::size_t n = resp.omega.size();
    if (n == 0) return;
    const bool seed_front =
        std::abs(resp.omega.front() - omega_m) >= std::abs(resp.omega.back() - omega_m);
    const auto step = [&](std::size_t from, std::size_t to) {
        double ph = std::arg(resp.t[to]);
        while (ph - resp.phase[from] > pi) ph -= 2.0 * pi;
        while (ph - resp.phase[from] < -pi) ph += 2.0 * pi;
        resp.phase[to] = ph;
    };
    if (seed_front) {
        resp.phase[0] = std::arg(resp.t[0]);
        for (std::size_t i = 1; i < n; ++i) step(i - 1, i);
    } else {
        resp.phase[n - 1] = std::arg(resp.t[n - 1]);
        for (std::size_t i = n - 1; i > 0; --i) step(i, i - 1);
    }
}

} // namespace

OmitParams make_omit_params(double gamma1, double gamma2, double g_bar,
                            double gamma_m, double omega_m, double m_eff,
                            double delta) {
    OmitParams p;
    p.gamma1 = gamma1;
    p.gamma2 = gamma2;
    p.gamma = gamma1 + gamma2;
    p.eta_c = gamma1 / (gamma1 + gamma2);
    p.g_bar = g_bar;
    p.gamma_m = gamma_m;
    p.omega_m = omega_m;
    p.delta = delta;
    p.m_eff = m_eff;
    validate(p);
    return p;
}

void validate(const OmitParams& p) {
    if (!(p.gamma1 > 0.0)) throw ValidationError("gamma1 must be > 0");
    if (!(p.gamma2 > 0.0)) throw ValidationError("gamma2 must be > 0");
    if (!(p.gamma_m > 0.0)) throw ValidationError("gamma_m must be > 0");
    if (!(p.omega_m > 0.0)) throw ValidationError("omega_m must be > 0");
    if (!(p.m_eff > 0.0)) throw ValidationError("m_eff must be > 0");
    if (!(p.g_bar >= 0.0)) throw ValidationError("g_bar must be >= 0");
    if (std::abs(p.gamma - (p.gamma1 + p.gamma2)) > 1e-12 * p.gamma)
        throw ValidationError("gamma must equal gamma1 + gamma2");
    if (!(p.eta_c > 0.0 && p.eta_c < 1.0)) throw ValidationError("eta_c out of (0,1)");
}

double optical_damping(const OmitParams& p) {
    return constants.hbar * p.g_bar * p.g_bar / (2.0 * p.m_eff * p.omega_m * p.gamma);
}

double intracavity_photon_number(double power_w, double omega_p, double delta_c,
                                 double gamma1, double gamma) {
    if (!(power_w >= 0.0)) throw DomainError("control power must be >= 0");
    return 2.0 * gamma1 * power_w / (constants.hbar * omega_p) /
           (delta_c * delta_c + gamma * gamma);
}

double intracavity_amplitude(double power_w, double omega_p, double delta_c,
                             double gamma1, double gamma) {
    return std::sqrt(intracavity_photon_number(power_w, omega_p, delta_c, gamma1, gamma));
}

double optical_damping_from_power(double g0, double power_w, double omega_p,
                                  double delta_c, double gamma1, double gamma,
                                  double m_eff, double omega_m) {
    const double nbar = intracavity_photon_number(power_w, omega_p, delta_c, gamma1, gamma);
    return constants.hbar * g0 * g0 / (2.0 * m_eff * omega_m * gamma) * nbar;
}

std::complex<double> effective_susceptibility(const OmitParams& p, double w) {
    const double scale = 2.0 * p.m_eff * p.omega_m;
    return {-scale * (w - p.delta),
            -scale * p.gamma_m - constants.hbar * p.g_bar * p.g_bar / p.gamma};
}

double peak_transmissivity(const OmitParams& p) {
    return 2.0 * std::sqrt(p.eta_c * (1.0 - p.eta_c));
}

std::complex<double> transmissivity(const OmitParams& p, double omega) {
    return peak_transmissivity(p) * normalized_transmissivity(p, omega);
}

std::complex<double> normalized_transmissivity(const OmitParams& p, double omega) {
    const double x = omega - p.omega_m;
    const double g_opt = optical_damping(p);
    return cplx(x, p.gamma_m) / cplx(x, p.gamma_m + g_opt);
}

PhasePair phase_response(const OmitParams& p, double omega) {
    const double x = omega - p.omega_m;
    const double g_opt = optical_damping(p);
    PhasePair out;
    // Angle between (x, gamma_m) and (x, gamma_m + Gamma_opt); both vectors
    // sit in the upper half plane, so the difference is already continuous.
    out.exact = std::atan2(p.gamma_m, x) - std::atan2(p.gamma_m + g_opt, x);
    out.approx = (x == 0.0) ? -pi / 2.0 : -std::atan(g_opt / x);
    return out;
}

double rotation_angle(const OmitParams& p, double omega) {
    const double x = omega - p.omega_m;
    const double g_opt = optical_damping(p);
    return -std::atan(g_opt * x / (x * x + p.gamma_m * g_opt));
}

double rotation_angle_exact(const OmitParams& p, double omega) {
    const double x = omega - p.omega_m;
    const double g_opt = optical_damping(p);
    return -std::atan(g_opt * x / (x * x + p.gamma_m * (p.gamma_m + g_opt)));
}

double group_delay(const OmitParams& p, double omega) {
    const double x = omega - p.omega_m;
    const double g_opt = optical_damping(p);
    const double w = p.gamma_m + g_opt;
    // d/dx [atan2(c, x)] = -c / (x^2 + c^2) applied to both legs of the phase.
    return w / (x * x + w * w) - p.gamma_m / (x * x + p.gamma_m * p.gamma_m);
}

namespace {

// 3x3 complex linear solve by Gaussian elimination with partial pivoting,
// plus a 1-norm condition estimate from the cofactor inverse.
struct Solve3Result {
    cplx x[3];
    double condition;
};

Solve3Result solve3(cplx a[3][3], cplx b[3]) {
    auto norm1 = [](const cplx m[3][3]) {
        double best = 0.0;
        for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int i = 0; i < 3; ++i) s += std::abs(m[i][j]);
            best = std::max(best, s);
        }
        return best;
    };

    // Equilibrate before conditioning: the unknowns mix a displacement with
    // field amplitudes, so the raw entries span tens of decades purely from
    // units.  Scale rows then columns by powers of two (exact in binary) and
    // judge conditioning on the scaled system; a genuinely singular system
    // stays singular under diagonal scaling.
    double col_scale[3] = {1.0, 1.0, 1.0};
    for (int i = 0; i < 3; ++i) {
        double m = 0.0;
        for (int j = 0; j < 3; ++j) m = std::max(m, std::abs(a[i][j]));
        if (m > 0.0) {
            const double s = std::exp2(static_cast<double>(std::ilogb(m)));
            for (int j = 0; j < 3; ++j) a[i][j] /= s;
            b[i] /= s;
        }
    }
    for (int j = 0; j < 3; ++j) {
        double m = 0.0;
        for (int i = 0; i < 3; ++i) m = std::max(m, std::abs(a[i][j]));
        if (m > 0.0) {
            col_scale[j] = std::exp2(static_cast<double>(std::ilogb(m)));
            for (int i = 0; i < 3; ++i) a[i][j] /= col_scale[j];
        }
    }

    cplx orig[3][3];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) orig[i][j] = a[i][j];

    const cplx det = orig[0][0] * (orig[1][1] * orig[2][2] - orig[1][2] * orig[2][1]) -
                     orig[0][1] * (orig[1][0] * orig[2][2] - orig[1][2] * orig[2][0]) +
                     orig[0][2] * (orig[1][0] * orig[2][1] - orig[1][1] * orig[2][0]);
    Solve3Result out;
    if (det == cplx(0.0)) {
        out.condition = std::numeric_limits<double>::infinity();
        return out;
    }
    cplx inv[3][3];
    inv[0][0] = (orig[1][1] * orig[2][2] - orig[1][2] * orig[2][1]) / det;
    inv[0][1] = (orig[0][2] * orig[2][1] - orig[0][1] * orig[2][2]) / det;
    inv[0][2] = (orig[0][1] * orig[1][2] - orig[0][2] * orig[1][1]) / det;
    inv[1][0] = (orig[1][2] * orig[2][0] - orig[1][0] * orig[2][2]) / det;
    inv[1][1] = (orig[0][0] * orig[2][2] - orig[0][2] * orig[2][0]) / det;
    inv[1][2] = (orig[0][2] * orig[1][0] - orig[0][0] * orig[1][2]) / det;
    inv[2][0] = (orig[1][0] * orig[2][1] - orig[1][1] * orig[2][0]) / det;
    inv[2][1] = (orig[0][1] * orig[2][0] - orig[0][0] * orig[2][1]) / det;
    inv[2][2] = (orig[0][0] * orig[1][1] - orig[0][1] * orig[1][0]) / det;
    out.condition = norm1(orig) * norm1(inv);

    // Elimination with partial pivoting on the working copy.
    int perm[3] = {0, 1, 2};
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(a[perm[r]][col]) > std::abs(a[perm[piv]][col])) piv = r;
        std::swap(perm[col], perm[piv]);
        for (int r = col + 1; r < 3; ++r) {
            const cplx factor = a[perm[r]][col] / a[perm[col]][col];
            for (int c = col; c < 3; ++c) a[perm[r]][c] -= factor * a[perm[col]][c];
            b[perm[r]] -= factor * b[perm[col]];
        }
    }
    for (int row = 2; row >= 0; --row) {
        cplx acc = b[perm[row]];
        for (int c = row + 1; c < 3; ++c) acc -= a[perm[row]][c] * out.x[c];
        out.x[row] = acc / a[perm[row]][row];
    }
    for (int j = 0; j < 3; ++j) out.x[j] /= col_scale[j];
    return out;
}

} // namespace

ComplexResponse exact_response_oracle(const OracleParams& p,
                                      const std::vector<double>& omega_grid) {
    ComplexResponse resp;
    resp.omega = omega_grid;
    resp.t.resize(omega_grid.size());
    resp.phase.resize(omega_grid.size());
    resp.magnitude.resize(omega_grid.size());

    const double hbar = constants.hbar;
    for (std::size_t i = 0; i < omega_grid.size(); ++i) {
        const double w = omega_grid[i];
        // Unknowns: mechanical displacement x, upper sideband a(+Omega),
        // counter-rotating lower sideband adagger(-Omega); unit probe drive.
        // Mechanical response m (omega_m^2 - Omega^2 - 2 i gamma_m Omega)
        // with the amplitude-rate convention used throughout.
        const cplx chi = p.m_eff * cplx(p.omega_m * p.omega_m - w * w, -2.0 * p.gamma_m * w);
        cplx a[3][3] = {
            {chi, cplx(hbar * p.g_bar), cplx(hbar * p.g_bar)},
            {cplx(-p.g_bar), cplx(w - p.delta_c, p.gamma), cplx(0.0)},
            {cplx(-p.g_bar), cplx(0.0), cplx(-w - p.delta_c, -p.gamma)}};
        cplx b[3] = {cplx(0.0), cplx(0.0, std::sqrt(2.0 * p.gamma1)), cplx(0.0)};
        Solve3Result sol = solve3(a, b);
        if (!(sol.condition < 1e12))
            throw SingularSystem("two-sideband system ill-conditioned at Omega = " +
                                 std::to_string(w) + " rad/s", sol.condition);
        resp.t[i] = std::sqrt(2.0 * p.gamma2) * sol.x[1];
        resp.magnitude[i] = std::abs(resp.t[i]);
    }

    unwrap_from_far_end(resp, p.omega_m);
    return resp;
}

ComplexResponse sideband_response(const OracleParams& p,
                                  const std::vector<double>& omega_grid) {
    ComplexResponse resp;
    resp.omega = omega_grid;
    resp.t.resize(omega_grid.size());
    resp.phase.resize(omega_grid.size());
    resp.magnitude.resize(omega_grid.size());
    const double drive = std::sqrt(4.0 * p.gamma1 * p.gamma2);
    for (std::size_t i = 0; i < omega_grid.size(); ++i) {
        const double w = omega_grid[i];
        const cplx chi =
            p.m_eff * cplx(p.omega_m * p.omega_m - w * w, -2.0 * p.gamma_m * w);
        const cplx cav(w - p.delta_c, p.gamma);
        resp.t[i] = cplx(0.0, drive) * chi /
                    (chi * cav + constants.hbar * p.g_bar * p.g_bar);
        resp.magnitude[i] = std::abs(resp.t[i]);
    }
    unwrap_from_far_end(resp, p.omega_m);
    return resp;
}

double extract_fwhm(const std::vector<double>& f_hz,
                    const std::vector<double>& tn_squared) {
    if (f_hz.size() != tn_squared.size() || f_hz.size() < 5)
        throw DipNotResolved("need matching grids with at least 5 samples");
    const std::size_t imin =
        std::min_element(tn_squared.begin(), tn_squared.end()) - tn_squared.begin();
    const double level = 0.5 * (1.0 + tn_squared[imin]); // unit off-dip baseline

    auto interp = [&](std::size_t lo, std::size_t hi) {
        // Linear interpolation of the level crossing between two samples.
        const double y0 = tn_squared[lo], y1 = tn_squared[hi];
        return f_hz[lo] + (f_hz[hi] - f_hz[lo]) * (level - y0) / (y1 - y0);
    };

    double left = 0.0, right = 0.0;
    bool found_left = false, found_right = false;
    for (std::size_t j = imin; j-- > 0;) {
        if (tn_squared[j] >= level) {
            left = interp(j, j + 1);
            found_left = true;
            break;
        }
    }
    for (std::size_t j = imin + 1; j < f_hz.size(); ++j) {
        if (tn_squared[j] >= level) {
            right = interp(j, j - 1);
            found_right = true;
            break;
        }
    }
    if (!found_left || !found_right)
        throw DipNotResolved("half-depth crossings not contained in the grid");

    std::size_t inside = 0;
    for (std::size_t j = 0; j < f_hz.size(); ++j)
        if (f_hz[j] > left && f_hz[j] < right) ++inside;
    if (inside < 20)
        throw DipNotResolved("only " + std::to_string(inside) +
                             " samples inside the dip width; need at least 20");
    return right - left;
}

double extract_fwhm(const std::function<double(double)>& tn2,
                    double center_hint_hz, double width_hint_hz) {
    if (!(width_hint_hz > 0.0)) throw DomainError("width hint must be > 0");
    // Golden-section minimization of the dip around the hint.
    double a = center_hint_hz - width_hint_hz;
    double b = center_hint_hz + width_hint_hz;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
    double f1 = tn2(c1), f2 = tn2(c2);
    while (b - a > 1e-9 * width_hint_hz) {
        if (f1 < f2) {
            b = c2; c2 = c1; f2 = f1;
            c1 = b - gr * (b - a); f1 = tn2(c1);
        } else {
            a = c1; c1 = c2; f1 = f2;
            c2 = a + gr * (b - a); f2 = tn2(c2);
        }
    }
    const double fmin = 0.5 * (a + b);
    const double level = 0.5 * (1.0 + tn2(fmin));

    auto cross = [&](double direction) {
        double out = fmin;
        double step = width_hint_hz / 4.0;
        while (tn2(out) < level) out += direction * step;
        double in_f = out - direction * step;
        for (int it = 0; it < 200 && std::abs(out - in_f) > 1e-12 * width_hint_hz; ++it) {
            const double mid = 0.5 * (in_f + out);
            if (tn2(mid) < level) in_f = mid;
            else out = mid;
        }
        return 0.5 * (in_f + out);
    };
    return cross(+1.0) - cross(-1.0);
}

namespace {

// Real 3x3 solve for the fit normal equations.
bool solve3_real(double a[3][3], double b[3], double x[3]) {
    int perm[3] = {0, 1, 2};
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(a[perm[r]][col]) > std::abs(a[perm[piv]][col])) piv = r;
        std::swap(perm[col], perm[piv]);
        if (std::abs(a[perm[col]][col]) < 1e-300) return false;
        for (int r = col + 1; r < 3; ++r) {
            const double factor = a[perm[r]][col] / a[perm[col]][col];
            for (int c = col; c < 3; ++c) a[perm[r]][c] -= factor * a[perm[col]][c];
            b[perm[r]] -= factor * b[perm[col]];
        }
    }
    for (int row = 2; row >= 0; --row) {
        double acc = b[perm[row]];
        for (int c = row + 1; c < 3; ++c) acc -= a[perm[row]][c] * x[c];
        x[row] = acc / a[perm[row]][row];
    }
    return true;
}

double fit_cost(const std::vector<double>& f, const std::vector<double>& y,
                double f0, double fw, double depth) {
    const double q = sq(fw / 2.0);
    double cost = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double u = sq(f[i] - f0);
        cost += sq(y[i] - (1.0 - depth * q / (u + q)));
    }
    return cost;
}

} // namespace

LorentzFit fit_lorentzian(const std::vector<double>& f_hz,
                          const std::vector<double>& samples) {
    const std::size_t n = f_hz.size();
    if (n != samples.size() || n < 50)
        throw DomainError("fit needs at least 50 matching samples");

    // Initialization from the sample minimum and approximate crossings.
    const std::size_t imin =
        std::min_element(samples.begin(), samples.end()) - samples.begin();
    double f0 = f_hz[imin];
    double depth = std::max(1.0 - samples[imin], 1e-9);
    const double level = 1.0 - depth / 2.0;
    double left = f_hz.front(), right = f_hz.back();
    for (std::size_t j = imin; j-- > 0;)
        if (samples[j] >= level) { left = f_hz[j]; break; }
    for (std::size_t j = imin + 1; j < n; ++j)
        if (samples[j] >= level) { right = f_hz[j]; break; }
    double fw = std::max(right - left, (f_hz.back() - f_hz.front()) / static_cast<double>(n));

    double lambda = 1e-3;
    double cost = fit_cost(f_hz, samples, f0, fw, depth);
    int iter = 0;
    bool converged = false;
    for (; iter < 200 && !converged; ++iter) {
        // Accumulate J^T J and J^T r for parameters (f0, fw, depth).
        double jtj[3][3] = {{0}}, jtr[3] = {0};
        const double q = sq(fw / 2.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double df = f_hz[i] - f0;
            const double u = df * df;
            const double den = u + q;
            const double model = 1.0 - depth * q / den;
            const double r = samples[i] - model;
            const double j0 = -2.0 * df * depth * q / sq(den);      // d model / d f0
            const double j1 = -depth * u / sq(den) * (fw / 2.0);    // d model / d fw
            const double j2 = -q / den;                             // d model / d depth
            const double grad[3] = {j0, j1, j2};
            for (int rr = 0; rr < 3; ++rr) {
                jtr[rr] += grad[rr] * r;
                for (int cc = 0; cc < 3; ++cc) jtj[rr][cc] += grad[rr] * grad[cc];
            }
        }
        double damped[3][3];
        for (int rr = 0; rr < 3; ++rr)
            for (int cc = 0; cc < 3; ++cc)
                damped[rr][cc] = jtj[rr][cc] +
                                 (rr == cc ? lambda * (jtj[rr][rr] + 1e-30) : 0.0);
        double rhs[3] = {jtr[0], jtr[1], jtr[2]};
        double step[3];
        if (!solve3_real(damped, rhs, step)) break; // degenerate: flat data
        const double nf0 = f0 + step[0], nfw = fw + step[1], nd = depth + step[2];
        const double ncost = fit_cost(f_hz, samples, nf0, nfw, nd);
        if (ncost <= cost) {
            const double rel = std::abs(step[0]) / std::max(std::abs(f0), 1.0) +
                               std::abs(step[1]) / std::max(std::abs(fw), 1e-12) +
                               std::abs(step[2]) / std::max(std::abs(depth), 1e-12);
            f0 = nf0; fw = nfw; depth = nd;
            const double improvement = cost - ncost;
            cost = ncost;
            lambda = std::max(lambda / 10.0, 1e-15);
            if (rel < 1e-12 || improvement < 1e-18 * (cost + 1e-30)) converged = true;
        } else {
            lambda *= 10.0;
            if (lambda > 1e12) converged = true; // stuck in a flat basin
        }
    }
    fw = std::abs(fw);
    if (!converged && iter >= 200)
        throw NoConvergence("Lorentzian fit did not converge in 200 iterations",
                            iter, f0, fw, depth);
    LorentzFit out;
    out.center_hz = f0;
    out.fwhm_hz = fw;
    out.depth = depth;
    out.rms_residual = std::sqrt(cost / static_cast<double>(n));
    out.iterations = iter;
    out.identifiable = depth > 3.0 * out.rms_residual;
    return out;
}

std::vector<PowerSweepPoint> linewidth_vs_power_sweep(const PowerSweepParams& p,
                                                      const std::vector<double>& powers_w) {
    const double gamma = p.gamma1 + p.gamma2;
    const double delta_c = p.omega_m - p.delta;
    std::vector<PowerSweepPoint> table;
    table.reserve(powers_w.size());
    for (double power : powers_w) {
        if (!(power >= 0.0)) throw DomainError("control power must be >= 0");
        const double g_opt = optical_damping_from_power(p.g0, power, p.omega_p, delta_c,
                                                        p.gamma1, gamma, p.m_eff, p.omega_m);
        const double width = p.gamma_m + g_opt;
        const double center_hz = angular_to_hz(p.omega_m);
        auto tn2 = [&](double f) {
            const double x = hz_to_angular(f) - p.omega_m;
            return (x * x + p.gamma_m * p.gamma_m) / (x * x + width * width);
        };
        double fwhm;
        if (g_opt == 0.0) {
            // Pump off: |t_n| = 1 everywhere and there is no dip to measure.
            // Report the bare mechanical width, the limit the measured width
            // approaches as the power goes to zero.
            fwhm = p.gamma_m / pi;
        } else {
            fwhm = extract_fwhm(tn2, center_hz, std::max(width / pi, 1e-12));
        }
        table.push_back({power, g_opt, fwhm, p.gamma_m / width});
    }
    return table;
}

FeasibilityResult feasibility_bound(double temperature, double q_m, double gamma_opt) {
    if (!(temperature >= 0.0)) throw DomainError("temperature must be >= 0");
    if (!(q_m > 0.0)) throw DomainError("Q_m must be > 0");
    if (!(gamma_opt > 0.0)) throw DomainError("Gamma_opt must be > 0");
    const double thermal = 8.0 * constants.k_B * temperature / q_m;
    const double ratio = thermal / (constants.hbar * gamma_opt);
    return {ratio < 1.0, ratio};
}

double feasibility_threshold(double gamma_opt) {
    return constants.hbar * gamma_opt / (8.0 * constants.k_B);
}

double radiation_pressure_psd(const OmitParams& p, double signal_noise_amplitude) {
    const double force = constants.hbar * p.g_bar * signal_noise_amplitude;
    return 2.0 * p.gamma1 * force * force / (p.gamma * p.gamma * p.gamma_m);
}

} // namespace omitlab
