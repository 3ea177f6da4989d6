#include "omitlab/membrane.hpp"

#include <cmath>
#include <string>

#include "omitlab/constants.hpp"
#include "omitlab/errors.hpp"

namespace omitlab {

void validate(const MembraneConfig& cfg) {
    if (!(cfg.side_length > 0.0)) throw ValidationError("membrane side_length must be > 0");
    if (!(cfg.thickness > 0.0)) throw ValidationError("membrane thickness must be > 0");
    if (!(cfg.density > 0.0)) throw ValidationError("membrane density must be > 0");
    if (!(cfg.omega_m > 0.0)) throw ValidationError("membrane omega_m must be > 0");
    if (!(cfg.q_intrinsic > 0.0)) throw ValidationError("membrane q_intrinsic must be > 0");
    if (cfg.refractive_index.imag() < 0.0)
        throw ValidationError("membrane refractive index must have Im >= 0 (absorptive medium)");
}

void validate(const GasEnvironment& env) {
    if (!(env.pressure >= 0.0)) throw ValidationError("gas pressure must be >= 0");
    if (!(env.temperature > 0.0)) throw ValidationError("gas temperature must be > 0");
    if (!(env.molar_mass > 0.0)) throw ValidationError("gas molar_mass must be > 0");
    if (!(env.flow_ceiling > 0.0)) throw ValidationError("gas flow_ceiling must be > 0");
}

double effective_mass(const MembraneConfig& cfg) {
    // <m> = rho * V * mean(mode^2) with mode sin(pi x/a) sin(pi y/a): mean = 1/4.
    return cfg.density * cfg.side_length * cfg.side_length * cfg.thickness / 4.0;
}

double gas_mean_speed(const GasEnvironment& env) {
    return std::sqrt(3.0 * constants.R_gas * env.temperature / env.molar_mass);
}

double gas_damping_rate(const MembraneConfig& cfg, const GasEnvironment& env) {
    if (env.pressure > env.flow_ceiling)
        throw OutOfValidityRange(
            "gas pressure " + std::to_string(env.pressure) +
            " Pa exceeds the free-molecular-flow ceiling of " +
            std::to_string(env.flow_ceiling) + " Pa");
    return 16.0 * env.pressure / (pi * cfg.density * cfg.thickness * gas_mean_speed(env));
}

double quality_factor(const MembraneConfig& cfg, const GasEnvironment& env) {
    // Algebraically omega_m / (omega_m/q + gamma_gas), arranged so that the
    // vacuum limit returns q_intrinsic without any rounding.
    const double gas_over_wm = gas_damping_rate(cfg, env) / cfg.omega_m;
    return cfg.q_intrinsic / (1.0 + cfg.q_intrinsic * gas_over_wm);
}

double ringdown_q(double f, double tau) {
    if (!(f > 0.0)) throw DomainError("ringdown frequency must be > 0");
    if (!(tau > 0.0)) throw DomainError("ringdown time must be > 0");
    return pi * f * tau;
}

double thermal_force_psd(const MembraneConfig& cfg, const GasEnvironment& env) {
    const double gamma_total = cfg.omega_m / cfg.q_intrinsic + gas_damping_rate(cfg, env);
    return 4.0 * effective_mass(cfg) * gamma_total * constants.k_B * env.temperature;
}

} // namespace omitlab
