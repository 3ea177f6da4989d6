#include "omitlab/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "omitlab/constants.hpp"
#include "omitlab/errors.hpp"
#include "omitlab/io.hpp"

namespace omitlab {

const char* embedded_default_config() {
    return R"ini(# Reference apparatus configuration.
# Units are carried in the key names; internal computation is SI / rad/s.

[cavity]
length_mm = 85
t1_ppm = 245.1
t2_ppm = 16.93
wavelength_nm = 1064
excess_loss_ppm = 18.4
# Membrane offset from the cavity midpoint, in units of the wavelength.
# With the matrix-aligned phase below, lambda/8 is a turning point of the
# dispersion curve (zero coupling); sitting just past it gives a weak slope
# and hence a narrow transparency window (~16 Hz FWHM at 1.3 mW).
membrane_z_lambda = 0.126
# z-origin phase of the dispersion formula arccos(|r_m| cos(4 pi z/lambda + phase)),
# in units of pi; -0.5 aligns the formula to the transfer-matrix geometry.
alignment_phase_pi = -0.5

[membrane]
side_mm = 1
thickness_nm = 50
density_kg_m3 = 3100
index_re = 2
index_im = 2.5e-5
frequency_khz = 402.7
q_intrinsic = 1.5e6

[gas]
pressure_mbar = 1e-6
temperature_k = 293
molar_mass_g_mol = 28.97
flow_ceiling_mbar = 1e-2

[control]
power_mw = 1.3
delta_hz = 0

[sweep]
start_hz = 402550
stop_hz = 402850
points = 301
min_step_hz = 0.25

[noise]
drive_amplitude_v = 1
modulation_index_mrad_v = 15
amplitude_noise_sigma = 0.1
detector_noise_sigma = 0
seed = 20260823
mc_samples = 100000

[output]
path = out
format = csv
)ini";
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

struct RawConfig {
    // section.key -> (value text, line number)
    std::map<std::string, std::pair<std::string, int>> entries;
};

RawConfig tokenize(const std::string& text) {
    RawConfig raw;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find_first_of("#;");
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ParseError("unterminated section header", lineno);
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) throw ParseError("empty section name", lineno);
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("expected key = value", lineno);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ParseError("empty key", lineno);
        if (value.empty()) throw ParseError("empty value for key '" + key + "'", lineno);
        if (section.empty())
            throw ParseError("key '" + key + "' outside any section", lineno);
        const std::string full = section + "." + key;
        if (!raw.entries.emplace(full, std::make_pair(value, lineno)).second)
            throw ParseError("duplicate key '" + full + "'", lineno);
    }
    return raw;
}

class Reader {
public:
    explicit Reader(RawConfig raw) : raw_(std::move(raw)) {}

    double number(const std::string& key) {
        const auto& [text, line] = take(key);
        try {
            std::size_t used = 0;
            const double v = std::stod(text, &used);
            if (used != text.size()) throw std::invalid_argument(text);
            return v;
        } catch (const std::exception&) {
            throw ParseError("key '" + key + "' is not a number: '" + text + "'", line);
        }
    }

    std::uint64_t unsigned_integer(const std::string& key) {
        const auto& [text, line] = take(key);
        try {
            std::size_t used = 0;
            const unsigned long long v = std::stoull(text, &used);
            if (used != text.size()) throw std::invalid_argument(text);
            return v;
        } catch (const std::exception&) {
            throw ParseError("key '" + key + "' is not a non-negative integer: '" +
                             text + "'", line);
        }
    }

    std::string string(const std::string& key) { return take(key).first; }

    void finish() const {
        for (const auto& [key, value] : raw_.entries) {
            if (!consumed_.count(key))
                throw ParseError("unknown key '" + key + "'", value.second);
        }
    }

private:
    const std::pair<std::string, int>& take(const std::string& key) {
        const auto it = raw_.entries.find(key);
        if (it == raw_.entries.end())
            throw ParseError("missing required key '" + key + "'", 0);
        consumed_.insert(key);
        return it->second;
    }

    RawConfig raw_;
    std::set<std::string> consumed_;
};

} // namespace

RunConfig parse_config(const std::string& text) {
    Reader r(tokenize(text));
    RunConfig cfg;

    cfg.cavity.length = 1e-3 * r.number("cavity.length_mm");
    cfg.cavity.t1 = ppm_to_fraction(r.number("cavity.t1_ppm"));
    cfg.cavity.t2 = ppm_to_fraction(r.number("cavity.t2_ppm"));
    cfg.cavity.wavelength = 1e-9 * r.number("cavity.wavelength_nm");
    cfg.cavity.excess_loss = ppm_to_fraction(r.number("cavity.excess_loss_ppm"));
    cfg.membrane_z = r.number("cavity.membrane_z_lambda") * cfg.cavity.wavelength;
    cfg.alignment_phase = r.number("cavity.alignment_phase_pi") * pi;

    cfg.membrane.side_length = 1e-3 * r.number("membrane.side_mm");
    cfg.membrane.thickness = 1e-9 * r.number("membrane.thickness_nm");
    cfg.membrane.density = r.number("membrane.density_kg_m3");
    cfg.membrane.refractive_index = {r.number("membrane.index_re"),
                                     r.number("membrane.index_im")};
    cfg.membrane.omega_m = hz_to_angular(1e3 * r.number("membrane.frequency_khz"));
    cfg.membrane.q_intrinsic = r.number("membrane.q_intrinsic");

    cfg.gas.pressure = mbar_to_pa(r.number("gas.pressure_mbar"));
    cfg.gas.temperature = r.number("gas.temperature_k");
    cfg.gas.molar_mass = 1e-3 * r.number("gas.molar_mass_g_mol");
    cfg.gas.flow_ceiling = mbar_to_pa(r.number("gas.flow_ceiling_mbar"));

    cfg.control.power_w = 1e-3 * r.number("control.power_mw");
    cfg.control.delta = hz_to_angular(r.number("control.delta_hz"));

    cfg.sweep.start_hz = r.number("sweep.start_hz");
    cfg.sweep.stop_hz = r.number("sweep.stop_hz");
    cfg.sweep.points = static_cast<int>(r.number("sweep.points"));
    cfg.sweep.min_step_hz = r.number("sweep.min_step_hz");

    cfg.noise.drive_amplitude = r.number("noise.drive_amplitude_v");
    cfg.noise.modulation_index = 1e-3 * r.number("noise.modulation_index_mrad_v");
    cfg.noise.drive_frequency = cfg.membrane.omega_m;
    cfg.noise.amplitude_noise_sigma = r.number("noise.amplitude_noise_sigma");
    cfg.noise.seed = r.unsigned_integer("noise.seed");
    cfg.detector_noise_sigma = r.number("noise.detector_noise_sigma");
    cfg.mc_samples = static_cast<std::size_t>(r.unsigned_integer("noise.mc_samples"));

    cfg.output.path = r.string("output.path");
    cfg.output.format = r.string("output.format");

    r.finish();
    validate(cfg);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ParseError("cannot open config file: " + path, 0);
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_config(buf.str());
}

RunConfig default_config() { return parse_config(embedded_default_config()); }

void validate(const RunConfig& cfg) {
    validate(cfg.cavity);
    validate(cfg.membrane);
    validate(cfg.gas);
    validate(cfg.noise);
    if (!(cfg.control.power_w >= 0.0))
        throw ValidationError("control power must be >= 0");
    if (!(cfg.sweep.points >= 2)) throw ValidationError("sweep.points must be >= 2");
    if (!(cfg.sweep.stop_hz > cfg.sweep.start_hz))
        throw ValidationError("sweep.stop_hz must exceed sweep.start_hz");
    if (!(cfg.sweep.min_step_hz > 0.0))
        throw ValidationError("sweep.min_step_hz must be > 0");
    if (!(std::abs(cfg.membrane_z) < cfg.cavity.length / 2.0))
        throw ValidationError("membrane position must lie strictly inside the cavity");
    if (!(cfg.detector_noise_sigma >= 0.0))
        throw ValidationError("detector_noise_sigma must be >= 0");
    if (cfg.mc_samples < 1000)
        throw ValidationError("mc_samples must be >= 1000");
    if (cfg.output.format != "csv" && cfg.output.format != "json")
        throw ValidationError("output.format must be 'csv' or 'json'");
    if (cfg.output.path.empty()) throw ValidationError("output.path must be non-empty");
}

std::vector<std::string> config_warnings(const RunConfig& cfg) {
    std::vector<std::string> w = config_warnings(cfg.cavity);
    for (auto& s : signal_warnings(cfg.noise)) w.push_back(s);
    return w;
}

std::string canonical_config_text(const RunConfig& cfg) {
    std::string out;
    const auto put = [&](const char* key, double v) {
        out += key;
        out += '=';
        out += format_double(v);
        out += '\n';
    };
    put("cavity.length", cfg.cavity.length);
    put("cavity.t1", cfg.cavity.t1);
    put("cavity.t2", cfg.cavity.t2);
    put("cavity.wavelength", cfg.cavity.wavelength);
    put("cavity.excess_loss", cfg.cavity.excess_loss);
    put("cavity.membrane_z", cfg.membrane_z);
    put("cavity.alignment_phase", cfg.alignment_phase);
    put("membrane.side_length", cfg.membrane.side_length);
    put("membrane.thickness", cfg.membrane.thickness);
    put("membrane.density", cfg.membrane.density);
    put("membrane.index_re", cfg.membrane.refractive_index.real());
    put("membrane.index_im", cfg.membrane.refractive_index.imag());
    put("membrane.omega_m", cfg.membrane.omega_m);
    put("membrane.q_intrinsic", cfg.membrane.q_intrinsic);
    put("gas.pressure", cfg.gas.pressure);
    put("gas.temperature", cfg.gas.temperature);
    put("gas.molar_mass", cfg.gas.molar_mass);
    put("gas.flow_ceiling", cfg.gas.flow_ceiling);
    put("control.power", cfg.control.power_w);
    put("control.delta", cfg.control.delta);
    put("sweep.start_hz", cfg.sweep.start_hz);
    put("sweep.stop_hz", cfg.sweep.stop_hz);
    put("sweep.points", cfg.sweep.points);
    put("sweep.min_step_hz", cfg.sweep.min_step_hz);
    put("noise.drive_amplitude", cfg.noise.drive_amplitude);
    put("noise.modulation_index", cfg.noise.modulation_index);
    put("noise.amplitude_noise_sigma", cfg.noise.amplitude_noise_sigma);
    put("noise.detector_noise_sigma", cfg.detector_noise_sigma);
    out += "noise.seed=" + std::to_string(cfg.noise.seed) + "\n";
    out += "noise.mc_samples=" + std::to_string(cfg.mc_samples) + "\n";
    // The output directory is deliberately not hashed: it changes where the
    // files land, never what the numbers are, and re-runs into different
    // directories must stay byte-identical.
    out += "output.format=" + cfg.output.format + "\n";
    return out;
}

OmitParams omit_params_from(const RunConfig& cfg) {
    const CouplingRates rates = mirror_coupling_rates(cfg.cavity);
    const MembraneOptics slab =
        membrane_slab_optics(cfg.membrane, cfg.cavity.wavelength);
    const double g0 = coupling_constant(cfg.membrane_z, std::abs(slab.r_m),
                                        cfg.cavity, cfg.alignment_phase);
    const double gamma = rates.gamma1 + rates.gamma2;
    const double omega_p = hz_to_angular(constants.c / cfg.cavity.wavelength);
    const double delta_c = cfg.membrane.omega_m - cfg.control.delta;
    const double nbar = intracavity_photon_number(cfg.control.power_w, omega_p,
                                                  delta_c, rates.gamma1, gamma);
    // Total mechanical Q including gas damping, then converted to the
    // amplitude-rate convention used by the response formulas.
    const double q_total = quality_factor(cfg.membrane, cfg.gas);
    const double gamma_m = cfg.membrane.omega_m / (2.0 * q_total);
    return make_omit_params(rates.gamma1, rates.gamma2, g0 * std::sqrt(nbar),
                            gamma_m, cfg.membrane.omega_m,
                            effective_mass(cfg.membrane), cfg.control.delta);
}

OracleParams oracle_params_from(const RunConfig& cfg) {
    const OmitParams p = omit_params_from(cfg);
    OracleParams o;
    o.gamma1 = p.gamma1;
    o.gamma2 = p.gamma2;
    o.gamma = p.gamma;
    o.g_bar = p.g_bar;
    o.m_eff = p.m_eff;
    o.omega_m = p.omega_m;
    o.gamma_m = p.gamma_m;
    o.delta_c = p.omega_m - p.delta;
    return o;
}

} // namespace omitlab
