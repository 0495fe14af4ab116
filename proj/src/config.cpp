#include "pwsim/config.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace pwsim {

using nlohmann::json;

std::string to_string(ScenarioKind kind) {
    switch (kind) {
        case ScenarioKind::free_particle: return "free_particle";
        case ScenarioKind::pauli_spin: return "pauli_spin";
        case ScenarioKind::free_field_modes: return "free_field_modes";
        case ScenarioKind::coupled_qed_toy: return "coupled_qed_toy";
        case ScenarioKind::measurement: return "measurement";
    }
    return "unknown";
}

namespace {

struct Parser {
    std::vector<std::string>& errors;

    void err(const std::string& path, const std::string& msg) {
        errors.push_back(path + ": " + msg);
    }

    bool object(const json& j, const std::string& path) {
        if (!j.is_object()) {
            err(path, "expected an object");
            return false;
        }
        return true;
    }

    void known_keys(const json& j, const std::string& path,
                    std::initializer_list<const char*> allowed) {
        for (auto it = j.begin(); it != j.end(); ++it) {
            bool ok = false;
            for (const char* k : allowed)
                if (it.key() == k) ok = true;
            if (!ok) err(path, "unknown key '" + it.key() + "'");
        }
    }

    std::optional<double> number(const json& j, const std::string& path, const char* key,
                                 bool required = false) {
        if (!j.contains(key)) {
            if (required) err(path + "." + key, "required field missing");
            return std::nullopt;
        }
        const json& v = j.at(key);
        if (!v.is_number()) {
            err(path + "." + key, "expected a number");
            return std::nullopt;
        }
        return v.get<double>();
    }

    std::optional<std::size_t> index(const json& j, const std::string& path, const char* key,
                                     bool required = false) {
        if (!j.contains(key)) {
            if (required) err(path + "." + key, "required field missing");
            return std::nullopt;
        }
        const json& v = j.at(key);
        if (!v.is_number_integer() || v.get<long long>() < 0) {
            err(path + "." + key, "expected a non-negative integer");
            return std::nullopt;
        }
        return v.get<std::size_t>();
    }

    std::optional<bool> boolean(const json& j, const std::string& path, const char* key) {
        if (!j.contains(key)) return std::nullopt;
        const json& v = j.at(key);
        if (!v.is_boolean()) {
            err(path + "." + key, "expected a boolean");
            return std::nullopt;
        }
        return v.get<bool>();
    }

    std::optional<std::string> text(const json& j, const std::string& path, const char* key,
                                    bool required = false) {
        if (!j.contains(key)) {
            if (required) err(path + "." + key, "required field missing");
            return std::nullopt;
        }
        const json& v = j.at(key);
        if (!v.is_string()) {
            err(path + "." + key, "expected a string");
            return std::nullopt;
        }
        return v.get<std::string>();
    }

    std::vector<double> number_list(const json& j, const std::string& path, const char* key) {
        std::vector<double> out;
        if (!j.contains(key)) return out;
        const json& v = j.at(key);
        if (!v.is_array()) {
            err(path + "." + key, "expected an array of numbers");
            return out;
        }
        for (const json& x : v) {
            if (!x.is_number()) {
                err(path + "." + key, "expected an array of numbers");
                return {};
            }
            out.push_back(x.get<double>());
        }
        return out;
    }

    std::optional<std::array<double, 3>> vec3(const json& j, const std::string& path,
                                              const char* key) {
        if (!j.contains(key)) return std::nullopt;
        const std::vector<double> v = number_list(j, path, key);
        if (v.size() != 3) {
            err(path + "." + key, "expected exactly 3 components");
            return std::nullopt;
        }
        return std::array<double, 3>{v[0], v[1], v[2]};
    }
};

void parse_grid(Parser& p, const json& j, GridConfig& grid) {
    if (!p.object(j, "grid")) return;
    p.known_keys(j, "grid", {"axes", "boundary"});
    if (auto b = p.text(j, "grid", "boundary")) {
        if (*b == "periodic")
            grid.boundary = Boundary::periodic;
        else if (*b == "reflecting")
            grid.boundary = Boundary::reflecting;
        else
            p.err("grid.boundary", "must be 'periodic' or 'reflecting'");
    }
    if (!j.contains("axes") || !j.at("axes").is_array() || j.at("axes").empty()) {
        p.err("grid.axes", "required non-empty array");
        return;
    }
    std::size_t i = 0;
    for (const json& a : j.at("axes")) {
        const std::string path = "grid.axes[" + std::to_string(i) + "]";
        if (!p.object(a, path)) continue;
        p.known_keys(a, path, {"min", "max", "points"});
        AxisSpec ax;
        if (auto v = p.number(a, path, "min", true)) ax.min = *v;
        if (auto v = p.number(a, path, "max", true)) ax.max = *v;
        if (auto v = p.index(a, path, "points", true)) ax.points = *v;
        if (!(ax.min < ax.max)) p.err(path, "min must be < max");
        if (ax.points < ConfigurationGrid::kMinPointsPerAxis)
            p.err(path + ".points",
                  "must be >= " + std::to_string(ConfigurationGrid::kMinPointsPerAxis));
        grid.axes.push_back(ax);
        ++i;
    }
}

void parse_run(Parser& p, const json& j, RunConfig& run) {
    if (!p.object(j, "run")) return;
    p.known_keys(j, "run", {"dt", "steps", "snapshot_stride", "checkpoint_step"});
    if (auto v = p.number(j, "run", "dt", true)) {
        run.dt = *v;
        if (!(run.dt > 0.0)) p.err("run.dt", "must be > 0");
    }
    if (auto v = p.index(j, "run", "steps", true)) {
        run.steps = *v;
        if (run.steps == 0) p.err("run.steps", "must be >= 1");
    }
    if (auto v = p.index(j, "run", "snapshot_stride")) {
        run.snapshot_stride = *v;
        if (run.snapshot_stride == 0) p.err("run.snapshot_stride", "must be >= 1");
    }
    if (auto v = p.index(j, "run", "checkpoint_step")) {
        run.checkpoint_step = *v;
        if (*v == 0 || *v >= run.steps)
            p.err("run.checkpoint_step", "must be inside (0, steps)");
    }
}

void parse_ensemble(Parser& p, const json& j, EnsembleConfig& e) {
    if (!p.object(j, "ensemble")) return;
    p.known_keys(j, "ensemble", {"n", "seed", "method"});
    if (auto v = p.index(j, "ensemble", "n", true)) e.n = *v;
    if (auto v = p.index(j, "ensemble", "seed")) e.seed = *v;
    if (auto v = p.text(j, "ensemble", "method")) {
        e.method = *v;
        if (e.method != "auto" && e.method != "rejection" && e.method != "metropolis")
            p.err("ensemble.method", "must be 'auto', 'rejection' or 'metropolis'");
    }
}

void parse_initial_state(Parser& p, const json& j, InitialStateConfig& s) {
    if (!p.object(j, "initial_state")) return;
    p.known_keys(j, "initial_state",
                 {"kind", "centers", "widths", "momenta", "label_amplitudes"});
    if (auto v = p.text(j, "initial_state", "kind")) {
        s.kind = *v;
        if (s.kind != "gaussian" && s.kind != "coherent")
            p.err("initial_state.kind", "must be 'gaussian' or 'coherent'");
    }
    s.centers = p.number_list(j, "initial_state", "centers");
    s.widths = p.number_list(j, "initial_state", "widths");
    s.momenta = p.number_list(j, "initial_state", "momenta");
    for (double w : s.widths)
        if (!(w > 0.0)) p.err("initial_state.widths", "entries must be > 0");
    if (j.contains("label_amplitudes")) {
        const json& v = j.at("label_amplitudes");
        s.label_amplitudes.clear();
        bool ok = v.is_array() && !v.empty();
        if (ok) {
            for (const json& c : v) {
                if (!c.is_array() || c.size() != 2 || !c[0].is_number() || !c[1].is_number()) {
                    ok = false;
                    break;
                }
                s.label_amplitudes.emplace_back(c[0].get<double>(), c[1].get<double>());
            }
        }
        if (!ok) {
            p.err("initial_state.label_amplitudes", "expected a non-empty array of [re, im] pairs");
            s.label_amplitudes = {Complex{1.0, 0.0}};
        }
    }
}

void parse_hamiltonian(Parser& p, const json& j, ScenarioConfig& c) {
    if (!p.object(j, "hamiltonian")) return;
    const std::string path = "hamiltonian";
    switch (c.kind) {
        case ScenarioKind::free_particle: {
            p.known_keys(j, path, {"mass"});
            if (auto v = p.number(j, path, "mass")) {
                c.free_particle.mass = *v;
                if (!(*v > 0.0)) p.err(path + ".mass", "must be > 0");
            }
            break;
        }
        case ScenarioKind::pauli_spin: {
            p.known_keys(j, path, {"mass", "mu", "charge", "b_field", "a_field"});
            if (auto v = p.number(j, path, "mass")) {
                c.pauli.mass = *v;
                if (!(*v > 0.0)) p.err(path + ".mass", "must be > 0");
            }
            if (auto v = p.number(j, path, "mu")) c.pauli.mu = *v;
            if (auto v = p.number(j, path, "charge")) c.pauli.charge = *v;
            if (auto v = p.vec3(j, path, "b_field")) c.pauli.b_field = *v;
            if (auto v = p.vec3(j, path, "a_field")) c.pauli.a_field = *v;
            break;
        }
        case ScenarioKind::free_field_modes:
        case ScenarioKind::coupled_qed_toy: {
            if (c.kind == ScenarioKind::free_field_modes)
                p.known_keys(j, path, {"k_list", "retain"});
            else
                p.known_keys(j, path,
                             {"k_list", "retain", "coupling_strength", "coupled_mode",
                              "level_energies"});
            if (!j.contains("k_list") || !j.at("k_list").is_array() || j.at("k_list").empty()) {
                p.err(path + ".k_list", "required non-empty array of 3-vectors");
            } else {
                std::size_t i = 0;
                for (const json& k : j.at("k_list")) {
                    if (!k.is_array() || k.size() != 3 || !k[0].is_number() || !k[1].is_number() ||
                        !k[2].is_number()) {
                        p.err(path + ".k_list[" + std::to_string(i) + "]",
                              "expected a 3-vector of numbers");
                        continue;
                    }
                    c.modes.k_list.push_back(
                        {k[0].get<double>(), k[1].get<double>(), k[2].get<double>()});
                    ++i;
                }
            }
            if (j.contains("retain")) {
                const json& r = j.at("retain");
                if (!r.is_array()) {
                    p.err(path + ".retain", "expected an array of mode indices");
                } else {
                    for (const json& x : r) {
                        if (!x.is_number_integer() || x.get<long long>() < 0) {
                            p.err(path + ".retain", "expected non-negative integer indices");
                            break;
                        }
                        c.modes.retain.push_back(x.get<std::size_t>());
                    }
                }
            }
            if (c.kind == ScenarioKind::coupled_qed_toy) {
                if (auto v = p.number(j, path, "coupling_strength"))
                    c.coupled.coupling_strength = *v;
                if (auto v = p.index(j, path, "coupled_mode")) c.coupled.coupled_mode = *v;
                c.coupled.level_energies = p.number_list(j, path, "level_energies");
                if (c.coupled.level_energies.empty())
                    p.err(path + ".level_energies", "required non-empty array");
            }
            break;
        }
        case ScenarioKind::measurement: {
            p.known_keys(j, path, {"levels", "coupling", "pointer_mass"});
            if (auto v = p.index(j, path, "levels", true)) {
                c.measurement.levels = *v;
                if (*v == 0 || *v > 4) p.err(path + ".levels", "must be in 1..4");
            }
            if (auto v = p.number(j, path, "coupling", true)) c.measurement.coupling = *v;
            if (auto v = p.number(j, path, "pointer_mass")) {
                c.measurement.pointer_mass = *v;
                if (!(*v > 0.0)) p.err(path + ".pointer_mass", "must be > 0");
            }
            break;
        }
    }
}

void parse_collapse(Parser& p, const json& j, CollapseConfig& cc) {
    if (!p.object(j, "collapse")) return;
    p.known_keys(j, "collapse", {"enabled", "threshold"});
    if (auto v = p.boolean(j, "collapse", "enabled")) cc.enabled = *v;
    if (auto v = p.number(j, "collapse", "threshold")) {
        cc.threshold = *v;
        if (!(*v > 0.0)) p.err("collapse.threshold", "must be > 0");
    }
}

void parse_analyses(Parser& p, const json& j, ScenarioConfig& c) {
    if (!p.object(j, "analyses")) return;
    p.known_keys(j, "analyses", {"equivariance", "born", "ehrenfest", "field_samples"});
    if (j.contains("equivariance")) {
        const json& a = j.at("equivariance");
        if (p.object(a, "analyses.equivariance")) {
            p.known_keys(a, "analyses.equivariance",
                         {"enabled", "ks_critical", "velocity_scale", "expect"});
            if (auto v = p.boolean(a, "analyses.equivariance", "enabled"))
                c.equivariance.enabled = *v;
            if (auto v = p.number(a, "analyses.equivariance", "ks_critical")) {
                c.equivariance.ks_critical = *v;
                if (!(*v > 0.0)) p.err("analyses.equivariance.ks_critical", "must be > 0");
            }
            if (auto v = p.number(a, "analyses.equivariance", "velocity_scale"))
                c.equivariance.velocity_scale = *v;
            if (auto v = p.text(a, "analyses.equivariance", "expect")) {
                c.equivariance.expect = *v;
                if (*v != "pass" && *v != "fail")
                    p.err("analyses.equivariance.expect", "must be 'pass' or 'fail'");
            }
        }
    }
    if (j.contains("born")) {
        const json& a = j.at("born");
        if (p.object(a, "analyses.born")) {
            p.known_keys(a, "analyses.born", {"enabled", "expected_fractions", "tolerance_sigmas"});
            if (auto v = p.boolean(a, "analyses.born", "enabled")) c.born.enabled = *v;
            c.born.expected_fractions = p.number_list(a, "analyses.born", "expected_fractions");
            if (auto v = p.number(a, "analyses.born", "tolerance_sigmas")) {
                c.born.tolerance_sigmas = *v;
                if (!(*v > 0.0)) p.err("analyses.born.tolerance_sigmas", "must be > 0");
            }
            if (!c.born.expected_fractions.empty()) {
                double sum = 0.0;
                for (double f : c.born.expected_fractions) {
                    sum += f;
                    if (f < 0.0 || f > 1.0)
                        p.err("analyses.born.expected_fractions", "entries must lie in [0, 1]");
                }
                if (std::abs(sum - 1.0) > 1e-9)
                    p.err("analyses.born.expected_fractions", "must sum to 1");
            }
        }
    }
    if (j.contains("ehrenfest")) {
        const json& a = j.at("ehrenfest");
        if (p.object(a, "analyses.ehrenfest")) {
            p.known_keys(a, "analyses.ehrenfest", {"enabled", "time"});
            if (auto v = p.boolean(a, "analyses.ehrenfest", "enabled")) c.ehrenfest.enabled = *v;
            if (auto v = p.number(a, "analyses.ehrenfest", "time")) c.ehrenfest.time = *v;
        }
    }
    if (j.contains("field_samples")) {
        const json& a = j.at("field_samples");
        if (p.object(a, "analyses.field_samples")) {
            p.known_keys(a, "analyses.field_samples", {"enabled", "points", "trajectory_index"});
            if (auto v = p.boolean(a, "analyses.field_samples", "enabled"))
                c.field_samples.enabled = *v;
            if (auto v = p.index(a, "analyses.field_samples", "trajectory_index"))
                c.field_samples.trajectory_index = *v;
            if (a.contains("points")) {
                const json& pts = a.at("points");
                if (!pts.is_array()) {
                    p.err("analyses.field_samples.points", "expected an array of 3-vectors");
                } else {
                    for (const json& x : pts) {
                        if (!x.is_array() || x.size() != 3) {
                            p.err("analyses.field_samples.points", "expected 3-vectors");
                            break;
                        }
                        c.field_samples.points.push_back(
                            {x[0].get<double>(), x[1].get<double>(), x[2].get<double>()});
                    }
                }
            }
        }
    }
}

void parse_output(Parser& p, const json& j, OutputConfig& o) {
    if (!p.object(j, "output")) return;
    p.known_keys(j, "output", {"directory", "trajectories", "fields", "trajectory_stride"});
    if (auto v = p.text(j, "output", "directory")) o.directory = *v;
    if (auto v = p.boolean(j, "output", "trajectories")) o.trajectories = *v;
    if (auto v = p.boolean(j, "output", "fields")) o.fields = *v;
    if (auto v = p.index(j, "output", "trajectory_stride")) {
        o.trajectory_stride = *v;
        if (*v == 0) p.err("output.trajectory_stride", "must be >= 1");
    }
}

void cross_validate(Parser& p, ScenarioConfig& c) {
    const std::size_t labels = c.initial_state.label_amplitudes.size();
    const std::size_t dims = c.grid.axes.size();

    if (c.initial_state.kind == "gaussian") {
        if (c.initial_state.centers.size() != dims)
            p.err("initial_state.centers", "need one entry per grid axis");
        if (c.initial_state.widths.size() != dims)
            p.err("initial_state.widths", "need one entry per grid axis");
    } else {  // coherent: widths derived from mode frequencies
        if (c.kind != ScenarioKind::free_field_modes && c.kind != ScenarioKind::coupled_qed_toy)
            p.err("initial_state.kind", "'coherent' requires a mode scenario");
        if (c.initial_state.centers.size() != dims)
            p.err("initial_state.centers", "need one entry per grid axis");
        if (!c.initial_state.widths.empty())
            p.err("initial_state.widths", "'coherent' derives widths from mode frequencies");
    }
    if (!c.initial_state.momenta.empty() && c.initial_state.momenta.size() != dims)
        p.err("initial_state.momenta", "need one entry per grid axis (or omit)");

    switch (c.kind) {
        case ScenarioKind::free_particle:
            if (labels != 1) p.err("initial_state.label_amplitudes", "free_particle uses 1 label");
            break;
        case ScenarioKind::pauli_spin:
            if (labels != 2) p.err("initial_state.label_amplitudes", "pauli_spin uses 2 labels");
            if (dims > 3) p.err("grid.axes", "pauli_spin grids are 1-D to 3-D");
            break;
        case ScenarioKind::free_field_modes:
            if (labels != 1)
                p.err("initial_state.label_amplitudes", "free_field_modes uses 1 label");
            break;
        case ScenarioKind::coupled_qed_toy:
            if (!c.coupled.level_energies.empty() && c.coupled.level_energies.size() != labels)
                p.err("hamiltonian.level_energies", "need one entry per label amplitude");
            break;
        case ScenarioKind::measurement:
            if (labels != c.measurement.levels)
                p.err("initial_state.label_amplitudes", "need one amplitude per level");
            if (dims != 1) p.err("grid.axes", "measurement uses a 1-D pointer grid");
            break;
    }

    if (c.kind == ScenarioKind::free_field_modes || c.kind == ScenarioKind::coupled_qed_toy) {
        const std::size_t full = 4 * c.modes.k_list.size();
        std::size_t real_modes = c.modes.retain.empty() ? full : c.modes.retain.size();
        for (std::size_t r : c.modes.retain)
            if (r >= full) p.err("hamiltonian.retain", "index exceeds the expanded mode count");
        if (!c.modes.k_list.empty() && real_modes != dims)
            p.err("grid.axes", "need one axis per retained real mode (" +
                                   std::to_string(real_modes) + ")");
        if (c.kind == ScenarioKind::coupled_qed_toy && c.coupled.coupled_mode >= real_modes)
            p.err("hamiltonian.coupled_mode", "index exceeds the retained mode count");
    }

    if ((c.equivariance.enabled || c.born.enabled) && c.ensemble.n == 0)
        p.err("ensemble.n", "equivariance/born analyses need an ensemble");
    if (c.born.enabled && !c.born.expected_fractions.empty() &&
        c.born.expected_fractions.size() != labels)
        p.err("analyses.born.expected_fractions", "need one entry per branch/label");
    if (c.born.enabled && !c.collapse.enabled)
        p.err("analyses.born", "requires collapse.enabled = true (branch decomposition)");
    if (c.ehrenfest.enabled) {
        if (c.kind != ScenarioKind::free_field_modes && c.kind != ScenarioKind::coupled_qed_toy)
            p.err("analyses.ehrenfest", "requires a mode scenario");
        const double t_end = c.run.dt * static_cast<double>(c.run.steps);
        if (c.ehrenfest.time <= 0.0 || c.ehrenfest.time >= t_end)
            p.err("analyses.ehrenfest.time", "must lie strictly inside (0, dt*steps)");
    }
    if (c.field_samples.enabled) {
        if (c.field_samples.points.empty())
            p.err("analyses.field_samples.points", "required when enabled");
        if (c.kind != ScenarioKind::free_field_modes && c.kind != ScenarioKind::coupled_qed_toy)
            p.err("analyses.field_samples", "requires a mode scenario");
    }
}

}  // namespace

ParseResult parse_config_text(const std::string& json_text) {
    ParseResult result;
    json root = json::parse(json_text, nullptr, false);
    if (root.is_discarded()) {
        result.errors.push_back("config: malformed JSON");
        return result;
    }
    Parser p{result.errors};
    if (!p.object(root, "config")) return result;

    ScenarioConfig c;
    p.known_keys(root, "config",
                 {"name", "scenario", "grid", "run", "ensemble", "initial_state", "hamiltonian",
                  "collapse", "analyses", "output"});
    if (auto v = p.text(root, "config", "name")) c.name = *v;
    if (auto v = p.text(root, "config", "scenario", true)) {
        if (*v == "free_particle")
            c.kind = ScenarioKind::free_particle;
        else if (*v == "pauli_spin")
            c.kind = ScenarioKind::pauli_spin;
        else if (*v == "free_field_modes")
            c.kind = ScenarioKind::free_field_modes;
        else if (*v == "coupled_qed_toy")
            c.kind = ScenarioKind::coupled_qed_toy;
        else if (*v == "measurement")
            c.kind = ScenarioKind::measurement;
        else
            p.err("config.scenario",
                  "must be one of free_particle, pauli_spin, free_field_modes, coupled_qed_toy, "
                  "measurement");
    }

    if (root.contains("grid"))
        parse_grid(p, root.at("grid"), c.grid);
    else
        p.err("grid", "required section missing");
    if (root.contains("run"))
        parse_run(p, root.at("run"), c.run);
    else
        p.err("run", "required section missing");
    if (root.contains("ensemble")) parse_ensemble(p, root.at("ensemble"), c.ensemble);
    if (root.contains("initial_state")) parse_initial_state(p, root.at("initial_state"), c.initial_state);
    if (root.contains("hamiltonian"))
        parse_hamiltonian(p, root.at("hamiltonian"), c);
    else if (c.kind != ScenarioKind::free_particle)
        p.err("hamiltonian", "required section missing");
    if (root.contains("collapse")) parse_collapse(p, root.at("collapse"), c.collapse);
    if (root.contains("analyses")) parse_analyses(p, root.at("analyses"), c);
    if (root.contains("output")) parse_output(p, root.at("output"), c.output);

    if (result.errors.empty()) cross_validate(p, c);
    if (result.errors.empty()) result.config = std::move(c);
    return result;
}

ParseResult parse_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) {
        ParseResult r;
        r.errors.push_back("config: cannot open " + path.string());
        return r;
    }
    std::ostringstream os;
    os << is.rdbuf();
    return parse_config_text(os.str());
}

std::string canonical_config_text(const ScenarioConfig& c) {
    json j;
    j["name"] = c.name;
    j["scenario"] = to_string(c.kind);
    json axes = json::array();
    for (const AxisSpec& ax : c.grid.axes)
        axes.push_back({{"min", ax.min}, {"max", ax.max}, {"points", ax.points}});
    j["grid"] = {{"axes", axes},
                 {"boundary", c.grid.boundary == Boundary::periodic ? "periodic" : "reflecting"}};
    j["run"] = {{"dt", c.run.dt},
                {"steps", c.run.steps},
                {"snapshot_stride", c.run.snapshot_stride}};
    if (c.run.checkpoint_step) j["run"]["checkpoint_step"] = *c.run.checkpoint_step;
    j["ensemble"] = {{"n", c.ensemble.n}, {"seed", c.ensemble.seed}, {"method", c.ensemble.method}};
    json amps = json::array();
    for (const Complex& a : c.initial_state.label_amplitudes)
        amps.push_back({a.real(), a.imag()});
    j["initial_state"] = {{"kind", c.initial_state.kind},
                          {"centers", c.initial_state.centers},
                          {"widths", c.initial_state.widths},
                          {"momenta", c.initial_state.momenta},
                          {"label_amplitudes", amps}};
    switch (c.kind) {
        case ScenarioKind::free_particle:
            j["hamiltonian"] = {{"mass", c.free_particle.mass}};
            break;
        case ScenarioKind::pauli_spin:
            j["hamiltonian"] = {{"mass", c.pauli.mass},
                                {"mu", c.pauli.mu},
                                {"charge", c.pauli.charge},
                                {"b_field", c.pauli.b_field},
                                {"a_field", c.pauli.a_field}};
            break;
        case ScenarioKind::free_field_modes:
        case ScenarioKind::coupled_qed_toy: {
            json sub = {{"k_list", c.modes.k_list}, {"retain", c.modes.retain}};
            if (c.kind == ScenarioKind::coupled_qed_toy) {
                sub["coupling_strength"] = c.coupled.coupling_strength;
                sub["coupled_mode"] = c.coupled.coupled_mode;
                sub["level_energies"] = c.coupled.level_energies;
            }
            j["hamiltonian"] = sub;
            break;
        }
        case ScenarioKind::measurement:
            j["hamiltonian"] = {{"levels", c.measurement.levels},
                                {"coupling", c.measurement.coupling},
                                {"pointer_mass", c.measurement.pointer_mass}};
            break;
    }
    j["collapse"] = {{"enabled", c.collapse.enabled}, {"threshold", c.collapse.threshold}};
    j["analyses"] = {{"equivariance",
                      {{"enabled", c.equivariance.enabled},
                       {"ks_critical", c.equivariance.ks_critical},
                       {"velocity_scale", c.equivariance.velocity_scale},
                       {"expect", c.equivariance.expect}}},
                     {"born",
                      {{"enabled", c.born.enabled},
                       {"expected_fractions", c.born.expected_fractions},
                       {"tolerance_sigmas", c.born.tolerance_sigmas}}},
                     {"ehrenfest", {{"enabled", c.ehrenfest.enabled}, {"time", c.ehrenfest.time}}},
                     {"field_samples",
                      {{"enabled", c.field_samples.enabled},
                       {"points", c.field_samples.points},
                       {"trajectory_index", c.field_samples.trajectory_index}}}};
    j["output"] = {{"directory", c.output.directory},
                   {"trajectories", c.output.trajectories},
                   {"fields", c.output.fields},
                   {"trajectory_stride", c.output.trajectory_stride}};
    return j.dump();
}

std::string config_hash(const ScenarioConfig& config) {
    const std::string text = canonical_config_text(config);
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (unsigned char ch : text) {
        hash ^= ch;
        hash *= 0x100000001b3ull;
    }
    std::ostringstream os;
    os << std::hex << hash;
    return os.str();
}

}  // namespace pwsim
