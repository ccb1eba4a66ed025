#include "nsdyn/config.hpp"

#include "nsdyn/error.hpp"
#include "nsdyn/export.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <map>

namespace nsdyn {

namespace {

struct Entry {
    std::string section;
    std::string key;
    std::string value;
    std::size_t line = 0;
};

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(const Entry& e, const std::string& what) {
    throw ConfigError("line " + std::to_string(e.line) + ": " + e.section + "." + e.key + ": " + what);
}

double number(const Entry& e) {
    const std::string_view v = e.value;
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out)) {
        fail(e, "expected a number, got '" + e.value + "'");
    }
    return out;
}

std::size_t count(const Entry& e) {
    const std::string_view v = e.value;
    std::size_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        fail(e, "expected a non-negative integer, got '" + e.value + "'");
    }
    return out;
}

bool flag(const Entry& e) {
    if (e.value == "true" || e.value == "yes" || e.value == "1") return true;
    if (e.value == "false" || e.value == "no" || e.value == "0") return false;
    fail(e, "expected true or false, got '" + e.value + "'");
}

std::vector<std::string> list(std::string_view v) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= v.size()) {
        const auto pos = v.find_first_of(", ", start);
        const auto item = trim(v.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (!item.empty()) {
            out.emplace_back(item);
        }
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return out;
}

[[noreturn]] void unknown_key(const Entry& e, std::span<const std::string> known) {
    std::string msg = "unknown key";
    if (auto hint = closest_match(e.key, known)) {
        msg += "; did you mean '" + *hint + "'?";
    }
    fail(e, msg);
}

const std::array<std::string, 5> kSections = {"model", "params", "initial", "integration", "analysis"};

std::vector<Entry> tokenize(std::string_view text) {
    std::vector<Entry> entries;
    std::string section;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto end = text.find('\n', pos);
        std::string_view line = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
        pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
        ++line_no;
        if (const auto hash = line.find_first_of("#;"); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const std::string where = "line " + std::to_string(line_no) + ": ";
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError(where + "unterminated section header");
            }
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (std::find(kSections.begin(), kSections.end(), section) == kSections.end()) {
                std::string msg = where + "unknown section [" + section + "]";
                if (auto hint = closest_match(section, kSections)) {
                    msg += "; did you mean [" + *hint + "]?";
                }
                throw ConfigError(msg);
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(where + "expected 'key = value'");
        }
        if (section.empty()) {
            throw ConfigError(where + "key outside a section");
        }
        Entry e{section, std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))), line_no};
        if (e.key.empty()) {
            throw ConfigError(where + "empty key");
        }
        for (const auto& prev : entries) {
            if (prev.section == e.section && prev.key == e.key) {
                fail(e, "duplicate key (first set on line " + std::to_string(prev.line) + ")");
            }
        }
        entries.push_back(std::move(e));
    }
    return entries;
}

ScenarioSpec base_spec(const std::vector<Entry>& entries) {
    const Entry* scenario = nullptr;
    const Entry* name = nullptr;
    const Entry* id = nullptr;
    static const std::array<std::string, 3> known = {"scenario", "name", "id"};
    for (const auto& e : entries) {
        if (e.section != "model") {
            continue;
        }
        if (e.key == "scenario") {
            scenario = &e;
        } else if (e.key == "name") {
            name = &e;
        } else if (e.key == "id") {
            id = &e;
        } else {
            unknown_key(e, known);
        }
    }

    ScenarioSpec spec;
    if (scenario) {
        try {
            spec = builtin_scenario(scenario->value);
        } catch (const ConfigError& err) {
            fail(*scenario, err.what());
        }
    }
    if (name && (!scenario || name->value != spec.model)) {
        const auto names = model_names();
        if (std::find(names.begin(), names.end(), name->value) == names.end()) {
            std::string msg = "unknown model '" + name->value + "'";
            if (auto hint = closest_match(name->value, names)) {
                msg += "; did you mean '" + *hint + "'?";
            }
            fail(*name, msg);
        }
        spec.model = name->value;
        spec.params = default_params(spec.model);
        spec.initial.assign(build_model(spec.model)->dim(), 0.0);
        spec.analysis.sommerfeld_pair.reset();
        spec.analysis.basin.reset();
        if (!scenario) {
            spec.id = spec.model;
        }
    }
    if (!scenario && !name) {
        throw ConfigError("model.name: missing; set [model] scenario or name");
    }
    if (id) {
        spec.id = id->value;
    }
    return spec;
}

void apply_axis_key(const Entry& e, GridAxis& axis, std::string_view suffix, const SystemModel& model) {
    if (suffix.empty()) {
        axis.coordinates.clear();
        for (const auto& label : list(e.value)) {
            const auto i = model.coordinate_index(label);
            if (!i) {
                std::string msg = "unknown coordinate '" + label + "'";
                if (auto hint = closest_match(label, model.labels())) {
                    msg += "; did you mean '" + *hint + "'?";
                }
                fail(e, msg);
            }
            axis.coordinates.push_back(*i);
        }
    } else if (suffix == "_lo") {
        axis.lo = number(e);
    } else if (suffix == "_hi") {
        axis.hi = number(e);
    } else if (suffix == "_n") {
        axis.n = count(e);
    }
}

}  // namespace

ScenarioSpec parse_config(std::string_view text) {
    const auto entries = tokenize(text);
    ScenarioSpec spec = base_spec(entries);
    const auto model = build_model(spec.model, spec.params);

    static const std::array<std::string, 8> integration_keys = {"rel_tol",       "abs_tol", "max_step",
                                                                "event_tol",     "stick_epsilon", "t_end",
                                                                "output_step",   "max_steps"};
    static const std::array<std::string, 17> analysis_keys = {
        "classify", "radius",     "n_probes",   "seed",      "workers", "tail_fraction",
        "sommerfeld_pair",        "basin",      "basin_n",   "basin_x", "basin_x_lo",
        "basin_x_hi", "basin_x_n", "basin_y",   "basin_y_lo", "basin_y_hi", "basin_y_n"};

    const Entry* state_entry = nullptr;
    std::map<std::size_t, double> coordinate_values;
    bool basin_requested = spec.analysis.basin.has_value();
    std::size_t basin_n = 20;
    std::vector<const Entry*> basin_entries;

    for (const auto& e : entries) {
        if (e.section == "params") {
            try {
                spec.params.set(e.key, number(e), Provenance::user);
            } catch (const ConfigError& err) {
                if (!spec.params.contains(e.key)) {
                    std::string msg = "unknown parameter for model '" + spec.model + "'";
                    if (auto hint = spec.params.suggest(e.key)) {
                        msg += "; did you mean " + *hint + "?";
                    }
                    fail(e, msg);
                }
                throw;
            }
        } else if (e.section == "initial") {
            if (e.key == "state") {
                state_entry = &e;
                continue;
            }
            const auto i = model->coordinate_index(e.key);
            if (!i) {
                unknown_key(e, model->labels());
            }
            coordinate_values[*i] = number(e);
        } else if (e.section == "integration") {
            auto& c = spec.integration;
            if (e.key == "rel_tol") c.rel_tol = number(e);
            else if (e.key == "abs_tol") c.abs_tol = number(e);
            else if (e.key == "max_step") c.max_step = number(e);
            else if (e.key == "event_tol") c.event_tol = number(e);
            else if (e.key == "stick_epsilon") c.stick_epsilon = number(e);
            else if (e.key == "t_end") c.t_end = number(e);
            else if (e.key == "output_step") c.output_step = number(e);
            else if (e.key == "max_steps") c.max_steps = count(e);
            else unknown_key(e, integration_keys);
        } else if (e.section == "analysis") {
            auto& a = spec.analysis;
            if (e.key == "classify") a.classify = flag(e);
            else if (e.key == "radius") a.classify_cfg.radius = number(e);
            else if (e.key == "n_probes") a.classify_cfg.n_probes = count(e);
            else if (e.key == "seed") a.classify_cfg.seed = count(e);
            else if (e.key == "workers") a.workers = count(e);
            else if (e.key == "tail_fraction") a.tail_fraction = number(e);
            else if (e.key == "sommerfeld_pair") {
                if (e.value == "none") {
                    a.sommerfeld_pair.reset();
                } else {
                    a.sommerfeld_pair = e.value;
                }
            } else if (e.key == "basin") basin_requested = flag(e);
            else if (e.key == "basin_n") basin_n = count(e);
            else if (e.key.rfind("basin_", 0) == 0 &&
                     std::find(analysis_keys.begin(), analysis_keys.end(), e.key) != analysis_keys.end()) {
                basin_requested = true;
                basin_entries.push_back(&e);
            } else {
                unknown_key(e, analysis_keys);
            }
        }
    }

    if (state_entry) {
        std::vector<double> values;
        for (const auto& item : list(state_entry->value)) {
            Entry tmp = *state_entry;
            tmp.value = item;
            values.push_back(number(tmp));
        }
        if (values.size() != model->dim()) {
            fail(*state_entry, "model '" + spec.model + "' needs " + std::to_string(model->dim()) +
                                   " coordinates, got " + std::to_string(values.size()));
        }
        spec.initial = std::move(values);
    }
    for (const auto& [i, v] : coordinate_values) {
        spec.initial[i] = v;
    }

    if (basin_requested) {
        BasinGridSpec grid = spec.analysis.basin ? *spec.analysis.basin : default_basin_grid(*model, basin_n);
        if (!spec.analysis.basin) {
            grid.base = spec.initial;
        }
        for (const Entry* e : basin_entries) {
            const bool is_x = e->key.rfind("basin_x", 0) == 0;
            apply_axis_key(*e, is_x ? grid.x : grid.y, std::string_view(e->key).substr(7), *model);
        }
        spec.analysis.basin = grid;
    }

    try {
        validate(spec);
    } catch (const ConfigError& err) {
        throw ConfigError(std::string("config: ") + err.what());
    }
    return spec;
}

ScenarioSpec read_config(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    try {
        return parse_config(text);
    } catch (const ConfigError& err) {
        throw ConfigError(path.string() + ": " + err.what());
    }
}

}  // namespace nsdyn
