#include "nsdyn/export.hpp"

#include "nsdyn/error.hpp"

#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

namespace nsdyn {

using Json = nlohmann::ordered_json;

namespace {

void put_number(std::string& out, double v) {
    char buf[32];
    const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
    out.append(buf, static_cast<std::size_t>(n));
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = line.find(sep, start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) {
            return out;
        }
        start = pos + 1;
    }
}

template <typename T>
T parse_number(std::string_view field, std::size_t line, std::string_view what) {
    T v{};
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
        throw ConfigError("line " + std::to_string(line) + ": cannot parse " + std::string(what) + " '" +
                          std::string(field) + "'");
    }
    return v;
}

}  // namespace

// ---------------------------------------------------------------------------
// CSV

std::string trajectory_csv(const Trajectory& traj) {
    std::string out = "t";
    for (const auto& l : traj.labels()) {
        out += ',';
        out += l;
    }
    out += ",stuck,event,surface\n";

    const auto& events = traj.events();
    std::size_t e = 0;
    auto put_event = [&](const TrajectoryEvent& ev) {
        put_number(out, ev.t);
        for (double v : ev.x) {
            out += ',';
            put_number(out, v);
        }
        out += ",,";
        out += to_string(ev.kind);
        out += ',';
        out += std::to_string(ev.surface);
        out += '\n';
    };
    for (std::size_t i = 0; i < traj.size(); ++i) {
        while (e < events.size() && events[e].t <= traj.time(i)) {
            put_event(events[e++]);
        }
        put_number(out, traj.time(i));
        for (double v : traj.state(i)) {
            out += ',';
            put_number(out, v);
        }
        out += ',';
        out += std::to_string(traj.stuck_mask(i));
        out += ",,\n";
    }
    while (e < events.size()) {
        put_event(events[e++]);
    }
    return out;
}

Trajectory parse_trajectory_csv(std::string_view text) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    auto next_line = [&](std::string_view& line) {
        if (pos >= text.size()) {
            return false;
        }
        const std::size_t end = text.find('\n', pos);
        line = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
        pos = end == std::string_view::npos ? text.size() : end + 1;
        ++line_no;
        return true;
    };

    std::string_view header;
    if (!next_line(header)) {
        throw ConfigError("line 1: missing CSV header");
    }
    const auto cols = split(header, ',');
    if (cols.size() < 5 || cols.front() != "t" || cols[cols.size() - 3] != "stuck" ||
        cols[cols.size() - 2] != "event" || cols.back() != "surface") {
        throw ConfigError("line 1: header must be t,<labels>,stuck,event,surface");
    }
    std::vector<std::string> labels;
    for (std::size_t i = 1; i + 3 < cols.size(); ++i) {
        labels.emplace_back(cols[i]);
    }
    const std::size_t dim = labels.size();
    Trajectory traj(std::move(labels));

    std::string_view line;
    std::vector<double> x(dim);
    while (next_line(line)) {
        if (line.empty()) {
            continue;
        }
        const auto f = split(line, ',');
        if (f.size() != dim + 4) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected " + std::to_string(dim + 4) +
                              " fields, found " + std::to_string(f.size()));
        }
        const double t = parse_number<double>(f[0], line_no, "time");
        for (std::size_t i = 0; i < dim; ++i) {
            x[i] = parse_number<double>(f[i + 1], line_no, "coordinate");
        }
        if (f[dim + 2].empty()) {
            const auto mask = parse_number<std::uint32_t>(f[dim + 1], line_no, "stuck mask");
            if (!traj.empty() && !(t > traj.time(traj.size() - 1))) {
                throw ConfigError("line " + std::to_string(line_no) + ": sample times must increase");
            }
            traj.append(t, x, mask);
        } else {
            TrajectoryEvent ev;
            ev.t = t;
            try {
                ev.kind = event_kind_from_string(f[dim + 2]);
            } catch (const ConfigError& err) {
                throw ConfigError("line " + std::to_string(line_no) + ": " + err.what());
            }
            ev.surface = parse_number<std::size_t>(f[dim + 3], line_no, "surface");
            ev.x = x;
            traj.add_event(std::move(ev));
        }
    }
    return traj;
}

// ---------------------------------------------------------------------------
// Files

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot open '" + tmp.string() + "' for writing");
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            throw IoError("write failed for '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot rename '" + tmp.string() + "' to '" + path.string() + "'");
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void export_trajectory(const Trajectory& traj, const std::filesystem::path& path) {
    if (traj.empty()) {
        throw DomainError("export_trajectory: trajectory is empty");
    }
    write_file_atomic(path, trajectory_csv(traj));
}

Trajectory read_trajectory(const std::filesystem::path& path) { return parse_trajectory_csv(read_file(path)); }

// ---------------------------------------------------------------------------
// JSON

namespace {

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::optional<double> read_optional(const Json& j) {
    return j.is_null() ? std::nullopt : std::optional<double>(j.get<double>());
}

Json to_json(const IntegrationConfig& c) {
    Json j;
    j["rel_tol"] = c.rel_tol;
    j["abs_tol"] = c.abs_tol;
    j["max_step"] = c.max_step;
    j["event_tol"] = c.event_tol;
    j["stick_epsilon"] = c.stick_epsilon;
    j["t_end"] = c.t_end;
    j["output_step"] = c.output_step;
    j["max_steps"] = c.max_steps;
    return j;
}

IntegrationConfig integration_from_json(const Json& j) {
    IntegrationConfig c;
    c.rel_tol = j.at("rel_tol").get<double>();
    c.abs_tol = j.at("abs_tol").get<double>();
    c.max_step = j.at("max_step").get<double>();
    c.event_tol = j.at("event_tol").get<double>();
    c.stick_epsilon = j.at("stick_epsilon").get<double>();
    c.t_end = j.at("t_end").get<double>();
    c.output_step = j.at("output_step").get<double>();
    c.max_steps = j.at("max_steps").get<std::size_t>();
    return c;
}

Json to_json(const Probe& p) {
    Json j;
    j["equilibrium"] = p.equilibrium;
    j["perturbation"] = p.perturbation;
    j["resolved"] = p.resolved;
    j["converged"] = p.converged;
    j["kind"] = std::string(to_string(p.kind));
    j["tail_mean_velocities"] = p.tail_mean_velocities;
    return j;
}

Probe probe_from_json(const Json& j) {
    Probe p;
    p.equilibrium = j.at("equilibrium").get<std::size_t>();
    p.perturbation = j.at("perturbation").get<std::vector<double>>();
    p.resolved = j.at("resolved").get<bool>();
    p.converged = j.at("converged").get<bool>();
    p.kind = attractor_kind_from_string(j.at("kind").get<std::string>());
    p.tail_mean_velocities = j.at("tail_mean_velocities").get<std::vector<double>>();
    return p;
}

Json to_json(const AttractorReport& r) {
    Json j;
    j["kind"] = std::string(to_string(r.kind));
    j["classification"] = std::string(to_string(r.classification));
    j["velocity_labels"] = r.velocity_labels;
    j["tail_mean_velocities"] = r.tail_mean_velocities;
    j["rotor_mean_velocity"] = r.rotor_mean_velocity;
    j["amplitude"] = r.amplitude;
    j["period"] = optional_number(r.period);
    j["tail_begin"] = r.tail_begin;
    j["tail_end"] = r.tail_end;
    j["tail_amplitudes"] = r.tail_amplitudes;
    j["tail_stick_intervals"] = r.tail_stick_intervals;
    j["probes"] = Json::array();
    for (const auto& p : r.probes) {
        j["probes"].push_back(to_json(p));
    }
    j["warnings"] = r.warnings;
    return j;
}

AttractorReport report_from_json(const Json& j) {
    AttractorReport r;
    r.kind = attractor_kind_from_string(j.at("kind").get<std::string>());
    r.classification = classification_from_string(j.at("classification").get<std::string>());
    r.velocity_labels = j.at("velocity_labels").get<std::vector<std::string>>();
    r.tail_mean_velocities = j.at("tail_mean_velocities").get<std::vector<double>>();
    r.rotor_mean_velocity = j.at("rotor_mean_velocity").get<double>();
    r.amplitude = j.at("amplitude").get<double>();
    r.period = read_optional(j.at("period"));
    r.tail_begin = j.at("tail_begin").get<double>();
    r.tail_end = j.at("tail_end").get<double>();
    r.tail_amplitudes = j.at("tail_amplitudes").get<std::vector<double>>();
    r.tail_stick_intervals = j.at("tail_stick_intervals").get<std::vector<std::size_t>>();
    for (const auto& p : j.at("probes")) {
        r.probes.push_back(probe_from_json(p));
    }
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    return r;
}

Json to_json(const Equilibrium& e) {
    Json j;
    j["t"] = e.state.t;
    j["state"] = e.state.x;
    j["reduced"] = e.reduced;
    j["residual_norm"] = e.residual_norm;
    j["eigen_max_real"] = e.eigen_max_real;
    j["stability"] = std::string(to_string(e.stability));
    j["stuck"] = e.stuck;
    if (e.family_coordinate) {
        j["family"] = Json{{"coordinate", *e.family_coordinate}, {"lo", e.family_lo}, {"hi", e.family_hi}};
    } else {
        j["family"] = nullptr;
    }
    return j;
}

Equilibrium equilibrium_from_json(const Json& j) {
    Equilibrium e;
    e.state.t = j.at("t").get<double>();
    e.state.x = j.at("state").get<std::vector<double>>();
    e.reduced = j.at("reduced").get<std::vector<double>>();
    e.residual_norm = j.at("residual_norm").get<double>();
    e.eigen_max_real = j.at("eigen_max_real").get<double>();
    e.stability = stability_from_string(j.at("stability").get<std::string>());
    e.stuck = j.at("stuck").get<bool>();
    if (const auto& f = j.at("family"); !f.is_null()) {
        e.family_coordinate = f.at("coordinate").get<std::size_t>();
        e.family_lo = f.at("lo").get<double>();
        e.family_hi = f.at("hi").get<double>();
    }
    return e;
}

Json to_json(const GridAxis& a) {
    Json j;
    j["coordinates"] = a.coordinates;
    j["lo"] = a.lo;
    j["hi"] = a.hi;
    j["n"] = a.n;
    return j;
}

GridAxis axis_from_json(const Json& j) {
    GridAxis a;
    a.coordinates = j.at("coordinates").get<std::vector<std::size_t>>();
    a.lo = j.at("lo").get<double>();
    a.hi = j.at("hi").get<double>();
    a.n = j.at("n").get<std::size_t>();
    return a;
}

Json to_json(const BasinMap& m) {
    Json j;
    j["x"] = to_json(m.grid.x);
    j["y"] = to_json(m.grid.y);
    j["base"] = m.grid.base;
    j["attractors"] = Json::array();
    for (const auto& a : m.attractors) {
        j["attractors"].push_back(Json{{"label", a.label}, {"report", to_json(a.report)}});
    }
    j["cells"] = m.cells;
    return j;
}

BasinMap basin_from_json(const Json& j) {
    BasinMap m;
    m.grid.x = axis_from_json(j.at("x"));
    m.grid.y = axis_from_json(j.at("y"));
    m.grid.base = j.at("base").get<std::vector<double>>();
    for (const auto& a : j.at("attractors")) {
        m.attractors.push_back({a.at("label").get<std::string>(), report_from_json(a.at("report"))});
    }
    m.cells = j.at("cells").get<std::vector<int>>();
    return m;
}

}  // namespace

std::string summary_json(const RunSummary& s) {
    Json j;
    j["scenario_id"] = s.scenario_id;
    j["model"] = s.model;
    j["wall_seconds"] = s.wall_seconds;
    j["params"] = Json::array();
    for (const auto& p : s.params.entries()) {
        j["params"].push_back(Json{{"key", p.key},
                                   {"value", p.value},
                                   {"provenance", std::string(to_string(p.provenance))},
                                   {"unit", p.unit},
                                   {"description", p.description}});
    }
    j["labels"] = s.labels;
    j["initial"] = s.initial;
    j["integration"] = to_json(s.integration);
    j["stats"] = Json{{"accepted", s.stats.accepted},
                      {"rejected", s.stats.rejected},
                      {"rhs_evaluations", s.stats.rhs_evaluations}};
    j["equilibria"] = Json::array();
    for (const auto& e : s.equilibria) {
        j["equilibria"].push_back(to_json(e));
    }
    j["reports"] = Json::array();
    for (std::size_t i = 0; i < s.reports.size(); ++i) {
        Json r;
        r["scenario"] = i < s.report_scenarios.size() ? s.report_scenarios[i] : s.scenario_id;
        r.update(to_json(s.reports[i]));
        j["reports"].push_back(std::move(r));
    }
    j["sommerfeld_ratio"] = optional_number(s.sommerfeld_ratio);
    j["basin"] = s.basin ? to_json(*s.basin) : Json(nullptr);
    return j.dump(2) + "\n";
}

RunSummary parse_summary_json(std::string_view text) {
    try {
        const Json j = Json::parse(text);
        RunSummary s;
        s.scenario_id = j.at("scenario_id").get<std::string>();
        s.model = j.at("model").get<std::string>();
        s.wall_seconds = j.at("wall_seconds").get<double>();
        std::vector<ParamEntry> entries;
        for (const auto& p : j.at("params")) {
            entries.push_back({p.at("key").get<std::string>(), p.at("value").get<double>(),
                               provenance_from_string(p.at("provenance").get<std::string>()),
                               p.at("description").get<std::string>(), p.at("unit").get<std::string>()});
        }
        s.params = ParamTable(std::move(entries));
        s.labels = j.at("labels").get<std::vector<std::string>>();
        s.initial = j.at("initial").get<std::vector<double>>();
        s.integration = integration_from_json(j.at("integration"));
        const auto& st = j.at("stats");
        s.stats.accepted = st.at("accepted").get<std::size_t>();
        s.stats.rejected = st.at("rejected").get<std::size_t>();
        s.stats.rhs_evaluations = st.at("rhs_evaluations").get<std::size_t>();
        for (const auto& e : j.at("equilibria")) {
            s.equilibria.push_back(equilibrium_from_json(e));
        }
        for (const auto& r : j.at("reports")) {
            s.report_scenarios.push_back(r.at("scenario").get<std::string>());
            s.reports.push_back(report_from_json(r));
        }
        s.sommerfeld_ratio = read_optional(j.at("sommerfeld_ratio"));
        if (const auto& b = j.at("basin"); !b.is_null()) {
            s.basin = basin_from_json(b);
        }
        return s;
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("summary JSON: ") + e.what());
    }
}

void export_summary(const RunSummary& summary, const std::filesystem::path& path) {
    write_file_atomic(path, summary_json(summary));
}

RunSummary read_summary(const std::filesystem::path& path) { return parse_summary_json(read_file(path)); }

// ---------------------------------------------------------------------------
// Plot script

std::string plot_script(const RunSummary& summary, const SystemModel& model, const std::string& csv_name) {
    std::ostringstream py;
    py << "#!/usr/bin/env python3\n"
       << "\"\"\"Plots " << summary.scenario_id << " from " << csv_name << ".\"\"\"\n"
       << "import csv\n"
       << "import pathlib\n\n"
       << "import matplotlib.pyplot as plt\n\n"
       << "CSV = pathlib.Path(__file__).with_name(\"" << csv_name << "\")\n"
       << "CHANNELS = [";
    for (const auto& ch : model.velocity_channels()) {
        py << "(\"" << ch.label << "\", \"" << model.labels()[ch.coordinate] << "\", " << ch.offset << "), ";
    }
    py << "]\n"
       << "OSCILLATION = \"" << model.labels()[model.oscillation_coordinate()] << "\"\n\n"
       << "t, cols = [], {}\n"
       << "with CSV.open() as f:\n"
       << "    for row in csv.DictReader(f):\n"
       << "        if row[\"event\"]:\n"
       << "            continue\n"
       << "        t.append(float(row[\"t\"]))\n"
       << "        for key, value in row.items():\n"
       << "            if key not in (\"t\", \"stuck\", \"event\", \"surface\"):\n"
       << "                cols.setdefault(key, []).append(float(value))\n\n"
       << "fig, (ax_v, ax_o) = plt.subplots(2, 1, sharex=True, figsize=(8, 6))\n"
       << "for name, column, offset in CHANNELS:\n"
       << "    ax_v.plot(t, [v + offset for v in cols[column]], label=name)\n"
       << "ax_v.set_ylabel(\"velocity [rad/s]\")\n"
       << "ax_v.legend()\n"
       << "ax_o.plot(t, cols[OSCILLATION], color=\"k\", linewidth=0.8)\n"
       << "ax_o.set_ylabel(OSCILLATION)\n"
       << "ax_o.set_xlabel(\"t [s]\")\n"
       << "fig.suptitle(\"" << summary.scenario_id << " (" << summary.model << ")\")\n"
       << "fig.tight_layout()\n"
       << "fig.savefig(CSV.with_suffix(\".png\"), dpi=150)\n"
       << "plt.show()\n";
    return py.str();
}

}  // namespace nsdyn
