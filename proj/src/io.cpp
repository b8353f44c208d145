#include "ergosense/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace ergosense {

using nlohmann::json;

namespace {

const char* const kAxes[] = {"x", "y", "z"};

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

bool next_line(std::istream& is, std::string& line) {
    while (std::getline(is, line)) {
        if (!line.empty() && line != "\r") return true;
    }
    return false;
}

std::vector<double> parse_row(const std::string& line, std::size_t expected) {
    const auto cells = split(line, ',');
    if (cells.size() != expected) {
        throw std::runtime_error("expected " + std::to_string(expected) + " columns, got " +
                                 std::to_string(cells.size()));
    }
    std::vector<double> out;
    out.reserve(cells.size());
    for (const auto& c : cells) out.push_back(parse_double(c));
    return out;
}

int dim_from_header(const std::string& header, int fixed_columns) {
    const auto cols = split(header, ',');
    const int d = (static_cast<int>(cols.size()) - fixed_columns);
    return d;
}

json vec_json(const Vec& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

Vec vec_from_json(const json& a) {
    Vec v(static_cast<Eigen::Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) v(static_cast<Eigen::Index>(i)) = a[i].get<double>();
    return v;
}

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> opt_from_json(const json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<double>();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << content;
    if (!f) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    while (first < last && *first == ' ') ++first;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last) throw std::runtime_error("not a number: '" + s + "'");
    return v;
}

void write_trajectory(std::ostream& os, const std::vector<TrajectoryRow>& rows, int dim) {
    os << 't';
    for (int d = 0; d < dim; ++d) os << ',' << kAxes[d];
    for (int d = 0; d < dim; ++d) os << ",v" << kAxes[d];
    for (int d = 0; d < dim; ++d) os << ",u" << kAxes[d];
    os << '\n';
    for (const auto& r : rows) {
        os << format_double(r.t);
        for (const Vec* v : {&r.pos, &r.vel, &r.u}) {
            for (int d = 0; d < dim; ++d) os << ',' << format_double((*v)(d));
        }
        os << '\n';
    }
}

std::vector<TrajectoryRow> read_trajectory(std::istream& is) {
    std::string line;
    if (!next_line(is, line)) throw std::runtime_error("empty trajectory file");
    const int cols = static_cast<int>(split(line, ',').size());
    if ((cols - 1) % 3 != 0 || cols < 7) throw std::runtime_error("bad trajectory header");
    const int dim = (cols - 1) / 3;
    std::vector<TrajectoryRow> rows;
    while (next_line(is, line)) {
        const auto v = parse_row(line, static_cast<std::size_t>(cols));
        TrajectoryRow r;
        r.t = v[0];
        r.pos.resize(dim);
        r.vel.resize(dim);
        r.u.resize(dim);
        for (int d = 0; d < dim; ++d) {
            r.pos(d) = v[1 + d];
            r.vel(d) = v[1 + dim + d];
            r.u(d) = v[1 + 2 * dim + d];
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_measurements(std::ostream& os, const Dataset& data, int dim) {
    os << 't';
    for (int d = 0; d < dim; ++d) os << ',' << kAxes[d];
    os << ",label\n";
    for (const auto& m : data) {
        os << format_double(m.time);
        for (int d = 0; d < dim; ++d) os << ',' << format_double(m.location(d));
        os << ',' << m.label << '\n';
    }
}

Dataset read_measurements(std::istream& is) {
    std::string line;
    if (!next_line(is, line)) throw std::runtime_error("empty measurements file");
    const int dim = dim_from_header(line, 2);
    if (dim != 2 && dim != 3) throw std::runtime_error("bad measurements header");
    Dataset data;
    while (next_line(is, line)) {
        const auto v = parse_row(line, static_cast<std::size_t>(dim + 2));
        Measurement m;
        m.time = v[0];
        m.location.resize(dim);
        for (int d = 0; d < dim; ++d) m.location(d) = v[1 + d];
        m.label = static_cast<int>(v[1 + dim]);
        data.push_back(std::move(m));
    }
    return data;
}

void write_snapshot(std::ostream& os, const PosteriorSnapshot& snap) {
    os << "# posterior time=" << format_double(snap.t) << " dim=" << snap.grid.dim
       << " resolution=" << snap.grid.res << " extent=0,1 order=x-fastest estimate=" << snap.estimate << '\n';
    const bool full = !snap.posterior.empty();
    os << (full ? "target,posterior,level\n" : "target\n");
    for (std::size_t i = 0; i < snap.target.size(); ++i) {
        os << format_double(snap.target[i]);
        if (full) os << ',' << format_double(snap.posterior[i]) << ',' << format_double(snap.level[i]);
        os << '\n';
    }
}

PosteriorSnapshot read_snapshot(std::istream& is) {
    std::string line;
    if (!next_line(is, line) || line.rfind("# posterior", 0) != 0) {
        throw std::runtime_error("missing snapshot metadata line");
    }
    PosteriorSnapshot snap;
    int dim = 0;
    int res = 0;
    std::istringstream meta(line.substr(11));
    std::string token;
    while (meta >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = token.substr(0, eq);
        const std::string value = token.substr(eq + 1);
        if (key == "time") snap.t = parse_double(value);
        else if (key == "dim") dim = std::stoi(value);
        else if (key == "resolution") res = std::stoi(value);
        else if (key == "estimate") snap.estimate = value;
    }
    snap.grid = GridSpec(dim, res);
    if (!next_line(is, line)) throw std::runtime_error("missing snapshot header");
    const std::size_t cols = split(line, ',').size();
    if (cols != 1 && cols != 3) throw std::runtime_error("bad snapshot header");
    const std::size_t n = snap.grid.size();
    snap.target.reserve(n);
    while (next_line(is, line)) {
        const auto v = parse_row(line, cols);
        snap.target.push_back(v[0]);
        if (cols == 3) {
            snap.posterior.push_back(v[1]);
            snap.level.push_back(v[2]);
        }
    }
    if (snap.target.size() != n) throw std::runtime_error("snapshot row count does not match the grid");
    return snap;
}

std::string snapshot_filename(const PosteriorSnapshot& snap) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "posterior_t%08.3f.csv", snap.t);
    return buf;
}

json metrics_to_json(const MetricsLog& log) {
    json j;
    j["columns"] = {"t", "ergodic", "gamma", "area_error", "detected"};
    json rows = json::array();
    for (const auto& r : log.rows()) {
        json flags = json::array();
        for (bool b : r.detected) flags.push_back(b ? 1 : 0);
        rows.push_back(json::array({r.t, r.ergodic, r.gamma, opt_json(r.area_error), flags}));
    }
    j["rows"] = std::move(rows);
    return j;
}

MetricsLog metrics_from_json(const json& j) {
    MetricsLog log;
    for (const auto& r : j.at("rows")) {
        MetricsRow row;
        row.t = r.at(0).get<double>();
        row.ergodic = r.at(1).get<double>();
        row.gamma = r.at(2).get<double>();
        row.area_error = opt_from_json(r.at(3));
        for (const auto& f : r.at(4)) row.detected.push_back(f.get<int>() != 0);
        log.append(std::move(row));
    }
    return log;
}

json summary_to_json(const TrialSummary& s) {
    json j;
    j["trial"] = s.trial;
    j["policy"] = s.policy;
    j["initial_position"] = vec_json(s.initial_position);
    j["first_contact_time"] = opt_json(s.first_contact_time);
    json det = json::array();
    for (const auto& d : s.detection_times) det.push_back(opt_json(d));
    j["detection_times"] = std::move(det);
    j["all_detected_time"] = opt_json(s.all_detected_time);
    j["detection_count"] = s.detection_count;
    j["final_ergodic"] = s.final_ergodic;
    j["final_gamma"] = s.final_gamma;
    j["final_area_error"] = opt_json(s.final_area_error);
    j["contacts"] = s.contacts;
    j["measurements"] = s.measurements;
    j["fits"] = s.fits;
    j["wall_seconds"] = s.wall_seconds;
    j["error"] = s.error.empty() ? json(nullptr) : json(s.error);
    return j;
}

TrialSummary summary_from_json(const json& j) {
    TrialSummary s;
    s.trial = j.at("trial").get<std::uint64_t>();
    s.policy = j.at("policy").get<std::string>();
    s.initial_position = vec_from_json(j.at("initial_position"));
    s.first_contact_time = opt_from_json(j.at("first_contact_time"));
    for (const auto& d : j.at("detection_times")) s.detection_times.push_back(opt_from_json(d));
    s.all_detected_time = opt_from_json(j.at("all_detected_time"));
    s.detection_count = j.at("detection_count").get<int>();
    s.final_ergodic = j.at("final_ergodic").get<double>();
    s.final_gamma = j.at("final_gamma").get<double>();
    s.final_area_error = opt_from_json(j.at("final_area_error"));
    s.contacts = j.at("contacts").get<std::size_t>();
    s.measurements = j.at("measurements").get<std::size_t>();
    s.fits = j.at("fits").get<std::size_t>();
    s.wall_seconds = j.at("wall_seconds").get<double>();
    s.error = j.at("error").is_null() ? std::string() : j.at("error").get<std::string>();
    return s;
}

json batch_to_json(const std::vector<BatchResult>& batches) {
    json j;
    j["policies"] = json::object();
    for (const auto& b : batches) {
        json p;
        p["scenario"] = b.scenario;
        json trials = json::array();
        int completed = 0;
        int all_detected = 0;
        double gamma_sum = 0.0;
        for (const auto& t : b.trials) {
            trials.push_back(summary_to_json(t));
            if (!t.error.empty()) continue;
            ++completed;
            if (t.all_detected_time) ++all_detected;
            gamma_sum += t.final_gamma;
        }
        p["trials"] = std::move(trials);
        p["completed"] = completed;
        p["failed"] = static_cast<int>(b.trials.size()) - completed;
        p["all_detected"] = all_detected;
        p["mean_final_gamma"] = completed ? json(gamma_sum / completed) : json(nullptr);
        j["policies"][b.policy] = std::move(p);
    }
    return j;
}

void write_run(const std::filesystem::path& dir, const Scenario& scenario, const RunOutputs& run) {
    std::filesystem::create_directories(dir);
    const int dim = scenario.dimension;
    {
        std::ostringstream os;
        write_trajectory(os, run.trajectory, dim);
        write_file(dir / "trajectory.csv", os.str());
    }
    {
        std::ostringstream os;
        write_measurements(os, run.measurements, dim);
        write_file(dir / "measurements.csv", os.str());
    }
    json index = json::array();
    for (const auto& snap : run.snapshots) {
        std::ostringstream os;
        write_snapshot(os, snap);
        const std::string name = snapshot_filename(snap);
        write_file(dir / name, os.str());
        index.push_back({{"t", snap.t}, {"file", name}});
    }
    json metrics = metrics_to_json(run.metrics);
    metrics["snapshots"] = std::move(index);
    write_file(dir / "metrics.json", metrics.dump(1) + "\n");
    write_file(dir / "summary.json", summary_to_json(run.summary).dump(2) + "\n");
    json config = scenario_to_json(scenario);
    config["trial"] = run.summary.trial;
    config["resolved_initial_position"] = vec_json(run.summary.initial_position);
    write_file(dir / "config.json", config.dump(2) + "\n");
}

}  // namespace ergosense
