#include "ergosense/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "ergosense/errors.hpp"

namespace ergosense {

using nlohmann::json;

namespace {

// Typed access to one JSON object that remembers which keys were read, so
// leftovers can be reported as unknown.
class ObjectReader {
public:
    ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) throw ValidationError(path_.empty() ? "<root>" : path_, "expected an object");
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return obj_.contains(key) && !obj_.at(key).is_null();
    }

    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    double number(const std::string& key, double fallback) {
        if (!has(key)) return fallback;
        const json& v = obj_.at(key);
        if (!v.is_number()) throw ValidationError(field(key), "expected a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) throw ValidationError(field(key), "expected a finite number");
        return d;
    }

    long long integer(const std::string& key, long long fallback) {
        if (!has(key)) return fallback;
        const json& v = obj_.at(key);
        if (!v.is_number_integer()) throw ValidationError(field(key), "expected an integer");
        return v.get<long long>();
    }

    std::string string(const std::string& key, const std::string& fallback) {
        if (!has(key)) return fallback;
        const json& v = obj_.at(key);
        if (!v.is_string()) throw ValidationError(field(key), "expected a string");
        return v.get<std::string>();
    }

    std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
        if (!has(key)) return fallback;
        const json& v = obj_.at(key);
        if (!v.is_array()) throw ValidationError(field(key), "expected an array of numbers");
        std::vector<double> out;
        for (const auto& e : v) {
            if (!e.is_number()) throw ValidationError(field(key), "expected an array of numbers");
            out.push_back(e.get<double>());
        }
        return out;
    }

    Vec vec(const std::string& key, const Vec& fallback, int dim) {
        if (!has(key)) return fallback;
        const auto values = numbers(key, {});
        if (static_cast<int>(values.size()) != dim) {
            throw ValidationError(field(key), "expected " + std::to_string(dim) + " components");
        }
        Vec v(dim);
        for (int i = 0; i < dim; ++i) v(i) = values[i];
        return v;
    }

    const json* object(const std::string& key) {
        if (!has(key)) return nullptr;
        return &obj_.at(key);
    }

    void finish() const {
        for (const auto& item : obj_.items()) {
            if (!seen_.count(item.key())) throw ValidationError(field(item.key()), "unknown key");
        }
    }

private:
    const json& obj_;
    std::string path_;
    std::set<std::string> seen_;
};

json vec_json(const Vec& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

ShapeSpec parse_shape(const json& j, const std::string& path, int dim) {
    ObjectReader r(j, path);
    ShapeSpec s;
    const std::string kind = r.string("kind", "");
    try {
        s.kind = shape_kind_from_string(kind);
    } catch (const ValidationError&) {
        throw ValidationError(r.field("kind"), "unknown shape kind '" + kind + "'");
    }
    const int shape_dim = s.kind == ShapeKind::Torus ? 3 : 2;
    if (shape_dim != dim) throw ValidationError(r.field("kind"), kind + " does not fit a " + std::to_string(dim) + "D world");
    switch (s.kind) {
        case ShapeKind::Circle:
            s.center = r.vec("center", Vec(), 2);
            s.radius = r.number("radius", 0.0);
            break;
        case ShapeKind::Square:
            s.center = r.vec("center", Vec(), 2);
            s.half_width = r.number("half_width", 0.0);
            s.rotation = r.number("rotation", 0.0);
            break;
        case ShapeKind::Diamond:
            s.center = r.vec("center", Vec(), 2);
            s.half_width = r.number("half_width", 0.0);
            break;
        case ShapeKind::Triangle:
            s.center = r.vec("center", Vec(), 2);
            s.radius = r.number("radius", 0.0);
            s.rotation = r.number("rotation", 0.0);
            break;
        case ShapeKind::Clover:
            s.center = r.vec("center", Vec(), 2);
            s.radius = r.number("radius", 0.0);
            s.amplitude = r.number("amplitude", 0.0);
            s.petals = static_cast<int>(r.integer("petals", 4));
            s.rotation = r.number("rotation", 0.0);
            break;
        case ShapeKind::SineWall:
            s.offset = r.number("offset", 0.0);
            s.amplitude = r.number("amplitude", 0.0);
            s.frequency = r.number("frequency", 0.0);
            s.center = make_vec({0.5, s.offset});
            break;
        case ShapeKind::Torus:
            s.center = r.vec("center", Vec(), 3);
            s.major_radius = r.number("major_radius", 0.0);
            s.minor_radius = r.number("minor_radius", 0.0);
            break;
    }
    r.finish();
    try {
        make_shape(s);
    } catch (const ValidationError& e) {
        throw ValidationError(e.field().empty() ? path : path + "." + e.field(), e.message());
    }
    return s;
}

json shape_json(const ShapeSpec& s) {
    json j;
    j["kind"] = to_string(s.kind);
    switch (s.kind) {
        case ShapeKind::Circle:
            j["center"] = vec_json(s.center);
            j["radius"] = s.radius;
            break;
        case ShapeKind::Square:
            j["center"] = vec_json(s.center);
            j["half_width"] = s.half_width;
            j["rotation"] = s.rotation;
            break;
        case ShapeKind::Diamond:
            j["center"] = vec_json(s.center);
            j["half_width"] = s.half_width;
            break;
        case ShapeKind::Triangle:
            j["center"] = vec_json(s.center);
            j["radius"] = s.radius;
            j["rotation"] = s.rotation;
            break;
        case ShapeKind::Clover:
            j["center"] = vec_json(s.center);
            j["radius"] = s.radius;
            j["amplitude"] = s.amplitude;
            j["petals"] = s.petals;
            j["rotation"] = s.rotation;
            break;
        case ShapeKind::SineWall:
            j["offset"] = s.offset;
            j["amplitude"] = s.amplitude;
            j["frequency"] = s.frequency;
            break;
        case ShapeKind::Torus:
            j["center"] = vec_json(s.center);
            j["major_radius"] = s.major_radius;
            j["minor_radius"] = s.minor_radius;
            break;
    }
    return j;
}

}  // namespace

std::string to_string(Policy p) { return p == Policy::Esac ? "esac" : "geer"; }

Policy policy_from_string(const std::string& name) {
    if (name == "esac") return Policy::Esac;
    if (name == "geer") return Policy::Geer;
    throw ValidationError("policy", "must be 'esac' or 'geer'");
}

World Scenario::build_world() const {
    std::vector<Shape> shapes;
    for (const auto& s : world) shapes.push_back(make_shape(s));
    return World(dimension, std::move(shapes));
}

void Scenario::validate() const {
    if (dimension != 2 && dimension != 3) throw ValidationError("dimension", "must be 2 or 3");
    if (!(duration > 0.0)) throw ValidationError("duration", "must be positive");
    esac.validate(dimension);
    estimator.validate();
    geer.validate();
    if (k_max < 1 || k_max > 40) throw ValidationError("ergodic.k_max", "must be in [1, 40]");
    if (grid < 4) throw ValidationError("ergodic.grid", "must be at least 4");
    if (output.metrics_grid < 4) throw ValidationError("output.metrics_grid", "must be at least 4");
    const double ratio = output.metrics_interval / esac.sample_time;
    if (!(output.metrics_interval > 0.0) || std::abs(ratio - std::round(ratio)) > 1e-9 || std::round(ratio) < 1) {
        throw ValidationError("output.metrics_interval", "must be a positive multiple of sample_time");
    }
    const double free_ratio = estimator.free_interval / esac.dt;
    if (std::abs(free_ratio - std::round(free_ratio)) > 1e-9 || std::round(free_ratio) < 1) {
        throw ValidationError("estimator.free_interval", "must be a positive multiple of dt");
    }
    for (double t : output.snapshot_times) {
        if (!(t >= 0.0)) throw ValidationError("output.snapshot_times", "times must be non-negative");
    }
    const World w = build_world();
    if (initial_position) {
        if (initial_position->size() != dimension || !in_unit_box(*initial_position)) {
            throw ValidationError("initial_position", "must be a point in the unit box");
        }
        if (!(w.min_value(*initial_position) > 0.0)) {
            throw ValidationError("initial_position", "must lie outside every shape");
        }
    }
}

Scenario parse_scenario(const json& doc) {
    ObjectReader root(doc, "");
    Scenario s;
    s.name = root.string("name", s.name);
    const long long dim = root.integer("dimension", 2);
    if (dim != 2 && dim != 3) throw ValidationError("dimension", "must be 2 or 3");
    s.dimension = static_cast<int>(dim);
    s.duration = root.number("duration", s.duration);
    if (!(s.duration > 0.0)) throw ValidationError("duration", "must be positive");
    const long long seed = root.integer("seed", 0);
    if (seed < 0) throw ValidationError("seed", "must be non-negative");
    s.seed = static_cast<std::uint64_t>(seed);
    try {
        s.policy = policy_from_string(root.string("policy", "esac"));
    } catch (const ValidationError&) {
        throw ValidationError("policy", "must be 'esac' or 'geer'");
    }
    if (root.has("initial_position")) s.initial_position = root.vec("initial_position", Vec(), s.dimension);

    if (const json* w = root.object("world")) {
        if (!w->is_array()) throw ValidationError("world", "expected an array of shapes");
        for (std::size_t i = 0; i < w->size(); ++i) {
            s.world.push_back(parse_shape((*w)[i], "world[" + std::to_string(i) + "]", s.dimension));
        }
    }

    s.esac = EsacParams::for_dimension(s.dimension);
    if (const json* d = root.object("dynamics")) {
        ObjectReader r(*d, "dynamics");
        s.esac.dt = r.number("dt", s.esac.dt);
        s.esac.sample_time = r.number("sample_time", s.esac.sample_time);
        s.esac.u_max = r.number("u_max", s.esac.u_max);
        r.finish();
    }
    if (const json* e = root.object("esac")) {
        ObjectReader r(*e, "esac");
        s.esac.q = r.number("q", s.esac.q);
        s.esac.r_diag = r.vec("R", s.esac.r_diag, s.dimension);
        s.esac.horizon = r.number("horizon", s.esac.horizon);
        s.esac.alpha_d = r.number("alpha_d", s.esac.alpha_d);
        s.esac.u_default = r.vec("u_default", s.esac.u_default, s.dimension);
        r.finish();
    }
    if (const json* e = root.object("estimator")) {
        ObjectReader r(*e, "estimator");
        s.estimator.representation = representation_from_string(r.string("representation", "svm"));
        s.estimator.sigma = r.number("sigma", s.estimator.sigma);
        s.estimator.C = r.number("C", s.estimator.C);
        s.estimator.noise = r.number("noise", s.estimator.noise);
        const long long ccap = r.integer("contact_cap", static_cast<long long>(s.estimator.caps.contact_cap));
        const long long fcap = r.integer("free_cap", static_cast<long long>(s.estimator.caps.free_cap));
        if (ccap < 1) throw ValidationError("estimator.contact_cap", "must be at least 1");
        if (fcap < 1) throw ValidationError("estimator.free_cap", "must be at least 1");
        s.estimator.caps.contact_cap = static_cast<std::size_t>(ccap);
        s.estimator.caps.free_cap = static_cast<std::size_t>(fcap);
        s.estimator.caps.cell = r.number("thinning_cell", s.estimator.caps.cell);
        s.estimator.refit_interval = r.number("refit_interval", s.estimator.refit_interval);
        const long long rc = r.integer("refit_count", static_cast<long long>(s.estimator.refit_count));
        if (rc < 1) throw ValidationError("estimator.refit_count", "must be at least 1");
        s.estimator.refit_count = static_cast<std::size_t>(rc);
        s.estimator.epsilon = r.number("epsilon", s.estimator.epsilon);
        s.estimator.free_interval = r.number("free_interval", s.estimator.free_interval);
        r.finish();
    }
    s.k_max = s.dimension == 2 ? 10 : 6;
    s.grid = s.dimension == 2 ? 64 : 32;
    if (const json* e = root.object("ergodic")) {
        ObjectReader r(*e, "ergodic");
        s.k_max = static_cast<int>(r.integer("k_max", s.k_max));
        s.grid = static_cast<int>(r.integer("grid", s.grid));
        r.finish();
    }
    if (const json* g = root.object("geer")) {
        ObjectReader r(*g, "geer");
        s.geer.candidate_count = static_cast<int>(r.integer("candidates", s.geer.candidate_count));
        s.geer.radius = r.number("radius", s.geer.radius);
        s.geer.replan_interval = r.number("replan_interval", s.geer.replan_interval);
        s.geer.kp = r.number("kp", s.geer.kp);
        s.geer.kd = r.number("kd", s.geer.kd);
        s.geer.reach_tolerance = r.number("reach_tolerance", s.geer.reach_tolerance);
        r.finish();
    }
    s.geer.u_max = s.esac.u_max;

    s.output.snapshot_times =
        s.dimension == 2 ? std::vector<double>{0.1, 1.0, 2.0, 6.0, 11.0, 30.0} : std::vector<double>{s.duration};
    s.output.metrics_interval = s.esac.sample_time;
    s.output.metrics_grid = s.dimension == 2 ? 128 : 40;
    if (const json* o = root.object("output")) {
        ObjectReader r(*o, "output");
        s.output.snapshot_times = r.numbers("snapshot_times", s.output.snapshot_times);
        s.output.metrics_interval = r.number("metrics_interval", s.output.metrics_interval);
        s.output.metrics_grid = static_cast<int>(r.integer("metrics_grid", s.output.metrics_grid));
        r.finish();
    }
    root.finish();
    s.validate();
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("", "cannot open scenario file " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError("", "parse error in " + path.string() + ": " + e.what());
    }
    return parse_scenario(doc);
}

json scenario_to_json(const Scenario& s) {
    json j;
    j["name"] = s.name;
    j["dimension"] = s.dimension;
    j["duration"] = s.duration;
    j["seed"] = s.seed;
    j["policy"] = to_string(s.policy);
    j["initial_position"] = s.initial_position ? vec_json(*s.initial_position) : json(nullptr);
    j["world"] = json::array();
    for (const auto& shape : s.world) j["world"].push_back(shape_json(shape));
    j["dynamics"] = {{"dt", s.esac.dt}, {"sample_time", s.esac.sample_time}, {"u_max", s.esac.u_max}};
    j["esac"] = {{"q", s.esac.q},
                 {"R", vec_json(s.esac.r_diag)},
                 {"horizon", s.esac.horizon},
                 {"alpha_d", s.esac.alpha_d},
                 {"u_default", vec_json(s.esac.u_default)}};
    j["estimator"] = {{"representation", to_string(s.estimator.representation)},
                      {"sigma", s.estimator.sigma},
                      {"C", s.estimator.C},
                      {"noise", s.estimator.noise},
                      {"contact_cap", s.estimator.caps.contact_cap},
                      {"free_cap", s.estimator.caps.free_cap},
                      {"thinning_cell", s.estimator.caps.cell},
                      {"refit_interval", s.estimator.refit_interval},
                      {"refit_count", s.estimator.refit_count},
                      {"epsilon", s.estimator.epsilon},
                      {"free_interval", s.estimator.free_interval}};
    j["ergodic"] = {{"k_max", s.k_max}, {"grid", s.grid}};
    j["geer"] = {{"candidates", s.geer.candidate_count},
                 {"radius", s.geer.radius},
                 {"replan_interval", s.geer.replan_interval},
                 {"kp", s.geer.kp},
                 {"kd", s.geer.kd},
                 {"reach_tolerance", s.geer.reach_tolerance}};
    j["output"] = {{"snapshot_times", s.output.snapshot_times},
                   {"metrics_interval", s.output.metrics_interval},
                   {"metrics_grid", s.output.metrics_grid}};
    return j;
}

}  // namespace ergosense
