#include "ergosense/shapes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "ergosense/errors.hpp"

namespace ergosense {

namespace {

constexpr double kPi = std::numbers::pi;

Vec rotate2(const Vec& d, double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    return make_vec({c * d(0) - s * d(1), s * d(0) + c * d(1)});
}

double box_sdf(const Vec& x, const Vec& center, double half_width, double rotation) {
    // Work in the box frame.
    const Vec p = rotate2(x - center, -rotation);
    const double qx = std::abs(p(0)) - half_width;
    const double qy = std::abs(p(1)) - half_width;
    const double ox = std::max(qx, 0.0), oy = std::max(qy, 0.0);
    return std::sqrt(ox * ox + oy * oy) + std::min(std::max(qx, qy), 0.0);
}

double triangle_value(const Vec& x, const Vec& center, double circumradius, double rotation) {
    const double inradius = 0.5 * circumradius;
    const Vec d = x - center;
    double v = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i) {
        // Edge normals point away from vertices at rotation + pi/2 + i*2pi/3.
        const double a = rotation - kPi / 2.0 + i * 2.0 * kPi / 3.0;
        v = std::max(v, std::cos(a) * d(0) + std::sin(a) * d(1) - inradius);
    }
    return v;
}

double clover_radius(const ShapeSpec& s, double theta) {
    return s.radius + s.amplitude * std::cos(s.petals * (theta - s.rotation));
}

void require(bool ok, const std::string& field, const std::string& message) {
    if (!ok) throw ValidationError(field, message);
}

void require_center(const ShapeSpec& s, int dim) {
    require(s.center.size() == dim, "center", "center must have " + std::to_string(dim) + " components");
    for (int i = 0; i < dim; ++i) require(std::isfinite(s.center(i)), "center", "center must be finite");
}

}  // namespace

std::string to_string(ShapeKind kind) {
    switch (kind) {
        case ShapeKind::Circle: return "circle";
        case ShapeKind::Square: return "square";
        case ShapeKind::Diamond: return "diamond";
        case ShapeKind::Triangle: return "triangle";
        case ShapeKind::Clover: return "clover";
        case ShapeKind::SineWall: return "sine_wall";
        case ShapeKind::Torus: return "torus";
    }
    return "unknown";
}

ShapeKind shape_kind_from_string(const std::string& name) {
    for (auto k : {ShapeKind::Circle, ShapeKind::Square, ShapeKind::Diamond, ShapeKind::Triangle,
                   ShapeKind::Clover, ShapeKind::SineWall, ShapeKind::Torus}) {
        if (to_string(k) == name) return k;
    }
    throw ValidationError("kind", "unknown shape kind '" + name + "'");
}

double Shape::boundary_value(const Vec& x) const {
    const ShapeSpec& s = spec_;
    switch (s.kind) {
        case ShapeKind::Circle:
            return (x - s.center).norm() - s.radius;
        case ShapeKind::Square:
            return box_sdf(x, s.center, s.half_width, s.rotation);
        case ShapeKind::Diamond:
            return box_sdf(x, s.center, s.half_width, kPi / 4.0);
        case ShapeKind::Triangle:
            return triangle_value(x, s.center, s.radius, s.rotation);
        case ShapeKind::Clover: {
            const Vec d = x - s.center;
            const double r = d.norm();
            const double theta = std::atan2(d(1), d(0));
            return r - clover_radius(s, theta);
        }
        case ShapeKind::SineWall:
            return x(1) - (s.offset + s.amplitude * std::sin(2.0 * kPi * s.frequency * x(0)));
        case ShapeKind::Torus: {
            const Vec d = x - s.center;
            const double rho = std::hypot(d(0), d(1));
            return std::hypot(rho - s.major_radius, d(2)) - s.minor_radius;
        }
    }
    return std::numeric_limits<double>::infinity();
}

Vec Shape::gradient(const Vec& x) const {
    const ShapeSpec& s = spec_;
    switch (s.kind) {
        case ShapeKind::Circle: {
            const Vec d = x - s.center;
            const double r = d.norm();
            if (r > 1e-12) return d / r;
            break;
        }
        case ShapeKind::SineWall:
            return make_vec({-s.amplitude * 2.0 * kPi * s.frequency *
                                 std::cos(2.0 * kPi * s.frequency * x(0)),
                             1.0});
        case ShapeKind::Torus: {
            const Vec d = x - s.center;
            const double rho = std::hypot(d(0), d(1));
            const double q = std::hypot(rho - s.major_radius, d(2));
            if (rho > 1e-12 && q > 1e-12) {
                const double w = (rho - s.major_radius) / (q * rho);
                return make_vec({w * d(0), w * d(1), d(2) / q});
            }
            break;
        }
        default:
            break;
    }
    const double h = 1e-5;
    Vec g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        Vec xp = x, xm = x;
        xp(i) += h;
        xm(i) -= h;
        g(i) = (boundary_value(xp) - boundary_value(xm)) / (2.0 * h);
    }
    return g;
}

bool Shape::is_signed_distance() const {
    switch (spec_.kind) {
        case ShapeKind::Circle:
        case ShapeKind::Square:
        case ShapeKind::Diamond:
        case ShapeKind::Torus:
            return true;
        default:
            return false;
    }
}

std::pair<Vec, Vec> Shape::bounds() const {
    const ShapeSpec& s = spec_;
    switch (s.kind) {
        case ShapeKind::Circle:
            return {s.center.array() - s.radius, s.center.array() + s.radius};
        case ShapeKind::Square:
        case ShapeKind::Diamond: {
            const double rot = s.kind == ShapeKind::Diamond ? kPi / 4.0 : s.rotation;
            const double e = s.half_width * (std::abs(std::cos(rot)) + std::abs(std::sin(rot)));
            return {s.center.array() - e, s.center.array() + e};
        }
        case ShapeKind::Triangle: {
            Vec lo = s.center, hi = s.center;
            for (int i = 0; i < 3; ++i) {
                const double a = s.rotation + kPi / 2.0 + i * 2.0 * kPi / 3.0;
                const Vec v = s.center + s.radius * make_vec({std::cos(a), std::sin(a)});
                lo = lo.cwiseMin(v);
                hi = hi.cwiseMax(v);
            }
            return {lo, hi};
        }
        case ShapeKind::Clover: {
            const double r = s.radius + std::abs(s.amplitude);
            return {s.center.array() - r, s.center.array() + r};
        }
        case ShapeKind::SineWall:
            return {make_vec({0.0, 0.0}), make_vec({1.0, s.offset + std::abs(s.amplitude)})};
        case ShapeKind::Torus: {
            const double rxy = s.major_radius + s.minor_radius;
            return {s.center - make_vec({rxy, rxy, s.minor_radius}),
                    s.center + make_vec({rxy, rxy, s.minor_radius})};
        }
    }
    return {s.center, s.center};
}

Shape make_shape(const ShapeSpec& spec) {
    const ShapeSpec& s = spec;
    switch (s.kind) {
        case ShapeKind::Circle:
            require_center(s, 2);
            require(s.radius > 0.0, "radius", "radius must be positive");
            break;
        case ShapeKind::Square:
        case ShapeKind::Diamond:
            require_center(s, 2);
            require(s.half_width > 0.0, "half_width", "half_width must be positive");
            break;
        case ShapeKind::Triangle:
            require_center(s, 2);
            require(s.radius > 0.0, "radius", "circumradius must be positive");
            break;
        case ShapeKind::Clover:
            require_center(s, 2);
            require(s.radius > 0.0, "radius", "base radius must be positive");
            require(s.amplitude >= 0.0 && s.amplitude < s.radius, "amplitude",
                    "petal amplitude must be in [0, radius)");
            require(s.petals >= 1, "petals", "petal count must be positive");
            break;
        case ShapeKind::SineWall:
            require(std::isfinite(s.offset) && std::isfinite(s.amplitude) && std::isfinite(s.frequency),
                    "offset", "sine wall parameters must be finite");
            require(s.amplitude >= 0.0, "amplitude", "amplitude must be non-negative");
            require(s.frequency >= 0.0, "frequency", "frequency must be non-negative");
            break;
        case ShapeKind::Torus:
            require_center(s, 3);
            require(s.minor_radius > 0.0, "minor_radius", "minor radius must be positive");
            require(s.major_radius > s.minor_radius, "major_radius",
                    "major radius must exceed the minor radius");
            break;
    }
    Shape shape(spec);
    auto [lo, hi] = shape.bounds();
    if (s.kind == ShapeKind::SineWall) {
        // The wall spans the box horizontally; only its crest and trough must keep the margin.
        require(s.offset - s.amplitude >= kShapeMargin && s.offset + s.amplitude <= 1.0 - kShapeMargin,
                "offset", "sine wall must stay within the box margin");
    } else {
        for (Eigen::Index i = 0; i < lo.size(); ++i) {
            require(lo(i) >= kShapeMargin - 1e-12 && hi(i) <= 1.0 - kShapeMargin + 1e-12, "center",
                    to_string(s.kind) + " escapes the unit box margin");
        }
    }
    return shape;
}

Shape make_circle(const Vec& center, double radius) {
    ShapeSpec s;
    s.kind = ShapeKind::Circle;
    s.center = center;
    s.radius = radius;
    return make_shape(s);
}

Shape make_square(const Vec& center, double half_width, double rotation) {
    ShapeSpec s;
    s.kind = ShapeKind::Square;
    s.center = center;
    s.half_width = half_width;
    s.rotation = rotation;
    return make_shape(s);
}

Shape make_diamond(const Vec& center, double half_width) {
    ShapeSpec s;
    s.kind = ShapeKind::Diamond;
    s.center = center;
    s.half_width = half_width;
    return make_shape(s);
}

Shape make_triangle(const Vec& center, double circumradius, double rotation) {
    ShapeSpec s;
    s.kind = ShapeKind::Triangle;
    s.center = center;
    s.radius = circumradius;
    s.rotation = rotation;
    return make_shape(s);
}

Shape make_clover(const Vec& center, double base_radius, double amplitude, int petals, double rotation) {
    ShapeSpec s;
    s.kind = ShapeKind::Clover;
    s.center = center;
    s.radius = base_radius;
    s.amplitude = amplitude;
    s.petals = petals;
    s.rotation = rotation;
    return make_shape(s);
}

Shape make_sine_wall(double offset, double amplitude, double frequency) {
    ShapeSpec s;
    s.kind = ShapeKind::SineWall;
    s.center = make_vec({0.5, offset});
    s.offset = offset;
    s.amplitude = amplitude;
    s.frequency = frequency;
    return make_shape(s);
}

Shape make_torus(const Vec& center, double major_radius, double minor_radius) {
    ShapeSpec s;
    s.kind = ShapeKind::Torus;
    s.center = center;
    s.major_radius = major_radius;
    s.minor_radius = minor_radius;
    return make_shape(s);
}

double boundary_value(const Shape& shape, const Vec& x) { return shape.boundary_value(x); }

World::World(int dim, std::vector<Shape> shapes) : dim_(dim), shapes_(std::move(shapes)) {
    if (dim != 2 && dim != 3) throw ValidationError("dimension", "dimension must be 2 or 3");
    for (std::size_t i = 0; i < shapes_.size(); ++i) {
        if (shapes_[i].dim() != dim) {
            throw ValidationError("world[" + std::to_string(i) + "]",
                                  "shape dimension does not match the world dimension");
        }
    }
    if (shapes_.size() < 2) return;
    // Pairwise gap check by sampling: no point inside one shape may come within
    // the margin of another.
    const GridSpec probe(dim, dim == 2 ? 256 : 64);
    for (std::size_t idx = 0; idx < probe.size(); ++idx) {
        const Vec x = probe.cell_center(idx);
        for (std::size_t a = 0; a < shapes_.size(); ++a) {
            if (shapes_[a].boundary_value(x) > 0.0) continue;
            for (std::size_t b = 0; b < shapes_.size(); ++b) {
                if (b == a) continue;
                if (shapes_[b].boundary_value(x) < kShapeMargin) {
                    throw ValidationError("world[" + std::to_string(b) + "]",
                                          "shapes " + std::to_string(a) + " and " + std::to_string(b) +
                                              " overlap or are closer than the minimum gap");
                }
            }
        }
    }
}

double World::min_value(const Vec& x) const {
    double v = std::numeric_limits<double>::infinity();
    for (const auto& s : shapes_) v = std::min(v, s.boundary_value(x));
    return v;
}

int measure(const Vec& x, const World& world) {
    for (const auto& s : world.shapes()) {
        if (s.boundary_value(x) <= 0.0) return 1;
    }
    return 0;
}

std::vector<std::uint8_t> interior_mask(const World& world, const GridSpec& grid) {
    if (grid.dim != world.dim()) throw std::invalid_argument("grid/world dimension mismatch");
    std::vector<std::uint8_t> mask(grid.size(), 0);
    if (world.empty()) return mask;
    for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = static_cast<std::uint8_t>(measure(grid.cell_center(i), world));
    return mask;
}

}  // namespace ergosense
