#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ergosense/grid.hpp"
#include "ergosense/types.hpp"

namespace ergosense {

enum class ShapeKind { Circle, Square, Diamond, Triangle, Clover, SineWall, Torus };

std::string to_string(ShapeKind kind);
ShapeKind shape_kind_from_string(const std::string& name);

// Kind-specific parameters; unused fields are ignored by the kind.
struct ShapeSpec {
    ShapeKind kind = ShapeKind::Circle;
    Vec center;
    double radius = 0.0;           // circle radius, triangle circumradius, clover base radius
    double half_width = 0.0;       // square/diamond half side length
    double rotation = 0.0;         // radians
    double amplitude = 0.0;        // clover petal amplitude, sine-wall amplitude
    double frequency = 0.0;        // sine-wall spatial frequency (cycles per unit)
    double offset = 0.0;           // sine-wall mean height
    double major_radius = 0.0;     // torus
    double minor_radius = 0.0;     // torus
    int petals = 4;                // clover
};

// Analytic boundary function: negative inside, positive outside, zero on the boundary.
class Shape {
public:
    const ShapeSpec& spec() const { return spec_; }
    ShapeKind kind() const { return spec_.kind; }
    int dim() const { return spec_.kind == ShapeKind::Torus ? 3 : 2; }

    double boundary_value(const Vec& x) const;
    // Analytic where available, central differences (h = 1e-5) otherwise.
    Vec gradient(const Vec& x) const;
    bool is_signed_distance() const;
    // Axis-aligned bounds of the interior.
    std::pair<Vec, Vec> bounds() const;

private:
    friend Shape make_shape(const ShapeSpec& spec);
    explicit Shape(ShapeSpec spec) : spec_(std::move(spec)) {}

    ShapeSpec spec_;
};

inline constexpr double kShapeMargin = 0.02;

// Validates parameters and the box margin; throws ValidationError.
Shape make_shape(const ShapeSpec& spec);

Shape make_circle(const Vec& center, double radius);
Shape make_square(const Vec& center, double half_width, double rotation = 0.0);
Shape make_diamond(const Vec& center, double half_width);
Shape make_triangle(const Vec& center, double circumradius, double rotation = 0.0);
Shape make_clover(const Vec& center, double base_radius, double amplitude, int petals = 4,
                  double rotation = 0.0);
Shape make_sine_wall(double offset, double amplitude, double frequency);
Shape make_torus(const Vec& center, double major_radius, double minor_radius);

double boundary_value(const Shape& shape, const Vec& x);

class World {
public:
    explicit World(int dim = 2) : dim_(dim) {}
    // Throws ValidationError if dimensions disagree or shapes come closer than the margin.
    World(int dim, std::vector<Shape> shapes);

    int dim() const { return dim_; }
    const std::vector<Shape>& shapes() const { return shapes_; }
    bool empty() const { return shapes_.empty(); }

    // min over shapes of the boundary value; +inf for an empty world.
    double min_value(const Vec& x) const;

private:
    int dim_;
    std::vector<Shape> shapes_;
};

struct Measurement {
    double time = 0.0;
    Vec location;
    int label = 0;  // 1 = collision, 0 = free space
};

// Binary contact model: 1 when any boundary value is <= 0.
int measure(const Vec& x, const World& world);

std::vector<std::uint8_t> interior_mask(const World& world, const GridSpec& grid);

}  // namespace ergosense
