#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "varidual/extended_value.hpp"
#include "varidual/tensor_point.hpp"

namespace varidual {

// One axis of a rectangular node grid: nodes lo, lo+step, ..., lo+(count-1)*step.
struct AxisGrid {
    double lo = 0.0;
    double step = 1.0;
    int count = 1;

    double hi() const { return lo + step * (count - 1); }
    double coord(int i) const { return lo + step * i; }
    // Nearest node index, clamped into range.
    int nearest(double x) const;
};

// Rectangular grid in dimension m <= 3 with row-major linear indexing
// (last axis fastest).
class GridLayout {
  public:
    GridLayout() = default;
    explicit GridLayout(std::vector<AxisGrid> axes);

    // Symmetric box [-radius, radius]^m with a node at 0; the box is widened
    // to the next whole step so 0 is always a node.
    static GridLayout centered(int m, double radius, double spacing);
    static GridLayout centered(const std::vector<double>& radius, const std::vector<double>& spacing);

    int dim() const { return static_cast<int>(axes_.size()); }
    const AxisGrid& axis(int a) const { return axes_[static_cast<std::size_t>(a)]; }
    std::int64_t node_count() const { return total_; }

    std::int64_t linear_index(const int* multi) const;
    void multi_index(std::int64_t lin, int* multi) const;
    TensorPoint coords(const int* multi) const;
    TensorPoint coords_linear(std::int64_t lin) const;

    bool contains(const TensorPoint& p) const;

    friend bool operator==(const GridLayout& a, const GridLayout& b);

  private:
    std::vector<AxisGrid> axes_;
    std::int64_t total_ = 0;
};

// Report of a convexity scan over a sampled function.
struct ConvexityReport {
    bool midpoint_convex = true;        // along axis and diagonal grid lines
    bool finite_set_line_convex = true; // finite nodes contiguous along grid lines
    double worst_violation = 0.0;       // most negative convexity margin found
    std::int64_t worst_node = -1;
    bool ok() const { return midpoint_convex && finite_set_line_convex; }
};

// Extended-real-valued function sampled on a rectangular grid.
class SampledConvexFunction {
  public:
    SampledConvexFunction() = default;
    explicit SampledConvexFunction(GridLayout layout);

    const GridLayout& layout() const { return layout_; }
    int dim() const { return layout_.dim(); }
    std::int64_t node_count() const { return layout_.node_count(); }

    ExtendedValue at(std::int64_t lin) const {
        return finite_[static_cast<std::size_t>(lin)] ? ExtendedValue::finite(values_[static_cast<std::size_t>(lin)])
                                                      : ExtendedValue::infinity();
    }
    bool is_finite(std::int64_t lin) const { return finite_[static_cast<std::size_t>(lin)] != 0; }
    double raw(std::int64_t lin) const { return values_[static_cast<std::size_t>(lin)]; }

    void set(std::int64_t lin, ExtendedValue v);
    void set_finite(std::int64_t lin, double v);
    void set_infinite(std::int64_t lin);

    std::int64_t finite_count() const;

    // Multilinear interpolation; +inf when the point leaves the grid box or
    // any vertex of the containing cell is infinite.
    ExtendedValue interpolate(const TensorPoint& p) const;

    // Midpoint convexity along axis-parallel and diagonal grid lines, with
    // tolerance 1e-12 * local scale, plus contiguity of the finite node set
    // along those lines. For m >= 2 the line checks are the implemented
    // surrogate for full discrete convexity of the finite set.
    ConvexityReport check_convexity() const;

    // CSV: header, then one row per node, columns = coordinates, value,
    // finite flag. Finite values survive a round trip at 17 digits.
    void write_csv(std::ostream& os) const;
    void write_csv_file(const std::string& path) const;
    static SampledConvexFunction read_csv(std::istream& is);
    static SampledConvexFunction read_csv_file(const std::string& path);

  private:
    GridLayout layout_;
    std::vector<double> values_;
    std::vector<std::uint8_t> finite_;
};

}  // namespace varidual
