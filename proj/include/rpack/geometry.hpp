#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace rpack {

// Absolute tolerance for continuous-mode comparisons. Discrete-mode
// coordinates are small integers stored in doubles, so all comparisons there
// are exact and the tolerance is harmless.
inline constexpr double kGeomEps = 1e-9;

enum class Mode { Discrete, Continuous };

struct Error : std::runtime_error {
    std::string code;
    Error(std::string c, const std::string& what) : std::runtime_error(what), code(std::move(c)) {}
};

struct Vec3 {
    double x = 0, y = 0, z = 0;
    friend bool operator==(const Vec3& a, const Vec3& b) {
        return a.x == b.x && a.y == b.y && a.z == b.z;
    }
};

/// Cuboid item; extents along x/y/z. id is the instance-local ordinal.
struct Item {
    double w = 0, d = 0, h = 0;
    int id = -1;

    double volume() const { return w * d * h; }
    bool same_dims(const Item& o) const { return w == o.w && d == o.d && h == o.h; }
};

/// Axis-aligned box given by min corner and extents; occupies the
/// half-open region [x, x+w) x [y, y+d) x [z, z+h).
struct Box {
    double x = 0, y = 0, z = 0;
    double w = 0, d = 0, h = 0;

    double x2() const { return x + w; }
    double y2() const { return y + d; }
    double z2() const { return z + h; }
    double volume() const { return w * d * h; }

    // Interiors intersect with area/volume above tolerance; shared faces and
    // edges count as non-overlapping.
    bool overlaps(const Box& o) const {
        return x2() > o.x + kGeomEps && o.x2() > x + kGeomEps && y2() > o.y + kGeomEps &&
               o.y2() > y + kGeomEps && z2() > o.z + kGeomEps && o.z2() > z + kGeomEps;
    }
    bool overlaps_xy(const Box& o) const {
        return x2() > o.x + kGeomEps && o.x2() > x + kGeomEps && y2() > o.y + kGeomEps &&
               o.y2() > y + kGeomEps;
    }
    bool contains(const Box& o) const {
        return o.x >= x - kGeomEps && o.x2() <= x2() + kGeomEps && o.y >= y - kGeomEps &&
               o.y2() <= y2() + kGeomEps && o.z >= z - kGeomEps && o.z2() <= z2() + kGeomEps;
    }
    friend bool operator==(const Box& a, const Box& b) {
        return a.x == b.x && a.y == b.y && a.z == b.z && a.w == b.w && a.d == b.d && a.h == b.h;
    }
};

struct Container {
    double sx = 0, sy = 0, sz = 0;
    Mode mode = Mode::Discrete;
    // Minimum supported-area ratio for off-floor placements. The default is
    // calibrated so the heuristic policies land at their published nominal
    // utilizations; see README.
    double tau = 0.3;

    double volume() const { return sx * sy * sz; }
    Box as_box() const { return Box{0, 0, 0, sx, sy, sz}; }
};

struct Placement {
    int item_id = -1;
    Vec3 at;
};

struct PlacedItem {
    Item item;
    Vec3 at;
    Box box() const { return Box{at.x, at.y, at.z, item.w, item.d, item.h}; }
};

// Subtracts a placed box from a set of maximal empty spaces: every space the
// box cuts is replaced by up to six residual slabs, then spaces contained in
// another are dropped. Starting from the full container and applying this per
// placement keeps `spaces` equal to the exact set of maximal empty boxes.
void subtract_box(std::vector<Box>& spaces, const Box& placed);

/// Packing state: container, packed boxes, heightmap, observable queue and
/// the maintained maximal-empty-space set. A value type; operations below
/// return updated copies.
class BinState {
  public:
    BinState() = default;
    explicit BinState(Container c);

    const Container& container() const { return container_; }
    const std::vector<PlacedItem>& packed() const { return packed_; }
    const std::vector<Box>& spaces() const { return spaces_; }
    const std::vector<Item>& queue() const { return queue_; }
    std::vector<Item>& queue() { return queue_; }

    // Top of the packed stack over planar point (x, y); 0 on empty floor.
    double height_at(double x, double y) const;
    // Discrete-mode cell accessor (unit grid).
    double cell_height(int cx, int cy) const;
    int grid_x() const { return gx_; }
    int grid_y() const { return gy_; }

    double packed_volume() const { return packed_volume_; }
    double utilization() const { return packed_volume_ / container_.volume(); }

    // In-place variant of apply_placement; assumes feasibility was checked.
    void place(const Item& item, const Vec3& at);

  private:
    Container container_;
    std::vector<PlacedItem> packed_;
    std::vector<Box> spaces_;
    std::vector<Item> queue_;
    std::vector<double> heightmap_; // discrete mode only, gx_*gy_ cells
    int gx_ = 0, gy_ = 0;
    double packed_volume_ = 0;
};

enum class Violation { None, Containment, Overlap, Stability };

struct Feasibility {
    bool ok = false;
    Violation reason = Violation::None;
    explicit operator bool() const { return ok; }
};

const char* violation_name(Violation v);

// Smallest z at which the item, anchored at (x, y), overlaps no packed box.
// Equals the heightmap maximum over the footprint whenever no overhang leaves
// a reachable gap. Throws Error("footprint_out_of_bounds") if the footprint
// exceeds the container in x/y.
double drop_z(const BinState& state, const Item& item, double x, double y);

// Floor contact is always stable; otherwise requires supported-area ratio
// >= tau and the center of mass over the contact region's bounding rectangle.
bool stable(const BinState& state, const Item& item, const Vec3& at);
bool stable(const BinState& state, const Item& item, const Vec3& at, double tau);

// Containment, non-overlap and stability, reported in that order.
Feasibility is_feasible(const BinState& state, const Item& item, const Vec3& at);

// Returns the successor state with the item packed at `at` and removed from
// the queue front if it matches. Throws Error("infeasible_placement").
BinState apply_placement(const BinState& state, const Item& item, const Vec3& at);

} // namespace rpack
