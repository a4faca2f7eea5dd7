#pragma once

#include "rpack/geometry.hpp"

#include <vector>

namespace rpack {

inline constexpr int kDefaultCandidateCap = 120;

/// One candidate anchor for the front item, with provenance.
struct Candidate {
    Vec3 at;
    int space = -1;          // index into the spaces() of the generating state, -1 for IPs
    double space_volume = 0; // volume of the owning space (discrete mode)
    bool fits_space = false; // item fits inside the owning space at its corner
};

struct CandidateSet {
    std::vector<Candidate> anchors;
    bool empty() const { return anchors.empty(); }
    size_t size() const { return anchors.size(); }
};

// Maintains a maximal-empty-space set after a placement: spaces cut by the
// box are split into residual slabs and dominated spaces removed.
void ems_update(std::vector<Box>& spaces, const Box& placed);

// Continuous-mode planar anchors: intersections of the extended top-view
// edges of packed boxes with each other and with the container walls (wall
// lines offset so the item stays in-bounds). Edges extend until the first
// blocking footprint unless extend_through_blockers is set. Includes the
// origin for the empty bin.
std::vector<Vec3> intersection_points(const BinState& state, const Item& item,
                                      bool extend_through_blockers = false);

// Candidate anchors for the front item: EMS minimum corners (discrete) or
// intersection points (continuous), gravity-resolved via drop_z, filtered by
// is_feasible, ordered by (z, y, x, provenance) and truncated to cap.
CandidateSet candidates_for(const BinState& state, const Item& item,
                            int cap = kDefaultCandidateCap);

} // namespace rpack
