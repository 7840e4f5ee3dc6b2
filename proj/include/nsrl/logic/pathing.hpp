#pragma once

#include <functional>
#include <vector>

namespace nsrl::logic {

inline constexpr int kUnreachable = -1;

// Breadth-first distances from `source` over an arbitrary graph; cells not
// reached get kUnreachable. `neighbors(cell, out)` appends adjacent cells.
std::vector<int> bfs_distances(
    int num_cells, int source,
    const std::function<void(int, std::vector<int>&)>& neighbors);

}  // namespace nsrl::logic
