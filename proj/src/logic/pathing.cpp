#include "nsrl/logic/pathing.hpp"

#include <deque>

namespace nsrl::logic {

std::vector<int> bfs_distances(
    int num_cells, int source,
    const std::function<void(int, std::vector<int>&)>& neighbors) {
  std::vector<int> dist(num_cells, kUnreachable);
  std::deque<int> queue;
  std::vector<int> adj;
  dist[source] = 0;
  queue.push_back(source);
  while (!queue.empty()) {
    const int cur = queue.front();
    queue.pop_front();
    adj.clear();
    neighbors(cur, adj);
    for (int nb : adj) {
      if (dist[nb] == kUnreachable) {
        dist[nb] = dist[cur] + 1;
        queue.push_back(nb);
      }
    }
  }
  return dist;
}

}  // namespace nsrl::logic
