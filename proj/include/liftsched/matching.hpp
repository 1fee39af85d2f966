#pragma once

#include <functional>
#include <vector>

namespace liftsched {

// Maximum-cardinality bipartite matching (Kuhn's augmenting paths).
// adj[l] lists right-side vertices of left vertex l; returns match_left with
// the partner of each left vertex, -1 when unmatched. Deterministic: left
// vertices are processed in index order.
inline std::vector<int> max_bipartite_matching(const std::vector<std::vector<int>>& adj,
                                               int right_count) {
    const int L = static_cast<int>(adj.size());
    std::vector<int> match_left(static_cast<std::size_t>(L), -1);
    std::vector<int> match_right(static_cast<std::size_t>(right_count), -1);
    std::vector<char> seen;

    std::function<bool(int)> augment = [&](int l) -> bool {
        for (int r : adj[static_cast<std::size_t>(l)]) {
            if (seen[static_cast<std::size_t>(r)]) continue;
            seen[static_cast<std::size_t>(r)] = 1;
            if (match_right[static_cast<std::size_t>(r)] < 0 ||
                augment(match_right[static_cast<std::size_t>(r)])) {
                match_left[static_cast<std::size_t>(l)] = r;
                match_right[static_cast<std::size_t>(r)] = l;
                return true;
            }
        }
        return false;
    };

    for (int l = 0; l < L; ++l) {
        seen.assign(static_cast<std::size_t>(right_count), 0);
        augment(l);
    }
    return match_left;
}

}  // namespace liftsched
