#pragma once

#include <vector>

namespace ptile {

/// Maximum bipartite matching by repeated augmenting paths (Kuhn). `adj[l]` lists the
/// right neighbours of left vertex l; right vertices are 0..right-1. Entries of the result
/// give the right partner of each left vertex, or -1.
class BipartiteMatcher {
public:
    BipartiteMatcher(const std::vector<std::vector<int>>& adj, int right)
        : adj_(adj), match_right_(static_cast<std::size_t>(right), -1),
          match_left_(adj.size(), -1), seen_(static_cast<std::size_t>(right), 0)
    {
    }

    int run()
    {
        int size = 0;
        for (std::size_t l = 0; l < adj_.size(); ++l) {
            ++stamp_;
            size += augment(static_cast<int>(l));
        }
        return size;
    }

    const std::vector<int>& left_partner() const { return match_left_; }
    const std::vector<int>& right_partner() const { return match_right_; }

private:
    bool augment(int l)
    {
        for (int r : adj_[static_cast<std::size_t>(l)]) {
            auto ri = static_cast<std::size_t>(r);
            if (seen_[ri] == stamp_)
                continue;
            seen_[ri] = stamp_;
            if (match_right_[ri] < 0 || augment(match_right_[ri])) {
                match_right_[ri] = l;
                match_left_[static_cast<std::size_t>(l)] = r;
                return true;
            }
        }
        return false;
    }

    const std::vector<std::vector<int>>& adj_;
    std::vector<int> match_right_;
    std::vector<int> match_left_;
    std::vector<int> seen_;
    int stamp_ = 0;
};

inline int max_matching_size(const std::vector<std::vector<int>>& adj, int right)
{
    return BipartiteMatcher(adj, right).run();
}

} // namespace ptile
