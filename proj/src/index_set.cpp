#include "nilring/index_set.hpp"

#include <map>
#include <mutex>
#include <stdexcept>

namespace nilring {

IndexSet::IndexSet(int d) : d_(d) {
    if (d < 1) throw std::invalid_argument("degree must be >= 1");
    for (int l1 = 1; l1 <= d; ++l1) indices_.emplace_back(l1, 0);
    for (int l1 = 2; l1 <= d; ++l1)
        for (int l2 = 1; l2 < l1; ++l2) indices_.emplace_back(l1, l2);
    q_hom_ = 0;
    for (std::size_t i = 0; i < indices_.size(); ++i) q_hom_ += weight(i);
}

std::size_t IndexSet::position(int l1, int l2) const {
    for (std::size_t i = 0; i < indices_.size(); ++i)
        if (indices_[i].first == l1 && indices_[i].second == l2) return i;
    return static_cast<std::size_t>(-1);
}

const IndexSet& IndexSet::get(int d) {
    static std::mutex mu;
    static std::map<int, IndexSet> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(d);
    if (it == cache.end()) it = cache.emplace(d, IndexSet(d)).first;
    return it->second;
}

}  // namespace nilring
