#ifndef NILRING_INDEX_SET_HPP
#define NILRING_INDEX_SET_HPP

#include <cstddef>
#include <utility>
#include <vector>

namespace nilring {

// Coordinate index set for degree d: all pairs (l1, l2) with 0 <= l2 < l1 <= d.
// Layout is the non-central block (1,0),(2,0),...,(d,0) followed by the
// central block in lexicographic order, so the two views are contiguous
// slices of any coordinate vector.
class IndexSet {
public:
    explicit IndexSet(int d);

    int d() const { return d_; }
    int dprime() const { return d_ * (d_ - 1) / 2; }
    std::size_t size() const { return indices_.size(); }

    const std::pair<int, int>& index(std::size_t i) const { return indices_[i]; }
    const std::vector<std::pair<int, int>>& indices() const { return indices_; }

    // l1 + l2 of coordinate i.
    int weight(std::size_t i) const { return indices_[i].first + indices_[i].second; }

    // Sum of all weights; the scaling exponent of the dilation family.
    long homogeneous_dimension() const { return q_hom_; }

    // Position of (l1, l2), or npos if absent.
    std::size_t position(int l1, int l2) const;

    // Shared per-degree instance.
    static const IndexSet& get(int d);

private:
    int d_;
    std::vector<std::pair<int, int>> indices_;
    long q_hom_;
};

}  // namespace nilring

#endif
