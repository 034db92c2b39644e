#pragma once

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace logscar {

// Nonnegative integer vector of length r >= 1.
class MultiIndex {
public:
    MultiIndex() = default;
    MultiIndex(std::initializer_list<int> entries);
    explicit MultiIndex(std::vector<int> entries);

    static MultiIndex zero(int r);
    static MultiIndex unit(int r, int axis);

    int size() const { return static_cast<int>(entries_.size()); }
    int operator[](int i) const { return entries_[static_cast<std::size_t>(i)]; }
    const std::vector<int>& entries() const { return entries_; }
    int total() const;
    int max_entry() const;

    // Copy with entry `axis` shifted by delta; throws if the result is negative.
    MultiIndex shifted(int axis, int delta) const;

    MultiIndex operator+(const MultiIndex& o) const;
    std::string str() const;

    auto operator<=>(const MultiIndex&) const = default;
    bool operator==(const MultiIndex&) const = default;

private:
    std::vector<int> entries_;
};

// Linear position of m in the tensor basis {0..cap-1}^r (axis 0 slowest).
std::size_t linear_index(const MultiIndex& m, int cap);
MultiIndex from_linear_index(std::size_t idx, int r, int cap);
std::size_t tensor_dim(int r, int cap);

} // namespace logscar
