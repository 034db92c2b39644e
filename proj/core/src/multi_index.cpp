#include "logscar/multi_index.hpp"

#include "logscar/error.hpp"

#include <algorithm>
#include <numeric>

namespace logscar {

MultiIndex::MultiIndex(std::initializer_list<int> entries) : MultiIndex(std::vector<int>(entries)) {}

MultiIndex::MultiIndex(std::vector<int> entries) : entries_(std::move(entries)) {
    if (entries_.empty()) throw ConfigError("multi-index must have length >= 1");
    for (int e : entries_)
        if (e < 0) throw ConfigError("multi-index entries must be nonnegative");
}

MultiIndex MultiIndex::zero(int r) {
    if (r < 1) throw ConfigError("multi-index length must be >= 1");
    return MultiIndex(std::vector<int>(static_cast<std::size_t>(r), 0));
}

MultiIndex MultiIndex::unit(int r, int axis) {
    MultiIndex m = zero(r);
    if (axis < 0 || axis >= r) throw ConfigError("axis out of range");
    m.entries_[static_cast<std::size_t>(axis)] = 1;
    return m;
}

int MultiIndex::total() const { return std::accumulate(entries_.begin(), entries_.end(), 0); }

int MultiIndex::max_entry() const {
    return entries_.empty() ? 0 : *std::max_element(entries_.begin(), entries_.end());
}

MultiIndex MultiIndex::shifted(int axis, int delta) const {
    if (axis < 0 || axis >= size()) throw ConfigError("axis out of range");
    std::vector<int> e = entries_;
    e[static_cast<std::size_t>(axis)] += delta;
    return MultiIndex(std::move(e));
}

MultiIndex MultiIndex::operator+(const MultiIndex& o) const {
    if (o.size() != size()) throw ConfigError("multi-index length mismatch");
    std::vector<int> e = entries_;
    for (std::size_t i = 0; i < e.size(); ++i) e[i] += o.entries_[i];
    return MultiIndex(std::move(e));
}

std::string MultiIndex::str() const {
    std::string s = "(";
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(entries_[i]);
    }
    return s + ")";
}

std::size_t linear_index(const MultiIndex& m, int cap) {
    std::size_t idx = 0;
    for (int i = 0; i < m.size(); ++i) {
        if (m[i] >= cap) throw ConfigError("multi-index " + m.str() + " outside basis cap " + std::to_string(cap));
        idx = idx * static_cast<std::size_t>(cap) + static_cast<std::size_t>(m[i]);
    }
    return idx;
}

MultiIndex from_linear_index(std::size_t idx, int r, int cap) {
    std::vector<int> e(static_cast<std::size_t>(r));
    for (int i = r - 1; i >= 0; --i) {
        e[static_cast<std::size_t>(i)] = static_cast<int>(idx % static_cast<std::size_t>(cap));
        idx /= static_cast<std::size_t>(cap);
    }
    return MultiIndex(std::move(e));
}

std::size_t tensor_dim(int r, int cap) {
    std::size_t d = 1;
    for (int i = 0; i < r; ++i) d *= static_cast<std::size_t>(cap);
    return d;
}

} // namespace logscar
