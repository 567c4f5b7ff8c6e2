#include "netinfer/inference/partition.hpp"

#include <algorithm>

namespace netinfer::infer {

void Partition::add(const std::string& id) {
    if (index_.contains(id)) return;
    std::size_t i = ids_.size();
    ids_.push_back(id);
    index_.emplace(id, i);
    parent_.push_back(i);
    rank_.push_back(0);
    smallest_.push_back(i);
}

std::size_t Partition::find(std::size_t i) const {
    std::size_t root = i;
    while (parent_[root] != root) root = parent_[root];
    while (parent_[i] != root) {
        std::size_t next = parent_[i];
        parent_[i] = root;
        i = next;
    }
    return root;
}

void Partition::unite(const std::string& a, const std::string& b) {
    add(a);
    add(b);
    std::size_t ra = find(index_.at(a));
    std::size_t rb = find(index_.at(b));
    if (ra == rb) return;
    if (rank_[ra] < rank_[rb]) std::swap(ra, rb);
    parent_[rb] = ra;
    if (rank_[ra] == rank_[rb]) ++rank_[ra];
    if (ids_[smallest_[rb]] < ids_[smallest_[ra]]) smallest_[ra] = smallest_[rb];
}

std::string Partition::canonical(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return id;
    return ids_[smallest_[find(it->second)]];
}

std::vector<std::string> Partition::members(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return {id};
    std::size_t root = find(it->second);
    std::vector<std::string> out;
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        if (find(i) == root) out.push_back(ids_[i]);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::vector<std::string>> Partition::classes() const {
    std::map<std::size_t, std::vector<std::string>> by_root;
    for (std::size_t i = 0; i < ids_.size(); ++i) by_root[find(i)].push_back(ids_[i]);
    std::vector<std::vector<std::string>> out;
    out.reserve(by_root.size());
    for (auto& [root, members] : by_root) {
        std::sort(members.begin(), members.end());
        out.push_back(std::move(members));
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return out;
}

std::size_t Partition::class_count() const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < ids_.size(); ++i) n += find(i) == i;
    return n;
}

}  // namespace netinfer::infer
