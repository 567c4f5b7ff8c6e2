#pragma once

#include <map>
#include <string>
#include <vector>

namespace netinfer::infer {

enum class EntityKind { System, Host };

/// Union-find over entity ids. The representative of a class is its
/// lexicographically smallest id; ids never added are their own class.
class Partition {
public:
    explicit Partition(EntityKind kind = EntityKind::System) : kind_(kind) {}

    EntityKind kind() const { return kind_; }

    void add(const std::string& id);
    void unite(const std::string& a, const std::string& b);

    bool contains(const std::string& id) const { return index_.contains(id); }
    std::string canonical(const std::string& id) const;
    bool equivalent(const std::string& a, const std::string& b) const { return canonical(a) == canonical(b); }

    /// Members of the class of `id`, sorted.
    std::vector<std::string> members(const std::string& id) const;
    /// Every class, sorted by representative; members sorted.
    std::vector<std::vector<std::string>> classes() const;

    std::size_t size() const { return ids_.size(); }
    std::size_t class_count() const;

private:
    std::size_t find(std::size_t i) const;

    EntityKind kind_;
    std::vector<std::string> ids_;
    std::map<std::string, std::size_t> index_;
    mutable std::vector<std::size_t> parent_;
    std::vector<std::size_t> rank_;
    std::vector<std::size_t> smallest_;  // per root: index of the smallest id
};

}  // namespace netinfer::infer
