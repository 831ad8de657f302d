#ifndef FAIRPIPE_GROUPS_HPP
#define FAIRPIPE_GROUPS_HPP

#include <algorithm>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "fairpipe/errors.hpp"

namespace fairpipe {

/// Ordered set of protected-group labels with one designated majority.
/// Label order is the emission order of every per-group report.
class GroupSet {
public:
    GroupSet(std::vector<std::string> labels, std::string_view majority)
        : labels_(std::move(labels)) {
        if (labels_.empty()) throw SpecError("group set must not be empty");
        for (std::size_t i = 0; i < labels_.size(); ++i) {
            for (std::size_t j = i + 1; j < labels_.size(); ++j) {
                if (labels_[i] == labels_[j])
                    throw SpecError("duplicate group label '" + labels_[i] + "'");
            }
        }
        auto it = std::find(labels_.begin(), labels_.end(), majority);
        if (it == labels_.end())
            throw SpecError("majority label '" + std::string(majority) + "' not in group set");
        majority_ = static_cast<std::size_t>(it - labels_.begin());
    }

    /// Two-group convenience: majority listed first.
    static GroupSet majority_minority(std::string majority = "majority",
                                      std::string minority = "minority") {
        std::string m = majority;
        return GroupSet({std::move(majority), std::move(minority)}, m);
    }

    std::size_t size() const { return labels_.size(); }
    const std::string& label(std::size_t i) const { return labels_.at(i); }
    const std::vector<std::string>& labels() const { return labels_; }
    std::size_t majority_index() const { return majority_; }
    const std::string& majority_label() const { return labels_[majority_]; }
    bool is_majority(std::string_view label) const { return label == labels_[majority_]; }

    std::size_t index_of(std::string_view label) const {
        for (std::size_t i = 0; i < labels_.size(); ++i)
            if (labels_[i] == label) return i;
        throw SpecError("unknown group label '" + std::string(label) + "'");
    }

    bool contains(std::string_view label) const {
        return std::any_of(labels_.begin(), labels_.end(),
                           [&](const std::string& l) { return l == label; });
    }

    /// All non-majority indices, in label order.
    std::vector<std::size_t> minority_indices() const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < labels_.size(); ++i)
            if (i != majority_) out.push_back(i);
        return out;
    }

    friend bool operator==(const GroupSet& a, const GroupSet& b) {
        return a.labels_ == b.labels_ && a.majority_ == b.majority_;
    }

private:
    std::vector<std::string> labels_;
    std::size_t majority_;
};

}  // namespace fairpipe

#endif  // FAIRPIPE_GROUPS_HPP
