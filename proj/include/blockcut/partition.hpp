#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "blockcut/errors.hpp"
#include "blockcut/graph.hpp"

namespace blockcut {

using ClusterId = std::uint32_t;

/// Assignment of every node to exactly one cluster. Cluster ids are always
/// stored normalized: dense 0..num_clusters-1, numbered in order of first
/// appearance over node ids. Two partitions induce the same clustering iff
/// their assignment vectors compare equal.
class Partition {
  public:
    Partition() = default;

    /// Normalizes an arbitrary assignment vector (any cluster labels).
    static Partition from_assignment(const std::vector<ClusterId>& raw) {
        Partition p;
        p.assignment_.resize(raw.size());
        std::vector<ClusterId> remap;
        constexpr ClusterId unset = std::numeric_limits<ClusterId>::max();
        ClusterId max_label = 0;
        for (ClusterId c : raw) max_label = std::max(max_label, c);
        remap.assign(static_cast<std::size_t>(max_label) + 1, unset);
        ClusterId next = 0;
        for (std::size_t v = 0; v < raw.size(); ++v) {
            ClusterId c = raw[v];
            if (remap[c] == unset) remap[c] = next++;
            p.assignment_[v] = remap[c];
        }
        p.num_clusters_ = next;
        return p;
    }

    /// Builds from explicit member sets. The sets must partition 0..n-1.
    static Partition from_clusters(std::size_t num_nodes, const std::vector<NodeSet>& clusters) {
        constexpr ClusterId unset = std::numeric_limits<ClusterId>::max();
        std::vector<ClusterId> raw(num_nodes, unset);
        for (std::size_t c = 0; c < clusters.size(); ++c) {
            for (NodeId v : clusters[c]) {
                if (v >= num_nodes) throw domain_error("cluster member out of range");
                if (raw[v] != unset) throw domain_error("node assigned to two clusters");
                raw[v] = static_cast<ClusterId>(c);
            }
        }
        for (std::size_t v = 0; v < num_nodes; ++v)
            if (raw[v] == unset)
                throw domain_error("node " + std::to_string(v) + " not covered by any cluster");
        return from_assignment(raw);
    }

    static Partition singletons(std::size_t num_nodes) {
        std::vector<ClusterId> raw(num_nodes);
        for (std::size_t v = 0; v < num_nodes; ++v) raw[v] = static_cast<ClusterId>(v);
        return from_assignment(raw);
    }

    static Partition one_block(std::size_t num_nodes) {
        return from_assignment(std::vector<ClusterId>(num_nodes, 0));
    }

    std::size_t num_nodes() const { return assignment_.size(); }
    std::size_t num_clusters() const { return num_clusters_; }

    ClusterId cluster_of(NodeId v) const {
        if (v >= assignment_.size()) throw domain_error("node id out of range");
        return assignment_[v];
    }

    const std::vector<ClusterId>& assignment() const { return assignment_; }

    /// Member sets indexed by cluster id; each sorted ascending.
    std::vector<NodeSet> clusters() const {
        std::vector<NodeSet> out(num_clusters_);
        for (std::size_t v = 0; v < assignment_.size(); ++v)
            out[assignment_[v]].push_back(static_cast<NodeId>(v));
        return out;
    }

    std::vector<std::size_t> cluster_sizes() const {
        std::vector<std::size_t> sizes(num_clusters_, 0);
        for (ClusterId c : assignment_) ++sizes[c];
        return sizes;
    }

    /// True iff every cluster of this partition lies inside one cluster of
    /// `coarser` (the equivalence relation is a subset of coarser's).
    bool refines(const Partition& coarser) const {
        if (coarser.num_nodes() != num_nodes())
            throw domain_error("refines: partitions cover different node sets");
        constexpr ClusterId unset = std::numeric_limits<ClusterId>::max();
        std::vector<ClusterId> image(num_clusters_, unset);
        for (std::size_t v = 0; v < assignment_.size(); ++v) {
            ClusterId mine = assignment_[v];
            ClusterId theirs = coarser.assignment_[v];
            if (image[mine] == unset)
                image[mine] = theirs;
            else if (image[mine] != theirs)
                return false;
        }
        return true;
    }

    bool operator==(const Partition&) const = default;

  private:
    std::vector<ClusterId> assignment_;
    std::size_t num_clusters_ = 0;
};

} // namespace blockcut
