#pragma once

#include <cstdint>
#include <memory>

namespace machmin {

/// Integer-capacity max-flow (Boost.Graph push-relabel). Edges are numbered
/// in insertion order; the flow is a deterministic function of that order.
class MaxFlow {
public:
    using Cap = std::int64_t;

    explicit MaxFlow(int nodes = 0);
    ~MaxFlow();
    MaxFlow(MaxFlow&&) noexcept;
    MaxFlow& operator=(MaxFlow&&) noexcept;

    /// Returns the edge handle for flow() queries.
    int add_edge(int from, int to, Cap capacity);
    Cap run(int source, int sink);
    Cap flow(int edge) const;
    int nodes() const;

private:
    struct Graph;
    std::unique_ptr<Graph> g_;
};

}  // namespace machmin
