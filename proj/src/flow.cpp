#include "machmin/flow.hpp"

#include <vector>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/push_relabel_max_flow.hpp>

namespace machmin {

namespace {

using Traits = boost::adjacency_list_traits<boost::vecS, boost::vecS, boost::directedS>;
using Digraph = boost::adjacency_list<
    boost::vecS, boost::vecS, boost::directedS, boost::no_property,
    boost::property<boost::edge_capacity_t, MaxFlow::Cap,
                    boost::property<boost::edge_residual_capacity_t, MaxFlow::Cap,
                                    boost::property<boost::edge_reverse_t, Traits::edge_descriptor>>>>;

}  // namespace

struct MaxFlow::Graph {
    Digraph g;
    std::vector<Traits::edge_descriptor> forward;
};

MaxFlow::MaxFlow(int nodes) : g_(std::make_unique<Graph>())
{
    g_->g = Digraph(static_cast<std::size_t>(nodes));
}

MaxFlow::~MaxFlow() = default;
MaxFlow::MaxFlow(MaxFlow&&) noexcept = default;
MaxFlow& MaxFlow::operator=(MaxFlow&&) noexcept = default;

int MaxFlow::nodes() const
{
    return static_cast<int>(boost::num_vertices(g_->g));
}

int MaxFlow::add_edge(int from, int to, Cap capacity)
{
    auto& g = g_->g;
    auto cap = boost::get(boost::edge_capacity, g);
    auto rev = boost::get(boost::edge_reverse, g);
    const auto e = boost::add_edge(from, to, g).first;
    const auto r = boost::add_edge(to, from, g).first;
    cap[e] = capacity;
    cap[r] = 0;
    rev[e] = r;
    rev[r] = e;
    g_->forward.push_back(e);
    return static_cast<int>(g_->forward.size()) - 1;
}

MaxFlow::Cap MaxFlow::run(int source, int sink)
{
    return boost::push_relabel_max_flow(g_->g, source, sink);
}

MaxFlow::Cap MaxFlow::flow(int edge) const
{
    const auto e = g_->forward.at(static_cast<std::size_t>(edge));
    return boost::get(boost::edge_capacity, g_->g)[e] - boost::get(boost::edge_residual_capacity, g_->g)[e];
}

}  // namespace machmin
