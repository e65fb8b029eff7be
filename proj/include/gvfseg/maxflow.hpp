#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <vector>

namespace gvfseg {

/// Sentinel for infinite edge capacity. Realized at solve time as
/// (sum of finite capacities and |vertex weights|) + 1, so no finite cut ever
/// prefers severing such an edge.
constexpr std::int64_t kInfCap = std::numeric_limits<std::int64_t>::max();

/// Vertices with signed weights and directed edges with non-negative
/// capacities; solved for the subset H minimizing
///   gamma(H) = sum_{v in H} w(v) + sum_{(u,v): u in H, v not in H} c(u,v).
struct SExcessGraph {
    std::vector<std::int64_t> vertex_weight;
    struct Edge {
        int u, v;
        std::int64_t cap;
    };
    std::vector<Edge> edges;

    int n() const { return static_cast<int>(vertex_weight.size()); }

    int add_vertex(std::int64_t w) {
        vertex_weight.push_back(w);
        return n() - 1;
    }

    void add_edge(int u, int v, std::int64_t cap);
};

struct CutResult {
    std::vector<char> source_set;  // membership in H
    std::int64_t objective = 0;    // gamma(H), recomputed from source_set
    std::int64_t flow_value = 0;   // max flow of the reduced s-t instance
};

CutResult solve_s_excess(const SExcessGraph& g);

/// Boykov-Kolmogorov dual-tree augmenting-path max-flow.
class MaxFlow {
public:
    explicit MaxFlow(int n);

    void add_edge(int u, int v, std::int64_t cap, std::int64_t rev_cap = 0);
    void add_terminal(int v, std::int64_t source_cap, std::int64_t sink_cap);

    std::int64_t solve();

    /// Source side of a minimum cut: residual reachability from the source
    /// after the flow is maximal. Valid only after solve().
    const std::vector<char>& min_cut_source_side() const { return source_side_; }

    /// Remaining source capacity of v (after solve: residual).
    std::int64_t terminal_residual(int v) const { return tr_cap_[v]; }

private:
    static constexpr int kParentTerminal = -1;
    static constexpr int kParentNone = -2;

    int sister(int a) const { return a ^ 1; }
    void augment(int boundary_arc);
    void process_orphans();
    void make_orphan(int v);
    bool has_valid_origin(int v);

    int n_;
    std::vector<int> first_arc_;
    std::vector<int> arc_next_;
    std::vector<int> arc_head_;
    std::vector<std::int64_t> rcap_;
    std::vector<std::int64_t> tr_cap_;  // >0: residual cap from source; <0: to sink
    std::vector<std::int64_t> scap_, tcap_;

    std::vector<int> parent_arc_;
    std::vector<std::uint8_t> tree_;  // 0 free, 1 source, 2 sink
    std::vector<std::uint64_t> ts_;
    std::vector<int> dist_;
    std::vector<int> active_;
    std::size_t active_pos_ = 0;
    std::vector<int> orphans_;
    std::uint64_t time_ = 0;
    std::int64_t flow_ = 0;
    std::vector<char> source_side_;
};

struct Arc {
    int u, v;
    std::int64_t cap;
};

struct FlowResult {
    std::int64_t flow = 0;
    std::vector<char> source_side;
};

/// Max flow / min cut between explicit graph vertices s and t.
FlowResult max_flow(int n, int s, int t, const std::vector<Arc>& arcs);

// Textual debug format: "sexcess n m", n weight lines, m lines "u v cap|INF".
SExcessGraph read_sexcess(std::istream& in);
void write_sexcess(const SExcessGraph& g, std::ostream& out);

}  // namespace gvfseg
