#include "gvfseg/maxflow.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace gvfseg {

void SExcessGraph::add_edge(int u, int v, std::int64_t cap) {
    if (u < 0 || u >= n() || v < 0 || v >= n())
        throw std::out_of_range("SExcessGraph::add_edge: vertex out of range");
    if (u == v) throw std::invalid_argument("SExcessGraph::add_edge: self-loop");
    if (cap < 0) throw std::invalid_argument("SExcessGraph::add_edge: negative capacity");
    edges.push_back({u, v, cap});
}

MaxFlow::MaxFlow(int n)
    : n_(n),
      first_arc_(n, -1),
      tr_cap_(n, 0),
      scap_(n, 0),
      tcap_(n, 0) {
    if (n <= 0) throw std::invalid_argument("MaxFlow: vertex count must be positive");
}

void MaxFlow::add_edge(int u, int v, std::int64_t cap, std::int64_t rev_cap) {
    if (u < 0 || u >= n_ || v < 0 || v >= n_)
        throw std::out_of_range("MaxFlow::add_edge: vertex out of range");
    if (u == v) throw std::invalid_argument("MaxFlow::add_edge: self-loop");
    if (cap < 0 || rev_cap < 0)
        throw std::invalid_argument("MaxFlow::add_edge: negative capacity");
    int a = static_cast<int>(arc_head_.size());
    arc_head_.push_back(v);
    rcap_.push_back(cap);
    arc_next_.push_back(first_arc_[u]);
    first_arc_[u] = a;
    arc_head_.push_back(u);
    rcap_.push_back(rev_cap);
    arc_next_.push_back(first_arc_[v]);
    first_arc_[v] = a + 1;
}

void MaxFlow::add_terminal(int v, std::int64_t source_cap, std::int64_t sink_cap) {
    if (v < 0 || v >= n_) throw std::out_of_range("MaxFlow::add_terminal: vertex out of range");
    if (source_cap < 0 || sink_cap < 0)
        throw std::invalid_argument("MaxFlow::add_terminal: negative capacity");
    scap_[v] += source_cap;
    tcap_[v] += sink_cap;
}

void MaxFlow::make_orphan(int v) {
    parent_arc_[v] = kParentNone;
    orphans_.push_back(v);
}

void MaxFlow::augment(int a) {
    // a runs from a source-tree node into a sink-tree node with residual > 0.
    std::int64_t b = rcap_[a];
    for (int v = arc_head_[sister(a)];;) {
        if (parent_arc_[v] == kParentTerminal) {
            b = std::min(b, tr_cap_[v]);
            break;
        }
        int pa = parent_arc_[v];
        b = std::min(b, rcap_[sister(pa)]);
        v = arc_head_[pa];
    }
    for (int v = arc_head_[a];;) {
        if (parent_arc_[v] == kParentTerminal) {
            b = std::min(b, -tr_cap_[v]);
            break;
        }
        int pa = parent_arc_[v];
        b = std::min(b, rcap_[pa]);
        v = arc_head_[pa];
    }

    rcap_[a] -= b;
    rcap_[sister(a)] += b;
    for (int v = arc_head_[sister(a)];;) {
        if (parent_arc_[v] == kParentTerminal) {
            tr_cap_[v] -= b;
            if (tr_cap_[v] == 0) make_orphan(v);
            break;
        }
        int pa = parent_arc_[v];
        rcap_[sister(pa)] -= b;
        rcap_[pa] += b;
        int next = arc_head_[pa];
        if (rcap_[sister(pa)] == 0) make_orphan(v);
        v = next;
    }
    for (int v = arc_head_[a];;) {
        if (parent_arc_[v] == kParentTerminal) {
            tr_cap_[v] += b;
            if (tr_cap_[v] == 0) make_orphan(v);
            break;
        }
        int pa = parent_arc_[v];
        rcap_[pa] -= b;
        rcap_[sister(pa)] += b;
        int next = arc_head_[pa];
        if (rcap_[pa] == 0) make_orphan(v);
        v = next;
    }
    flow_ += b;
}

void MaxFlow::process_orphans() {
    ++time_;
    auto origin_dist = [&](int q) -> int {
        int d = 0;
        int v = q;
        while (true) {
            if (ts_[v] == time_) {
                d += dist_[v];
                break;
            }
            int pa = parent_arc_[v];
            if (pa == kParentTerminal) {
                ++d;
                ts_[v] = time_;
                dist_[v] = 1;
                break;
            }
            if (pa == kParentNone) return -1;
            ++d;
            v = arc_head_[pa];
        }
        int dd = d;
        v = q;
        while (ts_[v] != time_) {
            ts_[v] = time_;
            dist_[v] = dd--;
            v = arc_head_[parent_arc_[v]];
        }
        return d;
    };

    auto set_active = [&](int v) { active_.push_back(v); };

    while (!orphans_.empty()) {
        int v = orphans_.back();
        orphans_.pop_back();
        if (tree_[v] == 0) continue;
        const std::uint8_t t = tree_[v];

        int best_arc = -1;
        int best_dist = std::numeric_limits<int>::max();
        for (int a = first_arc_[v]; a != -1; a = arc_next_[a]) {
            int q = arc_head_[a];
            if (tree_[q] != t) continue;
            std::int64_t res = (t == 1) ? rcap_[sister(a)] : rcap_[a];
            if (res <= 0) continue;
            int d = origin_dist(q);
            if (d >= 0 && d < best_dist) {
                best_dist = d;
                best_arc = a;
            }
        }
        if (best_arc != -1) {
            parent_arc_[v] = best_arc;
            dist_[v] = best_dist + 1;
            ts_[v] = time_;
        } else {
            for (int a = first_arc_[v]; a != -1; a = arc_next_[a]) {
                int q = arc_head_[a];
                if (tree_[q] != t) continue;
                std::int64_t res = (t == 1) ? rcap_[sister(a)] : rcap_[a];
                if (res > 0) set_active(q);
                int pq = parent_arc_[q];
                if (pq >= 0 && arc_head_[pq] == v) make_orphan(q);
            }
            tree_[v] = 0;
            parent_arc_[v] = kParentNone;
        }
    }
}

std::int64_t MaxFlow::solve() {
    parent_arc_.assign(n_, kParentNone);
    tree_.assign(n_, 0);
    ts_.assign(n_, 0);
    dist_.assign(n_, 0);
    active_.clear();
    active_pos_ = 0;
    orphans_.clear();
    time_ = 0;
    flow_ = 0;

    for (int v = 0; v < n_; ++v) {
        flow_ += std::min(scap_[v], tcap_[v]);
        tr_cap_[v] = scap_[v] - tcap_[v];
        if (tr_cap_[v] > 0) {
            tree_[v] = 1;
            parent_arc_[v] = kParentTerminal;
            dist_[v] = 1;
            active_.push_back(v);
        } else if (tr_cap_[v] < 0) {
            tree_[v] = 2;
            parent_arc_[v] = kParentTerminal;
            dist_[v] = 1;
            active_.push_back(v);
        }
    }

    while (active_pos_ < active_.size()) {
        int p = active_[active_pos_++];
        if (active_pos_ > (1u << 20) && active_pos_ * 2 > active_.size()) {
            // compact the consumed prefix
            active_.erase(active_.begin(), active_.begin() + static_cast<long>(active_pos_));
            active_pos_ = 0;
        }
        bool rescan = true;
        while (rescan && tree_[p] != 0) {
            rescan = false;
            const std::uint8_t t = tree_[p];
            for (int a = first_arc_[p]; a != -1; a = arc_next_[a]) {
                int q = arc_head_[a];
                std::int64_t res = (t == 1) ? rcap_[a] : rcap_[sister(a)];
                if (res <= 0) continue;
                if (tree_[q] == 0) {
                    tree_[q] = t;
                    parent_arc_[q] = sister(a);
                    ts_[q] = ts_[p];
                    dist_[q] = dist_[p] + 1;
                    active_.push_back(q);
                } else if (tree_[q] != t) {
                    augment(t == 1 ? a : sister(a));
                    process_orphans();
                    rescan = true;  // residuals changed; rescan p's arcs
                    break;
                }
            }
        }
    }

    // Minimum-cut source side: residual reachability from the source.
    source_side_.assign(n_, 0);
    std::vector<int> stack;
    for (int v = 0; v < n_; ++v)
        if (tr_cap_[v] > 0) {
            source_side_[v] = 1;
            stack.push_back(v);
        }
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int a = first_arc_[v]; a != -1; a = arc_next_[a]) {
            int q = arc_head_[a];
            if (rcap_[a] > 0 && !source_side_[q]) {
                source_side_[q] = 1;
                stack.push_back(q);
            }
        }
    }
    return flow_;
}

namespace {

using int128 = __int128;

void check_fits(int128 v, const char* what) {
    if (v > static_cast<int128>(std::numeric_limits<std::int64_t>::max() / 2))
        throw std::overflow_error(std::string(what) +
                                  ": totals exceed 64-bit headroom; use a smaller scale");
}

}  // namespace

CutResult solve_s_excess(const SExcessGraph& g) {
    const int n = g.n();
    if (n == 0) return {};

    int128 total = 0;
    for (auto w : g.vertex_weight) total += (w < 0) ? -static_cast<int128>(w) : w;
    for (const auto& e : g.edges)
        if (e.cap != kInfCap) total += e.cap;
    check_fits(total, "solve_s_excess");
    const std::int64_t inf = static_cast<std::int64_t>(total) + 1;

    MaxFlow mf(n);
    std::int64_t neg_sum = 0;
    for (int v = 0; v < n; ++v) {
        std::int64_t w = g.vertex_weight[v];
        if (w < 0) {
            mf.add_terminal(v, -w, 0);
            neg_sum += -w;
        } else if (w > 0) {
            mf.add_terminal(v, 0, w);
        }
    }
    for (const auto& e : g.edges)
        mf.add_edge(e.u, e.v, e.cap == kInfCap ? inf : e.cap, 0);

    CutResult res;
    res.flow_value = mf.solve();
    res.source_set = mf.min_cut_source_side();

    // Recompute the objective independently of the solver's bookkeeping.
    int128 obj = 0;
    for (int v = 0; v < n; ++v)
        if (res.source_set[v]) obj += g.vertex_weight[v];
    for (const auto& e : g.edges)
        if (res.source_set[e.u] && !res.source_set[e.v]) {
            if (e.cap == kInfCap)
                throw std::logic_error("solve_s_excess: infinite edge crosses the cut");
            obj += e.cap;
        }
    res.objective = static_cast<std::int64_t>(obj);
    if (res.objective != res.flow_value - neg_sum)
        throw std::logic_error("solve_s_excess: objective does not match flow duality");
    return res;
}

FlowResult max_flow(int n, int s, int t, const std::vector<Arc>& arcs) {
    if (s == t) throw std::invalid_argument("max_flow: source equals sink");
    int128 total = 0;
    for (const auto& a : arcs) total += a.cap;
    check_fits(total, "max_flow");
    const std::int64_t big = static_cast<std::int64_t>(total) + 1;

    MaxFlow mf(n);
    for (const auto& a : arcs) mf.add_edge(a.u, a.v, a.cap, 0);
    mf.add_terminal(s, big, 0);
    mf.add_terminal(t, 0, big);
    FlowResult res;
    res.flow = mf.solve();
    res.source_side = mf.min_cut_source_side();
    return res;
}

SExcessGraph read_sexcess(std::istream& in) {
    std::string magic;
    int n = 0;
    std::size_t m = 0;
    if (!(in >> magic >> n >> m) || magic != "sexcess")
        throw std::runtime_error("sexcess: expected header 'sexcess n m'");
    if (n < 0) throw std::runtime_error("sexcess: negative vertex count");
    SExcessGraph g;
    for (int v = 0; v < n; ++v) {
        std::int64_t w;
        if (!(in >> w)) throw std::runtime_error("sexcess: missing weight for vertex " +
                                                 std::to_string(v));
        g.add_vertex(w);
    }
    for (std::size_t e = 0; e < m; ++e) {
        int u, v;
        std::string cap;
        if (!(in >> u >> v >> cap))
            throw std::runtime_error("sexcess: malformed edge line " + std::to_string(e));
        g.add_edge(u, v, cap == "INF" ? kInfCap : std::stoll(cap));
    }
    return g;
}

void write_sexcess(const SExcessGraph& g, std::ostream& out) {
    out << "sexcess " << g.n() << ' ' << g.edges.size() << '\n';
    for (auto w : g.vertex_weight) out << w << '\n';
    for (const auto& e : g.edges) {
        out << e.u << ' ' << e.v << ' ';
        if (e.cap == kInfCap)
            out << "INF\n";
        else
            out << e.cap << '\n';
    }
}

}  // namespace gvfseg
