#include "gvfseg/multiobject.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace gvfseg {

int JointGraph::index_of(int object_id) const {
    for (std::size_t i = 0; i < object_ids.size(); ++i)
        if (object_ids[i] == object_id) return static_cast<int>(i);
    throw std::invalid_argument("JointGraph: unknown object id " + std::to_string(object_id));
}

std::vector<Coord> cone_offsets(const GridShape& shape, double radius_mm) {
    if (radius_mm < 0) throw std::invalid_argument("cone_offsets: radius must be >= 0");
    std::vector<Coord> out;
    std::array<int, 3> r{0, 0, 0};
    for (int a = 0; a < shape.ndim; ++a)
        r[a] = static_cast<int>(std::floor(radius_mm / shape.spacing[a]));
    for (int o0 = -r[0]; o0 <= r[0]; ++o0)
        for (int o1 = -r[1]; o1 <= r[1]; ++o1)
            for (int o2 = -r[2]; o2 <= r[2]; ++o2) {
                double d0 = o0 * shape.spacing[0];
                double d1 = o1 * shape.spacing[1];
                double d2 = o2 * shape.spacing[2];
                if (std::sqrt(d0 * d0 + d1 * d1 + d2 * d2) <= radius_mm)
                    out.push_back({o0, o1, o2});
            }
    return out;
}

namespace {

[[noreturn]] void config_error(const std::string& what) {
    throw std::invalid_argument("multiobject configuration: " + what);
}

std::int64_t scaled(double v, double scale) {
    double s = v * scale;
    if (!std::isfinite(s) || std::abs(s) > 4.0e15)
        throw std::overflow_error("build_joint_graph: scaled term exceeds integer headroom");
    return std::llround(s);
}

bool same_flow(const DiscreteFlow& a, const DiscreteFlow& b) {
    return a.shape.same_grid(b.shape) && a.next == b.next;
}

/// Transitive "is nested inside" closure from inclusion/max-distance
/// constraints: result[k] = ids of objects inside k (not counting k itself).
std::map<int, std::set<int>> inner_closure(const std::vector<InteractionConstraint>& cs) {
    std::map<int, std::set<int>> inside;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& c : cs) {
            if (c.kind == ConstraintKind::Exclusion) continue;
            auto& s = inside[c.second];
            std::size_t before = s.size();
            s.insert(c.first);
            auto it = inside.find(c.first);
            if (it != inside.end()) s.insert(it->second.begin(), it->second.end());
            changed = changed || s.size() != before;
        }
    }
    return inside;
}

}  // namespace

JointGraph build_joint_graph(const std::vector<ObjectSpec>& objects,
                             const std::vector<InteractionConstraint>& constraints,
                             double scale) {
    if (objects.empty()) config_error("no objects");
    const GridShape& shape = objects.front().unary.d1.shape;
    std::map<int, int> id_to_index;
    for (std::size_t i = 0; i < objects.size(); ++i) {
        const auto& o = objects[i];
        if (o.id < 1 || o.id > 255) config_error("object ids must be in 1..255");
        if (!id_to_index.emplace(o.id, static_cast<int>(i)).second)
            config_error("duplicate object id " + std::to_string(o.id));
        if (!o.unary.d1.shape.same_grid(shape) || !o.unary.d0.shape.same_grid(shape) ||
            !o.img_bar.shape.same_grid(shape) || !o.prior.flow.shape.same_grid(shape))
            config_error("all objects must live on the same grid");
    }

    // Resolve polarities. Exclusion flips its second participant; every other
    // constraint role demands a direct subgraph.
    std::vector<Polarity> required(objects.size(), Polarity::Auto);
    auto demand = [&](int id, Polarity p, const char* why) {
        auto it = id_to_index.find(id);
        if (it == id_to_index.end())
            config_error("constraint references unknown object id " + std::to_string(id));
        Polarity& cur = required[it->second];
        if (cur == Polarity::Auto) {
            cur = p;
        } else if (cur != p) {
            config_error("object " + std::to_string(id) +
                         " would need both polarities (" + why + ")");
        }
    };
    for (const auto& c : constraints) {
        if (c.first == c.second) config_error("constraint relates an object to itself");
        switch (c.kind) {
            case ConstraintKind::Inclusion:
                if (c.distance_mm < 0) config_error("inclusion delta must be >= 0");
                demand(c.first, Polarity::Direct, "inclusion inner");
                demand(c.second, Polarity::Direct, "inclusion outer");
                break;
            case ConstraintKind::Exclusion:
                if (c.distance_mm < 0) config_error("exclusion delta must be >= 0");
                demand(c.first, Polarity::Direct, "exclusion first");
                demand(c.second, Polarity::Flipped, "exclusion second");
                break;
            case ConstraintKind::MaxDistance:
                if (!(c.distance_mm > 0)) config_error("max-distance Delta must be > 0");
                demand(c.first, Polarity::Direct, "max-distance inner");
                demand(c.second, Polarity::Direct, "max-distance outer");
                break;
        }
    }

    JointGraph jg;
    jg.shape = shape;
    jg.nvox = shape.voxel_count();
    jg.scale = scale;
    for (std::size_t i = 0; i < objects.size(); ++i) {
        Polarity user = objects[i].polarity;
        Polarity need = required[i];
        Polarity resolved;
        if (user == Polarity::Auto)
            resolved = (need == Polarity::Auto) ? Polarity::Direct : need;
        else if (need != Polarity::Auto && need != user)
            config_error("object " + std::to_string(objects[i].id) +
                         ": declared polarity conflicts with its constraint roles");
        else
            resolved = user;
        jg.polarity.push_back(resolved);
        jg.object_ids.push_back(objects[i].id);
    }

    // Per-object subgraphs.
    for (std::size_t k = 0; k < objects.size(); ++k) {
        const auto& obj = objects[k];
        const bool flipped = jg.polarity[k] == Polarity::Flipped;
        for (std::size_t p = 0; p < jg.nvox; ++p) {
            double d1 = obj.unary.d1[p], d0 = obj.unary.d0[p];
            jg.d_offset += flipped ? d1 : d0;
            jg.graph.add_vertex(scaled(flipped ? d0 - d1 : d1 - d0, scale));
        }
    }
    for (std::size_t k = 0; k < objects.size(); ++k) {
        const auto& obj = objects[k];
        const int base = static_cast<int>(k * jg.nvox);
        const auto pos = Neighborhood::make(obj.pairwise.nbhd, shape.ndim).positive_offsets();
        for (std::size_t p = 0; p < jg.nvox; ++p) {
            Coord c = shape.coord(p);
            for (const auto& o : pos) {
                Coord qc{c[0] + o[0], c[1] + o[1], c[2] + o[2]};
                if (!shape.in_bounds(qc)) continue;
                std::size_t q = shape.index(qc);
                std::int64_t w = scaled(boundary_weight(obj.img_bar[p], obj.img_bar[q],
                                                        obj.pairwise.sigma, obj.pairwise.lambda),
                                        scale);
                if (w == 0) continue;
                jg.graph.add_edge(base + static_cast<int>(p), base + static_cast<int>(q), w);
                jg.graph.add_edge(base + static_cast<int>(q), base + static_cast<int>(p), w);
            }
        }
        const bool flipped = jg.polarity[k] == Polarity::Flipped;
        std::int64_t cap = obj.prior.is_hard() ? kInfCap : scaled(obj.prior.penalty, scale);
        for (std::size_t p = 0; p < jg.nvox; ++p) {
            if (obj.prior.flow.is_core(p)) continue;
            int vp = base + static_cast<int>(p);
            int vq = base + static_cast<int>(obj.prior.flow.target(p));
            if (flipped)
                jg.graph.add_edge(vq, vp, cap);
            else
                jg.graph.add_edge(vp, vq, cap);
        }
    }

    // Interaction arcs.
    for (const auto& c : constraints) {
        const int ki = id_to_index.at(c.first);
        const int ko = id_to_index.at(c.second);
        if (c.kind == ConstraintKind::MaxDistance) {
            if (!same_flow(objects[ki].prior.flow, objects[ko].prior.flow))
                config_error("max-distance requires both objects to share the same flow");
            const DiscreteFlow& flow = objects[ki].prior.flow;
            for (std::size_t p = 0; p < jg.nvox; ++p) {
                if (flow.is_core(p)) continue;
                Coord cp = shape.coord(p);
                std::size_t v = p;
                while (!flow.is_core(v)) {
                    v = flow.target(v);
                    if (shape.physical_distance(cp, shape.coord(v)) >= c.distance_mm) {
                        jg.graph.add_edge(static_cast<int>(jg.vertex(ko, p)),
                                          static_cast<int>(jg.vertex(ki, v)), kInfCap);
                        break;
                    }
                    // paths never reaching Delta stay unconstrained
                }
            }
        } else {
            const auto cone = cone_offsets(shape, c.distance_mm);
            for (std::size_t p = 0; p < jg.nvox; ++p) {
                Coord cp = shape.coord(p);
                for (const auto& o : cone) {
                    Coord q{cp[0] + o[0], cp[1] + o[1], cp[2] + o[2]};
                    if (!shape.in_bounds(q)) continue;
                    jg.graph.add_edge(static_cast<int>(jg.vertex(ki, p)),
                                      static_cast<int>(jg.vertex(ko, shape.index(q))),
                                      kInfCap);
                }
            }
        }
    }
    return jg;
}

DecodeResult decode(const CutResult& cut, const JointGraph& jg,
                    const std::vector<InteractionConstraint>& constraints) {
    const std::size_t k_count = jg.object_ids.size();
    if (cut.source_set.size() != k_count * jg.nvox)
        throw std::invalid_argument("decode: cut size does not match the joint graph");

    DecodeResult out;
    out.masks.assign(k_count, LabelVolume(jg.shape));
    for (std::size_t k = 0; k < k_count; ++k) {
        const bool flipped = jg.polarity[k] == Polarity::Flipped;
        for (std::size_t p = 0; p < jg.nvox; ++p) {
            bool in_h = cut.source_set[jg.vertex(static_cast<int>(k), p)] != 0;
            out.masks[k][p] = (in_h != flipped) ? 1 : 0;
        }
    }

    // Pairs covered by an exclusion can never overlap (enforced by INF arcs);
    // inclusion/max-distance nesting resolves to the inner object.
    auto inside = inner_closure(constraints);
    std::set<std::pair<int, int>> excluded;
    for (const auto& c : constraints)
        if (c.kind == ConstraintKind::Exclusion) {
            excluded.insert({std::min(c.first, c.second), std::max(c.first, c.second)});
        }
    std::set<std::pair<int, int>> warned;

    out.labels = LabelVolume(jg.shape);
    for (std::size_t p = 0; p < jg.nvox; ++p) {
        std::vector<int> claims;
        for (std::size_t k = 0; k < k_count; ++k)
            if (out.masks[k][p]) claims.push_back(static_cast<int>(k));
        if (claims.empty()) continue;
        // drop outers in favor of their nested inners
        std::vector<int> kept;
        for (int k : claims) {
            bool is_outer_of_claimant = false;
            auto it = inside.find(jg.object_ids[k]);
            if (it != inside.end())
                for (int other : claims)
                    if (other != k && it->second.count(jg.object_ids[other]))
                        is_outer_of_claimant = true;
            if (!is_outer_of_claimant) kept.push_back(k);
        }
        int best = kept.front();
        for (int k : kept)
            if (jg.object_ids[k] < jg.object_ids[best]) best = k;
        if (kept.size() > 1) {
            for (int k : kept) {
                if (k == best) continue;
                std::pair<int, int> pr{std::min(jg.object_ids[best], jg.object_ids[k]),
                                       std::max(jg.object_ids[best], jg.object_ids[k])};
                if (excluded.count(pr))
                    throw std::logic_error("decode: exclusion-covered objects overlap");
                if (warned.insert(pr).second)
                    out.warnings.push_back(
                        "objects " + std::to_string(pr.first) + " and " +
                        std::to_string(pr.second) +
                        " overlap without a constraint; lowest id wins");
            }
        }
        out.labels[p] = static_cast<std::uint8_t>(jg.object_ids[best]);
    }
    return out;
}

std::string ConstraintReport::to_string() const {
    std::ostringstream oss;
    if (violations.empty()) {
        oss << "all constraints satisfied\n";
        return oss.str();
    }
    oss << violations.size() << " violation(s)\n";
    for (const auto& v : violations)
        oss << "constraint " << v.constraint_index << " at (" << v.coord[0] << ", "
            << v.coord[1] << ", " << v.coord[2] << "): " << v.detail << '\n';
    return oss.str();
}

ConstraintReport verify_constraints(const LabelVolume& labels,
                                    const std::vector<InteractionConstraint>& constraints,
                                    const DiscreteFlow* shared_flow) {
    const GridShape& shape = labels.shape;
    const std::size_t n = shape.voxel_count();
    auto inside = inner_closure(constraints);
    auto region_of = [&](int id) {
        std::vector<std::uint8_t> mask(n, 0);
        std::set<int> ids{id};
        auto it = inside.find(id);
        if (it != inside.end()) ids.insert(it->second.begin(), it->second.end());
        for (std::size_t p = 0; p < n; ++p)
            if (labels[p] != 0 && ids.count(labels[p])) mask[p] = 1;
        return mask;
    };

    ConstraintReport report;
    for (std::size_t ci = 0; ci < constraints.size(); ++ci) {
        const auto& c = constraints[ci];
        auto first = region_of(c.first);
        auto second = region_of(c.second);
        if (c.kind == ConstraintKind::MaxDistance) {
            if (!shared_flow)
                throw std::invalid_argument(
                    "verify_constraints: max-distance needs the shared flow");
            for (std::size_t p = 0; p < n; ++p) {
                // voxels already claimed by the inner object carry no
                // observable outer membership after decoding
                if (!second[p] || first[p] || shared_flow->is_core(p)) continue;
                Coord cp = shape.coord(p);
                std::size_t v = p;
                while (!shared_flow->is_core(v)) {
                    v = shared_flow->target(v);
                    if (shape.physical_distance(cp, shape.coord(v)) >= c.distance_mm) {
                        if (!first[v])
                            report.violations.push_back(
                                {ci, cp,
                                 "outer voxel has no inner voxel within " +
                                     std::to_string(c.distance_mm) + " mm along its flow path"});
                        break;
                    }
                }
            }
        } else {
            const bool exclusion = c.kind == ConstraintKind::Exclusion;
            const auto cone = cone_offsets(shape, c.distance_mm);
            for (std::size_t p = 0; p < n; ++p) {
                if (!first[p]) continue;
                Coord cp = shape.coord(p);
                for (const auto& o : cone) {
                    Coord q{cp[0] + o[0], cp[1] + o[1], cp[2] + o[2]};
                    if (!shape.in_bounds(q)) continue;
                    bool in_second = second[shape.index(q)] != 0;
                    if (exclusion ? in_second : !in_second) {
                        report.violations.push_back(
                            {ci, cp,
                             exclusion ? "excluded objects closer than the minimum separation"
                                       : "inner object not nested with the required margin"});
                        break;
                    }
                }
            }
        }
    }
    return report;
}

}  // namespace gvfseg
