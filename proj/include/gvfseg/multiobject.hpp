#pragma once

#include <string>

#include "gvfseg/mrf.hpp"

namespace gvfseg {

/// Vertex-to-label convention of a subgraph. Direct: membership in the source
/// set means foreground. Flipped: membership means background, with prior arc
/// directions reversed so the encoded energy is unchanged.
enum class Polarity { Auto, Direct, Flipped };

struct ObjectSpec {
    int id = 0;  // label value in the decoded volume, 1..255
    UnaryTerm unary;
    ScalarVolume img_bar;  // sigmoid-transformed image for the boundary term
    PairwiseTerm pairwise;
    ShapePrior prior;
    Polarity polarity = Polarity::Auto;
};

enum class ConstraintKind { Inclusion, Exclusion, MaxDistance };

/// Pairwise geometric interaction. For inclusion and max-distance, `first` is
/// the inner object and `second` the outer one; for exclusion, `second` is the
/// subgraph that gets flipped. Distances are physical (mm).
struct InteractionConstraint {
    ConstraintKind kind;
    int first;
    int second;
    double distance_mm;
};

struct JointGraph {
    SExcessGraph graph;
    GridShape shape;
    std::size_t nvox = 0;
    double scale = 1e4;
    double d_offset = 0.0;
    std::vector<int> object_ids;      // subgraph index -> object id
    std::vector<Polarity> polarity;   // resolved per subgraph, never Auto

    std::size_t vertex(int obj_index, std::size_t p) const { return obj_index * nvox + p; }
    int index_of(int object_id) const;
    double energy_of(std::int64_t objective) const {
        return static_cast<double>(objective) / scale + d_offset;
    }
};

JointGraph build_joint_graph(const std::vector<ObjectSpec>& objects,
                             const std::vector<InteractionConstraint>& constraints,
                             double scale = 1e4);

struct DecodeResult {
    LabelVolume labels;               // 0 background, otherwise an object id
    std::vector<LabelVolume> masks;   // binary mask per subgraph index
    std::vector<std::string> warnings;
};

DecodeResult decode(const CutResult& cut, const JointGraph& jg,
                    const std::vector<InteractionConstraint>& constraints);

struct ConstraintReport {
    struct Violation {
        std::size_t constraint_index;
        Coord coord;
        std::string detail;
    };
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
    std::string to_string() const;
};

/// Independent checker for the interaction semantics, run on a decoded label
/// volume. Max-distance constraints need the shared flow the graph was built
/// from.
ConstraintReport verify_constraints(const LabelVolume& labels,
                                    const std::vector<InteractionConstraint>& constraints,
                                    const DiscreteFlow* shared_flow = nullptr);

/// Offsets o with ||o * spacing|| <= radius_mm, the "cone" of a separation
/// constraint. Includes the zero offset.
std::vector<Coord> cone_offsets(const GridShape& shape, double radius_mm);

}  // namespace gvfseg
