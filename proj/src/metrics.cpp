#include "gvfseg/metrics.hpp"

#include <limits>
#include <set>
#include <stdexcept>

namespace gvfseg {

double dsc(const LabelVolume& a, const LabelVolume& b, int label) {
    if (!a.shape.same_grid(b.shape)) throw std::invalid_argument("dsc: shape mismatch");
    std::size_t na = 0, nb = 0, inter = 0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        bool ia = a[i] == label, ib = b[i] == label;
        na += ia;
        nb += ib;
        inter += ia && ib;
    }
    if (na + nb == 0)
        throw std::invalid_argument("dsc: label absent from both volumes");
    return 2.0 * static_cast<double>(inter) / static_cast<double>(na + nb);
}

LabelVolume boundary_mask(const LabelVolume& vol, int label) {
    const GridShape& shape = vol.shape;
    const auto nbhd = Neighborhood::make(Connectivity::Face, shape.ndim);
    LabelVolume out(shape);
    for (std::size_t p = 0; p < vol.data.size(); ++p) {
        if (vol[p] != label) continue;
        Coord c = shape.coord(p);
        bool boundary = false;
        for (const auto& o : nbhd.offsets) {
            Coord q{c[0] + o[0], c[1] + o[1], c[2] + o[2]};
            if (!shape.in_bounds(q)) {
                boundary = true;  // volume border counts as boundary
                break;
            }
            if (vol[shape.index(q)] != label) {
                boundary = true;
                break;
            }
        }
        out[p] = boundary ? 1 : 0;
    }
    return out;
}

double assd(const LabelVolume& a, const LabelVolume& b, int label) {
    if (!a.shape.same_grid(b.shape)) throw std::invalid_argument("assd: shape mismatch");
    for (int ax = 0; ax < a.shape.ndim; ++ax)
        if (a.shape.spacing[ax] != b.shape.spacing[ax])
            throw std::invalid_argument("assd: spacing mismatch");
    if (a.count(label) == 0 || b.count(label) == 0)
        throw std::invalid_argument("assd: label must be present in both volumes");

    LabelVolume sa = boundary_mask(a, label);
    LabelVolume sb = boundary_mask(b, label);
    // full double precision; the f32 transforms would round at ~1e-7
    std::vector<double> da = squared_distance_transform(a.shape, sa.data);
    std::vector<double> db = squared_distance_transform(b.shape, sb.data);

    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t p = 0; p < sa.data.size(); ++p) {
        if (sa[p]) {
            sum += std::sqrt(db[p]);
            ++count;
        }
        if (sb[p]) {
            sum += std::sqrt(da[p]);
            ++count;
        }
    }
    return sum / static_cast<double>(count);
}

MetricReport metric_report(const LabelVolume& a, const LabelVolume& b) {
    std::set<int> labels;
    for (auto v : a.data)
        if (v) labels.insert(v);
    for (auto v : b.data)
        if (v) labels.insert(v);
    MetricReport rep;
    for (int l : labels) {
        // ASSD is undefined when one side lacks the label entirely
        double d = (a.count(l) && b.count(l)) ? assd(a, b, l)
                                              : std::numeric_limits<double>::quiet_NaN();
        rep.per_label.push_back({l, dsc(a, b, l), d});
    }
    return rep;
}

}  // namespace gvfseg
