#include <doctest.h>

#include <random>

#include "gvfseg/metrics.hpp"

using namespace gvfseg;

namespace {

// All-pairs reference ASSD from the two boundary voxel sets.
double brute_assd(const LabelVolume& a, const LabelVolume& b, int label) {
    const GridShape& shape = a.shape;
    LabelVolume ba = boundary_mask(a, label);
    LabelVolume bb = boundary_mask(b, label);
    std::vector<Coord> sa, sb;
    for (std::size_t p = 0; p < shape.voxel_count(); ++p) {
        if (ba[p]) sa.push_back(shape.coord(p));
        if (bb[p]) sb.push_back(shape.coord(p));
    }
    double sum = 0.0;
    for (const auto& p : sa) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& q : sb) best = std::min(best, shape.physical_distance(p, q));
        sum += best;
    }
    for (const auto& p : sb) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& q : sa) best = std::min(best, shape.physical_distance(p, q));
        sum += best;
    }
    return sum / (sa.size() + sb.size());
}

LabelVolume box(const GridShape& shape, Coord lo, Coord hi) {
    LabelVolume out(shape);
    for (int i = lo[0]; i <= hi[0]; ++i)
        for (int j = lo[1]; j <= hi[1]; ++j)
            for (int k = lo[2]; k <= hi[2]; ++k) out.at({i, j, k}) = 1;
    return out;
}

}  // namespace

TEST_CASE("dsc hand values") {
    GridShape shape(4, 4);
    LabelVolume a = box(shape, {0, 0, 0}, {1, 1, 0});  // 4 voxels
    LabelVolume b = box(shape, {0, 0, 0}, {1, 0, 0});  // 2 voxels, both shared
    CHECK(dsc(a, b, 1) == doctest::Approx(2.0 * 2 / (4 + 2)));
    CHECK(dsc(a, a, 1) == doctest::Approx(1.0));
    LabelVolume c = box(shape, {3, 3, 0}, {3, 3, 0});
    CHECK(dsc(a, c, 1) == doctest::Approx(0.0));
    LabelVolume empty(shape);
    CHECK_THROWS_AS(dsc(empty, empty, 1), std::invalid_argument);
    CHECK(dsc(a, empty, 1) == doctest::Approx(0.0));
}

TEST_CASE("boundary mask marks the volume border") {
    GridShape shape(3, 3);
    LabelVolume full(shape, 1);
    LabelVolume bm = boundary_mask(full, 1);
    // everything except the center touches the border
    CHECK(bm.count(1) == 8);
    CHECK(bm.at({1, 1}) == 0);

    LabelVolume inner = box(shape, {1, 1, 0}, {1, 1, 0});
    CHECK(boundary_mask(inner, 1).count(1) == 1);
}

TEST_CASE("assd of identical objects is zero, shifted squares match by hand") {
    GridShape shape(12, 12);
    LabelVolume a = box(shape, {2, 2, 0}, {5, 5, 0});
    CHECK(assd(a, a, 1) == doctest::Approx(0.0));

    // one-voxel shift: compare against the all-pairs reference
    LabelVolume b = box(shape, {3, 2, 0}, {6, 5, 0});
    CHECK(assd(a, b, 1) == doctest::Approx(brute_assd(a, b, 1)).epsilon(1e-12));
}

TEST_CASE("assd matches the all-pairs oracle on random volumes") {
    std::mt19937_64 rng(51);
    for (int trial = 0; trial < 40; ++trial) {
        GridShape shape = (trial % 2 == 0)
                              ? GridShape(7, 8, 1.0, 1.5)
                              : GridShape(5, 6, 4, 0.7, 1.0, 1.9);
        std::bernoulli_distribution coin(0.35);
        LabelVolume a(shape), b(shape);
        for (std::size_t p = 0; p < shape.voxel_count(); ++p) {
            a[p] = coin(rng);
            b[p] = coin(rng);
        }
        if (a.count(1) == 0) a[0] = 1;
        if (b.count(1) == 0) b[shape.voxel_count() - 1] = 1;
        CHECK(assd(a, b, 1) == doctest::Approx(brute_assd(a, b, 1)).epsilon(1e-9));
    }
}

TEST_CASE("assd requires both objects and matching grids") {
    GridShape shape(4, 4);
    LabelVolume a = box(shape, {1, 1, 0}, {2, 2, 0});
    LabelVolume empty(shape);
    CHECK_THROWS_AS(assd(a, empty, 1), std::invalid_argument);
    LabelVolume other(GridShape(4, 5));
    CHECK_THROWS_AS(assd(a, other, 1), std::invalid_argument);
    GridShape sp(4, 4, 2.0, 1.0);
    LabelVolume c(sp);
    c.at({1, 1}) = 1;
    CHECK_THROWS_AS(assd(a, c, 1), std::invalid_argument);
}

TEST_CASE("metric report covers every nonzero label") {
    GridShape shape(6, 6);
    LabelVolume a(shape), b(shape);
    a.at({1, 1}) = 1;
    a.at({4, 4}) = 2;
    b.at({1, 2}) = 1;
    b.at({4, 4}) = 3;
    MetricReport rep = metric_report(a, b);
    REQUIRE(rep.per_label.size() == 3);
    CHECK(rep.per_label[0].label == 1);
    CHECK(rep.per_label[1].label == 2);
    CHECK(rep.per_label[2].label == 3);
    CHECK(rep.per_label[0].dsc == doctest::Approx(0.0));
    CHECK(std::isfinite(rep.per_label[0].assd_mm));
    CHECK(std::isnan(rep.per_label[1].assd_mm));  // label 2 exists only in a
    CHECK(std::isnan(rep.per_label[2].assd_mm));
}
