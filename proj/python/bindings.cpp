// pybind11 surface: volumes cross the boundary as numpy arrays plus a
// spacing tuple; labels are uint8, intensities float32.
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gvfseg/metrics.hpp"
#include "gvfseg/multiobject.hpp"
#include "gvfseg/perturb.hpp"
#include "gvfseg/phantom.hpp"
#include "gvfseg/sensitivity.hpp"
#include "gvfseg/svol_io.hpp"

namespace py = pybind11;
using namespace gvfseg;

namespace {

GridShape shape_of(const std::vector<py::ssize_t>& dims, const std::vector<double>& spacing) {
    std::vector<double> sp = spacing;
    if (sp.empty()) sp.assign(dims.size(), 1.0);
    if (sp.size() != dims.size())
        throw std::invalid_argument("spacing must list one value per array axis");
    if (dims.size() == 2)
        return GridShape(static_cast<int>(dims[0]), static_cast<int>(dims[1]), sp[0], sp[1]);
    if (dims.size() == 3)
        return GridShape(static_cast<int>(dims[0]), static_cast<int>(dims[1]),
                         static_cast<int>(dims[2]), sp[0], sp[1], sp[2]);
    throw std::invalid_argument("arrays must be 2D or 3D");
}

ScalarVolume to_scalar(py::array_t<float, py::array::c_style | py::array::forcecast> arr,
                       const std::vector<double>& spacing) {
    std::vector<py::ssize_t> dims(arr.shape(), arr.shape() + arr.ndim());
    ScalarVolume vol(shape_of(dims, spacing));
    std::copy(arr.data(), arr.data() + arr.size(), vol.data.begin());
    return vol;
}

LabelVolume to_label(py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast> arr,
                     const std::vector<double>& spacing) {
    std::vector<py::ssize_t> dims(arr.shape(), arr.shape() + arr.ndim());
    LabelVolume vol(shape_of(dims, spacing));
    std::copy(arr.data(), arr.data() + arr.size(), vol.data.begin());
    return vol;
}

std::vector<py::ssize_t> np_dims(const GridShape& shape) {
    std::vector<py::ssize_t> d{shape.dims[0], shape.dims[1]};
    if (shape.ndim == 3) d.push_back(shape.dims[2]);
    return d;
}

py::array from_scalar(const ScalarVolume& vol) {
    py::array_t<float> out(np_dims(vol.shape));
    std::copy(vol.data.begin(), vol.data.end(), out.mutable_data());
    return out;
}

py::array from_label(const LabelVolume& vol) {
    py::array_t<std::uint8_t> out(np_dims(vol.shape));
    std::copy(vol.data.begin(), vol.data.end(), out.mutable_data());
    return out;
}

PhantomKind kind_of(const std::string& s) {
    if (s == "disc" || s == "sphere") return PhantomKind::Disc;
    if (s == "cshape") return PhantomKind::CShape;
    if (s == "nested-rings") return PhantomKind::NestedRings;
    if (s == "two-blobs") return PhantomKind::TwoBlobs;
    throw std::invalid_argument("kind must be disc|sphere|cshape|nested-rings|two-blobs");
}

SegmentParams make_params(double lam, double sigma, double alpha, double beta, double mu,
                          double prior_penalty, bool use_prior, int gvf_iters, double theta) {
    SegmentParams p;
    p.pairwise.lambda = lam;
    p.pairwise.sigma = sigma;
    p.pairwise.alpha = alpha;
    p.pairwise.beta = beta;
    p.gvf.mu = mu;
    p.gvf.max_iters = gvf_iters;
    p.gvf.core_threshold = theta;
    p.prior_penalty = prior_penalty;
    p.use_prior = use_prior;
    return p;
}

}  // namespace

PYBIND11_MODULE(_gvfseg, m) {
    m.doc() = "GVF shape-prior graph segmentation";

    m.def(
        "make_phantom",
        [](const std::string& kind, const std::vector<int>& dims, double radius,
           double inner_radius, double opening_deg, double separation, double noise_sigma,
           double hole_rate, std::uint64_t seed, const std::vector<double>& spacing) {
            PhantomSpec spec;
            spec.kind = kind_of(kind);
            std::vector<py::ssize_t> d(dims.begin(), dims.end());
            spec.shape = shape_of(d, spacing);
            spec.radius = radius;
            spec.inner_radius = inner_radius;
            spec.opening_deg = opening_deg;
            spec.separation = separation;
            spec.noise_sigma = noise_sigma;
            spec.hole_rate = hole_rate;
            Phantom ph = make_phantom(spec, seed);
            return py::make_tuple(from_label(ph.ground_truth), from_scalar(ph.observation),
                                  from_scalar(ph.prob));
        },
        py::arg("kind"), py::arg("dims"), py::arg("radius"), py::arg("inner_radius") = 0.0,
        py::arg("opening_deg") = 90.0, py::arg("separation") = 0.0,
        py::arg("noise_sigma") = 0.0, py::arg("hole_rate") = 0.0, py::arg("seed") = 0,
        py::arg("spacing") = std::vector<double>{},
        "Generate (ground_truth, observation, prob) arrays for an analytic phantom.");

    m.def(
        "perturb_labels",
        [](py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast> labels,
           double sigma, const std::vector<int>& grid, std::uint64_t seed,
           const std::vector<double>& spacing) {
            PerturbParams params;
            params.sigma_ptb = sigma;
            params.grid = {grid.at(0), grid.at(1), grid.at(2)};
            params.seed = seed;
            return from_label(perturb_labels(to_label(labels, spacing), params));
        },
        py::arg("labels"), py::arg("sigma"), py::arg("grid") = std::vector<int>{8, 8, 8},
        py::arg("seed") = 0, py::arg("spacing") = std::vector<double>{},
        "Coarse-grid random deformation of a label array.");

    m.def(
        "segment",
        [](py::array_t<float, py::array::c_style | py::array::forcecast> image,
           py::object prob,
           py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast> preseg,
           int label, double lam, double sigma, double alpha, double beta, double mu,
           double prior_penalty, bool use_prior, int gvf_iters, double theta,
           const std::vector<double>& spacing) {
            ScalarVolume img = to_scalar(image, spacing);
            LabelVolume pre = to_label(preseg, spacing);
            SegmentParams params = make_params(lam, sigma, alpha, beta, mu, prior_penalty,
                                               use_prior, gvf_iters, theta);
            ScalarVolume pr;
            bool have = !prob.is_none();
            if (have)
                pr = to_scalar(
                    prob.cast<py::array_t<float, py::array::c_style | py::array::forcecast>>(),
                    spacing);
            SegmentResult res = segment(img, have ? &pr : nullptr, pre, label, params);
            return py::make_tuple(from_label(res.labels), res.energy);
        },
        py::arg("image"), py::arg("prob"), py::arg("preseg"), py::arg("label") = 1,
        py::arg("lam") = 1.0, py::arg("sigma") = 0.1, py::arg("alpha") = 1.0,
        py::arg("beta") = 0.0, py::arg("mu") = 0.2,
        py::arg("prior_penalty") = std::numeric_limits<double>::infinity(),
        py::arg("use_prior") = true, py::arg("gvf_iters") = 2000, py::arg("theta") = 0.05,
        py::arg("spacing") = std::vector<double>{},
        "Single-object segmentation; returns (labels, energy).");

    m.def(
        "dsc",
        [](py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast> a,
           py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast> b, int label) {
            return dsc(to_label(a, {}), to_label(b, {}), label);
        },
        py::arg("a"), py::arg("b"), py::arg("label") = 1);

    m.def(
        "assd",
        [](py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast> a,
           py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast> b, int label,
           const std::vector<double>& spacing) {
            return assd(to_label(a, spacing), to_label(b, spacing), label);
        },
        py::arg("a"), py::arg("b"), py::arg("label") = 1,
        py::arg("spacing") = std::vector<double>{});

    m.def(
        "solve_s_excess",
        [](const std::vector<std::int64_t>& weights,
           const std::vector<std::tuple<int, int, py::object>>& edges) {
            SExcessGraph g;
            for (auto w : weights) g.add_vertex(w);
            for (const auto& [u, v, cap] : edges) {
                if (cap.is_none())
                    g.add_edge(u, v, kInfCap);  // None encodes an infinite capacity
                else
                    g.add_edge(u, v, cap.cast<std::int64_t>());
            }
            CutResult r = solve_s_excess(g);
            std::vector<int> members;
            for (int v = 0; v < g.n(); ++v)
                if (r.source_set[v]) members.push_back(v);
            return py::make_tuple(r.objective, members);
        },
        py::arg("weights"), py::arg("edges"),
        "Minimum s-excess of (vertex weights, directed capacitated edges); "
        "edge capacity None means infinite. Returns (objective, member list).");

    m.def(
        "run_sensitivity",
        [](const std::string& kind, const std::vector<int>& dims, double radius,
           double inner_radius, double noise_sigma, double hole_rate,
           const std::vector<double>& sigmas, int num_seeds, double base_sigma,
           const std::vector<int>& grid, std::uint64_t seed, double lam, double alpha,
           double beta) {
            SensitivityConfig cfg;
            cfg.phantom.kind = kind_of(kind);
            std::vector<py::ssize_t> d(dims.begin(), dims.end());
            cfg.phantom.shape = shape_of(d, {});
            cfg.phantom.radius = radius;
            cfg.phantom.inner_radius = inner_radius;
            cfg.phantom.noise_sigma = noise_sigma;
            cfg.phantom.hole_rate = hole_rate;
            cfg.segment.pairwise.lambda = lam;
            cfg.segment.pairwise.alpha = alpha;
            cfg.segment.pairwise.beta = beta;
            cfg.sigmas = sigmas;
            cfg.num_seeds = num_seeds;
            cfg.base_sigma = base_sigma;
            cfg.ctrl_grid = {grid.at(0), grid.at(1), grid.at(2)};
            cfg.seed = seed;
            std::vector<std::tuple<double, double, double, double, double>> rows;
            for (const auto& r : run_sensitivity(cfg))
                rows.emplace_back(r.sigma_ptb, r.preseg_dsc, r.final_dsc, r.preseg_assd,
                                  r.final_assd);
            return rows;
        },
        py::arg("kind"), py::arg("dims"), py::arg("radius"), py::arg("inner_radius") = 0.0,
        py::arg("noise_sigma") = 0.0, py::arg("hole_rate") = 0.0,
        py::arg("sigmas") = std::vector<double>{0, 2, 5, 10}, py::arg("num_seeds") = 10,
        py::arg("base_sigma") = 3.0, py::arg("grid") = std::vector<int>{6, 6, 6},
        py::arg("seed") = 0, py::arg("lam") = 0.3, py::arg("alpha") = 0.1,
        py::arg("beta") = 0.5,
        "Sensitivity sweep; returns rows of "
        "(sigma_ptb, preseg_dsc, final_dsc, preseg_assd, final_assd).");

    m.def(
        "read_volume",
        [](const std::string& path) {
            AnyVolume any = read_any(path);
            if (any.dtype == VolumeDtype::F32) return py::object(from_scalar(any.scalar));
            return py::object(from_label(any.label));
        },
        py::arg("path"), "Read an SVOL or PGM file as a numpy array.");

    m.def(
        "write_volume",
        [](py::array arr, const std::string& path, const std::vector<double>& spacing) {
            if (arr.dtype().is(py::dtype::of<std::uint8_t>()))
                write_volume(to_label(arr, spacing), path);
            else
                write_volume(
                    to_scalar(arr.cast<py::array_t<float, py::array::c_style |
                                                              py::array::forcecast>>(),
                              spacing),
                    path);
        },
        py::arg("array"), py::arg("path"), py::arg("spacing") = std::vector<double>{},
        "Write a numpy array as SVOL (uint8 -> u8, everything else -> f32).");
}
