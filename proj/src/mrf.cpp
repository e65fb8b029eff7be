#include "gvfseg/mrf.hpp"

#include <cmath>

namespace gvfseg {

ScalarVolume sigmoid_transform(const ScalarVolume& img, double alpha, double beta) {
    if (!(alpha > 0.0)) throw std::invalid_argument("sigmoid_transform: alpha must be > 0");
    ScalarVolume out(img.shape);
    for (std::size_t i = 0; i < img.data.size(); ++i)
        out[i] = static_cast<float>(1.0 / (1.0 + std::exp(-(img[i] - beta) / alpha)));
    return out;
}

UnaryTerm log_likelihood_unary(const ScalarVolume& prob, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("log_likelihood_unary: eps must be > 0");
    UnaryTerm u{ScalarVolume(prob.shape), ScalarVolume(prob.shape)};
    for (std::size_t i = 0; i < prob.data.size(); ++i) {
        double p = prob[i];
        if (p < 0.0 || p > 1.0)
            throw std::invalid_argument("log_likelihood_unary: probabilities must be in [0,1]");
        u.d1[i] = static_cast<float>(-std::log(std::max(p, eps)));
        u.d0[i] = static_cast<float>(-std::log(std::max(1.0 - p, eps)));
    }
    return u;
}

std::vector<double> boundary_weights(const ScalarVolume& img_bar, const PairwiseTerm& pw) {
    if (!(pw.sigma > 0.0)) throw std::invalid_argument("boundary_weights: sigma must be > 0");
    if (pw.lambda < 0.0) throw std::invalid_argument("boundary_weights: lambda must be >= 0");
    const GridShape& shape = img_bar.shape;
    const auto pos = Neighborhood::make(pw.nbhd, shape.ndim).positive_offsets();
    const std::size_t n = shape.voxel_count();
    std::vector<double> w(n * pos.size(), 0.0);
    for (std::size_t p = 0; p < n; ++p) {
        Coord c = shape.coord(p);
        for (std::size_t j = 0; j < pos.size(); ++j) {
            Coord q{c[0] + pos[j][0], c[1] + pos[j][1], c[2] + pos[j][2]};
            if (!shape.in_bounds(q)) continue;
            w[p * pos.size() + j] =
                boundary_weight(img_bar[p], img_bar[shape.index(q)], pw.sigma, pw.lambda);
        }
    }
    return w;
}

double mrf_energy(const LabelVolume& labeling, const UnaryTerm& unary,
                  const ScalarVolume& img_bar, const PairwiseTerm& pw,
                  const ShapePrior* prior) {
    const GridShape& shape = labeling.shape;
    if (!shape.same_grid(unary.d1.shape) || !shape.same_grid(unary.d0.shape) ||
        !shape.same_grid(img_bar.shape))
        throw std::invalid_argument("mrf_energy: shape mismatch");
    const std::size_t n = shape.voxel_count();

    double e = 0.0;
    for (std::size_t p = 0; p < n; ++p)
        e += labeling[p] ? unary.d1[p] : unary.d0[p];

    const auto pos = Neighborhood::make(pw.nbhd, shape.ndim).positive_offsets();
    for (std::size_t p = 0; p < n; ++p) {
        Coord c = shape.coord(p);
        for (const auto& o : pos) {
            Coord qc{c[0] + o[0], c[1] + o[1], c[2] + o[2]};
            if (!shape.in_bounds(qc)) continue;
            std::size_t q = shape.index(qc);
            if (labeling[p] != labeling[q])
                e += boundary_weight(img_bar[p], img_bar[q], pw.sigma, pw.lambda);
        }
    }

    if (prior) {
        for (std::size_t p = 0; p < n; ++p) {
            if (prior->flow.is_core(p)) continue;
            std::size_t q = prior->flow.target(p);
            if (labeling[p] == 1 && labeling[q] == 0) {
                if (prior->is_hard()) return kEnergyInfeasible;
                e += prior->penalty;
            }
        }
    }
    return e;
}

namespace {

std::int64_t scaled(double v, double scale) {
    double s = v * scale;
    if (!std::isfinite(s) || std::abs(s) > 4.0e15)
        throw std::overflow_error(
            "build_graph: scaled term exceeds integer headroom; use a smaller scale");
    return std::llround(s);
}

}  // namespace

GraphEncoding build_graph(const UnaryTerm& unary, const ScalarVolume& img_bar,
                          const PairwiseTerm& pw, const ShapePrior* prior, double scale) {
    const GridShape& shape = unary.d1.shape;
    if (!shape.same_grid(unary.d0.shape) || !shape.same_grid(img_bar.shape))
        throw std::invalid_argument("build_graph: shape mismatch");
    if (prior && !shape.same_grid(prior->flow.shape))
        throw std::invalid_argument("build_graph: prior flow shape mismatch");
    if (!(scale > 0.0)) throw std::invalid_argument("build_graph: scale must be > 0");

    const std::size_t n = shape.voxel_count();
    GraphEncoding enc;
    enc.scale = scale;
    enc.graph.vertex_weight.reserve(n);
    for (std::size_t p = 0; p < n; ++p) {
        enc.d0_sum += unary.d0[p];
        enc.graph.add_vertex(scaled(double(unary.d1[p]) - double(unary.d0[p]), scale));
    }

    const auto pos = Neighborhood::make(pw.nbhd, shape.ndim).positive_offsets();
    for (std::size_t p = 0; p < n; ++p) {
        Coord c = shape.coord(p);
        for (const auto& o : pos) {
            Coord qc{c[0] + o[0], c[1] + o[1], c[2] + o[2]};
            if (!shape.in_bounds(qc)) continue;
            std::size_t q = shape.index(qc);
            std::int64_t w =
                scaled(boundary_weight(img_bar[p], img_bar[q], pw.sigma, pw.lambda), scale);
            if (w == 0) continue;
            enc.graph.add_edge(static_cast<int>(p), static_cast<int>(q), w);
            enc.graph.add_edge(static_cast<int>(q), static_cast<int>(p), w);
        }
    }

    if (prior) {
        std::int64_t cap = prior->is_hard() ? kInfCap : scaled(prior->penalty, scale);
        for (std::size_t p = 0; p < n; ++p) {
            if (prior->flow.is_core(p)) continue;
            enc.graph.add_edge(static_cast<int>(p), static_cast<int>(prior->flow.target(p)),
                               cap);
        }
    }
    return enc;
}

ScalarVolume gaussian_class_posterior(const ScalarVolume& image, const LabelVolume& region,
                                      int label, double min_sigma) {
    if (!image.shape.same_grid(region.shape))
        throw std::invalid_argument("gaussian_class_posterior: shape mismatch");
    double sum_in = 0, sum2_in = 0, sum_out = 0, sum2_out = 0;
    std::size_t n_in = 0, n_out = 0;
    for (std::size_t i = 0; i < image.data.size(); ++i) {
        double v = image[i];
        if (region[i] == label) {
            sum_in += v;
            sum2_in += v * v;
            ++n_in;
        } else {
            sum_out += v;
            sum2_out += v * v;
            ++n_out;
        }
    }
    if (n_in == 0 || n_out == 0)
        throw std::invalid_argument("gaussian_class_posterior: region or complement empty");
    double mu_in = sum_in / n_in;
    double mu_out = sum_out / n_out;
    double sd_in = std::max(min_sigma, std::sqrt(std::max(0.0, sum2_in / n_in - mu_in * mu_in)));
    double sd_out =
        std::max(min_sigma, std::sqrt(std::max(0.0, sum2_out / n_out - mu_out * mu_out)));

    ScalarVolume prob(image.shape);
    for (std::size_t i = 0; i < image.data.size(); ++i) {
        double v = image[i];
        double a = (v - mu_in) / sd_in;
        double b = (v - mu_out) / sd_out;
        // p_in = l_in / (l_in + l_out), evaluated in the log domain
        double log_ratio = 0.5 * (a * a - b * b) + std::log(sd_in / sd_out);
        prob[i] = static_cast<float>(1.0 / (1.0 + std::exp(log_ratio)));
    }
    return prob;
}

SegmentResult segment(const ScalarVolume& image, const ScalarVolume* prob,
                      const LabelVolume& preseg, int object_label,
                      const SegmentParams& params) {
    if (!image.shape.same_grid(preseg.shape))
        throw std::invalid_argument("segment: image/preseg shape mismatch");

    VectorField grad = binary_gradient(preseg, object_label, params.gvf.presmooth_sigma);
    GvfResult gvf = compute_gvf(grad, params.gvf);
    LabelVolume core =
        extract_core(gvf.field, preseg, object_label, params.gvf.core_threshold);
    DiscreteFlow flow = discretize(gvf.field, core);

    ScalarVolume p =
        prob ? *prob : gaussian_class_posterior(image, preseg, object_label, 0.05);
    UnaryTerm unary = log_likelihood_unary(p, params.prob_eps);
    ScalarVolume img_bar =
        sigmoid_transform(image, params.pairwise.alpha, params.pairwise.beta);

    SegmentResult res;
    res.prior = ShapePrior{std::move(flow), params.prior_penalty};
    GraphEncoding enc = build_graph(unary, img_bar, params.pairwise,
                                    params.use_prior ? &res.prior : nullptr, params.scale);
    CutResult cut = solve_s_excess(enc.graph);

    res.labels = LabelVolume(image.shape);
    for (std::size_t i = 0; i < res.labels.data.size(); ++i)
        res.labels[i] = cut.source_set[i] ? 1 : 0;
    res.objective = cut.objective;
    res.energy = enc.energy_of(cut.objective);
    return res;
}

}  // namespace gvfseg
