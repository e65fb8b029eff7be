#pragma once

#include <optional>

#include "gvfseg/gvf.hpp"
#include "gvfseg/maxflow.hpp"
#include "gvfseg/volume.hpp"

namespace gvfseg {

/// Per-voxel label costs: d1 = cost of foreground, d0 = cost of background.
struct UnaryTerm {
    ScalarVolume d1;
    ScalarVolume d0;
};

struct PairwiseTerm {
    double lambda = 1.0;  // smoothness weight
    double sigma = 0.1;   // contrast scale of the boundary term
    double alpha = 1.0;   // sigmoid slope (intensity units)
    double beta = 0.0;    // sigmoid midpoint (intensity units)
    Connectivity nbhd = Connectivity::Face;
};

/// Infinite or finite-weight penalty on discretized-flow edges.
struct ShapePrior {
    DiscreteFlow flow;
    double penalty = std::numeric_limits<double>::infinity();

    bool is_hard() const { return std::isinf(penalty); }
};

/// 1 / (1 + exp(-(I - beta) / alpha)); contrast enhancement roughly within
/// [beta - 3 alpha, beta + 3 alpha].
ScalarVolume sigmoid_transform(const ScalarVolume& img, double alpha, double beta);

inline double boundary_weight(double ibar_p, double ibar_q, double sigma, double lambda) {
    double d = ibar_p - ibar_q;
    return lambda * std::exp(-(d * d) / (sigma * sigma));
}

/// d1 = -log(max(prob, eps)), d0 = -log(max(1 - prob, eps)).
UnaryTerm log_likelihood_unary(const ScalarVolume& prob, double eps = 1e-6);

/// Boundary weights for every (voxel, positive offset) pair of the term's
/// neighborhood, laid out [p * n_positive + j]. Out-of-bounds pairs hold 0.
std::vector<double> boundary_weights(const ScalarVolume& img_bar, const PairwiseTerm& pw);

constexpr double kEnergyInfeasible = std::numeric_limits<double>::infinity();

/// Eq-style total energy of a binary labeling (labels 0/1). Returns
/// +infinity when a hard prior edge is violated.
double mrf_energy(const LabelVolume& labeling, const UnaryTerm& unary,
                  const ScalarVolume& img_bar, const PairwiseTerm& pw,
                  const ShapePrior* prior);

struct GraphEncoding {
    SExcessGraph graph;
    double scale = 1e4;
    double d0_sum = 0.0;  // sum of D_p(0); min energy = (gamma + scaled d0_sum) / scale

    /// Decoded energy of a solved cut, in unscaled units.
    double energy_of(std::int64_t objective) const {
        return static_cast<double>(objective) / scale + d0_sum;
    }
};

/// One vertex per voxel with w = scaled(D1 - D0); smoothness arcs both ways;
/// one prior arc per flow edge (INF for a hard prior).
GraphEncoding build_graph(const UnaryTerm& unary, const ScalarVolume& img_bar,
                          const PairwiseTerm& pw, const ShapePrior* prior,
                          double scale = 1e4);

/// Two-class posterior under equal priors, with per-class Gaussians fit from
/// the image inside/outside the given region.
ScalarVolume gaussian_class_posterior(const ScalarVolume& image, const LabelVolume& region,
                                      int label, double min_sigma = 0.05);

struct SegmentParams {
    GvfParams gvf;
    PairwiseTerm pairwise;
    double prior_penalty = std::numeric_limits<double>::infinity();
    bool use_prior = true;
    double scale = 1e4;
    double prob_eps = 1e-6;
};

struct SegmentResult {
    LabelVolume labels;       // 0/1
    double energy = 0.0;      // decoded optimal energy
    std::int64_t objective = 0;
    ShapePrior prior;         // the prior the segmentation was solved under
};

/// Full single-object pipeline: GVF prior from the pre-segmentation, unary
/// terms from `prob` (or a two-class Gaussian fit on `image` when absent),
/// boundary terms from the sigmoid-transformed image, solved exactly.
SegmentResult segment(const ScalarVolume& image, const ScalarVolume* prob,
                      const LabelVolume& preseg, int object_label,
                      const SegmentParams& params);

}  // namespace gvfseg
