#include "gvfseg/gvf.hpp"

#include <algorithm>
#include <limits>

namespace gvfseg {

namespace {

std::vector<double> indicator(const LabelVolume& preseg, int label) {
    std::vector<double> ind(preseg.data.size());
    bool any = false;
    for (std::size_t i = 0; i < ind.size(); ++i) {
        ind[i] = (preseg[i] == label) ? 1.0 : 0.0;
        any = any || ind[i] > 0;
    }
    if (!any)
        throw std::invalid_argument("binary_gradient: label " + std::to_string(label) +
                                    " not present in pre-segmentation");
    return ind;
}

void gaussian_smooth(std::vector<double>& img, const GridShape& shape, double sigma) {
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> kernel(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
        sum += kernel[i + radius];
    }
    for (auto& k : kernel) k /= sum;

    std::vector<double> tmp(img.size());
    for (int axis = 0; axis < 3; ++axis) {
        if (shape.dims[axis] == 1) continue;
        const int len = shape.dims[axis];
        const int a1 = (axis + 1) % 3, a2 = (axis + 2) % 3;
        Coord c{0, 0, 0};
        for (int i1 = 0; i1 < shape.dims[a1]; ++i1)
            for (int i2 = 0; i2 < shape.dims[a2]; ++i2) {
                c[a1] = i1;
                c[a2] = i2;
                for (int j = 0; j < len; ++j) {
                    double acc = 0.0, w = 0.0;
                    for (int k = -radius; k <= radius; ++k) {
                        int jj = j + k;
                        if (jj < 0 || jj >= len) continue;  // truncate at borders
                        c[axis] = jj;
                        acc += kernel[k + radius] * img[shape.index(c)];
                        w += kernel[k + radius];
                    }
                    c[axis] = j;
                    tmp[shape.index(c)] = acc / w;
                }
            }
        img.swap(tmp);
    }
}

double sq_magnitude(const double* v, int n) {
    double s = 0.0;
    for (int c = 0; c < n; ++c) s += v[c] * v[c];
    return s;
}

}  // namespace

VectorField binary_gradient(const LabelVolume& preseg, int object_label,
                            double presmooth_sigma) {
    const GridShape& shape = preseg.shape;
    std::vector<double> ind = indicator(preseg, object_label);
    if (presmooth_sigma > 0.0) gaussian_smooth(ind, shape, presmooth_sigma);

    VectorField g(shape, shape.ndim);
    const std::size_t n = shape.voxel_count();
    for (std::size_t p = 0; p < n; ++p) {
        Coord c = shape.coord(p);
        for (int axis = 0; axis < shape.ndim; ++axis) {
            const int len = shape.dims[axis];
            if (len == 1) continue;
            Coord cm = c, cp = c;
            double val;
            if (c[axis] == 0) {
                cp[axis] = 1;
                val = ind[shape.index(cp)] - ind[p];
            } else if (c[axis] == len - 1) {
                cm[axis] = len - 2;
                val = ind[p] - ind[shape.index(cm)];
            } else {
                cm[axis] -= 1;
                cp[axis] += 1;
                val = 0.5 * (ind[shape.index(cp)] - ind[shape.index(cm)]);
            }
            g.at(p)[axis] = val;
        }
    }
    return g;
}

double gvf_energy(const VectorField& h, const VectorField& grad, double mu) {
    const GridShape& shape = h.shape;
    const std::size_t n = shape.voxel_count();
    const int nc = h.ncomp;
    double e = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
        const double* hp = h.at(p);
        const double* gp = grad.at(p);
        double g2 = sq_magnitude(gp, nc);
        double diff2 = 0.0;
        for (int c = 0; c < nc; ++c) {
            double d = hp[c] - gp[c];
            diff2 += d * d;
        }
        e += g2 * diff2;
        if (mu > 0.0) {
            Coord co = shape.coord(p);
            for (int axis = 0; axis < shape.ndim; ++axis) {
                if (co[axis] + 1 >= shape.dims[axis]) continue;
                Coord cq = co;
                cq[axis] += 1;
                const double* hq = h.at(shape.index(cq));
                for (int c = 0; c < nc; ++c) {
                    double d = hq[c] - hp[c];
                    e += mu * d * d;
                }
            }
        }
    }
    return e;
}

double gvf_stability_bound(const VectorField& grad, double mu) {
    double maxg2 = 0.0;
    const std::size_t n = grad.shape.voxel_count();
    for (std::size_t p = 0; p < n; ++p)
        maxg2 = std::max(maxg2, sq_magnitude(grad.at(p), grad.ncomp));
    const double a = 2.0 * grad.shape.ndim;
    const double denom = 2.0 * a * mu + maxg2;
    if (denom <= 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / denom;
}

GvfResult compute_gvf(const VectorField& grad, const GvfParams& params) {
    if (params.mu < 0.0) throw std::invalid_argument("compute_gvf: mu must be >= 0");
    if (params.max_iters <= 0) throw std::invalid_argument("compute_gvf: max_iters must be positive");
    if (params.tol < 0.0) throw std::invalid_argument("compute_gvf: tol must be >= 0");
    for (double v : grad.data)
        if (!std::isfinite(v)) throw std::invalid_argument("compute_gvf: input field not finite");

    GvfResult res;
    if (params.mu == 0.0) {
        // First term alone: h = grad is the exact global minimizer.
        res.field = grad;
        res.energy_trace = {0.0};
        return res;
    }

    const double bound = gvf_stability_bound(grad, params.mu);
    double dt = params.dt;
    if (dt == 0.0) {
        dt = 0.9 * bound;
    } else if (dt <= 0.0 || dt > bound) {
        throw std::invalid_argument("compute_gvf: dt must lie in (0, " + std::to_string(bound) +
                                    "] for stability");
    }

    const GridShape& shape = grad.shape;
    const std::size_t n = shape.voxel_count();
    const int nc = grad.ncomp;
    VectorField h = grad;
    VectorField hn(shape, nc);
    std::vector<double> g2(n);
    for (std::size_t p = 0; p < n; ++p) g2[p] = sq_magnitude(grad.at(p), nc);

    res.energy_trace.push_back(gvf_energy(h, grad, params.mu));
    int it = 0;
    for (; it < params.max_iters; ++it) {
        double max_update = 0.0;
#pragma omp parallel for reduction(max : max_update) schedule(static)
        for (long long pi = 0; pi < static_cast<long long>(n); ++pi) {
            const std::size_t p = static_cast<std::size_t>(pi);
            Coord c = shape.coord(p);
            const double* hp = h.at(p);
            const double* gp = grad.at(p);
            double* np = hn.at(p);
            double upd2 = 0.0;
            for (int comp = 0; comp < nc; ++comp) {
                double lap = 0.0;
                for (int axis = 0; axis < shape.ndim; ++axis) {
                    if (c[axis] > 0) {
                        Coord cq = c;
                        cq[axis] -= 1;
                        lap += h.at(shape.index(cq))[comp] - hp[comp];
                    }
                    if (c[axis] + 1 < shape.dims[axis]) {
                        Coord cq = c;
                        cq[axis] += 1;
                        lap += h.at(shape.index(cq))[comp] - hp[comp];
                    }
                }
                double delta = dt * (params.mu * lap - g2[p] * (hp[comp] - gp[comp]));
                np[comp] = hp[comp] + delta;
                upd2 += delta * delta;
            }
            max_update = std::max(max_update, std::sqrt(upd2));
        }
        h.data.swap(hn.data);
        res.energy_trace.push_back(gvf_energy(h, grad, params.mu));
        if (max_update < params.tol) {
            ++it;
            break;
        }
    }
    res.iterations = it;
    res.field = std::move(h);
    return res;
}

LabelVolume extract_core(const VectorField& h, const LabelVolume& preseg, int object_label,
                         double theta) {
    if (theta <= 0.0) throw std::invalid_argument("extract_core: theta must be > 0");
    if (!h.shape.same_grid(preseg.shape))
        throw std::invalid_argument("extract_core: shape mismatch");
    const std::size_t n = h.shape.voxel_count();
    double maxmag = 0.0;
    for (std::size_t p = 0; p < n; ++p) maxmag = std::max(maxmag, h.magnitude(p));

    LabelVolume core(preseg.shape);
    bool any = false;
    for (std::size_t p = 0; p < n; ++p) {
        if (preseg[p] == object_label && h.magnitude(p) < theta * maxmag) {
            core[p] = 1;
            any = true;
        }
    }
    if (!any) {
        // Fallback: minimum-magnitude voxels inside the pre-segmentation.
        double minmag = std::numeric_limits<double>::infinity();
        for (std::size_t p = 0; p < n; ++p)
            if (preseg[p] == object_label) minmag = std::min(minmag, h.magnitude(p));
        for (std::size_t p = 0; p < n; ++p)
            if (preseg[p] == object_label && h.magnitude(p) == minmag) core[p] = 1;
    }
    return core;
}

DiscreteFlow discretize(const VectorField& h, const LabelVolume& core) {
    if (!h.shape.same_grid(core.shape))
        throw std::invalid_argument("discretize: shape mismatch");
    DiscreteFlow flow;
    flow.shape = h.shape;
    flow.nbhd = Neighborhood::make(Connectivity::Full, h.shape.ndim);
    const std::size_t n = h.shape.voxel_count();
    flow.next.assign(n, DiscreteFlow::kCore);

    std::vector<double> inv_norm(flow.nbhd.offsets.size());
    for (std::size_t j = 0; j < flow.nbhd.offsets.size(); ++j) {
        const Coord& o = flow.nbhd.offsets[j];
        inv_norm[j] = 1.0 / std::sqrt(double(o[0] * o[0] + o[1] * o[1] + o[2] * o[2]));
    }

    for (std::size_t p = 0; p < n; ++p) {
        if (core[p]) continue;
        Coord c = h.shape.coord(p);
        const double* hp = h.at(p);
        double best = -std::numeric_limits<double>::infinity();
        int best_j = -1;
        for (std::size_t j = 0; j < flow.nbhd.offsets.size(); ++j) {
            const Coord& o = flow.nbhd.offsets[j];
            Coord q{c[0] + o[0], c[1] + o[1], c[2] + o[2]};
            if (!h.shape.in_bounds(q)) continue;
            double dot = 0.0;
            for (int comp = 0; comp < h.ncomp; ++comp) dot += hp[comp] * o[comp];
            double score = dot * inv_norm[j];
            if (score > best) {  // strict: ties keep the earlier offset
                best = score;
                best_j = static_cast<int>(j);
            }
        }
        flow.next[p] = static_cast<std::int16_t>(best_j);
    }

    // Cycle repair with three-color marking. A walk that re-enters an
    // in-progress voxel promotes that voxel to core, cutting the cycle while
    // the prefix keeps its flow.
    std::vector<std::uint8_t> color(n, 0);  // 0 white, 1 gray, 2 black
    std::vector<std::size_t> path;
    for (std::size_t start = 0; start < n; ++start) {
        if (color[start] != 0) continue;
        path.clear();
        std::size_t v = start;
        while (true) {
            if (flow.is_core(v) || color[v] == 2) break;
            if (color[v] == 1) {  // cycle: v is on the current walk
                flow.next[v] = DiscreteFlow::kCore;
                break;
            }
            color[v] = 1;
            path.push_back(v);
            v = flow.target(v);
        }
        for (std::size_t u : path) color[u] = 2;
        color[v] = 2;
    }
    return flow;
}

std::vector<std::size_t> trace_path(const DiscreteFlow& flow, std::size_t p) {
    std::vector<std::size_t> out;
    if (flow.is_core(p)) return out;
    const std::size_t n = flow.shape.voxel_count();
    std::size_t v = p;
    while (!flow.is_core(v)) {
        v = flow.target(v);
        out.push_back(v);
        if (out.size() > n)
            throw std::logic_error("trace_path: flow contains a cycle");
    }
    return out;
}

}  // namespace gvfseg
