// Command-line front end: phantom generation, GVF inspection, single- and
// multi-object segmentation, metrics, perturbation, the sensitivity
// experiment, and a raw s-excess solver.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "gvfseg/metrics.hpp"
#include "gvfseg/multiobject.hpp"
#include "gvfseg/perturb.hpp"
#include "gvfseg/phantom.hpp"
#include "gvfseg/sensitivity.hpp"
#include "gvfseg/svol_io.hpp"

using namespace gvfseg;

namespace {

GridShape shape_from_flags(const std::vector<int>& dims, const std::vector<double>& spacing) {
    std::vector<double> sp = spacing;
    if (sp.empty()) sp.assign(dims.size(), 1.0);
    if (sp.size() != dims.size())
        throw CLI::ValidationError("--spacing must list one value per axis of --dims");
    if (dims.size() == 2) return GridShape(dims[0], dims[1], sp[0], sp[1]);
    if (dims.size() == 3)
        return GridShape(dims[0], dims[1], dims[2], sp[0], sp[1], sp[2]);
    throw CLI::ValidationError("--dims must list 2 or 3 axes");
}

PhantomKind kind_from(const std::string& s) {
    if (s == "disc" || s == "sphere") return PhantomKind::Disc;
    if (s == "cshape") return PhantomKind::CShape;
    if (s == "nested-rings") return PhantomKind::NestedRings;
    if (s == "two-blobs") return PhantomKind::TwoBlobs;
    throw CLI::ValidationError("--kind must be disc|sphere|cshape|nested-rings|two-blobs");
}

Connectivity nbhd_from(const std::string& s) {
    if (s == "face") return Connectivity::Face;
    if (s == "full") return Connectivity::Full;
    throw CLI::ValidationError("--nbhd must be face or full");
}

double prior_from(const std::string& s) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    return std::stod(s);
}

struct PhantomFlags {
    std::string kind = "disc";
    std::vector<int> dims{64, 64};
    std::vector<double> spacing;
    double radius = 16, inner_radius = 0, opening = 90, separation = 0;
    double noise = 0, holes = 0;
};

void add_phantom_flags(CLI::App* cmd, PhantomFlags& f) {
    cmd->add_option("--kind", f.kind, "disc|sphere|cshape|nested-rings|two-blobs");
    cmd->add_option("--dims", f.dims, "grid dims (2 or 3 ints)")->expected(2, 3);
    cmd->add_option("--spacing", f.spacing, "voxel spacing in mm")->expected(2, 3);
    cmd->add_option("--radius", f.radius, "outer radius, voxels");
    cmd->add_option("--inner-radius", f.inner_radius, "inner radius, voxels");
    cmd->add_option("--opening", f.opening, "C-shape opening, degrees");
    cmd->add_option("--separation", f.separation, "two-blobs center distance, voxels");
    cmd->add_option("--noise", f.noise, "intensity noise sigma");
    cmd->add_option("--holes", f.holes, "fraction of object voxels hole-punched");
}

PhantomSpec spec_from(const PhantomFlags& f) {
    PhantomSpec spec;
    spec.kind = kind_from(f.kind);
    spec.shape = shape_from_flags(f.dims, f.spacing);
    spec.radius = f.radius;
    spec.inner_radius = f.inner_radius;
    spec.opening_deg = f.opening;
    spec.separation = f.separation;
    spec.noise_sigma = f.noise;
    spec.hole_rate = f.holes;
    return spec;
}

struct SegmentFlags {
    double lambda = 1.0, sigma = 0.1, alpha = 1.0, beta = 0.0;
    double mu = 0.2, dt = 0.0, tol = 1e-4, theta = 0.05;
    int iters = 2000;
    double scale = 1e4;
    std::string prior = "inf", nbhd = "face";
};

void add_segment_flags(CLI::App* cmd, SegmentFlags& f) {
    cmd->add_option("--lambda", f.lambda, "smoothness weight");
    cmd->add_option("--sigma", f.sigma, "boundary contrast scale");
    cmd->add_option("--alpha", f.alpha, "sigmoid slope");
    cmd->add_option("--beta", f.beta, "sigmoid midpoint");
    cmd->add_option("--scale", f.scale, "energy-to-integer scale");
    cmd->add_option("--prior", f.prior, "prior penalty: inf or a float");
    cmd->add_option("--nbhd", f.nbhd, "pairwise neighborhood: face|full");
    cmd->add_option("--mu", f.mu, "GVF smoothness");
    cmd->add_option("--dt", f.dt, "GVF step (0 = auto)");
    cmd->add_option("--iters", f.iters, "GVF iteration cap");
    cmd->add_option("--tol", f.tol, "GVF stopping tolerance");
    cmd->add_option("--theta", f.theta, "core threshold fraction");
}

SegmentParams params_from(const SegmentFlags& f) {
    SegmentParams p;
    p.pairwise.lambda = f.lambda;
    p.pairwise.sigma = f.sigma;
    p.pairwise.alpha = f.alpha;
    p.pairwise.beta = f.beta;
    p.pairwise.nbhd = nbhd_from(f.nbhd);
    p.gvf.mu = f.mu;
    p.gvf.dt = f.dt;
    p.gvf.max_iters = f.iters;
    p.gvf.tol = f.tol;
    p.gvf.core_threshold = f.theta;
    p.scale = f.scale;
    double penalty = prior_from(f.prior);
    p.prior_penalty = penalty;
    return p;
}

// Scene config for segment-multi: "object <id> key=value ..." plus constraint
// lines "include|exclude|maxdist <k> <k'> <mm>".
struct SceneObject {
    int id = 0;
    std::string image, prob, preseg;
    int label = 1;
    SegmentFlags flags;
    std::string polarity = "auto";
};

struct Scene {
    std::vector<SceneObject> objects;
    std::vector<InteractionConstraint> constraints;
};

Scene parse_scene(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scene config " + path);
    Scene scene;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto fail = [&](const std::string& what) -> std::runtime_error {
            return std::runtime_error(path + ":" + std::to_string(lineno) + ": " + what);
        };
        std::istringstream iss(line);
        std::string word;
        if (!(iss >> word) || word[0] == '#') continue;
        if (word == "object") {
            SceneObject obj;
            if (!(iss >> obj.id)) throw fail("object needs an id");
            std::string kv;
            while (iss >> kv) {
                auto eq = kv.find('=');
                if (eq == std::string::npos) throw fail("expected key=value, got '" + kv + "'");
                std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
                if (key == "image") obj.image = val;
                else if (key == "prob") obj.prob = val;
                else if (key == "preseg") obj.preseg = val;
                else if (key == "label") obj.label = std::stoi(val);
                else if (key == "lambda") obj.flags.lambda = std::stod(val);
                else if (key == "sigma") obj.flags.sigma = std::stod(val);
                else if (key == "alpha") obj.flags.alpha = std::stod(val);
                else if (key == "beta") obj.flags.beta = std::stod(val);
                else if (key == "mu") obj.flags.mu = std::stod(val);
                else if (key == "theta") obj.flags.theta = std::stod(val);
                else if (key == "prior") obj.flags.prior = val;
                else if (key == "nbhd") obj.flags.nbhd = val;
                else if (key == "polarity") obj.polarity = val;
                else throw fail("unknown object key '" + key + "'");
            }
            if (obj.preseg.empty()) throw fail("object needs preseg=<path>");
            if (obj.image.empty() && obj.prob.empty())
                throw fail("object needs image=<path> or prob=<path>");
            scene.objects.push_back(obj);
        } else if (word == "include" || word == "exclude" || word == "maxdist") {
            InteractionConstraint c;
            c.kind = word == "include"   ? ConstraintKind::Inclusion
                     : word == "exclude" ? ConstraintKind::Exclusion
                                         : ConstraintKind::MaxDistance;
            if (!(iss >> c.first >> c.second >> c.distance_mm))
                throw fail(word + " needs: <id> <id> <mm>");
            scene.constraints.push_back(c);
        } else {
            throw fail("unknown directive '" + word + "'");
        }
    }
    if (scene.objects.empty()) throw std::runtime_error(path + ": no objects defined");
    return scene;
}

Polarity polarity_from(const std::string& s) {
    if (s == "auto") return Polarity::Auto;
    if (s == "direct") return Polarity::Direct;
    if (s == "flipped") return Polarity::Flipped;
    throw std::runtime_error("polarity must be auto|direct|flipped");
}

int run_segment_multi(const std::string& config_path, const std::string& out_path,
                      const std::string& report_path) {
    Scene scene = parse_scene(config_path);
    std::vector<ObjectSpec> objects;
    // priors from identical (preseg, label, gvf params) share one flow,
    // which max-distance constraints require
    std::map<std::string, DiscreteFlow> flow_cache;
    const DiscreteFlow* any_flow = nullptr;
    for (const auto& so : scene.objects) {
        SegmentParams p = params_from(so.flags);
        LabelVolume preseg = read_any(so.preseg).as_label();
        ObjectSpec obj;
        obj.id = so.id;
        obj.pairwise = p.pairwise;
        obj.polarity = polarity_from(so.polarity);

        std::ostringstream key;
        key << so.preseg << '|' << so.label << '|' << p.gvf.mu << '|' << p.gvf.dt << '|'
            << p.gvf.max_iters << '|' << p.gvf.tol << '|' << p.gvf.core_threshold;
        auto it = flow_cache.find(key.str());
        if (it == flow_cache.end()) {
            VectorField grad = binary_gradient(preseg, so.label, p.gvf.presmooth_sigma);
            GvfResult gvf = compute_gvf(grad, p.gvf);
            LabelVolume core = extract_core(gvf.field, preseg, so.label, p.gvf.core_threshold);
            it = flow_cache.emplace(key.str(), discretize(gvf.field, core)).first;
        }
        obj.prior = ShapePrior{it->second, p.prior_penalty};
        any_flow = &it->second;

        ScalarVolume prob;
        ScalarVolume image;
        if (!so.image.empty()) image = read_any(so.image).as_scalar();
        if (!so.prob.empty())
            prob = read_any(so.prob).as_scalar();
        else
            prob = gaussian_class_posterior(image, preseg, so.label, 0.05);
        obj.unary = log_likelihood_unary(prob, p.prob_eps);
        obj.img_bar = sigmoid_transform(so.image.empty() ? prob : image, p.pairwise.alpha,
                                        p.pairwise.beta);
        objects.push_back(std::move(obj));
    }

    JointGraph jg = build_joint_graph(objects, scene.constraints);
    CutResult cut = solve_s_excess(jg.graph);
    DecodeResult dec = decode(cut, jg, scene.constraints);
    write_volume(dec.labels, out_path);

    bool need_flow = false;
    for (const auto& c : scene.constraints)
        need_flow = need_flow || c.kind == ConstraintKind::MaxDistance;
    ConstraintReport report =
        verify_constraints(dec.labels, scene.constraints, need_flow ? any_flow : nullptr);
    std::ostringstream rep;
    rep << "energy: " << jg.energy_of(cut.objective) << '\n';
    for (const auto& w : dec.warnings) rep << "warning: " << w << '\n';
    rep << report.to_string();
    if (report_path.empty()) {
        std::cout << rep.str();
    } else {
        std::ofstream out(report_path);
        out << rep.str();
    }
    return report.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"GVF shape-prior graph segmentation"};
    app.require_subcommand(1);

    // phantom
    auto* cmd_ph = app.add_subcommand("phantom", "generate an analytic phantom");
    PhantomFlags phf;
    std::uint64_t ph_seed = 0;
    std::string ph_out, ph_obs, ph_prob;
    add_phantom_flags(cmd_ph, phf);
    cmd_ph->add_option("--seed", ph_seed, "RNG seed");
    cmd_ph->add_option("--out", ph_out, "ground-truth labels (svol)")->required();
    cmd_ph->add_option("--obs", ph_obs, "noisy observation (svol)");
    cmd_ph->add_option("--prob", ph_prob, "foreground probability (svol)");

    // gvf
    auto* cmd_gvf = app.add_subcommand("gvf", "compute the GVF field, core, and flow");
    std::string gvf_preseg, gvf_prefix;
    int gvf_label = 1;
    SegmentFlags gvff;
    cmd_gvf->add_option("--preseg", gvf_preseg, "pre-segmentation labels (svol)")->required();
    cmd_gvf->add_option("--label", gvf_label, "object label");
    cmd_gvf->add_option("--mu", gvff.mu, "GVF smoothness");
    cmd_gvf->add_option("--dt", gvff.dt, "GVF step (0 = auto)");
    cmd_gvf->add_option("--iters", gvff.iters, "iteration cap");
    cmd_gvf->add_option("--tol", gvff.tol, "stopping tolerance");
    cmd_gvf->add_option("--theta", gvff.theta, "core threshold fraction");
    cmd_gvf->add_option("--out-prefix", gvf_prefix, "output prefix")->required();

    // segment
    auto* cmd_seg = app.add_subcommand("segment", "single-object segmentation");
    std::string seg_image, seg_prob, seg_preseg, seg_out;
    int seg_label = 1;
    SegmentFlags segf;
    cmd_seg->add_option("--image", seg_image, "intensity image (svol)")->required();
    cmd_seg->add_option("--prob", seg_prob, "foreground probability (svol)");
    cmd_seg->add_option("--preseg", seg_preseg, "pre-segmentation labels (svol)")->required();
    cmd_seg->add_option("--label", seg_label, "object label");
    add_segment_flags(cmd_seg, segf);
    cmd_seg->add_option("--out", seg_out, "output labels (svol)")->required();

    // segment-multi
    auto* cmd_multi = app.add_subcommand("segment-multi", "multi-object segmentation");
    std::string multi_config, multi_out, multi_report;
    cmd_multi->add_option("--config", multi_config, "scene config file")->required();
    cmd_multi->add_option("--out", multi_out, "multi-label output (svol)")->required();
    cmd_multi->add_option("--report", multi_report, "constraint report file (default stdout)");

    // metrics
    auto* cmd_met = app.add_subcommand("metrics", "DSC / ASSD between label volumes");
    std::string met_a, met_b;
    int met_label = -1;
    cmd_met->add_option("--a", met_a, "first label volume")->required();
    cmd_met->add_option("--b", met_b, "second label volume")->required();
    cmd_met->add_option("--label", met_label, "restrict to one label");

    // perturb
    auto* cmd_ptb = app.add_subcommand("perturb", "coarse-grid random label deformation");
    std::string ptb_in, ptb_out;
    std::vector<int> ptb_grid{8, 8, 8};
    double ptb_sigma = 0.0;
    std::uint64_t ptb_seed = 0;
    cmd_ptb->add_option("--in", ptb_in, "input labels (svol)")->required();
    cmd_ptb->add_option("--out", ptb_out, "output labels (svol)")->required();
    cmd_ptb->add_option("--grid", ptb_grid, "control-grid dims")->expected(3);
    cmd_ptb->add_option("--sigma", ptb_sigma, "displacement std, voxels");
    cmd_ptb->add_option("--seed", ptb_seed, "RNG seed");

    // sensitivity
    auto* cmd_sen = app.add_subcommand("sensitivity", "pre-segmentation sensitivity sweep");
    PhantomFlags senf;
    senf.kind = "cshape";
    SegmentFlags sensegf;
    std::vector<double> sen_sigmas{0, 2, 5, 10};
    std::vector<int> sen_grid{6, 6, 6};
    double sen_base = 3.0;
    int sen_seeds = 10, sen_label = 1;
    std::uint64_t sen_seed = 0;
    std::string sen_out;
    add_phantom_flags(cmd_sen, senf);
    add_segment_flags(cmd_sen, sensegf);
    cmd_sen->add_option("--sigmas", sen_sigmas, "perturbation levels, voxels");
    cmd_sen->add_option("--grid", sen_grid, "control-grid dims")->expected(3);
    cmd_sen->add_option("--base-sigma", sen_base, "standing pre-seg deformation");
    cmd_sen->add_option("--seeds", sen_seeds, "number of random repeats");
    cmd_sen->add_option("--seed", sen_seed, "base RNG seed");
    cmd_sen->add_option("--label", sen_label, "object label");
    cmd_sen->add_option("--out", sen_out, "CSV output path (default stdout)");

    // solve-graph
    auto* cmd_sol = app.add_subcommand("solve-graph", "solve a textual s-excess instance");
    std::string sol_in;
    cmd_sol->add_option("--in", sol_in, "sexcess file, - for stdin")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (cmd_ph->parsed()) {
            Phantom ph = make_phantom(spec_from(phf), ph_seed);
            write_volume(ph.ground_truth, ph_out);
            if (!ph_obs.empty()) write_volume(ph.observation, ph_obs);
            if (!ph_prob.empty()) write_volume(ph.prob, ph_prob);
        } else if (cmd_gvf->parsed()) {
            LabelVolume preseg = read_any(gvf_preseg).as_label();
            GvfParams gp = params_from(gvff).gvf;
            VectorField grad = binary_gradient(preseg, gvf_label, gp.presmooth_sigma);
            GvfResult res = compute_gvf(grad, gp);
            LabelVolume core = extract_core(res.field, preseg, gvf_label, gp.core_threshold);
            DiscreteFlow flow = discretize(res.field, core);
            for (int c = 0; c < res.field.ncomp; ++c) {
                ScalarVolume comp(res.field.shape);
                for (std::size_t p = 0; p < comp.data.size(); ++p)
                    comp[p] = static_cast<float>(res.field.at(p)[c]);
                write_volume(comp, gvf_prefix + "_h" + std::to_string(c) + ".svol");
            }
            write_volume(core, gvf_prefix + "_core.svol");
            LabelVolume flowvol(flow.shape);
            for (std::size_t p = 0; p < flowvol.data.size(); ++p)
                flowvol[p] = flow.is_core(p) ? 255 : static_cast<std::uint8_t>(flow.next[p]);
            write_volume(flowvol, gvf_prefix + "_flow.svol");
            std::cout << "iterations=" << res.iterations
                      << " core_voxels=" << core.count(1) << '\n';
        } else if (cmd_seg->parsed()) {
            ScalarVolume image = read_any(seg_image).as_scalar();
            LabelVolume preseg = read_any(seg_preseg).as_label();
            ScalarVolume prob;
            bool have_prob = !seg_prob.empty();
            if (have_prob) prob = read_any(seg_prob).as_scalar();
            SegmentResult res = segment(image, have_prob ? &prob : nullptr, preseg,
                                        seg_label, params_from(segf));
            write_volume(res.labels, seg_out);
            std::cout << "energy=" << res.energy << " voxels=" << res.labels.count(1) << '\n';
        } else if (cmd_multi->parsed()) {
            return run_segment_multi(multi_config, multi_out, multi_report);
        } else if (cmd_met->parsed()) {
            LabelVolume a = read_any(met_a).as_label();
            LabelVolume b = read_any(met_b).as_label();
            if (met_label >= 0) {
                std::cout << "dsc=" << dsc(a, b, met_label)
                          << " assd_mm=" << assd(a, b, met_label) << '\n';
            } else {
                for (const auto& e : metric_report(a, b).per_label)
                    std::cout << "label=" << e.label << " dsc=" << e.dsc
                              << " assd_mm=" << e.assd_mm << '\n';
            }
        } else if (cmd_ptb->parsed()) {
            LabelVolume in = read_any(ptb_in).as_label();
            PerturbParams params;
            params.grid = {ptb_grid[0], ptb_grid[1], ptb_grid[2]};
            params.sigma_ptb = ptb_sigma;
            params.seed = ptb_seed;
            write_volume(perturb_labels(in, params), ptb_out);
        } else if (cmd_sen->parsed()) {
            SensitivityConfig cfg;
            cfg.phantom = spec_from(senf);
            cfg.segment = params_from(sensegf);
            cfg.sigmas = sen_sigmas;
            cfg.ctrl_grid = {sen_grid[0], sen_grid[1], sen_grid[2]};
            cfg.base_sigma = sen_base;
            cfg.num_seeds = sen_seeds;
            cfg.seed = sen_seed;
            cfg.object_label = sen_label;
            auto rows = run_sensitivity(cfg);
            std::ostringstream csv;
            csv << "sigma_ptb,preseg_dsc,final_dsc,preseg_assd,final_assd\n";
            for (const auto& r : rows)
                csv << r.sigma_ptb << ',' << r.preseg_dsc << ',' << r.final_dsc << ','
                    << r.preseg_assd << ',' << r.final_assd << '\n';
            if (sen_out.empty()) {
                std::cout << csv.str();
            } else {
                std::ofstream out(sen_out);
                out << csv.str();
            }
        } else if (cmd_sol->parsed()) {
            SExcessGraph g;
            if (sol_in == "-") {
                g = read_sexcess(std::cin);
            } else {
                std::ifstream in(sol_in);
                if (!in) throw std::runtime_error("cannot open " + sol_in);
                g = read_sexcess(in);
            }
            CutResult r = solve_s_excess(g);
            std::cout << "gamma=" << r.objective << "\nH=";
            bool first = true;
            for (int v = 0; v < g.n(); ++v)
                if (r.source_set[v]) {
                    if (!first) std::cout << ' ';
                    std::cout << v;
                    first = false;
                }
            std::cout << '\n';
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
