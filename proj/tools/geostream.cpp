// geostream: streaming coresets, subspace sketches, Lewis weights, and the
// geometric solvers built on them. One subcommand per pipeline; results are
// emitted as deterministic JSON (same input + seed => byte-identical output).

#include "geostream/geometry.hpp"
#include "geostream/lewis.hpp"
#include "geostream/linf_coreset.hpp"
#include "geostream/lp_stream.hpp"
#include "geostream/online_scores.hpp"
#include "geostream/regression.hpp"
#include "geostream/rng.hpp"
#include "geostream/row_source.hpp"
#include "geostream/sampling.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>

using namespace geostream;

namespace {

void emit(const json& j, const std::string& out_path) {
    std::string text = j.dump(2);
    text.push_back('\n');
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream os(out_path, std::ios::binary);
    if (!os) throw data_error("IoError", "cannot open " + out_path);
    os << text;
    if (!os) throw data_error("IoError", "write failed: " + out_path);
}

Vector unit_direction(rng::Stream& stream, Index d) {
    Vector x(d);
    for (Index i = 0; i < d; ++i) x(i) = stream.gaussian();
    double n = x.norm();
    return n > 0.0 ? Vector(x / n) : Vector(Vector::Unit(d, 0));
}

Matrix generate_matrix(const std::string& kind, Index n, Index d, double bound, int levels,
                       double base, std::uint64_t seed) {
    rng::Stream stream = rng::substream(seed, {0x67656eULL});
    if (kind == "randint") {
        Matrix A(n, d);
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < d; ++j) {
                auto span = static_cast<Index>(2 * bound + 1);
                A(i, j) = static_cast<double>(stream.uniform_index(span)) - bound;
            }
        return A;
    }
    if (kind == "scaled-identity") {
        Matrix A(d * levels, d);
        A.setZero();
        double scale = 1.0;
        for (int l = 0; l < levels; ++l) {
            for (Index j = 0; j < d; ++j) A(l * d + j, j) = scale;
            scale *= base;
        }
        return A;
    }
    if (kind == "sphere") {
        Matrix A(n, d);
        for (Index i = 0; i < n; ++i) A.row(i) = unit_direction(stream, d).transpose();
        return A;
    }
    if (kind == "clustered") {
        const int centers = 4;
        Matrix C(centers, d);
        for (int c = 0; c < centers; ++c)
            for (Index j = 0; j < d; ++j) C(c, j) = 5.0 * stream.gaussian();
        Matrix A(n, d);
        for (Index i = 0; i < n; ++i) {
            Index c = stream.uniform_index(centers);
            for (Index j = 0; j < d; ++j) A(i, j) = C(c, j) + 0.1 * stream.gaussian();
        }
        return A;
    }
    throw config_error("BadKind", "unknown generator kind: " + kind);
}

json coreset_report(const Coreset& c, std::optional<double> kappa_ol) {
    json j;
    j["size"] = c.size();
    j["delta"] = c.distortion();
    auto bound = c.certified_size_bound(kappa_ol);
    j["size_bound"] = {{"bound", bound.bound}, {"constant", bound.constant}, {"within", bound.within}};
    j["coreset"] = c.to_json();
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"streaming coresets, subspace sketches, and Lewis weight pipelines"};
    app.require_subcommand(1);

    std::string input, out_path, queries_path;
    std::uint64_t seed = 0;

    // generate
    auto* gen = app.add_subcommand("generate", "write a synthetic matrix file");
    std::string gen_kind = "randint", gen_format = "text", gen_out;
    Index gen_n = 100, gen_d = 4;
    double gen_bound = 10.0, gen_base = 2.0;
    int gen_levels = 4;
    gen->add_option("--kind", gen_kind, "randint|scaled-identity|sphere|clustered");
    gen->add_option("--n", gen_n);
    gen->add_option("--d", gen_d);
    gen->add_option("--M", gen_bound, "integer entry bound");
    gen->add_option("--levels", gen_levels, "scaled-identity copies");
    gen->add_option("--base", gen_base, "scaled-identity growth factor");
    gen->add_option("--seed", seed)->required();
    gen->add_option("--out", gen_out)->required();
    gen->add_option("--format", gen_format, "text|binary");

    // sketch-linf
    auto* slinf = app.add_subcommand("sketch-linf", "one-pass l_inf coreset");
    int k_robust = 0;
    bool restricted = false;
    double norm_lo = 0.5, norm_hi = 2.0;
    std::optional<double> kappa_hint;
    slinf->add_option("--input", input)->required();
    slinf->add_option("--out", out_path);
    slinf->add_option("--k-robust", k_robust, "peeling levels for E_k queries");
    slinf->add_flag("--restricted", restricted, "angular variant for Theta(1)-norm rows");
    slinf->add_option("--norm-lo", norm_lo);
    slinf->add_option("--norm-hi", norm_hi);

    // sketch-lp
    auto* slp = app.add_subcommand("sketch-lp", "one-pass lp subspace sketch");
    std::string lp_variant = "quadratic";
    double lp_p = 4.0, lp_q = 0.0;
    Index n_declared = 0;
    int replicas = 11;
    slp->add_option("--input", input)->required();
    slp->add_option("--out", out_path);
    slp->add_option("--p", lp_p)->required();
    slp->add_option("--q", lp_q, "inner index for the trade-off variant");
    slp->add_option("--n-declared", n_declared, "declared stream length (default: file rows)");
    slp->add_option("--variant", lp_variant, "quadratic|lq|exp");
    slp->add_option("--replicas", replicas);
    auto* slp_seed = slp->add_option("--seed", seed, "required for lq/exp variants");

    // lewis
    auto* lew = app.add_subcommand("lewis", "Lewis weights (offline or multi-pass streaming)");
    std::string lewis_mode = "offline";
    double lewis_p = 2.0, lewis_gamma = 0.0;
    int pass_cap = 64, rounds = 0;
    lew->add_option("--input", input)->required();
    lew->add_option("--out", out_path);
    lew->add_option("--p", lewis_p)->required();
    lew->add_option("--gamma", lewis_gamma);
    lew->add_option("--mode", lewis_mode, "offline|fewpass|logpass");
    lew->add_option("--passes", pass_cap, "pass budget for streaming modes");
    lew->add_option("--rounds", rounds);

    // embed
    auto* emb = app.add_subcommand("embed", "lp -> lq sampling embedding");
    double emb_p = 4.0, emb_q = 2.0, emb_eps = 0.5;
    Index emb_budget = 0;
    emb->add_option("--input", input)->required();
    emb->add_option("--out", out_path);
    emb->add_option("--p", emb_p)->required();
    emb->add_option("--q", emb_q)->required();
    emb->add_option("--eps", emb_eps);
    emb->add_option("--budget", emb_budget, "sample budget (0: auto)");
    emb->add_option("--seed", seed)->required();

    // sample
    auto* smp = app.add_subcommand("sample", "row sampling summaries");
    std::string method = "lewis";
    double smp_p = 2.0, smp_eps = 0.5;
    Index smp_s = 0, block = 64;
    smp->add_option("--input", input)->required();
    smp->add_option("--out", out_path);
    smp->add_option("--method", method, "lewis|online-spectral|merge-reduce");
    smp->add_option("--p", smp_p);
    smp->add_option("--s", smp_s, "sample budget (lewis method)");
    smp->add_option("--eps", smp_eps);
    smp->add_option("--block", block, "merge-reduce block size");
    smp->add_option("--seed", seed)->required();

    // regress
    auto* reg = app.add_subcommand("regress", "lp regression on [A b] rows");
    std::string route = "offline";
    double reg_p = 4.0, reg_q = 2.0, reg_eps = 0.25;
    reg->add_option("--input", input, "matrix with the target as last column")->required();
    reg->add_option("--out", out_path);
    reg->add_option("--p", reg_p)->required();
    reg->add_option("--q", reg_q);
    reg->add_option("--eps", reg_eps);
    reg->add_option("--route", route, "offline|streaming|linf");
    reg->add_option("--n-declared", n_declared);
    reg->add_option("--seed", seed)->required();

    // css
    auto* css = app.add_subcommand("css", "lp column subset selection");
    double css_p = 4.0, css_q = 2.0;
    int css_k = 2;
    css->add_option("--input", input)->required();
    css->add_option("--out", out_path);
    css->add_option("--p", css_p)->required();
    css->add_option("--q", css_q);
    css->add_option("--k", css_k)->required();
    css->add_option("--seed", seed)->required();

    // hull
    auto* hull = app.add_subcommand("hull", "symmetrized convex-hull coreset + support queries");
    Index num_queries = 0;
    hull->add_option("--input", input)->required();
    hull->add_option("--out", out_path);
    hull->add_option("--queries", queries_path, "matrix of query directions");
    hull->add_option("--num-queries", num_queries, "generate unit directions instead");
    auto* hull_seed = hull->add_option("--seed", seed, "required with --num-queries");

    // ellipsoid
    auto* ell = app.add_subcommand("ellipsoid", "coreset ellipsoid for polytope or hull");
    std::string target = "polytope";
    ell->add_option("--input", input)->required();
    ell->add_option("--out", out_path);
    ell->add_option("--target", target, "polytope|hull");

    // volmax
    auto* vm = app.add_subcommand("volmax", "k-subset volume maximization");
    int vm_k = 2, vm_r = 0;
    std::string vm_mode = "greedy";
    vm->add_option("--input", input)->required();
    vm->add_option("--out", out_path);
    vm->add_option("--k", vm_k)->required();
    vm->add_option("--r", vm_r, "sketch dimension (0: no sketch)");
    vm->add_option("--mode", vm_mode, "exact|greedy");
    vm->add_option("--seed", seed)->required();

    // shell
    auto* sh = app.add_subcommand("shell", "minimum-width spherical shell");
    int sh_starts = 16, sh_evals = 500;
    sh->add_option("--input", input)->required();
    sh->add_option("--out", out_path);
    sh->add_option("--starts", sh_starts);
    sh->add_option("--evals", sh_evals);

    // lp-solve
    auto* lps = app.add_subcommand("lp-solve", "maximize <c,x> over ||A|_S x||_inf <= 1");
    std::vector<double> objective;
    lps->add_option("--input", input)->required();
    lps->add_option("--out", out_path);
    lps->add_option("--objective", objective, "objective vector entries")->required();

    // audit
    auto* aud = app.add_subcommand("audit", "online score sums + coreset sandwich checks");
    double aud_constant = 10.0;
    std::optional<double> aud_int_bound;
    Index aud_queries = 200;
    double aud_p = 0.0;
    aud->add_option("--input", input)->required();
    aud->add_option("--out", out_path);
    aud->add_option("--constant", aud_constant);
    aud->add_option("--integer-bound", aud_int_bound, "declare integer entries bounded by M");
    aud->add_option("--queries", aud_queries);
    aud->add_option("--p", aud_p, "also audit online lp sensitivities (p > 2)");
    aud->add_option("--seed", seed)->required();

    CLI11_PARSE(app, argc, argv);

    auto t0 = std::chrono::steady_clock::now();
    try {
        json result;
        if (*gen) {
            Matrix A = generate_matrix(gen_kind, gen_n, gen_d, gen_bound, gen_levels, gen_base, seed);
            write_matrix(gen_out, A, gen_format == "binary" ? MatrixFormat::Binary : MatrixFormat::Text);
            result["command"] = "generate";
            result["kind"] = gen_kind;
            result["n"] = A.rows();
            result["d"] = A.cols();
            result["seed"] = seed;
            result["path"] = gen_out;
        } else if (*slinf) {
            Matrix A = read_matrix(input);
            result["command"] = "sketch-linf";
            result["n"] = A.rows();
            result["d"] = A.cols();
            if (restricted) {
                RestrictedCoreset rc(A.cols(), norm_lo, norm_hi);
                Index kept = 0;
                for (Index i = 0; i < A.rows(); ++i)
                    if (rc.ingest(A.row(i).transpose()) == Ingest::Kept) ++kept;
                result["restricted"] = true;
                result["size"] = rc.size();
                result["welch_cap"] = 2 * A.cols() - 1;
                result["rows"] = matrix_to_json(rc.rows_matrix());
            } else if (k_robust > 0) {
                KRobustCascade casc(A.cols(), k_robust);
                for (Index i = 0; i < A.rows(); ++i) casc.ingest(A.row(i).transpose());
                result["k"] = k_robust;
                result["union_size"] = casc.union_size();
                result["delta"] = casc.distortion();
                json levels = json::array();
                for (const auto& lvl : casc.levels()) levels.push_back(lvl.to_json());
                result["levels"] = levels;
            } else {
                Coreset c(A.cols());
                for (Index i = 0; i < A.rows(); ++i) c.ingest(A.row(i).transpose());
                result.update(coreset_report(c, std::nullopt));
            }
        } else if (*slp) {
            Matrix A = read_matrix(input);
            if (n_declared <= 0) n_declared = A.rows();
            result["command"] = "sketch-lp";
            result["variant"] = lp_variant;
            if (lp_variant == "quadratic") {
                LpQuadraticSketch sk(A.cols(), lp_p, n_declared);
                for (Index i = 0; i < A.rows(); ++i) sk.ingest(A.row(i).transpose());
                result["sketch"] = sk.to_json();
            } else if (lp_variant == "lq") {
                if (slp_seed->count() == 0) throw config_error("MissingSeed", "--seed is required");
                LqTradeoffSketch sk(A.cols(), lp_p, lp_q, n_declared, seed);
                for (Index i = 0; i < A.rows(); ++i) sk.ingest(A.row(i).transpose());
                result["p"] = lp_p;
                result["q"] = lp_q;
                result["summary_rows"] = matrix_to_json(sk.inner().summary_rows());
            } else if (lp_variant == "exp") {
                if (slp_seed->count() == 0) throw config_error("MissingSeed", "--seed is required");
                ExpEmbedSketch sk(A.cols(), lp_p, seed, replicas);
                for (Index i = 0; i < A.rows(); ++i) sk.ingest(A.row(i).transpose());
                result["p"] = lp_p;
                result["replicas"] = sk.replicas();
                json reps = json::array();
                for (int r = 0; r < sk.replicas(); ++r) reps.push_back(sk.replica(r).to_json());
                result["replica_coresets"] = reps;
            } else {
                throw config_error("BadKind", "unknown sketch-lp variant: " + lp_variant);
            }
        } else if (*lew) {
            Matrix A = read_matrix(input);
            result["command"] = "lewis";
            result["p"] = lewis_p;
            if (lewis_mode == "offline") {
                FixedPointOptions opts;
                opts.gamma = lewis_gamma;
                LewisWeights w = lewis_fixed_point(A, lewis_p, opts);
                result["weights"] = w.to_json();
                result["sum"] = w.w.sum();
            } else {
                StreamLewisMode mode =
                    lewis_mode == "fewpass" ? StreamLewisMode::FewPass : StreamLewisMode::LogPass;
                MatrixRowSource src(A);
                StreamLewisOptions opts;
                opts.pass_cap = pass_cap;
                opts.rounds = rounds;
                opts.gamma = lewis_gamma;
                StreamLewisResult r = stream_lewis_quadratic(src, lewis_p, mode, opts);
                result["mode"] = lewis_mode;
                result["passes"] = r.passes;
                result["rounds"] = r.rounds;
                result["quadratic"] = matrix_to_json(r.quadratic.M);
                Vector w(A.rows());
                for (Index i = 0; i < A.rows(); ++i)
                    w(i) = recover_stream_weight(r, A.row(i).transpose());
                result["recovered_weights"] = vector_to_json(w);
                result["sum"] = w.sum();
            }
        } else if (*emb) {
            Matrix A = read_matrix(input);
            LpLqEmbedding e = lp_to_lq_embed(A, emb_p, emb_q, emb_eps, seed, emb_budget);
            result["command"] = "embed";
            result["p"] = emb_p;
            result["q"] = emb_q;
            result["eps"] = emb_eps;
            result["kappa"] = e.kappa_reported;
            result["kappa_core"] = e.kappa_core;
            result["sample_budget"] = e.sample_budget;
            result["SA"] = matrix_to_json(e.SA);
        } else if (*smp) {
            Matrix A = read_matrix(input);
            result["command"] = "sample";
            result["method"] = method;
            if (method == "lewis") {
                LewisWeights w = lewis_fixed_point(A, smp_p);
                Index s = smp_s > 0 ? smp_s : 4 * A.cols();
                SampledMatrix sm = lewis_sample(A, smp_p, w.w, s, seed);
                result["sample"] = sm.to_json();
            } else if (method == "online-spectral") {
                OnlineSpectralResult r = online_spectral_sample(A, smp_eps, seed);
                result["c"] = r.c;
                result["kept"] = r.sample.rows.rows();
                result["sample"] = r.sample.to_json();
            } else if (method == "merge-reduce") {
                MergeTreeSummary mt(A.cols(), smp_p, block, smp_eps, seed);
                for (Index i = 0; i < A.rows(); ++i) mt.ingest(A.row(i).transpose());
                result["block"] = block;
                result["max_inventory"] = mt.max_block_inventory();
                result["summary_rows"] = matrix_to_json(mt.summary_rows());
            } else {
                throw config_error("BadKind", "unknown sampling method: " + method);
            }
        } else if (*reg) {
            Matrix Ab = read_matrix(input);
            if (n_declared <= 0) n_declared = Ab.rows();
            RegressionResult r;
            if (route == "offline") {
                r = sketch_solve_regression(Ab.leftCols(Ab.cols() - 1), Ab.col(Ab.cols() - 1),
                                            reg_p, reg_q, reg_eps, seed);
            } else if (route == "streaming") {
                r = streaming_regression_coreset(Ab, reg_p, n_declared, reg_eps, seed);
            } else if (route == "linf") {
                Coreset c(Ab.cols());
                for (Index i = 0; i < Ab.rows(); ++i) c.ingest(Ab.row(i).transpose());
                r = linf_regression(c);
            } else {
                throw config_error("BadKind", "unknown regression route: " + route);
            }
            result["command"] = "regress";
            result["p"] = reg_p;
            result.update(r.to_json());
        } else if (*css) {
            Matrix A = read_matrix(input);
            CssResult r = css_select(A, css_p, css_k, css_q, seed);
            result["command"] = "css";
            result["p"] = css_p;
            result["q"] = css_q;
            result["k"] = css_k;
            result.update(r.to_json());
        } else if (*hull) {
            Matrix A = read_matrix(input);
            SymmetrizedStream sym;
            Coreset c(A.cols());
            for (Index i = 0; i < A.rows(); ++i)
                if (auto b = sym.feed(A.row(i).transpose())) c.ingest(*b);
            result["command"] = "hull";
            result["base_point"] = vector_to_json(sym.base_point());
            result.update(coreset_report(c, std::nullopt));
            Matrix Q(0, A.cols());
            if (!queries_path.empty()) Q = read_matrix(queries_path);
            else if (num_queries > 0) {
                if (hull_seed->count() == 0) throw config_error("MissingSeed", "--seed is required");
                Q = Matrix(num_queries, A.cols());
                rng::Stream stream = rng::substream(seed, {0x71ULL});
                for (Index i = 0; i < num_queries; ++i)
                    Q.row(i) = unit_direction(stream, A.cols()).transpose();
            }
            if (Q.rows() > 0) {
                json sup = json::array();
                for (Index i = 0; i < Q.rows(); ++i)
                    sup.push_back(hull_support(c, Q.row(i).transpose()));
                result["supports"] = sup;
            }
        } else if (*ell) {
            Matrix A = read_matrix(input);
            Coreset c(A.cols());
            for (Index i = 0; i < A.rows(); ++i) c.ingest(A.row(i).transpose());
            EllipsoidResult r = ellipsoid_from_coreset(
                c, target == "hull" ? EllipsoidTarget::Hull : EllipsoidTarget::Polytope);
            result["command"] = "ellipsoid";
            result["target"] = target;
            result["delta"] = r.delta;
            result["span_restricted"] = r.span_restricted;
            result["H"] = matrix_to_json(r.E.H);
        } else if (*vm) {
            Matrix A = read_matrix(input);
            VolmaxResult r = volmax_select(A, vm_k, vm_r > 0 ? vm_r : static_cast<int>(A.cols()),
                                           seed, vm_mode == "exact" ? VolmaxMode::Exact : VolmaxMode::Greedy);
            result["command"] = "volmax";
            result["k"] = vm_k;
            result["indices"] = r.indices;
            result["log_volume"] = r.log_volume;
            result["coreset_size"] = r.coreset_size;
        } else if (*sh) {
            Matrix A = read_matrix(input);
            ShellOptions opts;
            opts.starts = sh_starts;
            opts.evals_per_start = sh_evals;
            ShellResult r = shell_solve(A, opts);
            result["command"] = "shell";
            result["center"] = vector_to_json(r.center);
            result["inner"] = r.inner;
            result["outer"] = r.outer;
            result["certified_inner"] = r.certified_inner;
            result["certified_outer"] = r.certified_outer;
            result["delta"] = r.delta;
            result["width"] = r.outer - r.inner;
        } else if (*lps) {
            Matrix A = read_matrix(input);
            Coreset c(A.cols());
            for (Index i = 0; i < A.rows(); ++i) c.ingest(A.row(i).transpose());
            Vector obj(static_cast<Index>(objective.size()));
            for (size_t i = 0; i < objective.size(); ++i) obj(static_cast<Index>(i)) = objective[i];
            LpSolveResult r = lp_maximize(obj, c);
            result["command"] = "lp-solve";
            result["value"] = r.value;
            result["value_star"] = r.value_star;
            result["delta"] = r.delta;
            result["x_hat"] = vector_to_json(r.x_hat);
        } else if (*aud) {
            Matrix A = read_matrix(input);
            result["command"] = "audit";
            OnlineScoreState state(A.cols());
            Coreset c(A.cols());
            for (Index i = 0; i < A.rows(); ++i) {
                state.observe_online_leverage(A.row(i).transpose());
                c.ingest(A.row(i).transpose());
            }
            result["leverage_audit"] = state.audit_sums(A.rows(), A.cols(), aud_int_bound, aud_constant).to_json();
            if (aud_p > 2.0) {
                OnlineScoreState lp_state(A.cols(), aud_p);
                for (Index i = 0; i < A.rows(); ++i)
                    lp_state.observe_online_lp_sensitivity(A.row(i).transpose());
                result["lp_audit"] =
                    lp_state.audit_sums(A.rows(), A.cols(), aud_int_bound, aud_constant).to_json();
            }
            // coreset sandwich spot-check against the full matrix
            rng::Stream stream = rng::substream(seed, {0x617564ULL});
            Index violations = 0;
            double delta = c.distortion();
            for (Index t = 0; t < aud_queries; ++t) {
                Vector x = unit_direction(stream, A.cols());
                double full = (A * x).cwiseAbs().maxCoeff();
                double small = c.query_linf(x);
                if (!(small <= full * (1.0 + 1e-9) && full <= delta * small * (1.0 + 1e-9)))
                    ++violations;
            }
            result["coreset_size"] = c.size();
            auto bound = c.certified_size_bound();
            result["size_bound"] = {{"bound", bound.bound}, {"within", bound.within}};
            result["sandwich"] = {{"queries", aud_queries}, {"violations", violations}, {"delta", delta}};
        }
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
        std::cerr << "geostream: done in " << ms << " ms\n";
        emit(result, out_path);
        return 0;
    } catch (const Error& e) {
        json err;
        err["error"] = e.name();
        err["message"] = e.what();
        std::cerr << err.dump() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        json err;
        err["error"] = "Internal";
        err["message"] = e.what();
        std::cerr << err.dump() << "\n";
        return 4;
    }
}
