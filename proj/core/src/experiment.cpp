#include "shufflegrad/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "shufflegrad/parallel.hpp"
#include "shufflegrad/rng.hpp"
#include "shufflegrad/welford.hpp"

namespace shufflegrad {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& path, const std::string& what) {
    throw std::invalid_argument("config: " + path + ": " + what);
}

void require_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.count(key)) {
            std::string valid;
            for (const auto& k : allowed) valid += (valid.empty() ? "" : ", ") + k;
            config_error(path.empty() ? key : path + "." + key, "unknown key (valid keys: " + valid + ")");
        }
    }
}

template <typename T>
T get_as(const json& obj, const std::string& path, const std::string& key, T fallback, bool required = false) {
    if (!obj.contains(key)) {
        if (required) config_error(path.empty() ? key : path + "." + key, "missing required key");
        return fallback;
    }
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        config_error(path.empty() ? key : path + "." + key, "wrong type");
    }
}

IndexScheme parse_scheme(const std::string& text) {
    if (text == "RR") return IndexScheme::RR;
    if (text == "SS") return IndexScheme::SS;
    if (text == "IG") return IndexScheme::IG;
    if (text == "IID") return IndexScheme::IID;
    config_error("scheme", "invalid value '" + text + "' (valid values: RR, SS, IG, IID)");
}

ProblemSpec::PsiSpec parse_psi(const json& obj) {
    ProblemSpec::PsiSpec psi;
    require_keys(obj, "problem.psi", {"kind", "mu", "radius", "lambda", "lower", "upper"});
    psi.kind = get_as<std::string>(obj, "problem.psi", "kind", "zero", true);
    const std::set<std::string> kinds = {"zero", "sqnorm", "ball", "box", "l1", "sqnorm_ball"};
    if (!kinds.count(psi.kind)) {
        config_error("problem.psi.kind", "invalid value '" + psi.kind +
                                             "' (valid values: zero, sqnorm, ball, box, l1, sqnorm_ball)");
    }
    psi.mu = get_as<double>(obj, "problem.psi", "mu", 0.0);
    psi.radius = get_as<double>(obj, "problem.psi", "radius", 1.0);
    psi.lambda = get_as<double>(obj, "problem.psi", "lambda", 0.0);
    psi.lower = get_as<double>(obj, "problem.psi", "lower", -1.0);
    psi.upper = get_as<double>(obj, "problem.psi", "upper", 1.0);
    if ((psi.kind == "sqnorm" || psi.kind == "sqnorm_ball") && !(psi.mu > 0.0)) {
        config_error("problem.psi.mu", "must be positive for sqnorm variants");
    }
    if ((psi.kind == "ball" || psi.kind == "sqnorm_ball") && !(psi.radius > 0.0)) {
        config_error("problem.psi.radius", "must be positive");
    }
    if (psi.kind == "l1" && !(psi.lambda > 0.0)) config_error("problem.psi.lambda", "must be positive");
    if (psi.kind == "box" && psi.lower > psi.upper) config_error("problem.psi.lower", "lower > upper");
    return psi;
}

ProblemSpec parse_problem(const json& obj) {
    ProblemSpec spec;
    require_keys(obj, "problem", {"family", "G", "mu", "d", "seed", "planted", "psi"});
    spec.family = get_as<std::string>(obj, "problem", "family", "", true);
    if (spec.family != "hard" && spec.family != "lad" && spec.family != "hinge") {
        config_error("problem.family",
                     "invalid value '" + spec.family + "' (valid values: hard, lad, hinge)");
    }
    spec.G = get_as<double>(obj, "problem", "G", 1.0);
    spec.mu = get_as<double>(obj, "problem", "mu", 1.0);
    spec.d = get_as<Step>(obj, "problem", "d", 2);
    spec.seed = get_as<std::uint64_t>(obj, "problem", "seed", 0);
    spec.planted = get_as<bool>(obj, "problem", "planted", true);
    if (spec.family == "hard") {
        if (obj.contains("psi")) config_error("problem.psi", "the hard family fixes psi = (mu/2)||x||^2");
        if (!(spec.G > 0.0)) config_error("problem.G", "must be positive");
        if (!(spec.mu > 0.0)) config_error("problem.mu", "must be positive");
    } else {
        if (spec.d < 1) config_error("problem.d", "must be >= 1");
        if (obj.contains("psi")) spec.psi = parse_psi(obj.at("psi"));
    }
    return spec;
}

ScheduleSpec parse_schedule(const json& obj) {
    ScheduleSpec spec;
    require_keys(obj, "schedule", {"kind", "eta", "auto_eta", "m", "mu"});
    spec.kind = get_as<std::string>(obj, "schedule", "kind", "", true);
    const std::set<std::string> kinds = {"epoch_decay", "const_over_sqrt_T", "inv_sqrt_t", "polyak"};
    if (!kinds.count(spec.kind)) {
        config_error("schedule.kind",
                     "invalid value '" + spec.kind +
                         "' (valid values: epoch_decay, const_over_sqrt_T, inv_sqrt_t, polyak)");
    }
    spec.eta = get_as<double>(obj, "schedule", "eta", 1.0);
    spec.auto_eta = get_as<bool>(obj, "schedule", "auto_eta", false);
    spec.m = get_as<int>(obj, "schedule", "m", 2);
    if (obj.contains("mu")) spec.mu = get_as<double>(obj, "schedule", "mu", 0.0);
    if (spec.kind == "polyak") {
        if (spec.auto_eta) config_error("schedule.auto_eta", "not applicable to the polyak rule");
        if (spec.m < 1) config_error("schedule.m", "must be >= 1");
    } else if (!spec.auto_eta && !(spec.eta > 0.0)) {
        config_error("schedule.eta", "must be positive");
    }
    return spec;
}

}  // namespace

ExperimentSpec parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& err) {
        throw std::invalid_argument(std::string("config: not valid JSON: ") + err.what());
    }
    if (!root.is_object()) throw std::invalid_argument("config: top level must be an object");
    require_keys(root, "", {"name", "problem", "scheme", "schedule", "sweep", "replications",
                            "master_seed", "outputs", "stride", "ref_budget"});

    ExperimentSpec spec;
    spec.name = get_as<std::string>(root, "", "name", "experiment");
    if (!root.contains("problem")) config_error("problem", "missing required key");
    spec.problem = parse_problem(root.at("problem"));
    spec.scheme = parse_scheme(get_as<std::string>(root, "", "scheme", "", true));
    if (!root.contains("schedule")) config_error("schedule", "missing required key");
    spec.schedule = parse_schedule(root.at("schedule"));

    if (!root.contains("sweep")) config_error("sweep", "missing required key");
    const json& sweep = root.at("sweep");
    require_keys(sweep, "sweep", {"n", "K"});
    spec.sweep_n = get_as<std::vector<Step>>(sweep, "sweep", "n", {}, true);
    spec.sweep_K = get_as<std::vector<Step>>(sweep, "sweep", "K", {}, true);
    if (spec.sweep_n.empty()) config_error("sweep.n", "must be a nonempty list");
    if (spec.sweep_K.empty()) config_error("sweep.K", "must be a nonempty list");
    for (Step n : spec.sweep_n) {
        if (n < 1) config_error("sweep.n", "entries must be >= 1");
    }
    for (Step K : spec.sweep_K) {
        if (K < 1) config_error("sweep.K", "entries must be >= 1");
    }

    spec.replications = get_as<int>(root, "", "replications", 32);
    if (spec.replications < 1) config_error("replications", "must be >= 1");
    spec.master_seed = get_as<std::uint64_t>(root, "", "master_seed", 0);
    spec.stride = get_as<Step>(root, "", "stride", 0);
    if (spec.stride < 0) config_error("stride", "must be >= 0");
    spec.ref_budget = get_as<std::int64_t>(root, "", "ref_budget", 1'000'000);
    if (spec.ref_budget < 1) config_error("ref_budget", "must be >= 1");

    if (root.contains("outputs")) {
        const auto outputs = get_as<std::vector<std::string>>(root, "", "outputs", {});
        spec.out_last = spec.out_average = spec.out_suffix = false;
        for (const std::string& out : outputs) {
            if (out == "last") {
                spec.out_last = true;
            } else if (out == "average") {
                spec.out_average = true;
            } else if (out == "suffix") {
                spec.out_suffix = true;
            } else {
                config_error("outputs", "invalid value '" + out + "' (valid values: last, average, suffix)");
            }
        }
        if (!spec.out_last && !spec.out_average && !spec.out_suffix) {
            config_error("outputs", "must request at least one of last, average, suffix");
        }
    }
    return spec;
}

double auto_eta_value(IndexScheme scheme, StepKind kind, const LipschitzStats& stats,
                      double D_star, const Horizon& horizon) {
    const double G1 = stats.G_f1;
    const double G2 = stats.G_f2;
    const double n = static_cast<double>(horizon.n);
    const double T = static_cast<double>(horizon.T);
    const double qT = static_cast<double>(horizon.epochs());
    const double D = std::max(D_star, 1e-9);
    if (kind == StepKind::PolyakStr) {
        throw std::invalid_argument("auto_eta_value: not applicable to the polyak rule");
    }
    if (scheme == IndexScheme::SS && kind == StepKind::ConstOverSqrtT) {
        const double load = std::max(qT * G2 * G2, std::sqrt(n * qT) * G1 * G2);
        return D / std::sqrt(load * (1.0 + std::log(T)));
    }
    switch (kind) {
        case StepKind::EpochDecay:
            return D / (std::pow(n, 0.25) * std::sqrt(G1 * G2 * (1.0 + std::log(n) / qT)));
        case StepKind::ConstOverSqrtT:
            return D / (std::pow(n, 0.25) * std::sqrt(G1 * G2 * (1.0 + std::log(T))));
        default:
            return D / (std::pow(n, 0.25) * std::sqrt(G1 * G2));
    }
}

namespace {

Regularizer build_regularizer(const ProblemSpec::PsiSpec& psi, Step d) {
    const std::size_t dim = static_cast<std::size_t>(d);
    if (psi.kind == "zero") return Regularizer::zero();
    if (psi.kind == "sqnorm") return Regularizer::sq_norm(psi.mu, zeros(dim));
    if (psi.kind == "ball") return Regularizer::indicator(ConvexSet::ball(zeros(dim), psi.radius));
    if (psi.kind == "box") {
        return Regularizer::indicator(
            ConvexSet::box(vec(dim, psi.lower), vec(dim, psi.upper)));
    }
    if (psi.kind == "l1") return Regularizer::l1(psi.lambda);
    if (psi.kind == "sqnorm_ball") {
        return Regularizer::sq_norm_plus_indicator(psi.mu, zeros(dim),
                                                   ConvexSet::ball(zeros(dim), psi.radius));
    }
    throw std::invalid_argument("build_regularizer: unknown psi kind " + psi.kind);
}

struct CellSetup {
    FiniteSumProblem problem;
    vec x1;
    double F_ref = 0.0;
    double D_star = 0.0;
    StepSchedule schedule;
    SamplerScheme sampler;
};

// Instance and reference for one sweep-n value; shared across K cells for the
// data-backed families (the hard family rebuilds per cell since its dimension
// tracks the horizon).
struct InstanceSetup {
    FiniteSumProblem problem;
    vec x1;
    double F_ref = 0.0;
    double D_star = 0.0;
};

InstanceSetup build_instance(const ExperimentSpec& spec, Step n, Step T) {
    InstanceSetup inst;
    if (spec.problem.family == "hard") {
        inst.problem = hard_instance(spec.problem.G, spec.problem.mu, T, T + 1, n);
    } else if (spec.problem.family == "lad") {
        inst.problem = random_lad_instance(n, spec.problem.d,
                                           derive_seed(spec.problem.seed, static_cast<std::uint64_t>(n)),
                                           build_regularizer(spec.problem.psi, spec.problem.d),
                                           spec.problem.planted);
    } else {
        inst.problem = random_hinge_instance(n, spec.problem.d,
                                             derive_seed(spec.problem.seed, static_cast<std::uint64_t>(n)),
                                             build_regularizer(spec.problem.psi, spec.problem.d));
    }
    inst.x1 = zeros(static_cast<std::size_t>(inst.problem.d));
    if (!inst.problem.regularizer.in_domain(inst.x1, 1e-9)) {
        throw std::invalid_argument("run_experiment: x1 = 0 lies outside dom psi for this configuration");
    }
    if (inst.problem.reference) {
        inst.F_ref = inst.problem.reference->F_star;
        inst.D_star = dist(inst.problem.reference->x_star, inst.x1);
    } else {
        const ReferenceEstimate est =
            reference_optimum(inst.problem, inst.x1, spec.ref_budget,
                              derive_seed(spec.master_seed, 0x5eed, static_cast<std::uint64_t>(n)));
        inst.F_ref = est.F_star_hat;
        inst.D_star = dist(est.x_hat, inst.x1);
    }
    return inst;
}

CellSetup build_cell(const ExperimentSpec& spec, const InstanceSetup& inst, Step n, Step K) {
    CellSetup cell;
    const Step T = K * n;
    cell.problem = inst.problem;
    cell.x1 = inst.x1;
    cell.F_ref = inst.F_ref;
    cell.D_star = inst.D_star;
    const double D_star = cell.D_star;

    const Horizon horizon(T, n);
    const ScheduleSpec& sched = spec.schedule;
    if (sched.kind == "polyak") {
        const double mu = sched.mu.value_or(cell.problem.regularizer.modulus());
        if (!(mu > 0.0)) {
            throw std::invalid_argument(
                "run_experiment: polyak schedule needs a positive mu (none given and psi has modulus 0)");
        }
        cell.schedule = StepSchedule::polyak(sched.m, mu, horizon);
    } else {
        const StepKind kind = (sched.kind == "epoch_decay")       ? StepKind::EpochDecay
                              : (sched.kind == "const_over_sqrt_T") ? StepKind::ConstOverSqrtT
                                                                    : StepKind::InvSqrtT;
        const double eta = sched.auto_eta
                               ? auto_eta_value(spec.scheme, kind, cell.problem.lipschitz, D_star, horizon)
                               : sched.eta;
        cell.schedule = (kind == StepKind::EpochDecay) ? StepSchedule::epoch_decay(eta, horizon)
                        : (kind == StepKind::ConstOverSqrtT)
                            ? StepSchedule::const_over_sqrt_T(eta, horizon)
                            : StepSchedule::inv_sqrt_t(eta, horizon);
    }

    if (spec.scheme == IndexScheme::IG) {
        std::vector<int> perm(static_cast<std::size_t>(n));
        std::iota(perm.begin(), perm.end(), 1);
        cell.sampler = SamplerScheme::ig(std::move(perm));
    } else if (spec.scheme == IndexScheme::RR) {
        cell.sampler = SamplerScheme::rr();
    } else if (spec.scheme == IndexScheme::SS) {
        cell.sampler = SamplerScheme::ss();
    } else {
        cell.sampler = SamplerScheme::iid();
    }
    return cell;
}

struct RepOutcome {
    bool failed = false;
    double gap_last = 0.0;
    double gap_average = 0.0;
    double gap_suffix = 0.0;
    std::vector<std::pair<Step, double>> gaps;
};

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec, int threads) {
    ExperimentResult result;
    std::vector<ResultRow>& rows = result.rows;
    std::uint64_t cell_idx = 0;
    for (Step n : spec.sweep_n) {
        std::optional<InstanceSetup> shared;
        for (Step K : spec.sweep_K) {
            const auto t0 = std::chrono::steady_clock::now();
            const Step T = K * n;
            if (spec.problem.family == "hard") {
                shared = build_instance(spec, n, T);
            } else if (!shared) {
                shared = build_instance(spec, n, T);
            }
            const CellSetup cell = build_cell(spec, *shared, n, K);
            const Step stride = (spec.stride > 0) ? spec.stride : n;

            std::vector<RepOutcome> outcomes(static_cast<std::size_t>(spec.replications));
            parallel_for(spec.replications, threads, [&](std::int64_t rep) {
                RunConfig cfg;
                cfg.horizon = Horizon(T, n);
                cfg.x1 = cell.x1;
                cfg.schedule = cell.schedule;
                cfg.scheme = cell.sampler;
                cfg.seed = derive_seed(spec.master_seed, cell_idx, static_cast<std::uint64_t>(rep));
                cfg.trackers.last = true;
                cfg.trackers.average = spec.out_average;
                cfg.trackers.suffix = spec.out_suffix;
                cfg.trackers.gap_stride = stride;
                cfg.F_ref = cell.F_ref;
                RepOutcome& out = outcomes[static_cast<std::size_t>(rep)];
                try {
                    const Trace trace = run(cell.problem, cfg);
                    out.gap_last = evaluate_gap(cell.problem, trace.last, cell.F_ref);
                    if (spec.out_average) out.gap_average = evaluate_gap(cell.problem, *trace.average, cell.F_ref);
                    if (spec.out_suffix) out.gap_suffix = evaluate_gap(cell.problem, *trace.suffix, cell.F_ref);
                    out.gaps = trace.gaps;
                } catch (const std::runtime_error&) {
                    out.failed = true;
                }
            });

            // Mean trajectory over the successful replications, in rep order.
            if (!outcomes.empty()) {
                std::size_t points = 0;
                for (const RepOutcome& out : outcomes) {
                    if (!out.failed) points = std::max(points, out.gaps.size());
                }
                for (std::size_t k = 0; k < points; ++k) {
                    Welford agg;
                    Step step_t = 0;
                    for (const RepOutcome& out : outcomes) {
                        if (out.failed || k >= out.gaps.size()) continue;
                        step_t = out.gaps[k].first;
                        agg.add(out.gaps[k].second);
                    }
                    if (agg.count > 0) result.series.push_back(SeriesRow{n, K, step_t, agg.mean});
                }
            }

            const auto t1 = std::chrono::steady_clock::now();
            const double wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();

            const auto emit = [&](const std::string& tracker, double RepOutcome::*field) {
                Welford agg;
                int failed = 0;
                for (const RepOutcome& out : outcomes) {
                    if (out.failed) {
                        ++failed;
                    } else {
                        agg.add(out.*field);
                    }
                }
                ResultRow row;
                row.n = n;
                row.K = K;
                row.T = T;
                row.scheme = to_string(spec.scheme);
                row.schedule = spec.schedule.kind;
                row.tracker = tracker;
                row.mean_gap = agg.count > 0 ? agg.mean : std::nan("");
                row.ci_half_width = agg.count > 0 ? agg.half_width95() : std::nan("");
                row.replications = spec.replications;
                row.failed_replications = failed;
                row.wall_time_ms = wall_ms;
                rows.push_back(std::move(row));
            };
            if (spec.out_last) emit("last", &RepOutcome::gap_last);
            if (spec.out_average) emit("average", &RepOutcome::gap_average);
            if (spec.out_suffix) emit("suffix", &RepOutcome::gap_suffix);
            ++cell_idx;
        }
    }
    return result;
}

namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::string to_csv(const std::vector<ResultRow>& rows) {
    std::string out = "n,K,T,scheme,schedule,tracker,mean_gap,ci_half_width,replications,failed_replications\n";
    for (const ResultRow& r : rows) {
        out += std::to_string(r.n) + "," + std::to_string(r.K) + "," + std::to_string(r.T) + "," +
               r.scheme + "," + r.schedule + "," + r.tracker + "," + format_double(r.mean_gap) + "," +
               format_double(r.ci_half_width) + "," + std::to_string(r.replications) + "," +
               std::to_string(r.failed_replications) + "\n";
    }
    return out;
}

std::vector<ResultRow> parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("parse_csv: empty input");
    std::vector<ResultRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::string field;
        std::istringstream ls(line);
        while (std::getline(ls, field, ',')) fields.push_back(field);
        if (fields.size() != 10) throw std::invalid_argument("parse_csv: expected 10 columns");
        ResultRow r;
        r.n = std::stoll(fields[0]);
        r.K = std::stoll(fields[1]);
        r.T = std::stoll(fields[2]);
        r.scheme = fields[3];
        r.schedule = fields[4];
        r.tracker = fields[5];
        r.mean_gap = std::stod(fields[6]);
        r.ci_half_width = std::stod(fields[7]);
        r.replications = std::stoi(fields[8]);
        r.failed_replications = std::stoi(fields[9]);
        rows.push_back(std::move(r));
    }
    return rows;
}

std::string series_to_csv(const std::vector<SeriesRow>& rows) {
    std::string out = "n,K,t,mean_gap\n";
    for (const SeriesRow& r : rows) {
        out += std::to_string(r.n) + "," + std::to_string(r.K) + "," + std::to_string(r.t) + "," +
               format_double(r.mean_gap) + "\n";
    }
    return out;
}

std::vector<SlopeRow> fit_sweep_slopes(const std::vector<ResultRow>& rows) {
    std::vector<SlopeRow> out;
    std::vector<std::pair<Step, std::string>> groups;
    for (const ResultRow& r : rows) {
        const std::pair<Step, std::string> g{r.n, r.tracker};
        if (std::find(groups.begin(), groups.end(), g) == groups.end()) groups.push_back(g);
    }
    for (const auto& [n, tracker] : groups) {
        std::vector<std::pair<double, double>> points;
        for (const ResultRow& r : rows) {
            if (r.n == n && r.tracker == tracker && std::isfinite(r.mean_gap) && r.mean_gap > 0.0) {
                points.emplace_back(static_cast<double>(r.K), r.mean_gap);
            }
        }
        if (points.size() < 3) continue;
        const RateFit fit = fit_rate(points);
        out.push_back(SlopeRow{n, tracker, fit.slope, fit.intercept, fit.r2, static_cast<int>(points.size())});
    }
    return out;
}

std::string slopes_to_csv(const std::vector<SlopeRow>& rows) {
    std::string out = "n,tracker,slope,intercept,r2,cells\n";
    for (const SlopeRow& r : rows) {
        out += std::to_string(r.n) + "," + r.tracker + "," + format_double(r.slope) + "," +
               format_double(r.intercept) + "," + format_double(r.r2) + "," + std::to_string(r.cells) + "\n";
    }
    return out;
}

namespace {

std::string pass_str(bool pass) { return pass ? "pass" : "FAIL"; }

void add_check(VerifyReport& report, const std::string& name, bool pass, const std::string& detail) {
    report.checks.push_back(CheckResult{name, pass, detail});
}

void run_sampler_checks(VerifyReport& report, int n_max, const VerifyOptions& options) {
    {
        bool pass = true;
        std::string detail;
        for (int n = 2; n <= n_max; ++n) {
            for (const SamplerScheme& scheme : {SamplerScheme::rr(), SamplerScheme::ss(), SamplerScheme::iid()}) {
                Step T = 2 * n;
                if (scheme.kind == IndexScheme::IID) {
                    while (T > 1 && std::pow(static_cast<double>(n), static_cast<double>(T)) > 1e6) --T;
                }
                // RR enumeration over two epochs blows past the cap at n = 6; the
                // verify grid stops at 5 anyway.
                const MarginalReport m = check_marginal_uniform(scheme, n, T);
                double worst = 0.0;
                for (double dev : m.max_deviation) worst = std::max(worst, dev);
                if (worst != 0.0) {
                    pass = false;
                    detail += to_string(scheme.kind) + " n=" + std::to_string(n) + " deviates; ";
                }
            }
        }
        add_check(report, "sampler_marginal_uniform", pass,
                  pass ? "exact 1/n marginals for RR/SS/IID, n=2.." + std::to_string(n_max) : detail);
    }
    {
        bool pass = true;
        for (int n = 2; n <= n_max; ++n) pass = pass && check_swap_distribution(n, options.swap_fn);
        add_check(report, "swap_distribution", pass,
                  "position-swap pushforward uniform on S_n, n=2.." + std::to_string(n_max));
    }
    {
        bool pass = true;
        Rng rng(options.seed);
        for (int n = 2; n <= n_max; ++n) {
            const std::size_t size = all_permutations(n).size();
            for (int rep = 0; rep < 20; ++rep) {
                std::vector<std::int64_t> table(size);
                for (auto& v : table) v = static_cast<std::int64_t>(rng.bounded(2001)) - 1000;
                pass = pass && check_conditioned_expectation(n, table, options.swap_fn);
            }
        }
        add_check(report, "conditioned_expectation", pass,
                  "20 random integer tables per n, exact equality, n=2.." + std::to_string(n_max));
    }
    {
        bool pass = true;
        for (int n = 2; n <= n_max; ++n) pass = pass && check_conditioned_marginal(n, options.swap_fn);
        add_check(report, "conditioned_marginal", pass,
                  "swapped entry uniform off the conditioned value, n=2.." + std::to_string(n_max));
    }
}

void run_prox_contraction_check(VerifyReport& report, std::uint64_t seed) {
    Rng rng(seed);
    const int dim = 4;
    const auto random_point = [&](double span) {
        vec x(dim);
        for (double& v : x) v = rng.uniform(-span, span);
        return x;
    };
    double worst = -1e300;
    std::int64_t violations = 0;
    const int trials = 10'000;
    for (int variant = 0; variant < 5; ++variant) {
        for (int k = 0; k < trials; ++k) {
            Regularizer reg;
            switch (variant) {
                case 0: reg = Regularizer::zero(); break;
                case 1: reg = Regularizer::sq_norm(rng.uniform(0.05, 4.0), random_point(1.0)); break;
                case 2:
                    reg = (k % 2 == 0)
                              ? Regularizer::indicator(ConvexSet::ball(random_point(0.5), rng.uniform(0.2, 3.0)))
                              : Regularizer::indicator(ConvexSet::box(vec(dim, -1.5), vec(dim, 0.8)));
                    break;
                case 3: {
                    const vec c = random_point(0.5);
                    reg = Regularizer::sq_norm_plus_indicator(rng.uniform(0.05, 4.0), c,
                                                              ConvexSet::ball(c, rng.uniform(0.2, 3.0)));
                    break;
                }
                default: reg = Regularizer::l1(rng.uniform(0.01, 2.0)); break;
            }
            const double eta = rng.uniform(1e-3, 10.0);
            const auto [lhs, rhs] =
                contraction_gap(reg, random_point(2.0), random_point(2.0), random_point(2.0), random_point(2.0), eta);
            worst = std::max(worst, lhs - rhs);
            if (lhs > rhs + kDefaultTol) ++violations;
        }
    }
    add_check(report, "prox_contraction", violations == 0,
              "10^4 random tuples per psi variant, worst lhs-rhs = " + format_double(worst));
}

void run_stepsize_lemma_check(VerifyReport& report) {
    bool pass = true;
    for (Step n = 1; n <= 8; ++n) {
        for (Step T = 1; T <= 64; ++T) {
            for (double eta_star : {0.1, 1.0, 10.0}) {
                pass = pass && verify_stepsize_lemma(eta_star, n, T).pass;
            }
        }
    }
    add_check(report, "stepsize_lemma", pass, "grid n in [1,8], T in [1,64], eta* in {0.1,1,10}");
}

void run_gamma_eta_check(VerifyReport& report) {
    double worst = 0.0;
    for (int m : {1, 2, 3}) {
        for (Step T : {1, 2, 5, 10, 25, 50}) {
            for (double mu : {0.5, 1.0, 2.0}) {
                const auto r = gamma_eta_identity_report(m, mu, T);
                worst = std::max({worst, r.max_pointwise_rel_err, r.telescoped_rel_err});
            }
        }
    }
    add_check(report, "gamma_eta_binomial", worst <= 1e-10,
              "worst relative error " + format_double(worst) + " (tolerance 1e-10)");
}

void run_lower_bound_check(VerifyReport& report) {
    bool pass = true;
    double slack = 1e300;
    for (double G : {0.5, 1.0, 2.0}) {
        for (double mu : {0.5, 1.0, 2.0}) {
            for (Step T : {1, 3, 7, 15}) {
                const LowerBoundReport r = lower_bound_check(G, mu, T);
                pass = pass && r.pass;
                slack = std::min(slack, r.min_gap - r.bound);
            }
        }
    }
    add_check(report, "lower_bound", pass, "grid {0.5,1,2}^2 x T in {1,3,7,15}, min slack " + format_double(slack));
}

void run_omega_checks(VerifyReport& report, std::int64_t trials, const VerifyOptions& options) {
    bool pass = true;
    double worst = -1e300;
    for (const IndexScheme scheme : {IndexScheme::RR, IndexScheme::SS}) {
        for (const ConvexitySetting setting : {ConvexitySetting::Convex, ConvexitySetting::StronglyConvex}) {
            for (Step n : {2, 4}) {
                for (Step T : {2 * n, 4 * n}) {
                    const double mu = 0.5;
                    const Regularizer reg = (setting == ConvexitySetting::Convex)
                                                ? Regularizer::zero()
                                                : Regularizer::sq_norm(mu, zeros(3));
                    const FiniteSumProblem problem = random_lad_instance(
                        n, 3, derive_seed(options.seed, static_cast<std::uint64_t>(n)), reg, false);
                    const Horizon horizon(T, n);
                    StepSchedule schedule;
                    if (setting == ConvexitySetting::StronglyConvex) {
                        schedule = StepSchedule::polyak(2, mu, horizon);
                    } else if (scheme == IndexScheme::SS) {
                        schedule = StepSchedule::const_over_sqrt_T(1.0, horizon);
                    } else {
                        schedule = StepSchedule::inv_sqrt_t(1.0, horizon);
                    }
                    const OmegaConformance r = check_omega_conformance(
                        problem, scheme, setting, schedule, zeros(3), T, trials,
                        derive_seed(options.seed, static_cast<std::uint64_t>(T), static_cast<std::uint64_t>(n)),
                        options.threads);
                    pass = pass && r.pass;
                    worst = std::max(worst, r.worst_margin);
                }
            }
        }
    }
    add_check(report, "omega_conformance", pass,
              "RR/SS x convex/strongly-convex on LAD (n in {2,4}), " + std::to_string(trials) +
                  " trials, worst |mean|-(Phi eta_s + CI) = " + format_double(worst));
}

}  // namespace

VerifyReport verify_suite(VerifyLevel level, const VerifyOptions& options) {
    VerifyReport report;
    report.level = level;
    const int n_max = (level == VerifyLevel::Fast) ? 4 : 5;
    const std::int64_t trials = (level == VerifyLevel::Fast) ? 10'000 : 100'000;
    run_sampler_checks(report, n_max, options);
    run_prox_contraction_check(report, options.seed);
    run_stepsize_lemma_check(report);
    run_gamma_eta_check(report);
    run_lower_bound_check(report);
    run_omega_checks(report, trials, options);
    report.all_pass = std::all_of(report.checks.begin(), report.checks.end(),
                                  [](const CheckResult& c) { return c.pass; });
    return report;
}

std::string report_to_json(const VerifyReport& report) {
    json out;
    out["level"] = (report.level == VerifyLevel::Fast) ? "fast" : "full";
    out["all_pass"] = report.all_pass;
    out["checks"] = json::array();
    for (const CheckResult& c : report.checks) {
        out["checks"].push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    }
    return out.dump(2);
}

std::string report_to_text(const VerifyReport& report) {
    std::string out;
    for (const CheckResult& c : report.checks) {
        out += pass_str(c.pass) + "  " + c.name + "  (" + c.detail + ")\n";
    }
    out += report.all_pass ? "all checks passed\n" : "SOME CHECKS FAILED\n";
    return out;
}

}  // namespace shufflegrad
