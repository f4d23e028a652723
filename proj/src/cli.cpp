// Copyright 2026 The bagsched Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bagsched/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"

#include "bagsched/generators.hpp"
#include "bagsched/io.hpp"
#include "bagsched/lp_bridge.hpp"

namespace bagsched {

namespace {

std::string output_path(const std::string& explicit_path, const std::string& default_name) {
    if (!explicit_path.empty()) return explicit_path;
    const char* dir = std::getenv(kOutDirEnv);
    std::filesystem::path base = dir && *dir ? dir : ".";
    return (base / default_name).string();
}

std::string stem_of(const std::string& path) {
    auto s = std::filesystem::path(path).filename().string();
    for (const char* ext : {".json", ".jsonl", ".trace"})
        if (s.size() > std::string(ext).size() && s.ends_with(ext)) s.resize(s.size() - std::string(ext).size());
    return s;
}

void write_or_print(const std::string& path, const std::string& text, std::ostream& out) {
    if (path == "-") out << text;
    else write_file(path, text);
}

/// Rebuilds an instance from raw speeds through rounding and class selection.
Instance preprocess_instance(const nlohmann::json& doc, const Instance& parsed, double gamma) {
    const auto result = preprocess_speeds(raw_speeds_from_json(doc));
    return Instance(result.selection.classes, parsed.jobs(), gamma, result.loss_factor);
}

double min_slack(const std::vector<ConstraintReport>& reports) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& r : reports) m = std::min(m, r.min_slack);
    return m;
}

// --- simulate ------------------------------------------------------------------------------

struct SimulateArgs {
    std::string instance;
    std::optional<double> gamma;
    bool preprocess = false;
    bool realize = false;
    std::string out;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
    const auto doc = read_json_file(a.instance);
    Instance inst = instance_from_json(doc);
    const double gamma = a.gamma.value_or(inst.speedup());
    if (a.preprocess) {
        inst = preprocess_instance(doc, inst, gamma);
        out << "preprocessed classes:";
        for (const auto& c : inst.classes()) out << " " << c.sigma << "x" << c.count;
        out << " (loss factor " << inst.preprocessing_loss() << ")\n";
    } else if (gamma != inst.speedup()) {
        inst = inst.with_speedup(gamma);
    }
    if (!inst.ica_satisfied()) err << "note: machine profile violates ICA: " << inst.ica_report().describe() << "\n";

    const Trace trace = simulate(inst);
    const std::string path = output_path(a.out, stem_of(a.instance) + ".trace.jsonl");
    std::ostringstream ss;
    write_trace(ss, trace, inst);
    write_or_print(path, ss.str(), out);

    out << std::setprecision(12);
    out << "objective " << trace.objective(inst) << "\n";
    out << "makespan " << trace.makespan() << "\n";
    out << "intervals " << trace.intervals.size() << "\n";
    if (path != "-") out << "trace " << path << "\n";

    if (a.realize) {
        std::size_t failed = 0;
        double worst = 0.0;
        for (const auto& iv : trace.intervals) {
            const auto slice = realize_slice(iv.profile, inst.machines(), iv.start, iv.end);
            if (!slice.success) ++failed;
            for (const auto& w : slice.work)
                worst = std::max(worst, std::abs(w.processed - w.quota) / std::max(1.0, w.quota));
        }
        out << "realization " << (failed == 0 ? "ok" : "FAILED") << " (" << trace.intervals.size()
            << " slices, max work error " << worst << ")\n";
        if (failed > 0) return kExitInfeasible;
    }
    return kExitOk;
}

// --- verify --------------------------------------------------------------------------------

struct VerifyArgs {
    std::string trace;
    std::string family = "weaker";
    std::optional<double> gamma;
    std::string json_out;
    bool values = false;
};

int cmd_verify(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
    auto loaded = load_trace(a.trace);
    const DualFamily family = parse_family(a.family);
    Instance inst = loaded.instance;
    Trace trace = std::move(loaded.trace);
    if (a.gamma && *a.gamma != trace.gamma) {
        err << "re-simulating at gamma " << *a.gamma << " (trace was run at " << trace.gamma << ")\n";
        inst = inst.with_speedup(*a.gamma);
        trace = simulate(inst);
    } else if (trace.gamma != inst.speedup()) {
        inst = inst.with_speedup(trace.gamma);
    }

    const DualCertificate cert = build_duals(family, trace, inst);
    out << std::setprecision(12);
    out << "family " << to_string(family) << "\n";
    out << "gamma " << cert.gamma << " (family asks for >= " << cert.gamma_required << ")\n";
    for (const auto& n : cert.notes) out << "note: " << n << "\n";
    for (const auto& r : cert.constraints)
        out << "  " << std::left << std::setw(16) << r.name << std::right << " checked " << r.checked << " violated "
            << r.violated << " min slack " << r.min_slack << "\n";
    out << "feasible " << (cert.feasible ? "yes" : "no") << "\n";
    out << "min slack " << min_slack(cert.constraints) << "\n";
    out << "dual objective " << cert.dual_objective << "\n";
    out << "weighted completion " << cert.weighted_completion << "\n";
    auto doc = certificate_to_json(cert, a.values);
    if (cert.feasible && cert.dual_objective > 0.0) {
        const double ratio = certified_ratio(cert, trace, inst);
        out << "certified ratio " << ratio << "\n";
        doc["certified_ratio"] = ratio;
    } else {
        out << "certified ratio n/a\n";
    }
    if (!a.json_out.empty()) write_or_print(a.json_out, doc.dump(2) + "\n", out);
    return cert.feasible ? kExitOk : kExitInfeasible;
}

// --- emit-lp -------------------------------------------------------------------------------

struct EmitArgs {
    std::string instance;
    std::int64_t horizon = 0;
    std::string out;
    std::string solution;
};

int cmd_emit_lp(const EmitArgs& a, std::ostream& out, std::ostream& err) {
    const Instance inst = load_instance(a.instance);
    std::int64_t horizon = a.horizon;
    if (horizon <= 0) {
        double work = 0.0;
        for (const auto& t : enumerate_tasks(inst)) work += t.size;
        horizon = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(work / inst.machines().speed_at(1) - 1e-12)));
    }
    const auto lp = emit_lp(inst, horizon);
    for (const auto& w : lp.warnings) err << "warning: " << w << "\n";
    const std::string path = output_path(a.out, stem_of(a.instance) + ".lp");
    write_or_print(path, lp.text, out);
    if (path != "-")
        out << "wrote " << path << " (" << lp.num_variables << " variables, " << lp.num_constraints
            << " constraints, horizon " << horizon << ")\n";
    if (!a.solution.empty()) {
        const auto eval = evaluate_lp_solution(inst, horizon, parse_lp_solution(read_file(a.solution)));
        out << std::setprecision(12);
        out << "solution objective " << eval.objective << "\n";
        out << "solution feasible " << (eval.feasible ? "yes" : "no") << "\n";
        out << "lp lower bound " << eval.objective / 2.0 << "\n";
        return eval.feasible ? kExitOk : kExitInfeasible;
    }
    return kExitOk;
}

// --- gen -----------------------------------------------------------------------------------

struct GenArgs {
    std::string family;
    int K = 2;
    int jobs = 5;
    int max_tasks = 6;
    std::uint64_t seed = 0;
    std::string profile = "clustered";
    int count = 10;
    std::optional<double> gamma;
    std::string out = "-";
};

int cmd_gen(const GenArgs& a, std::ostream& out) {
    nlohmann::json doc;
    const double gamma = a.gamma.value_or(1.0);
    if (a.family == "lower-bound") {
        doc = instance_to_json(gen_lower_bound(a.K, gamma));
    } else if (a.family == "random") {
        doc = instance_to_json(gen_random_ica(a.K, a.jobs, a.max_tasks, a.seed, gamma));
    } else if (a.family == "speeds") {
        doc["speeds"] = gen_raw_speeds(a.profile, a.count, a.seed);
        doc["jobs"] = nlohmann::json::array({{{"weight", 1.0}, {"release", 0.0}, {"sizes", {1.0}}}});
        doc["speedup"] = gamma;
    } else {
        throw InvalidInput("unknown generator '" + a.family + "' (expected lower-bound, random or speeds)");
    }
    write_or_print(a.out, doc.dump(2) + "\n", out);
    return kExitOk;
}

// --- bench ---------------------------------------------------------------------------------

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (item.empty()) continue;
        const auto dash = item.find('-');
        try {
            if (dash != std::string::npos && dash > 0) {
                const auto lo = std::stoull(item.substr(0, dash));
                const auto hi = std::stoull(item.substr(dash + 1));
                if (hi < lo || hi - lo > 1'000'000) throw InvalidInput("bad seed range '" + item + "'");
                for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
            } else {
                seeds.push_back(std::stoull(item));
            }
        } catch (const std::logic_error&) {
            throw InvalidInput("bad seed '" + item + "'");
        }
    }
    return seeds;
}

struct BenchArgs {
    BenchOptions options;
    std::string seeds = "0";
    std::string out;
};

int cmd_bench(BenchArgs a, std::ostream& out) {
    a.options.seeds = parse_seeds(a.seeds);
    const auto rows = run_bench(a.options);
    const std::string path = output_path(a.out, "bench.csv");
    write_or_print(path, bench_csv(rows), out);
    if (path != "-") out << "wrote " << rows.size() << " rows to " << path << "\n";
    return kExitOk;
}

BenchRow bench_one(const BenchOptions& o, int K, std::uint64_t seed) {
    const Instance base = o.family == "lower-bound" ? gen_lower_bound(K) : gen_random_ica(K, o.jobs, o.max_tasks, seed);
    std::string cert = o.certificate;
    if (cert == "auto") cert = o.family == "lower-bound" ? "single" : "weaker";

    BenchRow row;
    row.K = K;
    row.seed = seed;
    row.n = base.num_tasks();
    row.gamma = o.gamma.value_or(1.0);
    const Instance inst = base.with_speedup(row.gamma);
    const Trace trace = simulate(inst);
    row.makespan = trace.makespan();
    row.objective = trace.objective(inst);
    if (cert != "none") {
        // The dual bound does not depend on the speed-up of the run it was fitted to, so the
        // certificate gets its own run at the speed-up its family asks for.
        const DualFamily family = parse_family(cert);
        const Instance fitted = base.with_speedup(std::max(row.gamma, required_gamma(family, K, row.n)));
        const Trace fitted_trace = fitted.speedup() == inst.speedup() ? trace : simulate(fitted);
        const auto c = build_duals(family, fitted_trace, fitted);
        if (c.feasible && c.dual_objective > 0.0) {
            row.dual_lb = c.dual_objective;
            row.lp_lb = c.dual_objective / 2.0;
            row.ratio = row.objective / *row.lp_lb;
        }
    }
    return row;
}

}  // namespace

double required_gamma(DualFamily family, int K, std::int64_t n) {
    switch (family) {
        case DualFamily::weaker:
            return std::ceil(2.0 * std::max(static_cast<double>(K), std::log2(static_cast<double>(std::max<std::int64_t>(n, 1)))));
        case DualFamily::single_job: return 2.0 * K;
        case DualFamily::general: return 1024.0 * K * log_k(K);
    }
    return 1.0;
}

std::vector<BenchRow> run_bench(const BenchOptions& o) {
    if (o.k_min < 1 || o.k_max < o.k_min) throw InvalidInput("bench needs 1 <= k-min <= k-max");
    if (o.family != "lower-bound" && o.family != "random")
        throw InvalidInput("bench family must be lower-bound or random");
    std::vector<std::pair<int, std::uint64_t>> work;
    for (int K = o.k_min; K <= o.k_max; ++K)
        for (auto s : o.seeds) work.push_back({K, s});
    std::sort(work.begin(), work.end());
    work.erase(std::unique(work.begin(), work.end()), work.end());

    std::vector<BenchRow> rows(work.size());
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t threads = o.threads > 0 ? static_cast<std::size_t>(o.threads) : hw;
    for (std::size_t begin = 0; begin < work.size(); begin += threads) {
        std::vector<std::future<BenchRow>> batch;
        const std::size_t end = std::min(work.size(), begin + threads);
        for (std::size_t i = begin; i < end; ++i)
            batch.push_back(std::async(std::launch::async, bench_one, std::cref(o), work[i].first, work[i].second));
        for (std::size_t i = begin; i < end; ++i) rows[i] = batch[i - begin].get();
    }
    return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
    std::ostringstream os;
    os << std::setprecision(12);
    os << kBenchHeader << "\n";
    auto opt = [&](const std::optional<double>& v) {
        if (v) os << *v;
    };
    for (const auto& r : rows) {
        os << r.K << "," << r.n << "," << r.seed << "," << r.gamma << "," << r.makespan << "," << r.objective << ",";
        opt(r.lp_lb);
        os << ",";
        opt(r.dual_lb);
        os << ",";
        opt(r.ratio);
        os << "\n";
    }
    return os.str();
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Water-filling scheduler for bags of tasks on related machines, with certificate checking"};
    app.name("bagsched");
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* s = app.add_subcommand("simulate", "run the scheduler on an instance and write its trace");
    s->add_option("instance", sim.instance, "instance JSON")->required();
    s->add_option("--gamma", sim.gamma, "override the instance speed-up");
    s->add_flag("--preprocess", sim.preprocess, "round speeds and select capacity classes first");
    s->add_flag("--realize", sim.realize, "turn every interval into a machine schedule and check it");
    s->add_option("-o,--out", sim.out, "trace path ('-' for stdout)");

    VerifyArgs ver;
    auto* v = app.add_subcommand("verify", "build a dual certificate for a trace and check it");
    v->add_option("trace", ver.trace, "trace JSON lines")->required();
    v->add_option("--family", ver.family, "weaker, single or general")->capture_default_str();
    v->add_option("--gamma", ver.gamma, "re-run the embedded instance at this speed-up first");
    v->add_option("--json", ver.json_out, "write the certificate summary as JSON ('-' for stdout)");
    v->add_flag("--values", ver.values, "include every dual value in the JSON");

    EmitArgs em;
    auto* e = app.add_subcommand("emit-lp", "write the completion-time relaxation of an instance");
    e->add_option("instance", em.instance, "instance JSON")->required();
    e->add_option("--horizon", em.horizon, "number of unit slots (default: total work over fastest speed)");
    e->add_option("-o,--out", em.out, "LP path ('-' for stdout)");
    e->add_option("--solution", em.solution, "evaluate a 'name value' solution file against the LP");

    GenArgs gen;
    auto* g = app.add_subcommand("gen", "generate an instance");
    g->add_option("family", gen.family, "lower-bound, random or speeds")->required();
    g->add_option("-K,--classes", gen.K, "number of speed classes")->capture_default_str();
    g->add_option("--jobs", gen.jobs, "jobs (random)")->capture_default_str();
    g->add_option("--max-tasks", gen.max_tasks, "largest task count per job (random)")->capture_default_str();
    g->add_option("--seed", gen.seed, "seed")->capture_default_str();
    g->add_option("--profile", gen.profile, "uniform, geometric or clustered (speeds)")->capture_default_str();
    g->add_option("--count", gen.count, "machines (speeds)")->capture_default_str();
    g->add_option("--gamma", gen.gamma, "speed-up stored in the instance");
    g->add_option("-o,--out", gen.out, "output path ('-' for stdout)")->capture_default_str();

    BenchArgs bench;
    auto* b = app.add_subcommand("bench", "sweep instance families and write a CSV");
    b->add_option("--k-min", bench.options.k_min)->capture_default_str();
    b->add_option("--k-max", bench.options.k_max)->capture_default_str();
    b->add_option("--seeds", bench.seeds, "comma separated seeds or ranges like 1-10 (may be empty)")->capture_default_str();
    b->add_option("--family", bench.options.family, "lower-bound or random")->capture_default_str();
    b->add_option("--jobs", bench.options.jobs)->capture_default_str();
    b->add_option("--max-tasks", bench.options.max_tasks)->capture_default_str();
    b->add_option("--certificate", bench.options.certificate, "weaker, single, general, none or auto")
        ->capture_default_str();
    b->add_option("--gamma", bench.options.gamma, "speed-up of the measured run (default 1)");
    b->add_option("--threads", bench.options.threads, "worker threads (0: all cores)")->capture_default_str();
    b->add_option("-o,--out", bench.out, "CSV path ('-' for stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& pe) {
        const int code = app.exit(pe, out, err);
        return code == 0 ? kExitOk : kExitIo;
    }

    try {
        if (*s) return cmd_simulate(sim, out, err);
        if (*v) return cmd_verify(ver, out, err);
        if (*e) return cmd_emit_lp(em, out, err);
        if (*g) return cmd_gen(gen, out);
        if (*b) return cmd_bench(bench, out);
    } catch (const PreconditionError& ex) {
        err << "precondition not met: " << ex.what() << "\n";
        return kExitPrecondition;
    } catch (const IoError& ex) {
        err << "error: " << ex.what() << "\n";
        return kExitIo;
    } catch (const InvalidInput& ex) {
        err << "invalid input: " << ex.what() << "\n";
        return kExitIo;
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << "\n";
        return kExitInfeasible;
    }
    return kExitIo;
}

}  // namespace bagsched
