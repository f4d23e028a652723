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

#include "bagsched/analysis_duals.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace bagsched {

std::string to_string(DualFamily f) {
    switch (f) {
        case DualFamily::weaker: return "weaker";
        case DualFamily::single_job: return "single";
        case DualFamily::general: return "general";
    }
    return "?";
}

DualFamily parse_family(const std::string& s) {
    if (s == "weaker") return DualFamily::weaker;
    if (s == "single" || s == "single_job" || s == "single-job") return DualFamily::single_job;
    if (s == "general") return DualFamily::general;
    throw InvalidInput("unknown dual family '" + s + "' (expected weaker, single or general)");
}

std::string to_string(BlockKind k) {
    switch (k) {
        case BlockKind::simple: return "simple";
        case BlockKind::long_block: return "long";
        case BlockKind::cheap: return "cheap";
        case BlockKind::short_block: return "short";
    }
    return "?";
}

double log_k(int K) { return std::max(std::log2(static_cast<double>(K)), 1.0); }

namespace {

ConstraintReport& report(std::vector<ConstraintReport>& reports, const std::string& name) {
    for (auto& r : reports)
        if (r.name == name) return r;
    reports.push_back({});
    reports.back().name = name;
    return reports.back();
}

constexpr std::size_t kMaxWitnesses = 50;

/// Per-interval lookups shared by all families.
struct TraceIndex {
    std::vector<std::vector<int>> cohort_id;  // [job][cohort] -> flat id
    std::vector<std::vector<char>> alive;     // [interval][flat cohort]
    std::vector<std::vector<double>> rate;    // [interval][job]
    std::vector<std::vector<std::int64_t>> n;  // [interval][job] alive tasks
    std::vector<double> alive_weight;

    TraceIndex(const Trace& trace, const Instance& instance) {
        int next = 0;
        for (const auto& job : instance.jobs()) {
            cohort_id.emplace_back();
            for (std::size_t c = 0; c < job.tasks.size(); ++c) cohort_id.back().push_back(next++);
        }
        const auto J = static_cast<std::size_t>(instance.num_jobs());
        for (const auto& iv : trace.intervals) {
            alive.emplace_back(static_cast<std::size_t>(next), 0);
            for (const auto& c : iv.alive_cohorts) alive.back()[static_cast<std::size_t>(cohort_id[c.job][c.cohort])] = 1;
            rate.emplace_back(J, 0.0);
            n.emplace_back(J, 0);
            for (const auto& jr : iv.profile.jobs) {
                rate.back()[static_cast<std::size_t>(jr.job)] = jr.rate;
                n.back()[static_cast<std::size_t>(jr.job)] = jr.alive;
            }
            alive_weight.push_back(iv.alive_weight());
        }
    }

    bool segment_alive(std::size_t t, const TaskSegment& s) const {
        return s.cohort >= 0 && alive[t][static_cast<std::size_t>(cohort_id[s.job][s.cohort])];
    }
};

struct DualSet {
    const std::vector<std::vector<double>>* alpha;
    const std::vector<double>* delta;
    const std::vector<std::vector<double>>* beta;
    double beta_factor;
    double bound;
    std::string suffix;
};

void push_violation(DualCertificate& out, const ConstraintReport& r, const Witness& w, double lhs, double rhs) {
    if (out.violations.size() >= kMaxWitnesses) return;
    Witness v = w;
    v.constraint = r.name;
    v.lhs = lhs;
    v.rhs = rhs;
    out.violations.push_back(v);
}

/// Scans every dual inequality of one (α, δ, β) assignment.
void check_dual_set(const Trace& trace, const Instance& instance, const TraceIndex& index,
                    const std::vector<TaskSegment>& segments, const DualSet& set, DualCertificate& out) {
    const auto& jobs = instance.jobs();
    const auto& classes = instance.classes();
    const int K = instance.num_classes();
    const auto& alpha = *set.alpha;
    const auto& delta = *set.delta;
    const auto& beta = *set.beta;

    std::vector<std::vector<std::size_t>> by_job(jobs.size());
    for (std::size_t s = 0; s < segments.size(); ++s) by_job[static_cast<std::size_t>(segments[s].job)].push_back(s);

    auto check = [&](ConstraintReport& r, double lhs, double rhs, const Witness& w) {
        const auto before = r.violated;
        r.record(lhs, rhs, w);
        if (r.violated != before) push_violation(out, r, w, lhs, rhs);
    };

    {
        auto& r = report(out.constraints, "nonneg" + set.suffix);
        for (std::size_t s = 0; s < segments.size(); ++s) {
            Witness w;
            w.job = segments[s].job;
            w.segment = static_cast<int>(s);
            check(r, -delta[s], 0.0, w);
            for (std::size_t t = 0; t < alpha.size(); ++t) {
                w.interval = static_cast<int>(t);
                check(r, -alpha[t][s], 0.0, w);
            }
        }
        for (std::size_t t = 0; t < beta.size(); ++t)
            for (int l = 0; l < K; ++l) {
                Witness w;
                w.interval = static_cast<int>(t);
                w.machine_class = l;
                check(r, -beta[t][static_cast<std::size_t>(l)], 0.0, w);
            }
    }
    {
        auto& r = report(out.constraints, "dualsum" + set.suffix);
        for (std::size_t t = 0; t < trace.intervals.size(); ++t)
            for (std::size_t j = 0; j < jobs.size(); ++j) {
                if (index.n[t][j] == 0) continue;
                double lhs = 0.0;
                for (std::size_t s : by_job[j]) lhs += static_cast<double>(segments[s].count) * alpha[t][s];
                Witness w;
                w.job = static_cast<int>(j);
                w.interval = static_cast<int>(t);
                check(r, lhs, set.bound * jobs[j].weight, w);
            }
    }
    {
        auto& r = report(out.constraints, "d2" + set.suffix);
        for (std::size_t j = 0; j < jobs.size(); ++j) {
            double lhs = 0.0;
            for (std::size_t s : by_job[j]) lhs += static_cast<double>(segments[s].count) * delta[s];
            Witness w;
            w.job = static_cast<int>(j);
            check(r, lhs, set.bound * jobs[j].weight, w);
        }
    }
    {
        // α_{j,v,t'} <= (β_{i,t} + δ_{j,v}) L_v^{t'} / s_i for every t <= t' (from the release on);
        // only the running minimum of β over t matters.
        auto& r = report(out.constraints, "dualnew" + set.suffix);
        for (std::size_t j = 0; j < jobs.size(); ++j) {
            std::vector<double> min_beta(static_cast<std::size_t>(K), std::numeric_limits<double>::infinity());
            std::vector<int> argmin(static_cast<std::size_t>(K), -1);
            for (std::size_t t = 0; t < trace.intervals.size(); ++t) {
                if (trace.intervals[t].end <= jobs[j].release) continue;
                for (int l = 0; l < K; ++l) {
                    const double b = beta[t][static_cast<std::size_t>(l)];
                    if (b < min_beta[static_cast<std::size_t>(l)]) {
                        min_beta[static_cast<std::size_t>(l)] = b;
                        argmin[static_cast<std::size_t>(l)] = static_cast<int>(t);
                    }
                }
                if (index.n[t][j] == 0) continue;
                const double L = index.rate[t][j];
                for (std::size_t s : by_job[j]) {
                    if (!index.segment_alive(t, segments[s])) continue;
                    for (int l = 0; l < K; ++l) {
                        const double rhs = (set.beta_factor * min_beta[static_cast<std::size_t>(l)] + delta[s]) * L /
                                           classes[static_cast<std::size_t>(l)].sigma;
                        Witness w;
                        w.job = static_cast<int>(j);
                        w.segment = static_cast<int>(s);
                        w.machine_class = l;
                        w.interval = static_cast<int>(t);
                        w.interval_beta = argmin[static_cast<std::size_t>(l)];
                        check(r, alpha[t][s], rhs, w);
                    }
                }
            }
        }
    }
}

void finish_objective(const Trace& trace, const Instance& instance, DualCertificate& out) {
    const auto& classes = instance.classes();
    out.alpha_total = 0.0;
    out.beta_total = 0.0;
    for (std::size_t t = 0; t < trace.intervals.size(); ++t) {
        const double len = trace.intervals[t].length();
        double a = 0.0;
        for (std::size_t s = 0; s < out.segments.size(); ++s)
            a += static_cast<double>(out.segments[s].count) * out.alpha[t][s];
        double b = 0.0;
        for (std::size_t l = 0; l < classes.size(); ++l) b += static_cast<double>(classes[l].count) * out.beta[t][l];
        out.alpha_total += len * a;
        out.beta_total += len * b;
    }
    out.dual_objective = out.alpha_total - out.beta_total;
    out.weighted_completion = trace.objective(instance);
    out.feasible = true;
    for (const auto& r : out.constraints)
        if (!r.ok()) out.feasible = false;
}

std::vector<TaskSegment> cohort_segments(const Instance& instance) {
    std::vector<TaskSegment> segs;
    for (std::size_t j = 0; j < instance.jobs().size(); ++j) {
        const auto& job = instance.jobs()[j];
        for (std::size_t c = 0; c < job.tasks.size(); ++c)
            segs.push_back({static_cast<int>(j), static_cast<int>(c), 0, job.tasks[c].count});
    }
    return segs;
}

void check_trace_matches(const Trace& trace, const Instance& instance) {
    if (trace.job_completion.size() != instance.jobs().size())
        throw InvalidInput("trace does not belong to this instance (job count differs)");
    if (std::abs(trace.gamma - instance.speedup()) > 1e-12 * std::max(1.0, instance.speedup()))
        throw InvalidInput("trace speed-up differs from the instance speed-up");
}

}  // namespace

const ConstraintReport* DualCertificate::claim(const std::string& name) const { return find_report(claims, name); }
const ConstraintReport* DualCertificate::constraint(const std::string& name) const {
    return find_report(constraints, name);
}
const ConstraintReport* BlockClassification::claim(const std::string& name) const {
    return find_report(claims, name);
}

// --- weaker family -------------------------------------------------------------------------

DualCertificate build_weaker_duals(const Trace& trace, const Instance& instance) {
    check_trace_matches(trace, instance);
    if (trace.has_release_dates || !instance.all_released_at_zero())
        throw PreconditionError("weaker certificate covers instances without release dates only");
    DualCertificate out;
    out.family = DualFamily::weaker;
    out.gamma = instance.speedup();
    const int K = instance.num_classes();
    const auto n_total = instance.num_tasks();
    out.gamma_required = 2.0 * std::max(static_cast<double>(K), std::log2(static_cast<double>(std::max<std::int64_t>(n_total, 1))));
    out.gamma_sufficient = out.gamma >= out.gamma_required;
    if (!out.gamma_sufficient) out.notes.push_back("speed-up below 2 max{K, log2 n}; feasibility is not guaranteed");

    // Tasks ranked by size, largest first; rank k (1-based) lies in group h = floor(log2 k) + 1 of
    // size 2^{h-1}. The task count is padded with zero-size tasks up to 2^H - 1.
    const double gamma = out.gamma;
    for (std::size_t j = 0; j < instance.jobs().size(); ++j) {
        const auto& job = instance.jobs()[j];
        std::vector<int> order(job.tasks.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return job.tasks[a].size > job.tasks[b].size; });
        std::int64_t rank = 1;
        auto group_of = [](std::int64_t k) {
            int h = 0;
            while ((std::int64_t{1} << (h + 1)) <= k) ++h;
            return h;  // 0-based group, holds ranks [2^h, 2^{h+1})
        };
        for (int c : order) {
            std::int64_t copy = 0;
            std::int64_t left = job.tasks[static_cast<std::size_t>(c)].count;
            while (left > 0) {
                const int h = group_of(rank);
                const std::int64_t group_end = std::int64_t{1} << (h + 1);
                const std::int64_t take = std::min(left, group_end - rank);
                out.segments.push_back({static_cast<int>(j), c, copy, take});
                out.delta.push_back(job.weight / (static_cast<double>(std::int64_t{1} << h) * gamma));
                copy += take;
                rank += take;
                left -= take;
            }
        }
        const int h = group_of(rank - 1);
        const std::int64_t padded = (std::int64_t{1} << (h + 1)) - 1;
        if (padded > rank - 1) {
            out.segments.push_back({static_cast<int>(j), -1, 0, padded - (rank - 1)});
            out.delta.push_back(job.weight / (static_cast<double>(std::int64_t{1} << h) * gamma));
        }
    }

    const TraceIndex index(trace, instance);
    const auto& classes = instance.classes();
    for (std::size_t t = 0; t < trace.intervals.size(); ++t) {
        std::vector<double> a(out.segments.size(), 0.0);
        for (std::size_t s = 0; s < out.segments.size(); ++s) {
            const auto& seg = out.segments[s];
            if (!index.segment_alive(t, seg)) continue;
            a[s] = instance.jobs()[static_cast<std::size_t>(seg.job)].weight /
                   static_cast<double>(index.n[t][static_cast<std::size_t>(seg.job)]);
        }
        out.alpha.push_back(std::move(a));
        std::vector<double> b;
        for (const auto& c : classes) b.push_back(index.alive_weight[t] / (static_cast<double>(c.count) * gamma));
        out.beta.push_back(std::move(b));
    }

    check_dual_set(trace, instance, index, out.segments, {&out.alpha, &out.delta, &out.beta, 1.0, 1.0, ""}, out);
    finish_objective(trace, instance, out);

    // Σα - Σβ = C (1 - K/γ) by construction.
    auto& r = report(out.claims, "objective_identity");
    const double C = trace.weighted_alive_integral();
    const double expect = C * (1.0 - static_cast<double>(K) / gamma);
    r.record(std::abs(out.dual_objective - expect), 1e-9 * std::max(1.0, std::abs(C)), {});
    return out;
}

// --- single-job family ---------------------------------------------------------------------

DualCertificate build_single_job_duals(const Trace& trace, const Instance& instance) {
    if (instance.num_jobs() != 1) throw PreconditionError("single-job certificate needs exactly one job");
    check_trace_matches(trace, instance);
    const Job& job = instance.jobs().front();
    if (job.release != 0.0) throw PreconditionError("single-job certificate needs the job released at time 0");
    if (!instance.ica_satisfied())
        throw PreconditionError("single-job certificate needs the Increasing Capacity Assumption: " +
                                instance.ica_report().describe());
    const auto th = thresholds(instance);

    DualCertificate out;
    out.family = DualFamily::single_job;
    out.gamma = instance.speedup();
    const int K = instance.num_classes();
    out.gamma_required = 2.0 * K;
    out.gamma_sufficient = out.gamma >= out.gamma_required;
    if (!out.gamma_sufficient) out.notes.push_back("speed-up below 2K; feasibility is not guaranteed");
    const double w = job.weight;
    const auto& classes = instance.classes();
    const auto& machines = instance.machines();

    // Rank 1 is the last task to finish. Simultaneous finishers: lower (cohort, copy) ranks first.
    std::vector<int> order(job.tasks.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return trace.cohort_completion[0][static_cast<std::size_t>(a)] >
               trace.cohort_completion[0][static_cast<std::size_t>(b)];
    });

    // Rank ranges (lo, hi] with their sizes f.
    struct RankSet {
        std::int64_t lo, hi;
        double f;
        int epoch;  // boundary index ℓ (1-based) for F_ℓ, -1 otherwise
    };
    std::vector<RankSet> sets;
    sets.push_back({0, machines.machines_through(0), static_cast<double>(classes[0].count), -1});
    for (int l = 0; l + 1 < K; ++l) {
        const std::int64_t M = th[static_cast<std::size_t>(l)].M;
        const auto f = static_cast<std::int64_t>(std::ceil(th[static_cast<std::size_t>(l)].m_tilde - 1e-9));
        const std::int64_t Mt = M + f;
        const std::int64_t Mnext = machines.machines_through(l + 1);
        sets.push_back({M, Mt, static_cast<double>(f), l + 1});
        sets.push_back({Mt, Mnext, static_cast<double>(Mnext - Mt), -1});
    }

    std::vector<int> set_of_segment;
    std::int64_t rank = 0;
    for (int c : order) {
        std::int64_t copy = 0;
        std::int64_t left = job.tasks[static_cast<std::size_t>(c)].count;
        while (left > 0) {
            int which = -1;
            std::int64_t take = left;
            for (std::size_t s = 0; s < sets.size(); ++s) {
                if (sets[s].hi <= sets[s].lo) continue;
                if (rank >= sets[s].lo && rank < sets[s].hi) {
                    which = static_cast<int>(s);
                    take = std::min(left, sets[s].hi - rank);
                    break;
                }
            }
            out.segments.push_back({0, c, copy, take});
            out.delta.push_back(which < 0 ? 0.0 : w / (2.0 * K * sets[static_cast<std::size_t>(which)].f));
            set_of_segment.push_back(which);
            copy += take;
            rank += take;
            left -= take;
        }
    }

    const TraceIndex index(trace, instance);
    std::int64_t unmatched = 0;
    for (std::size_t t = 0; t < trace.intervals.size(); ++t) {
        const std::int64_t n = index.n[t][0];
        std::vector<double> a(out.segments.size(), 0.0);
        int epoch = -1;
        for (int l = 0; l + 1 < K; ++l) {
            const auto& b = th[static_cast<std::size_t>(l)];
            const std::int64_t Mt = b.M + static_cast<std::int64_t>(std::ceil(b.m_tilde - 1e-9));
            if (n >= Mt && n < machines.machines_through(l + 1)) epoch = l + 1;
        }
        for (std::size_t s = 0; s < out.segments.size(); ++s) {
            if (!index.segment_alive(t, out.segments[s])) {
                if (epoch >= 0 && set_of_segment[s] >= 0 && sets[static_cast<std::size_t>(set_of_segment[s])].epoch == epoch)
                    ++unmatched;
                continue;
            }
            if (epoch < 0) {
                a[s] = w / static_cast<double>(n);
            } else if (set_of_segment[s] >= 0 && sets[static_cast<std::size_t>(set_of_segment[s])].epoch == epoch) {
                a[s] = w / sets[static_cast<std::size_t>(set_of_segment[s])].f;
            }
        }
        out.alpha.push_back(std::move(a));
        std::vector<double> b;
        for (const auto& c : classes) b.push_back(w / (2.0 * K * static_cast<double>(c.count)));
        out.beta.push_back(std::move(b));
    }
    if (unmatched > 0) out.notes.push_back("some epoch tasks were not alive when their epoch started");

    check_dual_set(trace, instance, index, out.segments, {&out.alpha, &out.delta, &out.beta, 1.0, 1.0, ""}, out);
    finish_objective(trace, instance, out);

    auto& r = report(out.claims, "dual_half_makespan");
    r.record(std::abs(out.dual_objective - 0.5 * w * trace.makespan()), 1e-9 * std::max(1.0, w * trace.makespan()), {});
    return out;
}

// --- block taxonomy ------------------------------------------------------------------------

BlockClassification classify_blocks(const Trace& trace, const Instance& instance, const GeneralConstants& k) {
    if (!instance.ica_satisfied())
        throw PreconditionError("block classification needs the Increasing Capacity Assumption: " +
                                instance.ica_report().describe());
    BlockClassification out;
    const int K = instance.num_classes();
    const auto& classes = instance.classes();
    const auto& machines = instance.machines();
    const double gamma = trace.gamma;
    std::vector<Threshold> th;
    if (instance.ica_satisfied() && K > 1) th = thresholds(instance);

    ConstraintReport r_long{"cl_long"}, r_cheap{"cl_cheap"}, r_short{"cl_short1"}, r_simpleb{"simpleb"},
        r_counting{"counting"}, r_final{"lemma_final"};

    for (std::size_t t = 0; t < trace.intervals.size(); ++t) {
        const auto& iv = trace.intervals[t];
        const double wA = iv.alive_weight();
        std::vector<BlockLabel> labels;
        for (const auto& b : iv.profile.blocks) {
            BlockLabel lab;
            lab.weight = b.weight;
            lab.average_speed = b.speed / static_cast<double>(b.num_tasks());
            for (int l = 0; l < K; ++l) {
                const std::int64_t lo = machines.first_machine_of(l);
                const std::int64_t hi = machines.machines_through(l);
                lab.class_machines.push_back(std::max<std::int64_t>(0, std::min(hi, b.machine_end) - std::max(lo, b.machine_begin)));
            }
            for (int l = 0; l < K && lab.cls < 0; ++l) {
                const double target = gamma * classes[static_cast<std::size_t>(l)].sigma;
                if (lab.average_speed >= target / k.simple_block_window && lab.average_speed <= target * k.simple_block_window) {
                    lab.kind = BlockKind::simple;
                    lab.cls = l;
                }
            }
            if (lab.cls < 0) {
                if (b.weight < wA / (k.cheap_den * K)) {
                    lab.kind = BlockKind::cheap;
                } else {
                    for (int l = K - 1; l >= 0 && lab.cls < 0; --l) {
                        const auto ml = static_cast<double>(classes[static_cast<std::size_t>(l)].count);
                        const bool half = static_cast<double>(lab.class_machines[static_cast<std::size_t>(l)]) >= ml / 2.0;
                        const bool not_all_next =
                            l == K - 1 || lab.class_machines[static_cast<std::size_t>(l + 1)] < classes[static_cast<std::size_t>(l + 1)].count;
                        if (half && not_all_next) {
                            lab.kind = BlockKind::long_block;
                            lab.cls = l;
                        }
                    }
                    if (lab.cls < 0) lab.kind = BlockKind::short_block;
                }
            }
            labels.push_back(std::move(lab));
        }

        double w_simple = 0.0, w_long = 0.0, w_cheap = 0.0;
        int n_cheap = 0;
        for (std::size_t bi = 0; bi < labels.size(); ++bi) {
            const auto& lab = labels[bi];
            const auto& b = iv.profile.blocks[bi];
            Witness wit;
            wit.interval = static_cast<int>(t);
            wit.machine_class = lab.cls;
            wit.segment = static_cast<int>(bi);
            switch (lab.kind) {
                case BlockKind::simple: {
                    w_simple += lab.weight;
                    const double target = gamma * classes[static_cast<std::size_t>(lab.cls)].sigma;
                    double w_prime = 0.0;
                    for (int j : b.jobs) {
                        const double L = iv.profile.find(j)->rate;
                        if (L >= target / k.simple_job_window && L <= target * k.simple_job_window)
                            w_prime += iv.profile.find(j)->weight;
                    }
                    r_simpleb.record(lab.weight, k.simpleb_factor * w_prime, wit);
                    break;
                }
                case BlockKind::long_block: {
                    w_long += lab.weight;
                    const auto& c = classes[static_cast<std::size_t>(lab.cls)];
                    const double cap = gamma * c.sigma * static_cast<double>(c.count);
                    r_long.record(cap / 2.0, b.speed, wit);
                    r_long.record(b.speed, 4.0 * cap, wit);
                    if (lab.cls + 1 < K && !th.empty())
                        r_long.record(static_cast<double>(b.num_tasks()), th[static_cast<std::size_t>(lab.cls)].m_tilde, wit);
                    break;
                }
                case BlockKind::cheap:
                    w_cheap += lab.weight;
                    ++n_cheap;
                    break;
                case BlockKind::short_block: {
                    int touched = 0;
                    for (auto m : lab.class_machines)
                        if (m > 0) ++touched;
                    r_short.record(static_cast<double>(touched), 2.0, wit);
                    r_short.record(2.0, static_cast<double>(touched), wit);
                    break;
                }
            }
        }
        Witness wit;
        wit.interval = static_cast<int>(t);
        r_cheap.record(static_cast<double>(n_cheap), static_cast<double>(K), wit);
        r_cheap.record(w_cheap, wA / k.cheap_den, wit);
        r_final.record(wA, k.final_factor * (w_simple + w_long), wit);

        double running = 0.0;  // weight of the blocks since the previous short block
        for (std::size_t bi = 0; bi < labels.size(); ++bi) {
            if (labels[bi].kind == BlockKind::short_block) {
                Witness ws = wit;
                ws.segment = static_cast<int>(bi);
                r_counting.record(labels[bi].weight, k.counting_factor * running, ws);
                running = 0.0;
            } else {
                running += labels[bi].weight;
            }
        }
        out.intervals.push_back(std::move(labels));
    }
    out.claims = {r_long, r_cheap, r_short, r_simpleb, r_counting, r_final};
    return out;
}

// --- general family ------------------------------------------------------------------------

DualCertificate build_general_duals(const Trace& trace, const Instance& instance, const GeneralConstants& k) {
    check_trace_matches(trace, instance);
    if (trace.has_release_dates || !instance.all_released_at_zero())
        throw PreconditionError("general certificate covers instances without release dates only");
    if (!instance.ica_satisfied())
        throw PreconditionError("general certificate needs the Increasing Capacity Assumption: " +
                                instance.ica_report().describe());
    const int K = instance.num_classes();
    std::vector<Threshold> th;
    if (K > 1) th = thresholds(instance);

    DualCertificate out;
    out.family = DualFamily::general;
    out.gamma = instance.speedup();
    const double gamma = out.gamma;
    const double lk = log_k(K);
    out.gamma_required = k.gamma_factor * K * lk;
    out.gamma_sufficient = gamma >= out.gamma_required;
    if (!out.gamma_sufficient) out.notes.push_back("speed-up below 1024 K log K; feasibility is not guaranteed");

    const auto& jobs = instance.jobs();
    const auto& classes = instance.classes();
    const std::size_t J = jobs.size();
    const std::size_t T = trace.intervals.size();
    out.segments = cohort_segments(instance);
    const std::size_t S = out.segments.size();
    const TraceIndex index(trace, instance);
    const BlockClassification cls = classify_blocks(trace, instance, k);
    for (const auto& c : cls.claims) out.claims.push_back(c);

    // Simple class of each alive job at each interval (closest in log scale, faster on ties).
    std::vector<std::vector<int>> simple_class(T, std::vector<int>(J, -1));
    std::vector<std::vector<int>> tau(J, std::vector<int>(static_cast<std::size_t>(K), -1));
    for (std::size_t t = 0; t < T; ++t)
        for (std::size_t j = 0; j < J; ++j) {
            if (index.n[t][j] == 0) continue;
            const double L = index.rate[t][j];
            if (L <= 0.0) continue;
            double best = std::numeric_limits<double>::infinity();
            for (int l = 0; l < K; ++l) {
                const double target = gamma * classes[static_cast<std::size_t>(l)].sigma;
                if (L < target / k.simple_job_window || L > target * k.simple_job_window) continue;
                const double dist = std::abs(std::log(L / target));
                if (dist < best) {
                    best = dist;
                    simple_class[t][j] = l;
                }
            }
            if (simple_class[t][j] >= 0) tau[j][static_cast<std::size_t>(simple_class[t][j])] = static_cast<int>(t);
        }

    out.delta_simple.assign(S, 0.0);
    for (std::size_t s = 0; s < S; ++s) {
        const auto j = static_cast<std::size_t>(out.segments[s].job);
        for (int l = 0; l < K; ++l) {
            const int tt = tau[j][static_cast<std::size_t>(l)];
            if (tt < 0 || !index.segment_alive(static_cast<std::size_t>(tt), out.segments[s])) continue;
            out.delta_simple[s] +=
                jobs[j].weight / (k.delta_simple_den * K * static_cast<double>(index.n[static_cast<std::size_t>(tt)][j]));
        }
    }

    out.alpha_simple.assign(T, std::vector<double>(S, 0.0));
    out.alpha_long.assign(T, std::vector<double>(S, 0.0));
    std::vector<std::vector<double>> max_long_weight(S, std::vector<double>(static_cast<std::size_t>(K), 0.0));
    // greedy doubling chains of long-block weights, per (job, class)
    std::vector<std::vector<double>> chain_last(J, std::vector<double>(static_cast<std::size_t>(K), 0.0));
    std::vector<std::vector<int>> chain_len(J, std::vector<int>(static_cast<std::size_t>(K), 0));
    ConstraintReport r_rootd{"cl_rootd"};

    for (std::size_t t = 0; t < T; ++t) {
        const auto& iv = trace.intervals[t];
        for (std::size_t s = 0; s < S; ++s) {
            const auto& seg = out.segments[s];
            if (!index.segment_alive(t, seg)) continue;
            const auto j = static_cast<std::size_t>(seg.job);
            const int l = simple_class[t][j];
            if (l < 0) continue;
            const int tt = tau[j][static_cast<std::size_t>(l)];
            if (!index.segment_alive(static_cast<std::size_t>(tt), seg)) continue;
            out.alpha_simple[t][s] =
                jobs[j].weight / (k.alpha_simple_den * K * static_cast<double>(index.n[static_cast<std::size_t>(tt)][j]));
        }
        for (std::size_t bi = 0; bi < iv.profile.blocks.size(); ++bi) {
            const auto& lab = cls.intervals[t][bi];
            if (lab.kind != BlockKind::long_block) continue;
            const auto& b = iv.profile.blocks[bi];
            const auto l = static_cast<std::size_t>(lab.cls);
            for (int jj : b.jobs) {
                const auto j = static_cast<std::size_t>(jj);
                const double L = index.rate[t][j];
                for (std::size_t s = 0; s < S; ++s) {
                    if (out.segments[s].job != jj || !index.segment_alive(t, out.segments[s])) continue;
                    out.alpha_long[t][s] = L * b.weight / (k.alpha_long_den * K * lk * b.speed);
                    max_long_weight[s][l] = std::max(max_long_weight[s][l], b.weight);
                }
                if (chain_len[j][l] == 0 || b.weight > 2.0 * chain_last[j][l]) {
                    ++chain_len[j][l];
                    chain_last[j][l] = b.weight;
                }
                if (lab.cls + 1 < K) {
                    Witness w;
                    w.job = jj;
                    w.interval = static_cast<int>(t);
                    w.machine_class = lab.cls;
                    r_rootd.record(b.weight / th[l].m_tilde, k.rootd_factor * jobs[j].weight / static_cast<double>(index.n[t][j]), w);
                }
            }
        }
    }

    out.delta_long.assign(S, 0.0);
    for (std::size_t s = 0; s < S; ++s)
        for (int l = 0; l + 1 < K; ++l)
            out.delta_long[s] += max_long_weight[s][static_cast<std::size_t>(l)] /
                                 (k.delta_long_den * K * lk * th[static_cast<std::size_t>(l)].m_tilde);

    out.beta.assign(T, std::vector<double>(static_cast<std::size_t>(K), 0.0));
    for (std::size_t t = 0; t < T; ++t)
        for (int l = 0; l < K; ++l)
            out.beta[t][static_cast<std::size_t>(l)] =
                index.alive_weight[t] / (k.beta_c * K * K * lk * static_cast<double>(classes[static_cast<std::size_t>(l)].count));

    out.alpha.assign(T, std::vector<double>(S, 0.0));
    for (std::size_t t = 0; t < T; ++t)
        for (std::size_t s = 0; s < S; ++s) out.alpha[t][s] = out.alpha_simple[t][s] + out.alpha_long[t][s];
    out.delta.resize(S);
    for (std::size_t s = 0; s < S; ++s) out.delta[s] = out.delta_simple[s] + out.delta_long[s];

    check_dual_set(trace, instance, index, out.segments,
                   {&out.alpha_simple, &out.delta_simple, &out.beta, 0.5, 0.5, "_simple"}, out);
    check_dual_set(trace, instance, index, out.segments,
                   {&out.alpha_long, &out.delta_long, &out.beta, 0.5, 0.5, "_long"}, out);
    check_dual_set(trace, instance, index, out.segments, {&out.alpha, &out.delta, &out.beta, 1.0, 1.0, ""}, out);
    finish_objective(trace, instance, out);

    // side claims of the analysis
    ConstraintReport r_simple{"lemma_simple"}, r_dang{"lemma_dang"};
    for (std::size_t t = 0; t < T; ++t)
        for (std::size_t s = 0; s < S; ++s) {
            const auto& seg = out.segments[s];
            if (!index.segment_alive(t, seg)) continue;
            const auto j = static_cast<std::size_t>(seg.job);
            const double L = index.rate[t][j];
            for (int l = 0; l < K; ++l) {
                const auto& c = classes[static_cast<std::size_t>(l)];
                Witness w;
                w.job = seg.job;
                w.segment = static_cast<int>(s);
                w.interval = static_cast<int>(t);
                w.machine_class = l;
                if (simple_class[t][j] >= 0)
                    r_simple.record(out.alpha_simple[t][s],
                                    k.simple_lemma_factor * index.alive_weight[t] * L /
                                            (K * gamma * static_cast<double>(c.count) * c.sigma) +
                                        out.delta_simple[s] * L / (gamma * c.sigma),
                                    w);
                if (out.alpha_long[t][s] > 0.0)
                    r_dang.record(out.alpha_long[t][s],
                                  K * out.beta[t][static_cast<std::size_t>(l)] * L / (6.0 * gamma * c.sigma) +
                                      k.dang_factor * out.delta_long[s] * L / (gamma * c.sigma),
                                  w);
            }
        }
    ConstraintReport r_doubling{"rootd_doubling"};
    for (std::size_t j = 0; j < J; ++j)
        for (int l = 0; l < K; ++l) {
            Witness w;
            w.job = static_cast<int>(j);
            w.machine_class = l;
            r_doubling.record(chain_len[j][static_cast<std::size_t>(l)], std::log2(10.0 * K) + 1.0, w);
        }
    const double C = trace.weighted_alive_integral();
    ConstraintReport r_beta{"claim_beta"}, r_alpha{"claim_alpha"};
    r_beta.record(std::abs(out.beta_total - C / (k.beta_c * K * lk)), 1e-9 * std::max(1.0, C), {});
    r_alpha.record(C / (k.alpha_claim_den * K * lk), out.alpha_total, {});
    for (auto* r : {&r_rootd, &r_simple, &r_dang, &r_doubling, &r_beta, &r_alpha}) out.claims.push_back(*r);
    return out;
}

DualCertificate build_duals(DualFamily family, const Trace& trace, const Instance& instance) {
    switch (family) {
        case DualFamily::weaker: return build_weaker_duals(trace, instance);
        case DualFamily::single_job: return build_single_job_duals(trace, instance);
        case DualFamily::general: return build_general_duals(trace, instance);
    }
    throw InvalidInput("unknown dual family");
}

double certified_ratio(const DualCertificate& certificate, const Trace& trace, const Instance& instance) {
    if (!certificate.feasible) throw PreconditionError("certificate is infeasible; no ratio can be certified");
    if (!(certificate.dual_objective > 0.0))
        throw PreconditionError("certificate has a non-positive dual objective; no ratio can be certified");
    return trace.objective(instance) * certificate.gamma * instance.preprocessing_loss() / certificate.dual_objective;
}

}  // namespace bagsched
