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

#include "bagsched/lp_bridge.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <tuple>

namespace bagsched {

std::vector<TaskInfo> enumerate_tasks(const Instance& instance) {
    std::vector<TaskInfo> tasks;
    for (std::size_t j = 0; j < instance.jobs().size(); ++j) {
        const auto& job = instance.jobs()[j];
        for (std::size_t c = 0; c < job.tasks.size(); ++c)
            for (std::int64_t k = 0; k < job.tasks[c].count; ++k)
                tasks.push_back({static_cast<int>(j), static_cast<int>(c), k, job.tasks[c].size});
    }
    return tasks;
}

namespace {

std::string x_name(std::int64_t i, std::int64_t v, std::int64_t t) {
    return "x_" + std::to_string(i) + "_" + std::to_string(v) + "_" + std::to_string(t);
}
std::string u_name(int j, std::int64_t t) { return "U_" + std::to_string(j) + "_" + std::to_string(t); }
std::string c_name(int j) { return "C_" + std::to_string(j); }

/// Accumulates "coef name" terms and wraps long rows.
class RowWriter {
  public:
    explicit RowWriter(std::ostringstream& os) : os_(os) {}

    void term(double coef, const std::string& name) {
        if (count_ > 0 && count_ % 6 == 0) os_ << "\n   ";
        os_ << (coef < 0 ? " - " : (count_ == 0 ? " " : " + ")) << std::abs(coef) << " " << name;
        ++count_;
    }
    void finish(const std::string& sense, double rhs) {
        if (count_ == 0) os_ << " 0 " << "C_0";
        os_ << " " << sense << " " << rhs << "\n";
        count_ = 0;
    }
    void end_objective() { count_ = 0; }

  private:
    std::ostringstream& os_;
    int count_ = 0;
};

}  // namespace

EmittedLp emit_lp(const Instance& instance, std::int64_t horizon) {
    if (horizon < 1) throw InvalidInput("LP horizon must be at least 1");
    const auto tasks = enumerate_tasks(instance);
    const auto& machines = instance.machines();
    const std::int64_t m = machines.num_machines();
    const auto n = static_cast<std::int64_t>(tasks.size());
    if (instance.num_jobs() == 0) throw InvalidInput("LP needs at least one job");
    if (m * n > kMaxLpVariables / horizon)
        throw InvalidInput("LP would have more than " + std::to_string(kMaxLpVariables) + " x-variables");

    EmittedLp out;
    double work = 0.0;
    for (const auto& t : tasks) work += t.size;
    const double total_speed = machines.prefix_speed(m);
    const double fastest = machines.speed_at(1);
    if (static_cast<double>(horizon) * total_speed < work * (1.0 - 1e-12))
        out.warnings.push_back("horizon is shorter than total work over total speed; the LP is infeasible");
    else if (static_cast<double>(horizon) < std::ceil(work / fastest - 1e-12))
        out.warnings.push_back("horizon is below total work over the fastest speed; optimal solutions may be cut off");

    std::ostringstream os;
    os << std::setprecision(17);
    os << "\\ completion-time relaxation: " << instance.num_jobs() << " jobs, " << n << " tasks, " << m
       << " machines, " << horizon << " unit slots\n";
    os << "Minimize\n obj:";
    RowWriter row(os);
    for (int j = 0; j < instance.num_jobs(); ++j) {
        const double w = instance.jobs()[static_cast<std::size_t>(j)].weight;
        row.term(w, c_name(j));
        for (std::int64_t t = 0; t < horizon; ++t) row.term(w, u_name(j, t));
    }
    row.end_objective();
    os << "\nSubject To\n";
    for (std::int64_t v = 0; v < n; ++v) {
        const auto& task = tasks[static_cast<std::size_t>(v)];
        if (task.size <= 0.0) continue;
        for (std::int64_t t = 0; t < horizon; ++t) {
            os << " deltat_" << task.job << "_" << v << "_" << t << ":";
            row.term(1.0, u_name(task.job, t));
            for (std::int64_t tp = t; tp < horizon; ++tp)
                for (std::int64_t i = 0; i < m; ++i) row.term(-1.0 / task.size, x_name(i, v, tp));
            row.finish(">=", 0.0);
            ++out.num_constraints;
        }
    }
    for (std::int64_t v = 0; v < n; ++v) {
        const auto& task = tasks[static_cast<std::size_t>(v)];
        os << " delta_" << task.job << "_" << v << ":";
        row.term(1.0, c_name(task.job));
        for (std::int64_t t = 0; t < horizon; ++t)
            for (std::int64_t i = 0; i < m; ++i) row.term(-1.0 / machines.machine(i).speed, x_name(i, v, t));
        row.finish(">=", 0.0);
        ++out.num_constraints;
    }
    for (std::int64_t v = 0; v < n; ++v) {
        const auto& task = tasks[static_cast<std::size_t>(v)];
        if (task.size <= 0.0) continue;
        os << " alpha_" << task.job << "_" << v << ":";
        for (std::int64_t t = 0; t < horizon; ++t)
            for (std::int64_t i = 0; i < m; ++i) row.term(1.0 / task.size, x_name(i, v, t));
        row.finish(">=", 1.0);
        ++out.num_constraints;
    }
    for (std::int64_t i = 0; i < m; ++i)
        for (std::int64_t t = 0; t < horizon; ++t) {
            os << " beta_" << i << "_" << t << ":";
            for (std::int64_t v = 0; v < n; ++v) row.term(1.0 / machines.machine(i).speed, x_name(i, v, t));
            row.finish("<=", 1.0);
            ++out.num_constraints;
        }
    os << "Bounds\n";
    for (int j = 0; j < instance.num_jobs(); ++j)
        for (std::int64_t t = 0; t < horizon; ++t) os << " 0 <= " << u_name(j, t) << " <= 1\n";
    os << "End\n";
    out.text = os.str();
    out.num_variables = m * n * horizon + static_cast<std::int64_t>(instance.num_jobs()) * (horizon + 1);
    return out;
}

std::map<std::string, double> parse_lp_solution(const std::string& text) {
    std::map<std::string, double> values;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        std::string name;
        while (ls >> name) {
            double value = 0.0;
            if (!(ls >> value))
                throw InvalidInput("solution line " + std::to_string(line_no) + ": '" + name + "' has no numeric value");
            values[name] = value;
        }
    }
    return values;
}

LpEvaluation evaluate_lp_solution(const Instance& instance, std::int64_t horizon,
                                  const std::map<std::string, double>& values, double rel_tol) {
    const auto tasks = enumerate_tasks(instance);
    const auto& machines = instance.machines();
    const std::int64_t m = machines.num_machines();
    const auto n = static_cast<std::int64_t>(tasks.size());
    auto get = [&](const std::string& name) {
        auto it = values.find(name);
        return it == values.end() ? 0.0 : it->second;
    };

    LpEvaluation out;
    ConstraintReport bounds("bounds"), deltat("deltat"), delta("delta"), alpha("alpha"), beta("beta");
    for (const auto& [name, v] : values) {
        if (name.rfind("x_", 0) == 0 || name.rfind("C_", 0) == 0 || name.rfind("U_", 0) == 0) {
            bounds.record(-v, 0.0, {}, rel_tol, rel_tol);
            if (name.rfind("U_", 0) == 0) bounds.record(v, 1.0, {}, rel_tol, rel_tol);
        }
    }
    for (int j = 0; j < instance.num_jobs(); ++j) {
        const double w = instance.jobs()[static_cast<std::size_t>(j)].weight;
        out.objective += w * get(c_name(j));
        for (std::int64_t t = 0; t < horizon; ++t) out.objective += w * get(u_name(j, t));
    }
    std::vector<std::vector<double>> per_slot(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(horizon), 0.0));
    std::vector<std::vector<double>> machine_load(static_cast<std::size_t>(m), std::vector<double>(static_cast<std::size_t>(horizon), 0.0));
    std::vector<double> busy_time(static_cast<std::size_t>(n), 0.0);
    for (std::int64_t v = 0; v < n; ++v)
        for (std::int64_t t = 0; t < horizon; ++t)
            for (std::int64_t i = 0; i < m; ++i) {
                const double x = get(x_name(i, v, t));
                if (x == 0.0) continue;
                const double s = machines.machine(i).speed;
                per_slot[static_cast<std::size_t>(v)][static_cast<std::size_t>(t)] += x;
                machine_load[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)] += x / s;
                busy_time[static_cast<std::size_t>(v)] += x / s;
            }
    for (std::int64_t v = 0; v < n; ++v) {
        const auto& task = tasks[static_cast<std::size_t>(v)];
        Witness w;
        w.job = task.job;
        w.segment = static_cast<int>(v);
        delta.record(busy_time[static_cast<std::size_t>(v)], get(c_name(task.job)), w, rel_tol, rel_tol);
        if (task.size <= 0.0) continue;
        double suffix = 0.0;
        for (std::int64_t t = horizon - 1; t >= 0; --t) {
            suffix += per_slot[static_cast<std::size_t>(v)][static_cast<std::size_t>(t)] / task.size;
            w.interval = static_cast<int>(t);
            deltat.record(suffix, get(u_name(task.job, t)), w, rel_tol, rel_tol);
        }
        w.interval = -1;
        alpha.record(1.0, suffix, w, rel_tol, rel_tol);
    }
    for (std::int64_t i = 0; i < m; ++i)
        for (std::int64_t t = 0; t < horizon; ++t) {
            Witness w;
            w.segment = static_cast<int>(i);
            w.interval = static_cast<int>(t);
            beta.record(machine_load[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)], 1.0, w, rel_tol, rel_tol);
        }
    out.constraints = {bounds, deltat, delta, alpha, beta};
    out.feasible = all_ok(out.constraints);
    return out;
}

// --- primal from a schedule ----------------------------------------------------------------

PrimalSolution primal_from_pieces(const Instance& instance, const std::vector<WorkPiece>& pieces,
                                  const std::vector<double>& completion, double speed_scale, int slots_per_unit) {
    if (slots_per_unit < 1) throw InvalidInput("slots per unit time must be at least 1");
    if (completion.size() != instance.jobs().size()) throw InvalidInput("one completion time per job is required");
    const auto tasks = enumerate_tasks(instance);
    const auto& machines = instance.machines();
    const auto n = static_cast<std::int64_t>(tasks.size());
    const double q = slots_per_unit;
    const double h = 1.0 / q;

    PrimalSolution out;
    out.slot_length = h;
    out.speed_scale = speed_scale;
    double horizon = 0.0;
    for (double c : completion) horizon = std::max(horizon, c);
    for (const auto& p : pieces) horizon = std::max(horizon, p.end);
    out.num_slots = static_cast<std::int64_t>(std::ceil(horizon * q - 1e-9));
    const auto T = static_cast<std::size_t>(std::max<std::int64_t>(out.num_slots, 0));

    std::map<std::tuple<std::int64_t, std::int64_t, std::int64_t>, double> x;
    for (const auto& p : pieces) {
        if (p.task < 0 || p.task >= n) throw InvalidInput("work piece names an unknown task");
        if (p.machine < 0 || p.machine >= machines.num_machines()) throw InvalidInput("work piece names an unknown machine");
        if (p.end <= p.start) continue;
        const double rate = speed_scale * machines.machine(p.machine).speed * p.share;
        const auto first = static_cast<std::int64_t>(std::floor(p.start * q));
        const auto last = std::min<std::int64_t>(static_cast<std::int64_t>(std::ceil(p.end * q)) - 1, out.num_slots - 1);
        for (std::int64_t t = first; t <= last; ++t) {
            const double lo = std::max(p.start, static_cast<double>(t) * h);
            const double hi = std::min(p.end, static_cast<double>(t + 1) * h);
            if (hi > lo) x[{p.machine, p.task, t}] += rate * (hi - lo);
        }
    }

    std::vector<std::vector<double>> per_slot(static_cast<std::size_t>(n), std::vector<double>(T, 0.0));
    std::vector<double> busy(static_cast<std::size_t>(n), 0.0);
    std::map<std::pair<std::int64_t, std::int64_t>, double> load;
    for (const auto& [key, value] : x) {
        const auto [i, v, t] = key;
        const double s = speed_scale * machines.machine(i).speed;
        out.x.push_back({i, v, t, value});
        per_slot[static_cast<std::size_t>(v)][static_cast<std::size_t>(t)] += value;
        busy[static_cast<std::size_t>(v)] += value / s;
        load[{i, t}] += value / s;
    }

    std::vector<std::vector<double>> remaining(static_cast<std::size_t>(n), std::vector<double>(T, 0.0));
    for (std::int64_t v = 0; v < n; ++v) {
        const double p = tasks[static_cast<std::size_t>(v)].size;
        if (p <= 0.0) continue;
        double suffix = 0.0;
        for (std::size_t t = T; t-- > 0;) {
            suffix += per_slot[static_cast<std::size_t>(v)][t] / p;
            remaining[static_cast<std::size_t>(v)][t] = suffix;
        }
    }
    out.U.assign(instance.jobs().size(), std::vector<double>(T, 0.0));
    for (std::int64_t v = 0; v < n; ++v) {
        const int j = tasks[static_cast<std::size_t>(v)].job;
        for (std::size_t t = 0; t < T; ++t)
            out.U[static_cast<std::size_t>(j)][t] = std::max(out.U[static_cast<std::size_t>(j)][t], remaining[static_cast<std::size_t>(v)][t]);
    }
    out.C = completion;

    ConstraintReport bounds("bounds"), deltat("deltat"), delta("delta"), alpha("alpha"), beta("beta");
    for (std::int64_t v = 0; v < n; ++v) {
        const auto& task = tasks[static_cast<std::size_t>(v)];
        Witness w;
        w.job = task.job;
        w.segment = static_cast<int>(v);
        delta.record(busy[static_cast<std::size_t>(v)], out.C[static_cast<std::size_t>(task.job)], w);
        if (task.size <= 0.0) continue;
        for (std::size_t t = 0; t < T; ++t) {
            w.interval = static_cast<int>(t);
            deltat.record(remaining[static_cast<std::size_t>(v)][t], out.U[static_cast<std::size_t>(task.job)][t], w);
        }
        w.interval = -1;
        alpha.record(1.0, T > 0 ? remaining[static_cast<std::size_t>(v)][0] : 0.0, w);
    }
    for (const auto& [key, l] : load) {
        Witness w;
        w.segment = static_cast<int>(key.first);
        w.interval = static_cast<int>(key.second);
        beta.record(l, h, w);
    }
    for (const auto& row : out.U)
        for (double u : row) bounds.record(u, 1.0, {});

    out.schedule_cost = 0.0;
    out.objective = 0.0;
    for (std::size_t j = 0; j < instance.jobs().size(); ++j) {
        const double w = instance.jobs()[j].weight;
        out.schedule_cost += w * out.C[j];
        out.objective += w * out.C[j];
        for (double u : out.U[j]) out.objective += h * w * u;
    }
    out.constraints = {bounds, deltat, delta, alpha, beta};
    out.feasible = all_ok(out.constraints);
    return out;
}

PrimalSolution schedule_to_primal(const Trace& trace, const Instance& instance, int slots_per_unit) {
    const auto& machines = instance.machines();
    if (instance.num_tasks() > kMaxPrimalTasks) throw InvalidInput("too many tasks for an explicit primal");
    if (machines.num_machines() > kMaxPrimalMachines) throw InvalidInput("too many machines for an explicit primal");
    if (trace.job_completion.size() != instance.jobs().size()) throw InvalidInput("trace does not belong to this instance");

    std::vector<std::vector<std::int64_t>> first_task(instance.jobs().size());
    std::int64_t next = 0;
    for (std::size_t j = 0; j < instance.jobs().size(); ++j)
        for (const auto& c : instance.jobs()[j].tasks) {
            first_task[j].push_back(next);
            next += c.count;
        }

    std::vector<WorkPiece> pieces;
    for (const auto& iv : trace.intervals) {
        std::map<int, std::vector<std::int64_t>> alive_tasks;
        for (const auto& c : iv.alive_cohorts) {
            const auto& cohort = instance.jobs()[static_cast<std::size_t>(c.job)].tasks[static_cast<std::size_t>(c.cohort)];
            for (std::int64_t k = 0; k < cohort.count; ++k)
                alive_tasks[c.job].push_back(first_task[static_cast<std::size_t>(c.job)][static_cast<std::size_t>(c.cohort)] + k);
        }
        const auto slice = realize_slice(iv.profile, machines, iv.start, iv.end);
        for (const auto& piece : slice.pieces)
            for (const auto& a : piece.assignments) {
                const double share = 1.0 / static_cast<double>(a.num_tasks);
                for (const auto& member : a.members)
                    for (std::int64_t v : alive_tasks[member.job])
                        for (std::int64_t i = a.machine_begin; i < a.machine_end; ++i)
                            pieces.push_back({i, v, piece.start, piece.end, share});
            }
    }
    return primal_from_pieces(instance, pieces, trace.job_completion, trace.gamma, slots_per_unit);
}

std::vector<WorkPiece> lower_bound_offline_pieces(const Instance& instance) {
    const auto tasks = enumerate_tasks(instance);
    const auto& machines = instance.machines();
    if (static_cast<std::int64_t>(tasks.size()) != machines.num_machines())
        throw InvalidInput("offline pairing needs one task per machine");
    std::vector<WorkPiece> pieces;
    for (std::size_t k = 0; k < tasks.size(); ++k) {
        const double s = machines.machine(static_cast<std::int64_t>(k)).speed;
        if (std::abs(tasks[k].size - s) > 1e-12 * s)
            throw InvalidInput("offline pairing needs task k to have the size of machine k's speed");
        pieces.push_back({static_cast<std::int64_t>(k), static_cast<std::int64_t>(k), 0.0, 1.0, 1.0});
    }
    return pieces;
}

// --- brute force ---------------------------------------------------------------------------

namespace {

struct BruteForce {
    std::vector<double> speeds;  // fastest first
    std::vector<int> job_of;
    std::vector<double> weights;
    double slot = 1.0;
    std::map<std::pair<std::int64_t, std::vector<long long>>, double> memo;

    static std::vector<long long> key(const std::vector<double>& rem) {
        std::vector<long long> k;
        for (double r : rem) k.push_back(std::llround(r * 1e9));
        return k;
    }

    double solve(std::int64_t t, const std::vector<double>& rem) {
        std::vector<int> alive;
        for (std::size_t v = 0; v < rem.size(); ++v)
            if (rem[v] > 1e-12) alive.push_back(static_cast<int>(v));
        if (alive.empty()) return 0.0;
        const auto memo_key = std::make_pair(t, key(rem));
        if (auto it = memo.find(memo_key); it != memo.end()) return it->second;

        const std::size_t k = std::min(speeds.size(), alive.size());
        double best = std::numeric_limits<double>::infinity();
        std::vector<int> pick(k, -1);
        std::vector<char> used(rem.size(), 0);
        const double t0 = static_cast<double>(t) * slot;

        auto evaluate = [&] {
            std::vector<double> next = rem;
            std::vector<double> finish(rem.size(), -1.0);
            for (std::size_t i = 0; i < k; ++i) {
                const auto v = static_cast<std::size_t>(pick[i]);
                const double can = speeds[i] * slot;
                if (next[v] <= can + 1e-12) {
                    finish[v] = t0 + next[v] / speeds[i];
                    next[v] = 0.0;
                } else {
                    next[v] -= can;
                }
            }
            // jobs whose last task finished in this slot
            double cost = 0.0;
            std::map<int, double> done_at;
            std::map<int, bool> still_alive;
            for (int v : alive) {
                const int j = job_of[static_cast<std::size_t>(v)];
                if (next[static_cast<std::size_t>(v)] > 0.0) still_alive[j] = true;
                else done_at[j] = std::max(done_at[j], finish[static_cast<std::size_t>(v)]);
            }
            for (const auto& [j, c] : done_at)
                if (!still_alive[j]) cost += weights[static_cast<std::size_t>(j)] * c;
            return cost + solve(t + 1, next);
        };

        // ordered choices of k distinct alive tasks, machine i runs pick[i]
        auto recurse = [&](auto&& self, std::size_t i) -> void {
            if (i == k) {
                best = std::min(best, evaluate());
                return;
            }
            for (int v : alive) {
                if (used[static_cast<std::size_t>(v)]) continue;
                used[static_cast<std::size_t>(v)] = 1;
                pick[i] = v;
                self(self, i + 1);
                used[static_cast<std::size_t>(v)] = 0;
            }
        };
        recurse(recurse, 0);
        memo[memo_key] = best;
        return best;
    }
};

}  // namespace

double brute_force_opt(const Instance& instance, int grid, const BruteForceLimits& limits) {
    if (grid < 1 || grid > limits.max_grid)
        throw InvalidInput("brute force grid must be in 1.." + std::to_string(limits.max_grid));
    const auto& machines = instance.machines();
    if (machines.num_machines() > limits.max_machines)
        throw InvalidInput("brute force supports at most " + std::to_string(limits.max_machines) + " machines");
    const auto tasks = enumerate_tasks(instance);
    if (static_cast<std::int64_t>(tasks.size()) > limits.max_tasks)
        throw InvalidInput("brute force supports at most " + std::to_string(limits.max_tasks) + " tasks");
    if (!instance.all_released_at_zero()) throw InvalidInput("brute force needs every job released at time 0");

    BruteForce bf;
    bf.slot = 1.0 / grid;
    for (std::int64_t i = 0; i < machines.num_machines(); ++i) bf.speeds.push_back(machines.machine(i).speed);
    std::vector<double> rem;
    for (const auto& t : tasks) {
        if (t.size < 0.0 || t.size > limits.max_size || t.size != std::floor(t.size))
            throw InvalidInput("brute force needs integer task sizes in 0.." + std::to_string(static_cast<int>(limits.max_size)));
        bf.job_of.push_back(t.job);
        rem.push_back(t.size);
    }
    for (const auto& j : instance.jobs()) bf.weights.push_back(j.weight);
    return bf.solve(0, rem);
}

}  // namespace bagsched
