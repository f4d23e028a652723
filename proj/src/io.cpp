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

#include "bagsched/io.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace bagsched {

using nlohmann::json;

namespace {

double number(const json& doc, const char* key, double fallback) {
    if (!doc.contains(key)) return fallback;
    if (!doc.at(key).is_number()) throw IoError(std::string("field '") + key + "' must be a number");
    return doc.at(key).get<double>();
}

std::int64_t count_field(const json& doc, const char* key) {
    const auto& v = doc.at(key);
    if (!v.is_number_integer() && !(v.is_number() && v.get<double>() == static_cast<double>(v.get<std::int64_t>())))
        throw IoError(std::string("field '") + key + "' must be an integer");
    return v.get<std::int64_t>();
}

std::vector<SpeedClass> classes_from_speeds(const std::vector<double>& speeds) {
    std::map<double, std::int64_t, std::greater<>> grouped;
    for (double s : speeds) ++grouped[s];
    std::vector<SpeedClass> classes;
    for (const auto& [s, c] : grouped) classes.push_back({s, c});
    return classes;
}

}  // namespace

json instance_to_json(const Instance& instance) {
    json doc;
    doc["classes"] = json::array();
    for (const auto& c : instance.classes()) doc["classes"].push_back({{"sigma", c.sigma}, {"count", c.count}});
    doc["jobs"] = json::array();
    for (const auto& j : instance.jobs()) {
        json sizes = json::array();
        for (const auto& c : j.tasks) {
            if (c.count == 1) sizes.push_back(c.size);
            else sizes.push_back({{"size", c.size}, {"count", c.count}});
        }
        doc["jobs"].push_back({{"weight", j.weight}, {"release", j.release}, {"sizes", sizes}});
    }
    doc["speedup"] = instance.speedup();
    if (instance.preprocessing_loss() != 1.0) doc["preprocessing_loss"] = instance.preprocessing_loss();
    return doc;
}

std::vector<double> raw_speeds_from_json(const json& doc) {
    std::vector<double> speeds;
    if (doc.contains("speeds")) {
        if (!doc["speeds"].is_array()) throw IoError("'speeds' must be an array of numbers");
        for (const auto& s : doc["speeds"]) {
            if (!s.is_number()) throw IoError("'speeds' must be an array of numbers");
            speeds.push_back(s.get<double>());
        }
        return speeds;
    }
    if (!doc.contains("classes")) throw IoError("instance needs 'classes' or 'speeds'");
    for (const auto& c : doc["classes"]) {
        const auto n = count_field(c, "count");
        if (n > 10'000'000) throw IoError("too many machines to list individually");
        for (std::int64_t k = 0; k < n; ++k) speeds.push_back(number(c, "sigma", 0.0));
    }
    return speeds;
}

Instance instance_from_json(const json& doc) {
    if (!doc.is_object()) throw IoError("instance document must be a JSON object");
    std::vector<SpeedClass> classes;
    try {
        if (doc.contains("classes")) {
            if (!doc["classes"].is_array()) throw IoError("'classes' must be an array");
            for (const auto& c : doc["classes"]) {
                if (!c.is_object() || !c.contains("sigma") || !c.contains("count"))
                    throw IoError("each class needs 'sigma' and 'count'");
                classes.push_back({number(c, "sigma", 0.0), count_field(c, "count")});
            }
        } else if (doc.contains("speeds")) {
            classes = classes_from_speeds(raw_speeds_from_json(doc));
        } else {
            throw IoError("instance needs 'classes' or 'speeds'");
        }
        std::vector<Job> jobs;
        if (!doc.contains("jobs") || !doc["jobs"].is_array()) throw IoError("instance needs a 'jobs' array");
        for (const auto& jd : doc["jobs"]) {
            if (!jd.is_object()) throw IoError("each job must be an object");
            Job job;
            job.weight = number(jd, "weight", 1.0);
            job.release = number(jd, "release", 0.0);
            if (!jd.contains("sizes") || !jd["sizes"].is_array()) throw IoError("each job needs a 'sizes' array");
            for (const auto& s : jd["sizes"]) {
                if (s.is_number()) {
                    job.tasks.push_back({s.get<double>(), 1});
                } else if (s.is_object() && s.contains("size")) {
                    job.tasks.push_back({number(s, "size", 0.0), s.contains("count") ? count_field(s, "count") : 1});
                } else {
                    throw IoError("task sizes must be numbers or {\"size\", \"count\"} objects");
                }
            }
            jobs.push_back(std::move(job));
        }
        return Instance(std::move(classes), std::move(jobs), number(doc, "speedup", 1.0),
                        number(doc, "preprocessing_loss", 1.0));
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed instance: ") + e.what());
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << text;
    if (!out) throw IoError("failed writing '" + path + "'");
}

json read_json_file(const std::string& path) {
    try {
        return json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw IoError("'" + path + "' is not valid JSON: " + e.what());
    }
}

Instance load_instance(const std::string& path) { return instance_from_json(read_json_file(path)); }

void save_instance(const std::string& path, const Instance& instance) {
    write_file(path, instance_to_json(instance).dump(2) + "\n");
}

// --- traces --------------------------------------------------------------------------------

namespace {

const char* kind_name(EventKind k) {
    switch (k) {
        case EventKind::task_completion: return "task_completion";
        case EventKind::job_completion: return "job_completion";
        case EventKind::job_release: return "job_release";
    }
    return "?";
}

EventKind parse_kind(const std::string& s) {
    if (s == "task_completion") return EventKind::task_completion;
    if (s == "job_completion") return EventKind::job_completion;
    if (s == "job_release") return EventKind::job_release;
    throw IoError("unknown event kind '" + s + "'");
}

}  // namespace

void write_trace(std::ostream& out, const Trace& trace, const Instance& instance) {
    out << json{{"type", "header"}, {"version", 1}, {"gamma", trace.gamma}, {"instance", instance_to_json(instance)}}.dump()
        << "\n";
    for (const auto& iv : trace.intervals) {
        json rec{{"type", "interval"}, {"t0", iv.start}, {"t1", iv.end}};
        rec["jobs"] = json::array();
        for (const auto& j : iv.profile.jobs)
            rec["jobs"].push_back({{"job", j.job},
                                   {"alive", j.alive},
                                   {"weight", j.weight},
                                   {"share", j.share},
                                   {"rate", j.rate},
                                   {"block", j.block}});
        rec["cohorts"] = json::array();
        for (const auto& c : iv.alive_cohorts) rec["cohorts"].push_back({c.job, c.cohort});
        rec["blocks"] = json::array();
        for (const auto& b : iv.profile.blocks)
            rec["blocks"].push_back({{"jobs", b.jobs},
                                     {"task_begin", b.task_begin},
                                     {"task_end", b.task_end},
                                     {"machine_begin", b.machine_begin},
                                     {"machine_end", b.machine_end},
                                     {"tau", b.tau},
                                     {"weight", b.weight},
                                     {"speed", b.speed}});
        out << rec.dump() << "\n";
    }
    json summary{{"type", "summary"},
                 {"job_completion", trace.job_completion},
                 {"cohort_completion", trace.cohort_completion},
                 {"objective", trace.objective(instance)},
                 {"makespan", trace.makespan()}};
    summary["events"] = json::array();
    for (const auto& e : trace.events)
        summary["events"].push_back({{"t", e.time}, {"kind", kind_name(e.kind)}, {"job", e.job}, {"cohort", e.cohort}});
    out << summary.dump() << "\n";
}

LoadedTrace read_trace(std::istream& in) {
    LoadedTrace out;
    bool have_header = false, have_summary = false;
    std::string line;
    int line_no = 0;
    try {
        while (std::getline(in, line)) {
            ++line_no;
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            const json rec = json::parse(line);
            const std::string type = rec.at("type").get<std::string>();
            if (type == "header") {
                out.instance = instance_from_json(rec.at("instance"));
                out.trace.gamma = rec.at("gamma").get<double>();
                out.trace.has_release_dates = !out.instance.all_released_at_zero();
                have_header = true;
            } else if (type == "interval") {
                if (!have_header) throw IoError("interval record before the header");
                TraceInterval iv;
                iv.start = rec.at("t0").get<double>();
                iv.end = rec.at("t1").get<double>();
                iv.profile.gamma = out.trace.gamma;
                for (const auto& j : rec.at("jobs"))
                    iv.profile.jobs.push_back({j.at("job").get<int>(), j.at("alive").get<std::int64_t>(),
                                               j.at("weight").get<double>(), j.at("share").get<double>(),
                                               j.at("rate").get<double>(), j.at("block").get<int>()});
                for (const auto& c : rec.at("cohorts")) iv.alive_cohorts.push_back({c.at(0).get<int>(), c.at(1).get<int>()});
                for (const auto& b : rec.at("blocks")) {
                    Block blk;
                    blk.jobs = b.at("jobs").get<std::vector<int>>();
                    blk.task_begin = b.at("task_begin").get<std::int64_t>();
                    blk.task_end = b.at("task_end").get<std::int64_t>();
                    blk.machine_begin = b.at("machine_begin").get<std::int64_t>();
                    blk.machine_end = b.at("machine_end").get<std::int64_t>();
                    blk.tau = b.at("tau").get<double>();
                    blk.weight = b.at("weight").get<double>();
                    blk.speed = b.at("speed").get<double>();
                    iv.profile.blocks.push_back(std::move(blk));
                }
                out.trace.intervals.push_back(std::move(iv));
            } else if (type == "summary") {
                out.trace.job_completion = rec.at("job_completion").get<std::vector<double>>();
                out.trace.cohort_completion = rec.at("cohort_completion").get<std::vector<std::vector<double>>>();
                for (const auto& e : rec.at("events"))
                    out.trace.events.push_back({e.at("t").get<double>(), parse_kind(e.at("kind").get<std::string>()),
                                                e.at("job").get<int>(), e.at("cohort").get<int>()});
                have_summary = true;
            } else {
                throw IoError("unknown record type '" + type + "'");
            }
        }
    } catch (const json::exception& e) {
        throw IoError("trace line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!have_header) throw IoError("trace has no header record");
    if (!have_summary) throw IoError("trace has no summary record (truncated run?)");
    if (out.trace.job_completion.size() != out.instance.jobs().size())
        throw IoError("trace summary does not match the embedded instance");
    return out;
}

LoadedTrace load_trace(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    return read_trace(in);
}

// --- reports -------------------------------------------------------------------------------

namespace {

json witness_to_json(const Witness& w) {
    json doc{{"constraint", w.constraint}, {"lhs", w.lhs}, {"rhs", w.rhs}};
    if (w.job >= 0) doc["job"] = w.job;
    if (w.segment >= 0) doc["segment"] = w.segment;
    if (w.machine_class >= 0) doc["class"] = w.machine_class;
    if (w.interval >= 0) doc["interval"] = w.interval;
    if (w.interval_beta >= 0) doc["interval_beta"] = w.interval_beta;
    return doc;
}

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

json report_to_json(const ConstraintReport& r) {
    json doc{{"name", r.name}, {"checked", r.checked}, {"violated", r.violated}, {"min_slack", finite_or_null(r.min_slack)}};
    static const char* bins[] = {"violated", "[0,1e-9)", "[1e-9,1e-6)", "[1e-6,1e-3)", "[1e-3,1e-1)", ">=1e-1"};
    json hist = json::object();
    for (std::size_t b = 0; b < r.histogram.size(); ++b) hist[bins[b]] = r.histogram[b];
    doc["slack_histogram"] = hist;
    if (r.checked > 0) doc["tightest"] = witness_to_json(r.tightest);
    return doc;
}

json certificate_to_json(const DualCertificate& c, bool with_values) {
    json doc{{"family", to_string(c.family)},
             {"gamma", c.gamma},
             {"gamma_required", c.gamma_required},
             {"gamma_sufficient", c.gamma_sufficient},
             {"feasible", c.feasible},
             {"alpha_total", c.alpha_total},
             {"beta_total", c.beta_total},
             {"dual_objective", c.dual_objective},
             {"weighted_completion", c.weighted_completion}};
    doc["constraints"] = json::array();
    for (const auto& r : c.constraints) doc["constraints"].push_back(report_to_json(r));
    doc["claims"] = json::array();
    for (const auto& r : c.claims) doc["claims"].push_back(report_to_json(r));
    doc["violations"] = json::array();
    for (const auto& w : c.violations) doc["violations"].push_back(witness_to_json(w));
    doc["notes"] = c.notes;
    if (with_values) {
        json segs = json::array();
        for (const auto& s : c.segments)
            segs.push_back({{"job", s.job}, {"cohort", s.cohort}, {"first", s.first}, {"count", s.count}});
        doc["segments"] = segs;
        doc["delta"] = c.delta;
        doc["alpha"] = c.alpha;
        doc["beta"] = c.beta;
        if (c.family == DualFamily::general) {
            doc["delta_simple"] = c.delta_simple;
            doc["delta_long"] = c.delta_long;
        }
    }
    return doc;
}

json primal_to_json(const PrimalSolution& p) {
    json doc{{"slot_length", p.slot_length},
             {"speed_scale", p.speed_scale},
             {"num_slots", p.num_slots},
             {"objective", p.objective},
             {"schedule_cost", p.schedule_cost},
             {"feasible", p.feasible}};
    doc["constraints"] = json::array();
    for (const auto& r : p.constraints) doc["constraints"].push_back(report_to_json(r));
    return doc;
}

}  // namespace bagsched
