#include "smd/cli.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <map>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace smd::cli {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::string& where,
                    std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* key : allowed)
            if (it.key() == key) ok = true;
        if (!ok) throw ConfigError("unknown field " + where + "." + it.key());
    }
}

Vec vec_from_json(const json& arr, const std::string& where) {
    if (!arr.is_array()) throw ConfigError(where + " must be a numeric array");
    Vec v(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) v[i] = arr[i].get<double>();
    return v;
}

Mat mat_from_json(const json& rows, int cols, const std::string& where) {
    if (!rows.is_array()) throw ConfigError(where + " must be an array of rows");
    Mat m(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!rows[i].is_array() || static_cast<int>(rows[i].size()) != cols)
            throw ConfigError(where + " row " + std::to_string(i) + " must have " +
                              std::to_string(cols) + " entries");
        for (int j = 0; j < cols; ++j) m(i, j) = rows[i][j].get<double>();
    }
    return m;
}

Region region_from_json(const json& r) {
    reject_unknown(r, "region", {"p", "kind", "lower", "upper", "A", "b", "C", "d"});
    if (!r.contains("p") || !r.contains("kind"))
        throw ConfigError("region.p and region.kind are required");
    const int p = r.at("p").get<int>();
    const std::string kind = r.at("kind").get<std::string>();
    try {
        if (kind == "simplex") return Region::simplex(p);
        if (kind == "bounded") {
            if (!r.contains("lower") || !r.contains("upper"))
                throw ConfigError("region.lower and region.upper are required for bounded");
            return Region::bounded(vec_from_json(r.at("lower"), "region.lower"),
                                   vec_from_json(r.at("upper"), "region.upper"));
        }
        if (kind == "polytope") {
            for (const char* key : {"A", "b", "C", "d"})
                if (!r.contains(key))
                    throw ConfigError(std::string("region.") + key +
                                      " is required for polytope");
            return Region::polytope(mat_from_json(r.at("A"), p, "region.A"),
                                    vec_from_json(r.at("b"), "region.b"),
                                    mat_from_json(r.at("C"), p, "region.C"),
                                    vec_from_json(r.at("d"), "region.d"));
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("region: ") + e.what());
    }
    throw ConfigError("region.kind must be one of simplex, bounded, polytope");
}

json metrics_to_json(const MetricsReport& rep) {
    json j;
    j["n"] = rep.n;
    j["K"] = rep.num_slices;
    j["N_eval"] = rep.eval_size;
    j["delta_mu"] = rep.delta_mu;
    j["delta_sigma"] = rep.delta_sigma;
    j["rmsd"] = rep.rmsd;
    j["mad"] = rep.mad;
    j["mid"] = rep.mid;
    j["mid_complete"] = rep.mid_complete;
    j["full"] = {{"delta_mu", rep.full_delta_mu},
                 {"delta_sigma", rep.full_delta_sigma},
                 {"rmsd", rep.full_rmsd},
                 {"mad", rep.full_mad}};
    if (rep.full_mid) j["full"]["mid"] = *rep.full_mid;
    j["slices"] = json::array();
    for (int k = 0; k < rep.num_slices; ++k) {
        json s = {{"delta_mu", rep.slice_delta_mu[k]},
                  {"delta_sigma", rep.slice_delta_sigma[k]},
                  {"rmsd", rep.slice_rmsd[k]},
                  {"mad", rep.slice_mad[k]}};
        if (rep.slice_mid[k]) s["mid"] = *rep.slice_mid[k];
        j["slices"].push_back(std::move(s));
    }
    return j;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

std::string method_name(Method m) {
    switch (m) {
        case Method::MHED: return "MHED";
        case Method::SeqHED: return "SeqHED";
        case Method::SeqM: return "SeqM";
        case Method::ComM: return "ComM";
    }
    return "?";
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    auto mix = [](std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    };
    return mix(mix(seed ^ mix(a)) ^ mix(b));
}

Method method_from_string(const std::string& name) {
    if (name == "MHED") return Method::MHED;
    if (name == "SeqHED") return Method::SeqHED;
    if (name == "SeqM") return Method::SeqM;
    if (name == "ComM") return Method::ComM;
    throw ConfigError("unknown method " + name);
}

RunConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    reject_unknown(root, "config", {"region", "process", "sizes", "solver", "output"});
    if (!root.contains("region")) throw ConfigError("config.region is required");

    RunConfig cfg;
    cfg.region = region_from_json(root.at("region"));

    const bool has_process = root.contains("process");
    const bool has_sizes = root.contains("sizes");
    if (has_process == has_sizes)
        throw ConfigError("exactly one of config.process and config.sizes is required");
    if (has_sizes) {
        for (const auto& s : root.at("sizes")) cfg.sizes.push_back(s.get<int>());
    } else {
        const json& proc = root.at("process");
        reject_unknown(proc, "process", {"levels", "runs_per_slice"});
        if (!proc.contains("levels") || !proc.contains("runs_per_slice"))
            throw ConfigError("process.levels and process.runs_per_slice are required");
        int K = 1;
        for (const auto& s : proc.at("levels")) {
            int lv = s.get<int>();
            if (lv < 1) throw ConfigError("process.levels entries must be >= 1");
            K *= lv;
        }
        int runs = proc.at("runs_per_slice").get<int>();
        if (runs < 1) throw ConfigError("process.runs_per_slice must be >= 1");
        cfg.sizes.assign(K, runs);
    }
    if (cfg.sizes.empty()) throw ConfigError("config.sizes must be nonempty");
    for (int s : cfg.sizes)
        if (s < 1) throw ConfigError("config.sizes entries must be >= 1");

    cfg.solver.sizes = cfg.sizes;
    if (root.contains("solver")) {
        const json& s = root.at("solver");
        reject_unknown(s, "solver",
                       {"method", "lambda", "lambda_schedule", "N", "N_s", "tau", "tol",
                        "max_iter", "seed"});
        if (s.contains("method"))
            cfg.solver.method = method_from_string(s.at("method").get<std::string>());
        if (s.contains("lambda")) {
            cfg.solver.lambda = s.at("lambda").get<double>();
            if (cfg.solver.lambda < 0.0 || cfg.solver.lambda > 1.0)
                throw ConfigError("solver.lambda out of [0,1]");
            cfg.solver.lambda_schedule = LambdaSchedule::Fixed;
        }
        if (s.contains("lambda_schedule")) {
            std::string sched = s.at("lambda_schedule").get<std::string>();
            if (sched == "fixed")
                cfg.solver.lambda_schedule = LambdaSchedule::Fixed;
            else if (sched == "remark1")
                cfg.solver.lambda_schedule = LambdaSchedule::Remark1;
            else
                throw ConfigError("solver.lambda_schedule must be fixed or remark1");
        }
        if (s.contains("N")) cfg.solver.ref_size = s.at("N").get<std::size_t>();
        if (s.contains("N_s")) cfg.solver.batch_size = s.at("N_s").get<std::size_t>();
        if (s.contains("tau")) cfg.solver.jitter = s.at("tau").get<double>();
        if (s.contains("tol")) cfg.solver.tol = s.at("tol").get<double>();
        if (s.contains("max_iter")) cfg.solver.max_iter = s.at("max_iter").get<int>();
        if (s.contains("seed")) cfg.solver.seed = s.at("seed").get<std::uint64_t>();
    }
    try {
        cfg.solver.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    if (root.contains("output")) {
        const json& o = root.at("output");
        reject_unknown(o, "output", {"design_path", "report_path", "trace_path"});
        if (o.contains("design_path")) cfg.design_path = o.at("design_path").get<std::string>();
        if (o.contains("report_path")) cfg.report_path = o.at("report_path").get<std::string>();
        if (o.contains("trace_path")) cfg.trace_path = o.at("trace_path").get<std::string>();
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

void write_design_csv(const std::string& path, const SlicedDesign& D) {
    const int p = D.points.empty() ? 0 : static_cast<int>(D.points.front().size());
    std::string text = "slice";
    for (int j = 1; j <= p; ++j) text += ",x" + std::to_string(j);
    text += "\n";
    char buf[64];
    for (int i = 0; i < D.n(); ++i) {
        text += std::to_string(D.slice_of[i]);
        for (int j = 0; j < p; ++j) {
            std::snprintf(buf, sizeof buf, ",%.17g", D.points[i][j]);
            text += buf;
        }
        text += "\n";
    }
    write_text(path, text);
}

SlicedDesign read_design_csv(const std::string& path, int p) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read design " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": missing header");
    SlicedDesign D;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(row, cell, ',')) cells.push_back(cell);
        if (static_cast<int>(cells.size()) != p + 1)
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected " +
                                     std::to_string(p + 1) + " columns, got " +
                                     std::to_string(cells.size()));
        try {
            D.slice_of.push_back(std::stoi(cells[0]));
            Vec x(p);
            for (int j = 0; j < p; ++j) x[j] = std::stod(cells[j + 1]);
            D.points.push_back(std::move(x));
        } catch (const std::exception&) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": malformed numeric cell");
        }
    }
    for (int lbl : D.slice_of) {
        if (lbl < 1)
            throw std::runtime_error(path + ": slice labels must be >= 1");
        D.num_slices = std::max(D.num_slices, lbl);
    }
    return D;
}

int cmd_generate(const RunConfig& cfg) {
    try {
        const Region& region = *cfg.region;
        SolveResult res = run(region, cfg.solver);

        Rng eval_rng(derive_seed(cfg.solver.seed, 0xEA11ULL, 0));
        Points eval_sample = region.sample_uniform(10000, eval_rng);
        Rng moment_rng(derive_seed(cfg.solver.seed, 0x30AAULL, 0));
        MetricsReport metrics = evaluate(res.design, eval_sample, true_moments(region, moment_rng));

        bool converged = true;
        int total_iters = 0;
        json stages = json::array();
        for (const SolveTrace& t : res.traces) {
            converged = converged && t.converged;
            total_iters += t.iterations;
            stages.push_back({{"iterations", t.iterations},
                              {"converged", t.converged},
                              {"final_movement", t.final_movement},
                              {"final_objective",
                               t.objective.empty() ? 0.0 : t.objective.back()}});
        }

        json report;
        report["seed"] = cfg.solver.seed;
        report["method"] = method_name(cfg.solver.method);
        report["lambda"] = cfg.solver.lambda;
        report["converged"] = converged;
        report["iterations"] = total_iters;
        report["stages"] = std::move(stages);
        report["metrics"] = metrics_to_json(metrics);

        if (!cfg.design_path.empty()) write_design_csv(cfg.design_path, res.design);
        if (!cfg.report_path.empty())
            write_text(cfg.report_path, report.dump(2) + "\n");
        else
            std::cout << report.dump(2) << "\n";
        if (!cfg.trace_path.empty()) {
            json traces = json::array();
            for (const SolveTrace& t : res.traces) traces.push_back(t.objective);
            write_text(cfg.trace_path, json{{"objective", traces}}.dump(2) + "\n");
        }
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

int cmd_evaluate(const std::string& design_path, const RunConfig& cfg) {
    try {
        const Region& region = *cfg.region;
        SlicedDesign D = read_design_csv(design_path, region.dim());
        json warnings = json::array();
        for (int i = 0; i < D.n(); ++i)
            if (!region.contains(D.points[i], 1e-6))
                warnings.push_back("point " + std::to_string(i + 1) + " is infeasible");

        Rng eval_rng(derive_seed(cfg.solver.seed, 0xEA11ULL, 1));
        Points eval_sample = region.sample_uniform(10000, eval_rng);
        Rng moment_rng(derive_seed(cfg.solver.seed, 0x30AAULL, 1));
        MetricsReport metrics = evaluate(D, eval_sample, true_moments(region, moment_rng));

        json report;
        report["seed"] = cfg.solver.seed;
        report["design"] = design_path;
        report["warnings"] = std::move(warnings);
        report["metrics"] = metrics_to_json(metrics);
        if (!cfg.report_path.empty())
            write_text(cfg.report_path, report.dump(2) + "\n");
        else
            std::cout << report.dump(2) << "\n";
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

int cmd_compare(const RunConfig& cfg, const std::vector<std::string>& methods, int replicates,
                const std::string& out_path) {
    try {
        if (replicates < 1) throw ConfigError("replicates must be >= 1");
        const Region& region = *cfg.region;
        const int n = cfg.solver.total_points();
        const std::uint64_t seed = cfg.solver.seed;

        Rng moment_rng(derive_seed(seed, 0x30AAULL, 2));
        MomentSpec moments = true_moments(region, moment_rng);

        auto build = [&](const std::string& method, int rep) -> SlicedDesign {
            std::uint64_t mkey = std::hash<std::string>{}(method);
            std::uint64_t dseed = derive_seed(seed, mkey, static_cast<std::uint64_t>(rep));
            if (method == "MHED" || method == "ComM" || method == "SeqHED" ||
                method == "SeqM") {
                SolverConfig sc = cfg.solver;
                sc.method = method_from_string(method);
                sc.seed = dseed;
                return run(region, sc).design;
            }
            Rng rng(dseed);
            PartitionPlan plan{cfg.sizes};
            if (method == "RandomUniform") {
                return random_partition(region.sample_uniform(n, rng), plan, rng);
            }
            if (method == "ParM" || method == "RandParM") {
                // Full single-set representative points first, then split.
                SolverConfig sc = cfg.solver;
                sc.sizes = {n};
                sc.method = Method::MHED;
                sc.lambda = 1.0;
                sc.seed = dseed;
                Points full = run_oneshot(region, sc).design.points;
                if (method == "ParM") return energy_partition(full, plan, rng);
                return random_partition(full, plan, rng);
            }
            throw ConfigError("unknown method " + method);
        };

        std::string csv = "method,replicate,metric,value\n";
        std::map<std::string, std::map<std::string, std::vector<double>>> by_method;
        char buf[64];
        for (int r = 0; r < replicates; ++r) {
            Rng eval_rng(derive_seed(seed, 0xEA11ULL, static_cast<std::uint64_t>(r)));
            Points eval_sample = region.sample_uniform(10000, eval_rng);
            for (const std::string& method : methods) {
                SlicedDesign D = build(method, r);
                MetricsReport rep = evaluate(D, eval_sample, moments);
                for (const std::string& name : metric_names()) {
                    double v = rep.metric(name);
                    std::snprintf(buf, sizeof buf, "%.17g", v);
                    csv += method + "," + std::to_string(r + 1) + "," + name + "," + buf + "\n";
                    by_method[method][name].push_back(v);
                }
            }
        }
        write_text(out_path, csv);

        std::cout << "method";
        for (const std::string& name : metric_names()) std::cout << "," << name << "_median";
        std::cout << "\n";
        for (const std::string& method : methods) {
            std::cout << method;
            for (const std::string& name : metric_names())
                std::cout << "," << median_of(by_method[method][name]);
            std::cout << "\n";
        }
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace smd::cli
