#include "cfbkit/config.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "cfbkit/curvature.hpp"
#include "cfbkit/oracle.hpp"
#include "cfbkit/similarity.hpp"

namespace cfbkit {

namespace {

[[noreturn]] void fail_at(const std::string& where, const std::string& what) {
    throw Error(ErrorKind::InvalidParameter, "at " + (where.empty() ? std::string("/") : where) + ": " + what);
}

const json& need(const json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) fail_at(where, std::string("missing key \"") + key + "\"");
    return j.at(key);
}

double need_number(const json& j, const std::string& where) {
    if (!j.is_number()) fail_at(where, "expected a number");
    return j.get<double>();
}

struct GridSpec {
    double radius = 0.7;
    int count = 21;
};

GridSpec parse_grid(const json& params, const std::string& where) {
    GridSpec g;
    if (!params.contains("grid")) return g;
    const auto& j = params.at("grid");
    if (j.contains("radius")) g.radius = need_number(j.at("radius"), where + "/grid/radius");
    if (j.contains("count")) g.count = j.at("count").get<int>();
    if (!(g.radius > 0.0 && g.radius <= 0.95)) fail_at(where + "/grid/radius", "grid radius must lie in (0, 0.95]");
    if (g.count < 2) fail_at(where + "/grid/count", "grid needs at least 2 points per side");
    return g;
}

void validate_task(const ExperimentConfig& cfg, const TaskDecl& t, const std::string& where) {
    const auto& kinds = task_kinds();
    if (std::find(kinds.begin(), kinds.end(), t.kind) == kinds.end()) fail_at(where + "/kind", "unknown task kind " + t.kind);
    if (!t.params.is_object()) fail_at(where, "task must be an object");
    auto check_name = [&](const json& n, const std::string& w) {
        if (!n.is_string()) fail_at(w, "operator reference must be a string");
        if (!cfg.operators.count(n.get<std::string>())) fail_at(w, "undefined operator " + n.get<std::string>());
    };
    if (t.params.contains("operator")) check_name(t.params.at("operator"), where + "/operator");
    if (t.params.contains("operators")) {
        const auto& ops = t.params.at("operators");
        if (!ops.is_array() || ops.size() != 2) fail_at(where + "/operators", "expected two operator names");
        for (std::size_t i = 0; i < ops.size(); ++i) check_name(ops[i], where + "/operators/" + std::to_string(i));
    }
    parse_grid(t.params, where);
    if (t.params.contains("tolerance") && !(need_number(t.params.at("tolerance"), where + "/tolerance") > 0.0))
        fail_at(where + "/tolerance", "tolerances must be positive");
}

std::vector<double> real_parts(const std::vector<cplx>& v) {
    std::vector<double> out;
    for (const auto& z : v) out.push_back(z.real());
    return out;
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

json verdict_json(const PropertyHVerdict& v) {
    json j = {{"status", to_string(v.status)}, {"criterion", to_string(v.criterion)}, {"slope", v.slope}};
    if (!v.note.empty()) j["note"] = v.note;
    json trace = json::array();
    for (const auto& [x, y] : v.trace) trace.push_back({x, y});
    j["trace"] = trace;
    return j;
}

CfbOperator build_named(const ExperimentConfig& cfg, const std::string& name) {
    return build_cfb(parse_operator(cfg.operators.at(name), cfg.truncation));
}

std::pair<CfbOperator, CfbOperator> build_pair(const ExperimentConfig& cfg, const json& params) {
    const auto& ops = params.at("operators");
    return {build_named(cfg, ops[0].get<std::string>()), build_named(cfg, ops[1].get<std::string>())};
}

DiagonalKernel task_kernel(const ExperimentConfig& cfg, const json& p, int N) {
    if (p.contains("kernel")) return parse_kernel(p.at("kernel"), N);
    const auto spec = parse_operator(cfg.operators.at(p.at("operator").get<std::string>()), cfg.truncation);
    const int b = p.value("block", 0);
    if (b < 0 || b >= static_cast<int>(spec.kernels.size())) throw Error(ErrorKind::IndexRange, "block index out of range");
    return spec.kernels[b];
}

std::filesystem::path side_file(const RunOptions& opts, const json& p, const char* key) {
    if (!opts.write_files || !p.contains(key)) return {};
    return opts.out_dir / p.at(key).get<std::string>();
}

json run_curvature(const ExperimentConfig& cfg, const json& p, const RunOptions& opts) {
    const auto g = parse_grid(p, "");
    const auto k = task_kernel(cfg, p, cfg.truncation);
    const auto grid = disk_grid(g.radius, g.count);
    auto method = CurvatureMethod::Auto;
    const std::string m = p.value("method", "auto");
    if (m == "closed-form") method = CurvatureMethod::ClosedForm;
    else if (m == "finite-difference") method = CurvatureMethod::FiniteDifference;
    const auto f = curvature_rank1(k, grid, method);
    const auto vals = real_parts(f.values);
    if (auto path = side_file(opts, p, "csv"); !path.empty()) write_grid_csv(path, grid, vals);
    return {{"points", grid.size()},
            {"source", f.source == FieldSource::ClosedForm ? "closed-form" : "finite-difference"},
            {"max_abs", max_abs(vals)},
            {"at_origin", curvature_rank1(k, {cplx(0.0)}, method).values[0].real()}};
}

json run_sff(const ExperimentConfig& cfg, const json& p, const RunOptions& opts) {
    const auto g = parse_grid(p, "");
    const auto T = build_named(cfg, p.at("operator").get<std::string>());
    const auto grid = disk_grid(g.radius, g.count);
    const auto s = sff_generalized(T, p.value("index", 0), grid);
    if (auto path = side_file(opts, p, "csv"); !path.empty()) write_grid_csv(path, grid, s.values);
    return {{"points", grid.size()}, {"max_abs", max_abs(s.values)}, {"truncation_bound", s.truncation_bound}};
}

json run_property_h(const ExperimentConfig& cfg, const json& p) {
    DiagonalKernel k1, k2;
    if (p.contains("kernels")) {
        k1 = parse_kernel(p.at("kernels").at(0), cfg.truncation);
        k2 = parse_kernel(p.at("kernels").at(1), cfg.truncation);
    } else {
        const auto spec = parse_operator(cfg.operators.at(p.at("operator").get<std::string>()), cfg.truncation);
        const int i = p.value("index", 0);
        if (i < 0 || i + 1 >= static_cast<int>(spec.kernels.size())) throw Error(ErrorKind::IndexRange, "pair index out of range");
        k1 = spec.kernels[i];
        k2 = spec.kernels[i + 1];
    }
    const std::string crit = p.value("criterion", "all");
    const std::size_t n_max = p.value("n_max", 4096);
    json out = json::object();
    auto want = [&](const char* c) { return crit == "all" || crit == c; };
    auto guarded = [&](const char* key, auto&& fn) {
        try {
            out[key] = fn();
        } catch (const Error& e) {
            out[key] = {{"error", to_string(e.kind())}, {"message", e.what()}};
        }
    };
    if (want("lambda-gap"))
        guarded("lambda-gap", [&] {
            if (!k1.lambda() || !k2.lambda()) throw Error(ErrorKind::Precondition, "lambda-family kernels required");
            return verdict_json(check_lambda_gap(*k1.lambda(), *k2.lambda()));
        });
    if (want("weight-product"))
        guarded("weight-product", [&] {
            return verdict_json(check_weight_product(WeightSequence::from_kernel(k1, n_max),
                                                     WeightSequence::from_kernel(k2, n_max), n_max));
        });
    if (want("norm-limit"))
        guarded("norm-limit", [&] {
            const std::size_t len = kNormLimitTail * n_max + 1;
            return verdict_json(check_norm_limit(WeightSequence::from_kernel(k1, len),
                                                 WeightSequence::from_kernel(k2, len), n_max));
        });
    if (want("kernel-ratio"))
        guarded("kernel-ratio", [&] {
            return verdict_json(check_kernel_ratio(k1, k2, {0.9, 0.99, 0.999, 0.9999}));
        });
    if (want("brute-force"))
        guarded("brute-force", [&] {
            const int N = p.value("N", 24);
            const auto r = brute_force_tau(shift_from_kernel(k1, N).matrix, shift_from_kernel(k2, N).matrix);
            json j = verdict_json(r.verdict);
            j["intersection_dim"] = r.intersection_dim;
            j["rank"] = r.rank;
            j["smallest_nonzero_singular"] = r.smallest_nonzero_singular;
            return j;
        });
    return out;
}

json run_similar(const ExperimentConfig& cfg, const json& p, const RunOptions& opts) {
    const auto [T, Tt] = build_pair(cfg, p);
    const auto v = decide_multiplication_family(T, Tt);
    const double tol = kWitnessResidualTol * cfg.tolerance_scale;
    json out = {{"status", to_string(v.status)}};
    if (!v.obstruction.empty()) out["obstruction"] = v.obstruction;
    if (v.witness.size() > 0) {
        out["witness_cond"] = v.condition;
        out["witness_residual"] = v.residual;
        out["within_tolerance"] = v.residual <= tol;
        if (auto path = side_file(opts, p, "export"); !path.empty()) write_matrix_binary(path, v.witness);
    }
    return out;
}

json run_recursive(const ExperimentConfig& cfg, const json& p) {
    const auto [T, Tt] = build_pair(cfg, p);
    const auto r = recursive_intertwiner(T, Tt);
    json out = {{"status", to_string(r.status)}, {"residual", r.residual}, {"stage_residuals", r.stage_residuals},
                {"within_tolerance", r.residual <= kWitnessResidualTol * cfg.tolerance_scale}};
    if (p.value("crosscheck", false)) {
        const auto s = solve_structured(T.assembled(), Tt.assembled(), Tt.assembled() - T.assembled(),
                                        Structure::StrictUpper, T.N());
        const Mat X = Mat::Identity(s.X.rows(), s.X.cols()) + s.X;
        out["direct_residual"] = intertwining_residual(X, T, Tt);
    }
    return out;
}

json run_homogeneous(const ExperimentConfig& cfg, const json& p) {
    const auto T = build_named(cfg, p.at("operator").get<std::string>());
    const int count = p.value("samples", 5);
    const double rmax = p.value("max_radius", 0.6);
    if (!(rmax >= 0.0 && rmax < 1.0)) throw Error(ErrorKind::InvalidParameter, "max_radius must lie in [0, 1)");
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<MobiusMap> maps;
    const double pi = std::acos(-1.0);
    for (int s = 0; s < count; ++s) {
        const double r = rmax * std::sqrt(unit(rng));
        const double arg = 2.0 * pi * unit(rng);
        maps.emplace_back(std::polar(r, arg), 2.0 * pi * unit(rng) - pi);
    }
    const auto v = weak_homogeneity(T, maps);
    json samples = json::array();
    for (std::size_t s = 0; s < v.samples.size(); ++s)
        samples.push_back({{"a", complex_to_json(maps[s].a)},
                           {"theta", maps[s].theta},
                           {"residual", v.samples[s].residual},
                           {"condition", v.samples[s].condition}});
    json out = {{"status", to_string(v.status)}, {"samples", samples}};
    if (!v.obstruction.empty()) out["obstruction"] = v.obstruction;
    return out;
}

json run_oracle(const ExperimentConfig& cfg, const json& p) {
    const auto [T, Tt] = build_pair(cfg, p);
    const std::string s = p.value("structure", "full");
    Structure st = Structure::Full;
    if (s == "strict-upper") st = Structure::StrictUpper;
    else if (s == "diagonal") st = Structure::Diagonal;
    else if (s != "full") throw Error(ErrorKind::InvalidParameter, "structure must be full, strict-upper or diagonal");
    const auto r = direct_intertwiner(T.assembled(), Tt.assembled(), st, T.N(), cfg.seed);
    return {{"found", r.found},
            {"solution_dim", r.basis.size()},
            {"best_condition", r.best_condition},
            {"best_residual", r.found ? intertwining_residual(r.best, T, Tt) : 0.0}};
}

}  // namespace

const std::vector<std::string>& task_kinds() {
    static const std::vector<std::string> k = {"curvature", "sff",         "property-h",      "similar",
                                               "recursive-intertwiner",       "homogeneous", "oracle-crosscheck"};
    return k;
}

cplx parse_complex(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) return {j[0].get<double>(), j[1].get<double>()};
    throw Error(ErrorKind::InvalidParameter, "complex values are numbers or [re, im] pairs");
}

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

AnalyticSymbol parse_symbol(const json& j) {
    if (j.is_array()) {
        std::vector<cplx> c;
        for (const auto& x : j) c.push_back(parse_complex(x));
        if (c.empty()) throw Error(ErrorKind::InvalidParameter, "empty coefficient list");
        return AnalyticSymbol::polynomial(std::move(c));
    }
    if (j.is_object() && j.contains("roots")) {
        std::vector<cplx> roots;
        for (const auto& x : j.at("roots")) roots.push_back(parse_complex(x));
        return AnalyticSymbol::from_roots(roots, j.contains("scale") ? parse_complex(j.at("scale")) : cplx(1.0));
    }
    throw Error(ErrorKind::InvalidParameter, "symbols are coefficient lists or {\"roots\", \"scale\"} objects");
}

DiagonalKernel parse_kernel(const json& j, int N) {
    if (j.is_object() && j.contains("lambda")) {
        const double l = j.at("lambda").get<double>();
        if (!(l > 0.0)) throw Error(ErrorKind::InvalidParameter, "lambda must be positive");
        return DiagonalKernel::lambda_family(l, static_cast<std::size_t>(N) + 1);
    }
    if (j.is_object() && j.contains("coeffs")) return DiagonalKernel::from_coeffs(j.at("coeffs").get<std::vector<double>>());
    throw Error(ErrorKind::InvalidParameter, "kernels are {\"lambda\": x} or {\"coeffs\": [...]}");
}

CfbSpec parse_operator(const json& j, int default_N) {
    CfbSpec s;
    s.N = j.value("N", default_N);
    for (const auto& k : need(j, "kernels", "")) s.kernels.push_back(parse_kernel(k, s.N));
    if (j.contains("superdiag"))
        for (const auto& x : j.at("superdiag")) s.superdiag.push_back(parse_symbol(x));
    if (j.contains("cofactors"))
        for (const auto& c : j.at("cofactors"))
            s.cofactors[{c.at("i").get<int>(), c.at("j").get<int>()}] = parse_symbol(c.at("symbol"));
    s.verify = j.value("verify", true);
    return s;
}

json ExperimentConfig::resolved() const {
    json ops = json::object();
    for (const auto& [name, decl] : operators) {
        json d = decl;
        if (!d.contains("N")) d["N"] = truncation;
        ops[name] = d;
    }
    json ts = json::array();
    for (const auto& t : tasks) {
        json x = t.params;
        x["kind"] = t.kind;
        ts.push_back(x);
    }
    return {{"seed", seed},
            {"truncation", truncation},
            {"fail_fast", fail_fast},
            {"tolerance_scale", tolerance_scale},
            {"operators", ops},
            {"tasks", ts},
            {"output", {{"report", report}}}};
}

ExperimentConfig parse_config(const json& doc) {
    if (!doc.is_object()) fail_at("", "config must be an object");
    ExperimentConfig cfg;
    if (doc.contains("seed")) {
        if (!doc.at("seed").is_number_unsigned()) fail_at("/seed", "seed must be a non-negative integer");
        cfg.seed = doc.at("seed").get<std::uint64_t>();
    }
    if (doc.contains("truncation")) {
        if (!doc.at("truncation").is_number_integer() || doc.at("truncation").get<int>() < 2)
            fail_at("/truncation", "truncation must be an integer >= 2");
        cfg.truncation = doc.at("truncation").get<int>();
    }
    cfg.fail_fast = doc.value("fail_fast", false);
    if (doc.contains("tolerance_scale")) {
        cfg.tolerance_scale = need_number(doc.at("tolerance_scale"), "/tolerance_scale");
        if (!(cfg.tolerance_scale > 0.0)) fail_at("/tolerance_scale", "tolerances must be positive");
    }
    if (doc.contains("operators")) {
        if (!doc.at("operators").is_object()) fail_at("/operators", "operators must be an object keyed by name");
        for (const auto& [name, decl] : doc.at("operators").items()) {
            const std::string where = "/operators/" + name;
            try {
                parse_operator(decl, cfg.truncation);
            } catch (const Error& e) {
                fail_at(where, e.what());
            } catch (const json::exception& e) {
                fail_at(where, e.what());
            }
            cfg.operators[name] = decl;
        }
    }
    if (doc.contains("tasks")) {
        if (!doc.at("tasks").is_array()) fail_at("/tasks", "tasks must be an array");
        for (std::size_t i = 0; i < doc.at("tasks").size(); ++i) {
            const std::string where = "/tasks/" + std::to_string(i);
            const auto& t = doc.at("tasks")[i];
            TaskDecl d;
            d.kind = need(t, "kind", where).get<std::string>();
            d.params = t;
            d.params.erase("kind");
            validate_task(cfg, d, where);
            cfg.tasks.push_back(std::move(d));
        }
    }
    if (doc.contains("output")) cfg.report = doc.at("output").value("report", cfg.report);
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::InvalidParameter, "cannot open config " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::InvalidParameter, path.string() + ": " + e.what());
    }
    return parse_config(doc);
}

json run_task(const ExperimentConfig& cfg, const TaskDecl& task, const RunOptions& opts) {
    try {
        if (task.kind == "curvature") return run_curvature(cfg, task.params, opts);
        if (task.kind == "sff") return run_sff(cfg, task.params, opts);
        if (task.kind == "property-h") return run_property_h(cfg, task.params);
        if (task.kind == "similar") return run_similar(cfg, task.params, opts);
        if (task.kind == "recursive-intertwiner") return run_recursive(cfg, task.params);
        if (task.kind == "homogeneous") return run_homogeneous(cfg, task.params);
        if (task.kind == "oracle-crosscheck") return run_oracle(cfg, task.params);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::InvalidParameter, e.what());
    }
    throw Error(ErrorKind::InvalidParameter, "unknown task kind " + task.kind);
}

int run_experiment(const ExperimentConfig& cfg, std::ostream& report, const RunOptions& opts) {
    int code = 0;
    for (std::size_t i = 0; i < cfg.tasks.size(); ++i) {
        const auto& t = cfg.tasks[i];
        json rec = {{"task", i}, {"kind", t.kind}, {"inputs", t.params}, {"seed", cfg.seed}, {"version", kArtifactVersion}};
        const auto start = std::chrono::steady_clock::now();
        try {
            rec["result"] = run_task(cfg, t, opts);
            rec["outcome"] = "ok";
        } catch (const Error& e) {
            rec["outcome"] = "error";
            rec["error"] = {{"kind", to_string(e.kind())}, {"message", e.what()}};
            code = 1;
        }
        rec["elapsed_ms"] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        report << rec.dump() << "\n" << std::flush;
        if (code != 0 && cfg.fail_fast) break;
    }
    return code;
}

void write_matrix_binary(const std::filesystem::path& path, const Mat& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::InvalidParameter, "cannot write " + path.string());
    auto put64 = [&](std::uint64_t v) {
        if constexpr (std::endian::native == std::endian::big) v = __builtin_bswap64(v);
        out.write(reinterpret_cast<const char*>(&v), 8);
    };
    auto putd = [&](double d) { put64(std::bit_cast<std::uint64_t>(d)); };
    out.write("CDMX", 4);
    put64(static_cast<std::uint64_t>(m.rows()));
    put64(static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            putd(m(r, c).real());
            putd(m(r, c).imag());
        }
}

Mat read_matrix_binary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, "CDMX", 4) != 0)
        throw Error(ErrorKind::InvalidParameter, "not a CDMX matrix file: " + path.string());
    auto get64 = [&] {
        std::uint64_t v = 0;
        if (!in.read(reinterpret_cast<char*>(&v), 8)) throw Error(ErrorKind::InvalidParameter, "truncated matrix file");
        if constexpr (std::endian::native == std::endian::big) v = __builtin_bswap64(v);
        return v;
    };
    const auto rows = static_cast<Eigen::Index>(get64());
    const auto cols = static_cast<Eigen::Index>(get64());
    Mat m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) {
            const double re = std::bit_cast<double>(get64());
            const double im = std::bit_cast<double>(get64());
            m(r, c) = cplx(re, im);
        }
    return m;
}

void write_grid_csv(const std::filesystem::path& path, const std::vector<cplx>& grid, const std::vector<double>& values) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::InvalidParameter, "cannot write " + path.string());
    out.precision(17);
    out << "re_w,im_w,value\n";
    for (std::size_t p = 0; p < grid.size(); ++p) out << grid[p].real() << "," << grid[p].imag() << "," << values[p] << "\n";
}

}  // namespace cfbkit
