#include "nilring/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "nilring/averages.hpp"
#include "nilring/errors.hpp"
#include "nilring/jacobian.hpp"
#include "nilring/parallel.hpp"
#include "nilring/residue.hpp"
#include "nilring/waring.hpp"
#include "nilring/weyl.hpp"

namespace nilring {

namespace {

using Json = nlohmann::ordered_json;

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string tok;
    std::istringstream is(text);
    while (std::getline(is, tok, sep)) out.push_back(tok);
    return out;
}

std::vector<mpz_class> parse_int_list(const std::string& text, const std::string& what) {
    std::vector<mpz_class> out;
    for (const auto& tok : split(text, ',')) {
        try {
            out.emplace_back(tok);
        } catch (const std::exception&) {
            throw ConfigError("bad integer list for " + what + ": " + text);
        }
    }
    if (out.empty()) throw ConfigError("empty integer list for " + what);
    return out;
}

std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    for (const auto& tok : split(text, ',')) {
        try {
            out.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw ConfigError("bad number list for " + what + ": " + text);
        }
    }
    if (out.empty()) throw ConfigError("empty number list for " + what);
    return out;
}

GroupElement parse_element(const std::string& text, int d) {
    auto coords = parse_int_list(text, "group element");
    if (coords.size() != IndexSet::get(d).size())
        throw ConfigError("element needs " + std::to_string(IndexSet::get(d).size()) +
                          " coordinates for d=" + std::to_string(d));
    return GroupElement(d, std::move(coords));
}

// "a1,...,am/q"; a single "0/q" abbreviates the zero numerator vector.
Fraction parse_fraction(const std::string& text, std::size_t dim) {
    auto slash = text.find('/');
    if (slash == std::string::npos) throw ConfigError("fraction must look like a1,..,am/q");
    std::string nums = text.substr(0, slash);
    std::int64_t q = 0;
    try {
        q = std::stoll(text.substr(slash + 1));
    } catch (const std::exception&) {
        throw ConfigError("bad fraction denominator: " + text);
    }
    if (q < 1) throw ConfigError("fraction denominator must be positive");
    std::vector<std::int64_t> a;
    for (const auto& tok : split(nums, ',')) {
        try {
            a.push_back(std::stoll(tok));
        } catch (const std::exception&) {
            throw ConfigError("bad fraction numerator: " + text);
        }
    }
    if (a.size() == 1 && a[0] == 0) a.assign(dim, 0);
    if (a.size() != dim)
        throw ConfigError("fraction needs " + std::to_string(dim) + " numerators");
    return Fraction::reduced(std::move(a), q);
}

Variant parse_variant(const std::string& text) {
    if (text == "D") return Variant::D;
    if (text == "Dt" || text == "dt" || text == "tilde") return Variant::DTilde;
    throw ConfigError("variant must be D or Dt");
}

CountStrategy parse_strategy(const std::string& text) {
    if (text == "auto") return CountStrategy::Auto;
    if (text == "direct") return CountStrategy::Direct;
    if (text == "mim") return CountStrategy::MeetInMiddle;
    throw ConfigError("strategy must be auto, direct or mim");
}

std::vector<int> parse_scales(const std::string& text) {
    auto colon = text.find(':');
    std::vector<int> out;
    try {
        if (colon != std::string::npos) {
            int lo = std::stoi(text.substr(0, colon));
            int hi = std::stoi(text.substr(colon + 1));
            for (int k = lo; k <= hi; ++k) out.push_back(k);
        } else {
            for (const auto& tok : split(text, ',')) out.push_back(std::stoi(tok));
        }
    } catch (const std::exception&) {
        throw ConfigError("bad scale list: " + text);
    }
    if (out.empty()) throw ConfigError("empty scale list");
    return out;
}

Json complex_json(std::complex<double> z) { return Json::array({z.real(), z.imag()}); }

Json mpq_json(const mpq_class& q) {
    return Json{{"num", q.get_num().get_str()}, {"den", q.get_den().get_str()}};
}

Json mc_json(const McResult& m) {
    return Json{{"value", complex_json(m.value)},
                {"stderr", m.stderr_est},
                {"samples", m.samples},
                {"seed", m.seed},
                {"resolved", m.resolved}};
}

BoxFunction load_box_function(const std::string& spec, int d) {
    if (spec == "delta") return BoxFunction::delta(d, 1);
    std::ifstream in(spec);
    if (!in) throw ConfigError("cannot open input function: " + spec);
    // JSON lines: [coords..., re, im], box inferred from the data.
    const std::size_t D = IndexSet::get(d).size();
    std::vector<std::pair<std::vector<std::int64_t>, std::complex<double>>> pts;
    std::vector<std::int64_t> radii(D, 1);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        Json j = Json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_array() || j.size() != D + 2)
            throw ConfigError("bad function line: " + line);
        std::vector<std::int64_t> coords(D);
        for (std::size_t i = 0; i < D; ++i) {
            coords[i] = j[i].get<std::int64_t>();
            radii[i] = std::max(radii[i], std::int64_t(std::llabs(coords[i])));
        }
        pts.emplace_back(std::move(coords),
                         std::complex<double>(j[D].get<double>(), j[D + 1].get<double>()));
    }
    BoxFunction f(d, std::move(radii));
    for (auto& [c, v] : pts) f.add(c, v);
    return f;
}

void dump_box_function(const BoxFunction& f, std::ostream& os) {
    const std::size_t D = IndexSet::get(f.d()).size();
    for (const auto& [k, v] : f.values()) {
        Json j = Json::array();
        for (std::size_t i = 0; i < D; ++i) j.push_back(k.c[i]);
        j.push_back(v.real());
        j.push_back(v.imag());
        os << j.dump() << "\n";
    }
}

std::function<double(double)> make_kernel(const std::string& name, double scale) {
    if (name == "zero") return [](double) { return 0.0; };
    if (name == "odd") return [scale](double t) { return scale * 0.5 * t / (1.0 + t * t); };
    throw ConfigError("kernel must be odd or zero");
}

// ---- dispatch ------------------------------------------------------------

Json run_group(const RunConfig& cfg, const WorkBudget&) {
    Json res;
    res["op"] = cfg.op;
    if (cfg.op == "mul") {
        GroupElement a = parse_element(cfg.a_text, cfg.d);
        GroupElement b = parse_element(cfg.b_text, cfg.d);
        res["value"] = to_canonical(multiply(a, b));
    } else if (cfg.op == "inv") {
        res["value"] = to_canonical(inverse(parse_element(cfg.a_text, cfg.d)));
    } else if (cfg.op == "dilate") {
        mpz_class lambda(cfg.lambda_text);
        if (lambda <= 0) throw ConfigError("lambda must be a positive integer");
        res["value"] = to_canonical(dilate(lambda, parse_element(cfg.a_text, cfg.d)));
    } else if (cfg.op == "moment") {
        mpz_class n(cfg.n_text.empty() ? "0" : cfg.n_text);
        res["value"] = to_canonical(moment_curve(n, cfg.d));
    } else if (cfg.op == "product") {
        auto n = parse_int_list(cfg.n_text, "n");
        auto m = parse_int_list(cfg.m_text, "m");
        if (n.size() != m.size()) throw ConfigError("n and m must have the same length");
        GroupElement it = iterated_product(n, m, cfg.d, parse_variant(cfg.variant));
        GroupElement cf = closed_form_product(n, m, cfg.d, parse_variant(cfg.variant));
        if (it != cf) throw std::logic_error("closed form disagrees with iterated product");
        res["value"] = to_canonical(it);
    } else {
        throw ConfigError("group op must be mul, inv, dilate, moment or product");
    }
    return res;
}

Json run_count(const RunConfig& cfg, const WorkBudget& budget) {
    GroupElement g = parse_element(cfg.g_text, cfg.d);
    mpz_class count = count_representations(g, cfg.r, cfg.N, parse_strategy(cfg.strategy), budget);
    const IndexSet& ix = IndexSet::get(cfg.d);
    double norm = std::pow(static_cast<double>(cfg.N),
                           2 * cfg.r - static_cast<int>(ix.homogeneous_dimension()));
    return Json{{"g", to_canonical(g)},
                {"count", count.get_str()},
                {"normalization", norm},
                {"normalized_count", count.get_d() / norm}};
}

Json run_predict(const RunConfig& cfg, const WorkBudget& budget) {
    GroupElement g = parse_element(cfg.g_text, cfg.d);
    McParams mc{cfg.seed, cfg.samples};
    CountReport rep = predict_count(g, cfg.r, cfg.N, cfg.eps, mc, cfg.qmax,
                                    parse_strategy(cfg.strategy), budget);
    Json j{{"g", rep.g_text},
           {"normalization", rep.normalization},
           {"series",
            Json{{"euler", rep.series.euler_value},
                 {"euler_exact", mpq_json(rep.series.euler_exact)},
                 {"fraction", complex_json(rep.series.fraction_value)},
                 {"agreement_rel", rep.series.agreement_rel},
                 {"q_max", rep.series.q_max},
                 {"obstructed", rep.series.obstructed}}},
           {"density", mc_json(rep.density)},
           {"eps", rep.eps},
           {"prediction", rep.prediction},
           {"predicted_normalized", rep.predicted_normalized}};
    if (rep.have_exact) {
        j["count"] = rep.exact_count.get_str();
        j["normalized_count"] = rep.normalized_count;
        j["residual"] = rep.residual;
        j["relative_residual"] = rep.relative_residual;
    }
    return j;
}

Json run_arcs(const RunConfig& cfg, const WorkBudget& budget) {
    GroupElement g = parse_element(cfg.g_text, cfg.d);
    ArcSplitResult res = arc_split(g, cfg.r, cfg.N, cfg.effective_delta(), budget);
    return Json{{"g", to_canonical(g)},
                {"s_maj", complex_json(res.s_maj)},
                {"s_min", complex_json(res.s_min)},
                {"exact_count", res.exact_count.get_str()},
                {"partition_defect", res.partition_defect},
                {"kernel_check", res.kernel_check},
                {"normalized_minor", res.normalized_minor},
                {"relative_minor", res.relative_minor},
                {"fractions", res.fraction_count},
                {"cutoff_radius", res.cutoff_radius}};
}

Json run_gauss(const RunConfig& cfg, const WorkBudget& budget) {
    const std::size_t D = IndexSet::get(cfg.d).size();
    Fraction frac = parse_fraction(cfg.frac_text, D);
    std::complex<double> value = gauss_sum(cfg.d, frac, cfg.r, parse_variant(cfg.variant), budget);
    Json j{{"fraction",
            Json{{"num", frac.num}, {"den", frac.den}}},
           {"value", complex_json(value)},
           {"abs", std::abs(value)}};
    if (!cfg.h_text.empty()) {
        GroupElement h = parse_element(cfg.h_text, cfg.d);
        ResidueElement hq = reduce_mod(h, frac.den);
        mpz_class M = count_solutions_mod(frac.den, hq, cfg.r, budget);
        mpq_class A = coefficient_A(frac.den, h, cfg.r, budget);
        j["local"] = Json{{"q", frac.den},
                          {"h", hq.coords},
                          {"M", M.get_str()},
                          {"A", mpq_json(A)}};
    }
    return j;
}

Json run_weyl(const RunConfig& cfg, const WorkBudget& budget) {
    const std::size_t D = IndexSet::get(cfg.d).size();
    std::vector<double> theta(D, 0.0);
    if (!cfg.theta_text.empty()) {
        auto parsed = parse_double_list(cfg.theta_text, "theta");
        if (parsed.size() != D)
            throw ConfigError("theta needs " + std::to_string(D) + " components");
        theta = std::move(parsed);
    }
    WeightFunction w = cfg.weight == "smooth" ? WeightFunction::smooth(static_cast<double>(cfg.P))
                                              : WeightFunction::indicator(static_cast<double>(cfg.P));
    WeylStrategy strat = WeylStrategy::Auto;
    if (cfg.strategy == "direct") strat = WeylStrategy::Direct;
    if (cfg.strategy == "mim") strat = WeylStrategy::PrefixDp;
    SumResult res =
        weyl_sum(cfg.P, cfg.r, theta, cfg.d, w, w, parse_variant(cfg.variant), strat, budget);
    return Json{{"value", complex_json(res.value)},
                {"abs", std::abs(res.value)},
                {"normalized", res.normalized_magnitude},
                {"P", res.P},
                {"theta", res.theta}};
}

Json run_rank(const RunConfig& cfg, const WorkBudget&) {
    WitnessSearch ws = find_full_rank_point(cfg.d, cfg.r, cfg.box);
    Json j{{"feasible", ws.feasible}, {"found", ws.found}, {"examined", ws.examined}};
    if (ws.found) {
        Json n = Json::array(), m = Json::array();
        for (const auto& v : ws.n) n.push_back(v.get_str());
        for (const auto& v : ws.m) m.push_back(v.get_str());
        j["n"] = n;
        j["m"] = m;
        j["rank"] = rank(jacobian_at(ws.n, ws.m, cfg.d));
        NonsingularZeroResult nz = nonsingular_zero(cfg.d, cfg.r, std::make_pair(ws.n, ws.m));
        Json z0 = Json::array(), w0 = Json::array();
        for (const auto& v : nz.z0) z0.push_back(v.get_str());
        for (const auto& v : nz.w0) w0.push_back(v.get_str());
        j["doubled"] = Json{{"z0", z0}, {"w0", w0}, {"rank", nz.rank_at_zero}};
    }
    return j;
}

Json run_maxfn(const RunConfig& cfg, const WorkBudget& budget, std::ostream* dump) {
    BoxFunction f = load_box_function(cfg.f_text, cfg.d);
    auto scales = parse_scales(cfg.scales_text);
    MaximalResult res = maximal_function(f, scales, budget);
    if (dump) dump_box_function(res.sup, *dump);
    return Json{{"scales", scales},
                {"input_l2", res.input_l2},
                {"sup_l2", res.sup_l2},
                {"ratio", res.ratio},
                {"support", res.sup.support_size()}};
}

Json run_singular(const RunConfig& cfg, const WorkBudget& budget, std::ostream* dump) {
    BoxFunction f = load_box_function(cfg.f_text, cfg.d);
    SingularResult res = singular_operator(f, make_kernel(cfg.kernel, cfg.kernel_scale), cfg.R, budget);
    if (dump) dump_box_function(res.out, *dump);
    return Json{{"kernel", cfg.kernel},
                {"R", cfg.R},
                {"input_l2", res.input_l2},
                {"output_l2", res.output_l2},
                {"ratio", res.ratio},
                {"support", res.out.support_size()}};
}

Json scan_json(const ScanTable& table) {
    Json rows = Json::array();
    for (const auto& row : table.rows) {
        rows.push_back(Json{{"class", row.rep},
                            {"mass", row.mass},
                            {"distinct", row.distinct_values},
                            {"min_count", row.min_count},
                            {"max_count", row.max_count},
                            {"parity_ok", row.parity_ok},
                            {"positive", row.positive}});
    }
    return Json{{"Q", table.Q}, {"total_mass", table.total_mass}, {"rows", rows}};
}

std::string scan_csv(const ScanTable& table) {
    std::ostringstream os;
    const std::size_t D = IndexSet::get(table.d).size();
    for (std::size_t i = 0; i < D; ++i) os << "b" << i << ",";
    os << "mass,distinct,min_count,max_count,parity_ok,positive\n";
    for (const auto& row : table.rows) {
        for (auto v : row.rep) os << v << ",";
        os << row.mass << "," << row.distinct_values << "," << row.min_count << ","
           << row.max_count << "," << (row.parity_ok ? 1 : 0) << "," << (row.positive ? 1 : 0)
           << "\n";
    }
    return os.str();
}

}  // namespace

double RunConfig::effective_delta() const {
    return delta == 0.0 ? std::pow(10.0 * d, -4.0) : delta;
}

void RunConfig::validate() const {
    if (d < 1 || d > 4) throw ConfigError("d must be in [1, 4]");
    if (r < 1 || r > 16) throw ConfigError("r must be in [1, 16]");
    if (N < 1) throw ConfigError("N must be >= 1");
    if (work_budget == 0) throw ConfigError("work budget must be positive");
    const double bound = std::pow(10.0 * d, -4.0);
    if (delta != 0.0 && (!(delta > 0.0) || delta > bound)) {
        std::ostringstream os;
        os << "delta must lie in (0, (10d)^-4]; the bound for d=" << d << " is " << bound;
        throw ConfigError(os.str());
    }
    if (output != "json" && output != "csv") throw ConfigError("output must be json or csv");
}

namespace {

// Canonical key order for the flat config text.
struct FieldDef {
    const char* name;
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, const std::string&)> set;
};

const std::vector<FieldDef>& config_fields() {
    static const std::vector<FieldDef> fields = {
        {"subcommand", [](const RunConfig& c) { return c.subcommand; },
         [](RunConfig& c, const std::string& v) { c.subcommand = v; }},
        {"d", [](const RunConfig& c) { return std::to_string(c.d); },
         [](RunConfig& c, const std::string& v) { c.d = std::stoi(v); }},
        {"r", [](const RunConfig& c) { return std::to_string(c.r); },
         [](RunConfig& c, const std::string& v) { c.r = std::stoi(v); }},
        {"N", [](const RunConfig& c) { return std::to_string(c.N); },
         [](RunConfig& c, const std::string& v) { c.N = std::stol(v); }},
        {"P", [](const RunConfig& c) { return std::to_string(c.P); },
         [](RunConfig& c, const std::string& v) { c.P = std::stol(v); }},
        {"Q", [](const RunConfig& c) { return std::to_string(c.Q); },
         [](RunConfig& c, const std::string& v) { c.Q = std::stol(v); }},
        {"R", [](const RunConfig& c) { return std::to_string(c.R); },
         [](RunConfig& c, const std::string& v) { c.R = std::stol(v); }},
        {"box", [](const RunConfig& c) { return std::to_string(c.box); },
         [](RunConfig& c, const std::string& v) { c.box = std::stol(v); }},
        {"qmax", [](const RunConfig& c) { return std::to_string(c.qmax); },
         [](RunConfig& c, const std::string& v) { c.qmax = std::stol(v); }},
        {"delta", [](const RunConfig& c) { std::ostringstream os; os.precision(17); os << c.delta; return os.str(); },
         [](RunConfig& c, const std::string& v) { c.delta = std::stod(v); }},
        {"eps", [](const RunConfig& c) { std::ostringstream os; os.precision(17); os << c.eps; return os.str(); },
         [](RunConfig& c, const std::string& v) { c.eps = std::stod(v); }},
        {"seed", [](const RunConfig& c) { return std::to_string(c.seed); },
         [](RunConfig& c, const std::string& v) { c.seed = std::stoull(v); }},
        {"samples", [](const RunConfig& c) { return std::to_string(c.samples); },
         [](RunConfig& c, const std::string& v) { c.samples = std::stoull(v); }},
        {"work_budget", [](const RunConfig& c) { return std::to_string(c.work_budget); },
         [](RunConfig& c, const std::string& v) { c.work_budget = std::stoull(v); }},
        {"strategy", [](const RunConfig& c) { return c.strategy; },
         [](RunConfig& c, const std::string& v) { c.strategy = v; }},
        {"weight", [](const RunConfig& c) { return c.weight; },
         [](RunConfig& c, const std::string& v) { c.weight = v; }},
        {"variant", [](const RunConfig& c) { return c.variant; },
         [](RunConfig& c, const std::string& v) { c.variant = v; }},
        {"kernel", [](const RunConfig& c) { return c.kernel; },
         [](RunConfig& c, const std::string& v) { c.kernel = v; }},
        {"kernel_scale", [](const RunConfig& c) { std::ostringstream os; os.precision(17); os << c.kernel_scale; return os.str(); },
         [](RunConfig& c, const std::string& v) { c.kernel_scale = std::stod(v); }},
        {"op", [](const RunConfig& c) { return c.op; },
         [](RunConfig& c, const std::string& v) { c.op = v; }},
        {"a", [](const RunConfig& c) { return c.a_text; },
         [](RunConfig& c, const std::string& v) { c.a_text = v; }},
        {"b", [](const RunConfig& c) { return c.b_text; },
         [](RunConfig& c, const std::string& v) { c.b_text = v; }},
        {"lambda", [](const RunConfig& c) { return c.lambda_text; },
         [](RunConfig& c, const std::string& v) { c.lambda_text = v; }},
        {"n", [](const RunConfig& c) { return c.n_text; },
         [](RunConfig& c, const std::string& v) { c.n_text = v; }},
        {"m", [](const RunConfig& c) { return c.m_text; },
         [](RunConfig& c, const std::string& v) { c.m_text = v; }},
        {"g", [](const RunConfig& c) { return c.g_text; },
         [](RunConfig& c, const std::string& v) { c.g_text = v; }},
        {"frac", [](const RunConfig& c) { return c.frac_text; },
         [](RunConfig& c, const std::string& v) { c.frac_text = v; }},
        {"theta", [](const RunConfig& c) { return c.theta_text; },
         [](RunConfig& c, const std::string& v) { c.theta_text = v; }},
        {"scales", [](const RunConfig& c) { return c.scales_text; },
         [](RunConfig& c, const std::string& v) { c.scales_text = v; }},
        {"f", [](const RunConfig& c) { return c.f_text; },
         [](RunConfig& c, const std::string& v) { c.f_text = v; }},
        {"h", [](const RunConfig& c) { return c.h_text; },
         [](RunConfig& c, const std::string& v) { c.h_text = v; }},
        {"output", [](const RunConfig& c) { return c.output; },
         [](RunConfig& c, const std::string& v) { c.output = v; }},
        {"out", [](const RunConfig& c) { return c.out_path; },
         [](RunConfig& c, const std::string& v) { c.out_path = v; }},
    };
    return fields;
}

}  // namespace

std::string serialize_config(const RunConfig& cfg) {
    std::ostringstream os;
    for (const auto& f : config_fields()) os << f.name << " = " << f.get(cfg) << "\n";
    return os.str();
}

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + " is not key = value");
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t");
            auto e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        bool known = false;
        for (const auto& f : config_fields()) {
            if (key == f.name) {
                try {
                    f.set(cfg, val);
                } catch (const ConfigError&) {
                    throw;
                } catch (const std::exception&) {
                    throw ConfigError("bad value for config key " + key + ": " + val);
                }
                known = true;
                break;
            }
        }
        if (!known) throw ConfigError("unknown config key: " + key);
    }
    return cfg;
}

std::string config_hash(const RunConfig& cfg) {
    std::string text = serialize_config(cfg);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "fnv1a:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    std::string config_path;
    unsigned threads = 0;

    CLI::App app{"exact step-2 nilpotent group arithmetic, exponential sums and counting"};
    app.require_subcommand(1);
    app.fallthrough(false);

    std::vector<CLI::App*> subs;
    for (const char* name : {"group", "count", "predict", "arcs", "gauss", "weyl", "rank",
                             "maxfn", "singular", "scan"}) {
        CLI::App* sc = app.add_subcommand(name);
        sc->add_option("--config", config_path, "flat key-value config file");
        sc->add_option("--d", cfg.d);
        sc->add_option("--r", cfg.r);
        sc->add_option("--N", cfg.N);
        sc->add_option("--P", cfg.P);
        sc->add_option("--Q", cfg.Q);
        sc->add_option("--R", cfg.R);
        sc->add_option("--box", cfg.box);
        sc->add_option("--qmax", cfg.qmax);
        sc->add_option("--delta", cfg.delta);
        sc->add_option("--eps", cfg.eps);
        sc->add_option("--seed", cfg.seed);
        sc->add_option("--samples", cfg.samples);
        sc->add_option("--work-budget", cfg.work_budget);
        sc->add_option("--strategy", cfg.strategy);
        sc->add_option("--weight", cfg.weight);
        sc->add_option("--variant", cfg.variant);
        sc->add_option("--kernel", cfg.kernel);
        sc->add_option("--kernel-scale", cfg.kernel_scale);
        sc->add_option("--op", cfg.op);
        sc->add_option("--a", cfg.a_text);
        sc->add_option("--b", cfg.b_text);
        sc->add_option("--lambda", cfg.lambda_text);
        sc->add_option("--n", cfg.n_text);
        sc->add_option("--m", cfg.m_text);
        sc->add_option("--g", cfg.g_text);
        sc->add_option("--frac", cfg.frac_text);
        sc->add_option("--theta", cfg.theta_text);
        sc->add_option("--scales", cfg.scales_text);
        sc->add_option("--f", cfg.f_text);
        sc->add_option("--h", cfg.h_text);
        sc->add_option("--output", cfg.output);
        sc->add_option("--out", cfg.out_path);
        sc->add_option("--threads", threads, "worker threads (does not affect results)");
        subs.push_back(sc);
    }

    try {
        std::vector<char*> argv;
        std::vector<std::string> storage;
        storage.push_back("nilring");
        storage.insert(storage.end(), args.begin(), args.end());
        for (auto& s : storage) argv.push_back(s.data());
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {  // --help
            out << app.help();
            return 0;
        }
        err << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        CLI::App* active = nullptr;
        for (auto* sc : subs)
            if (sc->parsed()) active = sc;
        if (active == nullptr) throw ConfigError("a subcommand is required");

        // Config file first (if any); flags given on the command line win.
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw ConfigError("cannot open config file: " + config_path);
            std::stringstream buf;
            buf << in.rdbuf();
            RunConfig merged = parse_config_text(buf.str());
            for (const CLI::Option* opt : active->get_options()) {
                if (opt->count() == 0) continue;
                std::string name = opt->get_name();
                if (name.rfind("--", 0) == 0) name = name.substr(2);
                if (name == "config" || name == "threads") continue;
                if (name == "work-budget") name = "work_budget";
                if (name == "kernel-scale") name = "kernel_scale";
                for (const auto& f : config_fields()) {
                    if (name == f.name) {
                        f.set(merged, f.get(cfg));
                        break;
                    }
                }
            }
            cfg = merged;
        }

        cfg.subcommand = active->get_name();
        cfg.validate();
        if (threads != 0) set_thread_count(threads);

        WorkBudget budget{cfg.work_budget};
        Json result;
        std::string csv_payload;
        std::ofstream dump_file;
        std::ostream* dump = nullptr;
        if (!cfg.out_path.empty() &&
            (cfg.subcommand == "maxfn" || cfg.subcommand == "singular")) {
            dump_file.open(cfg.out_path);
            if (!dump_file) throw ConfigError("cannot open output path: " + cfg.out_path);
            dump = &dump_file;
        }

        if (cfg.subcommand == "group") result = run_group(cfg, budget);
        else if (cfg.subcommand == "count") result = run_count(cfg, budget);
        else if (cfg.subcommand == "predict") result = run_predict(cfg, budget);
        else if (cfg.subcommand == "arcs") result = run_arcs(cfg, budget);
        else if (cfg.subcommand == "gauss") result = run_gauss(cfg, budget);
        else if (cfg.subcommand == "weyl") result = run_weyl(cfg, budget);
        else if (cfg.subcommand == "rank") result = run_rank(cfg, budget);
        else if (cfg.subcommand == "maxfn") result = run_maxfn(cfg, budget, dump);
        else if (cfg.subcommand == "singular") result = run_singular(cfg, budget, dump);
        else if (cfg.subcommand == "scan") {
            ScanTable table = residue_class_scan(cfg.d, cfg.Q, cfg.r, cfg.N, budget);
            if (cfg.output == "csv") {
                csv_payload = scan_csv(table);
            } else {
                result = scan_json(table);
            }
        } else {
            throw ConfigError("unknown subcommand: " + cfg.subcommand);
        }

        if (cfg.subcommand == "scan" && cfg.output == "csv") {
            if (!cfg.out_path.empty()) {
                std::ofstream f(cfg.out_path);
                if (!f) throw ConfigError("cannot open output path: " + cfg.out_path);
                f << csv_payload;
            }
            out << csv_payload;
            return 0;
        }

        Json report;
        report["tool"] = "nilring";
        report["subcommand"] = cfg.subcommand;
        Json jcfg;
        for (const auto& f : config_fields()) jcfg[f.name] = f.get(cfg);
        jcfg["config_hash"] = config_hash(cfg);
        report["config"] = jcfg;
        report["result"] = result;
        std::string payload = report.dump(2);
        payload.push_back('\n');
        if (!cfg.out_path.empty() && dump == nullptr && cfg.subcommand != "scan") {
            std::ofstream f(cfg.out_path);
            if (!f) throw ConfigError("cannot open output path: " + cfg.out_path);
            f << payload;
        }
        out << payload;
        return 0;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const BudgetError& e) {
        err << "budget exceeded: " << e.what() << "\n";
        return 3;
    } catch (const NumericPreconditionError& e) {
        err << "numeric precondition failed: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace nilring
