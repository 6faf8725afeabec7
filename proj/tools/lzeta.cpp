#include <CLI11.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lz/greens.hpp"
#include "lz/mheat.hpp"
#include "lz/models.hpp"
#include "lz/quad.hpp"
#include "lz/report.hpp"
#include "lz/riesz.hpp"
#include "lz/specfun.hpp"
#include "lz/varlab.hpp"
#include "lz/verify.hpp"
#include "lz/zeta.hpp"

using json = nlohmann::ordered_json;
using namespace lz;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitBudget = 3;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string model = "torus-unit";
    int n = 0;  // 0 picks the model default
    int m = 1;
    double c = 0.0;
    int q = 3;
    std::string rotations = "1,1";
    double cutoff_periods = 400.0;

    double s = 1.0, s_im = 0.0;
    double alpha = 1.0, alpha_im = 0.0;
    std::string r = "0.5,1,2";
    double t = 1.0;
    std::string d = "0.05,0.1,0.2";
    std::string direction = "1,0,0";
    bool extract = false;

    int K = 0;
    double eps_fd = 1e-3;
    double amplitude = 1.0;
    int axis = 0;
    int freq = 1;
    std::string x;
    bool no_q_term = false;

    std::string suite = "all";

    MellinConfig mellin;
    std::string format = "json";
    std::string output;
    int threads = 1;
    std::string config;
};

// --- parsing helpers ---

double parse_double(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: '" + key + "' expects a number, got '" + v + "'");
    }
}

int parse_int(const std::string& key, const std::string& v) {
    double x = parse_double(key, v);
    if (x != std::floor(x)) throw ConfigError("config: '" + key + "' expects an integer, got '" + v + "'");
    return int(x);
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config: '" + key + "' expects true or false, got '" + v + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(parse_double(key, item));
    return out;
}

// Binds a flag to a config key "section.key"; config values apply when the flag is absent.
struct Binding {
    CLI::Option* opt;
    std::string key;
    std::function<void(const std::string&)> set;
    std::function<json()> get;
};

struct Registry {
    std::vector<Binding> items;

    template <class T>
    void add(CLI::App* app, const std::string& flag, const std::string& key, T& ref, const std::string& help) {
        CLI::Option* o = app->add_option(flag, ref, help)->capture_default_str();
        items.push_back({o, key, setter(key, ref), [&ref] { return json(ref); }});
    }
    void add_flag(CLI::App* app, const std::string& flag, const std::string& key, bool& ref, const std::string& help) {
        CLI::Option* o = app->add_flag(flag, ref, help);
        items.push_back({o, key, [&ref, key](const std::string& v) { ref = parse_bool(key, v); },
                         [&ref] { return json(ref); }});
    }

    static std::function<void(const std::string&)> setter(const std::string& key, double& ref) {
        return [&ref, key](const std::string& v) { ref = parse_double(key, v); };
    }
    static std::function<void(const std::string&)> setter(const std::string& key, int& ref) {
        return [&ref, key](const std::string& v) { ref = parse_int(key, v); };
    }
    static std::function<void(const std::string&)> setter(const std::string&, std::string& ref) {
        return [&ref](const std::string& v) { ref = v; };
    }
};

std::set<std::string> all_keys(const std::vector<Registry>& regs) {
    std::set<std::string> keys;
    for (const auto& r : regs)
        for (const auto& b : r.items) keys.insert(b.key);
    return keys;
}

void apply_config(const std::string& path, Registry& active, const std::set<std::string>& known) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(path, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError("config: " + std::string(e.what()));
    }
    std::map<std::string, std::string> flat;
    for (const auto& [section, body] : tree) {
        if (body.empty()) throw ConfigError("config: key '" + section + "' must sit inside a [section]");
        for (const auto& [k, v] : body) {
            std::string key = section + "." + k;
            if (!known.count(key)) throw ConfigError("config: unknown key '" + key + "'");
            flat[key] = v.get_value<std::string>();
        }
    }
    for (auto& b : active.items) {
        auto it = flat.find(b.key);
        if (it != flat.end() && b.opt->count() == 0) b.set(it->second);
    }
}

json resolved_inputs(const Registry& reg) {
    json in = json::object();
    for (const auto& b : reg.items) {
        if (b.key == "run.config") continue;
        in[b.key] = b.get();
    }
    return in;
}

// --- model construction ---

struct Model {
    enum Kind { torus, sphere, spaceform } kind = torus;
    TorusSpec torus_spec;
    SphereSpec sphere_spec;
    SpaceFormSpec form_spec;
    std::string label;
};

Model build_model(const Options& o) {
    Model md;
    md.label = o.model;
    const std::string& name = o.model;
    auto nd = [&](int def) { return o.n > 0 ? o.n : def; };
    if (name == "torus-unit" || name == "torus-shift" || name == "torus-negative" || name == "torus-power") {
        md.kind = Model::torus;
        TorusOp op = TorusOp::laplace_shift;
        if (name == "torus-negative") op = TorusOp::laplace_shift_negative;
        if (name == "torus-power") op = TorusOp::laplace_power;
        double c = name == "torus-unit" || name == "torus-power" ? 0.0 : o.c;
        md.torus_spec = TorusSpec::unit_cube(nd(3), op, c, name == "torus-power" ? o.m : 1);
    } else if (name == "sphere" || name == "s3-yamabe") {
        md.kind = Model::sphere;
        md.sphere_spec = name == "s3-yamabe" ? SphereSpec{3, 1} : SphereSpec{nd(3), o.m};
    } else if (name == "projective" || name == "rp3-yamabe") {
        md.kind = Model::spaceform;
        md.form_spec = name == "rp3-yamabe" ? SpaceFormSpec::projective(3, 1) : SpaceFormSpec::projective(nd(3), o.m);
    } else if (name == "lens") {
        md.kind = Model::spaceform;
        std::vector<int> rot;
        for (double v : parse_list("model.rotations", o.rotations)) rot.push_back(int(v));
        md.form_spec = SpaceFormSpec::lens(o.q, rot, o.m);
    } else {
        throw ConfigError("unknown model '" + name +
                          "' (torus-unit, torus-shift, torus-negative, torus-power, sphere, s3-yamabe, projective, "
                          "rp3-yamabe, lens)");
    }
    if (md.kind == Model::spaceform) md.form_spec.validate();
    return md;
}

SpectrumModel torus_model(const Options& o, const TorusSpec& spec) {
    double ell = spec.shortest_period();
    return torus_spectrum(spec, o.cutoff_periods * std::pow(2.0 * kPi / ell, 2));
}

// --- report helpers ---

json quantity(double v, const std::string& tag, double err = -1.0) {
    json q = json::object();
    q["value"] = v;
    if (err >= 0.0) q["error"] = err;
    q["tag"] = tag;
    return q;
}

json complex_quantity(cplx v, const std::string& tag, double err = -1.0) {
    json q = json::object();
    q["re"] = v.real();
    q["im"] = v.imag();
    if (err >= 0.0) q["error"] = err;
    q["tag"] = tag;
    return q;
}

struct Result {
    json outputs = json::object();
    json budgets = json::object();
    Table table;
    bool within_budget = true;
};

void scalar_row(Result& r, const std::string& name, double v) {
    r.table.columns.push_back(name);
    if (r.table.rows.empty()) r.table.rows.emplace_back();
    r.table.rows[0].push_back(v);
}

// --- commands ---

Result run_riesz(const Options& o) {
    Result res;
    if (o.n < 1) throw ConfigError("riesz: --n must be a positive dimension");
    cplx a(o.alpha, o.alpha_im);
    int k = 0;
    bool pole = riesz_pole(a, o.n, &k);
    LaurentValue coef = riesz_coeff(a, o.n);
    res.outputs["pole"] = pole;
    if (pole) res.outputs["pole_index"] = k;
    res.outputs["coefficient_residue"] = complex_quantity(coef.residue, "riesz-coefficient-residue");
    res.outputs["coefficient_finite_part"] = complex_quantity(coef.finite_part, "riesz-coefficient-finite-part");
    res.table.columns = {"r", "re", "im", "residue_re", "residue_im"};
    json vals = json::array();
    for (double r : parse_list("riesz.r", o.r)) {
        if (!(r > 0.0)) throw ConfigError("riesz: radii must be positive");
        LaurentValue v = riesz_eval(a, o.n, r);
        json row = json::object();
        row["r"] = r;
        row["value"] = complex_quantity(v.finite_part, "riesz-distribution-finite-part");
        row["residue"] = complex_quantity(v.residue, "riesz-distribution-residue");
        vals.push_back(row);
        res.table.rows.push_back({r, v.finite_part.real(), v.finite_part.imag(), v.residue.real(), v.residue.imag()});
    }
    res.outputs["values"] = vals;
    return res;
}

Result run_heat(const Options& o) {
    Result res;
    int n = o.n > 0 ? o.n : 3;
    MHeatParams p{o.m, n, o.t};
    if (o.m < 1) throw ConfigError("heat: --m must be positive");
    res.outputs["at_zero"] = quantity(mheat_at_zero(p), "m-heat-kernel-diagonal");
    res.table.columns = {"r", "e"};
    json vals = json::array();
    for (double r : parse_list("heat.r", o.r)) {
        double e = mheat_eval(p, r);
        json row = json::object();
        row["r"] = r;
        row["e"] = quantity(e, "m-heat-kernel", 1e-9 * mheat_at_zero(p));
        vals.push_back(row);
        res.table.rows.push_back({r, e});
    }
    res.outputs["values"] = vals;
    return res;
}

void zeta_torus(const Options& o, const Model& md, cplx s, Result& res) {
    SpectrumModel model = torus_model(o, md.torus_spec);
    ZetaResult z = zeta_continued(model, s, o.mellin);
    const auto& dg = z.diag;
    res.outputs["route"] = "heat_mellin";
    res.outputs["residue"] = complex_quantity(z.value.residue, "local-zeta-residue");
    res.outputs["finite_part"] = complex_quantity(z.value.finite_part, "local-zeta-finite-part", z.value.error);
    json parts = json::object();
    parts["pole_terms"] = complex_quantity(dg.pole_terms.finite_part, "heat-coefficient-pole-terms");
    parts["head"] = complex_quantity(dg.head, "remainder-head-integral");
    parts["head_fit"] = complex_quantity(dg.head_fit, "remainder-small-time-fit");
    parts["kernel_part"] = complex_quantity(dg.kernel_part, "kernel-projection-part");
    parts["tail"] = complex_quantity(dg.tail, "positive-tail");
    parts["negative"] = complex_quantity(dg.negative, "negative-mode-power");
    res.outputs["parts"] = parts;
    res.budgets["quadrature_error"] = dg.quad_error;
    res.budgets["fit_residual"] = dg.fit_residual;
    res.budgets["fit_tolerance"] = o.mellin.fit_tol;
    res.budgets["truncation_bound"] = dg.truncation_bound;
    res.budgets["total"] = z.value.error;
    scalar_row(res, "residue_re", z.value.residue.real());
    scalar_row(res, "residue_im", z.value.residue.imag());
    scalar_row(res, "finite_part_re", z.value.finite_part.real());
    scalar_row(res, "finite_part_im", z.value.finite_part.imag());
    scalar_row(res, "error", z.value.error);
}

Result run_zeta(const Options& o) {
    Result res;
    Model md = build_model(o);
    cplx s(o.s, o.s_im);
    if (md.kind == Model::torus) {
        zeta_torus(o, md, s, res);
        return res;
    }
    SeriesResult sr;
    if (md.kind == Model::sphere) {
        sr = zeta_sphere_series_full(md.sphere_spec, s, 60, 1);
    } else {
        if (md.form_spec.q != 2) throw ConfigError("zeta: the series route covers spheres and projective spaces only");
        sr = zeta_sphere_series_full(md.form_spec.base, s, 60, 2);
    }
    res.outputs["route"] = "binomial_series";
    res.outputs["value"] = complex_quantity(sr.value, "local-zeta-value", sr.truncation_error);
    res.budgets["truncation_error"] = sr.truncation_error;
    res.within_budget = sr.truncation_error <= 1e-10 * std::max(1.0, std::abs(sr.value));
    scalar_row(res, "re", sr.value.real());
    scalar_row(res, "im", sr.value.imag());
    scalar_row(res, "error", sr.truncation_error);
    return res;
}

Result run_mass(const Options& o) {
    Result res;
    Model md = build_model(o);
    if (md.kind == Model::torus) {
        SpectrumModel model = torus_model(o, md.torus_spec);
        LaurentValue v = mass(model, o.mellin);
        res.outputs["route"] = "zeta_continued";
        res.outputs["value"] = quantity(v.finite_part.real(), "mass", v.error);
        res.outputs["residue"] = quantity(v.residue.real(), "local-zeta-residue");
        res.budgets["total"] = v.error;
        scalar_row(res, "value", v.finite_part.real());
        scalar_row(res, "error", v.error);
        const TorusSpec& ts = md.torus_spec;
        if (ts.n == 3 && ts.op == TorusOp::laplace_shift) {
            double robin = torus_robin_constant(ts);
            double gap = std::abs(robin - v.finite_part.real());
            res.outputs["cross_check"] = quantity(robin, "robin-constant");
            res.budgets["cross_route_gap"] = gap;
            res.budgets["cross_route_tolerance"] = 1e-6;
            res.within_budget = gap <= 1e-6;
            scalar_row(res, "robin", robin);
        }
        return res;
    }
    if (md.kind == Model::sphere) {
        const SphereSpec& sp = md.sphere_spec;
        if (2 * sp.m >= sp.n) throw ConfigError("mass: needs 2m < n on spheres");
        SeriesResult sr = zeta_sphere_series_full(sp, 1.0, 60, 1);
        res.outputs["route"] = "binomial_series";
        res.outputs["value"] = quantity(sr.value.real(), "mass", sr.truncation_error);
        res.budgets["truncation_error"] = sr.truncation_error;
        scalar_row(res, "value", sr.value.real());
        scalar_row(res, "error", sr.truncation_error);
        return res;
    }
    const SpaceFormSpec& fs = md.form_spec;
    if (2 * fs.base.m >= fs.base.n) throw ConfigError("mass: needs 2m < n on space forms");
    double v = quotient_mass(fs);
    res.outputs["route"] = "image_sum";
    res.outputs["value"] = quantity(v, "mass");
    scalar_row(res, "value", v);
    if (fs.q == 2) {
        SeriesResult sr = zeta_sphere_series_full(fs.base, 1.0, 60, 2);
        double gap = std::abs(sr.value.real() - v);
        res.outputs["cross_check"] = quantity(sr.value.real(), "local-zeta-finite-part", sr.truncation_error);
        res.budgets["cross_route_gap"] = gap;
        res.budgets["cross_route_tolerance"] = 1e-6;
        res.within_budget = gap <= 1e-6;
        scalar_row(res, "series", sr.value.real());
    }
    return res;
}

Result run_green(const Options& o) {
    Result res;
    Model md = build_model(o);
    std::vector<double> ds = parse_list("green.d", o.d);
    GreenKernel gk;
    std::function<double(int, double)> phi = [](int j, double) { return j == 0 ? 1.0 : 0.0; };
    if (md.kind == Model::torus) {
        const TorusSpec ts = md.torus_spec;
        std::vector<double> dv = parse_list("green.direction", o.direction);
        if (int(dv.size()) != ts.n) throw ConfigError("green: direction must have n components");
        Eigen::VectorXd dir = Eigen::Map<Eigen::VectorXd>(dv.data(), ts.n);
        if (dir.norm() == 0.0) throw ConfigError("green: direction must be non-zero");
        dir.normalize();
        gk = {[ts, dir](double d) { return torus_green_ewald(ts, Eigen::VectorXd(d * dir)); }, ts.n, ts.order(),
              1.0, 0.5 * ts.shortest_period(), "torus"};
        if (ts.op == TorusOp::laplace_shift) {
            double c = ts.c;
            phi = [c](int j, double) { return std::pow(-c, j); };
        }
    } else if (md.kind == Model::sphere) {
        SphereSpec sp = md.sphere_spec;
        gk = {[sp](double d) { return sphere_green(sp.n, sp.m, d); }, sp.n, sp.m, 1.0, kPi, "sphere"};
    } else {
        SpaceFormSpec fs = md.form_spec;
        const int dim = fs.base.n + 1;
        gk = {[fs, dim](double d) {
                  Eigen::VectorXd x = Eigen::VectorXd::Zero(dim), y = Eigen::VectorXd::Zero(dim);
                  x(0) = 1.0;
                  y(0) = std::cos(d);
                  y(1) = std::sin(d);
                  return quotient_green(fs, x, y);
              },
              fs.base.n, fs.base.m, 1.0, kPi / fs.q, "space-form"};
    }
    res.table.columns = {"d", "G"};
    json vals = json::array();
    for (double d : ds) {
        double g = gk.evaluator(d);
        json row = json::object();
        row["d"] = d;
        row["G"] = quantity(g, "green-kernel");
        vals.push_back(row);
        res.table.rows.push_back({d, g});
    }
    res.outputs["values"] = vals;
    if (o.extract) {
        ConstantTerm ct = constant_term_extract(gk, 1.0, phi);
        res.outputs["constant_term"] = quantity(ct.value, "green-constant-term", ct.error);
        res.outputs["expansion_order"] = ct.J;
        res.outputs["ladder"] = ct.ladder;
        res.budgets["extrapolation_error"] = ct.error;
    }
    return res;
}

Result run_variation(const Options& o) {
    Result res;
    int n = o.n > 0 ? o.n : 3;
    if (n != 2 && n != 3) throw ConfigError("variation: --n must be 2 or 3");
    if (o.axis < 0 || o.axis >= n) throw ConfigError("variation: --axis out of range");
    TorusSpec spec = TorusSpec::unit_cube(n);
    ConformalFactor f = ConformalFactor::cosine(n, o.axis, o.amplitude, o.freq);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    if (!o.x.empty()) {
        std::vector<double> xv = parse_list("variation.x", o.x);
        if (int(xv.size()) != n) throw ConfigError("variation: --x must have n components");
        x = Eigen::Map<Eigen::VectorXd>(xv.data(), n);
    }
    VariationOptions vo;
    vo.K = o.K > 0 ? o.K : (n == 2 ? 16 : 8);
    vo.eps_fd = o.eps_fd;
    vo.include_q_term = !o.no_q_term;
    VarlabConfig cfg = VarlabConfig::defaults(n, vo.K);
    VariationReport rep = variation_check(spec, f, x, vo, cfg);
    res.outputs["fd"] = quantity(rep.lhs, "mass-variation-finite-difference");
    res.outputs["rhs"] = quantity(rep.rhs, "mass-variation-formula");
    res.outputs["mass0"] = quantity(rep.mass0, "mass");
    res.outputs["projector"] = quantity(rep.projector, "kernel-projector-term");
    res.outputs["q_term"] = quantity(rep.q_term, "critical-q-term");
    res.outputs["f_at_x"] = rep.f_at_x;
    res.outputs["fd_order"] = rep.order_estimate;
    res.outputs["fd_steps"] = rep.fd_steps;
    res.outputs["fd_values"] = rep.fd_values;
    if (n == 2) {
        res.outputs["residue_plus"] = quantity(rep.residue_plus, "local-zeta-residue");
        res.outputs["residue_minus"] = quantity(rep.residue_minus, "local-zeta-residue");
    }
    res.budgets["gap"] = rep.gap;
    res.budgets["rel_gap"] = rep.rel_gap;
    res.budgets["budget"] = rep.budget;
    res.within_budget = rep.within_budget;
    scalar_row(res, "fd", rep.lhs);
    scalar_row(res, "rhs", rep.rhs);
    scalar_row(res, "rel_gap", rep.rel_gap);
    scalar_row(res, "fd_order", rep.order_estimate);
    return res;
}

Result run_verify(const Options& o) {
    Result res;
    std::vector<int> ids;
    if (o.suite == "all") {
        ids = all_criteria();
    } else {
        for (double v : parse_list("verify.suite", o.suite)) {
            int id = int(v);
            if (id < 1 || id > int(all_criteria().size()) || v != id)
                throw ConfigError("verify: unknown criterion '" + format_number(v) + "'");
            ids.push_back(id);
        }
    }
    json list = json::array();
    res.table.columns = {"id", "pass"};
    for (int id : ids) {
        CriterionResult r = run_criterion(id);
        std::cerr << summary_line(r) << std::endl;
        json item = json::object();
        item["id"] = r.id;
        item["name"] = r.name;
        item["pass"] = r.pass;
        item["time_limit"] = r.time_limit;
        json metrics = json::object();
        for (const auto& [k, v] : r.metrics) metrics[k] = v;
        item["metrics"] = metrics;
        if (!r.note.empty()) item["note"] = r.note;
        list.push_back(item);
        res.table.rows.push_back({double(id), r.pass ? 1.0 : 0.0});
        res.within_budget = res.within_budget && r.pass;
    }
    res.outputs["criteria"] = list;
    return res;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << text;
}

void add_mellin(Registry& reg, CLI::App* app, Options& o) {
    reg.add(app, "--R", "mellin.R", o.mellin.R, "split point of the time integral");
    reg.add(app, "--N", "mellin.N", o.mellin.N, "heat-coefficient subtraction order");
    reg.add(app, "--t-min", "mellin.t_min", o.mellin.t_min, "small-time fit edge");
    reg.add(app, "--fit-span", "mellin.fit_span", o.mellin.fit_span, "fit window [t_min, span t_min]");
    reg.add(app, "--fit-points", "mellin.fit_points", o.mellin.fit_points, "fit sample count");
    reg.add(app, "--fit-order", "mellin.fit_order", o.mellin.fit_order, "ladder exponents in the fit");
    reg.add(app, "--fit-tol", "mellin.fit_tol", o.mellin.fit_tol, "relative fit residual budget");
    reg.add(app, "--quad-tol", "mellin.quad_tol", o.mellin.quad_tol, "quadrature tolerance");
}

void add_model(Registry& reg, CLI::App* app, Options& o) {
    reg.add(app, "--model", "model.name", o.model, "model preset");
    reg.add(app, "--n", "model.n", o.n, "dimension (0 keeps the preset)");
    reg.add(app, "--m", "model.m", o.m, "operator order");
    reg.add(app, "--c", "model.c", o.c, "shift constant");
    reg.add(app, "--q", "model.q", o.q, "lens order");
    reg.add(app, "--rotations", "model.rotations", o.rotations, "lens rotation multipliers");
    reg.add(app, "--cutoff-periods", "model.cutoff_periods", o.cutoff_periods, "torus |z|^2 cutoff");
}

void add_common(Registry& reg, CLI::App* app, Options& o) {
    reg.add(app, "--format", "output.format", o.format, "json or csv");
    reg.add(app, "--output", "output.path", o.output, "report path (stdout when empty)");
    reg.add(app, "--threads", "run.threads", o.threads, "worker threads");
    reg.add(app, "--config", "run.config", o.config, "key-value config file with sections");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Local zeta functions, Green's kernels and masses"};
    app.require_subcommand(1);
    Options o;
    std::map<std::string, Registry> regs;

    auto* riesz = app.add_subcommand("riesz", "Riesz distribution coefficients and values");
    regs["riesz"].add(riesz, "--alpha", "riesz.alpha", o.alpha, "real part of alpha");
    regs["riesz"].add(riesz, "--alpha-im", "riesz.alpha_im", o.alpha_im, "imaginary part of alpha");
    regs["riesz"].add(riesz, "--n", "riesz.n", o.n, "dimension");
    regs["riesz"].add(riesz, "--r", "riesz.r", o.r, "comma-separated radii");

    auto* heat = app.add_subcommand("heat", "m-heat kernel profile");
    regs["heat"].add(heat, "--m", "heat.m", o.m, "order");
    regs["heat"].add(heat, "--n", "heat.n", o.n, "dimension");
    regs["heat"].add(heat, "--t", "heat.t", o.t, "time");
    regs["heat"].add(heat, "--r", "heat.r", o.r, "comma-separated radii");

    auto* zeta = app.add_subcommand("zeta", "local zeta function on the diagonal");
    add_model(regs["zeta"], zeta, o);
    regs["zeta"].add(zeta, "--s", "zeta.s", o.s, "real part of s");
    regs["zeta"].add(zeta, "--s-im", "zeta.s_im", o.s_im, "imaginary part of s");
    add_mellin(regs["zeta"], zeta, o);

    auto* green = app.add_subcommand("green", "Green's kernel table and constant term");
    add_model(regs["green"], green, o);
    regs["green"].add(green, "--d", "green.d", o.d, "comma-separated distances");
    regs["green"].add(green, "--direction", "green.direction", o.direction, "torus displacement direction");
    regs["green"].add_flag(green, "--extract", "green.extract", o.extract, "extract the constant term");

    auto* massc = app.add_subcommand("mass", "mass at a point");
    add_model(regs["mass"], massc, o);
    add_mellin(regs["mass"], massc, o);

    auto* var = app.add_subcommand("variation", "conformal variation of the mass on a flat torus");
    regs["variation"].add(var, "--n", "variation.n", o.n, "dimension, 2 or 3");
    regs["variation"].add(var, "--K", "variation.K", o.K, "Fourier cube half-width (0: 8 for n=3, 16 for n=2)");
    regs["variation"].add(var, "--eps-fd", "variation.eps_fd", o.eps_fd, "finite-difference step");
    regs["variation"].add(var, "--amplitude", "variation.amplitude", o.amplitude, "amplitude of f");
    regs["variation"].add(var, "--axis", "variation.axis", o.axis, "axis of the cosine");
    regs["variation"].add(var, "--freq", "variation.freq", o.freq, "frequency of the cosine");
    regs["variation"].add(var, "--x", "variation.x", o.x, "base point, comma-separated");
    regs["variation"].add_flag(var, "--no-q-term", "variation.no_q_term", o.no_q_term, "drop the critical term");

    auto* ver = app.add_subcommand("verify", "acceptance criteria");
    regs["verify"].add(ver, "--suite", "verify.suite", o.suite, "all or comma-separated ids");

    for (auto* sub : {riesz, heat, zeta, green, massc, var, ver}) add_common(regs[sub->get_name()], sub, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    CLI::App* sub = app.get_subcommands().front();
    const std::string cmd = sub->get_name();
    Registry& reg = regs[cmd];
    std::vector<Registry> all;
    for (auto& [k, r] : regs) all.push_back(r);

    json report = json::object();
    report["command"] = cmd;
    Result res;
    std::string status = "ok", message;
    int code = kExitOk;
    try {
        if (!o.config.empty()) apply_config(o.config, reg, all_keys(all));
        if (const char* env = std::getenv("LZETA_OUTPUT")) o.output = env;
        if (o.format != "json" && o.format != "csv") throw ConfigError("output.format must be json or csv");
        if (o.threads < 1) throw ConfigError("run.threads must be positive");
        set_threads(o.threads);
        report["inputs"] = resolved_inputs(reg);
        if (cmd == "riesz") res = run_riesz(o);
        else if (cmd == "heat") res = run_heat(o);
        else if (cmd == "zeta") res = run_zeta(o);
        else if (cmd == "green") res = run_green(o);
        else if (cmd == "mass") res = run_mass(o);
        else if (cmd == "variation") res = run_variation(o);
        else res = run_verify(o);
        if (!res.within_budget) {
            status = "budget_exceeded";
            code = kExitBudget;
        }
    } catch (const ConfigError& e) {
        std::cerr << "lzeta: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::domain_error& e) {
        std::cerr << "lzeta: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "lzeta: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        status = "numeric_failure";
        message = e.what();
        code = kExitBudget;
        std::cerr << "lzeta: " << message << "\n";
    }
    report["status"] = status;
    if (!message.empty()) report["message"] = message;
    report["outputs"] = res.outputs;
    report["budgets"] = res.budgets;
    try {
        if (o.format == "csv") write_text(o.output, format_table(res.table, "csv"));
        else write_text(o.output, report.dump(2) + "\n");
    } catch (const std::exception& e) {
        std::cerr << "lzeta: " << e.what() << "\n";
        return kExitConfig;
    }
    return code;
}
