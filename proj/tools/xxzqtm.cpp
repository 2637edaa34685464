// xxzqtm: dressed tables, correlation lengths, low-T scans, free-fermion checks and sweeps.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "xxzqtm/xxzqtm.hpp"

using namespace xxzqtm;
using io::json;

namespace {

constexpr const char* version = "1.0.0";

struct RunConfig {
    std::string command;
    double J{1.0};
    std::vector<double> delta{0.0}, h{1.0}, T{0.1}, t_over_m{0.0};
    int order{64};
    double tol{1e-10};
    int max_sweeps{200};
    bool mirror{true};
    int nmax{3}, M{6};
    std::string output, format, config;
    bool no_meta{false};
    unsigned jobs{std::max(1u, std::thread::hardware_concurrency())};
};

double parse_double(const std::string& key, const std::string& s) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw error(errc::domain, "config: bad number for " + key + ": " + s);
    }
}

std::vector<double> parse_list(const std::string& key, const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok.erase(0, tok.find_first_not_of(" \t"));
        tok.erase(tok.find_last_not_of(" \t") + 1);
        if (!tok.empty()) out.push_back(parse_double(key, tok));
    }
    return out;
}

bool parse_bool(const std::string& key, const std::string& s) {
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw error(errc::domain, "config: bad boolean for " + key + ": " + s);
}

std::map<std::string, std::function<void(const std::string&)>> setters(RunConfig& c) {
    auto num = [](double& x, const char* k) { return [&x, k](const std::string& s) { x = parse_double(k, s); }; };
    auto list = [](std::vector<double>& x, const char* k) {
        return [&x, k](const std::string& s) { x = parse_list(k, s); };
    };
    auto integer = [](int& x, const char* k) {
        return [&x, k](const std::string& s) {
            double v = parse_double(k, s);
            if (v != static_cast<int>(v)) throw error(errc::domain, std::string("config: ") + k + " must be an integer");
            x = static_cast<int>(v);
        };
    };
    return {
        {"J", num(c.J, "J")},
        {"delta", list(c.delta, "delta")},
        {"h", list(c.h, "h")},
        {"T", list(c.T, "T")},
        {"t-over-m", list(c.t_over_m, "t-over-m")},
        {"order", integer(c.order, "order")},
        {"tol", num(c.tol, "tol")},
        {"max-sweeps", integer(c.max_sweeps, "max-sweeps")},
        {"nmax", integer(c.nmax, "nmax")},
        {"M", integer(c.M, "M")},
        {"mirror", [&c](const std::string& s) { c.mirror = parse_bool("mirror", s); }},
        {"no-meta", [&c](const std::string& s) { c.no_meta = parse_bool("no-meta", s); }},
        {"output", [&c](const std::string& s) { c.output = s; }},
        {"format", [&c](const std::string& s) { c.format = s; }},
        {"jobs",
         [&c](const std::string& s) {
             double v = parse_double("jobs", s);
             if (v < 1 || v != static_cast<unsigned>(v)) throw error(errc::domain, "config: jobs must be a positive integer");
             c.jobs = static_cast<unsigned>(v);
         }},
    };
}

std::string strip(std::string s) {
    s.erase(0, s.find_first_not_of(" \t\r"));
    s.erase(s.find_last_not_of(" \t\r") + 1);
    return s;
}

// key=value lines or one JSON object
std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw error(errc::io, "cannot read config file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    std::vector<std::pair<std::string, std::string>> kv;
    std::string lead = strip(text);
    if (!lead.empty() && lead.front() == '{') {
        json j;
        try {
            j = json::parse(text);
        } catch (const json::exception& e) {
            throw error(errc::domain, std::string("config: ") + e.what());
        }
        for (auto it = j.begin(); it != j.end(); ++it) {
            const json& v = it.value();
            std::string s;
            if (v.is_array()) {
                for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i].dump();
            } else if (v.is_string()) {
                s = v.get<std::string>();
            } else {
                s = v.dump();
            }
            kv.emplace_back(it.key(), s);
        }
        return kv;
    }
    std::string line;
    int n = 0;
    std::istringstream ls(text);
    while (std::getline(ls, line)) {
        ++n;
        line = strip(line);
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw error(errc::domain, "config line " + std::to_string(n) + ": expected key=value");
        kv.emplace_back(strip(line.substr(0, eq)), strip(line.substr(eq + 1)));
    }
    return kv;
}

void apply_config(RunConfig& c, const CLI::App& sub) {
    auto set = setters(c);
    for (const auto& [k, v] : read_config(c.config)) {
        auto it = set.find(k);
        if (it == set.end()) throw error(errc::domain, "config: unknown key " + k);
        const CLI::Option* opt = sub.get_option_no_throw("--" + k);
        if (opt && opt->count() > 0) continue;
        it->second(v);
    }
}

void validate(const RunConfig& c) {
    if (c.format != "csv" && c.format != "json") throw error(errc::domain, "format must be csv or json");
    if (c.order < 4) throw error(errc::domain, "order must be at least 4");
    if (!(c.tol > 0) || c.max_sweeps < 1) throw error(errc::domain, "solver knobs must be positive");
    if (c.nmax < 1 || c.M < 1) throw error(errc::domain, "nmax and M must be positive");
    for (const auto* v : {&c.delta, &c.h, &c.T, &c.t_over_m})
        if (v->empty()) throw error(errc::domain, "parameter lists must be non-empty");
    if (c.command != "sweep")
        for (const auto* v : {&c.delta, &c.h, &c.T, &c.t_over_m})
            if (v->size() != 1) throw error(errc::domain, "lists of values are only accepted by sweep");
}

std::string timestamp() {
    std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

std::string meta_line() {
    return "# generated " + timestamp() + " by xxzqtm " + version + "\n";
}

json with_meta(const RunConfig& c, json body) {
    if (c.no_meta) return body;
    json j;
    j["meta"] = json{{"generated", timestamp()}, {"version", version}};
    for (auto it = body.begin(); it != body.end(); ++it) j[it.key()] = it.value();
    return j;
}

CorrlenOptions corrlen_options(const RunConfig& c) {
    CorrlenOptions co;
    co.solver.tol = c.tol;
    co.solver.max_sweeps = c.max_sweeps;
    co.compare_mirror = c.mirror;
    co.fredholm_order = c.order;
    return co;
}

ModelParams point(const RunConfig& c) { return ModelParams::make(c.J, c.delta[0], c.h[0], c.T[0]); }

SpectralObservables checked_corrlen(const ModelParams& p, double tm, const CorrlenOptions& co) {
    p.validate();
    SpectralObservables o = dominant_corrlen(p, tm, co);
    if (!(o.decay_rate > 0.0))
        throw error(errc::regime, "computed Im Delta_dom = " + io::csv_number(o.decay_rate) + " is not positive");
    return o;
}

void warn(const std::vector<std::string>& ws) {
    for (const auto& w : ws) std::cerr << "warning: " << w << '\n';
}

std::string run_dressed(const RunConfig& c) {
    ModelParams p = point(c);
    p.validate();
    DressedData d = dressed_quantities(p, c.order);
    if (c.format == "csv") {
        std::ostringstream os;
        if (!c.no_meta) os << meta_line();
        io::write_dressed_csv(os, d);
        return os.str();
    }
    json j;
    j["params"] = io::params_json(p);
    j["q"] = d.q;
    j["vF"] = d.vF;
    j["Zq"] = d.Zq;
    j["N"] = d.N;
    json tab = json::array();
    const auto& r = d.eps.rule;
    for (std::size_t i = 0; i < r.nodes.size(); ++i)
        tab.push_back(json{{"lambda", r.nodes[i]}, {"eps", d.eps.values[i]}, {"eps_deriv", d.eps_deriv.values[i]},
                           {"Z", d.Z.values[i]}, {"p_deriv", d.p_deriv.values[i]}});
    j["table"] = std::move(tab);
    return with_meta(c, j).dump(2) + "\n";
}

std::string run_corrlen(const RunConfig& c) {
    SpectralObservables o = checked_corrlen(point(c), c.t_over_m[0], corrlen_options(c));
    warn(o.warnings);
    if (c.format == "csv") {
        std::ostringstream os;
        if (!c.no_meta) os << meta_line();
        io::write_csv_header(os, io::corrlen_columns(), "xxzqtm corrlen v1");
        io::write_csv_row(os, io::corrlen_row(o));
        return os.str();
    }
    return with_meta(c, io::observables_json(o)).dump(2) + "\n";
}

std::string config_string(const LowTConfig& k) {
    std::ostringstream os;
    const char* names[] = {"p+", "p-", "h+", "h-"};
    int i = 0;
    for (const auto* l : {&k.p_plus, &k.p_minus, &k.h_plus, &k.h_minus}) {
        os << (i ? " " : "") << names[i] << "=[";
        write_int_list(os, *l);
        os << "]";
        ++i;
    }
    return os.str();
}

json config_json(const LowTConfig& k) {
    return json{{"p_plus", k.p_plus}, {"p_minus", k.p_minus}, {"h_plus", k.h_plus}, {"h_minus", k.h_minus}};
}

std::string run_lowt(const RunConfig& c) {
    ModelParams p = point(c);
    p.validate();
    DressedData d = dressed_quantities(p, c.order);
    const double tm = c.t_over_m[0];
    if (std::abs(d.vF * tm) >= 1.0) warn({"|vF t/m| >= 1, outside the space-like cone"});
    LowTMinimum m = minimize_im_delta0(d.vF, d.Zq, tm, c.nmax, c.M);
    if (c.format == "csv") {
        std::ostringstream os;
        if (!c.no_meta) os << meta_line();
        os << "# xxzqtm lowt-scan v1 vF=" << io::csv_number(d.vF) << " Zq=" << io::csv_number(d.Zq)
           << " t_over_m=" << io::csv_number(tm) << " argmin " << config_string(m.config) << '\n';
        write_lowt_csv(os, enumerate_configs(c.nmax, c.M), d.vF, d.Zq, tm);
        return os.str();
    }
    json j;
    j["params"] = io::params_json(p);
    j["t_over_m"] = tm;
    j["vF"] = d.vF;
    j["Zq"] = d.Zq;
    j["bounds"] = json{{"nmax", c.nmax}, {"M", c.M}};
    j["enumerated"] = m.enumerated;
    j["argmin"] = config_json(m.config);
    j["delta0"] = io::cjson(m.value);
    j["low_t_prediction"] = pi / (2.0 * d.vF * d.Zq * d.Zq);
    json ties = json::array();
    for (const auto& t : m.ties) ties.push_back(config_json(t));
    j["ties"] = std::move(ties);
    return with_meta(c, j).dump(2) + "\n";
}

std::string run_ff(const RunConfig& c) {
    ModelParams p = point(c);
    ff::require_free_fermion(p);
    p.validate();
    const double rate = ff_exponent_rate(p);
    FFConstant k = ff_constant(p);
    SpectralObservables o = dominant_corrlen(p, 0.0, corrlen_options(c));
    const double diff = o.decay_rate + rate;
    std::vector<std::pair<std::string, double>> row{
        {"J", p.J},
        {"h", p.h},
        {"T", p.T},
        {"q", ff::fermi_point(p)},
        {"rate", rate},
        {"ReC", k.C.real()},
        {"ImC", k.C.imag()},
        {"nlie_ImDelta", o.decay_rate},
        {"abs_diff", std::abs(diff)},
        {"rel_diff", std::abs(diff / rate)},
        {"monodromy_abs", o.monodromy},
    };
    if (c.format == "csv") {
        std::ostringstream os;
        if (!c.no_meta) os << meta_line();
        std::vector<std::string> cols, cells;
        for (const auto& [k2, v] : row) {
            cols.push_back(k2);
            cells.push_back(io::csv_number(v));
        }
        io::write_csv_header(os, cols, "xxzqtm ff-oracle v1");
        io::write_csv_row(os, cells);
        return os.str();
    }
    json j;
    for (const auto& [k2, v] : row) j[k2] = v;
    j["C"] = io::cjson(k.C);
    return with_meta(c, j).dump(2) + "\n";
}

struct SweepPoint {
    double delta, h, T, tm;
    bool ok{false};
    SpectralObservables obs;
    std::string code, message;
};

std::string csv_quote(const std::string& s) {
    std::string r = "\"";
    for (char ch : s) r += (ch == '"') ? std::string("\"\"") : std::string(1, ch);
    return r + "\"";
}

std::string run_sweep(const RunConfig& c) {
    std::vector<SweepPoint> pts;
    for (double d : c.delta)
        for (double h : c.h)
            for (double T : c.T)
                for (double tm : c.t_over_m) pts.push_back(SweepPoint{d, h, T, tm, false, {}, {}, {}});
    const CorrlenOptions co = corrlen_options(c);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < pts.size(); i = next++) {
            SweepPoint& s = pts[i];
            try {
                s.obs = checked_corrlen(ModelParams::make(c.J, s.delta, s.h, s.T), s.tm, co);
                s.ok = true;
            } catch (const error& e) {
                s.code = error::name(e.code());
                s.message = e.what();
            } catch (const std::exception& e) {
                s.code = "internal";
                s.message = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    unsigned n = std::min<std::size_t>(c.jobs, pts.size());
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();

    std::size_t failed = 0;
    for (const auto& s : pts) failed += !s.ok;
    if (failed) std::cerr << "sweep: " << failed << " of " << pts.size() << " points failed\n";

    if (c.format == "csv") {
        std::ostringstream os;
        if (!c.no_meta) os << meta_line();
        auto cols = io::corrlen_columns();
        cols.insert(cols.end(), {"status", "error", "message"});
        io::write_csv_header(os, cols, "xxzqtm sweep v1");
        for (const auto& s : pts) {
            std::vector<std::string> r;
            if (s.ok) {
                r = io::corrlen_row(s.obs);
                r.insert(r.end(), {"ok", "", ""});
            } else {
                r.assign(io::corrlen_columns().size(), "");
                r[0] = io::csv_number(s.delta);
                r[1] = io::csv_number(s.h);
                r[2] = io::csv_number(c.J);
                r[3] = io::csv_number(s.T);
                r[4] = io::csv_number(s.tm);
                r.insert(r.end(), {"failed", s.code, csv_quote(s.message)});
            }
            io::write_csv_row(os, r);
        }
        return os.str();
    }
    json arr = json::array();
    for (const auto& s : pts) {
        if (s.ok) {
            json j = io::observables_json(s.obs);
            j["status"] = "ok";
            arr.push_back(std::move(j));
        } else {
            arr.push_back(json{{"params", json{{"J", c.J}, {"delta", s.delta}, {"h", s.h}, {"T", s.T}}},
                               {"t_over_m", s.tm},
                               {"status", "failed"},
                               {"error", s.code},
                               {"message", s.message}});
        }
    }
    return with_meta(c, json{{"points", arr}}).dump(2) + "\n";
}

void emit(const RunConfig& c, const std::string& text) {
    if (c.output.empty() || c.output == "-") {
        std::cout << text;
        std::cout.flush();
        if (!std::cout) throw error(errc::io, "write to stdout failed");
        return;
    }
    std::ofstream out(c.output, std::ios::binary);
    if (!out) throw error(errc::io, "cannot open output file " + c.output);
    out << text;
    out.close();
    if (!out) throw error(errc::io, "write failed for " + c.output);
}

int fail(const error& e) {
    std::cerr << io::error_json(e).dump() << '\n';
    return e.exit_status();
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig c;
    CLI::App app{"Correlation lengths of the XXZ chain at finite temperature"};
    app.require_subcommand(1);
    app.set_version_flag("--version", version);

    struct Cmd {
        const char* name;
        const char* help;
        const char* format;
        std::function<std::string(const RunConfig&)> run;
    };
    const std::vector<Cmd> cmds{
        {"dressed", "dressed energy, its derivative, dressed charge and momentum derivative on [-q, q]", "csv",
         run_dressed},
        {"corrlen", "dominant inverse correlation length", "json", run_corrlen},
        {"lowt-scan", "enumerate low-temperature particle-hole configurations", "csv", run_lowt},
        {"ff-oracle", "free-fermion rate and amplitude against the NLIE route", "csv", run_ff},
        {"sweep", "correlation lengths on a parameter grid", "csv", run_sweep},
    };
    std::vector<CLI::App*> subs;
    for (const auto& cmd : cmds) {
        CLI::App* s = app.add_subcommand(cmd.name, cmd.help);
        s->set_help_flag("--help", "print this help and exit");
        bool sweep = std::string(cmd.name) == "sweep";
        s->add_option("--J", c.J, "exchange coupling")->capture_default_str();
        for (auto [flag, var, help] : {std::tuple{"--delta", &c.delta, "anisotropy"},
                                       std::tuple{"--h", &c.h, "magnetic field"},
                                       std::tuple{"--T", &c.T, "temperature"},
                                       std::tuple{"--t-over-m", &c.t_over_m, "ratio of time to distance"}}) {
            auto* o = s->add_option(flag, *var, help)->capture_default_str();
            if (sweep) o->delimiter(',');
            else o->expected(1);
        }
        s->add_option("--order", c.order, "Gauss-Legendre order of the linear equations")->capture_default_str();
        s->add_option("--tol", c.tol, "NLIE tolerance")->capture_default_str();
        s->add_option("--max-sweeps", c.max_sweeps, "NLIE sweep limit")->capture_default_str();
        s->add_option("--mirror", c.mirror, "also solve the hole near -q and keep the slower decay")
            ->capture_default_str();
        s->add_option("--nmax", c.nmax, "maximal number of holes (lowt-scan)")->capture_default_str();
        s->add_option("--M", c.M, "quantum number bound (lowt-scan)")->capture_default_str();
        s->add_option("--config", c.config, "key=value file or JSON object; flags take precedence");
        s->add_option("--output,-o", c.output, "output path, default stdout");
        s->add_option("--format", c.format, "csv or json")->default_str(cmd.format);
        s->add_flag("--no-meta", c.no_meta, "omit the timestamp line");
        s->add_option("--jobs,-j", c.jobs, "worker threads for sweep")->check(CLI::PositiveNumber);
        subs.push_back(s);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        return fail(error(errc::domain, e.what()));
    }

    try {
        for (std::size_t i = 0; i < cmds.size(); ++i) {
            if (!subs[i]->parsed()) continue;
            c.command = cmds[i].name;
            if (!c.config.empty()) apply_config(c, *subs[i]);
            if (c.format.empty()) c.format = cmds[i].format;
            validate(c);
            emit(c, cmds[i].run(c));
        }
    } catch (const error& e) {
        return fail(e);
    } catch (const std::exception& e) {
        return fail(error(errc::convergence, e.what()));
    }
    return 0;
}
