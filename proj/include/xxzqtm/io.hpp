#pragma once

#include <complex>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "xxzqtm/contour.hpp"
#include "xxzqtm/dressed.hpp"
#include "xxzqtm/error.hpp"
#include "xxzqtm/model.hpp"
#include "xxzqtm/nlie.hpp"
#include "xxzqtm/spectral.hpp"

namespace xxzqtm::io {

using json = nlohmann::ordered_json;

inline json cjson(cplx z) { return json::array({z.real(), z.imag()}); }

inline json params_json(const ModelParams& p) {
    return json{{"J", p.J}, {"delta", p.delta}, {"h", p.h}, {"T", p.T}, {"zeta", p.zeta}};
}

inline json observables_json(const SpectralObservables& o) {
    json j;
    j["params"] = params_json(o.params);
    j["t_over_m"] = o.t_over_m;
    j["q"] = o.q;
    j["vF"] = o.vF;
    j["Zq"] = o.Zq;
    j["P"] = cjson(o.P);
    j["E"] = cjson(o.E);
    j["P_D"] = cjson(o.P_D);
    j["E_D"] = cjson(o.E_D);
    j["delta"] = cjson(o.delta);
    j["decay_rate"] = o.decay_rate;
    j["oscillation"] = o.oscillation;
    j["diagnostics"] = json{{"residual", o.residual},
                            {"monodromy_abs", o.monodromy},
                            {"iterations", o.iterations},
                            {"hole_root", cjson(o.root)},
                            {"hole_side", o.hole_side},
                            {"mirror_delta", cjson(o.mirror_delta)},
                            {"warnings", o.warnings}};
    return j;
}

inline json error_json(const error& e) {
    return json{{"error", error::name(e.code())}, {"exit_status", e.exit_status()}, {"message", e.what()}};
}

inline json solution_json(const NlieSolution& s) {
    json j;
    j["params"] = params_json(s.params);
    j["spin"] = s.spin;
    j["q_minus"] = cjson(s.contour.q_minus);
    j["q_plus"] = cjson(s.contour.q_plus);
    json nodes = json::array(), u = json::array();
    for (std::size_t i = 0; i < s.contour.size(); ++i) {
        nodes.push_back(cjson(s.contour.nodes[i]));
        u.push_back(cjson(s.u[i]));
    }
    j["nodes"] = std::move(nodes);
    j["u"] = std::move(u);
    json roots = json::array();
    for (const Root& r : s.roots)
        roots.push_back(json{{"x", cjson(r.x)}, {"sigma", r.sigma}, {"quantum", r.quantum}, {"hole", r.hole}});
    j["roots"] = std::move(roots);
    j["residual"] = s.residual;
    j["quantization_residual"] = s.quantization_residual;
    j["monodromy"] = cjson(s.monodromy);
    j["iterations"] = s.iterations;
    j["warnings"] = s.warnings;
    return j;
}

inline const std::vector<std::string>& corrlen_columns() {
    static const std::vector<std::string> c{"delta", "h",   "J",   "T",       "t_over_m", "q",          "vF",
                                            "Zq",    "ReP", "ImP", "ReE",     "ImE",      "ReDelta",    "ImDelta",
                                            "decay_rate", "residual", "monodromy_abs", "iterations"};
    return c;
}

inline std::string csv_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline void write_csv_header(std::ostream& os, const std::vector<std::string>& cols, const std::string& contract) {
    os << "# " << contract << '\n';
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    os << '\n';
}

inline void write_csv_row(std::ostream& os, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << '\n';
}

inline std::vector<std::string> corrlen_row(const SpectralObservables& o) {
    const ModelParams& p = o.params;
    std::vector<std::string> r;
    for (double x : {p.delta, p.h, p.J, p.T, o.t_over_m, o.q, o.vF, o.Zq, o.P.real(), o.P.imag(), o.E.real(), o.E.imag(),
                     o.delta.real(), o.delta.imag(), o.decay_rate, o.residual, o.monodromy})
        r.push_back(csv_number(x));
    r.push_back(std::to_string(o.iterations));
    return r;
}

inline void write_dressed_csv(std::ostream& os, const DressedData& d) {
    write_csv_header(os, {"lambda", "eps", "eps_deriv", "Z", "p_deriv"}, "xxzqtm dressed v1");
    const auto& r = d.eps.rule;
    for (std::size_t i = 0; i < r.nodes.size(); ++i)
        write_csv_row(os, {csv_number(r.nodes[i]), csv_number(d.eps.values[i]),
                           csv_number(d.eps_deriv.values[i]), csv_number(d.Z.values[i]),
                           csv_number(d.p_deriv.values[i])});
}

}  // namespace xxzqtm::io
